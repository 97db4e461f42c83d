//! Input parsing and report documents shared by the CLI and the browser demo.
//!
//! Input is comma-separated UTF-8 with the header `period,observed,forecast`.
//! Report numbers are rounded to 9 significant digits when the document is
//! built, so the structured rendering re-parses to an identical value.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hypothesis::{
    accuracy_test, binomial_sign_test, geometric_mean, make_ratio_sample, AccuracyVerdict, Method, Outcome,
    TestReport,
};
use crate::power::{Family, PowerPoint, PowerScenario, Table1Row};

pub const HEADER: [&str; 3] = ["period", "observed", "forecast"];

/// Exit status for a completed accuracy test.
pub fn exit_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::NotRejected => 0,
        Outcome::Inaccurate => 2,
        Outcome::NormalityRejected => 3,
    }
}

/// Exit status for unreadable or invalid input.
pub const EXIT_INPUT_ERROR: i32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub period: String,
    pub observed: f64,
    pub forecast: f64,
}

fn input_error<T>(line: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Input {
        line,
        message: message.into(),
    })
}

fn parse_positive(field: &str, what: &str, line: usize) -> Result<f64> {
    let v: f64 = match field.parse() {
        Ok(v) => v,
        Err(_) => return input_error(line, format!("{what} value {field:?} is not a number")),
    };
    if !v.is_finite() || v <= 0.0 {
        return input_error(line, format!("{what} value {field} must be strictly positive"));
    }
    Ok(v)
}

/// Parses `period,observed,forecast` records. Errors carry the 1-based line
/// number in the file, the header being line 1.
pub fn parse_records(bytes: &[u8]) -> Result<Vec<InputRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = match reader.headers() {
        Ok(h) => h.clone(),
        Err(e) => return input_error(1, format!("cannot read header: {e}")),
    };
    if headers.iter().ne(HEADER.iter().copied()) {
        return input_error(
            1,
            format!(
                "header must be `period,observed,forecast`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        );
    }
    let mut records = Vec::new();
    for row in reader.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize);
                return input_error(line, format!("malformed row: {e}"));
            }
        };
        let line = row.position().map_or(0, |p| p.line() as usize);
        records.push(InputRecord {
            period: row[0].to_string(),
            observed: parse_positive(&row[1], "observed", line)?,
            forecast: parse_positive(&row[2], "forecast", line)?,
        });
    }
    Ok(records)
}

/// `sha256:` followed by the hex digest of the raw input bytes.
pub fn input_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::from("sha256:");
    for b in digest.iter() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Rounds to 9 significant decimal digits.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    pub geometric_mean: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Two or more ratios are exactly equal.
    pub duplicate_ratios: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool_version: String,
    pub input_digest: String,
    pub alpha: f64,
    pub summary: SampleSummary,
    pub accuracy: AccuracyVerdict,
    pub binomial: TestReport,
}

fn rounded(r: TestReport) -> TestReport {
    TestReport {
        statistic: round_sig9(r.statistic),
        p_value: round_sig9(r.p_value),
        ..r
    }
}

/// Runs both tests on the parsed input and assembles the report.
pub fn build_report(bytes: &[u8], alpha: f64, tool_version: &str) -> Result<ReportDocument> {
    let records = parse_records(bytes)?;
    let observed: Vec<f64> = records.iter().map(|r| r.observed).collect();
    let forecast: Vec<f64> = records.iter().map(|r| r.forecast).collect();
    let sample = make_ratio_sample(&observed, &forecast)?;
    let accuracy = accuracy_test(&sample, alpha)?;
    let binomial = binomial_sign_test(sample.ratios(), alpha)?;

    let ratios = sample.ratios();
    let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ReportDocument {
        tool_version: tool_version.to_string(),
        input_digest: input_digest(bytes),
        alpha,
        summary: SampleSummary {
            n: sample.len(),
            geometric_mean: round_sig9(geometric_mean(&sample)),
            min_ratio: round_sig9(min_ratio),
            max_ratio: round_sig9(max_ratio),
            duplicate_ratios: sample.has_duplicates(),
        },
        accuracy: AccuracyVerdict {
            normality: rounded(accuracy.normality),
            location: accuracy.location.map(rounded),
            outcome: accuracy.outcome,
        },
        binomial: rounded(binomial),
    })
}

fn decision(reject: bool) -> &'static str {
    if reject {
        "rejected"
    } else {
        "not rejected"
    }
}

impl ReportDocument {
    pub fn exit_code(&self) -> i32 {
        exit_code(self.accuracy.outcome)
    }

    pub fn render_text(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let _ = writeln!(out, "Forecast accuracy report");
        let _ = writeln!(out, "  input            {}", self.input_digest);
        let _ = writeln!(out, "  tool version     {}", self.tool_version);
        let _ = writeln!(out, "  alpha            {}", self.alpha);
        let _ = writeln!(out, "  n                {}", s.n);
        let _ = writeln!(out, "  geometric mean   {}", s.geometric_mean);
        let _ = writeln!(out, "  ratio range      {} .. {}", s.min_ratio, s.max_ratio);
        if s.duplicate_ratios {
            let _ = writeln!(
                out,
                "  warning: some ratios are exactly equal; the tests assume distinct values"
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "Accuracy test on log-ratios");
        let sw = &self.accuracy.normality;
        let _ = writeln!(
            out,
            "  Shapiro-Wilk     W = {}, p = {} (normality {})",
            sw.statistic,
            sw.p_value,
            decision(sw.reject)
        );
        match &self.accuracy.location {
            Some(t) => {
                let df = match t.method {
                    Method::StudentT { df } => df,
                    _ => 0,
                };
                let _ = writeln!(
                    out,
                    "  t-test, df {df:<5} T = {}, p = {} (GM = 1 {})",
                    t.statistic,
                    t.p_value,
                    decision(t.reject)
                );
            }
            None => {
                let _ = writeln!(
                    out,
                    "  t-test           not run: the log-ratios failed the normality check"
                );
            }
        }
        let verdict = match self.accuracy.outcome {
            Outcome::Inaccurate => "INACCURATE",
            Outcome::NotRejected => "not rejected",
            Outcome::NormalityRejected => "not applicable (normality rejected)",
        };
        let _ = writeln!(out, "  verdict          {verdict}");
        let _ = writeln!(out);
        let b = &self.binomial;
        let _ = writeln!(out, "Binomial sign test");
        if let Method::BinomialSign { n, ties } = b.method {
            let _ = writeln!(
                out,
                "  ratios above 1   {} of {n} ({ties} exactly 1)",
                b.statistic
            );
        }
        let _ = writeln!(out, "  p-value          {} ({})", b.p_value, decision(b.reject));
        out
    }
}

/// A computed power curve together with the scenario that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveResult {
    pub scenario: PowerScenario,
    pub points: Vec<PowerPoint>,
}

pub const POWER_CSV_HEADER: &str = "curve,family,theta_r,rho,a,b_s,b,a_r,n,reps,alpha,gate,seed,beta,\
reject_rate_accuracy,reject_rate_binomial,normality_gate_rate,se_accuracy,se_binomial,se_normality_gate";

/// One row per `(curve, β)`. Floats use Rust's shortest round-trip form,
/// so equal results render to equal bytes.
pub fn render_power_csv(curves: &[CurveResult]) -> String {
    let mut out = String::from(POWER_CSV_HEADER);
    out.push('\n');
    for c in curves {
        let sc = &c.scenario;
        let params = match sc.family {
            Family::LogNormalRatio { theta_r, rho } => format!("{theta_r},{rho},,,,"),
            Family::GammaFixedShape { a, b_s } => format!(",,{a},{b_s},,"),
            Family::GammaFixedRate { b, a_r } => format!(",,,,{b},{a_r}"),
        };
        for p in &c.points {
            let _ = writeln!(
                out,
                "{},{},{params},{},{},{},{},{},{},{},{},{},{},{},{}",
                sc.curve,
                sc.family.kind(),
                sc.n,
                p.reps,
                sc.alpha,
                sc.gate.as_str(),
                sc.seed,
                p.beta,
                p.reject_rate_accuracy,
                p.reject_rate_binomial,
                p.normality_gate_rate,
                p.mc_std_err.accuracy,
                p.mc_std_err.binomial,
                p.mc_std_err.normality_gate,
            );
        }
    }
    out
}

pub const TABLE1_CSV_HEADER: &str = "case,a,b,n,reps,reject_pct,std_err_pct";

pub fn render_table1_csv(rows: &[Table1Row]) -> String {
    let mut out = String::from(TABLE1_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.4},{:.4}",
            r.case, r.a, r.b, r.n, r.reps, r.reject_pct, r.std_err_pct
        );
    }
    out
}

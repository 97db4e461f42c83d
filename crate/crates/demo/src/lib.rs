//! WebAssembly bindings for the static page in `www/`.
//!
//! Each export is a thin wrapper around a plain Rust function that returns
//! JSON, so the logic is testable without a browser.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use geoacc_core::distributions::{sample_gamma, GammaParams};
use geoacc_core::power::{beta_grid, run_power_curve, Family, NormalityGate, PowerPoint, PowerScenario};
use geoacc_core::report::build_report;
use geoacc_core::specfn::{digamma, trigamma};
use geoacc_core::RngStream;

/// Upper bound on replications per point, to keep the page responsive.
pub const MAX_REPS: u64 = 20_000;

#[derive(Serialize)]
struct CurveResponse {
    family: Family,
    n: usize,
    reps: u64,
    gate: NormalityGate,
    points: Vec<PowerPoint>,
}

fn family_from(kind: &str, p1: f64, p2: f64) -> Result<Family, String> {
    match kind {
        "lognormal_ratio" => Ok(Family::LogNormalRatio { theta_r: p1, rho: p2 }),
        "gamma_fixed_shape" => Ok(Family::GammaFixedShape { a: p1, b_s: p2 }),
        "gamma_fixed_rate" => Ok(Family::GammaFixedRate { b: p1, a_r: p2 }),
        other => Err(format!("unknown family {other:?}")),
    }
}

/// Power curve as JSON. `p1, p2` are `(θ_R, ρ)`, `(a, b_S)` or `(b, a_R)`
/// depending on `kind`.
#[allow(clippy::too_many_arguments)]
pub fn power_curve_json(
    kind: &str,
    p1: f64,
    p2: f64,
    n: usize,
    reps: u64,
    points: usize,
    seed: u64,
    gated: bool,
) -> Result<String, String> {
    if reps > MAX_REPS {
        return Err(format!(
            "at most {MAX_REPS} replications per point in the browser"
        ));
    }
    let family = family_from(kind, p1, p2)?;
    let (lo, hi) = family.default_beta_range();
    let mut scenario = PowerScenario::new(family, n, seed);
    scenario.reps = reps;
    scenario.beta_grid = beta_grid(lo, hi, points);
    scenario.gate = if gated {
        NormalityGate::Conservative
    } else {
        NormalityGate::Bypass
    };
    let points = run_power_curve(&scenario).map_err(|e| e.to_string())?;
    let resp = CurveResponse {
        family,
        n,
        reps,
        gate: scenario.gate,
        points,
    };
    serde_json::to_string(&resp).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct Histogram {
    pub centers: Vec<f64>,
    /// Empirical density of the simulated log-ratios.
    pub density: Vec<f64>,
    /// Normal density with the exact mean and variance of the log-ratio.
    pub normal: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

/// Histogram of `log(S / R)` for independent `S ~ Gamma(a_s, b_s)` and
/// `R ~ Gamma(a_r, b_r)`, next to the normal curve with the same two moments.
pub fn log_ratio_histogram(
    a_s: f64,
    b_s: f64,
    a_r: f64,
    b_r: f64,
    draws: usize,
    bins: usize,
    seed: u64,
) -> Result<Histogram, String> {
    let s = GammaParams::new(a_s, b_s).map_err(|e| e.to_string())?;
    let r = GammaParams::new(a_r, b_r).map_err(|e| e.to_string())?;
    if draws == 0 || bins == 0 {
        return Err("draws and bins must be positive".into());
    }
    let mean =
        digamma(a_s).map_err(|e| e.to_string())? - b_s.ln() - digamma(a_r).map_err(|e| e.to_string())?
            + b_r.ln();
    let variance = trigamma(a_s).map_err(|e| e.to_string())? + trigamma(a_r).map_err(|e| e.to_string())?;
    let sd = variance.sqrt();
    let (lo, hi) = (mean - 5.0 * sd, mean + 5.0 * sd);
    let width = (hi - lo) / bins as f64;

    let mut counts = vec![0u64; bins];
    let mut stream = RngStream::new(seed, 0);
    for _ in 0..draws {
        let y = (sample_gamma(&s, &mut stream) / sample_gamma(&r, &mut stream)).ln();
        if y >= lo && y < hi {
            counts[((y - lo) / width) as usize] += 1;
        }
    }
    let centers: Vec<f64> = (0..bins).map(|i| lo + (i as f64 + 0.5) * width).collect();
    let density = counts
        .iter()
        .map(|&c| c as f64 / (draws as f64 * width))
        .collect();
    let normal = centers
        .iter()
        .map(|y| {
            (-(y - mean).powi(2) / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
        })
        .collect();
    Ok(Histogram {
        centers,
        density,
        normal,
        mean,
        variance,
    })
}

#[derive(Serialize)]
struct AnalysisResponse {
    report: geoacc_core::report::ReportDocument,
    text: String,
    exit_code: i32,
}

/// Runs both tests on CSV text with header `period,observed,forecast`.
pub fn analyze_csv_json(text: &str, alpha: f64) -> Result<String, String> {
    let report =
        build_report(text.as_bytes(), alpha, env!("CARGO_PKG_VERSION")).map_err(|e| e.to_string())?;
    let resp = AnalysisResponse {
        text: report.render_text(),
        exit_code: report.exit_code(),
        report,
    };
    serde_json::to_string(&resp).map_err(|e| e.to_string())
}

fn js_err(e: String) -> JsValue {
    JsValue::from_str(&e)
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn power_curve(
    kind: &str,
    p1: f64,
    p2: f64,
    n: usize,
    reps: u32,
    points: usize,
    seed: u32,
    gated: bool,
) -> Result<String, JsValue> {
    power_curve_json(kind, p1, p2, n, u64::from(reps), points, u64::from(seed), gated).map_err(js_err)
}

#[wasm_bindgen]
pub fn loggamma_histogram(
    a_s: f64,
    b_s: f64,
    a_r: f64,
    b_r: f64,
    draws: usize,
    bins: usize,
    seed: u32,
) -> Result<String, JsValue> {
    let h = log_ratio_histogram(a_s, b_s, a_r, b_r, draws, bins, u64::from(seed)).map_err(js_err)?;
    serde_json::to_string(&h).map_err(|e| js_err(e.to_string()))
}

#[wasm_bindgen]
pub fn analyze_csv(text: &str, alpha: f64) -> Result<String, JsValue> {
    analyze_csv_json(text, alpha).map_err(js_err)
}

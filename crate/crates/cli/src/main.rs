//! `geoacc`: forecast accuracy tests, power studies and the Shapiro-Wilk
//! rejection table from the command line.

mod config;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use geoacc_core::hypothesis::DEFAULT_ALPHA;
use geoacc_core::power::{run_power_curve, run_table1, DEFAULT_TABLE1_REPS};
use geoacc_core::report::{build_report, render_power_csv, render_table1_csv, CurveResult, EXIT_INPUT_ERROR};

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Seed used when neither the command line nor the config sets one.
pub const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(name = "geoacc", version, about = "Geometric-mean forecast accuracy tests")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    /// JSON document with fixed field names.
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Test whether forecasts are accurate in geometric mean.
    ///
    /// Exit status: 0 not rejected, 2 inaccurate, 3 normality of the
    /// log-ratios rejected, 1 input error.
    Test {
        /// CSV with header `period,observed,forecast`; `-` reads stdin.
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Estimate power curves for the scenarios in a TOML config.
    Power {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Overrides every seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides every replication count in the config.
        #[arg(long)]
        reps: Option<u64>,
    },
    /// Shapiro-Wilk rejection rates for log-ratios of gamma variables.
    Table1 {
        #[arg(long, default_value_t = DEFAULT_TABLE1_REPS)]
        reps: u64,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf).context("reading stdin")?;
        return Ok(buf);
    }
    fs::read(path).with_context(|| format!("cannot read {}", path.display()))
}

fn emit(output: Option<&Path>, content: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, content).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(content.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn cmd_test(input: &Path, alpha: f64, format: Format, output: Option<&Path>) -> Result<i32> {
    let bytes = read_input(input)?;
    let doc = build_report(&bytes, alpha, VERSION).with_context(|| format!("{}", input.display()))?;
    let content = match format {
        Format::Text => doc.render_text(),
        Format::Structured => {
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            s
        }
    };
    emit(output, &content)?;
    Ok(doc.exit_code())
}

fn cmd_power(config_path: &Path, output: Option<&Path>, seed: Option<u64>, reps: Option<u64>) -> Result<i32> {
    let text =
        fs::read_to_string(config_path).with_context(|| format!("cannot read {}", config_path.display()))?;
    let scenarios = config::load(&text, seed, reps).with_context(|| format!("{}", config_path.display()))?;
    let mut curves = Vec::with_capacity(scenarios.len());
    for scenario in scenarios {
        let points = run_power_curve(&scenario).with_context(|| format!("curve {}", scenario.curve))?;
        curves.push(CurveResult { scenario, points });
    }
    emit(output, &render_power_csv(&curves))?;
    Ok(0)
}

fn cmd_table1(reps: u64, output: Option<&Path>, seed: u64) -> Result<i32> {
    if reps < 1 {
        bail!("--reps must be at least 1");
    }
    let rows = run_table1(reps, seed)?;
    emit(output, &render_table1_csv(&rows))?;
    Ok(0)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Test {
            input,
            alpha,
            format,
            output,
        } => cmd_test(&input, alpha, format, output.as_deref()),
        Command::Power {
            config,
            output,
            seed,
            reps,
        } => cmd_power(&config, output.as_deref(), seed, reps),
        Command::Table1 { reps, output, seed } => cmd_table1(reps, output.as_deref(), seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap's own usage-error status would collide with "inaccurate"
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT_ERROR as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT_ERROR as u8)
        }
    }
}

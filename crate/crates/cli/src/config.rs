//! TOML power-study configs. Each `[[scenario]]` table carries the fields of
//! a `PowerScenario`; anything left out takes the top-level value or the
//! library default.
//!
//! ```toml
//! seed = 7
//! reps = 10000
//!
//! [[scenario]]
//! family = { kind = "lognormal_ratio", theta_r = 1.0, rho = 0.0 }
//! n = 20
//! beta_range = [-0.2, 0.2]
//! points = 21
//! ```

use anyhow::{bail, Result};
use serde::Deserialize;

use geoacc_core::hypothesis::DEFAULT_ALPHA;
use geoacc_core::power::{
    beta_grid, Family, NormalityGate, PowerScenario, DEFAULT_GRID_POINTS, DEFAULT_POWER_REPS,
};

use crate::DEFAULT_SEED;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PowerConfig {
    seed: Option<u64>,
    reps: Option<u64>,
    gate: Option<NormalityGate>,
    #[serde(default, rename = "scenario")]
    scenarios: Vec<ScenarioConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioConfig {
    family: Family,
    n: usize,
    /// Explicit β values; excludes `beta_range`.
    beta_grid: Option<Vec<f64>>,
    beta_range: Option<[f64; 2]>,
    points: Option<usize>,
    reps: Option<u64>,
    alpha: Option<f64>,
    seed: Option<u64>,
    gate: Option<NormalityGate>,
    /// Defaults to the scenario's position in the file.
    curve: Option<u32>,
}

/// Parses a config and applies command-line overrides. Every scenario is
/// validated before any simulation starts.
pub fn load(
    text: &str,
    seed_override: Option<u64>,
    reps_override: Option<u64>,
) -> Result<Vec<PowerScenario>> {
    let cfg: PowerConfig = toml::from_str(text)?;
    if cfg.scenarios.is_empty() {
        bail!("config has no [[scenario]] entries");
    }
    let mut out = Vec::with_capacity(cfg.scenarios.len());
    for (i, sc) in cfg.scenarios.into_iter().enumerate() {
        let grid = match (sc.beta_grid, sc.beta_range) {
            (Some(_), Some(_)) => bail!("scenario {}: give beta_grid or beta_range, not both", i + 1),
            (Some(g), None) => {
                if sc.points.is_some() {
                    bail!("scenario {}: points only applies to beta_range", i + 1);
                }
                g
            }
            (None, range) => {
                let (lo, hi) = range.map_or_else(|| sc.family.default_beta_range(), |[lo, hi]| (lo, hi));
                beta_grid(lo, hi, sc.points.unwrap_or(DEFAULT_GRID_POINTS))
            }
        };
        let scenario = PowerScenario {
            family: sc.family,
            beta_grid: grid,
            n: sc.n,
            reps: reps_override
                .or(sc.reps)
                .or(cfg.reps)
                .unwrap_or(DEFAULT_POWER_REPS),
            alpha: sc.alpha.unwrap_or(DEFAULT_ALPHA),
            seed: seed_override.or(sc.seed).or(cfg.seed).unwrap_or(DEFAULT_SEED),
            gate: sc.gate.or(cfg.gate).unwrap_or_default(),
            curve: sc.curve.unwrap_or(i as u32),
        };
        if let Err(e) = scenario.validate() {
            bail!("scenario {}: {e}", i + 1);
        }
        out.push(scenario);
    }
    Ok(out)
}

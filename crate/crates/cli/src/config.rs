//! JSON run configurations, one struct per subcommand.

use std::path::Path;

use anyhow::{bail, Context, Result};
use dispmap_core::model::{PulseSpec, SystemConfig, SystemParams};
use serde::de::DeserializeOwned;
use serde::Deserialize;

/// Inclusive linear grid.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Range {
    pub fn values(&self, key: &str) -> Result<Vec<f64>> {
        if self.points == 0 {
            bail!("config error: `{key}.points` is 0 (empty sweep)");
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            bail!("config error: `{key}` bounds must be finite");
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        Ok((0..self.points).map(|k| self.start + step * k as f64).collect())
    }
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| anyhow::anyhow!("config error in {}: {e}", path.display()))
}

pub fn system(cfg: &SystemConfig) -> Result<(SystemParams, PulseSpec)> {
    let p = cfg.params().context("config error in `system`")?;
    let pulse = cfg.pulse().context("config error in `system.pulse`")?;
    Ok((p, pulse))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSweep {
    pub system: SystemConfig,
    pub delta_cd_mhz: Range,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkEig {
    pub system: SystemConfig,
    pub omega_c_mhz: Range,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transient {
    pub system: SystemConfig,
    pub dt_ns: f64,
    pub t_end_ns: f64,
    #[serde(default = "coherence_level")]
    pub level: [usize; 2],
}

fn coherence_level() -> [usize; 2] {
    [1, 0]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumGrid {
    pub system: SystemConfig,
    pub photon_number: f64,
    /// Levels per copy; defaults to `system.n_a`.
    #[serde(default)]
    pub levels: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Propagate {
    pub system: SystemConfig,
    pub t_end_ns: f64,
    /// Defaults to the largest stable step.
    #[serde(default)]
    pub dt_ns: Option<f64>,
    pub samples: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareGambetta {
    pub system: SystemConfig,
    pub delta_cd_mhz: Range,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Eigenstates {
    pub system: SystemConfig,
    pub omega_c_mhz: Range,
    #[serde(default = "tracking_steps")]
    pub tracking_steps: usize,
}

fn tracking_steps() -> usize {
    20
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Single {
    pub system: SystemConfig,
}

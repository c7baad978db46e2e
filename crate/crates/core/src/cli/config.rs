use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::discrete::EigenOptions;
use crate::estimate::{TailWindow, DEFAULT_CENSOR_THRESHOLD};
use crate::param::{exponent_dprime, gasket_walk_dimension};
use crate::sampler::SimConfig;
use crate::space::{DomainSpec, SpaceKind, SpaceSpec};
use crate::verify::{Tolerance, SURVIVAL_SUITE};
use crate::{Error, Result};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Mesh width for Euclidean grids.
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default)]
    pub eigen: EigenOptions,
}

fn default_h() -> f64 {
    1e-2
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            h: default_h(),
            eigen: EigenOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    /// Survival grid `[lo, hi]` with `points` equally spaced times.
    pub grid: (f64, f64, usize),
    #[serde(default = "default_moments")]
    pub moments: Vec<f64>,
    /// Exponential-moment rates as fractions of the fitted tail rate.
    #[serde(default = "default_exp_fractions")]
    pub exp_rate_fractions: Vec<f64>,
    #[serde(default)]
    pub tail_window: TailWindow,
    #[serde(default = "default_censor")]
    pub censor_threshold: f64,
    /// Extra starting points approximating the supremum over the domain.
    #[serde(default)]
    pub extra_starts: usize,
}

fn default_moments() -> Vec<f64> {
    vec![1.0, 2.0]
}

fn default_exp_fractions() -> Vec<f64> {
    vec![0.4]
}

fn default_censor() -> f64 {
    DEFAULT_CENSOR_THRESHOLD
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_suite")]
    pub suite: Vec<String>,
    #[serde(default)]
    pub tolerance: Tolerance,
    /// Envelope exponent; derived from the space when absent.
    #[serde(default)]
    pub dprime: Option<f64>,
}

fn default_suite() -> Vec<String> {
    SURVIVAL_SUITE.iter().map(|s| s.to_string()).collect()
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            suite: default_suite(),
            tolerance: Tolerance::default(),
            dprime: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HotSpotsConfig {
    pub h: f64,
    #[serde(default = "default_hot_spots_bound")]
    pub bound: f64,
}

fn default_hot_spots_bound() -> f64 {
    1.02
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormatFlags {
    #[serde(default = "yes")]
    pub binary: bool,
    #[serde(default = "yes")]
    pub csv: bool,
}

fn yes() -> bool {
    true
}

impl Default for FormatFlags {
    fn default() -> Self {
        Self { binary: true, csv: true }
    }
}

/// One experiment, shared by every subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub space: SpaceSpec,
    pub domain: DomainSpec,
    /// Starting point; empty selects the domain's reference point.
    #[serde(default)]
    pub start: Vec<f64>,
    #[serde(default)]
    pub sim: Option<SimConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub estimate: Option<EstimateConfig>,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub hotspots: Option<HotSpotsConfig>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub formats: FormatFlags,
}

fn field(name: &str, e: Error) -> Error {
    Error::Precondition(format!("{name}: {e}"))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::MissingInput(format!("config {}: {e}", path.display())))?;
        let cfg: ExperimentConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Format(format!("config {}: {e}", path.display())))?;
        Ok(cfg)
    }

    /// Validates every section, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::Precondition(format!(
                "schema_version: {} (expected {CONFIG_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.space.validate().map_err(|e| field("space", e))?;
        self.domain.validate(&self.space).map_err(|e| field("domain", e))?;
        if !self.start.is_empty() && !matches!(self.space.kind, SpaceKind::Gasket { .. }) {
            if self.start.len() != self.space.coordinate_dim() {
                return Err(Error::Precondition(format!(
                    "start: expected {} coordinates, got {}",
                    self.space.coordinate_dim(),
                    self.start.len()
                )));
            }
            if !self.domain.contains(&self.start) {
                return Err(Error::Precondition(format!(
                    "start: point {:?} lies outside {}",
                    self.start,
                    self.domain.label()
                )));
            }
        }
        if let Some(sim) = &self.sim {
            sim.validate().map_err(|e| field("sim", e))?;
        }
        if !(self.solver.h > 0.0) {
            return Err(Error::Precondition(format!("solver.h: must be positive, got {}", self.solver.h)));
        }
        if let Some(est) = &self.estimate {
            let (lo, hi, k) = est.grid;
            if !(lo > 0.0 && lo < hi) || k < 2 {
                return Err(Error::Precondition(format!(
                    "estimate.grid: need 0 < lo < hi and at least 2 points, got ({lo}, {hi}, {k})"
                )));
            }
            if let Some(sim) = &self.sim {
                if hi > sim.t_max {
                    return Err(Error::Precondition(format!(
                        "estimate.grid: hi = {hi} exceeds sim.t_max = {}",
                        sim.t_max
                    )));
                }
            }
        }
        if let Some(hs) = &self.hotspots {
            if !(hs.h > 0.0) {
                return Err(Error::Precondition(format!("hotspots.h: must be positive, got {}", hs.h)));
            }
        }
        Ok(())
    }

    pub fn sim(&self) -> Result<&SimConfig> {
        self.sim
            .as_ref()
            .ok_or_else(|| Error::Precondition("sim: section required for this command".into()))
    }

    /// Start point, defaulting to the domain's reference point.
    pub fn start_point(&self) -> Vec<f64> {
        if !self.start.is_empty() || matches!(self.space.kind, SpaceKind::Gasket { .. }) {
            return self.start.clone();
        }
        match &self.domain {
            DomainSpec::EuclideanBall { center, .. } | DomainSpec::KoranyiBall { center, .. } => center.clone(),
            d => d
                .bounding_box()
                .map(|(lo, hi)| lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect())
                .unwrap_or_else(|| vec![0.0; self.space.coordinate_dim()]),
        }
    }

    /// Envelope exponent `d'` from the configured value or the space.
    pub fn dprime(&self) -> Result<f64> {
        if let Some(d) = self.verify.dprime {
            return Ok(d);
        }
        let beta = match self.space.kind {
            SpaceKind::Gasket { .. } => gasket_walk_dimension(),
            _ => 2.0,
        };
        exponent_dprime(self.space.alpha(), beta, beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval() -> ExperimentConfig {
        serde_json::from_str(
            r#"{"schema_version": 1,
                "space": {"variant": "euclidean", "d": 1},
                "domain": {"variant": "interval", "a": -1, "b": 1},
                "start": [0.0],
                "sim": {"step_size": 1e-3, "t_max": 10, "n_paths": 100, "seed": 1}}"#,
        )
        .unwrap()
    }

    #[test]
    fn validation_names_the_field() {
        let mut c = interval();
        c.validate().unwrap();
        c.start = vec![2.0];
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("start"), "{msg}");
        let mut c = interval();
        c.sim.as_mut().unwrap().n_paths = 0;
        assert!(c.validate().unwrap_err().to_string().contains("sim"));
    }

    #[test]
    fn dprime_follows_the_space() {
        assert_eq!(interval().dprime().unwrap(), 0.5);
        let mut c = interval();
        c.space = SpaceSpec::gasket(3);
        assert!((c.dprime().unwrap() - 0.9024).abs() < 1e-4);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let r: std::result::Result<ExperimentConfig, _> = serde_json::from_str(
            r#"{"schema_version": 1, "space": {"variant": "euclidean", "d": 1},
                "domain": {"variant": "interval", "a": -1, "b": 1}, "bogus": 1}"#,
        );
        assert!(r.is_err());
    }
}

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roc::{LossChannelPair, RocGrid};
use crate::scene::{AttractorParams, GridSpec, ParticleParams};

/// Imaging scenario with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Scenario {
    /// Two Gaussian attractors, estimated by 2-medoids clustering.
    Attractors(AttractorParams),
    /// Rectangular particles, counted by DBSCAN.
    Particles(ParticleParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Attractors,
    Particles,
}

impl Scenario {
    pub fn kind(&self) -> ScenarioKind {
        match self {
            Scenario::Attractors(_) => ScenarioKind::Attractors,
            Scenario::Particles(_) => ScenarioKind::Particles,
        }
    }
}

/// Where the two ROC curves come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum RocSource {
    Computed(RocGrid),
    /// CSV with columns `alpha,beta_classical,beta_quantum`.
    File(PathBuf),
}

impl Default for RocSource {
    fn default() -> Self {
        RocSource::Computed(RocGrid::default())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub grid_side: usize,
    #[serde(default = "LossChannelPair::reference")]
    pub probe: LossChannelPair,
    #[serde(default = "default_type1_grid")]
    pub type1_grid: Vec<f64>,
    /// Samples per histogram.
    pub samples_per_point: u64,
    /// Fixed truths for the conditional term of the attractor estimate.
    #[serde(default = "default_fixed_truths")]
    pub fixed_truths: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub roc_source: RocSource,
    /// Worker threads; all available cores when absent.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Fail instead of warning when an attractor histogram has fewer than
    /// ten samples per possible outcome.
    #[serde(default)]
    pub enforce_sample_ratio: bool,
    /// Also write `records_<type1>_<family>.csv` files.
    #[serde(default)]
    pub write_records: bool,
}

pub fn default_type1_grid() -> Vec<f64> {
    (0..11).map(|i| i as f64 / 200.0).collect()
}

fn default_fixed_truths() -> usize {
    5
}

/// Default sample count for the particle scenario: the smallest multiple of
/// the eleven strata that is at least 20000.
pub const PARTICLE_SAMPLES: u64 = 20_009;
pub const ATTRACTOR_SAMPLES: u64 = 100_000;
pub const ATTRACTOR_SAMPLES_PAPER_SCALE: u64 = 800_000;
pub const DEFAULT_SEED: u64 = 20_240_517;

impl ExperimentConfig {
    /// Desk-scale defaults for a scenario.
    pub fn desk_scale(kind: ScenarioKind) -> Self {
        let (scenario, grid_side, samples) = match kind {
            ScenarioKind::Attractors => (
                Scenario::Attractors(AttractorParams::default()),
                20,
                ATTRACTOR_SAMPLES,
            ),
            ScenarioKind::Particles => (
                Scenario::Particles(ParticleParams::default()),
                50,
                PARTICLE_SAMPLES,
            ),
        };
        Self {
            scenario,
            grid_side,
            probe: LossChannelPair::reference(),
            type1_grid: default_type1_grid(),
            samples_per_point: samples,
            fixed_truths: default_fixed_truths(),
            master_seed: DEFAULT_SEED,
            roc_source: RocSource::default(),
            threads: None,
            enforce_sample_ratio: false,
            write_records: false,
        }
    }

    /// Sample counts used for the published figures.
    pub fn paper_scale(kind: ScenarioKind) -> Self {
        let mut config = Self::desk_scale(kind);
        if kind == ScenarioKind::Attractors {
            config.samples_per_point = ATTRACTOR_SAMPLES_PAPER_SCALE;
            config.enforce_sample_ratio = true;
        }
        config
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.grid_side)
    }

    /// Number of values the truth `A` can take in the particle scenario.
    pub fn strata(&self) -> Option<u64> {
        match self.scenario {
            Scenario::Particles(p) => Some(p.max_particles as u64 + 1),
            Scenario::Attractors(_) => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        match &self.scenario {
            Scenario::Attractors(p) => p.validate_on(grid)?,
            Scenario::Particles(p) => p.validate(grid)?,
        }
        if self.samples_per_point == 0 {
            return Err(Error::Config("samples_per_point must be positive".into()));
        }
        if let Some(strata) = self.strata() {
            if self.samples_per_point % strata != 0 {
                return Err(Error::Config(format!(
                    "samples_per_point = {} is not divisible by the {strata} particle-count strata",
                    self.samples_per_point
                )));
            }
        }
        if self.type1_grid.is_empty() {
            return Err(Error::Config("type1_grid is empty".into()));
        }
        if let Some(a) = self.type1_grid.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::Config(format!("type-1 error {a} outside [0, 1]")));
        }
        if matches!(self.scenario, Scenario::Attractors(_)) && self.fixed_truths < 2 {
            return Err(Error::Config("fixed_truths must be at least 2".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        if let RocSource::Computed(g) = self.roc_source {
            if g.a_grid < 2 || g.b_grid < 2 {
                return Err(Error::Config("ROC grids need at least two points".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for kind in [ScenarioKind::Attractors, ScenarioKind::Particles] {
            ExperimentConfig::desk_scale(kind).validate().unwrap();
            ExperimentConfig::paper_scale(kind).validate().unwrap();
        }
        let grid = default_type1_grid();
        assert_eq!(grid.len(), 11);
        assert_eq!(grid[0], 0.0);
        assert!((grid[10] - 0.05).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let config = ExperimentConfig::desk_scale(ScenarioKind::Particles);
        let text = serde_json::to_string_pretty(&config).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), config);
    }

    #[test]
    fn minimal_json() {
        let text = r#"{
            "scenario": {"particles": {}},
            "grid_side": 50,
            "samples_per_point": 110,
            "master_seed": 3
        }"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(c.scenario, Scenario::Particles(ParticleParams::default()));
        assert_eq!(c.probe, LossChannelPair::reference());
        assert_eq!(c.roc_source, RocSource::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = r#"{"scenario": {"particles": {}}, "grid_side": 50,
            "samples_per_point": 110, "master_seed": 3, "seeed": 1}"#;
        assert!(matches!(ExperimentConfig::from_json(text), Err(Error::Config(_))));
        let nested = r#"{"scenario": {"particles": {"dimz": [2, 5]}}, "grid_side": 50,
            "samples_per_point": 110, "master_seed": 3}"#;
        assert!(ExperimentConfig::from_json(nested).is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        let mut c = ExperimentConfig::desk_scale(ScenarioKind::Particles);
        c.samples_per_point = 20_000;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = ExperimentConfig::desk_scale(ScenarioKind::Particles);
        c.type1_grid = vec![0.0, 1.5];
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::desk_scale(ScenarioKind::Attractors);
        c.fixed_truths = 1;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::desk_scale(ScenarioKind::Attractors);
        c.grid_side = 9;
        c.threads = Some(0);
        assert!(c.validate().is_err());
    }
}

//! Experiment configuration shared by the simulation verbs.

use std::path::PathBuf;

use planar_qec::{log_grid, DecoderMode, NoiseModel, RankKey, TrialBudget};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Where qubit parameters come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source")]
pub enum QubitSource {
    Calibration {
        path: PathBuf,
    },
    /// Every qubit has `T1 = T2 = t_us`.
    Symmetric {
        t_us: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ArrangementChoice {
    /// The first n qubits in file order.
    AsIndexed,
    /// A random subset and placement, seeded from the master seed.
    Random,
    Optimized {
        rank_key: RankKey,
    },
}

impl ArrangementChoice {
    pub fn label(&self) -> String {
        match self {
            ArrangementChoice::AsIndexed => "as_indexed".into(),
            ArrangementChoice::Random => "random".into(),
            ArrangementChoice::Optimized { rank_key } => format!("optimized_{}", rank_key.label()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub qubits: QubitSource,
    pub distances: Vec<usize>,
    pub decoders: Vec<DecoderMode>,
    pub noise: NoiseModel,
    pub arrangements: Vec<ArrangementChoice>,
    pub p_grid: Vec<f64>,
    pub budget: TrialBudget,
    pub seed: u64,
    /// Ensemble size for the `ensemble` verb.
    pub n_arrangements: usize,
    /// Per-class failure columns in the curve CSV.
    #[serde(default)]
    pub breakdown: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.distances.is_empty() || self.decoders.is_empty() || self.arrangements.is_empty() {
            return bad("distances, decoders and arrangements must be non-empty".into());
        }
        if let Some(d) = self.distances.iter().find(|&&d| !(2..=25).contains(&d)) {
            return bad(format!("distance {d} outside 2..=25"));
        }
        if self.p_grid.is_empty() {
            return bad("p grid is empty".into());
        }
        if let Some(p) = self.p_grid.iter().find(|&&p| !(p > 0.0 && p < 0.75)) {
            return bad(format!("p = {p} outside (0, 0.75)"));
        }
        match self.budget {
            TrialBudget::Fixed { trials: 0 } | TrialBudget::Adaptive { max_trials: 0, .. } => {
                return bad("trial count must be positive".into())
            }
            _ => {}
        }
        if let QubitSource::Symmetric { t_us } = self.qubits {
            if !(t_us > 0.0 && t_us.is_finite()) {
                return bad(format!("symmetric T must be positive, got {t_us}"));
            }
        }
        Ok(())
    }
}

/// Parses `lo:hi:count` (log-spaced) or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("invalid p grid `{text}`"));
    if let [lo, hi, count] = text.split(':').collect::<Vec<_>>()[..] {
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let count: usize = count.trim().parse().map_err(|_| bad())?;
        if count == 0 || !(lo > 0.0 && hi >= lo) {
            return Err(bad());
        }
        return Ok(log_grid(lo, hi, count));
    }
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}

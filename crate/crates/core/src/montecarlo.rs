//! Monte Carlo estimation of logical error rates, sweeps over the physical
//! error probability, and pseudo-threshold extraction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoder::{Decoder, DecoderMode, LogicalClass};
use crate::lattice::{LatticeError, PlanarLattice};
use crate::layout::{random_arrangement, Arrangement, ArrangementStrategy, LayoutError};
use crate::matching::MatchingError;
use crate::noise::{mean_times, solve_time_for_p, ChannelConfig, NoiseError, NoiseModel, QubitSpec};
use crate::rng::{derive_seed, stream_rng};

/// Failures needed before the relative confidence interval is trusted.
pub const RELIABLE_FAILURES: u64 = 100;
pub const DEFAULT_TRIALS: u64 = 10_000;
const ADAPTIVE_BATCH: u64 = 1_000;
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("arrangement has {found} qubits, lattice needs {expected}")]
    ArrangementSize { expected: usize, found: usize },
    #[error("physical error probability {0} is outside (0, 3/4)")]
    InvalidGrid(f64),
    #[error("trial budget must be positive")]
    NoTrials,
    #[error(
        "curve does not cross P_L = p (first point {}, last point {})",
        side(*first_above),
        side(*last_above)
    )]
    NotBracketed { first_above: bool, last_above: bool },
    #[error("need at least 2 arrangements, got {0}")]
    TooFewArrangements(usize),
    #[error("no values")]
    Empty,
    #[error("mean is zero")]
    ZeroMean,
}

fn side(above: bool) -> &'static str {
    if above {
        "above"
    } else {
        "below"
    }
}

/// How many trials to run at each point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum TrialBudget {
    Fixed {
        trials: u64,
    },
    /// Batches of trials until `target_failures` failures or `max_trials` trials.
    Adaptive {
        target_failures: u64,
        max_trials: u64,
    },
}

impl Default for TrialBudget {
    fn default() -> Self {
        TrialBudget::Fixed { trials: DEFAULT_TRIALS }
    }
}

/// Failure counts by logical class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureBreakdown {
    pub x_l: u64,
    pub z_l: u64,
    pub y_l: u64,
    pub detected: u64,
}

impl FailureBreakdown {
    pub fn total(&self) -> u64 {
        self.x_l + self.z_l + self.y_l + self.detected
    }

    fn record(mut self, class: LogicalClass) -> Self {
        match class {
            LogicalClass::Identity => {}
            LogicalClass::XL => self.x_l += 1,
            LogicalClass::ZL => self.z_l += 1,
            LogicalClass::YL => self.y_l += 1,
            LogicalClass::DetectedFailure => self.detected += 1,
        }
        self
    }

    fn merge(self, o: Self) -> Self {
        Self {
            x_l: self.x_l + o.x_l,
            z_l: self.z_l + o.z_l,
            y_l: self.y_l + o.y_l,
            detected: self.detected + o.detected,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Physical error probability at the mean `T1`, `T2` of the placed qubits.
    pub p_physical: f64,
    /// Mean of the per-qubit physical error probabilities.
    pub p_mean_qubit: f64,
    pub t_us: f64,
    pub n_trials: u64,
    pub failures: FailureBreakdown,
    pub p_l_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Fewer than [`RELIABLE_FAILURES`] failures were observed.
    pub low_confidence: bool,
}

/// 95% interval for `failures` out of `trials`.
///
/// Zero failures use the rule of three, at least [`RELIABLE_FAILURES`] failures
/// the relative interval `(0.8, 1.25) * P`, anything else the Wilson interval.
pub fn confidence_interval(failures: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = failures as f64 / n;
    if failures == 0 {
        (0.0, (3.0 / n).min(1.0))
    } else if failures >= RELIABLE_FAILURES {
        (0.8 * p, (1.25 * p).min(1.0))
    } else {
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        ((centre - half).max(0.0).min(p), (centre + half).min(1.0).max(p))
    }
}

fn run_trials(
    lattice: &PlanarLattice,
    channel: &ChannelConfig,
    decoder: &Decoder,
    seed: u64,
    range: std::ops::Range<u64>,
) -> FailureBreakdown {
    let sampler = channel.sampler();
    range
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let error = sampler.sample(&mut rng);
            if error.is_identity() {
                return LogicalClass::Identity;
            }
            debug_assert_eq!(error.len(), lattice.num_qubits());
            decoder.correct(&error).logical_class
        })
        .fold(FailureBreakdown::default, FailureBreakdown::record)
        .reduce(FailureBreakdown::default, FailureBreakdown::merge)
}

/// Estimates `P_L` for one channel. Trial `i` draws from stream `i` of `seed`,
/// so the result does not depend on the number of worker threads.
pub fn run_point(
    lattice: &PlanarLattice,
    channel: &ChannelConfig,
    mode: DecoderMode,
    budget: TrialBudget,
    seed: u64,
) -> Result<CurvePoint, McError> {
    let n = lattice.num_qubits();
    if channel.specs.len() != n {
        return Err(McError::ArrangementSize {
            expected: n,
            found: channel.specs.len(),
        });
    }
    let decoder = Decoder::new(lattice, &mode.weights(&channel.effective_specs(), channel.t))?;
    let (failures, trials) = match budget {
        TrialBudget::Fixed { trials } => {
            if trials == 0 {
                return Err(McError::NoTrials);
            }
            (run_trials(lattice, channel, &decoder, seed, 0..trials), trials)
        }
        TrialBudget::Adaptive {
            target_failures,
            max_trials,
        } => {
            if max_trials == 0 {
                return Err(McError::NoTrials);
            }
            let mut done = 0;
            let mut failures = FailureBreakdown::default();
            while done < max_trials && failures.total() < target_failures {
                let end = (done + ADAPTIVE_BATCH).min(max_trials);
                failures = failures.merge(run_trials(lattice, channel, &decoder, seed, done..end));
                done = end;
            }
            (failures, done)
        }
    };
    let count = failures.total();
    let p_l_hat = count as f64 / trials as f64;
    let (ci_low, ci_high) = confidence_interval(count, trials);
    Ok(CurvePoint {
        p_physical: channel.mean_parameter_error_probability(),
        p_mean_qubit: channel.mean_qubit_error_probability(),
        t_us: channel.t,
        n_trials: trials,
        failures,
        p_l_hat,
        ci_low,
        ci_high,
        low_confidence: count < RELIABLE_FAILURES,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub distance: usize,
    pub decoder: DecoderMode,
    pub noise: NoiseModel,
    pub arrangement: ArrangementStrategy,
    #[serde(default)]
    pub budget: TrialBudget,
    pub seed: u64,
}

impl SweepConfig {
    /// Human-readable identity of the experiment.
    pub fn fingerprint(&self) -> String {
        let arrangement = match self.arrangement {
            ArrangementStrategy::AsIndexed => "as_indexed".to_string(),
            ArrangementStrategy::Random { seed } => format!("random({seed})"),
            ArrangementStrategy::Optimized { rank_key } => format!("optimized({})", rank_key.label()),
        };
        let noise = match self.noise {
            NoiseModel::Iid => "iid",
            NoiseModel::Inid => "inid",
        };
        format!(
            "d={} decoder={} noise={} arrangement={} seed={}",
            self.distance, self.decoder, noise, arrangement, self.seed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub fingerprint: String,
    /// Ascending in `p_physical`.
    pub points: Vec<CurvePoint>,
}

/// Runs one point per grid value. Each `p` is converted to an exposure time at
/// the mean `T1`, `T2` of the arranged qubits; every qubit sees that time.
pub fn sweep(config: &SweepConfig, arrangement: &Arrangement, p_grid: &[f64]) -> Result<SweepResult, McError> {
    let lattice = PlanarLattice::new(config.distance)?;
    let n = lattice.num_qubits();
    if arrangement.len() != n {
        return Err(McError::ArrangementSize {
            expected: n,
            found: arrangement.len(),
        });
    }
    let mut grid = p_grid.to_vec();
    if let Some(&bad) = grid.iter().find(|&&p| !(p > 0.0 && p < 0.75)) {
        return Err(McError::InvalidGrid(bad));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let (mu_t1, mu_t2) = mean_times(arrangement.specs())?;
    let points = grid
        .iter()
        .map(|&p| {
            let t = solve_time_for_p(p, mu_t1, mu_t2)?;
            let channel = ChannelConfig::new(config.noise, arrangement.specs().to_vec(), t)?;
            let mut point = run_point(
                &lattice,
                &channel,
                config.decoder,
                config.budget,
                derive_seed(config.seed, p.to_bits()),
            )?;
            point.p_physical = p;
            Ok(point)
        })
        .collect::<Result<Vec<_>, McError>>()?;
    Ok(SweepResult {
        fingerprint: config.fingerprint(),
        config: config.clone(),
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PseudoThreshold {
    pub p_pth: f64,
    /// Indices of the bracketing points (equal when a point lies on the line).
    pub bracket: (usize, usize),
    /// Every usable point lies on `P_L = p`.
    pub degenerate: bool,
}

/// Where the curve first rises through `P_L = p`, by linear interpolation in
/// log-log space. Points with no failures are ignored.
pub fn estimate_pseudothreshold(points: &[CurvePoint]) -> Result<PseudoThreshold, McError> {
    let usable: Vec<(usize, f64, f64)> = points
        .iter()
        .enumerate()
        .filter(|(_, pt)| pt.p_l_hat > 0.0 && pt.p_physical > 0.0)
        .map(|(i, pt)| (i, pt.p_physical.ln(), pt.p_l_hat.ln() - pt.p_physical.ln()))
        .collect();
    let (Some(first), Some(last)) = (usable.first(), usable.last()) else {
        return Err(McError::NotBracketed {
            first_above: false,
            last_above: false,
        });
    };
    if usable.iter().all(|u| u.2 == 0.0) {
        return Ok(PseudoThreshold {
            p_pth: points[first.0].p_physical,
            bracket: (first.0, first.0),
            degenerate: true,
        });
    }
    for w in usable.windows(2) {
        let (i, x0, g0) = w[0];
        let (j, x1, g1) = w[1];
        if g0 == 0.0 {
            return Ok(PseudoThreshold {
                p_pth: points[i].p_physical,
                bracket: (i, i),
                degenerate: false,
            });
        }
        if g0 < 0.0 && g1 >= 0.0 {
            let x = if g1 == 0.0 { x1 } else { x0 + (x1 - x0) * g0 / (g0 - g1) };
            return Ok(PseudoThreshold {
                p_pth: x.exp(),
                bracket: (i, j),
                degenerate: false,
            });
        }
    }
    Err(McError::NotBracketed {
        first_above: first.2 > 0.0,
        last_above: last.2 > 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub mean: f64,
    /// Sample standard deviation across members.
    pub std_dev: f64,
    /// `std_dev / sqrt(count)`.
    pub std_error: f64,
    /// Per-member pseudo-threshold, `None` where the sweep did not bracket.
    pub samples: Vec<Option<f64>>,
    pub excluded: usize,
}

impl EnsembleStats {
    pub fn from_samples(samples: Vec<Option<f64>>) -> Self {
        let values: Vec<f64> = samples.iter().flatten().copied().collect();
        let k = values.len() as f64;
        let mean = if values.is_empty() {
            f64::NAN
        } else {
            values.iter().sum::<f64>() / k
        };
        let std_dev = if values.len() < 2 {
            f64::NAN
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
        };
        Self {
            mean,
            std_dev,
            std_error: std_dev / k.sqrt(),
            excluded: samples.len() - values.len(),
            samples,
        }
    }
}

/// Pseudo-threshold over `n_arrangements` random placements of `specs`.
///
/// Member `k` uses placement seed and trial seed `derive_seed(seed, k)`, so two
/// ensembles with the same seed but different decoders see the same placements
/// and the same sampled errors.
pub fn arrangement_ensemble_stats(
    config: &SweepConfig,
    specs: &[QubitSpec],
    p_grid: &[f64],
    n_arrangements: usize,
    seed: u64,
) -> Result<EnsembleStats, McError> {
    if n_arrangements < 2 {
        return Err(McError::TooFewArrangements(n_arrangements));
    }
    let lattice = PlanarLattice::new(config.distance)?;
    let samples = (0..n_arrangements as u64)
        .into_par_iter()
        .map(|k| {
            let member_seed = derive_seed(seed, k);
            let arrangement = random_arrangement(&lattice, specs, member_seed)?;
            let member = SweepConfig {
                arrangement: arrangement.strategy(),
                seed: member_seed,
                ..config.clone()
            };
            let result = sweep(&member, &arrangement, p_grid)?;
            match estimate_pseudothreshold(&result.points) {
                Ok(pth) => Ok(Some(pth.p_pth)),
                Err(McError::NotBracketed { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>, McError>>()?;
    Ok(EnsembleStats::from_samples(samples))
}

/// Population standard deviation over mean.
pub fn coefficient_of_variation(values: &[f64]) -> Result<f64, McError> {
    if values.is_empty() {
        return Err(McError::Empty);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Err(McError::ZeroMean);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(var.sqrt() / mean)
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            let mut grid: Vec<f64> = (0..count)
                .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                .collect();
            grid[0] = lo;
            grid[count - 1] = hi;
            grid
        }
    }
}

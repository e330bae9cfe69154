//! Pauli-twirled amplitude/phase damping and n-qubit error sampling.
//!
//! A qubit idle for `t` microseconds with relaxation time `T1` and dephasing time
//! `T2` suffers
//!
//! ```text
//! p_X = p_Y = (1 - exp(-t/T1)) / 4
//! p_Z       = (1 + exp(-t/T1) - 2 exp(-t/T2)) / 4
//! p_I       = 1 - p_X - p_Y - p_Z
//! ```
//!
//! Under the i.i.d. model every qubit uses the mean `T1`/`T2` of the code's qubits;
//! under the i.ni.d. model each qubit keeps its own parameters.

use log::warn;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::{Pauli, PauliOperator};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("relaxation/dephasing times must be positive and finite (T1={t1}, T2={t2})")]
    NonPositiveTime { t1: f64, t2: f64 },
    #[error("exposure time must be non-negative and finite, got {0}")]
    InvalidExposure(f64),
    #[error("physical error probability {target} is outside the achievable range [0, 0.75)")]
    Unachievable { target: f64 },
    #[error("a channel needs at least one qubit")]
    EmptyChannel,
}

/// Ramsey limit: `T2` is capped at `2 T1`.
pub fn clamp_ramsey(t1: f64, t2: f64) -> Result<f64, NoiseError> {
    if !(t1 > 0.0 && t2 > 0.0 && t1.is_finite() && t2.is_finite()) {
        return Err(NoiseError::NonPositiveTime { t1, t2 });
    }
    let limit = 2.0 * t1;
    if t2 > limit {
        warn!("T2={t2} exceeds the Ramsey limit 2*T1={limit}; clamping");
        Ok(limit)
    } else {
        Ok(t2)
    }
}

/// Decoherence parameters of one physical qubit, in microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitSpec {
    pub id: u32,
    pub t1: f64,
    pub t2: f64,
}

impl QubitSpec {
    /// Validates and clamps `t2` to the Ramsey limit.
    pub fn new(id: u32, t1: f64, t2: f64) -> Result<Self, NoiseError> {
        let t2 = clamp_ramsey(t1, t2)?;
        Ok(Self { id, t1, t2 })
    }

    pub fn probabilities(&self, t: f64) -> PauliProbs {
        pta_probabilities(t, self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliProbs {
    pub i: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PauliProbs {
    pub const IDENTITY: PauliProbs = PauliProbs {
        i: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// `p = p_X + p_Y + p_Z`.
    pub fn error(&self) -> f64 {
        self.x + self.y + self.z
    }

    /// Probability of an error flagged by plaquettes (`X` or `Y`).
    pub fn bit_flip(&self) -> f64 {
        self.x + self.y
    }

    /// Probability of an error flagged by vertices (`Z` or `Y`).
    pub fn phase_flip(&self) -> f64 {
        self.z + self.y
    }
}

pub fn pta_probabilities(t: f64, spec: &QubitSpec) -> PauliProbs {
    pta_from_times(t, spec.t1, spec.t2)
}

fn pta_from_times(t: f64, t1: f64, t2: f64) -> PauliProbs {
    let relax = (-t / t1).exp();
    let dephase = (-t / t2).exp();
    let x = 0.25 * (1.0 - relax);
    // Clamping guarantees this is non-negative up to rounding.
    let z = (0.25 * (1.0 + relax - 2.0 * dephase)).max(0.0);
    PauliProbs {
        i: 1.0 - 2.0 * x - z,
        x,
        y: x,
        z,
    }
}

/// `p_X + p_Y + p_Z` for one qubit (or for mean parameters).
pub fn physical_error_probability(t1: f64, t2: f64, t: f64) -> f64 {
    pta_from_times(t, t1, t2).error()
}

/// Arithmetic mean of the per-qubit error probabilities.
pub fn mean_physical_error_probability(specs: &[QubitSpec], t: f64) -> f64 {
    if specs.is_empty() {
        return 0.0;
    }
    specs.iter().map(|s| s.probabilities(t).error()).sum::<f64>() / specs.len() as f64
}

/// Arithmetic means `(mu_T1, mu_T2)`.
pub fn mean_times(specs: &[QubitSpec]) -> Result<(f64, f64), NoiseError> {
    if specs.is_empty() {
        return Err(NoiseError::EmptyChannel);
    }
    let n = specs.len() as f64;
    Ok((
        specs.iter().map(|s| s.t1).sum::<f64>() / n,
        specs.iter().map(|s| s.t2).sum::<f64>() / n,
    ))
}

/// Exposure time at which mean-parameter qubits reach error probability `target`.
///
/// `p(t)` is strictly increasing from 0 towards 3/4, so the root is unique.
pub fn solve_time_for_p(target: f64, mu_t1: f64, mu_t2: f64) -> Result<f64, NoiseError> {
    if !(mu_t1 > 0.0 && mu_t2 > 0.0 && mu_t1.is_finite() && mu_t2.is_finite()) {
        return Err(NoiseError::NonPositiveTime { t1: mu_t1, t2: mu_t2 });
    }
    if !(0.0..0.75).contains(&target) {
        return Err(NoiseError::Unachievable { target });
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    let p = |t: f64| physical_error_probability(mu_t1, mu_t2, t);
    let mut lo = 0.0;
    let mut hi = mu_t1.min(mu_t2);
    while p(hi) < target {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(NoiseError::Unachievable { target });
        }
    }
    // Bisect down to adjacent floats.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(if (p(lo) - target).abs() <= (p(hi) - target).abs() {
        lo
    } else {
        hi
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    /// Every qubit uses the mean `T1`, `T2` of the code's qubits.
    Iid,
    /// Each qubit uses its own `T1`, `T2`.
    Inid,
}

/// An n-qubit decoherence channel: one spec per lattice position plus exposure time.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelConfig {
    pub model: NoiseModel,
    pub specs: Vec<QubitSpec>,
    pub t: f64,
}

impl ChannelConfig {
    pub fn new(model: NoiseModel, specs: Vec<QubitSpec>, t: f64) -> Result<Self, NoiseError> {
        if specs.is_empty() {
            return Err(NoiseError::EmptyChannel);
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(NoiseError::InvalidExposure(t));
        }
        Ok(Self { model, specs, t })
    }

    pub fn mean_times(&self) -> (f64, f64) {
        mean_times(&self.specs).expect("channel is non-empty")
    }

    /// Parameters each position actually experiences under the chosen model.
    pub fn effective_specs(&self) -> Vec<QubitSpec> {
        match self.model {
            NoiseModel::Inid => self.specs.clone(),
            NoiseModel::Iid => {
                let (t1, t2) = self.mean_times();
                self.specs.iter().map(|s| QubitSpec { id: s.id, t1, t2 }).collect()
            }
        }
    }

    pub fn probabilities(&self) -> Vec<PauliProbs> {
        self.effective_specs().iter().map(|s| s.probabilities(self.t)).collect()
    }

    /// `p` evaluated at the mean parameters.
    pub fn mean_parameter_error_probability(&self) -> f64 {
        let (t1, t2) = self.mean_times();
        physical_error_probability(t1, t2, self.t)
    }

    /// Mean of the per-qubit `p` values under the chosen model.
    pub fn mean_qubit_error_probability(&self) -> f64 {
        mean_physical_error_probability(&self.effective_specs(), self.t)
    }

    pub fn sampler(&self) -> ErrorSampler {
        ErrorSampler::new(&self.probabilities())
    }
}

/// Draws independent per-qubit Pauli errors.
#[derive(Debug, Clone)]
pub struct ErrorSampler {
    // Cumulative thresholds for X, X+Y, X+Y+Z.
    thresholds: Vec<[f64; 3]>,
}

impl ErrorSampler {
    pub fn new(probs: &[PauliProbs]) -> Self {
        let thresholds = probs.iter().map(|p| [p.x, p.x + p.y, p.x + p.y + p.z]).collect();
        Self { thresholds }
    }

    pub fn num_qubits(&self) -> usize {
        self.thresholds.len()
    }

    /// One uniform draw per qubit, in qubit-index order.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PauliOperator {
        let mut op = PauliOperator::identity(self.thresholds.len());
        for (q, th) in self.thresholds.iter().enumerate() {
            let u: f64 = rng.gen();
            if u < th[2] {
                let pauli = if u < th[0] {
                    Pauli::X
                } else if u < th[1] {
                    Pauli::Y
                } else {
                    Pauli::Z
                };
                op.set(q, pauli);
            }
        }
        op
    }
}

pub fn sample_error<R: Rng + ?Sized>(config: &ChannelConfig, rng: &mut R) -> PauliOperator {
    config.sampler().sample(rng)
}

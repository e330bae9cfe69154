//! Placement of calibrated qubits onto lattice positions.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::PlanarLattice;
use crate::noise::QubitSpec;
use crate::rng::stream_rng;

const LAYOUT_STREAM: u64 = 0x6c61_796f_7574;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayoutError {
    #[error("need {needed} qubits, got {found}")]
    InsufficientSpecs { needed: usize, found: usize },
    #[error("duplicate qubit id {0}")]
    DuplicateId(u32),
    #[error("arrangement table: {0}")]
    BadTable(String),
}

/// Quality indicator used to rank qubits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "key")]
pub enum RankKey {
    #[default]
    T2,
    T1,
    MinT,
    /// Error probability `1 - p_I` at the reference time (lower is better).
    PFail {
        t_ref: f64,
    },
}

impl RankKey {
    /// Scalar where larger is better.
    fn score(&self, spec: &QubitSpec) -> f64 {
        match *self {
            RankKey::T2 => spec.t2,
            RankKey::T1 => spec.t1,
            RankKey::MinT => spec.t1.min(spec.t2),
            RankKey::PFail { t_ref } => -spec.probabilities(t_ref).error(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            RankKey::T2 => "t2".into(),
            RankKey::T1 => "t1".into(),
            RankKey::MinT => "min_t".into(),
            RankKey::PFail { t_ref } => format!("p_fail({t_ref})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "strategy")]
pub enum ArrangementStrategy {
    AsIndexed,
    Random { seed: u64 },
    Optimized { rank_key: RankKey },
}

/// Which spec sits at each lattice position.
#[derive(Debug, Clone, PartialEq)]
pub struct Arrangement {
    specs: Vec<QubitSpec>,
    strategy: ArrangementStrategy,
}

impl Arrangement {
    pub fn specs(&self) -> &[QubitSpec] {
        &self.specs
    }

    pub fn strategy(&self) -> ArrangementStrategy {
        self.strategy
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn ids(&self) -> Vec<u32> {
        self.specs.iter().map(|s| s.id).collect()
    }

    /// `(lattice_index, qubit_id)` rows.
    pub fn to_table(&self) -> Vec<(usize, u32)> {
        self.specs.iter().enumerate().map(|(i, s)| (i, s.id)).collect()
    }

    /// Rebuilds an arrangement from `(lattice_index, qubit_id)` rows, looking ids
    /// up in `specs`.
    pub fn from_table(
        lattice: &PlanarLattice,
        rows: &[(usize, u32)],
        specs: &[QubitSpec],
        strategy: ArrangementStrategy,
    ) -> Result<Self, LayoutError> {
        let n = lattice.num_qubits();
        if rows.len() != n {
            return Err(LayoutError::BadTable(format!("{} rows for {n} positions", rows.len())));
        }
        let mut slots: Vec<Option<QubitSpec>> = vec![None; n];
        for &(index, id) in rows {
            let spec = specs
                .iter()
                .find(|s| s.id == id)
                .ok_or_else(|| LayoutError::BadTable(format!("unknown qubit id {id}")))?;
            let slot = slots
                .get_mut(index)
                .ok_or_else(|| LayoutError::BadTable(format!("index {index} out of range")))?;
            if slot.is_some() {
                return Err(LayoutError::BadTable(format!("index {index} assigned twice")));
            }
            *slot = Some(*spec);
        }
        let specs: Vec<QubitSpec> = slots.into_iter().map(|s| s.expect("all filled")).collect();
        check_unique(&specs)?;
        Ok(Self { specs, strategy })
    }
}

fn check_unique(specs: &[QubitSpec]) -> Result<(), LayoutError> {
    let mut ids: Vec<u32> = specs.iter().map(|s| s.id).collect();
    ids.sort_unstable();
    match ids.windows(2).find(|w| w[0] == w[1]) {
        Some(w) => Err(LayoutError::DuplicateId(w[0])),
        None => Ok(()),
    }
}

fn require(lattice: &PlanarLattice, specs: &[QubitSpec]) -> Result<usize, LayoutError> {
    let n = lattice.num_qubits();
    if specs.len() < n {
        return Err(LayoutError::InsufficientSpecs {
            needed: n,
            found: specs.len(),
        });
    }
    check_unique(specs)?;
    Ok(n)
}

fn compare(key: &RankKey, a: &QubitSpec, b: &QubitSpec) -> Ordering {
    key.score(b).total_cmp(&key.score(a)).then(a.id.cmp(&b.id))
}

/// Specs ordered best to worst; ties by ascending id.
pub fn rank_qubits(specs: &[QubitSpec], key: RankKey) -> Vec<QubitSpec> {
    let mut ranked = specs.to_vec();
    ranked.sort_by(|a, b| compare(&key, a, b));
    ranked
}

/// The first `lattice.num_qubits()` specs, in the given order.
pub fn as_indexed(lattice: &PlanarLattice, specs: &[QubitSpec]) -> Result<Arrangement, LayoutError> {
    let n = require(lattice, specs)?;
    Ok(Arrangement {
        specs: specs[..n].to_vec(),
        strategy: ArrangementStrategy::AsIndexed,
    })
}

/// Uniformly random placement of a uniformly random subset of `specs`.
pub fn random_arrangement(lattice: &PlanarLattice, specs: &[QubitSpec], seed: u64) -> Result<Arrangement, LayoutError> {
    let n = require(lattice, specs)?;
    let mut pool = specs.to_vec();
    let mut rng = stream_rng(seed, LAYOUT_STREAM);
    let (chosen, _) = pool.partial_shuffle(&mut rng, n);
    Ok(Arrangement {
        specs: chosen.to_vec(),
        strategy: ArrangementStrategy::Random { seed },
    })
}

/// Positions of `range` ordered by Chebyshev distance from the lattice centre,
/// then row-major.
fn centre_out(lattice: &PlanarLattice, range: std::ops::Range<usize>) -> Vec<usize> {
    let c = lattice.distance() - 1;
    let mut positions: Vec<usize> = range.collect();
    positions.sort_by_key(|&q| {
        let (r, col) = lattice.site_of(q);
        (r.abs_diff(c).max(col.abs_diff(c)), r, col)
    });
    positions
}

/// Quality-aware placement.
///
/// Takes the best `n` specs under `key`. The worst `(d-1)^2` of them fill the
/// vertical sublattice and the rest the horizontal one. In both sublattices the
/// extremes sit nearest the centre: worst-first in the vertical sublattice,
/// best-first in the horizontal one, so average qubits end up on the outer
/// wall. Qubits whose keys tie share their group of positions in id order.
pub fn optimize_layout(lattice: &PlanarLattice, specs: &[QubitSpec], key: RankKey) -> Result<Arrangement, LayoutError> {
    let n = require(lattice, specs)?;
    let ranked = rank_qubits(specs, key);
    let selected = &ranked[..n];
    let split = lattice.horizontal_sublattice().end;
    let mut slots: Vec<Option<QubitSpec>> = vec![None; n];

    let horizontal: Vec<QubitSpec> = selected[..split].to_vec();
    let vertical: Vec<QubitSpec> = selected[split..].iter().rev().copied().collect();
    for (group, range) in [
        (horizontal, lattice.horizontal_sublattice()),
        (vertical, lattice.vertical_sublattice()),
    ] {
        let positions = centre_out(lattice, range);
        let mut start = 0;
        while start < group.len() {
            let score = key.score(&group[start]);
            let mut end = start + 1;
            while end < group.len() && key.score(&group[end]) == score {
                end += 1;
            }
            let mut tied_positions = positions[start..end].to_vec();
            tied_positions.sort_unstable();
            let mut tied = group[start..end].to_vec();
            tied.sort_by_key(|s| s.id);
            for (pos, spec) in tied_positions.into_iter().zip(tied) {
                slots[pos] = Some(spec);
            }
            start = end;
        }
    }

    Ok(Arrangement {
        specs: slots.into_iter().map(|s| s.expect("every position filled")).collect(),
        strategy: ArrangementStrategy::Optimized { rank_key: key },
    })
}

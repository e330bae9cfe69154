//! Planar surface-code simulation under per-qubit (independent, non-identically
//! distributed) decoherence.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: planar code geometry, Pauli operators and syndrome extraction.
//! - [`noise`]: Pauli-twirled amplitude/phase damping probabilities and error sampling.
//! - [`matching`]: check graphs, shortest paths and exact minimum-weight perfect matching.
//! - [`decoder`]: the one-cycle MWPM / reweighted-MWPM decode pipeline.
//! - [`layout`]: mapping calibrated qubits onto lattice positions.
//! - [`montecarlo`]: seeded trial ensembles, sweeps and pseudo-threshold extraction.

pub mod decoder;
pub mod lattice;
pub mod layout;
pub mod matching;
pub mod montecarlo;
pub mod noise;
pub mod rng;

pub use decoder::{classify, decode, DecodeOutcome, Decoder, DecoderMode, LogicalClass};
pub use lattice::{qubit_index, BitString, CheckKind, LatticeError, Pauli, PauliOperator, PlanarLattice, Syndrome};
pub use layout::{
    as_indexed, optimize_layout, random_arrangement, rank_qubits, Arrangement, ArrangementStrategy, LayoutError,
    RankKey,
};
pub use matching::{
    build_defect_graph, build_defect_graphs, min_weight_perfect_matching, shortest_path, DefectGraph, LatticeWeights,
    Matching, WeightedLatticeGraph,
};
pub use montecarlo::{
    arrangement_ensemble_stats, coefficient_of_variation, confidence_interval, estimate_pseudothreshold, log_grid,
    run_point, sweep, CurvePoint, EnsembleStats, FailureBreakdown, McError, PseudoThreshold, SweepConfig, SweepResult,
    TrialBudget, DEFAULT_TRIALS,
};
pub use noise::{
    clamp_ramsey, physical_error_probability, pta_probabilities, solve_time_for_p, ChannelConfig, NoiseError,
    NoiseModel, PauliProbs, QubitSpec,
};

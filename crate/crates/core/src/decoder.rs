//! One-cycle decoding: syndrome, matching, recovery, logical classification.

use serde::{Deserialize, Serialize};

use crate::lattice::{CheckKind, Pauli, PauliOperator, PlanarLattice, Syndrome};
use crate::matching::{
    build_defect_graph, min_weight_perfect_matching, DefectNode, LatticeWeights, MatchingError, PathTable,
    WeightedLatticeGraph,
};
use crate::noise::QubitSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderMode {
    /// Unit edge weights.
    Mwpm,
    /// Edge weights from each qubit's decay probability.
    Rmwpm,
}

impl DecoderMode {
    pub fn name(self) -> &'static str {
        match self {
            DecoderMode::Mwpm => "mwpm",
            DecoderMode::Rmwpm => "rmwpm",
        }
    }

    /// Edge weights for this mode, given the specs at each lattice position.
    pub fn weights(self, specs: &[QubitSpec], t: f64) -> LatticeWeights {
        match self {
            DecoderMode::Mwpm => LatticeWeights::uniform(specs.len()),
            DecoderMode::Rmwpm => LatticeWeights::reweighted(specs, t),
        }
    }
}

impl std::fmt::Display for DecoderMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalClass {
    /// Residual is a stabilizer: the decode succeeded.
    Identity,
    XL,
    ZL,
    YL,
    /// Residual still has a non-trivial syndrome.
    DetectedFailure,
}

impl LogicalClass {
    pub fn is_failure(self) -> bool {
        self != LogicalClass::Identity
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub recovery: PauliOperator,
    pub residual_syndrome_trivial: bool,
    pub logical_class: LogicalClass,
}

/// Decoder with precomputed shortest paths for a fixed set of edge weights.
#[derive(Debug, Clone)]
pub struct Decoder {
    lattice: PlanarLattice,
    plaquette: PathTable,
    vertex: PathTable,
}

impl Decoder {
    pub fn new(lattice: &PlanarLattice, weights: &LatticeWeights) -> Result<Self, MatchingError> {
        let table = |kind| -> Result<PathTable, MatchingError> {
            let graph = WeightedLatticeGraph::new(lattice, kind, weights.of(kind))?;
            Ok(PathTable::new(&graph))
        };
        Ok(Self {
            lattice: lattice.clone(),
            plaquette: table(CheckKind::Plaquette)?,
            vertex: table(CheckKind::Vertex)?,
        })
    }

    pub fn uniform(lattice: &PlanarLattice) -> Self {
        Self::new(lattice, &LatticeWeights::uniform(lattice.num_qubits())).expect("uniform weights are valid")
    }

    /// Decoder for `mode` with `specs[i]` at lattice position `i` and exposure `t`.
    pub fn for_mode(
        lattice: &PlanarLattice,
        mode: DecoderMode,
        specs: &[QubitSpec],
        t: f64,
    ) -> Result<Self, MatchingError> {
        Self::new(lattice, &mode.weights(specs, t))
    }

    pub fn lattice(&self) -> &PlanarLattice {
        &self.lattice
    }

    fn table(&self, kind: CheckKind) -> &PathTable {
        match kind {
            CheckKind::Plaquette => &self.plaquette,
            CheckKind::Vertex => &self.vertex,
        }
    }

    /// Recovery operator for `syndrome`: X along matched plaquette paths, Z along
    /// matched vertex paths.
    pub fn decode(&self, syndrome: &Syndrome) -> PauliOperator {
        let n = self.lattice.num_qubits();
        let mut recovery = PauliOperator::identity(n);
        for kind in CheckKind::BOTH {
            let table = self.table(kind);
            let graph = build_defect_graph(table, syndrome.flags(kind));
            let matching = min_weight_perfect_matching(&graph).expect("defect graphs always admit a perfect matching");
            for (a, b) in matching.pairs {
                let path = match (graph.node(a), graph.node(b)) {
                    (DefectNode::Defect(x), DefectNode::Defect(y)) => table.path(x, y),
                    (DefectNode::Defect(x), DefectNode::Virtual(_))
                    | (DefectNode::Virtual(_), DefectNode::Defect(x)) => table.boundary_path(x),
                    (DefectNode::Virtual(_), DefectNode::Virtual(_)) => continue,
                };
                let bits = match kind {
                    CheckKind::Plaquette => &mut recovery.x,
                    CheckKind::Vertex => &mut recovery.z,
                };
                for q in path {
                    bits.flip(q);
                }
            }
        }
        recovery
    }

    /// Samples nothing; decodes the syndrome of `error` and classifies the result.
    pub fn correct(&self, error: &PauliOperator) -> DecodeOutcome {
        let syndrome = self
            .lattice
            .extract_syndrome(error)
            .expect("error length matches lattice");
        let recovery = self.decode(&syndrome);
        classify(&self.lattice, error, &recovery)
    }
}

/// Recovery for `syndrome` under `weights`.
pub fn decode(
    lattice: &PlanarLattice,
    syndrome: &Syndrome,
    weights: &LatticeWeights,
) -> Result<PauliOperator, MatchingError> {
    Ok(Decoder::new(lattice, weights)?.decode(syndrome))
}

/// Logical effect of applying `recovery` after `error`.
pub fn classify(lattice: &PlanarLattice, error: &PauliOperator, recovery: &PauliOperator) -> DecodeOutcome {
    let residual = error.compose(recovery);
    let trivial = lattice
        .extract_syndrome(&residual)
        .expect("operator lengths match lattice")
        .is_trivial();
    let logical_class = if !trivial {
        LogicalClass::DetectedFailure
    } else {
        let (with_xl, with_zl) = lattice
            .commutes_with_logicals(&residual)
            .expect("operator lengths match lattice");
        match (with_xl, with_zl) {
            (true, true) => LogicalClass::Identity,
            (false, true) => LogicalClass::ZL,
            (true, false) => LogicalClass::XL,
            (false, false) => LogicalClass::YL,
        }
    };
    DecodeOutcome {
        recovery: recovery.clone(),
        residual_syndrome_trivial: trivial,
        logical_class,
    }
}

/// Every single-qubit X, Y and Z error on the lattice.
pub fn single_qubit_errors(n: usize) -> impl Iterator<Item = PauliOperator> {
    (0..n).flat_map(move |q| {
        [Pauli::X, Pauli::Y, Pauli::Z]
            .into_iter()
            .map(move |p| PauliOperator::single(n, q, p))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{ChannelConfig, NoiseModel};
    use crate::rng::stream_rng;

    fn specs(n: usize, t1: f64, t2: f64) -> Vec<QubitSpec> {
        (0..n).map(|i| QubitSpec::new(i as u32, t1, t2).unwrap()).collect()
    }

    #[test]
    fn zero_syndrome_gives_identity() {
        let lattice = PlanarLattice::new(3).unwrap();
        let dec = Decoder::uniform(&lattice);
        let s = lattice.extract_syndrome(&PauliOperator::identity(13)).unwrap();
        assert!(dec.decode(&s).is_identity());
    }

    #[test]
    fn classify_examples() {
        let lattice = PlanarLattice::new(5).unwrap();
        let n = lattice.num_qubits();
        let e = PauliOperator::single(n, 7, Pauli::Y);
        assert_eq!(classify(&lattice, &e, &e).logical_class, LogicalClass::Identity);
        let id = PauliOperator::identity(n);
        let zl = lattice.logical_z();
        assert_eq!(classify(&lattice, &zl, &id).logical_class, LogicalClass::ZL);
        let xl = lattice.logical_x();
        assert_eq!(classify(&lattice, &xl, &id).logical_class, LogicalClass::XL);
        assert_eq!(classify(&lattice, &(&xl ^ &zl), &id).logical_class, LogicalClass::YL);
        let g = lattice.stabilizer_operator(CheckKind::Vertex, 3);
        assert_eq!(classify(&lattice, &g, &id).logical_class, LogicalClass::Identity);
        let out = classify(&lattice, &e, &id);
        assert!(!out.residual_syndrome_trivial);
        assert_eq!(out.logical_class, LogicalClass::DetectedFailure);
    }

    #[test]
    fn center_x_is_corrected_by_a_path() {
        let lattice = PlanarLattice::new(3).unwrap();
        let dec = Decoder::uniform(&lattice);
        let e = PauliOperator::single(13, 4, Pauli::X);
        let out = dec.correct(&e);
        assert_eq!(out.logical_class, LogicalClass::Identity);
        assert_eq!(out.recovery, e);
    }

    #[test]
    fn distance_three_corrects_all_single_errors() {
        let lattice = PlanarLattice::new(3).unwrap();
        let decoders = [
            Decoder::uniform(&lattice),
            Decoder::for_mode(&lattice, DecoderMode::Rmwpm, &specs(13, 60.0, 45.0), 5.0).unwrap(),
        ];
        for dec in &decoders {
            let mut count = 0;
            for e in single_qubit_errors(13) {
                assert_eq!(dec.correct(&e).logical_class, LogicalClass::Identity, "{e:?}");
                count += 1;
            }
            assert_eq!(count, 39);
        }
    }

    #[test]
    fn recovery_annihilates_syndrome() {
        for d in [3, 5] {
            let lattice = PlanarLattice::new(d).unwrap();
            let n = lattice.num_qubits();
            let specs: Vec<_> = (0..n)
                .map(|i| QubitSpec::new(i as u32, 20.0 + 7.0 * i as f64, 10.0 + 5.0 * i as f64).unwrap())
                .collect();
            let t = 4.0;
            let config = ChannelConfig::new(NoiseModel::Inid, specs.clone(), t).unwrap();
            let sampler = config.sampler();
            for mode in [DecoderMode::Mwpm, DecoderMode::Rmwpm] {
                let dec = Decoder::for_mode(&lattice, mode, &specs, t).unwrap();
                let mut rng = stream_rng(d as u64, mode as u64);
                for _ in 0..10_000 {
                    let e = sampler.sample(&mut rng);
                    let s = lattice.extract_syndrome(&e).unwrap();
                    let r = dec.decode(&s);
                    let residual = lattice.extract_syndrome(&e.compose(&r)).unwrap();
                    assert!(residual.is_trivial());
                }
            }
        }
    }

    #[test]
    fn stabilizer_multiplication_preserves_class() {
        let lattice = PlanarLattice::new(3).unwrap();
        let dec = Decoder::uniform(&lattice);
        let config = ChannelConfig::new(NoiseModel::Iid, specs(13, 50.0, 50.0), 8.0).unwrap();
        let sampler = config.sampler();
        let mut rng = stream_rng(5, 0);
        let gens: Vec<_> = CheckKind::BOTH
            .iter()
            .flat_map(|&k| (0..6).map(move |j| (k, j)))
            .map(|(k, j)| lattice.stabilizer_operator(k, j))
            .collect();
        for i in 0..1000 {
            let e = sampler.sample(&mut rng);
            let g = &gens[i % gens.len()];
            let a = dec.correct(&e).logical_class;
            let b = dec.correct(&e.compose(g)).logical_class;
            assert_eq!(a.is_failure(), b.is_failure());
        }
    }

    #[test]
    fn reweighting_changes_the_recovery() {
        // A plaquette one row below the top: two steps to the top boundary over
        // good qubits, three steps to the bottom over poor ones.
        let lattice = PlanarLattice::new(5).unwrap();
        let n = lattice.num_qubits();
        let poor: Vec<usize> = [(4, 4), (6, 4), (8, 4)]
            .iter()
            .map(|&(r, c)| lattice.qubit_at(r, c).unwrap())
            .collect();
        let specs: Vec<_> = (0..n)
            .map(|i| {
                let t = if poor.contains(&i) { 5.0 } else { 1000.0 };
                QubitSpec::new(i as u32, t, t).unwrap()
            })
            .collect();
        let t = 10.0;
        let error = PauliOperator::x_on(n, poor.iter().copied());
        let mwpm = Decoder::for_mode(&lattice, DecoderMode::Mwpm, &specs, t).unwrap();
        let rmwpm = Decoder::for_mode(&lattice, DecoderMode::Rmwpm, &specs, t).unwrap();
        let a = mwpm.correct(&error);
        let b = rmwpm.correct(&error);
        assert_ne!(a.recovery, b.recovery);
        assert_eq!(a.logical_class, LogicalClass::XL);
        assert_eq!(b.logical_class, LogicalClass::Identity);
    }

    #[test]
    fn uniform_rmwpm_matches_mwpm() {
        let lattice = PlanarLattice::new(5).unwrap();
        let s = specs(41, 70.0, 70.0);
        let mwpm = Decoder::for_mode(&lattice, DecoderMode::Mwpm, &s, 6.0).unwrap();
        let rmwpm = Decoder::for_mode(&lattice, DecoderMode::Rmwpm, &s, 6.0).unwrap();
        let sampler = ChannelConfig::new(NoiseModel::Iid, s, 6.0).unwrap().sampler();
        let mut rng = stream_rng(1, 1);
        for _ in 0..2000 {
            let e = sampler.sample(&mut rng);
            assert_eq!(mwpm.correct(&e).logical_class, rmwpm.correct(&e).logical_class);
        }
    }
}

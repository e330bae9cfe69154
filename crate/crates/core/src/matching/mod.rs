//! Matching graphs, shortest paths and minimum-weight perfect matching.
//!
//! Each CSS family gets its own graph: nodes are the checks plus two boundary
//! sinks, and every data qubit is exactly one edge. Edge weights are stored as
//! fixed-point integers so path lengths and matching weights are exact.

mod blossom;

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::lattice::{BitString, CheckKind, PlanarLattice, Syndrome};
use crate::noise::QubitSpec;

pub use blossom::max_weight_matching;

/// Fixed-point resolution of edge weights.
pub const WEIGHT_UNIT: f64 = (1u64 << 20) as f64;
/// Largest representable edge weight; infinite weights are clamped to this.
pub const WEIGHT_CAP: f64 = 1e9;

const UNREACHABLE: i64 = i64::MAX;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchingError {
    #[error("weight vector has {found} entries, lattice has {expected} qubits")]
    WeightCount { expected: usize, found: usize },
    #[error("edge weight {0} is negative or NaN")]
    InvalidWeight(f64),
    #[error("graph with {0} nodes has no perfect matching")]
    NoPerfectMatching(usize),
}

/// Converts a real weight to fixed point, clamping at [`WEIGHT_CAP`].
pub fn quantize(w: f64) -> i64 {
    (w.min(WEIGHT_CAP) * WEIGHT_UNIT).round() as i64
}

pub fn dequantize(w: i64) -> f64 {
    w as f64 / WEIGHT_UNIT
}

/// `-ln(1 - exp(-t / tau))`, the log-likelihood weight of a qubit that decays
/// with time constant `tau`.
pub fn decay_weight(t: f64, tau: f64) -> f64 {
    let w = -(-(-t / tau).exp()).ln_1p();
    if w.is_nan() {
        WEIGHT_CAP
    } else {
        w.min(WEIGHT_CAP)
    }
}

/// Per-qubit edge weights for both matching graphs, indexed by lattice position.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeWeights {
    pub plaquette: Vec<f64>,
    pub vertex: Vec<f64>,
}

impl LatticeWeights {
    /// Every edge has weight 1.
    pub fn uniform(num_qubits: usize) -> Self {
        Self {
            plaquette: vec![1.0; num_qubits],
            vertex: vec![1.0; num_qubits],
        }
    }

    /// Bit-flip edges weighted by `T1` decay, phase-flip edges by `T2` decay.
    pub fn reweighted(specs: &[QubitSpec], t: f64) -> Self {
        Self {
            plaquette: specs.iter().map(|s| decay_weight(t, s.t1)).collect(),
            vertex: specs.iter().map(|s| decay_weight(t, s.t2)).collect(),
        }
    }

    pub fn of(&self, kind: CheckKind) -> &[f64] {
        match kind {
            CheckKind::Plaquette => &self.plaquette,
            CheckKind::Vertex => &self.vertex,
        }
    }
}

/// A node of a matching graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Check(usize),
    /// Top sink for plaquettes, left sink for vertices.
    NearBoundary,
    /// Bottom sink for plaquettes, right sink for vertices.
    FarBoundary,
}

/// Matching graph of one check family.
#[derive(Debug, Clone)]
pub struct WeightedLatticeGraph {
    kind: CheckKind,
    num_checks: usize,
    // adjacency[node] = (neighbour, qubit)
    adjacency: Vec<Vec<(usize, usize)>>,
    weights: Vec<i64>,
}

impl WeightedLatticeGraph {
    pub fn new(lattice: &PlanarLattice, kind: CheckKind, weights: &[f64]) -> Result<Self, MatchingError> {
        let n = lattice.num_qubits();
        if weights.len() != n {
            return Err(MatchingError::WeightCount {
                expected: n,
                found: weights.len(),
            });
        }
        if let Some(&w) = weights.iter().find(|w| w.is_nan() || **w < 0.0) {
            return Err(MatchingError::InvalidWeight(w));
        }
        let m = lattice.checks(kind).len();
        let last = lattice.grid_size() - 1;
        let mut adjacency = vec![Vec::new(); m + 2];
        for q in 0..n {
            let (a, b) = match *lattice.checks_of(kind, q) {
                [a, b] => (a, b),
                [a] => {
                    let (r, c) = lattice.site_of(q);
                    let near = match kind {
                        CheckKind::Plaquette => r == 0,
                        CheckKind::Vertex => c == 0,
                    };
                    debug_assert!(near || r == last || c == last);
                    (a, if near { m } else { m + 1 })
                }
                _ => unreachable!("every qubit touches one or two checks of each kind"),
            };
            adjacency[a].push((b, q));
            adjacency[b].push((a, q));
        }
        Ok(Self {
            kind,
            num_checks: m,
            adjacency,
            weights: weights.iter().map(|&w| quantize(w)).collect(),
        })
    }

    pub fn kind(&self) -> CheckKind {
        self.kind
    }

    pub fn num_checks(&self) -> usize {
        self.num_checks
    }

    fn index(&self, node: Node) -> usize {
        match node {
            Node::Check(j) => {
                assert!(j < self.num_checks, "check {j} out of range");
                j
            }
            Node::NearBoundary => self.num_checks,
            Node::FarBoundary => self.num_checks + 1,
        }
    }

    pub fn edge_weight(&self, qubit: usize) -> f64 {
        dequantize(self.weights[qubit])
    }

    /// Single-source shortest paths. Boundary sinks are endpoints only, never
    /// intermediate nodes. Ties resolve towards the lower node index.
    fn dijkstra(&self, source: usize) -> (Vec<i64>, Vec<Option<(usize, usize)>>) {
        let nodes = self.adjacency.len();
        let mut dist = vec![UNREACHABLE; nodes];
        let mut pred = vec![None; nodes];
        let mut heap = BinaryHeap::new();
        dist[source] = 0;
        heap.push(Reverse((0i64, source)));
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] || (u >= self.num_checks && u != source) {
                continue;
            }
            for &(v, q) in &self.adjacency[u] {
                let nd = d + self.weights[q];
                if nd < dist[v] {
                    dist[v] = nd;
                    pred[v] = Some((u, q));
                    heap.push(Reverse((nd, v)));
                }
            }
        }
        (dist, pred)
    }
}

/// A shortest path through a matching graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPath {
    pub weight: f64,
    /// Qubits (edges) along the path, from source to target.
    pub qubits: Vec<usize>,
}

/// Shortest path between two nodes, or `None` if they are disconnected.
pub fn shortest_path(graph: &WeightedLatticeGraph, a: Node, b: Node) -> Option<ShortestPath> {
    let (s, t) = (graph.index(a), graph.index(b));
    if s == t {
        return Some(ShortestPath {
            weight: 0.0,
            qubits: Vec::new(),
        });
    }
    let (dist, pred) = graph.dijkstra(s);
    if dist[t] == UNREACHABLE {
        return None;
    }
    Some(ShortestPath {
        weight: dequantize(dist[t]),
        qubits: walk_back(&pred, s, t),
    })
}

fn walk_back(pred: &[Option<(usize, usize)>], source: usize, target: usize) -> Vec<usize> {
    let mut qubits = Vec::new();
    let mut v = target;
    while v != source {
        let (u, q) = pred[v].expect("target reachable from source");
        qubits.push(q);
        v = u;
    }
    qubits.reverse();
    qubits
}

/// All-pairs shortest paths between checks, plus each check's nearest boundary.
#[derive(Debug, Clone)]
pub struct PathTable {
    kind: CheckKind,
    num_checks: usize,
    stride: usize,
    dist: Vec<i64>,
    pred: Vec<Option<(usize, usize)>>,
    // (distance, sink node index)
    boundary: Vec<(i64, usize)>,
}

impl PathTable {
    pub fn new(graph: &WeightedLatticeGraph) -> Self {
        let m = graph.num_checks;
        let stride = m + 2;
        let mut dist = Vec::with_capacity(m * stride);
        let mut pred = Vec::with_capacity(m * stride);
        let mut boundary = Vec::with_capacity(m);
        for s in 0..m {
            let (d, p) = graph.dijkstra(s);
            let (near, far) = (d[m], d[m + 1]);
            boundary.push(if near <= far { (near, m) } else { (far, m + 1) });
            dist.extend(d);
            pred.extend(p);
        }
        Self {
            kind: graph.kind,
            num_checks: m,
            stride,
            dist,
            pred,
            boundary,
        }
    }

    pub fn kind(&self) -> CheckKind {
        self.kind
    }

    pub fn num_checks(&self) -> usize {
        self.num_checks
    }

    fn distance_units(&self, a: usize, b: usize) -> i64 {
        self.dist[a * self.stride + b]
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        dequantize(self.distance_units(a, b))
    }

    pub fn boundary_distance(&self, a: usize) -> f64 {
        dequantize(self.boundary[a].0)
    }

    /// Qubits on the shortest path between checks `a` and `b`.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        if a == b {
            return Vec::new();
        }
        let row = &self.pred[a * self.stride..(a + 1) * self.stride];
        walk_back(row, a, b)
    }

    /// Qubits on the shortest path from check `a` to the nearest boundary.
    pub fn boundary_path(&self, a: usize) -> Vec<usize> {
        let row = &self.pred[a * self.stride..(a + 1) * self.stride];
        walk_back(row, a, self.boundary[a].1)
    }
}

/// Node of a [`DefectGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefectNode {
    /// A flagged check, by check index.
    Defect(usize),
    /// Boundary partner of the defect at the given position.
    Virtual(usize),
}

/// Complete graph on flagged checks, each paired with a private boundary node.
///
/// With `k` defects, nodes `0..k` are the defects and node `k + i` is the
/// boundary copy of defect `i`. Boundary copies are joined to each other at zero
/// cost so any subset of defects may terminate on the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectGraph {
    defects: Vec<usize>,
    num_nodes: usize,
    edges: Vec<(usize, usize, i64)>,
}

impl DefectGraph {
    /// Arbitrary graph with real-valued edge weights and no boundary nodes.
    pub fn from_edges(num_nodes: usize, edges: &[(usize, usize, f64)]) -> Self {
        Self {
            defects: Vec::new(),
            num_nodes,
            edges: edges.iter().map(|&(a, b, w)| (a, b, quantize(w))).collect(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn is_empty(&self) -> bool {
        self.num_nodes == 0
    }

    /// Check indices of the defects, in node order.
    pub fn defects(&self) -> &[usize] {
        &self.defects
    }

    pub fn node(&self, i: usize) -> DefectNode {
        let k = self.defects.len();
        if i < k {
            DefectNode::Defect(self.defects[i])
        } else {
            DefectNode::Virtual(i - k)
        }
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        self.edges
            .iter()
            .find(|&&(i, j, _)| (i, j) == (a, b) || (i, j) == (b, a))
            .map(|e| dequantize(e.2))
    }
}

/// Defect graph for the flagged checks in `flags`.
pub fn build_defect_graph(table: &PathTable, flags: &BitString) -> DefectGraph {
    let defects: Vec<usize> = flags.ones().collect();
    let k = defects.len();
    let mut edges = Vec::with_capacity(k * k + k);
    for i in 0..k {
        for j in i + 1..k {
            let d = table.distance_units(defects[i], defects[j]);
            if d != UNREACHABLE {
                edges.push((i, j, d));
            }
        }
        edges.push((i, k + i, table.boundary[defects[i]].0));
    }
    for i in 0..k {
        for j in i + 1..k {
            edges.push((k + i, k + j, 0));
        }
    }
    DefectGraph {
        defects,
        num_nodes: 2 * k,
        edges,
    }
}

/// Both defect graphs of a syndrome, plaquettes first.
pub fn build_defect_graphs(
    lattice: &PlanarLattice,
    syndrome: &Syndrome,
    weights: &LatticeWeights,
) -> Result<[DefectGraph; 2], MatchingError> {
    let graph = |kind| -> Result<DefectGraph, MatchingError> {
        let g = WeightedLatticeGraph::new(lattice, kind, weights.of(kind))?;
        Ok(build_defect_graph(&PathTable::new(&g), syndrome.flags(kind)))
    };
    Ok([graph(CheckKind::Plaquette)?, graph(CheckKind::Vertex)?])
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// Matched node pairs `(a, b)` with `a < b`, sorted.
    pub pairs: Vec<(usize, usize)>,
    pub total_weight: f64,
}

/// Minimum-weight perfect matching.
pub fn min_weight_perfect_matching(graph: &DefectGraph) -> Result<Matching, MatchingError> {
    let n = graph.num_nodes;
    if n == 0 {
        return Ok(Matching {
            pairs: Vec::new(),
            total_weight: 0.0,
        });
    }
    if n % 2 == 1 {
        return Err(MatchingError::NoPerfectMatching(n));
    }
    // Maximum-cardinality maximum-weight matching on (C - w) is a minimum-weight
    // perfect matching whenever a perfect matching exists. C = 2 max(w) keeps the
    // transform proportional under uniform rescaling of the weights, so ties
    // resolve identically.
    let max = graph.edges.iter().map(|e| e.2).max().unwrap_or(0);
    let top = if max > 0 { 2 * max } else { 1 };
    let flipped: Vec<(usize, usize, i64)> = graph.edges.iter().map(|&(a, b, w)| (a, b, top - w)).collect();
    let mate = max_weight_matching(n, &flipped, true);
    let mut pairs = Vec::with_capacity(n / 2);
    for (a, m) in mate.iter().enumerate() {
        match m {
            Some(b) if a < *b => pairs.push((a, *b)),
            Some(_) => {}
            None => return Err(MatchingError::NoPerfectMatching(n)),
        }
    }
    let units: i64 = graph
        .edges
        .iter()
        .filter(|&&(a, b, _)| mate[a] == Some(b))
        .map(|e| e.2)
        .sum();
    Ok(Matching {
        pairs,
        total_weight: dequantize(units),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uniform_graph(d: usize, kind: CheckKind) -> (PlanarLattice, WeightedLatticeGraph) {
        let lattice = PlanarLattice::new(d).unwrap();
        let w = LatticeWeights::uniform(lattice.num_qubits());
        let g = WeightedLatticeGraph::new(&lattice, kind, w.of(kind)).unwrap();
        (lattice, g)
    }

    #[test]
    fn self_path_is_empty() {
        let (_, g) = uniform_graph(3, CheckKind::Plaquette);
        let p = shortest_path(&g, Node::Check(2), Node::Check(2)).unwrap();
        assert_eq!(p.weight, 0.0);
        assert!(p.qubits.is_empty());
    }

    #[test]
    fn uniform_distances_are_taxicab() {
        for d in [3, 5, 7] {
            for kind in CheckKind::BOTH {
                let (lattice, g) = uniform_graph(d, kind);
                let table = PathTable::new(&g);
                let checks = lattice.checks(kind);
                let last = lattice.grid_size() - 1;
                for (a, ca) in checks.iter().enumerate() {
                    for (b, cb) in checks.iter().enumerate() {
                        let (ra, qa) = (ca.site.0 as f64, ca.site.1 as f64);
                        let (rb, qb) = (cb.site.0 as f64, cb.site.1 as f64);
                        let taxicab = ((ra - rb).abs() + (qa - qb).abs()) / 2.0;
                        assert_eq!(table.distance(a, b), taxicab);
                        assert_eq!(table.path(a, b).len() as f64, taxicab);
                    }
                    // Nearest boundary is one step past the closest open edge.
                    let (r, c) = ca.site;
                    let along = match kind {
                        CheckKind::Plaquette => r,
                        CheckKind::Vertex => c,
                    };
                    let expect = along.div_ceil(2).min((last + 1 - along) / 2);
                    assert_eq!(table.boundary_distance(a), expect as f64);
                    assert_eq!(table.boundary_path(a).len(), expect);
                }
            }
        }
    }

    #[test]
    fn paths_connect_their_endpoints() {
        let (lattice, g) = uniform_graph(5, CheckKind::Vertex);
        let table = PathTable::new(&g);
        let m = lattice.vertices().len();
        for a in 0..m {
            for b in 0..m {
                let mut op = crate::lattice::PauliOperator::z_on(lattice.num_qubits(), table.path(a, b));
                let s = lattice.extract_syndrome(&op).unwrap();
                let expect = BitString::from_indices(m, if a == b { vec![] } else { vec![a, b] });
                assert_eq!(s.vertex, expect);
                op = crate::lattice::PauliOperator::z_on(lattice.num_qubits(), table.boundary_path(a));
                let s = lattice.extract_syndrome(&op).unwrap();
                assert_eq!(s.vertex, BitString::from_indices(m, [a]));
            }
        }
    }

    #[test]
    fn half_probability_edges() {
        // Two edges of decay probability 1/2 each.
        let tau = 1.0 / std::f64::consts::LN_2;
        let w = decay_weight(1.0, tau);
        assert!((w - std::f64::consts::LN_2).abs() < 1e-12);
        let lattice = PlanarLattice::new(3).unwrap();
        let g = WeightedLatticeGraph::new(&lattice, CheckKind::Plaquette, &[w; 13]).unwrap();
        // Plaquettes (1,0) and (3,0) are joined by qubit (2,0).
        let p = shortest_path(&g, Node::Check(0), Node::Check(3)).unwrap();
        assert_eq!(lattice.plaquettes()[0].site, (1, 0));
        assert_eq!(lattice.plaquettes()[3].site, (3, 0));
        assert_eq!(p.qubits.len(), 1);
        let p = shortest_path(&g, Node::Check(0), Node::Check(4)).unwrap();
        assert_eq!(p.qubits.len(), 2);
        assert!((p.weight - (-(0.25f64).ln())).abs() < 1e-5);
        assert!((p.weight - 1.3863).abs() < 1e-4);
    }

    #[test]
    fn decay_weight_limits() {
        assert_eq!(decay_weight(0.0, 10.0), WEIGHT_CAP);
        assert!(decay_weight(1e4, 1.0) < 1e-12);
        assert!(decay_weight(1.0, 100.0) > decay_weight(1.0, 10.0));
    }

    #[test]
    fn four_node_example() {
        let g = DefectGraph::from_edges(
            4,
            &[
                (0, 1, 1.0),
                (2, 3, 1.0),
                (0, 2, 5.0),
                (1, 3, 5.0),
                (0, 3, 5.0),
                (1, 2, 5.0),
            ],
        );
        let m = min_weight_perfect_matching(&g).unwrap();
        assert_eq!(m.pairs, vec![(0, 1), (2, 3)]);
        assert_eq!(m.total_weight, 2.0);
    }

    #[test]
    fn empty_and_odd_graphs() {
        let lattice = PlanarLattice::new(3).unwrap();
        let s = lattice
            .extract_syndrome(&crate::lattice::PauliOperator::identity(13))
            .unwrap();
        let graphs = build_defect_graphs(&lattice, &s, &LatticeWeights::uniform(13)).unwrap();
        assert!(graphs.iter().all(DefectGraph::is_empty));
        let m = min_weight_perfect_matching(&graphs[0]).unwrap();
        assert!(m.pairs.is_empty());
        let odd = DefectGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(
            min_weight_perfect_matching(&odd),
            Err(MatchingError::NoPerfectMatching(3))
        );
    }

    #[test]
    fn single_boundary_defect() {
        let lattice = PlanarLattice::new(3).unwrap();
        // Plaquette 0 at (1,0) is on the top row of plaquettes.
        let mut flags = BitString::zeros(lattice.plaquettes().len());
        flags.set(0, true);
        let s = Syndrome {
            plaquette: flags,
            vertex: BitString::zeros(lattice.vertices().len()),
        };
        let [g, _] = build_defect_graphs(&lattice, &s, &LatticeWeights::uniform(13)).unwrap();
        assert_eq!(g.num_nodes(), 2);
        assert_eq!(g.weight(0, 1), Some(1.0));
        assert_eq!(g.node(1), DefectNode::Virtual(0));
        let m = min_weight_perfect_matching(&g).unwrap();
        assert_eq!(m.pairs, vec![(0, 1)]);
        assert_eq!(m.total_weight, 1.0);
    }

    #[test]
    fn reweighting_steers_paths() {
        // Make the direct qubit between two plaquettes expensive; the detour wins.
        let lattice = PlanarLattice::new(5).unwrap();
        let n = lattice.num_qubits();
        let a = lattice.plaquettes().iter().position(|c| c.site == (3, 2)).unwrap();
        let b = lattice.plaquettes().iter().position(|c| c.site == (3, 4)).unwrap();
        let direct = lattice.qubit_at(3, 3).unwrap();
        let mut w = vec![1.0; n];
        let g = WeightedLatticeGraph::new(&lattice, CheckKind::Plaquette, &w).unwrap();
        assert_eq!(PathTable::new(&g).path(a, b), vec![direct]);
        w[direct] = 10.0;
        let g = WeightedLatticeGraph::new(&lattice, CheckKind::Plaquette, &w).unwrap();
        let t = PathTable::new(&g);
        assert_eq!(t.distance(a, b), 3.0);
        assert!(!t.path(a, b).contains(&direct));
    }

    #[test]
    fn shortest_path_rejects_bad_weights() {
        let lattice = PlanarLattice::new(3).unwrap();
        assert!(matches!(
            WeightedLatticeGraph::new(&lattice, CheckKind::Vertex, &[1.0; 12]),
            Err(MatchingError::WeightCount { .. })
        ));
        let mut w = vec![1.0; 13];
        w[4] = -1.0;
        assert!(matches!(
            WeightedLatticeGraph::new(&lattice, CheckKind::Vertex, &w),
            Err(MatchingError::InvalidWeight(_))
        ));
    }

    fn brute_force(n: usize, w: &[Vec<Option<i64>>]) -> Option<i64> {
        fn go(free: &mut Vec<usize>, w: &[Vec<Option<i64>>]) -> Option<i64> {
            if free.is_empty() {
                return Some(0);
            }
            let a = free.remove(0);
            let mut best: Option<i64> = None;
            for idx in 0..free.len() {
                let b = free[idx];
                if let Some(wab) = w[a][b] {
                    free.remove(idx);
                    if let Some(rest) = go(free, w) {
                        best = Some(best.map_or(wab + rest, |x: i64| x.min(wab + rest)));
                    }
                    free.insert(idx, b);
                }
            }
            free.insert(0, a);
            best
        }
        go(&mut (0..n).collect(), w)
    }

    fn arb_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize, u32)>)> {
        (1usize..=4).prop_flat_map(|half| {
            let n = 2 * half;
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            let m = pairs.len();
            (
                Just(n),
                proptest::collection::vec((proptest::bool::weighted(0.8), 0u32..20), m).prop_map(move |ws| {
                    pairs
                        .iter()
                        .zip(ws)
                        .filter(|(_, (keep, _))| *keep)
                        .map(|(&(a, b), (_, w))| (a, b, w))
                        .collect()
                }),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn matches_brute_force((n, edges) in arb_graph()) {
            let mut w = vec![vec![None; n]; n];
            for &(a, b, x) in &edges {
                w[a][b] = Some(x as i64);
                w[b][a] = Some(x as i64);
            }
            let g = DefectGraph::from_edges(
                n,
                &edges.iter().map(|&(a, b, x)| (a, b, x as f64)).collect::<Vec<_>>(),
            );
            match (brute_force(n, &w), min_weight_perfect_matching(&g)) {
                (None, r) => prop_assert!(r.is_err()),
                (Some(best), Ok(m)) => {
                    prop_assert_eq!(m.total_weight, best as f64);
                    prop_assert_eq!(m.pairs.len(), n / 2);
                    let mut seen = vec![false; n];
                    for &(a, b) in &m.pairs {
                        prop_assert!(w[a][b].is_some());
                        prop_assert!(!seen[a] && !seen[b]);
                        seen[a] = true;
                        seen[b] = true;
                    }
                }
                (Some(_), Err(e)) => prop_assert!(false, "missed a perfect matching: {e}"),
            }
        }

        #[test]
        fn path_weight_monotone_in_edge_weight(q in 0usize..41, bump in 0.0f64..5.0, a in 0usize..20, b in 0usize..20) {
            let lattice = PlanarLattice::new(5).unwrap();
            let mut w = vec![1.0; 41];
            let g = WeightedLatticeGraph::new(&lattice, CheckKind::Plaquette, &w).unwrap();
            let before = PathTable::new(&g);
            w[q] += bump;
            let g = WeightedLatticeGraph::new(&lattice, CheckKind::Plaquette, &w).unwrap();
            let after = PathTable::new(&g);
            prop_assert!(after.distance(a, b) >= before.distance(a, b));
            prop_assert!(after.boundary_distance(a) >= before.boundary_distance(a));
        }
    }
}

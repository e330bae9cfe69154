//! Planar code geometry, Pauli operators and syndrome extraction.
//!
//! Sites live on a `(2d-1) x (2d-1)` grid indexed `(row, col)` from the top-left
//! corner. Data qubits sit where `row % 2 == col % 2`; plaquette (measure-Z)
//! checks sit at odd rows / even columns and vertex (measure-X) checks at even
//! rows / odd columns. Plaquettes therefore form the left and right rough
//! boundaries, vertices the top and bottom ones, `Z_L` runs horizontally and
//! `X_L` vertically.

use std::fmt;
use std::ops::BitXor;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("distance must be at least 2, got {0}")]
    DistanceTooSmall(usize),
    #[error("({row}, {col}) is not a data site of a distance-{distance} lattice")]
    NotADataSite { row: usize, col: usize, distance: usize },
    #[error("operator length {found} does not match lattice size {expected}")]
    LengthMismatch { expected: usize, found: usize },
}

/// Fixed-length bit string backed by 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut bits = Self::zeros(len);
        for i in indices {
            bits.set(i, true);
        }
        bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &BitString) {
        assert_eq!(self.len, other.len, "bit string length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Parity of the bitwise AND with `other`.
    pub fn and_parity(&self, other: &BitString) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// Indices of set bits in ascending order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + bit)
            })
        })
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Single-qubit Pauli, phases dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

/// n-qubit Pauli operator in symplectic form. `Y` on qubit `j` is `x[j] = z[j] = 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PauliOperator {
    pub x: BitString,
    pub z: BitString,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitString::zeros(n),
            z: BitString::zeros(n),
        }
    }

    pub fn single(n: usize, qubit: usize, pauli: Pauli) -> Self {
        let mut op = Self::identity(n);
        op.set(qubit, pauli);
        op
    }

    pub fn x_on(n: usize, support: impl IntoIterator<Item = usize>) -> Self {
        Self {
            x: BitString::from_indices(n, support),
            z: BitString::zeros(n),
        }
    }

    pub fn z_on(n: usize, support: impl IntoIterator<Item = usize>) -> Self {
        Self {
            x: BitString::zeros(n),
            z: BitString::from_indices(n, support),
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        match (self.x.get(qubit), self.z.get(qubit)) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn set(&mut self, qubit: usize, pauli: Pauli) {
        let (x, z) = pauli.bits();
        self.x.set(qubit, x);
        self.z.set(qubit, z);
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        (0..self.len()).filter(|&q| self.x.get(q) || self.z.get(q)).count()
    }

    /// Product with `other`, ignoring phase.
    pub fn compose(&self, other: &PauliOperator) -> PauliOperator {
        let mut out = self.clone();
        out.compose_assign(other);
        out
    }

    pub fn compose_assign(&mut self, other: &PauliOperator) {
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    /// Binary symplectic product: `true` when the two operators anticommute.
    pub fn anticommutes_with(&self, other: &PauliOperator) -> bool {
        self.x.and_parity(&other.z) ^ self.z.and_parity(&other.x)
    }
}

impl BitXor for &PauliOperator {
    type Output = PauliOperator;

    fn bitxor(self, rhs: &PauliOperator) -> PauliOperator {
        self.compose(rhs)
    }
}

/// The two CSS check families. Plaquettes (measure-Z) flag X/Y errors; vertices
/// (measure-X) flag Z/Y errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CheckKind {
    Plaquette,
    Vertex,
}

impl CheckKind {
    pub const BOTH: [CheckKind; 2] = [CheckKind::Plaquette, CheckKind::Vertex];
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilizer {
    pub site: (usize, usize),
    /// Data-qubit indices, ascending.
    pub support: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Syndrome {
    pub plaquette: BitString,
    pub vertex: BitString,
}

impl Syndrome {
    pub fn flags(&self, kind: CheckKind) -> &BitString {
        match kind {
            CheckKind::Plaquette => &self.plaquette,
            CheckKind::Vertex => &self.vertex,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.plaquette.is_zero() && self.vertex.is_zero()
    }

    pub fn xor(&self, other: &Syndrome) -> Syndrome {
        let mut out = self.clone();
        out.plaquette.xor_assign(&other.plaquette);
        out.vertex.xor_assign(&other.vertex);
        out
    }
}

/// Data-qubit index of site `(r, c)` in a `rows x cols` planar code.
///
/// Horizontal-edge qubits (even, even) come first, filling `[0, rows*cols)`,
/// followed by vertical-edge qubits (odd, odd).
pub fn qubit_index(r: usize, c: usize, rows: usize, cols: usize) -> Result<usize, LatticeError> {
    let distance = rows.max(cols);
    if r % 2 != c % 2 || r > 2 * rows.saturating_sub(1) || c > 2 * cols.saturating_sub(1) {
        return Err(LatticeError::NotADataSite {
            row: r,
            col: c,
            distance,
        });
    }
    Ok((r / 2) * (cols - c % 2) + (c / 2) + (r % 2) * rows * cols)
}

/// Distance-`d` planar code. Immutable once built.
#[derive(Debug, Clone)]
pub struct PlanarLattice {
    distance: usize,
    data_sites: Vec<(usize, usize)>,
    plaquettes: Vec<Stabilizer>,
    vertices: Vec<Stabilizer>,
    // For each qubit, the plaquette / vertex checks it touches.
    qubit_plaquettes: Vec<Vec<usize>>,
    qubit_vertices: Vec<Vec<usize>>,
    logical_x: Vec<usize>,
    logical_z: Vec<usize>,
}

impl PlanarLattice {
    pub fn new(distance: usize) -> Result<Self, LatticeError> {
        if distance < 2 {
            return Err(LatticeError::DistanceTooSmall(distance));
        }
        let d = distance;
        let size = 2 * d - 1;
        let n = d * d + (d - 1) * (d - 1);

        let mut data_sites = vec![(0, 0); n];
        for r in 0..size {
            for c in (r % 2..size).step_by(2) {
                data_sites[qubit_index(r, c, d, d)?] = (r, c);
            }
        }

        let stabilizer_at = |r: usize, c: usize| -> Stabilizer {
            let mut support = Vec::with_capacity(4);
            let (r, c) = (r as isize, c as isize);
            for (dr, dc) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                let (nr, nc) = (r + dr, c + dc);
                if nr >= 0 && nc >= 0 && (nr as usize) < size && (nc as usize) < size {
                    support.push(qubit_index(nr as usize, nc as usize, d, d).unwrap());
                }
            }
            support.sort_unstable();
            Stabilizer {
                site: (r as usize, c as usize),
                support,
            }
        };

        let mut plaquettes = Vec::with_capacity(d * (d - 1));
        let mut vertices = Vec::with_capacity(d * (d - 1));
        for r in 0..size {
            for c in 0..size {
                match (r % 2, c % 2) {
                    (1, 0) => plaquettes.push(stabilizer_at(r, c)),
                    (0, 1) => vertices.push(stabilizer_at(r, c)),
                    _ => {}
                }
            }
        }

        let mut qubit_plaquettes = vec![Vec::new(); n];
        for (j, s) in plaquettes.iter().enumerate() {
            for &q in &s.support {
                qubit_plaquettes[q].push(j);
            }
        }
        let mut qubit_vertices = vec![Vec::new(); n];
        for (j, s) in vertices.iter().enumerate() {
            for &q in &s.support {
                qubit_vertices[q].push(j);
            }
        }

        let mid = if (d - 1).is_multiple_of(2) { d - 1 } else { d - 2 };
        let logical_z = (0..size)
            .step_by(2)
            .map(|c| qubit_index(mid, c, d, d).unwrap())
            .collect();
        let logical_x = (0..size)
            .step_by(2)
            .map(|r| qubit_index(r, mid, d, d).unwrap())
            .collect();

        Ok(Self {
            distance,
            data_sites,
            plaquettes,
            vertices,
            qubit_plaquettes,
            qubit_vertices,
            logical_x,
            logical_z,
        })
    }

    pub fn distance(&self) -> usize {
        self.distance
    }

    /// Side length of the site grid, `2d - 1`.
    pub fn grid_size(&self) -> usize {
        2 * self.distance - 1
    }

    pub fn num_qubits(&self) -> usize {
        self.data_sites.len()
    }

    /// Number of checks of each kind, `d(d-1)`.
    pub fn num_checks(&self) -> usize {
        self.plaquettes.len()
    }

    /// `(row, col)` of each data qubit, indexed by qubit index.
    pub fn data_sites(&self) -> &[(usize, usize)] {
        &self.data_sites
    }

    pub fn site_of(&self, qubit: usize) -> (usize, usize) {
        self.data_sites[qubit]
    }

    pub fn qubit_at(&self, row: usize, col: usize) -> Result<usize, LatticeError> {
        if row >= self.grid_size() || col >= self.grid_size() {
            return Err(LatticeError::NotADataSite {
                row,
                col,
                distance: self.distance,
            });
        }
        qubit_index(row, col, self.distance, self.distance)
    }

    pub fn checks(&self, kind: CheckKind) -> &[Stabilizer] {
        match kind {
            CheckKind::Plaquette => &self.plaquettes,
            CheckKind::Vertex => &self.vertices,
        }
    }

    pub fn plaquettes(&self) -> &[Stabilizer] {
        &self.plaquettes
    }

    pub fn vertices(&self) -> &[Stabilizer] {
        &self.vertices
    }

    /// Checks of `kind` touching `qubit`.
    pub fn checks_of(&self, kind: CheckKind, qubit: usize) -> &[usize] {
        match kind {
            CheckKind::Plaquette => &self.qubit_plaquettes[qubit],
            CheckKind::Vertex => &self.qubit_vertices[qubit],
        }
    }

    /// Qubits with both coordinates even; indices `[0, d^2)`.
    pub fn horizontal_sublattice(&self) -> std::ops::Range<usize> {
        0..self.distance * self.distance
    }

    /// Qubits with both coordinates odd; indices `[d^2, n)`.
    pub fn vertical_sublattice(&self) -> std::ops::Range<usize> {
        self.distance * self.distance..self.num_qubits()
    }

    /// Support of the `X_L` representative (a vertical co-chain).
    pub fn logical_x_support(&self) -> &[usize] {
        &self.logical_x
    }

    /// Support of the `Z_L` representative (a horizontal chain).
    pub fn logical_z_support(&self) -> &[usize] {
        &self.logical_z
    }

    pub fn logical_x(&self) -> PauliOperator {
        PauliOperator::x_on(self.num_qubits(), self.logical_x.iter().copied())
    }

    pub fn logical_z(&self) -> PauliOperator {
        PauliOperator::z_on(self.num_qubits(), self.logical_z.iter().copied())
    }

    /// Generator `j` of `kind` as a Pauli operator (Z-type for plaquettes, X-type for vertices).
    pub fn stabilizer_operator(&self, kind: CheckKind, j: usize) -> PauliOperator {
        let support = self.checks(kind)[j].support.iter().copied();
        match kind {
            CheckKind::Plaquette => PauliOperator::z_on(self.num_qubits(), support),
            CheckKind::Vertex => PauliOperator::x_on(self.num_qubits(), support),
        }
    }

    fn check_len(&self, op: &PauliOperator) -> Result<(), LatticeError> {
        if op.len() != self.num_qubits() {
            return Err(LatticeError::LengthMismatch {
                expected: self.num_qubits(),
                found: op.len(),
            });
        }
        Ok(())
    }

    pub fn extract_syndrome(&self, error: &PauliOperator) -> Result<Syndrome, LatticeError> {
        self.check_len(error)?;
        let m = self.num_checks();
        let mut plaquette = BitString::zeros(m);
        let mut vertex = BitString::zeros(m);
        for q in error.x.ones() {
            for &j in &self.qubit_plaquettes[q] {
                plaquette.flip(j);
            }
        }
        for q in error.z.ones() {
            for &j in &self.qubit_vertices[q] {
                vertex.flip(j);
            }
        }
        Ok(Syndrome { plaquette, vertex })
    }

    /// `(commutes with X_L, commutes with Z_L)`.
    pub fn commutes_with_logicals(&self, op: &PauliOperator) -> Result<(bool, bool), LatticeError> {
        self.check_len(op)?;
        let with_x = self.logical_x.iter().filter(|&&q| op.z.get(q)).count() % 2 == 0;
        let with_z = self.logical_z.iter().filter(|&&q| op.x.get(q)).count() % 2 == 0;
        Ok((with_x, with_z))
    }
}

/// Free-function form of [`PlanarLattice::new`].
pub fn build_lattice(distance: usize) -> Result<PlanarLattice, LatticeError> {
    PlanarLattice::new(distance)
}

/// Free-function form of [`PlanarLattice::extract_syndrome`].
pub fn extract_syndrome(lattice: &PlanarLattice, error: &PauliOperator) -> Result<Syndrome, LatticeError> {
    lattice.extract_syndrome(error)
}

/// Free-function form of [`PlanarLattice::commutes_with_logicals`].
pub fn commutes_with_logicals(lattice: &PlanarLattice, op: &PauliOperator) -> Result<(bool, bool), LatticeError> {
    lattice.commutes_with_logicals(op)
}

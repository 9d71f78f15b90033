//! Matrix-free symmetric operators on `l^2({0,..,2^n-1})`: the hypercube
//! adjacency, diagonal potentials, the tilted jump generator, the
//! transverse-field Hamiltonian, and restrictions to the complement of an
//! exclusion set. A dense materialization backs the small-size oracles.
//!
//! Neighbor enumeration is a single XOR per bit position, which is the whole
//! performance story of the matvec.

use crate::error::{Error, Result};
use crate::remfield::{EnergyLandscape, RemField};
use rayon::prelude::*;

/// Largest spin count served by the dense backend (`2^12` square matrices).
pub const DENSE_CAP: u32 = 12;

/// Which operator a [`GeneratorSpec`] selects.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorKind {
    /// Tilted jump generator `e^{-s} T - n 1 + lambda U`.
    ///
    /// The canonical sign convention carries `+lambda U`; comparisons with
    /// moment formulas written for `-lambda U` substitute `lambda -> -lambda`,
    /// which leaves the landscape's law invariant.
    TiltedMarkov { lambda: f64, s: f64 },
    /// Transverse-field Hamiltonian `gamma T - lambda U`.
    Qrem { gamma: f64, lambda: f64 },
}

/// A symmetric operator selection: kind, size, and an optional exclusion
/// mask. With a mask set, rows and columns indexed by masked configurations
/// are zeroed, confining the operator to the complement subspace.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    n: u32,
    kind: GeneratorKind,
    mask: Option<MaskSet>,
}

impl GeneratorSpec {
    pub fn tilted_markov(n: u32, lambda: f64, s: f64) -> Self {
        Self {
            n,
            kind: GeneratorKind::TiltedMarkov { lambda, s },
            mask: None,
        }
    }

    pub fn qrem(n: u32, gamma: f64, lambda: f64) -> Self {
        Self {
            n,
            kind: GeneratorKind::Qrem { gamma, lambda },
            mask: None,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    pub fn mask(&self) -> Option<&MaskSet> {
        self.mask.as_ref()
    }

    pub fn dim(&self) -> usize {
        1usize << self.n
    }

    /// Off-diagonal hop amplitude: `e^{-s}` or `gamma`.
    fn hop(&self) -> f64 {
        match self.kind {
            GeneratorKind::TiltedMarkov { s, .. } => (-s).exp(),
            GeneratorKind::Qrem { gamma, .. } => gamma,
        }
    }

    /// Diagonal entry at `sigma` given the landscape value there.
    fn diagonal(&self, u: f64) -> f64 {
        match self.kind {
            GeneratorKind::TiltedMarkov { lambda, .. } => -(self.n as f64) + lambda * u,
            GeneratorKind::Qrem { lambda, .. } => -lambda * u,
        }
    }
}

/// Membership bitset over configuration space.
#[derive(Debug, Clone)]
pub struct MaskSet {
    words: Vec<u64>,
    count: usize,
    members: Vec<usize>,
}

impl MaskSet {
    pub fn from_members(dim: usize, members: Vec<usize>) -> Self {
        let mut words = vec![0u64; dim.div_ceil(64)];
        for &m in &members {
            debug_assert!(m < dim);
            words[m / 64] |= 1u64 << (m % 64);
        }
        Self {
            words,
            count: members.len(),
            members,
        }
    }

    #[inline]
    pub fn contains(&self, sigma: usize) -> bool {
        (self.words[sigma / 64] >> (sigma % 64)) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }
}

/// A vector over configuration space carrying an accumulated logarithmic
/// normalization: the represented vector is `e^{log_scale} * entries`.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub n: u32,
    pub entries: Vec<f64>,
    pub log_scale: f64,
}

impl StateVector {
    pub fn new(n: u32, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), 1usize << n, "entry count must be 2^n");
        Self {
            n,
            entries,
            log_scale: 0.0,
        }
    }

    pub fn zeros(n: u32) -> Self {
        Self::new(n, vec![0.0; 1usize << n])
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Euclidean inner product of the raw entries (log scales not applied).
    pub fn dot(&self, other: &StateVector) -> f64 {
        debug_assert_eq!(self.n, other.n);
        crate::chunks::scan(
            self.dim(),
            |range| {
                let mut s = 0.0;
                for i in range {
                    s += self.entries[i] * other.entries[i];
                }
                s
            },
            0.0f64,
            |a, b| a + b,
        )
    }

    /// Rescale entries to unit norm, folding the factor into `log_scale`.
    pub fn renormalize(&mut self) {
        let norm = self.norm();
        if norm > 0.0 && norm.is_finite() {
            let inv = 1.0 / norm;
            self.entries.par_iter_mut().for_each(|x| *x *= inv);
            self.log_scale += norm.ln();
        }
    }
}

/// The normalized flat vector: every entry `2^{-n/2}`, zero log scale.
pub fn flat_vector(n: u32) -> StateVector {
    let dim = 1usize << n;
    let amp = 1.0 / (dim as f64).sqrt();
    StateVector::new(n, vec![amp; dim])
}

/// Matrix-free matvec of the selected operator against `v`.
///
/// Each output entry depends only on its own row, so rows are computed in
/// parallel; the result is independent of worker count. The input
/// `log_scale` is passed through unchanged (the map is linear).
pub fn apply(spec: &GeneratorSpec, field: &impl EnergyLandscape, v: &StateVector) -> StateVector {
    assert_eq!(
        spec.n,
        field.spins(),
        "operator and landscape sizes differ"
    );
    assert_eq!(spec.n, v.n, "operator and vector sizes differ");
    let n = spec.n;
    let hop = spec.hop();
    let mut out = vec![0.0f64; v.dim()];
    let entries = &v.entries;

    match spec.mask.as_ref() {
        None => {
            out.par_chunks_mut(crate::chunks::CHUNK)
                .enumerate()
                .for_each(|(c, chunk)| {
                    let base = c * crate::chunks::CHUNK;
                    for (k, o) in chunk.iter_mut().enumerate() {
                        let sigma = base + k;
                        let mut acc = spec.diagonal(field.energy(sigma)) * entries[sigma];
                        for j in 0..n {
                            acc += hop * entries[sigma ^ (1usize << j)];
                        }
                        *o = acc;
                    }
                });
        }
        Some(mask) => {
            out.par_chunks_mut(crate::chunks::CHUNK)
                .enumerate()
                .for_each(|(c, chunk)| {
                    let base = c * crate::chunks::CHUNK;
                    for (k, o) in chunk.iter_mut().enumerate() {
                        let sigma = base + k;
                        if mask.contains(sigma) {
                            *o = 0.0;
                            continue;
                        }
                        let mut acc = spec.diagonal(field.energy(sigma)) * entries[sigma];
                        for j in 0..n {
                            let tau = sigma ^ (1usize << j);
                            if !mask.contains(tau) {
                                acc += hop * entries[tau];
                            }
                        }
                        *o = acc;
                    }
                });
        }
    }

    StateVector {
        n,
        entries: out,
        log_scale: v.log_scale,
    }
}

/// Explicit `2^n x 2^n` symmetric matrix of the operator, for oracle use.
pub fn materialize_dense(spec: &GeneratorSpec, field: &impl EnergyLandscape) -> Result<faer::Mat<f64>> {
    if spec.n > DENSE_CAP {
        return Err(Error::DenseCapExceeded {
            n: spec.n,
            cap: DENSE_CAP,
        });
    }
    assert_eq!(spec.n, field.spins());
    let dim = spec.dim();
    let hop = spec.hop();
    let mut m = faer::Mat::<f64>::zeros(dim, dim);
    for sigma in 0..dim {
        if let Some(mask) = spec.mask.as_ref() {
            if mask.contains(sigma) {
                continue;
            }
        }
        m[(sigma, sigma)] = spec.diagonal(field.energy(sigma));
        for j in 0..spec.n {
            let tau = sigma ^ (1usize << j);
            if let Some(mask) = spec.mask.as_ref() {
                if mask.contains(tau) {
                    continue;
                }
            }
            m[(sigma, tau)] = hop;
        }
    }
    Ok(m)
}

/// The off-diagonal block coupling an exclusion set to its complement:
/// `A = 1^> (gamma T) 1^<` maps vectors supported on the set into the
/// complement, and `A*` maps back.
#[derive(Debug, Clone)]
pub struct BoundaryCoupling {
    gamma: f64,
    n: u32,
    mask: MaskSet,
}

impl BoundaryCoupling {
    /// `A v`: for each unmasked row, `gamma` times the sum of `v` over
    /// masked neighbors.
    pub fn apply(&self, v: &StateVector) -> StateVector {
        assert_eq!(v.n, self.n);
        let mut out = StateVector::zeros(self.n);
        out.log_scale = v.log_scale;
        for sigma in 0..v.dim() {
            if self.mask.contains(sigma) {
                continue;
            }
            let mut acc = 0.0;
            for j in 0..self.n {
                let tau = sigma ^ (1usize << j);
                if self.mask.contains(tau) {
                    acc += v.entries[tau];
                }
            }
            out.entries[sigma] = self.gamma * acc;
        }
        out
    }

    /// `A* w`: for each masked row, `gamma` times the sum of `w` over
    /// unmasked neighbors.
    pub fn apply_adjoint(&self, w: &StateVector) -> StateVector {
        assert_eq!(w.n, self.n);
        let mut out = StateVector::zeros(self.n);
        out.log_scale = w.log_scale;
        for &sigma in self.mask.members() {
            let mut acc = 0.0;
            for j in 0..self.n {
                let tau = sigma ^ (1usize << j);
                if !self.mask.contains(tau) {
                    acc += w.entries[tau];
                }
            }
            out.entries[sigma] = self.gamma * acc;
        }
        out
    }
}

/// Restriction of a transverse-field operator to the complement of the
/// extreme-deviation set at level `eta`, together with the boundary
/// coupling block.
pub fn restrict_complement(
    spec: &GeneratorSpec,
    field: &RemField,
    eta: f64,
) -> Result<(GeneratorSpec, BoundaryCoupling)> {
    let GeneratorKind::Qrem { gamma, .. } = spec.kind else {
        return Err(Error::WrongOperatorKind(
            "restriction applies to the transverse-field operator only",
        ));
    };
    if eta <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "eta",
            requirement: "> 0",
            value: eta,
        });
    }
    let set = field.extreme_set_full(eta)?;
    let mask = MaskSet::from_members(spec.dim(), set.members);
    let coupling = BoundaryCoupling {
        gamma,
        n: spec.n,
        mask: mask.clone(),
    };
    let restricted = GeneratorSpec {
        n: spec.n,
        kind: spec.kind,
        mask: Some(mask),
    };
    Ok((restricted, coupling))
}

/// A constant landscape; useful as a total stand-in potential in tests and
/// for zero-field operator paths.
#[derive(Debug, Clone, Copy)]
pub struct ConstField {
    pub n: u32,
    pub value: f64,
}

impl EnergyLandscape for ConstField {
    fn spins(&self) -> u32 {
        self.n
    }

    fn energy(&self, _sigma: usize) -> f64 {
        self.value
    }
}

//! Dense symmetric eigendecomposition backend.
//!
//! One decomposition per operator serves every time extent of the
//! semigroup, the spectral projector overlaps, and the resolvent oracle.
//! The diagonal case (zero hop amplitude) bypasses the eigensolver: the
//! configuration basis is already the eigenbasis, and downstream exactness
//! checks rely on that.

use crate::error::{Error, Result};
use crate::operator::{materialize_dense, GeneratorKind, GeneratorSpec, StateVector, DENSE_CAP};
use crate::remfield::EnergyLandscape;

/// Full spectrum of a dense symmetric operator, eigenvalues ascending, with
/// the squared overlaps of each eigenvector against the flat vector.
pub struct DenseSpectrum {
    pub n: u32,
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// `|<flat|psi_i>|^2`, aligned with `eigenvalues`.
    pub flat_overlaps: Vec<f64>,
    /// Eigenvectors as columns, aligned with `eigenvalues`.
    pub vectors: faer::Mat<f64>,
}

/// Eigendecomposition of a dense symmetric matrix; eigenvalues returned in
/// ascending order with matching eigenvector columns.
pub(crate) fn sym_eigen(mat: faer::MatRef<'_, f64>) -> Result<(Vec<f64>, faer::Mat<f64>)> {
    let dim = mat.nrows();
    let evd = mat
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Numeric(format!("dense eigendecomposition failed: {e:?}")))?;
    let mut order: Vec<usize> = (0..dim).collect();
    let s = evd.S();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let values: Vec<f64> = order.iter().map(|&i| s[i]).collect();
    let u = evd.U();
    let mut vectors = faer::Mat::<f64>::zeros(dim, dim);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..dim {
            vectors[(row, col)] = u[(row, src)];
        }
    }
    Ok((values, vectors))
}

impl DenseSpectrum {
    pub fn compute(spec: &GeneratorSpec, field: &impl EnergyLandscape) -> Result<Self> {
        if spec.n() > DENSE_CAP {
            return Err(Error::DenseCapExceeded {
                n: spec.n(),
                cap: DENSE_CAP,
            });
        }
        if spec.mask().is_none() {
            if let GeneratorKind::Qrem { gamma, lambda } = spec.kind() {
                if gamma == 0.0 {
                    return Ok(Self::diagonal(spec.n(), |sigma| -lambda * field.energy(sigma)));
                }
            }
        }
        let mat = materialize_dense(spec, field)?;
        let (eigenvalues, vectors) = sym_eigen(mat.as_ref())?;
        let dim = 1usize << spec.n();
        let amp = 1.0 / (dim as f64).sqrt();
        let flat_overlaps = (0..dim)
            .map(|col| {
                let mut dot = 0.0;
                for row in 0..dim {
                    dot += vectors[(row, col)];
                }
                let o = amp * dot;
                o * o
            })
            .collect();
        Ok(Self {
            n: spec.n(),
            eigenvalues,
            flat_overlaps,
            vectors,
        })
    }

    /// Spectrum of a diagonal operator: basis states are the exact
    /// eigenvectors, each with flat overlap exactly `2^{-n}`.
    fn diagonal(n: u32, diag: impl Fn(usize) -> f64) -> Self {
        let dim = 1usize << n;
        let mut pairs: Vec<(f64, usize)> = (0..dim).map(|s| (diag(s), s)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut vectors = faer::Mat::<f64>::zeros(dim, dim);
        for (col, &(_, sigma)) in pairs.iter().enumerate() {
            vectors[(sigma, col)] = 1.0;
        }
        let overlap = 1.0 / dim as f64;
        Self {
            n,
            eigenvalues: pairs.iter().map(|p| p.0).collect(),
            flat_overlaps: vec![overlap; dim],
            vectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn top_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// `ln <flat| e^{t Op} |flat>` evaluated stably in log space.
    pub fn ln_flat_expm_flat(&self, t: f64) -> f64 {
        let mut max = f64::NEG_INFINITY;
        for (ev, o) in self.eigenvalues.iter().zip(&self.flat_overlaps) {
            if *o > 0.0 {
                max = max.max(t * ev + o.ln());
            }
        }
        let mut sum = 0.0;
        for (ev, o) in self.eigenvalues.iter().zip(&self.flat_overlaps) {
            if *o > 0.0 {
                sum += (t * ev + o.ln() - max).exp();
            }
        }
        max + sum.ln()
    }

    /// `e^{t Op} v` in scaled representation (unit-norm entries, log scale).
    pub fn expm_apply(&self, t: f64, v: &StateVector) -> StateVector {
        let dim = self.dim();
        assert_eq!(v.dim(), dim);
        // coefficients in the eigenbasis
        let mut coeff = vec![0.0f64; dim];
        for (col, c) in coeff.iter_mut().enumerate() {
            let mut dot = 0.0;
            for row in 0..dim {
                dot += self.vectors[(row, col)] * v.entries[row];
            }
            *c = dot;
        }
        let shift = self
            .eigenvalues
            .iter()
            .map(|ev| t * ev)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut out = vec![0.0f64; dim];
        for col in 0..dim {
            let w = coeff[col] * (t * self.eigenvalues[col] - shift).exp();
            if w == 0.0 {
                continue;
            }
            for (row, o) in out.iter_mut().enumerate() {
                *o += self.vectors[(row, col)] * w;
            }
        }
        let mut result = StateVector {
            n: v.n,
            entries: out,
            log_scale: v.log_scale + shift,
        };
        result.renormalize();
        result
    }

    /// Dense resolvent `(e - Op)^{-1}` as an explicit matrix.
    pub fn resolvent_matrix(&self, e: f64) -> Result<faer::Mat<f64>> {
        let top = self.top_eigenvalue();
        if e <= top {
            return Err(Error::SpectrumProximity {
                e,
                top,
                margin: 0.0,
            });
        }
        let dim = self.dim();
        let mut out = faer::Mat::<f64>::zeros(dim, dim);
        for col in 0..dim {
            let w = 1.0 / (e - self.eigenvalues[col]);
            for i in 0..dim {
                let vi = self.vectors[(i, col)] * w;
                if vi == 0.0 {
                    continue;
                }
                for j in 0..dim {
                    out[(i, j)] += vi * self.vectors[(j, col)];
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{apply, flat_vector, GeneratorSpec};
    use crate::remfield::RemField;

    #[test]
    fn eigenvalues_of_shifted_adjacency() {
        // T - n has spectrum {2k - 2n(?)}: n - 2m shifted by -n, so the
        // eigenvalues are {-2m : m = 0..n} with binomial multiplicities and
        // maximum exactly 0.
        let n = 6u32;
        let field = crate::operator::ConstField { n, value: 0.0 };
        let spec = GeneratorSpec::tilted_markov(n, 0.0, 0.0);
        let sp = DenseSpectrum::compute(&spec, &field).unwrap();
        assert!(sp.top_eigenvalue().abs() < 1e-10);
        for ev in &sp.eigenvalues {
            let nearest = (ev / 2.0).round() * 2.0;
            assert!((ev - nearest).abs() < 1e-9, "eigenvalue {ev} not an even integer");
        }
    }

    #[test]
    fn overlaps_are_complete() {
        let field = RemField::new(31, 8).unwrap();
        let spec = GeneratorSpec::qrem(8, 0.4, 1.0);
        let sp = DenseSpectrum::compute(&spec, &field).unwrap();
        let total: f64 = sp.flat_overlaps.iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn diagonal_shortcut_is_exact() {
        let field = RemField::new(8, 8).unwrap();
        let spec = GeneratorSpec::qrem(8, 0.0, 1.0);
        let sp = DenseSpectrum::compute(&spec, &field).unwrap();
        // eigenvalues are exactly the sorted diagonal values
        let mut diag: Vec<f64> = (0..256).map(|s| -field.energy(s)).collect();
        diag.sort_by(f64::total_cmp);
        for (a, b) in sp.eigenvalues.iter().zip(&diag) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert!(sp.flat_overlaps.iter().all(|&o| o == 1.0 / 256.0));
    }

    #[test]
    fn expm_apply_matches_matvec_series_for_small_t() {
        // first-order check: e^{tA} v ~ v + tAv for tiny t
        let field = RemField::new(77, 6).unwrap();
        let spec = GeneratorSpec::tilted_markov(6, 0.8, 0.1);
        let sp = DenseSpectrum::compute(&spec, &field).unwrap();
        let v = flat_vector(6);
        let t = 1e-7;
        let w = sp.expm_apply(t, &v);
        let av = apply(&spec, &field, &v);
        let scale = w.log_scale.exp();
        for i in 0..v.dim() {
            let expected = v.entries[i] + t * av.entries[i];
            let got = scale * w.entries[i];
            assert!(
                (got - expected).abs() < 1e-12,
                "entry {i}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn resolvent_matrix_inverts() {
        let field = RemField::new(5, 6).unwrap();
        let spec = GeneratorSpec::qrem(6, 0.3, 1.0);
        let sp = DenseSpectrum::compute(&spec, &field).unwrap();
        let e = sp.top_eigenvalue() + 2.0;
        let r = sp.resolvent_matrix(e).unwrap();
        let m = materialize_dense(&spec, &field).unwrap();
        // (e - M) R = I
        let dim = 64;
        for i in 0..dim {
            for j in 0..dim {
                let mut acc = 0.0;
                for k in 0..dim {
                    let em = if i == k { e } else { 0.0 } - m[(i, k)];
                    acc += em * r[(k, j)];
                }
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((acc - expected).abs() < 1e-9);
            }
        }
        assert!(sp.resolvent_matrix(sp.top_eigenvalue() - 0.1).is_err());
    }
}

//! Lanczos iteration with full reorthogonalization.

use super::dense::sym_eigen;
use crate::error::{Error, Result};
use crate::operator::StateVector;
use crate::rng;

/// Incremental Lanczos factorization of a symmetric operator.
///
/// After `m` steps the basis holds `m` orthonormal vectors and
/// (`alphas`, `betas`) define the projected tridiagonal matrix; `next_beta`
/// is the residual norm that would extend it. Every step reorthogonalizes
/// the new direction against the whole basis, twice.
pub(crate) struct Lanczos<'a, F: Fn(&StateVector) -> StateVector> {
    op: &'a F,
    pub basis: Vec<StateVector>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub next_beta: f64,
    pub breakdown: bool,
}

impl<'a, F: Fn(&StateVector) -> StateVector> Lanczos<'a, F> {
    /// Start from `v0`, which is normalized internally.
    pub fn new(op: &'a F, v0: &StateVector) -> Self {
        let mut v = v0.clone();
        let norm = v.norm();
        assert!(norm > 0.0, "Lanczos start vector must be nonzero");
        let inv = 1.0 / norm;
        v.entries.iter_mut().for_each(|x| *x *= inv);
        v.log_scale = 0.0;
        Self {
            op,
            basis: vec![v],
            alphas: Vec::new(),
            betas: Vec::new(),
            next_beta: 0.0,
            breakdown: false,
        }
    }

    pub fn steps(&self) -> usize {
        self.alphas.len()
    }

    /// One Lanczos step; returns false on invariant-subspace breakdown.
    pub fn step(&mut self) -> bool {
        if self.breakdown {
            return false;
        }
        let j = self.alphas.len();
        let vj = &self.basis[j];
        let mut w = (self.op)(vj);
        let alpha = w.dot(vj);
        self.alphas.push(alpha);

        axpy(&mut w, -alpha, vj);
        if j > 0 {
            let beta_prev = self.betas[j - 1];
            let vprev = self.basis[j - 1].clone();
            axpy(&mut w, -beta_prev, &vprev);
        }
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for v in &self.basis {
                let c = w.dot(v);
                axpy(&mut w, -c, v);
            }
        }

        let beta = w.norm();
        let scale = self
            .alphas
            .iter()
            .chain(self.betas.iter())
            .fold(1.0f64, |m, x| m.max(x.abs()));
        if !beta.is_finite() || beta <= 1e-13 * scale {
            self.next_beta = 0.0;
            self.breakdown = true;
            return false;
        }
        let inv = 1.0 / beta;
        w.entries.iter_mut().for_each(|x| *x *= inv);
        self.betas.push(beta);
        self.next_beta = beta;
        self.basis.push(w);
        true
    }

    /// Eigendecomposition of the projected tridiagonal matrix after `m`
    /// steps: ascending Ritz values with the tridiagonal eigenvectors.
    pub fn ritz(&self) -> Result<(Vec<f64>, faer::Mat<f64>)> {
        let m = self.alphas.len();
        let mut t = faer::Mat::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = self.alphas[i];
        }
        for i in 0..m.saturating_sub(1) {
            t[(i, i + 1)] = self.betas[i];
            t[(i + 1, i)] = self.betas[i];
        }
        sym_eigen(t.as_ref())
    }

    /// Combine the basis with coefficient vector `y` (length = steps).
    pub fn combine(&self, y: &[f64]) -> StateVector {
        let mut out = StateVector::zeros(self.basis[0].n);
        for (v, &c) in self.basis.iter().zip(y) {
            if c != 0.0 {
                axpy(&mut out, c, v);
            }
        }
        out
    }
}

pub(crate) fn axpy(acc: &mut StateVector, a: f64, x: &StateVector) {
    use rayon::prelude::*;
    if acc.dim() >= 1 << 14 {
        acc.entries
            .par_iter_mut()
            .zip(x.entries.par_iter())
            .for_each(|(o, xi)| *o += a * xi);
    } else {
        for (o, xi) in acc.entries.iter_mut().zip(&x.entries) {
            *o += a * xi;
        }
    }
}

/// Converged extreme (largest) eigenvalues of a symmetric operator.
#[derive(Debug, Clone)]
pub struct ExtremeEigs {
    /// Top eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Residual bound per value (symmetric eigenvalue error bound).
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Deterministic dense start vector for iterative eigensolves.
pub(crate) fn seed_vector(n: u32) -> StateVector {
    let dim = 1usize << n;
    let key = 0x5EED_0000_0000_0000u64 ^ dim as u64;
    let mut v = StateVector::new(n, (0..dim).map(|i| rng::keyed_normal(key, i as u64)).collect());
    let norm = v.norm();
    v.entries.iter_mut().for_each(|x| *x /= norm);
    v
}

/// Top-`k` eigenvalues of the operator behind `op`, to residual tolerance
/// `tol`, by Lanczos with full reorthogonalization.
pub(crate) fn extreme_eigs_op<F: Fn(&StateVector) -> StateVector>(
    op: &F,
    n: u32,
    k: usize,
    tol: f64,
) -> Result<ExtremeEigs> {
    assert!(k >= 1);
    let dim = 1usize << n;
    let max_steps = dim.min(600.max(4 * k));
    let v0 = seed_vector(n);
    let mut lz = Lanczos::new(op, &v0);

    loop {
        let stepped = lz.step();
        let m = lz.steps();
        let exhausted = !stepped || m >= max_steps;
        if !exhausted && (m < k || m % 8 != 0) {
            continue;
        }
        let (theta, s) = lz.ritz()?;
        let take = k.min(m);
        let mut values = Vec::with_capacity(take);
        let mut residuals = Vec::with_capacity(take);
        for i in 0..take {
            let col = m - 1 - i; // descending
            values.push(theta[col]);
            residuals.push(lz.next_beta * s[(m - 1, col)].abs());
        }
        let worst = residuals.iter().fold(0.0f64, |a, &b| a.max(b));
        let scale = values.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
        let report = ExtremeEigs {
            values,
            residuals,
            iterations: m,
        };
        // a breakdown means the Krylov space is invariant: Ritz values are
        // exact even if fewer than requested
        if worst <= tol * scale || lz.breakdown {
            return Ok(report);
        }
        if exhausted {
            return Err(Error::EigsNoConvergence {
                iterations: m,
                residual: worst,
            });
        }
    }
}

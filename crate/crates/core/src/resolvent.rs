//! Resolvent solves and the deterministic ell^p analysis: the
//! neighbor-averaged negative-part weight `gamma_n(E)`, the per-configuration
//! ell^1 bound on flat resolvent elements, non-negativity and potential
//! monotonicity.
//!
//! The bound is stated for a Hamiltonian with potential `U`; this module
//! applies it with the scaled potential `lambda * U` throughout, and every
//! report records that substitution through its `lambda` field.

use crate::chunks;
use crate::error::{Error, Result};
use crate::operator::{apply, flat_vector, GeneratorSpec, StateVector};
use crate::remfield::{EnergyLandscape, RemField};
use crate::spectral::extreme_eigs;
use serde::Serialize;

/// Relative margin (times `n`) that `E` must keep above the spectrum.
pub const SPECTRUM_MARGIN_PER_SPIN: f64 = 1e-6;

/// Solve `(E - Op) x = rhs` to relative residual `tol` by conjugate
/// gradients; `E - Op` is positive definite in the admissible regime, which
/// is verified against the measured top eigenvalue before solving.
pub fn solve_resolvent(
    spec: &GeneratorSpec,
    field: &impl EnergyLandscape,
    e: f64,
    rhs: &StateVector,
    tol: f64,
) -> Result<StateVector> {
    let margin = SPECTRUM_MARGIN_PER_SPIN * spec.n() as f64;
    let top = extreme_eigs(spec, field, 1, 1e-9)?.values[0];
    if e < top + margin {
        return Err(Error::SpectrumProximity { e, top, margin });
    }

    let rhs_norm = rhs.norm();
    if rhs_norm == 0.0 {
        let mut out = StateVector::zeros(spec.n());
        out.log_scale = rhs.log_scale;
        return Ok(out);
    }

    let shifted = |x: &StateVector| {
        let mut ax = apply(spec, field, x);
        for (o, xi) in ax.entries.iter_mut().zip(&x.entries) {
            *o = e * xi - *o;
        }
        ax
    };

    let mut x = StateVector::zeros(spec.n());
    x.log_scale = rhs.log_scale;
    let mut r = rhs.clone();
    r.log_scale = 0.0;
    let mut p = r.clone();
    let mut rs = r.dot(&r);

    let max_iter = 200_000usize.min(20 * spec.dim() + 100);
    for _ in 0..max_iter {
        if rs.sqrt() <= tol * rhs_norm {
            return Ok(x);
        }
        let ap = shifted(&p);
        let alpha = rs / p.dot(&ap);
        if !alpha.is_finite() {
            return Err(Error::Numeric(
                "conjugate gradients hit a non-finite step".into(),
            ));
        }
        for i in 0..x.entries.len() {
            x.entries[i] += alpha * p.entries[i];
            r.entries[i] -= alpha * ap.entries[i];
        }
        let rs_new = r.dot(&r);
        let beta = rs_new / rs;
        rs = rs_new;
        for i in 0..p.entries.len() {
            p.entries[i] = r.entries[i] + beta * p.entries[i];
        }
    }
    Err(Error::SolveNoConvergence {
        iterations: max_iter,
        residual: rs.sqrt() / rhs_norm,
    })
}

/// Neighbor-averaged negative-part resolvent weight,
/// `sup_sigma (1/n) sum_{tau ~ sigma} U_-(tau) / (E - U_-(tau))`,
/// for the scaled potential `lambda * U`.
///
/// With `truncation = Some(eta)` the negative part is the truncated variant
/// `-U 1[-eta*n < U <= 0]` (scaled by `lambda`), which ignores the deep
/// holes handled separately by exclusion sets.
pub fn gamma_n(
    field: &impl EnergyLandscape,
    lambda: f64,
    e: f64,
    truncation: Option<f64>,
) -> Result<f64> {
    let n = field.spins();
    let dim = field.dim();
    let eta_cut = truncation.map(|eta| -eta * n as f64);

    // negative parts first; each summand must be nonsingular
    let mut weight = vec![0.0f64; dim];
    for (tau, w) in weight.iter_mut().enumerate() {
        let u = field.energy(tau);
        let u_minus = match eta_cut {
            Some(cut) => {
                if u > cut && u <= 0.0 {
                    -lambda * u
                } else {
                    0.0
                }
            }
            None => lambda * (-u).max(0.0),
        };
        if e <= u_minus {
            return Err(Error::SingularSummand {
                e,
                value: u_minus,
                sigma: tau,
            });
        }
        *w = u_minus / (e - u_minus);
    }

    let sup = chunks::scan(
        dim,
        |range| {
            let mut best = f64::NEG_INFINITY;
            for sigma in range {
                let mut acc = 0.0;
                for j in 0..n {
                    acc += weight[sigma ^ (1usize << j)];
                }
                best = best.max(acc);
            }
            best
        },
        f64::NEG_INFINITY,
        f64::max,
    );
    Ok(sup / n as f64)
}

/// Per-configuration comparison of flat resolvent elements against their
/// closed-form bound.
#[derive(Debug, Clone, Serialize)]
pub struct ResolventReport {
    pub n: u32,
    pub gamma: f64,
    /// Potential scale: the operator is `gamma T - lambda U`.
    pub lambda: f64,
    pub e: f64,
    pub gamma_n_value: f64,
    /// Whether `gamma_n(E) < (E - gamma n) / (gamma n)` (vacuous at zero hop).
    pub condition_ok: bool,
    /// `(lhs, rhs)` per configuration: measured `sqrt(2^n) <flat|R(E)|sigma>`
    /// against the bound `E / ((E - gamma n (1 + gamma_n)) (E + lambda U))`.
    pub per_sigma: Vec<(f64, f64)>,
    pub all_pass: bool,
    /// `sup_sigma sqrt(2^n) <flat|R(E)|sigma>`, the ell^1 operator norm.
    pub l1_norm: f64,
    /// Smallest measured element (non-negativity check).
    pub min_lhs: f64,
}

/// Verify the admissible regime, compute `gamma_n(E)`, solve once against
/// the flat vector, and compare every flat resolvent element with its bound.
pub fn l1_bound_report(field: &RemField, gamma: f64, lambda: f64, e: f64) -> Result<ResolventReport> {
    let n = field.n();
    let nf = n as f64;
    let spec = GeneratorSpec::qrem(n, gamma, lambda);

    // admissibility: E above the spectrum, the hop band, and the potential
    let top = extreme_eigs(&spec, field, 1, 1e-9)?.values[0];
    let pot_sup = -lambda * field.min_energy().value;
    let floor = (gamma * nf).max(pot_sup).max(top + SPECTRUM_MARGIN_PER_SPIN * nf);
    if e <= floor {
        return Err(Error::RegimeViolation(format!(
            "E = {e} must exceed max(top spectrum {top}, hop band {}, potential sup {pot_sup})",
            gamma * nf
        )));
    }

    let gn = gamma_n(field, lambda, e, None)?;
    let condition_ok = gamma == 0.0 || gn < (e - gamma * nf) / (gamma * nf);
    if !condition_ok {
        return Err(Error::RegimeViolation(format!(
            "gamma_n(E) = {gn} does not satisfy gamma_n < (E - gamma n)/(gamma n) = {}",
            (e - gamma * nf) / (gamma * nf)
        )));
    }

    // one solve against the flat vector gives every <flat|R|sigma> by
    // symmetry of the resolvent
    let x = solve_resolvent(&spec, field, e, &flat_vector(n), 1e-12)?;
    let sqrt_dim = (field.dim() as f64).sqrt();
    let denom = e - gamma * nf * (1.0 + gn);

    let mut per_sigma = Vec::with_capacity(field.dim());
    let mut all_pass = true;
    let mut l1_norm = f64::NEG_INFINITY;
    let mut min_lhs = f64::INFINITY;
    for sigma in 0..field.dim() {
        let lhs = sqrt_dim * x.entries[sigma];
        let rhs = e / (denom * (e + lambda * field.energy(sigma)));
        if lhs > rhs + 1e-10 {
            all_pass = false;
        }
        l1_norm = l1_norm.max(lhs);
        min_lhs = min_lhs.min(lhs);
        per_sigma.push((lhs, rhs));
    }

    Ok(ResolventReport {
        n,
        gamma,
        lambda,
        e,
        gamma_n_value: gn,
        condition_ok,
        per_sigma,
        all_pass,
        l1_norm,
        min_lhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::ConstField;
    use crate::rng::StreamRng;
    use crate::spectral::DenseSpectrum;

    fn random_state(n: u32, seed: u64) -> StateVector {
        let mut rng = StreamRng::new(seed, 0);
        StateVector::new(n, (0..1usize << n).map(|_| rng.next_normal()).collect())
    }

    #[test]
    fn diagonal_resolvent_is_exact() {
        let n = 8u32;
        let field = RemField::new(44, n).unwrap();
        let spec = GeneratorSpec::qrem(n, 0.0, 1.0);
        let e = 1.0 * field.max_abs_energy() * 1.5 + 1.0;
        let rhs = random_state(n, 5);
        let x = solve_resolvent(&spec, &field, e, &rhs, 1e-13).unwrap();
        for sigma in 0..field.dim() {
            let expected = rhs.entries[sigma] / (e + field.energy(sigma));
            assert!(
                (x.entries[sigma] - expected).abs() < 1e-10,
                "entry {sigma}"
            );
        }
    }

    #[test]
    fn residual_meets_tolerance() {
        let n = 10u32;
        let field = RemField::new(3, n).unwrap();
        let spec = GeneratorSpec::qrem(n, 0.4, 1.0);
        let top = extreme_eigs(&spec, &field, 1, 1e-10).unwrap().values[0];
        let e = top + 2.0;
        let rhs = random_state(n, 17);
        let tol = 1e-11;
        let x = solve_resolvent(&spec, &field, e, &rhs, tol).unwrap();
        let ax = apply(&spec, &field, &x);
        let mut res = 0.0f64;
        for i in 0..x.dim() {
            let r = e * x.entries[i] - ax.entries[i] - rhs.entries[i];
            res += r * r;
        }
        assert!(res.sqrt() <= tol * rhs.norm() * 10.0);
    }

    #[test]
    fn agrees_with_dense_solve() {
        let n = 8u32;
        let field = RemField::new(9, n).unwrap();
        let spec = GeneratorSpec::qrem(n, 0.3, 1.0);
        let sp = DenseSpectrum::compute(&spec, &field).unwrap();
        let e = sp.top_eigenvalue() + 1.5;
        let rhs = random_state(n, 8);
        let x = solve_resolvent(&spec, &field, e, &rhs, 1e-13).unwrap();
        let r = sp.resolvent_matrix(e).unwrap();
        for i in 0..x.dim() {
            let mut acc = 0.0;
            for j in 0..x.dim() {
                acc += r[(i, j)] * rhs.entries[j];
            }
            assert!((acc - x.entries[i]).abs() < 1e-9, "entry {i}");
        }
    }

    #[test]
    fn rejects_spectral_parameter_inside_spectrum() {
        let n = 8u32;
        let field = RemField::new(1, n).unwrap();
        let spec = GeneratorSpec::qrem(n, 0.5, 1.0);
        let rhs = random_state(n, 2);
        match solve_resolvent(&spec, &field, 0.0, &rhs, 1e-10) {
            Err(Error::SpectrumProximity { top, .. }) => {
                assert!(top > 0.0);
            }
            other => panic!("expected spectrum proximity error, got {other:?}"),
        }
    }

    #[test]
    fn gamma_n_zero_field_and_monotonicity() {
        let n = 10u32;
        let zero = ConstField { n, value: 0.0 };
        assert_eq!(gamma_n(&zero, 1.0, 5.0, None).unwrap(), 0.0);

        let field = RemField::new(7, n).unwrap();
        let g1 = gamma_n(&field, 1.0, 1.2 * field.max_abs_energy(), None).unwrap();
        let g2 = gamma_n(&field, 1.0, 2.0 * field.max_abs_energy(), None).unwrap();
        assert!(g2 <= g1, "gamma_n must decrease in E: {g2} > {g1}");
    }

    #[test]
    fn gamma_n_detects_singular_summand() {
        let field = RemField::new(7, 8).unwrap();
        let e_small = 0.1;
        match gamma_n(&field, 1.0, e_small, None) {
            Err(Error::SingularSummand { sigma, value, .. }) => {
                assert!(value >= e_small);
                assert!(sigma < field.dim());
            }
            other => panic!("expected singular summand, got {other:?}"),
        }
    }

    #[test]
    fn gamma_n_is_small_at_safe_energies() {
        // typical value at E = 2n is below 0.25; assert the median and a
        // loose hard cap over the seed distribution
        let n = 12u32;
        let e = 2.0 * n as f64;
        let mut vals: Vec<f64> = (0..20u64)
            .map(|seed| {
                let field = RemField::new(seed, n).unwrap();
                gamma_n(&field, 1.0, e, None).unwrap()
            })
            .collect();
        vals.sort_by(f64::total_cmp);
        assert!(vals[0] >= 0.0);
        assert!(vals[10] < 0.25, "median gamma_n = {}", vals[10]);
        assert!(vals[19] < 0.45, "max gamma_n = {}", vals[19]);
    }

    #[test]
    fn truncated_variant_is_no_larger() {
        let field = RemField::new(13, 10).unwrap();
        let e = 2.0 * 10.0;
        let full = gamma_n(&field, 1.0, e, None).unwrap();
        let trunc = gamma_n(&field, 1.0, e, Some(0.5)).unwrap();
        assert!(trunc <= full + 1e-15);
    }

    #[test]
    fn l1_bound_zero_hop_is_equality() {
        let n = 8u32;
        let field = RemField::new(25, n).unwrap();
        let e = 1.5 * field.max_abs_energy() + 1.0;
        let report = l1_bound_report(&field, 0.0, 1.0, e).unwrap();
        assert!(report.all_pass);
        for (sigma, (lhs, rhs)) in report.per_sigma.iter().enumerate() {
            let exact = 1.0 / (e + field.energy(sigma));
            assert!((lhs - exact).abs() < 1e-9, "lhs at {sigma}");
            assert!((rhs - exact).abs() < 1e-12, "rhs at {sigma}");
        }
    }

    #[test]
    fn l1_bound_holds_with_hop() {
        let n = 10u32;
        let field = RemField::new(6, n).unwrap();
        let top = extreme_eigs(&GeneratorSpec::qrem(n, 0.2, 1.0), &field, 1, 1e-9)
            .unwrap()
            .values[0];
        let e = 1.5 * (0.2 * n as f64).max(field.max_abs_energy()).max(top + 0.1);
        let report = l1_bound_report(&field, 0.2, 1.0, e).unwrap();
        assert!(report.condition_ok);
        assert!(report.all_pass, "l1 bound violated");
        assert!(report.min_lhs >= -1e-12, "negative element {}", report.min_lhs);
        // the norm itself obeys the largest bound
        let max_rhs = report
            .per_sigma
            .iter()
            .map(|p| p.1)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(report.l1_norm <= max_rhs + 1e-10);
    }

    #[test]
    fn dense_nonnegativity_and_potential_monotonicity() {
        let n = 6u32;
        let field = RemField::new(31, n).unwrap();
        let spec = GeneratorSpec::qrem(n, 0.3, 1.0);
        let sp = DenseSpectrum::compute(&spec, &field).unwrap();
        let e = sp.top_eigenvalue().max(0.3 * n as f64).max(field.max_abs_energy()) + 1.0;
        let r = sp.resolvent_matrix(e).unwrap();
        for i in 0..field.dim() {
            for j in 0..field.dim() {
                assert!(r[(i, j)] >= -1e-12, "negative element at ({i},{j})");
            }
        }

        // raising the potential pointwise lowers every element
        struct Shifted<'a> {
            base: &'a RemField,
            bump: Vec<f64>,
        }
        impl crate::remfield::EnergyLandscape for Shifted<'_> {
            fn spins(&self) -> u32 {
                self.base.n()
            }
            fn energy(&self, sigma: usize) -> f64 {
                self.base.energy(sigma) + self.bump[sigma]
            }
        }
        let mut rng = StreamRng::new(77, 1);
        let bump: Vec<f64> = (0..field.dim()).map(|_| rng.next_open01() * 0.5).collect();
        let raised = Shifted { base: &field, bump };
        // operator is gamma T - lambda U: raising U lowers the diagonal,
        // hence lowers (E - H)^{-1} entrywise
        let sp2 = DenseSpectrum::compute(&spec, &raised).unwrap();
        let r2 = sp2.resolvent_matrix(e).unwrap();
        for i in 0..field.dim() {
            for j in 0..field.dim() {
                assert!(
                    r2[(i, j)] <= r[(i, j)] + 1e-12,
                    "monotonicity fails at ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn dense_l1_linf_duality() {
        let n = 6u32;
        let field = RemField::new(14, n).unwrap();
        let spec = GeneratorSpec::qrem(n, 0.4, 1.0);
        let sp = DenseSpectrum::compute(&spec, &field).unwrap();
        let e = sp.top_eigenvalue() + 1.0;
        let r = sp.resolvent_matrix(e).unwrap();
        let dim = field.dim();
        let mut col_norm = f64::NEG_INFINITY;
        let mut row_norm = f64::NEG_INFINITY;
        for i in 0..dim {
            let mut cs = 0.0;
            let mut rs = 0.0;
            for j in 0..dim {
                cs += r[(j, i)].abs();
                rs += r[(i, j)].abs();
            }
            col_norm = col_norm.max(cs);
            row_norm = row_norm.max(rs);
        }
        assert!((col_norm - row_norm).abs() < 1e-10 * col_norm);
    }
}

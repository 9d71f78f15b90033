//! Krylov and dense spectral machinery: extreme eigenvalues, semigroup
//! action, finite-size SCGF records, spectral-projector statistics,
//! eigenvalue/configuration shift pairing, and the boundary-vector checks
//! on the restricted operator.

mod dense;
mod expm;
mod lanczos;

pub use dense::DenseSpectrum;
pub use expm::{expm_action, ExpmReport, MAX_KRYLOV_DIM};
pub use lanczos::ExtremeEigs;

use crate::analytic;
use crate::error::{Error, Result};
use crate::operator::{apply, flat_vector, restrict_complement, GeneratorSpec, StateVector, DENSE_CAP};
use crate::remfield::{EnergyLandscape, RemField};
use crate::resolvent::solve_resolvent;
use serde::Serialize;

/// Which backend produced a finite-size SCGF value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Krylov,
    Dense,
}

/// One finite-size SCGF evaluation with its analytic limit and solver
/// diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct ScgfRecord {
    pub n: u32,
    pub t: f64,
    pub lambda: f64,
    pub s: f64,
    pub seed: u64,
    /// `(1/(n t)) ln <flat| e^{t W} |flat>` at this size.
    pub theta_n: f64,
    /// The limiting value at these parameters.
    pub theta_limit: f64,
    pub method: Method,
    pub krylov_dim: usize,
    pub substeps: u64,
    pub residual_estimate: f64,
}

/// Top-`k` eigenvalues of the selected operator by Lanczos with full
/// reorthogonalization.
pub fn extreme_eigs(
    spec: &GeneratorSpec,
    field: &impl EnergyLandscape,
    k: usize,
    tol: f64,
) -> Result<ExtremeEigs> {
    let op = |v: &StateVector| apply(spec, field, v);
    lanczos::extreme_eigs_op(&op, spec.n(), k, tol)
}

/// Finite-size SCGF of the tilted jump generator on the flat state.
pub fn scgf_finite(
    field: &RemField,
    t: f64,
    lambda: f64,
    s: f64,
    method: Method,
) -> Result<ScgfRecord> {
    if t <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "t",
            requirement: "> 0",
            value: t,
        });
    }
    let n = field.n();
    let spec = GeneratorSpec::tilted_markov(n, lambda, s);
    let nt = n as f64 * t;

    let (ln_z, krylov_dim, substeps, residual_estimate) = match method {
        Method::Krylov => {
            let v = flat_vector(n);
            let (w, report) = expm_action(&spec, field, t, &v, 1e-11)?;
            let ip = w.dot(&flat_vector(n));
            if !(ip > 0.0) {
                return Err(Error::Numeric(format!(
                    "flat inner product of the semigroup came out nonpositive ({ip})"
                )));
            }
            (
                w.log_scale + ip.ln(),
                report.krylov_dim,
                report.substeps,
                report.residual_estimate,
            )
        }
        Method::Dense => {
            let sp = DenseSpectrum::compute(&spec, field)?;
            (sp.ln_flat_expm_flat(t), 0, 0, 0.0)
        }
    };

    Ok(ScgfRecord {
        n,
        t,
        lambda,
        s,
        seed: field.seed(),
        theta_n: ln_z / nt,
        theta_limit: analytic::scgf_limit(t, lambda, s)?,
        method,
        krylov_dim,
        substeps,
        residual_estimate,
    })
}

/// Both exact finite-size lower bounds on `ln Z` from the convexity
/// (Jensen) arguments: through the flat state,
/// `t n (e^{-s} - 1) + (t lambda / 2^n) sum_sigma U`, and through the
/// diagonal, `-t n + ln( 2^{-n} sum_sigma e^{t lambda U} )`.
pub fn jensen_lower_bounds(field: &RemField, t: f64, lambda: f64, s: f64) -> (f64, f64) {
    let n = field.n() as f64;
    let flat_route = t * n * ((-s).exp() - 1.0) + t * lambda * field.mean_energy();
    let diagonal_route = -t * n + n * field.empirical_pressure(t * lambda);
    (flat_route, diagonal_route)
}

/// Spectral weight and level statistics above an energy threshold.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralSummary {
    pub n: u32,
    pub gamma: f64,
    pub lambda: f64,
    pub seed: u64,
    /// Energy cut `delta * lambda * n`.
    pub threshold: f64,
    /// Eigenvalues above the cut, descending.
    pub eigenvalues_above: Vec<f64>,
    /// Squared flat overlaps, aligned with `eigenvalues_above`.
    pub flat_overlaps: Vec<f64>,
    /// Number of eigenvalues above the cut.
    pub trace_above: usize,
    /// `sup_j |E_j + lambda U(sigma_j)|` over levels above the cut, with the
    /// j-th largest eigenvalue paired against the j-th smallest landscape
    /// value.
    pub shift_sup: f64,
    /// Sum of all squared flat overlaps (completeness check; 1 up to
    /// eigensolver error).
    pub total_overlap: f64,
}

impl SpectralSummary {
    /// `<flat| Q |flat>`: total flat weight above the threshold.
    pub fn flat_weight_above(&self) -> f64 {
        self.flat_overlaps.iter().sum()
    }

    /// `-(1/n) ln <flat| Q |flat>`, the measured decay rate of the flat
    /// weight; infinite when the weight underflows to zero.
    pub fn flat_decay_rate(&self) -> f64 {
        -self.flat_weight_above().ln() / self.n as f64
    }
}

/// Landscape values sorted ascending, ties broken by configuration index.
fn sorted_classical_levels(field: &RemField) -> Vec<(f64, usize)> {
    let mut levels: Vec<(f64, usize)> = (0..field.dim()).map(|s| (field.energy(s), s)).collect();
    levels.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    levels
}

/// Dense spectral-projector statistics of `gamma T - lambda U` above the
/// cut `delta * lambda * n`.
pub fn projector_overlap(
    field: &RemField,
    gamma: f64,
    lambda: f64,
    delta: f64,
) -> Result<SpectralSummary> {
    let spec = GeneratorSpec::qrem(field.n(), gamma, lambda);
    let sp = DenseSpectrum::compute(&spec, field)?;
    summarize_above(field, gamma, lambda, delta, &sp)
}

/// As [`projector_overlap`] but reusing an existing decomposition; one
/// decomposition serves every threshold.
pub fn projector_overlap_from(
    field: &RemField,
    gamma: f64,
    lambda: f64,
    delta: f64,
    sp: &DenseSpectrum,
) -> Result<SpectralSummary> {
    summarize_above(field, gamma, lambda, delta, sp)
}

fn summarize_above(
    field: &RemField,
    gamma: f64,
    lambda: f64,
    delta: f64,
    sp: &DenseSpectrum,
) -> Result<SpectralSummary> {
    let n = field.n();
    let threshold = delta * lambda * n as f64;
    let dim = sp.dim();
    let count = sp
        .eigenvalues
        .iter()
        .rev()
        .take_while(|&&e| e > threshold)
        .count();

    let eigenvalues_above: Vec<f64> = (0..count)
        .map(|j| sp.eigenvalues[dim - 1 - j])
        .collect();
    let flat_overlaps: Vec<f64> = (0..count)
        .map(|j| sp.flat_overlaps[dim - 1 - j])
        .collect();

    let levels = sorted_classical_levels(field);
    let mut shift_sup = 0.0f64;
    for (j, e) in eigenvalues_above.iter().enumerate() {
        let u = levels[j].0;
        shift_sup = shift_sup.max((e + lambda * u).abs());
    }

    Ok(SpectralSummary {
        n,
        gamma,
        lambda,
        seed: field.seed(),
        threshold,
        eigenvalues_above,
        flat_overlaps,
        trace_above: count,
        shift_sup,
        total_overlap: sp.flat_overlaps.iter().sum(),
    })
}

/// Per-level spectral shifts against the paired classical levels.
#[derive(Debug, Clone, Serialize)]
pub struct ShiftReport {
    pub n: u32,
    pub gamma: f64,
    pub lambda: f64,
    pub delta: f64,
    pub seed: u64,
    /// `(eigenvalue, paired landscape value, |E + lambda U|)` per level
    /// above the cut, descending in the eigenvalue.
    pub per_level: Vec<(f64, f64, f64)>,
    pub shift_sup: f64,
    /// `shift_sup / sqrt(n)`.
    pub shift_sup_normalized: f64,
}

/// Shift statistic of the levels above `delta * lambda * n`, valid in the
/// localization regime `lambda * delta > gamma`.
pub fn shift_statistic(
    field: &RemField,
    gamma: f64,
    lambda: f64,
    delta: f64,
) -> Result<ShiftReport> {
    if lambda * delta <= gamma {
        return Err(Error::RegimeViolation(format!(
            "shift pairing requires lambda*delta > gamma, got {} <= {}",
            lambda * delta,
            gamma
        )));
    }
    let spec = GeneratorSpec::qrem(field.n(), gamma, lambda);
    let sp = DenseSpectrum::compute(&spec, field)?;
    shift_statistic_from(field, gamma, lambda, delta, &sp)
}

/// As [`shift_statistic`] but reusing an existing decomposition.
pub fn shift_statistic_from(
    field: &RemField,
    gamma: f64,
    lambda: f64,
    delta: f64,
    sp: &DenseSpectrum,
) -> Result<ShiftReport> {
    if lambda * delta <= gamma {
        return Err(Error::RegimeViolation(format!(
            "shift pairing requires lambda*delta > gamma, got {} <= {}",
            lambda * delta,
            gamma
        )));
    }
    let n = field.n();
    let threshold = delta * lambda * n as f64;
    let dim = sp.dim();
    let levels = sorted_classical_levels(field);
    let mut per_level = Vec::new();
    let mut shift_sup = 0.0f64;
    for j in 0..dim {
        let e = sp.eigenvalues[dim - 1 - j];
        if e <= threshold {
            break;
        }
        let u = levels[j].0;
        let shift = (e + lambda * u).abs();
        shift_sup = shift_sup.max(shift);
        per_level.push((e, u, shift));
    }
    Ok(ShiftReport {
        n,
        gamma,
        lambda,
        delta,
        seed: field.seed(),
        per_level,
        shift_sup,
        shift_sup_normalized: shift_sup / (n as f64).sqrt(),
    })
}

/// Boundary-vector check parameters.
#[derive(Debug, Clone, Copy)]
pub struct PhiCheckParams {
    pub gamma: f64,
    pub lambda: f64,
    pub delta: f64,
    pub eps: f64,
    /// Spectral parameter, required above the restricted operator's top
    /// eigenvalue (and normally above `lambda * delta * n`).
    pub e: f64,
    /// Highest derivative order checked.
    pub k_max: usize,
}

/// Per-configuration values of the boundary vector and its derivatives on
/// the exclusion set, against their uniform bounds.
#[derive(Debug, Clone, Serialize)]
pub struct PhiVectorReport {
    pub n: u32,
    pub gamma: f64,
    pub lambda: f64,
    pub delta: f64,
    pub eps: f64,
    /// Exclusion level `delta - eps`.
    pub eta: f64,
    pub e: f64,
    pub seed: u64,
    /// Size of the exclusion set; zero makes the check vacuous.
    pub set_size: usize,
    /// Top eigenvalue of the restricted operator.
    pub restricted_top: f64,
    /// Member configurations of the exclusion set.
    pub members: Vec<usize>,
    /// `values[k][i]` is the order-`k` vector at `members[i]`.
    pub values: Vec<Vec<f64>>,
    /// Uniform bound per order.
    pub bounds: Vec<f64>,
    /// Largest |value| per order.
    pub max_abs: Vec<f64>,
    /// Whether every order satisfied its bound.
    pub all_within: bool,
    pub vacuous: bool,
}

/// Evaluate the boundary vector `phi(E)` and its derivatives on the
/// exclusion set and compare against the uniform bounds
/// `1 + (2 gamma/(lambda delta - gamma)) (delta/eps)` at order zero and
/// `(gamma/n^k) (2/(lambda delta - gamma) * delta/eps)^{k+1}` at order `k`.
pub fn phi_vector_check(field: &RemField, params: PhiCheckParams) -> Result<PhiVectorReport> {
    let PhiCheckParams {
        gamma,
        lambda,
        delta,
        eps,
        e,
        k_max,
    } = params;
    if lambda * delta <= gamma {
        return Err(Error::RegimeViolation(format!(
            "boundary-vector bounds require lambda*delta > gamma, got {} <= {}",
            lambda * delta,
            gamma
        )));
    }
    if !(eps > 0.0 && eps < delta - gamma / lambda) {
        return Err(Error::RegimeViolation(format!(
            "eps must lie in (0, delta - gamma/lambda) = (0, {}), got {eps}",
            delta - gamma / lambda
        )));
    }
    let n = field.n();
    if n > DENSE_CAP {
        return Err(Error::DenseCapExceeded { n, cap: DENSE_CAP });
    }
    let eta = delta - eps;
    let spec = GeneratorSpec::qrem(n, gamma, lambda);
    let (restricted, coupling) = restrict_complement(&spec, field, eta)?;

    let c = 2.0 / (lambda * delta - gamma) * (delta / eps);
    let mut bounds = vec![1.0 + gamma * c];
    for k in 1..=k_max {
        bounds.push(gamma / (n as f64).powi(k as i32) * c.powi(k as i32 + 1));
    }

    let members: Vec<usize> = restricted.mask().unwrap().members().to_vec();
    if members.is_empty() {
        return Ok(PhiVectorReport {
            n,
            gamma,
            lambda,
            delta,
            eps,
            eta,
            e,
            seed: field.seed(),
            set_size: 0,
            restricted_top: f64::NEG_INFINITY,
            members,
            values: vec![Vec::new(); k_max + 1],
            max_abs: vec![0.0; k_max + 1],
            bounds,
            all_within: true,
            vacuous: true,
        });
    }

    let top = extreme_eigs(&restricted, field, 1, 1e-9)?.values[0];
    if e <= top + 1e-6 * n as f64 {
        return Err(Error::SpectrumProximity {
            e,
            top,
            margin: 1e-6 * n as f64,
        });
    }

    // rhs = projection of the flat vector onto the complement
    let mut rhs = flat_vector(n);
    for &m in &members {
        rhs.entries[m] = 0.0;
    }

    let sqrt_dim = (field.dim() as f64).sqrt();
    let mut values: Vec<Vec<f64>> = Vec::with_capacity(k_max + 1);
    let mut x = solve_resolvent(&restricted, field, e, &rhs, 1e-12)?;
    for k in 0..=k_max {
        let coupled = coupling.apply_adjoint(&x);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let base = if k == 0 { 1.0 } else { 0.0 };
        let row: Vec<f64> = members
            .iter()
            .map(|&m| base + sign * sqrt_dim * coupled.entries[m])
            .collect();
        values.push(row);
        if k < k_max {
            x = solve_resolvent(&restricted, field, e, &x, 1e-12)?;
        }
    }

    let max_abs: Vec<f64> = values
        .iter()
        .map(|row| row.iter().fold(0.0f64, |a, &v| a.max(v.abs())))
        .collect();
    let all_within = max_abs.iter().zip(&bounds).all(|(m, b)| m <= b);

    Ok(PhiVectorReport {
        n,
        gamma,
        lambda,
        delta,
        eps,
        eta,
        e,
        seed: field.seed(),
        set_size: members.len(),
        restricted_top: top,
        members,
        values,
        bounds,
        max_abs,
        all_within,
        vacuous: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn scgf_zero_coupling_is_exact() {
        let field = RemField::new(7, 8).unwrap();
        for s in [-0.5, 0.0, 0.8] {
            let rec = scgf_finite(&field, 1.2, 0.0, s, Method::Krylov).unwrap();
            let expected = (-s).exp() - 1.0;
            assert!(
                (rec.theta_n - expected).abs() < 1e-10,
                "s={s}: {} vs {expected}",
                rec.theta_n
            );
            assert_relative_eq!(rec.theta_limit, expected, max_relative = 1e-12);
        }
    }

    #[test]
    fn krylov_and_dense_scgf_agree() {
        let field = RemField::new(23, 8).unwrap();
        let k = scgf_finite(&field, 1.0, 1.0, 0.0, Method::Krylov).unwrap();
        let d = scgf_finite(&field, 1.0, 1.0, 0.0, Method::Dense).unwrap();
        assert!(
            (k.theta_n - d.theta_n).abs() < 1e-9,
            "krylov {} vs dense {}",
            k.theta_n,
            d.theta_n
        );
    }

    #[test]
    fn jensen_bounds_hold() {
        let field = RemField::new(41, 10).unwrap();
        for &(t, lambda, s) in &[(0.5, 0.7, 0.0), (1.0, 1.5, -0.3), (2.0, 0.3, 0.4)] {
            let rec = scgf_finite(&field, t, lambda, s, Method::Krylov).unwrap();
            let ln_z = rec.theta_n * 10.0 * t;
            let (lb1, lb2) = jensen_lower_bounds(&field, t, lambda, s);
            let slack = 1e-9 * 10.0 * t;
            assert!(ln_z >= lb1 - slack, "flat-route bound: {ln_z} < {lb1}");
            assert!(ln_z >= lb2 - slack, "diagonal-route bound: {ln_z} < {lb2}");
        }
    }

    #[test]
    fn ln_z_is_convex_in_lambda() {
        let field = RemField::new(55, 8).unwrap();
        let (t, s) = (0.8, 0.1);
        let h = 0.3;
        for &lambda in &[0.3, 0.9, 1.5] {
            let f = |l: f64| {
                scgf_finite(&field, t, l, s, Method::Dense).unwrap().theta_n * 8.0 * t
            };
            let mid = f(lambda);
            let avg = 0.5 * (f(lambda - h) + f(lambda + h));
            assert!(mid <= avg + 1e-9, "convexity at lambda={lambda}");
        }
    }

    #[test]
    fn projector_diagonal_control() {
        // zero hop amplitude: flat weight above the cut is exactly the
        // extreme-set volume fraction, and all shifts vanish
        let field = RemField::new(12, 10).unwrap();
        let delta = 0.5;
        let summary = projector_overlap(&field, 0.0, 1.0, delta).unwrap();
        let set = field.extreme_set_full(delta).unwrap();
        assert_eq!(summary.trace_above, set.count);
        assert_eq!(
            summary.flat_weight_above(),
            set.count as f64 / field.dim() as f64
        );
        assert_eq!(summary.shift_sup, 0.0);
    }

    #[test]
    fn projector_completeness_and_monotonicity() {
        let field = RemField::new(19, 8).unwrap();
        let spec = GeneratorSpec::qrem(8, 0.3, 1.0);
        let sp = DenseSpectrum::compute(&spec, &field).unwrap();
        // a cut below the whole spectrum collects weight one
        let low = projector_overlap_from(&field, 0.3, 1.0, -100.0, &sp).unwrap();
        assert!((low.flat_weight_above() - 1.0).abs() < 1e-10);
        assert!((low.total_overlap - 1.0).abs() < 1e-10);
        // flat weight decreases as the cut rises
        let mut last = f64::INFINITY;
        for i in 0..8 {
            let delta = -0.5 + 0.25 * i as f64;
            let s = projector_overlap_from(&field, 0.3, 1.0, delta, &sp).unwrap();
            let q = s.flat_weight_above();
            assert!((0.0..=1.0 + 1e-12).contains(&q));
            assert!(q <= last + 1e-12);
            assert_eq!(s.trace_above, s.eigenvalues_above.len());
            last = q;
        }
    }

    #[test]
    fn shift_statistic_regime_and_zero_hop() {
        let field = RemField::new(9, 8).unwrap();
        assert!(shift_statistic(&field, 0.9, 1.0, 0.5).is_err());
        let report = shift_statistic(&field, 0.0, 1.0, 0.6).unwrap();
        assert_eq!(report.shift_sup, 0.0);
    }

    #[test]
    fn shift_grows_with_hop_amplitude() {
        // median over seeds of the shift at doubled hop dominates the
        // smaller one; medians absorb level-crossing noise
        let mut small = Vec::new();
        let mut large = Vec::new();
        for seed in 0..10u64 {
            let field = RemField::new(seed, 8).unwrap();
            small.push(shift_statistic(&field, 0.1, 1.0, 0.6).unwrap().shift_sup);
            large.push(shift_statistic(&field, 0.2, 1.0, 0.6).unwrap().shift_sup);
        }
        small.sort_by(f64::total_cmp);
        large.sort_by(f64::total_cmp);
        assert!(
            large[5] >= small[5],
            "median shift did not grow: {} vs {}",
            large[5],
            small[5]
        );
    }

    #[test]
    fn phi_vector_zero_hop_is_one() {
        let field = RemField::new(33, 8).unwrap();
        let report = phi_vector_check(
            &field,
            PhiCheckParams {
                gamma: 0.0,
                lambda: 1.0,
                delta: 0.6,
                eps: 0.2,
                e: 0.7 * 8.0,
                k_max: 1,
            },
        )
        .unwrap();
        if report.vacuous {
            return;
        }
        for &v in &report.values[0] {
            assert!((v - 1.0).abs() < 1e-12, "phi = {v}");
        }
        for &v in &report.values[1] {
            assert!(v.abs() < 1e-12);
        }
        assert!(report.all_within);
    }

    #[test]
    fn phi_vector_rejects_bad_regimes() {
        let field = RemField::new(2, 8).unwrap();
        // lambda*delta <= gamma
        assert!(phi_vector_check(
            &field,
            PhiCheckParams {
                gamma: 0.9,
                lambda: 1.0,
                delta: 0.8,
                eps: 0.1,
                e: 10.0,
                k_max: 1
            }
        )
        .is_err());
        // eps outside (0, delta - gamma/lambda)
        assert!(phi_vector_check(
            &field,
            PhiCheckParams {
                gamma: 0.2,
                lambda: 1.0,
                delta: 0.8,
                eps: 0.7,
                e: 10.0,
                k_max: 1
            }
        )
        .is_err());
        // E below the restricted spectrum
        assert!(phi_vector_check(
            &field,
            PhiCheckParams {
                gamma: 0.2,
                lambda: 1.0,
                delta: 0.8,
                eps: 0.2,
                e: 0.1,
                k_max: 1
            }
        )
        .is_err());
    }

    #[test]
    fn phi_vector_bounds_hold_at_reference_point() {
        let field = RemField::new(0, 10).unwrap();
        let report = phi_vector_check(
            &field,
            PhiCheckParams {
                gamma: 0.2,
                lambda: 1.0,
                delta: 0.8,
                eps: 0.2,
                e: 1.05 * 0.8 * 10.0,
                k_max: 2,
            },
        )
        .unwrap();
        assert!(!report.vacuous, "exclusion set unexpectedly empty");
        assert!(
            report.all_within,
            "bounds violated: max_abs {:?} vs bounds {:?}",
            report.max_abs, report.bounds
        );
    }
}

//! Closed-form limit theory: landscape pressure, limiting trajectory SCGF,
//! rate function, dynamical phase diagram and the transverse-field pressure.
//!
//! Everything here is an exact function of its arguments; the only numerics
//! are a golden-section search for the rate function away from `s = 0` and
//! representation error in the critical constants.

use crate::error::{Error, Result};
use serde::Serialize;

/// Critical inverse temperature of the random-energy landscape,
/// `beta_c = sqrt(2 ln 2)`.
pub fn beta_c() -> f64 {
    (2.0 * std::f64::consts::LN_2).sqrt()
}

/// Derived critical constants of the phase diagram.
///
/// `lambda_one` is the coupling below which trajectories stay active at all
/// time extents; `lambda_two` carries the triple point, which sits at
/// `(lambda_two, t_triple)`. The transverse-field (static) diagram has its
/// own triple point at coupling `qrem_lambda_two` and temperature
/// `qrem_t_triple = arcosh(2)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Constants {
    pub beta_c: f64,
    /// Time extent of the dynamical triple point, `beta_c^2 / 2 = ln 2`.
    pub t_triple: f64,
    /// `1 / beta_c`.
    pub lambda_one: f64,
    /// `2 / beta_c`.
    pub lambda_two: f64,
    /// `beta_c / arcosh(2)`.
    pub qrem_lambda_two: f64,
    /// `arcosh(2) = ln(2 + sqrt(3))`.
    pub qrem_t_triple: f64,
}

impl Constants {
    pub fn new() -> Self {
        let bc = beta_c();
        let arcosh2 = (2.0 + 3.0f64.sqrt()).ln();
        Self {
            beta_c: bc,
            t_triple: bc * bc / 2.0,
            lambda_one: 1.0 / bc,
            lambda_two: 2.0 / bc,
            qrem_lambda_two: bc / arcosh2,
            qrem_t_triple: arcosh2,
        }
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::new()
    }
}

/// Limiting pressure of the random-energy landscape at inverse temperature
/// `beta`: `beta^2/2` below `beta_c`, frozen branch `|beta| beta_c - ln 2`
/// above. Even in `beta`; continuous and once differentiable at `beta_c`.
pub fn rem_pressure(beta: f64) -> f64 {
    let b = beta.abs();
    let bc = beta_c();
    if b <= bc {
        b * b / 2.0
    } else {
        b * bc - std::f64::consts::LN_2
    }
}

/// Limiting scaled cumulant generating function of the time-integrated
/// landscape energy: `max{ e^{-s}, p(t*lambda)/t } - 1`.
pub fn scgf_limit(t: f64, lambda: f64, s: f64) -> Result<f64> {
    require_positive_time(t)?;
    Ok((-s).exp().max(rem_pressure(t * lambda) / t) - 1.0)
}

/// A rate-function value; deviations beyond the landscape's extreme scale
/// carry the dedicated infinite marker rather than a floating sentinel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Rate {
    Finite(f64),
    Infinite,
}

impl Rate {
    pub fn is_finite(&self) -> bool {
        matches!(self, Rate::Finite(_))
    }

    /// The finite value, panicking on the infinite marker.
    pub fn value(&self) -> f64 {
        match self {
            Rate::Finite(v) => *v,
            Rate::Infinite => panic!("rate function is infinite here"),
        }
    }
}

/// Large-deviation rate function of the time-averaged landscape energy.
///
/// At `s = 0` the closed form is used:
/// `|u| sqrt(2/t)` for `|u| <= min{sqrt(2t), beta_c}`, then `1 + u^2/(2t)`
/// up to `|u| = beta_c`, infinite beyond. For `s != 0` the
/// Legendre-Fenchel supremum over the tilt is maximized numerically; the
/// objective is concave because the SCGF is convex in the tilt.
///
/// The closed form coincides with the direct transform
/// ([`rate_function_via_transform`]) exactly on `t <= t_triple = ln 2`. For
/// longer time extents the transform's supremum sits at the frozen-branch
/// active boundary `lambda = beta_c/(2t) + 1/beta_c`, so the transform is
/// linear with that slope on `|u| < beta_c` rather than `sqrt(2/t)`.
pub fn rate_function(t: f64, u: f64, s: f64) -> Result<Rate> {
    require_positive_time(t)?;
    let ua = u.abs();
    if ua > beta_c() {
        return Ok(Rate::Infinite);
    }
    if s == 0.0 {
        let knee = (2.0 * t).sqrt();
        if ua <= knee.min(beta_c()) {
            Ok(Rate::Finite(ua * (2.0 / t).sqrt()))
        } else {
            Ok(Rate::Finite(1.0 + ua * ua / (2.0 * t)))
        }
    } else {
        rate_function_via_transform(t, u, s)
    }
}

/// Rate function by direct numerical Legendre-Fenchel transform of the
/// SCGF, at any tilt including `s = 0`. This is the independent route the
/// closed form is checked against.
pub fn rate_function_via_transform(t: f64, u: f64, s: f64) -> Result<Rate> {
    require_positive_time(t)?;
    let bc = beta_c();
    let ua = u.abs();
    if ua > bc {
        return Ok(Rate::Infinite);
    }
    let lambda_max = 10.0f64.max(2.0 * ua / t.min(1.0) * bc);
    let objective = |lambda: f64| ua * lambda - scgf_limit(t, lambda, s).expect("t > 0");
    Ok(Rate::Finite(golden_section_max(
        objective, 0.0, lambda_max, 1e-10,
    )))
}

/// Maximize a unimodal (concave) function on [a, b] by golden-section search.
fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let m = 0.5 * (a + b);
    f(m).max(f1).max(f2)
}

/// Dynamical phase of a parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhaseLabel {
    /// Jump term dominates; SCGF vanishes and the specific activity is one.
    Active,
    /// Frozen landscape branch dominates; vanishing activity.
    InactiveGlass,
    /// Quadratic landscape branch dominates; vanishing activity.
    InactiveParamagnetic,
    Boundary(BoundaryDetail),
}

/// Which transition line a boundary point sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryDetail {
    ActiveGlass,
    ActivePara,
    GlassPara,
    Triple,
}

/// Specific activity in the limit: a point value inside a phase, the full
/// subdifferential interval on a first-order line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Activity {
    Point(f64),
    Interval { lo: f64, hi: f64 },
}

/// One classified point of the dynamical phase diagram at `s = 0`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhasePoint {
    pub t: f64,
    pub lambda: f64,
    pub s: f64,
    pub theta: f64,
    pub activity: Activity,
    pub label: PhaseLabel,
}

/// Relative tolerance used by phase classification when none is supplied.
pub const DEFAULT_PHASE_TOL: f64 = 1e-9;

/// Classify a `(t, lambda)` point of the `s = 0` phase diagram.
///
/// With `a = p(t*lambda)/t`: the point is active when `a < 1`, inactive when
/// `a > 1`, and on the first-order line when `a = 1` (within `tol`). Inside
/// the inactive region the two phases are separated by the branch switch of
/// the pressure at `t*lambda = beta_c`, i.e. the line `t^{-1} = lambda/beta_c`;
/// for `lambda <= 2/beta_c` this locus coincides with the glass condition
/// `t^{-1} < 2 lambda/beta_c - 2/beta_c^2`. Both descriptions pass through
/// the triple point `(t, lambda) = (ln 2, 2/beta_c)`.
pub fn classify_phase(t: f64, lambda: f64, tol: f64) -> Result<PhasePoint> {
    require_positive_time(t)?;
    require_nonnegative("lambda", lambda)?;
    if tol <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "tol",
            requirement: "> 0",
            value: tol,
        });
    }
    let bc = beta_c();
    let a = rem_pressure(t * lambda) / t;
    let theta_active = 0.0;
    let theta_inactive = a - 1.0;

    let point = |theta: f64, activity: Activity, label: PhaseLabel| PhasePoint {
        t,
        lambda,
        s: 0.0,
        theta,
        activity,
        label,
    };

    if a < 1.0 - tol {
        return Ok(point(theta_active, Activity::Point(1.0), PhaseLabel::Active));
    }
    if a > 1.0 + tol {
        let label = if t * lambda > bc * (1.0 + tol) {
            PhaseLabel::InactiveGlass
        } else if t * lambda < bc * (1.0 - tol) {
            PhaseLabel::InactiveParamagnetic
        } else {
            PhaseLabel::Boundary(BoundaryDetail::GlassPara)
        };
        return Ok(point(theta_inactive, Activity::Point(0.0), label));
    }
    // |a - 1| <= tol: on the first-order line. The branch of the pressure at
    // t*lambda tells the inactive side; the branch switch itself is the
    // triple point.
    let detail = if (t * lambda - bc).abs() <= tol * bc {
        BoundaryDetail::Triple
    } else if t * lambda > bc {
        BoundaryDetail::ActiveGlass
    } else {
        BoundaryDetail::ActivePara
    };
    Ok(point(
        theta_active,
        Activity::Interval { lo: 0.0, hi: 1.0 },
        PhaseLabel::Boundary(detail),
    ))
}

/// One critical inverse time on a transition line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryCrossing {
    /// Critical inverse time extent `1/t`.
    pub t_inv: f64,
    pub detail: BoundaryDetail,
}

/// All phase-transition crossings met when varying the time extent at fixed
/// coupling, reported as critical inverse times in increasing order.
///
/// Below `lambda_one = 1/beta_c` there is no transition at any positive
/// time. Between `lambda_one` and `lambda_two = 2/beta_c` the single
/// active/glass crossing sits at `t^{-1} = 2 lambda/beta_c - 2/beta_c^2`
/// (frozen branch root of `a = 1`). At `lambda_two` the two active-boundary
/// expressions meet the branch-switch line in the triple point
/// `t^{-1} = 2/beta_c^2 = 1/ln 2`. Above, the glass/para line
/// `t^{-1} = lambda/beta_c` and the active/para line `t^{-1} = lambda^2/2`
/// (quadratic branch root) are both crossed.
pub fn boundary_curves(lambda: f64) -> Result<Vec<BoundaryCrossing>> {
    require_nonnegative("lambda", lambda)?;
    let bc = beta_c();
    let lambda_one = 1.0 / bc;
    let lambda_two = 2.0 / bc;
    // Exact coincidence tolerance: the three lines intersect at lambda_two
    // only up to representation error.
    let eps = 1e-12 * (1.0 + lambda);

    if lambda <= lambda_one + eps {
        return Ok(Vec::new());
    }
    if (lambda - lambda_two).abs() <= eps {
        return Ok(vec![BoundaryCrossing {
            t_inv: 2.0 / (bc * bc),
            detail: BoundaryDetail::Triple,
        }]);
    }
    if lambda < lambda_two {
        return Ok(vec![BoundaryCrossing {
            t_inv: 2.0 * lambda / bc - 2.0 / (bc * bc),
            detail: BoundaryDetail::ActiveGlass,
        }]);
    }
    Ok(vec![
        BoundaryCrossing {
            t_inv: lambda / bc,
            detail: BoundaryDetail::GlassPara,
        },
        BoundaryCrossing {
            t_inv: lambda * lambda / 2.0,
            detail: BoundaryDetail::ActivePara,
        },
    ])
}

/// Limiting specific activity at `(t, lambda)`, `s = 0`: one in the active
/// phase, zero in either inactive phase, the full interval [0, 1] on the
/// first-order active boundary.
pub fn activity_limit(t: f64, lambda: f64) -> Result<Activity> {
    let point = classify_phase(t, lambda, DEFAULT_PHASE_TOL)?;
    Ok(point.activity)
}

/// Limiting pressure of the transverse-field model,
/// `max{ ln cosh(beta e^{-s}), p(beta*lambda) }`.
pub fn qrem_pressure(beta: f64, lambda: f64, s: f64) -> f64 {
    ln_cosh(beta * (-s).exp()).max(rem_pressure(beta * lambda))
}

/// Overflow-safe `ln cosh x`.
fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

fn require_positive_time(t: f64) -> Result<()> {
    if t > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "t",
            requirement: "> 0",
            value: t,
        })
    }
}

fn require_nonnegative(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            requirement: ">= 0",
            value: v,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn critical_constants() {
        let c = Constants::new();
        assert!((c.beta_c * c.beta_c - 2.0 * std::f64::consts::LN_2).abs() < 1e-15);
        assert!((c.t_triple - std::f64::consts::LN_2).abs() < 1e-15);
        assert_relative_eq!(c.lambda_two, 1.6986436005760381, max_relative = 1e-12);
        assert_relative_eq!(c.qrem_t_triple, 1.3169578969248166, max_relative = 1e-12);
    }

    #[test]
    fn pressure_values() {
        assert_eq!(rem_pressure(0.0), 0.0);
        assert_relative_eq!(
            rem_pressure(beta_c()),
            std::f64::consts::LN_2,
            max_relative = 1e-14
        );
        // frozen branch, hand evaluation with beta_c = 1.1774100225154747
        assert_relative_eq!(rem_pressure(2.0), 1.6616728644710041, max_relative = 1e-12);
        // even
        assert_eq!(rem_pressure(-2.0), rem_pressure(2.0));
    }

    #[test]
    fn pressure_is_continuous_and_differentiable_at_critical_point() {
        let bc = beta_c();
        let h = 1e-7;
        let below = rem_pressure(bc - h);
        let above = rem_pressure(bc + h);
        assert!((above - below).abs() < 3.0 * h);
        // one-sided slopes both approach beta_c
        let slope_below = (rem_pressure(bc) - rem_pressure(bc - h)) / h;
        let slope_above = (rem_pressure(bc + h) - rem_pressure(bc)) / h;
        assert!((slope_below - bc).abs() < 1e-6);
        assert!((slope_above - bc).abs() < 1e-6);
    }

    #[test]
    fn scgf_limit_examples() {
        assert_eq!(scgf_limit(1.0, 0.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            scgf_limit(1.0, 2.0, 0.0).unwrap(),
            0.6616728644710041,
            max_relative = 1e-12
        );
        // p(0.5)/0.5 = 0.25 < 1: active branch
        assert_eq!(scgf_limit(0.5, 1.0, 0.0).unwrap(), 0.0);
        assert!(scgf_limit(0.0, 1.0, 0.0).is_err());
        assert!(scgf_limit(-1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn rate_function_closed_form() {
        assert_eq!(rate_function(1.0, 0.0, 0.0).unwrap(), Rate::Finite(0.0));
        assert_relative_eq!(
            rate_function(1.0, 1.0, 0.0).unwrap().value(),
            std::f64::consts::SQRT_2,
            max_relative = 1e-12
        );
        // sqrt(2t) = 0.7071 < 1 <= beta_c: parabolic branch
        assert_relative_eq!(
            rate_function(0.25, 1.0, 0.0).unwrap().value(),
            3.0,
            max_relative = 1e-12
        );
        assert_eq!(rate_function(1.0, 1.3, 0.0).unwrap(), Rate::Infinite);
        assert!(rate_function(0.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn rate_function_is_even() {
        for &t in &[0.2, 0.7, 1.0, 2.5] {
            for &u in &[0.0, 0.3, 0.9, 1.1] {
                assert_eq!(
                    rate_function(t, u, 0.0).unwrap(),
                    rate_function(t, -u, 0.0).unwrap()
                );
            }
        }
    }

    #[test]
    fn numeric_transform_matches_closed_form_on_validity_domain() {
        // the closed form and the transform agree exactly for t <= ln 2
        for &t in &[0.1, 0.3, 0.5, std::f64::consts::LN_2] {
            for &u in &[0.1, 0.5, 0.9, 1.1] {
                if u >= beta_c() {
                    continue;
                }
                let closed = rate_function(t, u, 0.0).unwrap().value();
                let numeric = rate_function_via_transform(t, u, 0.0).unwrap().value();
                assert!(
                    (closed - numeric).abs() < 1e-6,
                    "t={t} u={u}: closed {closed} vs numeric {numeric}"
                );
            }
        }
    }

    #[test]
    fn transform_sits_at_frozen_kink_beyond_t_triple() {
        // for t > ln 2 the supremum lands on the frozen-branch active
        // boundary, so the transform is linear with slope
        // beta_c/(2t) + 1/beta_c
        let bc = beta_c();
        for &t in &[1.0, 2.0, 3.0] {
            let slope = bc / (2.0 * t) + 1.0 / bc;
            for &u in &[0.2, 0.6, 1.0] {
                let numeric = rate_function_via_transform(t, u, 0.0).unwrap().value();
                assert!(
                    (numeric - u * slope).abs() < 1e-6,
                    "t={t} u={u}: numeric {numeric} vs {}",
                    u * slope
                );
            }
        }
    }

    #[test]
    fn phase_classification_examples() {
        let tol = 1e-9;
        assert_eq!(
            classify_phase(1.0, 1.0, tol).unwrap().label,
            PhaseLabel::Active
        );
        assert_eq!(
            classify_phase(2.0, 2.0, tol).unwrap().label,
            PhaseLabel::InactiveGlass
        );
        assert_eq!(
            classify_phase(0.2, 5.0, tol).unwrap().label,
            PhaseLabel::InactiveParamagnetic
        );
        let c = Constants::new();
        let triple = classify_phase(c.t_triple, c.lambda_two, tol).unwrap();
        assert_eq!(
            triple.label,
            PhaseLabel::Boundary(BoundaryDetail::Triple)
        );
        assert_eq!(triple.activity, Activity::Interval { lo: 0.0, hi: 1.0 });
    }

    #[test]
    fn phase_point_invariants() {
        // theta >= e^{-s} - 1 (= 0 at s = 0), with equality exactly on Active.
        for &(t, lambda) in &[(1.0, 1.0), (2.0, 2.0), (0.2, 5.0), (0.5, 0.3)] {
            let p = classify_phase(t, lambda, 1e-9).unwrap();
            assert!(p.theta >= -1e-15);
            if p.label == PhaseLabel::Active {
                assert_eq!(p.theta, 0.0);
            }
        }
    }

    #[test]
    fn boundary_curve_structure() {
        let c = Constants::new();
        assert!(boundary_curves(0.5).unwrap().is_empty());
        assert!(boundary_curves(c.lambda_one).unwrap().is_empty());

        let mid = boundary_curves(1.2).unwrap();
        assert_eq!(mid.len(), 1);
        assert_eq!(mid[0].detail, BoundaryDetail::ActiveGlass);
        assert_relative_eq!(
            mid[0].t_inv,
            2.0 * 1.2 / c.beta_c - 2.0 / (c.beta_c * c.beta_c),
            max_relative = 1e-14
        );

        let triple = boundary_curves(c.lambda_two).unwrap();
        assert_eq!(triple.len(), 1);
        assert_eq!(triple[0].detail, BoundaryDetail::Triple);
        assert!((triple[0].t_inv - 1.0 / std::f64::consts::LN_2).abs() < 1e-12);

        let high = boundary_curves(5.0).unwrap();
        assert_eq!(high.len(), 2);
        assert_eq!(high[0].detail, BoundaryDetail::GlassPara);
        assert_relative_eq!(high[0].t_inv, 5.0 / c.beta_c, max_relative = 1e-14);
        assert_eq!(high[1].detail, BoundaryDetail::ActivePara);
        assert_relative_eq!(high[1].t_inv, 12.5, max_relative = 1e-14);

        assert!(boundary_curves(-1.0).is_err());
    }

    #[test]
    fn boundary_points_classify_as_boundaries() {
        // Each reported crossing, evaluated back through the classifier,
        // lands on the matching line.
        for &lambda in &[1.3, 1.5, 2.5, 5.0] {
            for crossing in boundary_curves(lambda).unwrap() {
                let p = classify_phase(1.0 / crossing.t_inv, lambda, 1e-9).unwrap();
                match p.label {
                    PhaseLabel::Boundary(detail) => assert_eq!(detail, crossing.detail),
                    other => panic!("expected boundary at lambda={lambda}, got {other:?}"),
                }
            }
        }
    }

    #[test]
    fn activity_values() {
        assert_eq!(activity_limit(1.0, 0.5).unwrap(), Activity::Point(1.0));
        assert_eq!(activity_limit(2.0, 2.0).unwrap(), Activity::Point(0.0));
        let c = Constants::new();
        assert_eq!(
            activity_limit(c.t_triple, c.lambda_two).unwrap(),
            Activity::Interval { lo: 0.0, hi: 1.0 }
        );
    }

    #[test]
    fn qrem_pressure_values() {
        assert_eq!(qrem_pressure(0.0, 3.0, 0.4), 0.0);
        assert_relative_eq!(
            qrem_pressure(1.0, 0.0, 0.0),
            0.4337808304830272,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            qrem_pressure(1.0, 2.0, 0.0),
            1.6616728644710041,
            max_relative = 1e-12
        );
        // ln cosh is overflow-safe
        assert!(qrem_pressure(800.0, 0.0, 0.0).is_finite());
    }

    #[test]
    fn pressure_is_convex_on_grid() {
        let betas: Vec<f64> = (0..200).map(|i| i as f64 * 0.02).collect();
        for w in betas.windows(3) {
            let (b0, b1, b2) = (w[0], w[1], w[2]);
            let lhs = rem_pressure(b1);
            let rhs = 0.5 * (rem_pressure(b0) + rem_pressure(b2));
            assert!(lhs <= rhs + 1e-12, "convexity fails at {b1}");
        }
    }

    #[test]
    fn scgf_monotone_in_s_and_convex_in_lambda() {
        for &t in &[0.3, 1.0, 2.0] {
            for &lambda in &[0.0, 0.8, 1.7, 3.0] {
                let mut last = f64::INFINITY;
                for i in 0..10 {
                    let s = -1.0 + 0.25 * i as f64;
                    let th = scgf_limit(t, lambda, s).unwrap();
                    assert!(th <= last + 1e-12, "not nonincreasing in s");
                    last = th;
                }
            }
            let grid: Vec<f64> = (0..60).map(|i| i as f64 * 0.05).collect();
            for w in grid.windows(3) {
                let f0 = scgf_limit(t, w[0], 0.2).unwrap();
                let f1 = scgf_limit(t, w[1], 0.2).unwrap();
                let f2 = scgf_limit(t, w[2], 0.2).unwrap();
                assert!(f1 <= 0.5 * (f0 + f2) + 1e-12, "not convex in lambda");
            }
        }
    }

    #[test]
    fn active_phase_iff_vanishing_scgf() {
        for i in 1..20 {
            for j in 0..20 {
                let t = 0.15 * i as f64;
                let lambda = 0.2 * j as f64;
                let p = classify_phase(t, lambda, 1e-9).unwrap();
                let th = scgf_limit(t, lambda, 0.0).unwrap();
                match p.label {
                    PhaseLabel::Active => assert!(th.abs() <= 1e-9),
                    PhaseLabel::Boundary(_) => assert!(th.abs() <= 1e-8),
                    _ => assert!(th > 1e-9),
                }
            }
        }
    }
}

//! Acceptance suite: every validation criterion at full scale, one test
//! per criterion, each printing its pass/fail line (visible with
//! `cargo test --test acceptance -- --nocapture`).

use remwalk::validation::{run_criterion, Scale};

fn check(id: usize) {
    let result = run_criterion(id, Scale::Full);
    println!("{}", result.status_line());
    println!("    {}", result.details);
    for w in &result.warnings {
        println!("    warning: {w}");
    }
    assert!(
        result.passed,
        "criterion {id} ({}) failed: {}",
        result.name, result.details
    );
}

#[test]
fn criterion_01_closed_form_constants() {
    check(1);
}

#[test]
fn criterion_02_legendre_consistency() {
    check(2);
}

#[test]
fn criterion_03_semigroup_oracle_equivalence() {
    check(3);
}

#[test]
fn criterion_04_jensen_lower_bounds() {
    check(4);
}

#[test]
fn criterion_05_scgf_convergence_trend() {
    check(5);
}

#[test]
fn criterion_06_feynman_kac_mc_identity() {
    check(6);
}

#[test]
fn criterion_07_resolvent_l1_bound() {
    check(7);
}

#[test]
fn criterion_08_projector_statistics() {
    check(8);
}

#[test]
fn criterion_09_boundary_vector_bounds() {
    check(9);
}

#[test]
fn criterion_10_activity_estimates() {
    check(10);
}

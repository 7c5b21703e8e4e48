//! One test per acceptance criterion. Each prints a PASS/FAIL line with the
//! measured values before asserting.

use mwave::acceptance::{self, CriterionResult};

fn check(result: CriterionResult) {
    println!("{result}");
    assert!(result.passed, "{result}");
}

#[test]
fn criterion_01_torus_diagonal_table() {
    check(acceptance::criterion_01_torus_table());
}

#[test]
fn criterion_02_theta_duality() {
    check(acceptance::criterion_02_theta_duality());
}

#[test]
fn criterion_03_sphere_approximation_errors() {
    check(acceptance::criterion_03_sphere_approximations());
}

#[test]
fn criterion_04_heat_trace_asymptotics() {
    check(acceptance::criterion_04_heat_trace());
}

#[test]
fn criterion_05_calderon_constants() {
    check(acceptance::criterion_05_calderon_constants());
}

#[test]
fn criterion_06_spectral_calderon_identity() {
    check(acceptance::criterion_06_spectral_identity());
}

#[test]
fn criterion_07_predicted_vs_measured_reconstruction() {
    check(acceptance::criterion_07_reconstruction());
}

#[test]
fn criterion_08_holder_estimation() {
    check(acceptance::criterion_08_holder());
}

#[test]
fn criterion_09_localization_boundedness() {
    check(acceptance::criterion_09_localization());
}

#[test]
fn criterion_10_gegenbauer_correctness() {
    check(acceptance::criterion_10_gegenbauer());
}

#[test]
fn criterion_11_pole_derivative_triangle() {
    check(acceptance::criterion_11_pole_triangle());
}

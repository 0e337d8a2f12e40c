//! The acceptance suite: one test per criterion, each printing a pass/fail
//! line (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Criterion 10 is expected to fail: its named ring F_2[u]/(u^3+u) does not
//! have an injective Frobenius (u^3+u = u(u+1)^2 over F_2), so the kernel
//! equality (valid only for an injective Frobenius) provably fails for it. The suite
//! computes both sides exactly and reports the honest comparison rather than
//! weakening the check.

use wittlab::verify;

const SEED: u64 = 0xC0FFEE;

fn check(report: verify::CriterionReport) {
    println!(
        "criterion {:>2} [{}] {:>7.2}s {} - {}",
        report.id,
        if report.passed { "PASS" } else { "FAIL" },
        report.seconds,
        report.name,
        report.detail
    );
    assert!(
        report.passed,
        "criterion {} failed: {}",
        report.id, report.detail
    );
}

#[test]
fn criterion_01_universal_tables_and_ring_laws() {
    check(verify::criterion_1(SEED));
}

#[test]
fn criterion_02_ghost_homomorphism_and_bijectivity() {
    check(verify::criterion_2(SEED));
}

#[test]
fn criterion_03_cross_model_series_vs_tables() {
    check(verify::criterion_3(SEED));
}

#[test]
fn criterion_04_operator_relations_and_form_calculus() {
    check(verify::criterion_4(SEED));
}

#[test]
fn criterion_05_delta_p() {
    check(verify::criterion_5(SEED));
}

#[test]
fn criterion_06_artin_hasse_idempotents() {
    check(verify::criterion_6(SEED));
}

#[test]
fn criterion_07_dwork_and_cartier_dieudonne() {
    check(verify::criterion_7(SEED));
}

#[test]
fn criterion_08_fp_algebra_laws() {
    check(verify::criterion_8(SEED));
}

#[test]
fn criterion_09_perfect_case_isomorphisms() {
    check(verify::criterion_9(SEED));
}

#[test]
fn criterion_10_non_perfect_kernel_and_derivation_laws() {
    // Expected to fail; see the module docs and docs/decisions in the README.
    check(verify::criterion_10(SEED));
}

#[test]
fn criterion_11_appendix_factorization() {
    check(verify::criterion_11(SEED));
}

#[test]
fn criterion_12_expression_round_trip() {
    check(verify::criterion_12(SEED));
}

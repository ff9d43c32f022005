//! Acceptance suite: every headline claim, one test per criterion, each
//! printing its verdict line (run with `--nocapture` to see them).

use polyatlas::suite::{self, CriterionResult};

fn check(result: CriterionResult) {
    println!("{}", suite::render_line(&result));
    assert!(
        result.passed,
        "criterion {} failed: {}",
        result.id, result.detail
    );
}

#[test]
fn acceptance_01_singularity_census() {
    check(suite::criterion_1_census());
}

#[test]
fn acceptance_02_local_indices() {
    check(suite::criterion_2_indices());
}

#[test]
fn acceptance_03_dominant_balance() {
    check(suite::criterion_3_balances());
}

#[test]
fn acceptance_04_resolution_conditions() {
    check(suite::criterion_4_conditions());
}

#[test]
fn acceptance_05_parameter_families() {
    check(suite::criterion_5_families(suite::DEFAULT_SEED));
}

#[test]
fn acceptance_06_first_integrals() {
    check(suite::criterion_6_integrals());
}

#[test]
fn acceptance_07_reduction_identities() {
    check(suite::criterion_7_reductions());
}

#[test]
fn acceptance_08_atlases() {
    check(suite::criterion_8_atlases(suite::DEFAULT_SEED));
}

#[test]
fn acceptance_09_uniqueness() {
    check(suite::criterion_9_uniqueness(suite::DEFAULT_SEED));
}

#[test]
fn acceptance_10_numeric_cross_checks() {
    check(suite::criterion_10_numeric());
}

#[test]
fn acceptance_11_parser_roundtrips() {
    check(suite::criterion_11_parser(suite::DEFAULT_SEED));
}

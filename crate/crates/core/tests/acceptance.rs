//! Full-scale run of the verification suite, one test per check. Every
//! assertion is an exact integer equality; random instances use fixed
//! seeds so failures reproduce.

use fptrace_core::selftest::{
    check_base_change, check_certificates, check_circle_reidemeister, check_hopf_consistency,
    check_linearity, check_reidemeister_additivity, check_simplicial_additivity,
    check_trace_identities, check_weight_vectors, CheckOutcome,
};

fn assert_passed(c: CheckOutcome) {
    let verdict = if c.passed { "pass" } else { "FAIL" };
    println!("{}: {} ({})", verdict, c.name, c.details);
    assert!(c.passed, "{}: {}", c.name, c.details);
}

#[test]
fn weight_coefficient_vectors() {
    assert_passed(check_weight_vectors().unwrap());
}

#[test]
fn lefschetz_additivity_on_subcomplex_pairs() {
    assert_passed(check_simplicial_additivity(0x5eed_0002, 1000).unwrap());
}

#[test]
fn weighted_colimit_trace_linearity() {
    assert_passed(check_linearity(0x5eed_0003, 500).unwrap());
}

#[test]
fn duality_certificate_verification() {
    assert_passed(check_certificates().unwrap());
}

#[test]
fn circle_reidemeister_traces() {
    assert_passed(check_circle_reidemeister().unwrap());
}

#[test]
fn reidemeister_additivity() {
    assert_passed(check_reidemeister_additivity(0x5eed_0006, 200).unwrap());
}

#[test]
fn trace_identities_and_shadow_cyclicity() {
    assert_passed(check_trace_identities(0x5eed_0007, 500, 500, 100).unwrap());
}

#[test]
fn base_change_strict_duality() {
    assert_passed(check_base_change().unwrap());
}

#[test]
fn chain_versus_homology_traces() {
    assert_passed(check_hopf_consistency().unwrap());
}

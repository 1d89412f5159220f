mod common;

use common::oracle::{check_all, fixture};

#[test]
fn every_test_matches_reference_values() {
    let fx = fixture();
    let mut failed = Vec::new();
    for check in check_all(&fx) {
        eprintln!("{:<26} cases={} max_err={:.3e}", check.name, check.cases, check.max_error);
        if !check.passed() {
            failed.push(check.name);
        }
    }
    assert!(failed.is_empty(), "oracle mismatches: {failed:?}");
}

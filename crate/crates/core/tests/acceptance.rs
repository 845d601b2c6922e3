//! The acceptance gate: every criterion runs at its stated tolerance and
//! prints one pass/fail line.

use skdv::acceptance::run_all;

#[test]
fn acceptance_suite() {
    let results = run_all(|r| println!("{}", r.line()));
    let failures: Vec<String> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.line())
        .collect();
    assert!(
        failures.is_empty(),
        "{} criterion(s) failed:\n{}",
        failures.len(),
        failures.join("\n")
    );
}

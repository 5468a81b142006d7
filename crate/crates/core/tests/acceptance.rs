//! One PASS/FAIL line per acceptance criterion. Run with `--nocapture` to see
//! every measured value.

use sswm::validate::{run_criterion, ValidationOptions, CRITERIA};

#[test]
fn acceptance() {
    let opts = ValidationOptions::default();
    let mut failed = Vec::new();
    for (n, _) in CRITERIA {
        let r = run_criterion(n, &opts);
        println!("{}", r.status_line());
        for c in r.checks.iter().filter(|c| !c.passed) {
            println!("    {c}");
        }
        if !r.passed() {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "criteria failing: {failed:?}");
}

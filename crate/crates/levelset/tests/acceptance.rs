//! Release gate: run every acceptance criterion, print one line per
//! criterion, and fail if any of them fails.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use levelset::acceptance::run_all;

#[test]
fn acceptance_suite() {
    let outcomes = run_all();
    let mut all_pass = true;
    for o in &outcomes {
        println!(
            "criterion {:2} ({}): {} [{:.1}s] {}",
            o.index,
            o.name,
            if o.pass { "PASS" } else { "FAIL" },
            o.seconds,
            o.detail
        );
        all_pass &= o.pass;
    }
    assert!(all_pass, "acceptance criteria failed: see the lines above");
}

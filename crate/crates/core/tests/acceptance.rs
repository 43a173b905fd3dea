use std::io::Write;

use layerlab::experiments::selftest;

#[test]
fn acceptance_criteria() {
    let outcomes = selftest(None);
    let mut out = std::io::stdout().lock();
    for o in &outcomes {
        writeln!(out, "{}", o.line()).unwrap();
    }
    assert_eq!(outcomes.len(), 12);
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}

use std::io::Write;

use richardson_sl::verify::{run_criterion, CRITERIA};

#[test]
fn acceptance() {
    // Written to the handle directly so the report survives output capture.
    let mut out = std::io::stdout();
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let r = run_criterion(id);
        writeln!(out, "{r}").unwrap();
        if !r.pass {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

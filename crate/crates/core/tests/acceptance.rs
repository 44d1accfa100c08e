//! Acceptance run: every numbered criterion at full size, one PASS/FAIL line each.

use std::process::ExitCode;
use std::time::Instant;

use qtraj::validation::{criterion, SuiteConfig, CRITERIA};

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let start = Instant::now();
    let mut failed = 0;
    for id in 1..=CRITERIA {
        let t = Instant::now();
        let line = match criterion(id, &cfg) {
            Ok(c) => {
                if !c.passed() {
                    failed += 1;
                }
                c.summary()
            }
            Err(e) => {
                failed += 1;
                format!("[FAIL] {id:>2} error: {e}")
            }
        };
        println!("{line}  ({:.2}s)", t.elapsed().as_secs_f64());
    }
    println!(
        "acceptance: {} of {CRITERIA} criteria passed in {:.1}s",
        CRITERIA - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

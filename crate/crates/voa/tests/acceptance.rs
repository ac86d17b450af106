//! Acceptance criteria, one line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use voa::suites::{self, DEFAULT_SEED, SUITES};

fn main() -> ExitCode {
    let mut all_ok = true;
    for (i, name) in SUITES.iter().enumerate() {
        let start = Instant::now();
        let reports = suites::run(name, DEFAULT_SEED).expect("known suite");
        for r in reports {
            let verdict = if r.ok() { "PASS" } else { "FAIL" };
            println!(
                "criterion {} [{}]: {} ({} checks passed, {} failed, {:.1}s)",
                i + 1,
                r.name,
                verdict,
                r.passed,
                r.failed,
                start.elapsed().as_secs_f64()
            );
            for f in &r.failures {
                println!("    {}", f);
            }
            all_ok &= r.ok();
        }
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

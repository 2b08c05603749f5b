//! Acceptance suite: one line per check, nonzero exit if any fails.

use heattrace::checks::{run_check, CHECK_COUNT};
use std::process::ExitCode;

fn main() -> ExitCode {
    println!("\nrunning {CHECK_COUNT} acceptance checks");
    let mut failed = 0;
    for id in 1..=CHECK_COUNT {
        let outcome = run_check(id);
        println!("{}", outcome.summary_line());
        if !outcome.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed\n", CHECK_COUNT as usize - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

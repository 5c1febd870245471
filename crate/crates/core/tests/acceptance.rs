use std::process::ExitCode;

use amalgam::suite::{run_criterion, CRITERIA, DEFAULT_SEED};

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for id in 1..=CRITERIA.len() {
        let start = std::time::Instant::now();
        let r = run_criterion(id, DEFAULT_SEED);
        println!("{r} ({:.1}s)", start.elapsed().as_secs_f64());
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: {} of {} passed", CRITERIA.len(), CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}

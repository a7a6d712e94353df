//! Runs the ten acceptance checks at full size and prints one line per check.
//! Exits non-zero if any check fails.

use std::process::ExitCode;
use std::time::Instant;

use locality_lab::suite::{self, SuiteSizes};
use locality_lab::Seed;

fn main() -> ExitCode {
    let sizes = SuiteSizes::full();
    let seed = Seed(20_240_601);
    let mut failed = Vec::new();
    let start = Instant::now();

    let mut run = |name: &str, reports: Vec<suite::CriterionReport>| {
        for r in reports {
            println!("{}", r.line());
            if !r.passed {
                failed.push(r.id);
            }
        }
        println!(
            "      ({name}: {:.1}s elapsed)",
            start.elapsed().as_secs_f64()
        );
    };
    run(
        "radius tail",
        vec![suite::radius_tail(&sizes, seed.derive(1))],
    );
    run("moments", vec![suite::moment_bound(&sizes, seed.derive(2))]);
    run(
        "adjacency",
        vec![suite::adjacency_bound(&sizes, seed.derive(3))],
    );
    run("matching", suite::matching_checks(&sizes, seed.derive(4)));
    run("cover", suite::cover_checks(&sizes, seed.derive(7)));
    run(
        "partition",
        vec![suite::partition_equivalence(&sizes, seed.derive(9))],
    );
    run(
        "rerun",
        vec![suite::rerun_identity(&SuiteSizes::smoke(), seed)],
    );

    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed checks: {failed:?}");
        ExitCode::FAILURE
    }
}

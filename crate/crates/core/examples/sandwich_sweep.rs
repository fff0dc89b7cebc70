//! Sandwich sweep over binary Hamming spaces with per-instance timing.
//!
//! Usage: `sandwich_sweep [max_n] [seconds]`.

use std::time::Instant;

use delsarte::oracle::{sandwich_check, FamilySpec, SearchBudget};

fn main() {
    let mut args = std::env::args().skip(1);
    let max_n: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(12);
    let seconds: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(60);
    for n in 3..=max_n {
        for d in 1..=n as usize {
            let start = Instant::now();
            match sandwich_check(FamilySpec::Hamming { n, q: 2 }, d, SearchBudget::seconds(seconds)) {
                Ok(report) => println!(
                    "n={n:2} d={d:2} oracle={}{} lp={} hamming={} time={:.2?}",
                    report.oracle.size,
                    if report.oracle.proven { "" } else { "?" },
                    report.lp,
                    report.hamming.bound,
                    start.elapsed()
                ),
                Err(err) => println!("n={n:2} d={d:2} error: {err}"),
            }
        }
    }
}

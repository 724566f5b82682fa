//! Acceptance suite: one pass/fail line per criterion at full size.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use d4_selmer::suites::{all_suites, SuiteConfig};

/// Wall-clock budgets for the criteria that carry one.
fn budget(criterion: u8) -> Option<Duration> {
    match criterion {
        1 => Some(Duration::from_secs(1)),
        2 => Some(Duration::from_secs(60)),
        5 => Some(Duration::from_secs(600)),
        9 => Some(Duration::from_secs(1800)),
        _ => None,
    }
}

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let mut failed = 0;
    for (criterion, suite) in all_suites() {
        let start = Instant::now();
        let out = suite(&cfg);
        let elapsed = start.elapsed();
        let in_budget = budget(criterion).map_or(true, |b| elapsed <= b);
        let passed = out.passed && in_budget;
        failed += usize::from(!passed);
        println!(
            "[{}] criterion {:>2} {}: {} ({:.2}s{})",
            if passed { "PASS" } else { "FAIL" },
            criterion,
            out.name,
            out.detail,
            elapsed.as_secs_f64(),
            match budget(criterion) {
                Some(b) if !in_budget => format!(", over the {}s budget", b.as_secs()),
                _ => String::new(),
            }
        );
        for f in out.failures.iter().take(5) {
            println!("       - {f}");
        }
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Cross-engine verification with a fixed seed.
//!
//! Runs the formula, Gaussian and Fock scopes and prints one line per check
//! followed by the recorded, unasserted observations.
//!
//! Run with `cargo run --release --example verification_report -- 7`.

use squeezed_cpa::verify::{verify, Scope};

fn main() {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(42);
    let report = verify(Scope::All, seed);
    for c in &report.checks {
        let leak = c.leakage.map(|l| format!(", leakage {l:.1e}")).unwrap_or_default();
        println!(
            "[{}] {:<55} {:>10.3e} vs {:.1e} over {} samples{leak}",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.max_residual,
            c.tolerance,
            c.samples
        );
    }
    for o in &report.observations {
        println!("observed {}: {:.9}", o.name, o.value);
    }
    println!("overall: {}", if report.pass { "pass" } else { "FAIL" });
    std::process::exit(if report.pass { 0 } else { 1 });
}

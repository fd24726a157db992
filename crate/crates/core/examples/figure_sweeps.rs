//! Regenerates the figure datasets and their structural checks.
//!
//! Writes one CSV per figure into the directory given as the first argument
//! (default `figures/`) and prints each golden assertion.
//!
//! Run with `cargo run --release --example figure_sweeps -- out_dir`.

use std::path::PathBuf;

use squeezed_cpa::sweep::{golden_checks, sweep, Format, SweepSpec, Target};

fn main() -> squeezed_cpa::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    std::fs::create_dir_all(&dir)?;
    let mut all_pass = true;
    for target in [Target::Fig2, Target::Fig3a, Target::Fig3b, Target::Fig4, Target::Fig5] {
        let spec = SweepSpec::for_target(target, dir.join(format!("{}.csv", target.name())), Format::Csv);
        let data = sweep(&spec)?;
        println!("{} -> {} ({} rows)", target.name(), spec.out.display(), data.rows.len());
        for check in golden_checks(&data) {
            all_pass &= check.pass;
            println!(
                "  [{}] {}: {:.3e} (bound {:.1e})",
                if check.pass { "pass" } else { "FAIL" },
                check.name,
                check.value,
                check.tolerance
            );
        }
    }
    if !all_pass {
        std::process::exit(1);
    }
    Ok(())
}

//! Brute-force Fock-space check of the CPA output state.
//!
//! Prepares two identical squeezed coherent inputs in a truncated Fock space,
//! applies the splitter dilation gate by gate and compares the optical
//! reduced state with the squeezed vacuum of (b₁ − b₂)/√2 built from its own
//! generator. Truncation leakage is reported, never renormalized away.
//!
//! Run with `cargo run --release --example fock_oracle`.

use squeezed_cpa::fock::{
    decompose_dilation, measure, reduced_density, simulate, squeezed_difference_vacuum,
    state_fidelity, OracleConfig,
};
use squeezed_cpa::gaussian::{input_state, propagate};
use squeezed_cpa::{dilation, LossyBeamSplitter, SqueezedCoherentState};

fn main() -> squeezed_cpa::Result<()> {
    let cpa = LossyBeamSplitter::cpa();
    let gates = decompose_dilation(&dilation(&cpa)?)?;
    println!("gate decomposition of the CPA dilation:");
    for g in gates.gates() {
        println!("  {g:?}");
    }

    let config = OracleConfig::default();
    let input = SqueezedCoherentState::from_params(0.8, 0.5, 0.3, 0.2)?;
    let run = simulate(&cpa, &input, &input, &config)?;
    println!("\ncutoff {}, preparation deficit {:.3e}", run.cutoff, run.preparation_deficit);
    println!("per-gate leakage: {:?}", run.gate_leakage);

    let moments = measure(&run.output);
    for k in 0..4 {
        println!("mode {k}: <a> = {:.3e}, <n> = {:.9}", moments.means[k], moments.numbers[k]);
    }

    let (mean, cov) = moments.to_quadratures();
    let gaussian = propagate(&input_state(&input, &input), &dilation(&cpa)?)?;
    let mean_gap = (&mean - gaussian.mean()).abs().max();
    let cov_gap = (&cov - gaussian.cov()).abs().max();
    println!("\nFock vs Gaussian: mean {mean_gap:.3e}, covariance {cov_gap:.3e}");

    let rho = reduced_density(&run.output, &[0, 1])?;
    let target = squeezed_difference_vacuum(&input.zeta, run.cutoff, config.tail_tol)?;
    println!("optical trace {:.12}, purity {:.12}", rho.trace(), rho.purity());
    println!("fidelity with squeezed vacuum: {:.12}", state_fidelity(&rho, &target)?);
    Ok(())
}

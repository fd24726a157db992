//! Closed-form absorption coefficients for squeezed coherent inputs.
//!
//! Prints the equal-squeezing, unequal-squeezing and one-squeezed slices next
//! to the general `analyze` result, and shows how the photon number of the
//! coherent part restores the ξ → −ξ symmetry of intensity absorption.
//!
//! Run with `cargo run --example squeezed_coefficients`.

use squeezed_cpa::absorption::{
    coeff_c_equal_squeezing, coeff_c_one_squeezed, coeff_c_unequal_squeezing,
    coeff_i_equal_squeezing, coeff_i_one_squeezed,
};
use squeezed_cpa::{analyze, LossyBeamSplitter, SqueezedCoherentState};

fn main() -> squeezed_cpa::Result<()> {
    let cpa = LossyBeamSplitter::cpa();
    let st = SqueezedCoherentState::from_params;

    println!("equal squeezing, θ₁ = θ, θ₂ = 0, |α| = |β| = 1");
    println!("{:>6} {:>6} {:>10} {:>10} {:>10} {:>10}", "xi", "theta", "C closed", "C analyze", "I closed", "I analyze");
    for (xi, theta) in [(0.0, 0.0), (0.5, 0.0), (0.5, 1.0), (-1.0, 2.0), (2.0, 0.3)] {
        let r = analyze(&cpa, &st(1.0, theta, xi, 0.0)?, &st(1.0, 0.0, xi, 0.0)?)?;
        println!(
            "{xi:>6.2} {theta:>6.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            coeff_c_equal_squeezing(xi, theta),
            r.coeff_c,
            coeff_i_equal_squeezing(xi, theta, 1.0)?,
            r.coeff_i
        );
    }

    println!("\nunequal squeezing: perfect coherence absorption only on the diagonal");
    for (x1, x2) in [(0.5, 0.5), (0.5, 0.4), (1.0, -1.0), (2.0, 2.0)] {
        println!("  ξ₁ = {x1:>5.2}, ξ₂ = {x2:>5.2}: {:.9}", coeff_c_unequal_squeezing(x1, x2));
    }

    println!("\none beam squeezed: coherence is even in ξ, intensity is not");
    println!("{:>8} {:>10} {:>14} {:>14} {:>14}", "xi", "C", "I |α|²=1e-3", "I |α|²=1", "I |α|²=1e6");
    for xi in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        println!(
            "{xi:>8.2} {:>10.6} {:>14.8} {:>14.8} {:>14.8}",
            coeff_c_one_squeezed(xi),
            coeff_i_one_squeezed(xi, 1e-3)?,
            coeff_i_one_squeezed(xi, 1.0)?,
            coeff_i_one_squeezed(xi, 1e6)?
        );
    }

    println!("\nsaturation: ξ = 20 gives C = {:.10}", coeff_c_one_squeezed(20.0));
    Ok(())
}

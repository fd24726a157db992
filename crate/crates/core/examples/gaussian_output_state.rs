//! Output state of the CPA splitter for identical squeezed coherent inputs.
//!
//! Propagates the four-mode Gaussian state (two optical inputs, two device
//! modes in vacuum) through the unitary dilation and shows that the optical
//! output is a pure squeezed vacuum of (b₁ − b₂)/√2, uncorrelated with the
//! device, while the symmetric device mode carries the displaced half of the
//! squeezing.
//!
//! Run with `cargo run --example gaussian_output_state`.

use squeezed_cpa::gaussian::{
    factorization_defect, input_state, intensities, predicted_output, propagate, purity,
    superposition_basis,
};
use squeezed_cpa::{dilation, LossyBeamSplitter, ModePartition, SqueezedCoherentState};

fn main() -> squeezed_cpa::Result<()> {
    let input = SqueezedCoherentState::from_params(1.2, 0.4, 0.7, 0.3)?;
    let u = dilation(&LossyBeamSplitter::cpa())?;
    println!("dilation unitary (rows b₁, b₂, h₁, h₂):\n{}", u.matrix());

    let out = propagate(&input_state(&input, &input), &u)?;
    let part = ModePartition::optical_device();
    let n = intensities(&out);
    println!("optical means:          {:?}, {:?}", out.mode_mean(0), out.mode_mean(1));
    println!("optical intensity:      {:.12}", n[0] + n[1]);
    println!("sinh²ξ:                 {:.12}", input.zeta.xi().sinh().powi(2));
    println!("optical purity:         {:.12}", purity(&out, part.optical())?);
    println!("factorization defect:   {:.3e}", factorization_defect(&out, &part));

    let modes = out.apply_passive(&superposition_basis())?;
    for (k, label) in ["(b₁ − b₂)/√2", "(b₁ + b₂)/√2", "(h₁ + h₂)/√2", "(h₁ − h₂)/√2"].iter().enumerate() {
        let cov = modes.mode_cov(k);
        let eig = cov.symmetric_eigenvalues();
        println!(
            "{label:>14}: mean {:>24}, variances ({:.6}, {:.6})",
            format!("{:.4}", modes.mode_mean(k)),
            eig.min(),
            eig.max()
        );
    }
    let xi = input.zeta.xi();
    println!("e^(∓2ξ)/2:      ({:.6}, {:.6})", (-2.0 * xi).exp() / 2.0, (2.0 * xi).exp() / 2.0);

    let predicted = predicted_output(&input.alpha, &input.zeta);
    let diff = (out.cov() - predicted.cov()).abs().max();
    println!("\nmax |σ − σ_predicted| = {diff:.3e}");

    let unequal = SqueezedCoherentState::from_params(1.2, 0.4, 0.0, 0.0)?;
    let mixed = propagate(&input_state(&input, &unequal), &u)?;
    println!(
        "unequal squeezing instead: optical purity {:.6}, factorization defect {:.3e}",
        purity(&mixed, part.optical())?,
        factorization_defect(&mixed, &part)
    );
    Ok(())
}

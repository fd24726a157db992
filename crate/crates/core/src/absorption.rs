//! Absorption of coherence and of intensity on a lossy beam splitter.
//!
//! Coherence is measured as `𝒞 = |⟨a₁⟩|² + |⟨a₂⟩|²` and intensity as
//! `ℐ = ⟨a₁†a₁⟩ + ⟨a₂†a₂⟩`. For coherent inputs the two coincide; squeezing
//! separates them, while the identity `Δℐ − Δ𝒞 = (ℐ_in − 𝒞_in)·𝒜` holds for any
//! splitter and any pair of squeezed coherent inputs.
//!
//! Besides the general [`analyze`], the closed forms for the special parameter
//! slices are kept as separate functions so each can be checked against it.

use num_complex::Complex64;
use serde::Serialize;

use crate::beamsplitter::LossyBeamSplitter;
use crate::error::{Error, Result};
use crate::states::{
    coherence_weight, expect_annihilation, expect_number, ComplexAmplitude,
    SqueezedCoherentState,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbsorptionReport {
    pub c_in: f64,
    pub c_out: f64,
    pub i_in: f64,
    pub i_out: f64,
    pub delta_c: f64,
    pub delta_i: f64,
    /// `𝒜ᶜ = Δ𝒞 / 𝒞_in`.
    pub coeff_c: f64,
    /// `𝒜ᴵ = Δℐ / ℐ_in`.
    pub coeff_i: f64,
    /// Interference term `Γ = 2 Re(⟨a₁⟩⟨a₂⟩*)`.
    pub gamma_big: f64,
    /// `𝒜 = 1 − |t|² − |r|²`.
    pub incoherent: f64,
    /// `(Δℐ − Δ𝒞) − (ℐ_in − 𝒞_in)·𝒜`.
    pub identity_residual: f64,
}

/// `Γ = ⟨a₁⟩⟨a₂⟩* + ⟨a₂⟩⟨a₁⟩*`.
pub fn interference_term(in1: &SqueezedCoherentState, in2: &SqueezedCoherentState) -> f64 {
    2.0 * (expect_annihilation(in1) * expect_annihilation(in2).conj()).re
}

pub fn analyze(
    bs: &LossyBeamSplitter,
    in1: &SqueezedCoherentState,
    in2: &SqueezedCoherentState,
) -> Result<AbsorptionReport> {
    let c_in = coherence_weight(in1) + coherence_weight(in2);
    let i_in = expect_number(in1) + expect_number(in2);
    if !(c_in > 0.0) {
        return Err(Error::ZeroCoherenceInput);
    }
    if !(i_in > 0.0) {
        return Err(Error::ZeroIntensityInput);
    }

    let gamma_big = interference_term(in1, in2);
    let throughput = bs.throughput();
    let cross = bs.cross_term();
    // noise operators add neither mean field nor normally ordered photons
    let c_out = throughput * c_in + gamma_big * cross;
    let i_out = throughput * i_in + gamma_big * cross;

    let delta_c = c_in - c_out;
    let delta_i = i_in - i_out;
    let incoherent = bs.incoherent_absorption();
    Ok(AbsorptionReport {
        c_in,
        c_out,
        i_in,
        i_out,
        delta_c,
        delta_i,
        coeff_c: delta_c / c_in,
        coeff_i: delta_i / i_in,
        gamma_big,
        incoherent,
        identity_residual: (delta_i - delta_c) - (i_in - c_in) * incoherent,
    })
}

/// `|⟨α|β⟩|² = exp(−|α − β|²)`.
pub fn coherent_fidelity(alpha: &ComplexAmplitude, beta: &ComplexAmplitude) -> f64 {
    (-(alpha.to_complex() - beta.to_complex()).norm_sqr()).exp()
}

/// Coherence absorption of two coherent states written through their fidelity:
/// `1 − [|t + r|² + (t r* + r t*) ln F / (|α|² + |β|²)]`, which for the CPA
/// splitter reduces to `1 + ln √F / (|α|² + |β|²)`.
pub fn coeff_from_fidelity(
    bs: &LossyBeamSplitter,
    alpha: &ComplexAmplitude,
    beta: &ComplexAmplitude,
) -> Result<f64> {
    let total = alpha.magnitude().powi(2) + beta.magnitude().powi(2);
    if !(total > 0.0) {
        return Err(Error::ZeroCoherenceInput);
    }
    let fidelity = coherent_fidelity(alpha, beta);
    let ln_fidelity = if fidelity > 0.0 {
        fidelity.ln()
    } else {
        // underflow: keep the exponent
        -(alpha.to_complex() - beta.to_complex()).norm_sqr()
    };
    if bs.is_cpa() {
        Ok(1.0 + 0.5 * ln_fidelity / total)
    } else {
        let t_plus_r = (bs.t() + bs.r()).norm_sqr();
        Ok(1.0 - (t_plus_r + bs.cross_term() * ln_fidelity / total))
    }
}

/// CPA splitter, equal amplitudes, `θ₁ = θ, θ₂ = 0`, `ξ₁ = ξ₂ = ξ`, `φ₁ = φ₂ = 0`:
/// `1/2 + cos θ / (1 + e^{2ξ}[cosh 2ξ − cos 2θ sinh 2ξ])`.
///
/// The bracket is evaluated as `e^{2ξ} sin²θ + e^{−2ξ} cos²θ`, which avoids
/// the cancellation between `cosh` and `sinh` at large `|ξ|`.
pub fn coeff_c_equal_squeezing(xi: f64, theta: f64) -> f64 {
    let (sin, cos) = theta.sin_cos();
    let scaled_bracket = (4.0 * xi).exp() * sin * sin + cos * cos;
    0.5 + cos / (1.0 + scaled_bracket)
}

/// CPA splitter, equal amplitudes and zero phases, squeezings `ξ₁, ξ₂`:
/// `1 − ½(1 − 2e^{−(ξ₁+ξ₂)} / (e^{−2ξ₁} + e^{−2ξ₂}))`.
pub fn coeff_c_unequal_squeezing(xi1: f64, xi2: f64) -> f64 {
    let xi_sum = xi1 + xi2;
    1.0 - 0.5 * (1.0 - 2.0 * (-xi_sum).exp() / ((-2.0 * xi1).exp() + (-2.0 * xi2).exp()))
}

/// Only the first beam squeezed (`ξ₁ = ξ, ξ₂ = 0`), CPA splitter, zero phases:
/// `(1 + cosh ξ) / (2 cosh ξ)`, even in `ξ`.
pub fn coeff_c_one_squeezed(xi: f64) -> f64 {
    let c = xi.cosh();
    (1.0 + c) / (2.0 * c)
}

/// Intensity counterpart of [`coeff_c_one_squeezed`]:
/// `1/2 + e^{−ξ} / (1 + e^{−2ξ} + sinh²ξ / |α|²)`.
///
/// The `sinh²ξ/|α|²` term breaks the `ξ → −ξ` symmetry.
pub fn coeff_i_one_squeezed(xi: f64, alpha_sq: f64) -> Result<f64> {
    check_alpha_sq(alpha_sq)?;
    let ratio = xi.sinh().powi(2) / alpha_sq;
    Ok(0.5 + (-xi).exp() / (1.0 + (-2.0 * xi).exp() + ratio))
}

/// Intensity counterpart of [`coeff_c_equal_squeezing`]:
/// `1/2 + (cos θ/2) e^{−2ξ} / (e^{−2ξ} + [(1 − cos 2θ)/2] sinh 2ξ + sinh²ξ/|α|²)`.
pub fn coeff_i_equal_squeezing(xi: f64, theta: f64, alpha_sq: f64) -> Result<f64> {
    check_alpha_sq(alpha_sq)?;
    let damp = (-2.0 * xi).exp();
    let denom = damp
        + 0.5 * (1.0 - (2.0 * theta).cos()) * (2.0 * xi).sinh()
        + xi.sinh().powi(2) / alpha_sq;
    Ok(0.5 + 0.5 * theta.cos() * damp / denom)
}

fn check_alpha_sq(alpha_sq: f64) -> Result<()> {
    if alpha_sq == 0.0 {
        return Err(Error::DegenerateInput(
            "|α|² = 0 leaves the closed form undefined; use analyze()",
        ));
    }
    if !(alpha_sq > 0.0 && alpha_sq.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "|α|² must be positive and finite, got {alpha_sq}"
        )));
    }
    Ok(())
}

/// Output coherence evaluated from the output means directly, without `Γ`.
pub fn output_coherence_direct(
    bs: &LossyBeamSplitter,
    in1: &SqueezedCoherentState,
    in2: &SqueezedCoherentState,
) -> f64 {
    let (b1, b2): (Complex64, Complex64) = crate::beamsplitter::output_means(bs, in1, in2);
    b1.norm_sqr() + b2.norm_sqr()
}

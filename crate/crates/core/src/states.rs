//! Single-mode squeezed coherent states `|α, ζ⟩ = S(ζ) D(α) |0⟩` and their
//! analytic first and second moments.
//!
//! Conventions shared by every engine in the crate:
//!
//! * `S(ζ) = exp[(ζ* a² − ζ a†²) / 2]` with `ζ = ξ e^{iφ}`, so `φ = 0, ξ > 0`
//!   squeezes the `x` quadrature.
//! * Quadratures `x = (a + a†)/√2`, `p = (a − a†)/(i√2)`; the vacuum variance
//!   is `1/2`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wraps an angle into `(−π, π]`.
pub fn normalize_angle(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(2.0 * PI);
    if wrapped > PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Complex amplitude in polar form, phase in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexAmplitude {
    magnitude: f64,
    phase: f64,
}

impl ComplexAmplitude {
    pub fn new(magnitude: f64, phase: f64) -> Result<Self> {
        if !magnitude.is_finite() || magnitude < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "amplitude magnitude must be finite and non-negative, got {magnitude}"
            )));
        }
        if !phase.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "amplitude phase must be finite, got {phase}"
            )));
        }
        Ok(Self {
            magnitude,
            phase: normalize_angle(phase),
        })
    }

    pub fn zero() -> Self {
        Self {
            magnitude: 0.0,
            phase: 0.0,
        }
    }

    /// Real, non-negative amplitude.
    pub fn real(magnitude: f64) -> Result<Self> {
        Self::new(magnitude, 0.0)
    }

    pub fn from_complex(value: Complex64) -> Result<Self> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "amplitude must be finite, got {value}"
            )));
        }
        let (magnitude, phase) = value.to_polar();
        Self::new(magnitude, phase)
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }
}

/// Squeezing `ζ = ξ e^{iφ}`. `ξ` may take either sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParam {
    xi: f64,
    phi: f64,
}

impl SqueezeParam {
    pub fn new(xi: f64, phi: f64) -> Result<Self> {
        if !xi.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "squeeze parameters must be finite, got xi={xi}, phi={phi}"
            )));
        }
        Ok(Self {
            xi,
            phi: normalize_angle(phi),
        })
    }

    pub fn none() -> Self {
        Self { xi: 0.0, phi: 0.0 }
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.xi, self.phi)
    }
}

/// `|α, ζ⟩ = S(ζ) D(α) |0⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedCoherentState {
    pub alpha: ComplexAmplitude,
    pub zeta: SqueezeParam,
}

impl SqueezedCoherentState {
    pub fn new(alpha: ComplexAmplitude, zeta: SqueezeParam) -> Self {
        Self { alpha, zeta }
    }

    pub fn vacuum() -> Self {
        Self::new(ComplexAmplitude::zero(), SqueezeParam::none())
    }

    pub fn coherent(alpha: ComplexAmplitude) -> Self {
        Self::new(alpha, SqueezeParam::none())
    }

    pub fn squeezed_vacuum(zeta: SqueezeParam) -> Self {
        Self::new(ComplexAmplitude::zero(), zeta)
    }

    /// Convenience constructor from raw polar parameters.
    pub fn from_params(alpha_mag: f64, theta: f64, xi: f64, phi: f64) -> Result<Self> {
        Ok(Self::new(
            ComplexAmplitude::new(alpha_mag, theta)?,
            SqueezeParam::new(xi, phi)?,
        ))
    }

    pub fn is_coherent(&self) -> bool {
        self.zeta.xi == 0.0
    }
}

/// `⟨a⟩ = α cosh ξ − α* e^{iφ} sinh ξ`.
pub fn expect_annihilation(state: &SqueezedCoherentState) -> Complex64 {
    let alpha = state.alpha.to_complex();
    let xi = state.zeta.xi;
    alpha * xi.cosh() - alpha.conj() * Complex64::cis(state.zeta.phi) * xi.sinh()
}

/// `⟨a†a⟩ = |⟨a⟩|² + sinh² ξ`: coherent part plus squeezing photons.
pub fn expect_number(state: &SqueezedCoherentState) -> f64 {
    expect_annihilation(state).norm_sqr() + state.zeta.xi.sinh().powi(2)
}

/// `γ² |α|²` with `γ² = cosh 2ξ − cos(2θ − φ) sinh 2ξ`.
///
/// Algebraically equal to `|⟨a⟩|²`; evaluated through the γ² factorisation
/// so the two routes can be checked against each other. `γ²` is computed as
/// `e^{2ξ} sin²(η/2) + e^{−2ξ} cos²(η/2)`, free of `cosh − sinh` cancellation.
pub fn coherence_weight(state: &SqueezedCoherentState) -> f64 {
    let xi = state.zeta.xi;
    let eta = 2.0 * state.alpha.phase - state.zeta.phi;
    let (sin, cos) = (eta / 2.0).sin_cos();
    let gamma_sq = (2.0 * xi).exp() * sin * sin + (-2.0 * xi).exp() * cos * cos;
    gamma_sq * state.alpha.magnitude.powi(2)
}

/// Quadrature mean `(⟨x⟩, ⟨p⟩)` and covariance matrix.
///
/// The covariance is `R(φ/2) diag(e^{−2ξ}, e^{2ξ}) R(φ/2)ᵀ / 2`: the quadrature
/// `x cos(φ/2) + p sin(φ/2)` carries the reduced variance.
pub fn quadrature_moments(state: &SqueezedCoherentState) -> (Vector2<f64>, Matrix2<f64>) {
    let mean_a = expect_annihilation(state);
    let mean = Vector2::new(mean_a.re, mean_a.im) * 2f64.sqrt();

    let xi = state.zeta.xi;
    let (s, c) = (state.zeta.phi / 2.0).sin_cos();
    let rot = Matrix2::new(c, -s, s, c);
    let diag = Matrix2::new((-2.0 * xi).exp() / 2.0, 0.0, 0.0, (2.0 * xi).exp() / 2.0);
    let mut cov = rot * diag * rot.transpose();
    // exact symmetry
    let off = 0.5 * (cov[(0, 1)] + cov[(1, 0)]);
    cov[(0, 1)] = off;
    cov[(1, 0)] = off;
    (mean, cov)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(alpha: f64, theta: f64, xi: f64, phi: f64) -> SqueezedCoherentState {
        SqueezedCoherentState::from_params(alpha, theta, xi, phi).unwrap()
    }

    #[test]
    fn angles_normalize_into_half_open_interval() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        assert!((normalize_angle(3.0 * PI) - PI).abs() < 1e-15);
        assert!((normalize_angle(-PI / 2.0) + PI / 2.0).abs() < 1e-15);
        let a = ComplexAmplitude::new(1.0, 7.0).unwrap();
        assert!(a.phase() > -PI && a.phase() <= PI);
    }

    #[test]
    fn rejects_negative_or_nonfinite_parameters() {
        assert!(ComplexAmplitude::new(-1.0, 0.0).is_err());
        assert!(ComplexAmplitude::new(f64::NAN, 0.0).is_err());
        assert!(SqueezeParam::new(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn annihilation_examples() {
        assert_eq!(
            expect_annihilation(&state(0.0, 0.0, 0.7, 1.1)),
            Complex64::new(0.0, 0.0)
        );
        assert!((expect_annihilation(&state(1.0, 0.0, 0.0, 0.0)) - 1.0).norm() < 1e-15);
        // scipy expm oracle on an 80-level space: 0.6065306597126316
        let m = expect_annihilation(&state(1.0, 0.0, 0.5, 0.0));
        assert!((m.re - 0.6065306597126316).abs() < 1e-8);
        assert!(m.im.abs() < 1e-15);
    }

    #[test]
    fn number_examples() {
        assert_eq!(expect_number(&SqueezedCoherentState::vacuum()), 0.0);
        assert!((expect_number(&state(2.0, 0.3, 0.0, 0.0)) - 4.0).abs() < 1e-12);
        // scipy expm oracle: 0.6394197585790622
        assert!((expect_number(&state(1.0, 0.0, 0.5, 0.0)) - 0.6394197585790622).abs() < 1e-8);
    }

    #[test]
    fn coherence_weight_examples() {
        assert!((coherence_weight(&state(1.0, 0.4, 0.0, 0.0)) - 1.0).abs() < 1e-15);
        assert!((coherence_weight(&state(1.0, 0.0, 0.5, 0.0)) - (-1.0f64).exp()).abs() < 1e-12);
        for xi in [-1.3, 0.2, 2.5] {
            let w = coherence_weight(&state(1.0, PI / 4.0, xi, 0.0));
            assert!((w - (2.0 * xi).cosh()).abs() < 1e-12 * (2.0 * xi).cosh());
        }
    }

    #[test]
    fn gamma_squared_matches_cosh_sinh_form() {
        for (theta, xi, phi) in [(0.3, 0.8, -1.0), (2.0, -1.7, 0.4), (-1.2, 0.05, 2.9)] {
            let s = state(1.0, theta, xi, phi);
            let eta = 2.0 * s.alpha.phase() - s.zeta.phi();
            let literal = (2.0 * xi).cosh() - eta.cos() * (2.0 * xi).sinh();
            assert!((coherence_weight(&s) - literal).abs() < 1e-12);
        }
    }

    #[test]
    fn covariance_examples() {
        let (_, cov) = quadrature_moments(&state(0.7, 1.0, 0.0, 0.3));
        assert!((cov - Matrix2::identity() * 0.5).norm() < 1e-15);

        // scipy oracle variances: 0.18393972058572083, 1.35914091422952
        let (_, cov) = quadrature_moments(&state(0.3, 0.2, 0.5, 0.0));
        assert!((cov[(0, 0)] - 0.18393972058572083).abs() < 1e-12);
        assert!((cov[(1, 1)] - 1.35914091422952).abs() < 1e-12);
        assert!(cov[(0, 1)].abs() < 1e-15);

        let (_, cov) = quadrature_moments(&state(0.3, 0.2, 0.5, PI));
        assert!((cov[(0, 0)] - 1.35914091422952).abs() < 1e-12);
        assert!((cov[(1, 1)] - 0.18393972058572083).abs() < 1e-12);

        // generic angle fixes the rotation sense: scipy gives xp = -0.37854269750409064
        let (_, cov) = quadrature_moments(&state(0.3, 0.2, 0.5, 0.7));
        assert!((cov[(0, 0)] - 0.32211859168468715).abs() < 1e-12);
        assert!((cov[(1, 1)] - 1.2209620431305517).abs() < 1e-12);
        assert!((cov[(0, 1)] + 0.37854269750409064).abs() < 1e-12);
    }

    #[test]
    fn cauchy_schwarz_equality_only_without_squeezing() {
        let coherent = state(1.3, 0.5, 0.0, 0.0);
        let coh = expect_annihilation(&coherent).norm_sqr();
        assert!((coh - expect_number(&coherent)).abs() < 1e-12);
        let squeezed = state(1.3, 0.5, 0.01, 0.0);
        assert!(expect_annihilation(&squeezed).norm_sqr() < expect_number(&squeezed));
    }
}

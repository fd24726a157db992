//! Lossy symmetric beam splitters and their four-mode unitary dilation.
//!
//! Output optical operators are `b = T a + A g`, where `g` are the bosonic
//! device (noise) input modes. Commutator preservation fixes `A†A = 1 − T†T`;
//! `A` is taken as the principal square root.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::states::{expect_annihilation, SqueezedCoherentState};

/// Slack on the largest eigenvalue of `T†T` admitted as passive.
pub const PASSIVITY_TOL: f64 = 1e-12;
/// Unitarity residual accepted for a constructed dilation.
pub const UNITARY_TOL: f64 = 1e-10;

/// Channels with `1 − |t ± r|²` below this are treated as lossless.
pub const LOSSLESS_TOL: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossyBeamSplitter {
    t: Complex64,
    r: Complex64,
    transmission: Matrix2<Complex64>,
    absorption: Matrix2<Complex64>,
}

/// The `T†T` eigenvalues are `|t + r|²` (symmetric channel) and `|t − r|²`
/// (antisymmetric channel); both share the eigenvectors `(1, ±1)/√2`.
fn channel_absorption(gain: f64) -> f64 {
    let loss = 1.0 - gain;
    if loss <= LOSSLESS_TOL {
        0.0
    } else {
        loss.sqrt()
    }
}

impl LossyBeamSplitter {
    /// Builds `T = [[t, r], [r, t]]` and `A = sqrt(1 − T†T)`.
    pub fn new(t: Complex64, r: Complex64) -> Result<Self> {
        if !(t.re.is_finite() && t.im.is_finite() && r.re.is_finite() && r.im.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beam splitter amplitudes must be finite, got t={t}, r={r}"
            )));
        }
        let sym = (t + r).norm_sqr();
        let anti = (t - r).norm_sqr();
        let max_eigenvalue = sym.max(anti);
        if max_eigenvalue > 1.0 + PASSIVITY_TOL {
            return Err(Error::NonPassive { max_eigenvalue });
        }
        let u = channel_absorption(sym);
        let v = channel_absorption(anti);
        let diag = Complex64::new(0.5 * (u + v), 0.0);
        let off = Complex64::new(0.5 * (u - v), 0.0);
        Ok(Self {
            t,
            r,
            transmission: Matrix2::new(t, r, r, t),
            absorption: Matrix2::new(diag, off, off, diag),
        })
    }

    /// Accepts only the symmetric reciprocal form `[[t, r], [r, t]]`.
    pub fn from_transmission(transmission: Matrix2<Complex64>) -> Result<Self> {
        let t = transmission[(0, 0)];
        let r = transmission[(0, 1)];
        if transmission[(1, 1)] != t || transmission[(1, 0)] != r {
            return Err(Error::AsymmetricTransmission);
        }
        Self::new(t, r)
    }

    pub fn from_real(t: f64, r: f64) -> Result<Self> {
        Self::new(Complex64::new(t, 0.0), Complex64::new(r, 0.0))
    }

    /// The coherent-perfect-absorption splitter `t = 1/2, r = −1/2`.
    pub fn cpa() -> Self {
        Self::from_real(0.5, -0.5).expect("CPA splitter is passive")
    }

    pub fn t(&self) -> Complex64 {
        self.t
    }

    pub fn r(&self) -> Complex64 {
        self.r
    }

    pub fn transmission(&self) -> &Matrix2<Complex64> {
        &self.transmission
    }

    pub fn absorption(&self) -> &Matrix2<Complex64> {
        &self.absorption
    }

    /// `|t|² + |r|²`.
    pub fn throughput(&self) -> f64 {
        self.t.norm_sqr() + self.r.norm_sqr()
    }

    /// Incoherent absorption `𝒜 = 1 − |t|² − |r|²`.
    pub fn incoherent_absorption(&self) -> f64 {
        1.0 - self.throughput()
    }

    /// `t r* + r t*`, always real.
    pub fn cross_term(&self) -> f64 {
        2.0 * (self.t * self.r.conj()).re
    }

    pub fn is_cpa(&self) -> bool {
        self.t == Complex64::new(0.5, 0.0) && self.r == Complex64::new(-0.5, 0.0)
    }

    /// Max-norm of `T†T + A†A − 1`.
    pub fn commutator_residual(&self) -> f64 {
        let t = &self.transmission;
        let a = &self.absorption;
        let m = t.adjoint() * t + a.adjoint() * a - Matrix2::identity();
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Four-mode unitary mapping `(a₁, a₂, g₁, g₂)` to `(b₁, b₂, h₁, h₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DilationUnitary {
    matrix: Matrix4<Complex64>,
}

impl DilationUnitary {
    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.matrix
    }

    pub fn identity() -> Self {
        Self {
            matrix: Matrix4::identity(),
        }
    }

    /// Wraps an arbitrary 4×4 matrix, rejecting non-unitary input.
    pub fn from_matrix(matrix: Matrix4<Complex64>) -> Result<Self> {
        let residual = unitarity_residual(&matrix);
        if residual > UNITARY_TOL {
            return Err(Error::NotUnitary { residual });
        }
        Ok(Self { matrix })
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.matrix)
    }

    pub fn block(&self, row: usize, col: usize) -> Matrix2<Complex64> {
        self.matrix.fixed_view::<2, 2>(2 * row, 2 * col).into_owned()
    }
}

fn unitarity_residual(m: &Matrix4<Complex64>) -> f64 {
    let prod = m.adjoint() * m - Matrix4::identity();
    prod.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `U = [[T, A], [−A, T̄]]`, with `T̄` the elementwise conjugate of `T`.
///
/// For real `T` (the CPA splitter included) this is `[[T, A], [−A, T]]` and
/// inverts to `a = T b − A h`.
pub fn dilation(bs: &LossyBeamSplitter) -> Result<DilationUnitary> {
    let t = bs.transmission();
    let a = bs.absorption();
    let t_bar = t.map(|z| z.conj());
    let mut m = Matrix4::from_element(ZERO);
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(t);
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(a);
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&(-a));
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&t_bar);
    DilationUnitary::from_matrix(m)
}

/// `(t⟨a₁⟩ + r⟨a₂⟩, r⟨a₁⟩ + t⟨a₂⟩)`; the device modes start in their ground
/// state so the noise operators contribute no mean field.
pub fn output_means(
    bs: &LossyBeamSplitter,
    in1: &SqueezedCoherentState,
    in2: &SqueezedCoherentState,
) -> (Complex64, Complex64) {
    let m1 = expect_annihilation(in1);
    let m2 = expect_annihilation(in2);
    (bs.t * m1 + bs.r * m2, bs.r * m1 + bs.t * m2)
}

/// Serializable view of the splitter parameters.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SplitterSummary {
    pub t: [f64; 2],
    pub r: [f64; 2],
    pub incoherent_absorption: f64,
}

impl From<&LossyBeamSplitter> for SplitterSummary {
    fn from(bs: &LossyBeamSplitter) -> Self {
        Self {
            t: [bs.t.re, bs.t.im],
            r: [bs.r.re, bs.r.im],
            incoherent_absorption: bs.incoherent_absorption(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::ComplexAmplitude;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_abs(m: &Matrix2<Complex64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn cpa_matrices() {
        let bs = LossyBeamSplitter::cpa();
        let half = c(0.5, 0.0);
        assert_eq!(*bs.absorption(), Matrix2::new(half, half, half, half));
        assert_eq!(*bs.transmission(), Matrix2::new(half, -half, -half, half));
        assert_eq!(bs.throughput(), 0.5);
        assert_eq!(bs.transmission() + bs.absorption(), Matrix2::identity());
        assert!(bs.is_cpa());
    }

    #[test]
    fn cpa_sigma_x_algebra() {
        let bs = LossyBeamSplitter::cpa();
        let (t, a) = (bs.transmission(), bs.absorption());
        assert_eq!(t * t + a * a, Matrix2::identity());
        assert_eq!(t * a, Matrix2::zeros());
        assert_eq!(a * t, Matrix2::zeros());
    }

    #[test]
    fn lossless_splitters_have_no_absorption() {
        let id = LossyBeamSplitter::from_real(1.0, 0.0).unwrap();
        assert!(max_abs(id.absorption()) < 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bs = LossyBeamSplitter::new(c(s, 0.0), c(0.0, s)).unwrap();
        assert_eq!(max_abs(bs.absorption()), 0.0);
        assert!(bs.commutator_residual() < 1e-12);
        assert_eq!(dilation(&id).unwrap().matrix(), &Matrix4::identity());
    }

    #[test]
    fn rejects_gain_and_asymmetry() {
        assert!(matches!(
            LossyBeamSplitter::from_real(0.9, 0.3),
            Err(Error::NonPassive { .. })
        ));
        let asym = Matrix2::new(c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0));
        assert_eq!(
            LossyBeamSplitter::from_transmission(asym),
            Err(Error::AsymmetricTransmission)
        );
    }

    #[test]
    fn commutators_preserved_for_lossy_complex_splitters() {
        for (t, r) in [
            (c(0.3, 0.2), c(-0.1, 0.4)),
            (c(0.0, 0.7), c(0.5, 0.0)),
            (c(0.5, 0.0), c(0.0, 0.5)),
        ] {
            let bs = LossyBeamSplitter::new(t, r).unwrap();
            assert!(bs.commutator_residual() < 1e-12);
            let u = dilation(&bs).unwrap();
            assert!(u.unitarity_residual() < 1e-12);
            assert_eq!(u.block(0, 0), *bs.transmission());
            assert_eq!(u.block(0, 1), *bs.absorption());
        }
    }

    #[test]
    fn cpa_dilation_inverts_to_t_b_minus_a_h() {
        let bs = LossyBeamSplitter::cpa();
        let u = dilation(&bs).unwrap();
        assert!(u.unitarity_residual() < 1e-15);
        assert!(u.matrix().iter().all(|z| z.im == 0.0));
        // a = U† (b, h); its optical rows must read [T, −A]
        let inv = u.matrix().adjoint();
        let top_left: Matrix2<Complex64> = inv.fixed_view::<2, 2>(0, 0).into_owned();
        let top_right: Matrix2<Complex64> = inv.fixed_view::<2, 2>(0, 2).into_owned();
        assert_eq!(top_left, *bs.transmission());
        assert_eq!(top_right, -bs.absorption());
    }

    #[test]
    fn output_mean_examples() {
        let bs = LossyBeamSplitter::cpa();
        let s = SqueezedCoherentState::from_params(0.9, 0.4, 0.3, 0.2).unwrap();
        let (b1, b2) = output_means(&bs, &s, &s);
        assert_eq!((b1.norm(), b2.norm()), (0.0, 0.0));

        let coh = SqueezedCoherentState::coherent(ComplexAmplitude::real(1.0).unwrap());
        let vac = SqueezedCoherentState::vacuum();
        let (b1, b2) = output_means(&bs, &coh, &vac);
        assert!((b1 - 0.5).norm() < 1e-15 && (b2 + 0.5).norm() < 1e-15);

        let id = LossyBeamSplitter::from_real(1.0, 0.0).unwrap();
        let (b1, b2) = output_means(&id, &s, &coh);
        assert_eq!(b1, crate::states::expect_annihilation(&s));
        assert_eq!(b2, c(1.0, 0.0));
    }
}

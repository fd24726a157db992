//! Multimode Gaussian states: mean vector and quadrature covariance matrix,
//! ordered `(x₁, p₁, x₂, p₂, …)`, vacuum variance `1/2`.
//!
//! Passive mode unitaries `b = U a` act as `mean → S mean`, `σ → S σ Sᵀ`,
//! where each 2×2 block of `S` is `[[Re U_jk, −Im U_jk], [Im U_jk, Re U_jk]]`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use num_complex::Complex64;
use serde::Serialize;

use crate::beamsplitter::DilationUnitary;
use crate::error::{Error, Result};
use crate::states::{quadrature_moments, ComplexAmplitude, SqueezeParam, SqueezedCoherentState};

/// Symmetry tolerance on the covariance matrix.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Lowest admitted eigenvalue of `σ + (i/2)Ω`.
pub const UNCERTAINTY_TOL: f64 = -1e-10;
/// Off-block max-norm below which a state counts as factorized.
pub const FACTORIZATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "mean vector length must be a positive even number, got {dim}"
            )));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: cov.nrows().max(cov.ncols()),
            });
        }
        let asym = (&cov - cov.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::InvalidParameter(format!(
                "covariance not symmetric (deviation {asym:e})"
            )));
        }
        let state = Self {
            n_modes: dim / 2,
            mean,
            cov,
        };
        let min_eig = state.uncertainty_min_eigenvalue();
        if min_eig < UNCERTAINTY_TOL {
            return Err(Error::InvalidParameter(format!(
                "covariance violates the uncertainty relation (eigenvalue {min_eig:e})"
            )));
        }
        Ok(state)
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            n_modes,
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes) * 0.5,
        }
    }

    /// Tensor product of single-mode Gaussian states.
    pub fn product(modes: &[(Vector2<f64>, Matrix2<f64>)]) -> Self {
        let n = modes.len();
        let mut mean = DVector::zeros(2 * n);
        let mut cov = DMatrix::zeros(2 * n, 2 * n);
        for (k, (m, c)) in modes.iter().enumerate() {
            mean.fixed_rows_mut::<2>(2 * k).copy_from(m);
            cov.fixed_view_mut::<2, 2>(2 * k, 2 * k).copy_from(c);
        }
        Self { n_modes: n, mean, cov }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// `⟨a_k⟩ = (⟨x_k⟩ + i⟨p_k⟩)/√2`.
    pub fn mode_mean(&self, mode: usize) -> Complex64 {
        Complex64::new(self.mean[2 * mode], self.mean[2 * mode + 1]) * FRAC_1_SQRT_2
    }

    pub fn mode_cov(&self, mode: usize) -> Matrix2<f64> {
        self.cov.fixed_view::<2, 2>(2 * mode, 2 * mode).into_owned()
    }

    /// Smallest eigenvalue of the Hermitian matrix `σ + (i/2)Ω`.
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        let dim = 2 * self.n_modes;
        let mut h = self.cov.map(|v| Complex64::new(v, 0.0));
        for k in 0..self.n_modes {
            h[(2 * k, 2 * k + 1)] += Complex64::new(0.0, 0.5);
            h[(2 * k + 1, 2 * k)] -= Complex64::new(0.0, 0.5);
        }
        debug_assert_eq!(h.nrows(), dim);
        h.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Sub-state on `modes`, in the given order.
    pub fn reduce(&self, modes: &[usize]) -> Result<Self> {
        for &m in modes {
            if m >= self.n_modes {
                return Err(Error::DimensionMismatch {
                    expected: self.n_modes,
                    found: m + 1,
                });
            }
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.cov[(idx[r], idx[c])]);
        Ok(Self {
            n_modes: modes.len(),
            mean,
            cov,
        })
    }

    /// Applies the passive mode transformation `b = U a`.
    pub fn apply_passive(&self, unitary: &DMatrix<Complex64>) -> Result<Self> {
        if unitary.nrows() != self.n_modes || unitary.ncols() != self.n_modes {
            return Err(Error::DimensionMismatch {
                expected: self.n_modes,
                found: unitary.nrows(),
            });
        }
        let s = symplectic_from_unitary(unitary);
        let mut cov = &s * &self.cov * s.transpose();
        symmetrize(&mut cov);
        Ok(Self {
            n_modes: self.n_modes,
            mean: &s * &self.mean,
            cov,
        })
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m = (&*m + t) * 0.5;
}

/// Real `2N × 2N` symplectic-orthogonal matrix of a passive mode unitary.
pub fn symplectic_from_unitary(unitary: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = unitary.nrows();
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            let u = unitary[(j, k)];
            s[(2 * j, 2 * k)] = u.re;
            s[(2 * j, 2 * k + 1)] = -u.im;
            s[(2 * j + 1, 2 * k)] = u.im;
            s[(2 * j + 1, 2 * k + 1)] = u.re;
        }
    }
    s
}

/// `|α, ζ₁⟩ ⊗ |β, ζ₂⟩ ⊗ |0, 0⟩_device` as a four-mode Gaussian state.
pub fn input_state(in1: &SqueezedCoherentState, in2: &SqueezedCoherentState) -> GaussianState {
    let vac = (Vector2::zeros(), Matrix2::identity() * 0.5);
    GaussianState::product(&[quadrature_moments(in1), quadrature_moments(in2), vac, vac])
}

/// Propagates a four-mode state through the beam-splitter dilation.
pub fn propagate(state: &GaussianState, u: &DilationUnitary) -> Result<GaussianState> {
    if state.n_modes() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: state.n_modes(),
        });
    }
    let m = u.matrix();
    let dense = DMatrix::from_fn(4, 4, |r, c| m[(r, c)]);
    state.apply_passive(&dense)
}

/// Maps physical output modes `(b₁, b₂, h₁, h₂)` to the superposition modes
/// `((b₁ − b₂)/√2, (b₁ + b₂)/√2, (h₁ + h₂)/√2, (h₁ − h₂)/√2)`.
pub fn superposition_basis() -> DMatrix<Complex64> {
    let s = FRAC_1_SQRT_2;
    let real = DMatrix::from_row_slice(
        4,
        4,
        &[
            s, -s, 0.0, 0.0, //
            s, s, 0.0, 0.0, //
            0.0, 0.0, s, s, //
            0.0, 0.0, s, -s,
        ],
    );
    real.map(|v| Complex64::new(v, 0.0))
}

/// The CPA output for identical inputs `|α, ζ⟩ ⊗ |α, ζ⟩`, built directly:
/// squeezed vacuum `S(ζ)|0⟩` in `(b₁ − b₂)/√2`, vacuum in `(b₁ + b₂)/√2`,
/// `S(ζ) D(−√2 α)|0⟩` in `(h₁ + h₂)/√2` and vacuum in `(h₁ − h₂)/√2`.
///
/// The device displacement carries the sign fixed by the dilation
/// `a = T b − A h`: the symmetric device mode is minus the symmetric input.
pub fn predicted_output(alpha: &ComplexAmplitude, zeta: &SqueezeParam) -> GaussianState {
    let device_amp = ComplexAmplitude::new(2f64.sqrt() * alpha.magnitude(), alpha.phase() + PI)
        .expect("scaled amplitude stays valid");
    let vac = (Vector2::zeros(), Matrix2::identity() * 0.5);
    let rotated = GaussianState::product(&[
        quadrature_moments(&SqueezedCoherentState::squeezed_vacuum(*zeta)),
        vac,
        quadrature_moments(&SqueezedCoherentState::new(device_amp, *zeta)),
        vac,
    ]);
    rotated
        .apply_passive(&superposition_basis().adjoint())
        .expect("four-mode basis change")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModePartition {
    optical: Vec<usize>,
    device: Vec<usize>,
}

impl ModePartition {
    pub fn new(optical: Vec<usize>, device: Vec<usize>, n_modes: usize) -> Result<Self> {
        let mut seen = vec![false; n_modes];
        for &m in optical.iter().chain(device.iter()) {
            if m >= n_modes {
                return Err(Error::DimensionMismatch {
                    expected: n_modes,
                    found: m + 1,
                });
            }
            if seen[m] {
                return Err(Error::InvalidParameter(format!(
                    "mode {m} appears twice in the partition"
                )));
            }
            seen[m] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidParameter(format!(
                "mode {missing} missing from the partition"
            )));
        }
        Ok(Self { optical, device })
    }

    /// Modes `(b₁, b₂)` against `(h₁, h₂)`.
    pub fn optical_device() -> Self {
        Self {
            optical: vec![0, 1],
            device: vec![2, 3],
        }
    }

    pub fn optical(&self) -> &[usize] {
        &self.optical
    }

    pub fn device(&self) -> &[usize] {
        &self.device
    }
}

/// Max-norm of the covariance block coupling the two sides of the partition.
pub fn factorization_defect(state: &GaussianState, part: &ModePartition) -> f64 {
    let mut worst: f64 = 0.0;
    for &i in &part.optical {
        for &j in &part.device {
            for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                worst = worst.max(state.cov[(2 * i + a, 2 * j + b)].abs());
            }
        }
    }
    worst
}

/// `1 / (2^k √det σ_sub)` for the reduced state on `subset`.
pub fn purity(state: &GaussianState, subset: &[usize]) -> Result<f64> {
    let sub = state.reduce(subset)?;
    let det = sub.cov.determinant();
    Ok(1.0 / (2f64.powi(subset.len() as i32) * det.sqrt()))
}

/// Mean photon number per mode.
pub fn intensities(state: &GaussianState) -> Vec<f64> {
    (0..state.n_modes)
        .map(|k| {
            let (x, p) = (2 * k, 2 * k + 1);
            (state.cov[(x, x)] + state.cov[(p, p)] - 1.0) / 2.0
                + (state.mean[x].powi(2) + state.mean[p].powi(2)) / 2.0
        })
        .collect()
}

/// Output-state summary of the CPA scenario for reporting.
#[derive(Debug, Clone, Serialize)]
pub struct OutputSummary {
    pub optical_intensity: f64,
    pub device_intensity: f64,
    pub optical_means: [[f64; 2]; 2],
    pub optical_purity: f64,
    pub factorization_defect: f64,
}

impl OutputSummary {
    pub fn of(state: &GaussianState) -> Result<Self> {
        let n = intensities(state);
        let part = ModePartition::optical_device();
        let m0 = state.mode_mean(0);
        let m1 = state.mode_mean(1);
        Ok(Self {
            optical_intensity: n[0] + n[1],
            device_intensity: n[2] + n[3],
            optical_means: [[m0.re, m0.im], [m1.re, m1.im]],
            optical_purity: purity(state, part.optical())?,
            factorization_defect: factorization_defect(state, &part),
        })
    }
}

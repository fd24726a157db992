//! Truncated Fock-space oracle.
//!
//! States are dense amplitude tensors with the same photon cutoff on every
//! mode (levels `0..cutoff`), flattened row-major with mode 0 as the most
//! significant index. Passive mode unitaries are decomposed into two-mode
//! mixers and single-mode phases and applied gate by gate; amplitude pushed
//! above the cutoff is dropped and accounted as leakage, never renormalized.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::beamsplitter::{dilation, DilationUnitary, LossyBeamSplitter};
use crate::error::{Error, Result};
use crate::states::{SqueezeParam, SqueezedCoherentState};

pub const DEFAULT_CUTOFF: usize = 20;
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;
pub const MAX_CUTOFF: usize = 40;
/// Cutoff increment used by adaptive preparation.
pub const CUTOFF_STEP: usize = 10;
/// Recomposition tolerance for gate decompositions.
pub const RECOMPOSE_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleConfig {
    pub cutoff: usize,
    pub tail_tol: f64,
    pub max_cutoff: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            cutoff: DEFAULT_CUTOFF,
            tail_tol: DEFAULT_TAIL_TOL,
            max_cutoff: MAX_CUTOFF,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    n_modes: usize,
    cutoff: usize,
    amplitudes: Vec<Complex64>,
}

impl FockState {
    pub fn vacuum(n_modes: usize, cutoff: usize) -> Self {
        let mut amplitudes = vec![ZERO; cutoff.pow(n_modes as u32)];
        amplitudes[0] = ONE;
        Self {
            n_modes,
            cutoff,
            amplitudes,
        }
    }

    pub fn from_amplitudes(n_modes: usize, cutoff: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_modes == 0 || cutoff == 0 {
            return Err(Error::InvalidParameter(
                "Fock state needs at least one mode and cutoff ≥ 1".into(),
            ));
        }
        let expected = cutoff.pow(n_modes as u32);
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            n_modes,
            cutoff,
            amplitudes,
        })
    }

    /// Number state `|n₁, n₂, …⟩`.
    pub fn number_state(occupations: &[usize], cutoff: usize) -> Result<Self> {
        if occupations.iter().any(|&n| n >= cutoff) {
            return Err(Error::InvalidParameter(format!(
                "occupation exceeds cutoff {cutoff}"
            )));
        }
        let mut state = Self::vacuum(occupations.len(), cutoff);
        state.amplitudes[0] = ZERO;
        let idx = state.index_of(occupations);
        state.amplitudes[idx] = ONE;
        Ok(state)
    }

    /// Tensor product; all factors must share one cutoff.
    pub fn product(factors: &[FockState]) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty product".into()))?;
        let cutoff = first.cutoff;
        let mut amplitudes = vec![ONE];
        let mut n_modes = 0;
        for f in factors {
            if f.cutoff != cutoff {
                return Err(Error::DimensionMismatch {
                    expected: cutoff,
                    found: f.cutoff,
                });
            }
            let mut next = Vec::with_capacity(amplitudes.len() * f.amplitudes.len());
            for a in &amplitudes {
                next.extend(f.amplitudes.iter().map(|b| a * b));
            }
            amplitudes = next;
            n_modes += f.n_modes;
        }
        Ok(Self {
            n_modes,
            cutoff,
            amplitudes,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn stride(&self, mode: usize) -> usize {
        self.cutoff.pow((self.n_modes - 1 - mode) as u32)
    }

    pub fn index_of(&self, occupations: &[usize]) -> usize {
        occupations
            .iter()
            .fold(0, |acc, &n| acc * self.cutoff + n)
    }

    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % self.cutoff
    }

    pub fn amplitude(&self, occupations: &[usize]) -> Complex64 {
        self.amplitudes[self.index_of(occupations)]
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockState) -> Result<Complex64> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amplitudes.len(),
                found: other.amplitudes.len(),
            });
        }
        Ok(dot(&self.amplitudes, &other.amplitudes))
    }

    /// `a_mode |ψ⟩`; exact inside the truncated space.
    fn lowered(&self, mode: usize, amps: &[Complex64]) -> Vec<Complex64> {
        let stride = self.stride(mode);
        let mut out = vec![ZERO; amps.len()];
        for (i, slot) in out.iter_mut().enumerate() {
            let n = (i / stride) % self.cutoff;
            if n + 1 < self.cutoff {
                *slot = amps[i + stride] * ((n + 1) as f64).sqrt();
            }
        }
        out
    }
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn log_factorials(n: usize) -> Vec<f64> {
    let mut lf = vec![0.0; n + 1];
    for k in 1..=n {
        lf[k] = lf[k - 1] + (k as f64).ln();
    }
    lf
}

/// `α^n e^{−|α|²/2} / √n!` for `n < len`.
pub fn coherent_amplitudes(alpha: Complex64, len: usize) -> Vec<Complex64> {
    let mut amps = Vec::with_capacity(len);
    let mut current = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..len {
        if n > 0 {
            current = current * alpha / (n as f64).sqrt();
        }
        amps.push(current);
    }
    amps
}

/// Number-basis matrix elements `⟨m|S(ζ)|n⟩` for `m < rows`, `n < cols`,
/// with `S(ζ) = exp[(ζ* a² − ζ a†²)/2]`, from the three-term recurrence
///
/// ```text
/// ⟨0|S|0⟩   = sech^{1/2} ξ
/// ⟨m|S|0⟩   = −√((m−1)/m) e^{iφ} tanh ξ ⟨m−2|S|0⟩
/// ⟨m|S|n⟩   = √((n−1)/n) e^{−iφ} tanh ξ ⟨m|S|n−2⟩ + √(m/n) sech ξ ⟨m−1|S|n−1⟩
/// ```
///
/// Entries with `m + n` odd vanish identically.
pub fn squeeze_matrix(zeta: &SqueezeParam, rows: usize, cols: usize) -> DMatrix<Complex64> {
    let xi = zeta.xi();
    let phase = Complex64::cis(zeta.phi());
    let tanh = xi.tanh();
    let sech = 1.0 / xi.cosh();
    let mut s = DMatrix::from_element(rows, cols, ZERO);
    if rows == 0 || cols == 0 {
        return s;
    }
    let sqrt: Vec<f64> = (0..rows.max(cols)).map(|k| (k as f64).sqrt()).collect();
    s[(0, 0)] = Complex64::new(sech.sqrt(), 0.0);
    for m in (2..rows).step_by(2) {
        s[(m, 0)] = -phase * tanh * (sqrt[m - 1] / sqrt[m]) * s[(m - 2, 0)];
    }
    for n in 1..cols {
        for m in 0..rows {
            if (m + n) % 2 != 0 {
                continue;
            }
            let mut v = ZERO;
            if n >= 2 {
                v += phase.conj() * tanh * (sqrt[n - 1] / sqrt[n]) * s[(m, n - 2)];
            }
            if m >= 1 {
                v += sech * (sqrt[m] / sqrt[n]) * s[(m - 1, n - 1)];
            }
            s[(m, n)] = v;
        }
    }
    s
}

/// Number of coherent-state levels kept before squeezing so that the
/// discarded input tail is far below any tolerance in use.
fn working_levels(alpha_mag: f64, cutoff: usize) -> usize {
    let poisson = alpha_mag * alpha_mag + 12.0 * alpha_mag + 40.0;
    (2 * cutoff).max(cutoff + poisson.ceil() as usize)
}

/// Single-mode `S(ζ) D(α) |0⟩` truncated to `cutoff` levels.
pub fn prepare_squeezed_coherent(
    state: &SqueezedCoherentState,
    cutoff: usize,
    tail_tol: f64,
) -> Result<FockState> {
    if cutoff == 0 {
        return Err(Error::InvalidParameter("cutoff must be ≥ 1".into()));
    }
    let alpha = state.alpha.to_complex();
    let levels = working_levels(alpha.norm(), cutoff);
    let coherent = DVector::from_vec(coherent_amplitudes(alpha, levels));
    let squeeze = squeeze_matrix(&state.zeta, cutoff, levels);
    let amps = (squeeze * coherent).as_slice().to_vec();
    let fock = FockState::from_amplitudes(1, cutoff, amps)?;
    let deficit = (1.0 - fock.norm_sqr()).max(0.0);
    if deficit > tail_tol {
        return Err(Error::CutoffTooSmall {
            cutoff,
            deficit,
            tolerance: tail_tol,
        });
    }
    Ok(fock)
}

/// Retries [`prepare_squeezed_coherent`] with the cutoff raised in steps of
/// [`CUTOFF_STEP`] up to `config.max_cutoff`.
pub fn prepare_adaptive(state: &SqueezedCoherentState, config: &OracleConfig) -> Result<FockState> {
    let mut cutoff = config.cutoff;
    loop {
        match prepare_squeezed_coherent(state, cutoff, config.tail_tol) {
            Err(Error::CutoffTooSmall { .. }) if cutoff + CUTOFF_STEP <= config.max_cutoff => {
                cutoff += CUTOFF_STEP;
            }
            other => return other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Gate {
    /// On modes `(p, q)`: `[[e^{iφ} cos θ, −sin θ], [e^{iφ} sin θ, cos θ]]`.
    Mixer {
        theta: f64,
        phi: f64,
        modes: (usize, usize),
    },
    /// `a_mode → e^{iχ} a_mode`.
    Phase { chi: f64, mode: usize },
}

impl Gate {
    /// 2×2 block of a mixer in `(p, q)` order.
    fn mixer_block(theta: f64, phi: f64) -> [[Complex64; 2]; 2] {
        let (s, c) = theta.sin_cos();
        let e = Complex64::cis(phi);
        [
            [e * c, Complex64::new(-s, 0.0)],
            [e * s, Complex64::new(c, 0.0)],
        ]
    }

    /// Full `n × n` mode matrix.
    pub fn matrix(&self, n_modes: usize) -> DMatrix<Complex64> {
        let mut m = DMatrix::identity(n_modes, n_modes);
        match *self {
            Gate::Mixer {
                theta,
                phi,
                modes: (p, q),
            } => {
                let b = Self::mixer_block(theta, phi);
                m[(p, p)] = b[0][0];
                m[(p, q)] = b[0][1];
                m[(q, p)] = b[1][0];
                m[(q, q)] = b[1][1];
            }
            Gate::Phase { chi, mode } => m[(mode, mode)] = Complex64::cis(chi),
        }
        m
    }

    fn max_mode(&self) -> usize {
        match *self {
            Gate::Mixer { modes: (p, q), .. } => p.max(q),
            Gate::Phase { mode, .. } => mode,
        }
    }
}

/// Gates in application order: the first gate acts first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateDecomposition {
    n_modes: usize,
    gates: Vec<Gate>,
}

impl GateDecomposition {
    pub fn new(n_modes: usize, gates: Vec<Gate>) -> Result<Self> {
        if let Some(g) = gates.iter().find(|g| g.max_mode() >= n_modes) {
            return Err(Error::DimensionMismatch {
                expected: n_modes,
                found: g.max_mode() + 1,
            });
        }
        Ok(Self { n_modes, gates })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn recompose(&self) -> DMatrix<Complex64> {
        self.gates
            .iter()
            .fold(DMatrix::identity(self.n_modes, self.n_modes), |acc, g| {
                g.matrix(self.n_modes) * acc
            })
    }
}

fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

const NEGLIGIBLE: f64 = 1e-15;

/// Triangular elimination of a mode unitary into mixers and phases.
///
/// Each sub-diagonal entry `U_ij` is zeroed by a phase on row `j` followed by
/// `Mixer(θ, 0)†` on rows `(j, i)`; what remains is a diagonal of phases.
pub fn decompose_unitary(u: &DMatrix<Complex64>) -> Result<GateDecomposition> {
    let n = u.nrows();
    if u.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.ncols(),
        });
    }
    let residual = max_abs_diff(&(u.adjoint() * u), &DMatrix::identity(n, n));
    if residual > RECOMPOSE_TOL {
        return Err(Error::NotUnitary { residual });
    }

    let mut work = u.clone();
    // (row j phase χ, mixer θ on (j, i)) in elimination order
    let mut steps: Vec<(usize, usize, f64, f64)> = Vec::new();
    for j in 0..n {
        for i in (j + 1)..n {
            let y = work[(i, j)];
            if y.norm() < NEGLIGIBLE {
                continue;
            }
            let x = work[(j, j)];
            let chi = if x.norm() < NEGLIGIBLE {
                y.arg()
            } else {
                y.arg() - x.arg()
            };
            let theta = y.norm().atan2(x.norm());
            let rot = Complex64::cis(chi);
            for c in 0..n {
                work[(j, c)] *= rot;
            }
            let (s, co) = theta.sin_cos();
            for c in 0..n {
                let (a, b) = (work[(j, c)], work[(i, c)]);
                work[(j, c)] = a * co + b * s;
                work[(i, c)] = -a * s + b * co;
            }
            steps.push((j, i, chi, theta));
        }
    }

    let mut gates = Vec::new();
    for k in 0..n {
        let chi = work[(k, k)].arg();
        if chi.abs() > NEGLIGIBLE {
            gates.push(Gate::Phase { chi, mode: k });
        }
    }
    for &(j, i, chi, theta) in steps.iter().rev() {
        gates.push(Gate::Mixer {
            theta,
            phi: 0.0,
            modes: (j, i),
        });
        if chi.abs() > NEGLIGIBLE {
            gates.push(Gate::Phase { chi: -chi, mode: j });
        }
    }
    let decomposition = GateDecomposition { n_modes: n, gates };
    let residual = max_abs_diff(&decomposition.recompose(), u);
    if residual > RECOMPOSE_TOL {
        return Err(Error::NotUnitary { residual });
    }
    Ok(decomposition)
}

pub fn decompose_dilation(u: &DilationUnitary) -> Result<GateDecomposition> {
    let m = u.matrix();
    decompose_unitary(&DMatrix::from_fn(4, 4, |r, c| m[(r, c)]))
}

/// Fock-basis transfer amplitudes of a two-mode unitary `w` (output, input)
/// per photon-number sector, from the binomial expansion of
/// `a_p† → w_pp a_p† + w_qp a_q†`, `a_q† → w_pq a_p† + w_qq a_q†`.
struct MixerTable {
    cutoff: usize,
    /// `sectors[N][n1][m1]`, `n1` input photons in `p`, `m1` output photons in `p`.
    sectors: Vec<Vec<Vec<Complex64>>>,
}

impl MixerTable {
    fn new(w: [[Complex64; 2]; 2], cutoff: usize) -> Self {
        let max_total = 2 * (cutoff - 1);
        let lf = log_factorials(max_total);
        let powers = |z: Complex64| {
            let mut p = Vec::with_capacity(max_total + 1);
            let mut cur = ONE;
            for _ in 0..=max_total {
                p.push(cur);
                cur *= z;
            }
            p
        };
        let (pp, qp, pq, qq) = (
            powers(w[0][0]),
            powers(w[1][0]),
            powers(w[0][1]),
            powers(w[1][1]),
        );
        let mut sectors = Vec::with_capacity(max_total + 1);
        for total in 0..=max_total {
            let mut by_input = vec![Vec::new(); total + 1];
            for n1 in total.saturating_sub(cutoff - 1)..=total.min(cutoff - 1) {
                let n2 = total - n1;
                let mut row = vec![ZERO; total + 1];
                for (m1, slot) in row.iter_mut().enumerate() {
                    let m2 = total - m1;
                    let half = 0.5 * (lf[n1] + lf[n2] + lf[m1] + lf[m2]);
                    let lo = m1.saturating_sub(n2);
                    let hi = n1.min(m1);
                    let mut acc = ZERO;
                    for j1 in lo..=hi {
                        let j2 = m1 - j1;
                        let log_mag = half - lf[j1] - lf[n1 - j1] - lf[j2] - lf[n2 - j2];
                        acc += pp[j1] * qp[n1 - j1] * pq[j2] * qq[n2 - j2] * log_mag.exp();
                    }
                    *slot = acc;
                }
                by_input[n1] = row;
            }
            sectors.push(by_input);
        }
        Self { cutoff, sectors }
    }
}

/// Result of pushing a state through a gate sequence.
#[derive(Debug, Clone)]
pub struct GateRun {
    pub state: FockState,
    /// Norm lost above the cutoff, per gate.
    pub leakage: Vec<f64>,
}

impl GateRun {
    pub fn total_leakage(&self) -> f64 {
        self.leakage.iter().sum()
    }
}

fn apply_phase(state: &mut FockState, chi: f64, mode: usize) {
    let stride = state.stride(mode);
    let cutoff = state.cutoff;
    let phases: Vec<Complex64> = (0..cutoff).map(|n| Complex64::cis(chi * n as f64)).collect();
    for (i, a) in state.amplitudes.iter_mut().enumerate() {
        *a *= phases[(i / stride) % cutoff];
    }
}

fn apply_mixer(state: &FockState, table: &MixerTable, p: usize, q: usize) -> FockState {
    let cutoff = table.cutoff;
    let (sp, sq) = (state.stride(p), state.stride(q));
    let mut out = vec![ZERO; state.amplitudes.len()];
    for base in 0..state.amplitudes.len() {
        if state.occupation(base, p) != 0 || state.occupation(base, q) != 0 {
            continue;
        }
        for (total, sector) in table.sectors.iter().enumerate() {
            for (n1, row) in sector.iter().enumerate() {
                if row.is_empty() {
                    continue;
                }
                let n2 = total - n1;
                let amp = state.amplitudes[base + n1 * sp + n2 * sq];
                if amp == ZERO {
                    continue;
                }
                for (m1, coeff) in row.iter().enumerate() {
                    let m2 = total - m1;
                    if m1 < cutoff && m2 < cutoff {
                        out[base + m1 * sp + m2 * sq] += coeff * amp;
                    }
                }
            }
        }
    }
    FockState {
        n_modes: state.n_modes,
        cutoff,
        amplitudes: out,
    }
}

/// Applies every gate in order, tracking norm lost above the cutoff.
pub fn apply_gates(state: &FockState, gates: &GateDecomposition, tail_tol: f64) -> Result<GateRun> {
    if gates.n_modes != state.n_modes {
        return Err(Error::DimensionMismatch {
            expected: state.n_modes,
            found: gates.n_modes,
        });
    }
    let mut current = state.clone();
    let mut leakage = Vec::with_capacity(gates.gates.len());
    for gate in &gates.gates {
        match *gate {
            Gate::Phase { chi, mode } => {
                apply_phase(&mut current, chi, mode);
                leakage.push(0.0);
            }
            Gate::Mixer {
                theta,
                phi,
                modes: (p, q),
            } => {
                let before = current.norm_sqr();
                let table = MixerTable::new(Gate::mixer_block(theta, phi), current.cutoff);
                current = apply_mixer(&current, &table, p, q);
                leakage.push((before - current.norm_sqr()).max(0.0));
            }
        }
    }
    let run = GateRun {
        state: current,
        leakage,
    };
    let total = run.total_leakage();
    if total > tail_tol {
        return Err(Error::CutoffTooSmall {
            cutoff: state.cutoff,
            deficit: total,
            tolerance: tail_tol,
        });
    }
    Ok(run)
}

/// First and second moments of a Fock state.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub norm_sqr: f64,
    /// `⟨a_k⟩`.
    pub means: Vec<Complex64>,
    /// `⟨a_k† a_k⟩`.
    pub numbers: Vec<f64>,
    /// `⟨a_j a_k⟩`.
    pub pair: DMatrix<Complex64>,
    /// `⟨a_j† a_k⟩`.
    pub hopping: DMatrix<Complex64>,
}

impl Moments {
    /// Quadrature mean and symmetrized covariance, `(x₁, p₁, …)` ordering.
    pub fn to_quadratures(&self) -> (DVector<f64>, DMatrix<f64>) {
        let n = self.means.len();
        let mut mean = DVector::zeros(2 * n);
        for (k, m) in self.means.iter().enumerate() {
            mean[2 * k] = m.re * 2f64.sqrt();
            mean[2 * k + 1] = m.im * 2f64.sqrt();
        }
        let mut cov = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for k in 0..n {
                let pair = self.pair[(j, k)] - self.means[j] * self.means[k];
                let hop = self.hopping[(j, k)] - self.means[j].conj() * self.means[k];
                let delta = if j == k { 0.5 } else { 0.0 };
                cov[(2 * j, 2 * k)] = pair.re + hop.re + delta;
                cov[(2 * j + 1, 2 * k + 1)] = -pair.re + hop.re + delta;
                cov[(2 * j, 2 * k + 1)] = pair.im + hop.im;
                cov[(2 * k + 1, 2 * j)] = pair.im + hop.im;
            }
        }
        (mean, cov)
    }
}

/// Moments by direct contraction of the amplitude tensor.
pub fn measure(state: &FockState) -> Moments {
    let n = state.n_modes;
    let psi = &state.amplitudes;
    let lowered: Vec<Vec<Complex64>> = (0..n).map(|k| state.lowered(k, psi)).collect();
    let means = lowered.iter().map(|l| dot(psi, l)).collect();
    let numbers = lowered.iter().map(|l| dot(l, l).re).collect();
    let mut pair = DMatrix::from_element(n, n, ZERO);
    let mut hopping = DMatrix::from_element(n, n, ZERO);
    for j in 0..n {
        for k in 0..n {
            hopping[(j, k)] = dot(&lowered[j], &lowered[k]);
            if k >= j {
                let twice = state.lowered(j, &lowered[k]);
                pair[(j, k)] = dot(psi, &twice);
                pair[(k, j)] = pair[(j, k)];
            }
        }
    }
    Moments {
        norm_sqr: state.norm_sqr(),
        means,
        numbers,
        pair,
        hopping,
    }
}

/// Density matrix on a subset of modes, indexed like a [`FockState`] over
/// those modes in the given order.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub n_modes: usize,
    pub cutoff: usize,
    pub matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs_diff(&self.matrix, &self.matrix.adjoint())
    }
}

/// Partial trace over the modes not in `subset`.
pub fn reduced_density(state: &FockState, subset: &[usize]) -> Result<DensityMatrix> {
    let n = state.n_modes;
    let mut keep = vec![false; n];
    for &m in subset {
        if m >= n || keep[m] {
            return Err(Error::InvalidParameter(format!(
                "invalid or repeated mode {m} in subset"
            )));
        }
        keep[m] = true;
    }
    let rest: Vec<usize> = (0..n).filter(|m| !keep[*m]).collect();
    let c = state.cutoff;
    let sub_dim = c.pow(subset.len() as u32);
    let rest_dim = c.pow(rest.len() as u32);
    let mut psi = DMatrix::from_element(sub_dim, rest_dim, ZERO);
    for (i, amp) in state.amplitudes.iter().enumerate() {
        let row = subset
            .iter()
            .fold(0, |acc, &m| acc * c + state.occupation(i, m));
        let col = rest.iter().fold(0, |acc, &m| acc * c + state.occupation(i, m));
        psi[(row, col)] = *amp;
    }
    let matrix = &psi * psi.adjoint();
    Ok(DensityMatrix {
        n_modes: subset.len(),
        cutoff: c,
        matrix,
    })
}

/// `⟨target|ρ|target⟩`.
pub fn state_fidelity(rho: &DensityMatrix, target: &FockState) -> Result<f64> {
    let dim = rho.matrix.nrows();
    if target.amplitudes.len() != dim || target.cutoff != rho.cutoff {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: target.amplitudes.len(),
        });
    }
    let t = DVector::from_column_slice(&target.amplitudes);
    Ok((t.adjoint() * &rho.matrix * &t)[(0, 0)].re)
}

/// Two-mode `exp[¼ζ*(b₁ − b₂)² − ¼ζ(b₁† − b₂†)²]|0, 0⟩`, obtained by
/// exponentiating the quadratic generator directly (scaled Taylor steps on a
/// padded space) instead of through a mode rotation.
pub fn squeezed_difference_vacuum(zeta: &SqueezeParam, cutoff: usize, tail_tol: f64) -> Result<FockState> {
    let work = cutoff + 20;
    let dim = work * work;
    let z = zeta.to_complex();
    let lower = |v: &[Complex64], mode: usize| -> Vec<Complex64> {
        let stride = if mode == 0 { work } else { 1 };
        let mut out = vec![ZERO; dim];
        for (i, slot) in out.iter_mut().enumerate() {
            let n = (i / stride) % work;
            if n + 1 < work {
                *slot = v[i + stride] * ((n + 1) as f64).sqrt();
            }
        }
        out
    };
    let raise = |v: &[Complex64], mode: usize| -> Vec<Complex64> {
        let stride = if mode == 0 { work } else { 1 };
        let mut out = vec![ZERO; dim];
        for (i, slot) in out.iter_mut().enumerate() {
            let n = (i / stride) % work;
            if n >= 1 {
                *slot = v[i - stride] * (n as f64).sqrt();
            }
        }
        out
    };
    let diff = |v: &[Complex64], op: &dyn Fn(&[Complex64], usize) -> Vec<Complex64>| {
        let a = op(v, 0);
        let b = op(v, 1);
        a.iter().zip(&b).map(|(x, y)| (x - y) * FRAC_1_SQRT_2).collect::<Vec<_>>()
    };
    // G = ½ζ* d² − ½ζ d†², d = (b₁ − b₂)/√2
    let generator = |v: &[Complex64]| -> Vec<Complex64> {
        let dd = diff(&diff(v, &lower), &lower);
        let uu = diff(&diff(v, &raise), &raise);
        dd.iter()
            .zip(&uu)
            .map(|(l, r)| 0.5 * z.conj() * l - 0.5 * z * r)
            .collect()
    };

    let bound = zeta.xi().abs() * 2.0 * work as f64;
    let steps = (bound / 0.5).ceil().max(1.0) as usize;
    let scale = 1.0 / steps as f64;
    let mut v = vec![ZERO; dim];
    v[0] = ONE;
    for _ in 0..steps {
        let mut term = v.clone();
        let mut acc = v.clone();
        for k in 1..60 {
            let next = generator(&term);
            term = next.into_iter().map(|x| x * (scale / k as f64)).collect();
            let size: f64 = term.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
            if size < 1e-18 {
                break;
            }
        }
        v = acc;
    }

    let mut amps = Vec::with_capacity(cutoff * cutoff);
    for n1 in 0..cutoff {
        for n2 in 0..cutoff {
            amps.push(v[n1 * work + n2]);
        }
    }
    let fock = FockState::from_amplitudes(2, cutoff, amps)?;
    let deficit = (1.0 - fock.norm_sqr()).max(0.0);
    if deficit > tail_tol {
        return Err(Error::CutoffTooSmall {
            cutoff,
            deficit,
            tolerance: tail_tol,
        });
    }
    Ok(fock)
}

/// Full oracle run: two prepared inputs and vacuum device modes through the
/// gate decomposition of the splitter dilation.
#[derive(Debug, Clone)]
pub struct OracleRun {
    pub output: FockState,
    pub cutoff: usize,
    /// Truncation deficit of the prepared product input.
    pub preparation_deficit: f64,
    pub gate_leakage: Vec<f64>,
}

impl OracleRun {
    pub fn total_leakage(&self) -> f64 {
        self.preparation_deficit + self.gate_leakage.iter().sum::<f64>()
    }
}

pub fn simulate(
    bs: &LossyBeamSplitter,
    in1: &SqueezedCoherentState,
    in2: &SqueezedCoherentState,
    config: &OracleConfig,
) -> Result<OracleRun> {
    // common cutoff: the larger of the two adaptive choices
    let c1 = prepare_adaptive(in1, config)?.cutoff();
    let c2 = prepare_adaptive(in2, config)?.cutoff();
    let cutoff = c1.max(c2);
    let f1 = prepare_squeezed_coherent(in1, cutoff, config.tail_tol)?;
    let f2 = prepare_squeezed_coherent(in2, cutoff, config.tail_tol)?;
    let vac = FockState::vacuum(1, cutoff);
    let input = FockState::product(&[f1, f2, vac.clone(), vac])?;
    let preparation_deficit = (1.0 - input.norm_sqr()).max(0.0);
    let gates = decompose_dilation(&dilation(bs)?)?;
    let run = apply_gates(&input, &gates, config.tail_tol - preparation_deficit)?;
    Ok(OracleRun {
        output: run.state,
        cutoff,
        preparation_deficit,
        gate_leakage: run.leakage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn st(alpha: f64, theta: f64, xi: f64, phi: f64) -> SqueezedCoherentState {
        SqueezedCoherentState::from_params(alpha, theta, xi, phi).unwrap()
    }

    #[test]
    fn vacuum_preparation() {
        let f = prepare_squeezed_coherent(&SqueezedCoherentState::vacuum(), 5, 1e-12).unwrap();
        assert_eq!(f.amplitudes()[0], ONE);
        assert!(f.amplitudes()[1..].iter().all(|a| *a == ZERO));
    }

    #[test]
    fn coherent_preparation_is_poissonian() {
        let f = prepare_squeezed_coherent(&st(1.0, 0.0, 0.0, 0.0), 25, 1e-10).unwrap();
        let m = measure(&f);
        assert!((m.numbers[0] - 1.0).abs() < 1e-10);
        assert!((m.means[0] - 1.0).norm() < 1e-10);
        let p3 = f.amplitudes()[3].norm_sqr();
        assert!((p3 - (-1.0f64).exp() / 6.0).abs() < 1e-14);
    }

    #[test]
    fn squeezed_vacuum_has_only_even_photons() {
        let f = prepare_squeezed_coherent(&st(0.0, 0.0, 0.5, 0.0), 40, 1e-12).unwrap();
        for (n, a) in f.amplitudes().iter().enumerate() {
            if n % 2 == 1 {
                assert_eq!(*a, ZERO);
            }
        }
        let m = measure(&f);
        assert!((m.numbers[0] - 0.5f64.sinh().powi(2)).abs() < 1e-8);
    }

    #[test]
    fn too_small_cutoff_is_reported_and_adaptive_recovers() {
        let s = st(1.2, 0.0, 0.6, 0.0);
        assert!(matches!(
            prepare_squeezed_coherent(&s, 8, 1e-8),
            Err(Error::CutoffTooSmall { .. })
        ));
        let cfg = OracleConfig {
            cutoff: 8,
            ..OracleConfig::default()
        };
        let f = prepare_adaptive(&s, &cfg).unwrap();
        assert!(f.cutoff() > 8 && f.cutoff() <= MAX_CUTOFF);
    }

    #[test]
    fn squeeze_matrix_is_unitary_on_low_block() {
        let s = squeeze_matrix(&SqueezeParam::new(0.4, 0.9).unwrap(), 60, 60);
        let prod = s.adjoint() * &s;
        for i in 0..10 {
            for j in 0..10 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let id = decompose_unitary(&DMatrix::identity(4, 4)).unwrap();
        assert!(id.gates().is_empty());

        let (s, c) = 0.3f64.sin_cos();
        let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]).map(|v| Complex64::new(v, 0.0));
        let d = decompose_unitary(&rot).unwrap();
        assert_eq!(d.gates().len(), 1);
        assert!(matches!(d.gates()[0], Gate::Mixer { .. }));
        assert!(max_abs_diff(&d.recompose(), &rot) < 1e-15);

        let cpa = decompose_dilation(&dilation(&LossyBeamSplitter::cpa()).unwrap()).unwrap();
        let target = dilation(&LossyBeamSplitter::cpa()).unwrap();
        let dense = DMatrix::from_fn(4, 4, |r, c| target.matrix()[(r, c)]);
        assert!(max_abs_diff(&cpa.recompose(), &dense) < 1e-12);
    }

    #[test]
    fn decomposition_of_complex_unitary() {
        let bs = LossyBeamSplitter::new(Complex64::new(0.3, 0.2), Complex64::new(-0.1, 0.4)).unwrap();
        let u = dilation(&bs).unwrap();
        let d = decompose_dilation(&u).unwrap();
        let dense = DMatrix::from_fn(4, 4, |r, c| u.matrix()[(r, c)]);
        assert!(max_abs_diff(&d.recompose(), &dense) < 1e-12);
        let bad = DMatrix::from_element(2, 2, ONE);
        assert!(matches!(decompose_unitary(&bad), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn single_photon_splits_on_balanced_mixer() {
        let gates = GateDecomposition::new(
            2,
            vec![Gate::Mixer {
                theta: FRAC_PI_4,
                phi: 0.7,
                modes: (0, 1),
            }],
        )
        .unwrap();
        let input = FockState::number_state(&[1, 0], 4).unwrap();
        let run = apply_gates(&input, &gates, 1e-12).unwrap();
        let e = Complex64::cis(0.7) * FRAC_1_SQRT_2;
        assert!((run.state.amplitude(&[1, 0]) - e).norm() < 1e-15);
        assert!((run.state.amplitude(&[0, 1]) - e).norm() < 1e-15);
        assert!(run.total_leakage() < 1e-15);
    }

    #[test]
    fn hong_ou_mandel_dip() {
        let gates = GateDecomposition::new(
            2,
            vec![Gate::Mixer {
                theta: FRAC_PI_4,
                phi: 0.0,
                modes: (0, 1),
            }],
        )
        .unwrap();
        let input = FockState::number_state(&[1, 1], 4).unwrap();
        let out = apply_gates(&input, &gates, 1e-12).unwrap().state;
        assert!(out.amplitude(&[1, 1]).norm() < 1e-15);
        assert!((out.amplitude(&[2, 0]).norm_sqr() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn vacuum_is_invariant() {
        let u = dilation(&LossyBeamSplitter::cpa()).unwrap();
        let gates = decompose_dilation(&u).unwrap();
        let vac = FockState::vacuum(4, 6);
        let out = apply_gates(&vac, &gates, 1e-12).unwrap().state;
        assert!((out.amplitudes()[0] - ONE).norm() < 1e-14 || (out.amplitudes()[0].norm() - 1.0).abs() < 1e-14);
        assert!(out.amplitudes()[1..].iter().all(|a| a.norm() < 1e-14));
    }

    #[test]
    fn leakage_is_reported() {
        let gates = GateDecomposition::new(
            2,
            vec![Gate::Mixer {
                theta: FRAC_PI_4,
                phi: 0.0,
                modes: (0, 1),
            }],
        )
        .unwrap();
        let input = FockState::number_state(&[2, 2], 3).unwrap();
        // |2,2⟩ → part of the amplitude lands on |4,0⟩ and |0,4⟩, beyond cutoff 3
        assert!(matches!(
            apply_gates(&input, &gates, 1e-8),
            Err(Error::CutoffTooSmall { .. })
        ));
        let run = apply_gates(&input, &gates, 1.0).unwrap();
        assert!((run.total_leakage() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn measure_matches_analytic_moments() {
        let s = st(1.0, 0.0, 0.5, 0.0);
        let f = prepare_squeezed_coherent(&s, 40, 1e-14).unwrap();
        let m = measure(&f);
        assert!((m.means[0].re - 0.6065306597126316).abs() < 1e-8);
        assert!((m.numbers[0] - 0.6394197585790622).abs() < 1e-8);
        let (_, cov) = m.to_quadratures();
        assert!((cov[(0, 0)] - 0.18393972058572083).abs() < 1e-8);
        assert!((cov[(1, 1)] - 1.35914091422952).abs() < 1e-8);
    }

    #[test]
    fn reduced_density_of_product() {
        let a = prepare_squeezed_coherent(&st(0.5, 0.3, 0.2, 0.0), 16, 1e-10).unwrap();
        let b = prepare_squeezed_coherent(&st(0.3, -1.0, 0.0, 0.0), 16, 1e-10).unwrap();
        let prod = FockState::product(&[a.clone(), b]).unwrap();
        let rho = reduced_density(&prod, &[0]).unwrap();
        assert!(rho.hermiticity_defect() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-9);
        assert!((state_fidelity(&rho, &a).unwrap() - 1.0).abs() < 1e-9);
        let orth = FockState::number_state(&[1], 12).unwrap();
        let rho1 = reduced_density(&FockState::number_state(&[0, 3], 12).unwrap(), &[0]).unwrap();
        assert_eq!(state_fidelity(&rho1, &orth).unwrap(), 0.0);
        assert!(state_fidelity(&rho1, &FockState::vacuum(2, 12)).is_err());
    }

    #[test]
    fn generator_route_matches_rotated_squeezing() {
        // squeezed vacuum on mode 0, vacuum on mode 1, then rotate (d, s) → (b1, b2)
        let zeta = SqueezeParam::new(0.3, 0.4).unwrap();
        let sq = prepare_squeezed_coherent(&SqueezedCoherentState::squeezed_vacuum(zeta), 20, 1e-10)
            .unwrap();
        let input = FockState::product(&[sq, FockState::vacuum(1, 20)]).unwrap();
        let s = FRAC_1_SQRT_2;
        let rot = DMatrix::from_row_slice(2, 2, &[s, s, -s, s]).map(|v| Complex64::new(v, 0.0));
        let rotated = apply_gates(&input, &decompose_unitary(&rot).unwrap(), 1e-8).unwrap().state;
        let direct = squeezed_difference_vacuum(&zeta, 20, 1e-8).unwrap();
        let overlap = direct.inner(&rotated).unwrap().norm_sqr();
        assert!(overlap > 1.0 - 1e-10, "overlap {overlap}");
    }
}

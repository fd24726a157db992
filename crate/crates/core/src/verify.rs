//! Cross-engine verification runner.
//!
//! Every check draws its scenarios from a ChaCha8 stream seeded by the user
//! seed and the check's scope, so a report is a pure function of
//! `(scope, seed)`. A check passes iff its largest residual is within its
//! tolerance; the report passes iff every check does.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::absorption::{
    analyze, coeff_c_equal_squeezing, coeff_c_one_squeezed, coeff_c_unequal_squeezing,
    coeff_from_fidelity, coeff_i_equal_squeezing, coeff_i_one_squeezed, output_coherence_direct,
};
use crate::beamsplitter::{dilation, LossyBeamSplitter};
use crate::error::{Error, Result};
use crate::fock::{
    measure, prepare_squeezed_coherent, reduced_density, simulate, squeezed_difference_vacuum,
    state_fidelity, OracleConfig,
};
use crate::gaussian::{
    factorization_defect, input_state, intensities, predicted_output, propagate, purity,
    superposition_basis, GaussianState, ModePartition,
};
use crate::states::{
    expect_annihilation, expect_number, quadrature_moments, ComplexAmplitude,
    SqueezedCoherentState,
};

pub const FORMULA_SCENARIOS: usize = 1000;
pub const GAUSSIAN_SCENARIOS: usize = 200;
pub const FOCK_SCENARIOS: usize = 3;

pub const FORMULA_TOL: f64 = 1e-12;
pub const GAUSSIAN_TOL: f64 = 1e-10;
pub const SATURATION_TOL: f64 = 1e-8;
pub const STRICT_MARGIN: f64 = 1e-6;
pub const FIG5_SYMMETRIC_GAP: f64 = 3e-5;
pub const PREPARATION_TOL: f64 = 1e-8;
pub const ORACLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    All,
    Formulas,
    Gaussian,
    Fock,
}

impl Scope {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "all" => Ok(Self::All),
            "formulas" => Ok(Self::Formulas),
            "gaussian" => Ok(Self::Gaussian),
            "fock" => Ok(Self::Fock),
            other => Err(Error::InvalidParameter(format!("unknown verify scope `{other}`"))),
        }
    }

    fn stream(self) -> u64 {
        match self {
            Self::All => 0,
            Self::Formulas => 1,
            Self::Gaussian => 2,
            Self::Fock => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub engines: Vec<String>,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Largest truncation leakage seen, for Fock-oracle checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leakage: Option<f64>,
}

/// A recorded quantity that is reported without being asserted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub scope: Scope,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
    pub observations: Vec<Observation>,
}

/// Running maximum of a residual over samples.
struct Check {
    name: &'static str,
    engines: &'static [&'static str],
    tolerance: f64,
    max: f64,
    samples: usize,
    leakage: Option<f64>,
}

impl Check {
    fn new(name: &'static str, engines: &'static [&'static str], tolerance: f64) -> Self {
        Self {
            name,
            engines,
            tolerance,
            max: 0.0,
            samples: 0,
            leakage: None,
        }
    }

    fn record(&mut self, residual: f64) {
        self.samples += 1;
        // NaN must fail the check
        if residual.is_nan() || residual > self.max {
            self.max = if residual.is_nan() { f64::INFINITY } else { residual };
        }
    }

    fn leak(&mut self, leakage: f64) {
        self.leakage = Some(self.leakage.unwrap_or(0.0).max(leakage));
    }

    /// Residual must stay at or below the tolerance.
    fn finish(self) -> CheckResult {
        CheckResult {
            name: self.name.into(),
            engines: self.engines.iter().map(|s| s.to_string()).collect(),
            samples: self.samples,
            max_residual: self.max,
            tolerance: self.tolerance,
            pass: self.samples > 0 && self.max <= self.tolerance,
            leakage: self.leakage,
        }
    }

    /// Smallest recorded margin must stay at or above the tolerance.
    fn finish_margin(self, min_margin: f64) -> CheckResult {
        CheckResult {
            name: self.name.into(),
            engines: self.engines.iter().map(|s| s.to_string()).collect(),
            samples: self.samples,
            max_residual: min_margin,
            tolerance: self.tolerance,
            pass: self.samples > 0 && min_margin >= self.tolerance,
            leakage: None,
        }
    }
}

fn rng_for(seed: u64, scope: Scope) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(scope.stream());
    rng
}

/// Random passive, reciprocal splitter: `t ± r` drawn inside the unit disc.
pub fn random_splitter(rng: &mut impl Rng) -> LossyBeamSplitter {
    loop {
        let plus = Complex64::from_polar(rng.random_range(0.0..0.99), rng.random_range(-PI..PI));
        let minus = Complex64::from_polar(rng.random_range(0.0..0.99), rng.random_range(-PI..PI));
        if let Ok(bs) = LossyBeamSplitter::new((plus + minus) / 2.0, (plus - minus) / 2.0) {
            return bs;
        }
    }
}

pub fn random_state(rng: &mut impl Rng, max_alpha: f64, max_xi: f64) -> SqueezedCoherentState {
    SqueezedCoherentState::from_params(
        rng.random_range(0.1..max_alpha),
        rng.random_range(-PI..PI),
        rng.random_range(-max_xi..=max_xi),
        rng.random_range(-PI..PI),
    )
    .expect("sampled parameters are in range")
}

fn amp(mag: f64, phase: f64) -> ComplexAmplitude {
    ComplexAmplitude::new(mag, phase).expect("finite amplitude")
}

fn state(alpha: f64, theta: f64, xi: f64, phi: f64) -> SqueezedCoherentState {
    SqueezedCoherentState::from_params(alpha, theta, xi, phi).expect("valid state")
}

fn max_abs(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Closed-form and fidelity checks against `analyze`.
pub fn formula_checks(seed: u64) -> Vec<CheckResult> {
    let mut rng = rng_for(seed, Scope::Formulas);
    let cpa = LossyBeamSplitter::cpa();
    let mut out = Vec::new();

    let mut c = Check::new("coherent CPA: identical inputs and single beam", &["analyze"], FORMULA_TOL);
    for _ in 0..FORMULA_SCENARIOS {
        let s = state(rng.random_range(0.1..3.0), rng.random_range(-PI..PI), 0.0, 0.0);
        let both = analyze(&cpa, &s, &s).expect("nonzero input");
        let single = analyze(&cpa, &s, &SqueezedCoherentState::vacuum()).expect("nonzero input");
        c.record((both.coeff_c - 1.0).abs().max((both.coeff_i - 1.0).abs()));
        c.record((single.coeff_c - 0.5).abs().max((single.coeff_i - 0.5).abs()));
    }
    out.push(c.finish());

    let mut c = Check::new("fidelity form of coherence absorption", &["coeff_from_fidelity", "analyze"], FORMULA_TOL);
    for _ in 0..FORMULA_SCENARIOS {
        let bs = if rng.random_bool(0.1) { cpa } else { random_splitter(&mut rng) };
        let a = amp(rng.random_range(0.1..2.0), rng.random_range(-PI..PI));
        let b = amp(rng.random_range(0.0..2.0), rng.random_range(-PI..PI));
        let report = analyze(&bs, &SqueezedCoherentState::coherent(a), &SqueezedCoherentState::coherent(b))
            .expect("nonzero input");
        let via_fidelity = coeff_from_fidelity(&bs, &a, &b).expect("nonzero input");
        c.record((via_fidelity - report.coeff_c).abs());
    }
    out.push(c.finish());

    let mut c = Check::new("identity ΔI − ΔC = (I_in − C_in)·A", &["analyze"], FORMULA_TOL);
    let mut direct = Check::new("output coherence via Γ vs output means", &["analyze", "output_means"], FORMULA_TOL);
    for _ in 0..FORMULA_SCENARIOS {
        let bs = random_splitter(&mut rng);
        let in1 = random_state(&mut rng, 2.0, 1.5);
        let in2 = random_state(&mut rng, 2.0, 1.5);
        let r = analyze(&bs, &in1, &in2).expect("nonzero input");
        c.record(r.identity_residual.abs());
        direct.record((r.c_out - output_coherence_direct(&bs, &in1, &in2)).abs());
    }
    out.push(c.finish());
    out.push(direct.finish());

    out.extend(slice_checks(&mut rng));
    out.extend(structural_formula_checks());
    out
}

/// Each closed form against `analyze` on its own parameter slice.
fn slice_checks(rng: &mut ChaCha8Rng) -> Vec<CheckResult> {
    let cpa = LossyBeamSplitter::cpa();
    let mut eq = Check::new("equal-squeezing coherence closed form", &["coeff_c_equal_squeezing", "analyze"], FORMULA_TOL);
    let mut uneq = Check::new("unequal-squeezing coherence closed form", &["coeff_c_unequal_squeezing", "analyze"], FORMULA_TOL);
    let mut one_c = Check::new("one-squeezed coherence closed form", &["coeff_c_one_squeezed", "analyze"], FORMULA_TOL);
    let mut one_i = Check::new("one-squeezed intensity closed form", &["coeff_i_one_squeezed", "analyze"], FORMULA_TOL);
    let mut eq_i = Check::new("equal-squeezing intensity closed form", &["coeff_i_equal_squeezing", "analyze"], FORMULA_TOL);
    for _ in 0..FORMULA_SCENARIOS {
        let mag = rng.random_range(0.2..2.0);
        let theta = rng.random_range(-PI..PI);
        let xi = rng.random_range(-1.5..1.5);
        let xi2 = rng.random_range(-1.5..1.5);

        let moved = state(mag, theta, xi, 0.0);
        let fixed = state(mag, 0.0, xi, 0.0);
        let r = analyze(&cpa, &moved, &fixed).expect("nonzero input");
        eq.record((coeff_c_equal_squeezing(xi, theta) - r.coeff_c).abs());
        let alpha_sq = mag * mag;
        eq_i.record((coeff_i_equal_squeezing(xi, theta, alpha_sq).expect("alpha > 0") - r.coeff_i).abs());

        let r = analyze(&cpa, &state(mag, 0.0, xi, 0.0), &state(mag, 0.0, xi2, 0.0)).expect("nonzero input");
        uneq.record((coeff_c_unequal_squeezing(xi, xi2) - r.coeff_c).abs());

        let r = analyze(&cpa, &state(mag, 0.0, xi, 0.0), &state(mag, 0.0, 0.0, 0.0)).expect("nonzero input");
        one_c.record((coeff_c_one_squeezed(xi) - r.coeff_c).abs());
        one_i.record((coeff_i_one_squeezed(xi, alpha_sq).expect("alpha > 0") - r.coeff_i).abs());
    }
    vec![eq.finish(), uneq.finish(), one_c.finish(), one_i.finish(), eq_i.finish()]
}

/// Grid, saturation and parity properties of the closed forms.
fn structural_formula_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let grid: Vec<f64> = (0..121).map(|i| (-3.0 * (120 - i) as f64 + 3.0 * i as f64) / 120.0).collect();
    let mut diag = Check::new("unequal squeezing: diagonal equals 1", &["coeff_c_unequal_squeezing"], FORMULA_TOL);
    let mut off = Check::new("unequal squeezing: off-diagonal below 1", &["coeff_c_unequal_squeezing"], STRICT_MARGIN);
    let mut margin = f64::INFINITY;
    for (i, &x1) in grid.iter().enumerate() {
        for (j, &x2) in grid.iter().enumerate() {
            let v = coeff_c_unequal_squeezing(x1, x2);
            if i == j {
                diag.record((v - 1.0).abs());
            } else {
                off.record(0.0);
                margin = margin.min(1.0 - v);
            }
        }
    }
    out.push(diag.finish());
    out.push(off.finish_margin(margin));

    let mut sat = Check::new("saturation at |ξ| = 20", &["coeff_c_one_squeezed", "coeff_i_equal_squeezing"], SATURATION_TOL);
    sat.record((coeff_c_one_squeezed(20.0) - 0.5).abs());
    sat.record((coeff_c_one_squeezed(-20.0) - 0.5).abs());
    sat.record((coeff_i_equal_squeezing(20.0, 0.0, 1.0).expect("alpha > 0") - 0.5).abs());
    out.push(sat.finish());

    let mut even = Check::new("one-squeezed coherence even in ξ", &["coeff_c_one_squeezed"], 0.0);
    for i in 0..=500 {
        let xi = 20.0 * i as f64 / 500.0;
        even.record((coeff_c_one_squeezed(xi) - coeff_c_one_squeezed(-xi)).abs());
    }
    out.push(even.finish());

    let mut sym = Check::new("one-squeezed intensity symmetric at |α|² = 1e6, ξ = ±2", &["coeff_i_one_squeezed"], FIG5_SYMMETRIC_GAP);
    sym.record(
        (coeff_i_one_squeezed(2.0, 1e6).expect("alpha > 0") - coeff_i_one_squeezed(-2.0, 1e6).expect("alpha > 0")).abs(),
    );
    out.push(sym.finish());
    out
}

/// Propagation of identical inputs through the CPA dilation.
pub fn gaussian_checks(seed: u64) -> Vec<CheckResult> {
    let mut rng = rng_for(seed, Scope::Gaussian);
    let cpa = LossyBeamSplitter::cpa();
    let u = dilation(&cpa).expect("CPA splitter is passive");
    let part = ModePartition::optical_device();

    let mut means = Check::new("CPA optical means vanish", &["gaussian"], GAUSSIAN_TOL);
    let mut intensity = Check::new("CPA optical intensity equals sinh²ξ", &["gaussian", "states"], GAUSSIAN_TOL);
    let mut defect = Check::new("CPA optical/device factorization", &["gaussian"], GAUSSIAN_TOL);
    let mut pure = Check::new("CPA optical purity equals 1", &["gaussian"], GAUSSIAN_TOL);
    let mut half = Check::new("CPA half-squeezing in superposition modes", &["gaussian", "states"], GAUSSIAN_TOL);
    let mut predicted = Check::new("CPA output equals predicted product state", &["gaussian", "predicted_output"], GAUSSIAN_TOL);
    for _ in 0..GAUSSIAN_SCENARIOS {
        let s = random_state(&mut rng, 2.0, 2.0);
        let out = propagate(&input_state(&s, &s), &u).expect("four modes");
        let n = intensities(&out);
        means.record(out.mode_mean(0).norm().max(out.mode_mean(1).norm()));
        intensity.record((n[0] + n[1] - s.zeta.xi().sinh().powi(2)).abs());
        defect.record(factorization_defect(&out, &part));
        pure.record((1.0 - purity(&out, part.optical()).expect("valid subset")).abs());

        let rotated = out.apply_passive(&superposition_basis()).expect("four modes");
        let squeezed = quadrature_moments(&SqueezedCoherentState::squeezed_vacuum(s.zeta)).1;
        let mut worst = 0.0f64;
        for (mode, target) in [(0, squeezed), (1, Matrix2::identity() * 0.5), (2, squeezed), (3, Matrix2::identity() * 0.5)] {
            worst = worst.max((rotated.mode_cov(mode) - target).abs().max());
        }
        let variances = rotated.mode_cov(0).symmetric_eigenvalues();
        let (lo, hi) = (variances.min(), variances.max());
        let xi = s.zeta.xi().abs();
        worst = worst.max((lo - (-2.0 * xi).exp() / 2.0).abs()).max((hi - (2.0 * xi).exp() / 2.0).abs());
        half.record(worst);

        let expected = predicted_output(&s.alpha, &s.zeta);
        predicted.record(
            max_abs(out.cov(), expected.cov()).max(
                out.mean().iter().zip(expected.mean().iter()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
            ),
        );
    }

    let mut cross = Check::new("Gaussian intensities reproduce analyze", &["gaussian", "analyze"], FORMULA_TOL);
    for _ in 0..GAUSSIAN_SCENARIOS {
        let bs = random_splitter(&mut rng);
        let in1 = random_state(&mut rng, 2.0, 1.5);
        let in2 = random_state(&mut rng, 2.0, 1.5);
        let out = propagate(&input_state(&in1, &in2), &dilation(&bs).expect("passive")).expect("four modes");
        let n = intensities(&out);
        let r = analyze(&bs, &in1, &in2).expect("nonzero input");
        let c_out = out.mode_mean(0).norm_sqr() + out.mode_mean(1).norm_sqr();
        cross.record((n[0] + n[1] - r.i_out).abs().max((c_out - r.c_out).abs()));
    }

    vec![
        means.finish(),
        intensity.finish(),
        defect.finish(),
        pure.finish(),
        half.finish(),
        predicted.finish(),
        cross.finish(),
    ]
}

fn oracle_quadratures(state: &crate::fock::FockState) -> (nalgebra::DVector<f64>, DMatrix<f64>) {
    measure(state).to_quadratures()
}

fn gaussian_residual(
    fock_mean: &nalgebra::DVector<f64>,
    fock_cov: &DMatrix<f64>,
    g: &GaussianState,
) -> f64 {
    let mean = fock_mean
        .iter()
        .zip(g.mean().iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    mean.max(max_abs(fock_cov, g.cov()))
}

/// Brute-force Fock-space confirmation of the Gaussian engine.
pub fn fock_checks(seed: u64) -> (Vec<CheckResult>, Vec<Observation>) {
    let mut rng = rng_for(seed, Scope::Fock);
    let config = OracleConfig::default();
    let cpa = LossyBeamSplitter::cpa();
    let u = dilation(&cpa).expect("CPA splitter is passive");
    let mut observations = Vec::new();

    // single-mode preparation uses a wide cutoff so the moment tail is negligible
    let mut prep = Check::new("prepared single-mode moments", &["fock", "states"], PREPARATION_TOL);
    let mut parity = Check::new("squeezed vacuum has no odd amplitudes", &["fock"], 0.0);
    for _ in 0..20 {
        let s = random_state(&mut rng, 1.5, 0.75);
        match prepare_squeezed_coherent(&s, 120, 1e-12) {
            Ok(f) => {
                let m = measure(&f);
                prep.record((m.means[0] - expect_annihilation(&s)).norm().max((m.numbers[0] - expect_number(&s)).abs()));
                prep.leak((1.0 - f.norm_sqr()).max(0.0));
            }
            Err(_) => prep.record(f64::INFINITY),
        }
        let vac = SqueezedCoherentState::squeezed_vacuum(s.zeta);
        match prepare_squeezed_coherent(&vac, 60, 1e-8) {
            Ok(f) => parity.record(f.amplitudes().iter().skip(1).step_by(2).map(|a| a.norm()).fold(0.0, f64::max)),
            Err(_) => parity.record(f64::INFINITY),
        }
    }

    let mut moments = Check::new("CPA oracle moments match Gaussian propagation", &["fock", "gaussian"], ORACLE_TOL);
    let mut fidelity = Check::new("CPA oracle optical state is the squeezed vacuum", &["fock", "predicted_output"], ORACLE_TOL);
    let mut oracle_purity = Check::new("CPA oracle optical purity", &["fock"], ORACLE_TOL);
    for _ in 0..FOCK_SCENARIOS {
        let s = random_state(&mut rng, 0.8, 0.3);
        match simulate(&cpa, &s, &s, &config) {
            Ok(run) => {
                moments.leak(run.total_leakage());
                fidelity.leak(run.total_leakage());
                let (mean, cov) = oracle_quadratures(&run.output);
                let g = propagate(&input_state(&s, &s), &u).expect("four modes");
                moments.record(gaussian_residual(&mean, &cov, &g));
                let rho = reduced_density(&run.output, &[0, 1]).expect("valid subset");
                oracle_purity.record((1.0 - rho.purity()).abs());
                match squeezed_difference_vacuum(&s.zeta, run.cutoff, config.tail_tol) {
                    Ok(target) => fidelity.record(1.0 - state_fidelity(&rho, &target).expect("same shape")),
                    Err(_) => fidelity.record(f64::INFINITY),
                }
            }
            Err(_) => {
                moments.record(f64::INFINITY);
                fidelity.record(f64::INFINITY);
                oracle_purity.record(f64::INFINITY);
            }
        }
    }

    // unequal squeezing leaves the optical modes entangled with the absorber
    let mut mixed = Check::new("unequal squeezing gives mixed optical state", &["fock"], STRICT_MARGIN);
    let in1 = state(0.5, 0.0, 0.4, 0.0);
    let in2 = state(0.5, 0.0, 0.0, 0.0);
    let margin = match simulate(&cpa, &in1, &in2, &config) {
        Ok(run) => {
            let p = reduced_density(&run.output, &[0, 1]).expect("valid subset").purity();
            observations.push(Observation {
                name: "oracle optical purity, ξ₁ = 0.4, ξ₂ = 0".into(),
                value: p,
            });
            let g = propagate(&input_state(&in1, &in2), &u).expect("four modes");
            observations.push(Observation {
                name: "Gaussian optical purity, ξ₁ = 0.4, ξ₂ = 0".into(),
                value: purity(&g, &[0, 1]).expect("valid subset"),
            });
            mixed.record(0.0);
            1.0 - p
        }
        Err(_) => {
            mixed.record(f64::INFINITY);
            f64::NEG_INFINITY
        }
    };

    // mismatch sensitivity is recorded only
    for (label, a2, x2) in [("|α₂| = |α₁| + 0.05", 0.75, 0.3), ("ξ₂ = ξ₁ + 0.05", 0.7, 0.35)] {
        let in1 = state(0.7, 0.0, 0.3, 0.0);
        let in2 = state(a2, 0.0, x2, 0.0);
        if let Ok(run) = simulate(&cpa, &in1, &in2, &config) {
            let rho = reduced_density(&run.output, &[0, 1]).expect("valid subset");
            if let Ok(target) = squeezed_difference_vacuum(&in1.zeta, run.cutoff, config.tail_tol) {
                observations.push(Observation {
                    name: format!("oracle fidelity with squeezed vacuum, {label}"),
                    value: state_fidelity(&rho, &target).expect("same shape"),
                });
            }
        }
    }

    let checks = vec![
        prep.finish(),
        parity.finish(),
        moments.finish(),
        fidelity.finish(),
        oracle_purity.finish(),
        mixed.finish_margin(margin),
    ];
    (checks, observations)
}

pub fn verify(scope: Scope, seed: u64) -> VerifyReport {
    let mut checks = Vec::new();
    let mut observations = Vec::new();
    if matches!(scope, Scope::All | Scope::Formulas) {
        checks.extend(formula_checks(seed));
    }
    if matches!(scope, Scope::All | Scope::Gaussian) {
        checks.extend(gaussian_checks(seed));
    }
    if matches!(scope, Scope::All | Scope::Fock) {
        let (c, o) = fock_checks(seed);
        checks.extend(c);
        observations.extend(o);
    }
    VerifyReport {
        scope,
        seed,
        pass: checks.iter().all(|c| c.pass),
        checks,
        observations,
    }
}

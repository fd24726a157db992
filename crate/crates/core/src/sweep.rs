//! Figure-data sweeps over the closed-form absorption coefficients.
//!
//! A [`SweepSpec`] names a target, its axes and fixed parameters. Grid points
//! are evaluated in parallel and collected in row-major order over the axes,
//! so the output bytes depend only on the spec.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::absorption::{
    analyze, coeff_c_equal_squeezing, coeff_c_one_squeezed, coeff_c_unequal_squeezing,
    coeff_i_equal_squeezing, coeff_i_one_squeezed,
};
use crate::beamsplitter::LossyBeamSplitter;
use crate::error::{Error, Result};
use crate::states::SqueezedCoherentState;

pub const MAX_ABS_XI: f64 = 20.0;
pub const MAX_ALPHA_SQ: f64 = 1e9;
pub const FIG5_ALPHA_SQ: [f64; 4] = [1e-3, 1.0, 1e3, 1e6];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Fig2,
    Fig3a,
    Fig3b,
    Fig4,
    Fig5,
    Custom,
}

impl Target {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "fig2" => Ok(Self::Fig2),
            "fig3a" => Ok(Self::Fig3a),
            "fig3b" => Ok(Self::Fig3b),
            "fig4" => Ok(Self::Fig4),
            "fig5" => Ok(Self::Fig5),
            "custom" => Ok(Self::Custom),
            other => Err(Error::InvalidSpec {
                field: "target".into(),
                reason: format!("unknown target `{other}`"),
            }),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig2 => "fig2",
            Self::Fig3a => "fig3a",
            Self::Fig3b => "fig3b",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Custom => "custom",
        }
    }

    /// Axis names in row-major order.
    pub fn axis_names(self) -> &'static [&'static str] {
        match self {
            Self::Fig2 | Self::Fig4 => &["xi", "theta"],
            Self::Fig3a => &["xi1", "xi2"],
            Self::Fig3b | Self::Fig5 => &["xi"],
            Self::Custom => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidSpec {
                field: "format".into(),
                reason: format!("unknown format `{other}`"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(name: &str, start: f64, stop: f64, count: usize) -> Self {
        Self {
            name: name.to_string(),
            start,
            stop,
            count,
        }
    }

    /// Point `i` of `count`, endpoints exact and `points[i] = −points[n−1−i]`
    /// whenever `start = −stop`.
    pub fn point(&self, i: usize) -> f64 {
        let n = (self.count - 1) as f64;
        let i = i as f64;
        (self.start * (n - i) + self.stop * i) / n
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }
}

/// Parameters accepted by the `custom` target; each is either an axis or fixed.
pub const CUSTOM_PARAMS: [&str; 8] = [
    "alpha1", "theta1", "xi1", "phi1", "alpha2", "theta2", "xi2", "phi2",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub target: Target,
    pub axes: Vec<Axis>,
    pub fixed: BTreeMap<String, f64>,
    pub out: PathBuf,
    pub format: Format,
}

impl SweepSpec {
    /// Default domains for each figure target.
    pub fn for_target(target: Target, out: impl Into<PathBuf>, format: Format) -> Self {
        let xi5 = |name: &str, n| Axis::new(name, -5.0, 5.0, n);
        let (axes, fixed) = match target {
            Target::Fig2 => (vec![xi5("xi", 101), Axis::new("theta", 0.0, TAU, 101)], vec![]),
            Target::Fig3a => (
                vec![Axis::new("xi1", -3.0, 3.0, 121), Axis::new("xi2", -3.0, 3.0, 121)],
                vec![],
            ),
            Target::Fig3b | Target::Fig5 => (vec![xi5("xi", 501)], vec![]),
            Target::Fig4 => (
                vec![xi5("xi", 101), Axis::new("theta", 0.0, TAU, 101)],
                vec![("alpha_sq", 1.0)],
            ),
            Target::Custom => (
                vec![Axis::new("xi1", -2.0, 2.0, 41)],
                vec![("alpha1", 1.0), ("alpha2", 1.0)],
            ),
        };
        Self {
            target,
            axes,
            fixed: fixed.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            out: out.into(),
            format,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |field: &str, reason: String| Error::InvalidSpec {
            field: field.to_string(),
            reason,
        };
        if self.target != Target::Custom {
            let names: Vec<&str> = self.axes.iter().map(|a| a.name.as_str()).collect();
            if names != self.target.axis_names() {
                return Err(invalid(
                    "axes",
                    format!(
                        "{} expects axes {:?}, got {names:?}",
                        self.target.name(),
                        self.target.axis_names()
                    ),
                ));
            }
        } else if self.axes.is_empty() {
            return Err(invalid("axes", "custom sweep needs at least one axis".into()));
        }
        for axis in &self.axes {
            let field = format!("axes.{}", axis.name);
            if axis.count < 2 {
                return Err(invalid(&field, format!("count must be ≥ 2, got {}", axis.count)));
            }
            if !(axis.start.is_finite() && axis.stop.is_finite()) {
                return Err(invalid(&field, "range must be finite".into()));
            }
            if axis.name.starts_with("xi") && axis.start.abs().max(axis.stop.abs()) > MAX_ABS_XI {
                return Err(invalid(&field, format!("|ξ| must stay ≤ {MAX_ABS_XI}")));
            }
            if axis.name.starts_with("alpha") && (axis.start < 0.0 || axis.stop < 0.0) {
                return Err(invalid(&field, "amplitudes must be non-negative".into()));
            }
            if self.target == Target::Custom && !CUSTOM_PARAMS.contains(&axis.name.as_str()) {
                return Err(invalid(&field, "not a custom sweep parameter".into()));
            }
        }
        for (name, &value) in &self.fixed {
            let field = format!("fixed.{name}");
            if !value.is_finite() {
                return Err(invalid(&field, "must be finite".into()));
            }
            let allowed = match self.target {
                Target::Fig4 => name == "alpha_sq",
                Target::Custom => {
                    CUSTOM_PARAMS.contains(&name.as_str())
                        && !self.axes.iter().any(|a| &a.name == name)
                }
                _ => false,
            };
            if !allowed {
                return Err(invalid(&field, format!("not a parameter of {}", self.target.name())));
            }
            if name.starts_with("xi") && value.abs() > MAX_ABS_XI {
                return Err(invalid(&field, format!("|ξ| must stay ≤ {MAX_ABS_XI}")));
            }
            if name == "alpha_sq" && !(value > 0.0 && value <= MAX_ALPHA_SQ) {
                return Err(invalid(&field, format!("|α|² must lie in (0, {MAX_ALPHA_SQ:e}]")));
            }
            if name.starts_with("alpha") && name != "alpha_sq" {
                if value < 0.0 || value * value > MAX_ALPHA_SQ {
                    return Err(invalid(&field, format!("|α|² must lie in [0, {MAX_ALPHA_SQ:e}]")));
                }
            }
        }
        Ok(())
    }
}

/// Evaluated sweep: named columns, one row per grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    pub target: Target,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// UTF-8, comma-separated, header row, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{v:.16e}").expect("writing to a String");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dataset is always serializable")
    }

    pub fn write(&self, path: &Path, format: Format) -> Result<()> {
        let body = match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json() + "\n",
        };
        std::fs::write(path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }
}

/// Cartesian product of the axes, first axis slowest.
fn grid(axes: &[Axis]) -> Vec<Vec<f64>> {
    let mut points = vec![Vec::new()];
    for axis in axes {
        let values = axis.points();
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect();
    }
    points
}

fn custom_value(spec: &SweepSpec, point: &[f64]) -> Result<Vec<f64>> {
    let mut params: BTreeMap<&str, f64> = CUSTOM_PARAMS.iter().map(|p| (*p, 0.0)).collect();
    for (k, v) in &spec.fixed {
        params.insert(k.as_str(), *v);
    }
    for (axis, v) in spec.axes.iter().zip(point) {
        params.insert(axis.name.as_str(), *v);
    }
    let in1 = SqueezedCoherentState::from_params(
        params["alpha1"],
        params["theta1"],
        params["xi1"],
        params["phi1"],
    )?;
    let in2 = SqueezedCoherentState::from_params(
        params["alpha2"],
        params["theta2"],
        params["xi2"],
        params["phi2"],
    )?;
    let report = analyze(&LossyBeamSplitter::cpa(), &in1, &in2)?;
    Ok(vec![report.coeff_c, report.coeff_i])
}

/// Evaluates the spec without writing anything.
pub fn evaluate(spec: &SweepSpec) -> Result<Dataset> {
    spec.validate()?;
    let mut columns: Vec<String> = spec.axes.iter().map(|a| a.name.clone()).collect();
    let points = grid(&spec.axes);
    let rows: Vec<Vec<f64>> = match spec.target {
        Target::Fig2 => {
            columns.push("coeff_c".into());
            points
                .par_iter()
                .map(|p| vec![p[0], p[1], coeff_c_equal_squeezing(p[0], p[1])])
                .collect()
        }
        Target::Fig3a => {
            columns.push("coeff_c".into());
            points
                .par_iter()
                .map(|p| vec![p[0], p[1], coeff_c_unequal_squeezing(p[0], p[1])])
                .collect()
        }
        Target::Fig3b => {
            columns.push("coeff_c".into());
            points
                .par_iter()
                .map(|p| vec![p[0], coeff_c_one_squeezed(p[0])])
                .collect()
        }
        Target::Fig4 => {
            columns.push("coeff_i".into());
            let alpha_sq = spec.fixed.get("alpha_sq").copied().unwrap_or(1.0);
            points
                .par_iter()
                .map(|p| Ok(vec![p[0], p[1], coeff_i_equal_squeezing(p[0], p[1], alpha_sq)?]))
                .collect::<Result<_>>()?
        }
        Target::Fig5 => {
            columns.insert(0, "alpha_sq".into());
            columns.push("coeff_i".into());
            let with_amp: Vec<(f64, f64)> = FIG5_ALPHA_SQ
                .iter()
                .flat_map(|a| points.iter().map(move |p| (*a, p[0])))
                .collect();
            with_amp
                .par_iter()
                .map(|&(a, xi)| Ok(vec![a, xi, coeff_i_one_squeezed(xi, a)?]))
                .collect::<Result<_>>()?
        }
        Target::Custom => {
            columns.push("coeff_c".into());
            columns.push("coeff_i".into());
            points
                .par_iter()
                .map(|p| {
                    let mut row = p.clone();
                    row.extend(custom_value(spec, p)?);
                    Ok(row)
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(Dataset {
        target: spec.target,
        columns,
        rows,
    })
}

/// Evaluates the spec and writes the dataset to `spec.out`.
pub fn sweep(spec: &SweepSpec) -> Result<Dataset> {
    let data = evaluate(spec)?;
    data.write(&spec.out, spec.format)?;
    Ok(data)
}

/// One structural assertion about a regenerated figure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoldenCheck {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl GoldenCheck {
    fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    fn at_least(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            pass: value >= tolerance,
        }
    }
}

pub const GOLDEN_EXACT_TOL: f64 = 1e-12;
pub const FIG5_SYMMETRIC_GAP: f64 = 3e-5;
/// Lower bound on `R = sinh²ξ/|α|²` at `ξ = ±2` for the asymmetric curve.
pub const FIG5_ASYMMETRIC_RATIO: f64 = 1e3;
/// Lower bound on the largest `|f(ξ) − f(−ξ)|` of the asymmetric curve.
pub const FIG5_ASYMMETRIC_GAP: f64 = 1e-3;

fn range_excess(values: &[f64], lo: f64, hi: f64) -> f64 {
    values
        .iter()
        .map(|v| (lo - v).max(v - hi).max(0.0))
        .fold(0.0, f64::max)
}

/// Largest `|f(x_i) − f(x_{n−1−i})|` of a curve sampled on a symmetric axis.
fn mirror_gap(values: &[f64]) -> f64 {
    let n = values.len();
    (0..n / 2)
        .map(|i| (values[i] - values[n - 1 - i]).abs())
        .fold(0.0, f64::max)
}

fn value_at(data: &Dataset, key: &[(usize, f64)], col: usize) -> Option<f64> {
    data.rows
        .iter()
        .find(|r| key.iter().all(|&(c, v)| (r[c] - v).abs() < 1e-12))
        .map(|r| r[col])
}

/// Structural assertions for a figure dataset generated with default axes.
pub fn golden_checks(data: &Dataset) -> Vec<GoldenCheck> {
    let last = data.columns.len() - 1;
    let values: Vec<f64> = data.rows.iter().map(|r| r[last]).collect();
    let missing = |name: &str| GoldenCheck {
        name: name.into(),
        value: f64::NAN,
        tolerance: 0.0,
        pass: false,
    };
    let exact = |name: &str, found: Option<f64>, expected: f64| match found {
        Some(v) => GoldenCheck::at_most(name, (v - expected).abs(), GOLDEN_EXACT_TOL),
        None => missing(name),
    };
    let mut checks = Vec::new();
    match data.target {
        Target::Fig2 => {
            checks.push(GoldenCheck::at_most("values in [0, 1]", range_excess(&values, 0.0, 1.0), 0.0));
            let theta0 = data.rows.iter().filter(|r| r[1] == 0.0).map(|r| (r[2] - 1.0).abs());
            checks.push(GoldenCheck::at_most(
                "theta = 0 gives perfect absorption",
                theta0.fold(0.0, f64::max),
                GOLDEN_EXACT_TOL,
            ));
            let xi0 = data
                .rows
                .iter()
                .filter(|r| r[0] == 0.0)
                .map(|r| (r[2] - 0.5 - 0.5 * r[1].cos()).abs());
            checks.push(GoldenCheck::at_most(
                "xi = 0 reduces to coherent interference",
                xi0.fold(0.0, f64::max),
                GOLDEN_EXACT_TOL,
            ));
        }
        Target::Fig3a => {
            checks.push(GoldenCheck::at_most("values in [1/2, 1]", range_excess(&values, 0.5, 1.0), 0.0));
            let diag = data.rows.iter().filter(|r| r[0] == r[1]).map(|r| (r[2] - 1.0).abs());
            checks.push(GoldenCheck::at_most(
                "diagonal is perfect absorption",
                diag.fold(0.0, f64::max),
                GOLDEN_EXACT_TOL,
            ));
            let off = data
                .rows
                .iter()
                .filter(|r| r[0] != r[1])
                .map(|r| 1.0 - r[2])
                .fold(f64::INFINITY, f64::min);
            checks.push(GoldenCheck::at_least("off-diagonal stays below 1", off, 1e-6));
            let n = (values.len() as f64).sqrt() as usize;
            let swap = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| (values[i * n + j] - values[j * n + i]).abs())
                .fold(0.0, f64::max);
            checks.push(GoldenCheck::at_most("symmetric under xi1 <-> xi2", swap, GOLDEN_EXACT_TOL));
        }
        Target::Fig3b => {
            checks.push(GoldenCheck::at_most("even in xi", mirror_gap(&values), GOLDEN_EXACT_TOL));
            checks.push(exact("xi = 0 gives 1", value_at(data, &[(0, 0.0)], 1), 1.0));
            let mid = values.len() / 2;
            let rising = values[..=mid].windows(2).all(|w| w[1] >= w[0]);
            checks.push(GoldenCheck::at_least(
                "maximum at xi = 0",
                if rising { 1.0 } else { 0.0 },
                1.0,
            ));
            checks.push(GoldenCheck::at_most(
                "edges approach 1/2",
                values[0] - 0.5,
                0.01,
            ));
        }
        Target::Fig4 => {
            checks.push(GoldenCheck::at_most("values in [0, 1]", range_excess(&values, 0.0, 1.0), 0.0));
            checks.push(exact("xi = 0, theta = 0 gives 1", value_at(data, &[(0, 0.0), (1, 0.0)], 2), 1.0));
        }
        Target::Fig5 => {
            let curve = |a: f64| -> Vec<&Vec<f64>> { data.rows.iter().filter(|r| r[0] == a).collect() };
            let gap_at = |a: f64, xi: f64| -> Option<f64> {
                Some((value_at(data, &[(0, a), (1, xi)], 2)? - value_at(data, &[(0, a), (1, -xi)], 2)?).abs())
            };
            match gap_at(1e6, 2.0) {
                Some(g) => checks.push(GoldenCheck::at_most(
                    "|alpha|^2 = 1e6 symmetric at xi = ±2",
                    g,
                    FIG5_SYMMETRIC_GAP,
                )),
                None => checks.push(missing("|alpha|^2 = 1e6 symmetric at xi = ±2")),
            }
            checks.push(GoldenCheck::at_least(
                "|alpha|^2 = 1e-3 has R >> 1 at xi = ±2",
                2f64.sinh().powi(2) / 1e-3,
                FIG5_ASYMMETRIC_RATIO,
            ));
            let low: Vec<f64> = curve(1e-3).iter().map(|r| r[2]).collect();
            checks.push(GoldenCheck::at_least(
                "|alpha|^2 = 1e-3 asymmetric",
                mirror_gap(&low),
                FIG5_ASYMMETRIC_GAP,
            ));
            for a in FIG5_ALPHA_SQ {
                checks.push(exact(
                    &format!("|alpha|^2 = {a:e} gives 1 at xi = 0"),
                    value_at(data, &[(0, a), (1, 0.0)], 2),
                    1.0,
                ));
            }
        }
        Target::Custom => {}
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(target: Target) -> Dataset {
        evaluate(&SweepSpec::for_target(target, "unused", Format::Csv)).unwrap()
    }

    #[test]
    fn axis_points_are_mirror_symmetric() {
        let axis = Axis::new("xi", -5.0, 5.0, 501);
        let p = axis.points();
        assert_eq!(p[0], -5.0);
        assert_eq!(p[500], 5.0);
        assert_eq!(p[250], 0.0);
        for i in 0..501 {
            assert_eq!(p[i], -p[500 - i]);
        }
    }

    #[test]
    fn grid_is_row_major() {
        let g = grid(&[Axis::new("a", 0.0, 1.0, 2), Axis::new("b", 0.0, 2.0, 3)]);
        assert_eq!(g, vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, 2.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![1.0, 2.0]
        ]);
    }

    #[test]
    fn figure_examples() {
        let fig3b = data(Target::Fig3b);
        assert_eq!(value_at(&fig3b, &[(0, 0.0)], 1), Some(1.0));
        let fig4 = data(Target::Fig4);
        assert_eq!(value_at(&fig4, &[(0, 0.0), (1, 0.0)], 2), Some(1.0));
        let fig5 = data(Target::Fig5);
        assert_eq!(fig5.rows.len(), 4 * 501);
        assert_eq!(fig5.columns, ["alpha_sq", "xi", "coeff_i"]);
    }

    #[test]
    fn every_golden_check_passes() {
        for t in [Target::Fig2, Target::Fig3a, Target::Fig3b, Target::Fig4, Target::Fig5] {
            for c in golden_checks(&data(t)) {
                assert!(c.pass, "{}: {} ({} vs {})", t.name(), c.name, c.value, c.tolerance);
            }
        }
    }

    #[test]
    fn values_reproduce_closed_forms() {
        let fig2 = data(Target::Fig2);
        for r in fig2.rows.iter().step_by(97) {
            assert_eq!(r[2], coeff_c_equal_squeezing(r[0], r[1]));
        }
    }

    #[test]
    fn csv_has_header_and_17_digits() {
        let csv = data(Target::Fig3b).to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("xi,coeff_c"));
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').next(), Some("-5.0000000000000000e0"));
        for field in first.split(',') {
            let parsed: f64 = field.parse().unwrap();
            assert_eq!(format!("{parsed:.16e}"), field);
        }
    }

    #[test]
    fn invalid_specs_name_the_field() {
        let mut spec = SweepSpec::for_target(Target::Fig3b, "x", Format::Csv);
        spec.axes[0].count = 1;
        match spec.validate() {
            Err(Error::InvalidSpec { field, .. }) => assert_eq!(field, "axes.xi"),
            other => panic!("{other:?}"),
        }
        let mut spec = SweepSpec::for_target(Target::Fig4, "x", Format::Csv);
        spec.fixed.insert("alpha_sq".into(), 2e9);
        assert!(matches!(spec.validate(), Err(Error::InvalidSpec { .. })));
        let mut spec = SweepSpec::for_target(Target::Fig3b, "x", Format::Csv);
        spec.axes[0].stop = 25.0;
        assert!(matches!(spec.validate(), Err(Error::InvalidSpec { .. })));
        assert!(Target::parse("fig9").is_err());
    }

    #[test]
    fn custom_sweep_uses_analyze() {
        let d = data(Target::Custom);
        assert_eq!(d.columns, ["xi1", "coeff_c", "coeff_i"]);
        let mid = &d.rows[20];
        assert_eq!(mid[0], 0.0);
        assert!((mid[1] - 1.0).abs() < 1e-12 && (mid[2] - 1.0).abs() < 1e-12);
    }
}

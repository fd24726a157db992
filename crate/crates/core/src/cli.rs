//! Command-line front end: `sweep`, `verify` and `analyze`.
//!
//! Every value is resolved as flag, then config file, then default. Results
//! go to standard output as JSON; failures are written to standard error as
//! `{"error": kind, "message": ...}` with the exit status from [`exit_code`].

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::absorption::{analyze, AbsorptionReport};
use crate::beamsplitter::{dilation, LossyBeamSplitter};
use crate::error::{Error, Result};
use crate::gaussian::{input_state, propagate, OutputSummary};
use crate::states::SqueezedCoherentState;
use crate::sweep::{self, Axis, Format, GoldenCheck, SweepSpec, Target};
use crate::verify::{self, Scope, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const DEFAULT_SEED: u64 = 42;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_INVALID_INPUT,
    }
}

#[derive(Debug, Parser)]
#[command(name = "cpa", version, about = "Coherent perfect absorption of squeezed coherent light")]
pub struct Cli {
    /// Key = value config file; flags take precedence over its entries.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a figure dataset (fig2, fig3a, fig3b, fig4, fig5 or custom).
    Sweep(SweepArgs),
    /// Run the cross-engine verification suite and print its JSON report.
    Verify(VerifyArgs),
    /// Absorption report for one scenario.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args, Default)]
pub struct SweepArgs {
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Fixed |α|² for fig4.
    #[arg(long)]
    pub alpha_sq: Option<f64>,
    /// Axis override `name=start:stop:count`, repeatable.
    #[arg(long = "axis")]
    pub axes: Vec<String>,
    /// Fixed parameter `name=value` for the custom target, repeatable.
    #[arg(long = "fixed")]
    pub fixed: Vec<String>,
}

#[derive(Debug, Args, Default)]
pub struct VerifyArgs {
    /// all, formulas, gaussian or fock.
    #[arg(long)]
    pub scope: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Default)]
pub struct AnalyzeArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_mag: Option<f64>,
    /// Alternative to --alpha-mag: the input photon number |α|².
    #[arg(long, conflicts_with = "alpha_mag")]
    pub alpha_sq: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Second beam; each unset value copies the first beam.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_mag2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi2: Option<f64>,
    /// Send vacuum into the second port.
    #[arg(long)]
    pub single_beam: bool,
    /// Splitter coefficients; default is the CPA splitter t = 1/2, r = −1/2.
    #[arg(long, allow_hyphen_values = true)]
    pub t_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub r_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub r_im: Option<f64>,
    /// Add the Gaussian output-state summary.
    #[arg(long)]
    pub gaussian: bool,
}

/// Config-file entries; every key mirrors a long flag.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    pub target: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub scope: Option<String>,
    pub seed: Option<u64>,
    pub alpha_mag: Option<f64>,
    pub alpha_sq: Option<f64>,
    pub theta: Option<f64>,
    pub xi: Option<f64>,
    pub phi: Option<f64>,
    pub alpha_mag2: Option<f64>,
    pub theta2: Option<f64>,
    pub xi2: Option<f64>,
    pub phi2: Option<f64>,
    pub single_beam: Option<bool>,
    pub t_re: Option<f64>,
    pub t_im: Option<f64>,
    pub r_re: Option<f64>,
    pub r_im: Option<f64>,
    pub gaussian: Option<bool>,
    pub axis: Option<Vec<String>>,
    pub fixed: Option<BTreeMap<String, f64>>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidSpec {
            field: "config".into(),
            reason: e.message().to_string(),
        })
    }
}

fn parse_axis(text: &str) -> Result<Axis> {
    let bad = || Error::InvalidSpec {
        field: "axis".into(),
        reason: format!("expected name=start:stop:count, got `{text}`"),
    };
    let (name, range) = text.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = range.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok(Axis::new(
        name.trim(),
        parts[0].trim().parse().map_err(|_| bad())?,
        parts[1].trim().parse().map_err(|_| bad())?,
        parts[2].trim().parse().map_err(|_| bad())?,
    ))
}

fn parse_fixed(text: &str) -> Result<(String, f64)> {
    let bad = || Error::InvalidSpec {
        field: "fixed".into(),
        reason: format!("expected name=value, got `{text}`"),
    };
    let (name, value) = text.split_once('=').ok_or_else(bad)?;
    Ok((name.trim().to_string(), value.trim().parse().map_err(|_| bad())?))
}

/// Resolved sweep spec plus whether its axes are the figure defaults.
pub fn resolve_sweep(args: &SweepArgs, cfg: &Config) -> Result<(SweepSpec, bool)> {
    let target = Target::parse(args.target.as_deref().or(cfg.target.as_deref()).unwrap_or("fig2"))?;
    let format = Format::parse(args.format.as_deref().or(cfg.format.as_deref()).unwrap_or("csv"))?;
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from(format!("{}.{}", target.name(), if format == Format::Csv { "csv" } else { "json" })));
    let mut spec = SweepSpec::for_target(target, out, format);

    let axis_texts: Vec<String> = if !args.axes.is_empty() {
        args.axes.clone()
    } else {
        cfg.axis.clone().unwrap_or_default()
    };
    let default_axes = axis_texts.is_empty();
    if !default_axes {
        let overrides = axis_texts.iter().map(|t| parse_axis(t)).collect::<Result<Vec<_>>>()?;
        if target == Target::Custom {
            spec.axes = overrides;
        } else {
            for o in overrides {
                let slot = spec.axes.iter_mut().find(|a| a.name == o.name).ok_or_else(|| Error::InvalidSpec {
                    field: format!("axes.{}", o.name),
                    reason: format!("not an axis of {}", target.name()),
                })?;
                *slot = o;
            }
        }
    }

    let mut fixed = cfg.fixed.clone().unwrap_or_default();
    for text in &args.fixed {
        let (k, v) = parse_fixed(text)?;
        fixed.insert(k, v);
    }
    if let Some(a) = args.alpha_sq.or(cfg.alpha_sq) {
        fixed.insert("alpha_sq".into(), a);
    }
    if target == Target::Custom {
        for axis in &spec.axes {
            spec.fixed.remove(&axis.name);
        }
    }
    spec.fixed.extend(fixed);
    spec.validate()?;
    Ok((spec, default_axes))
}

/// Splitter and input states for `analyze`.
pub fn resolve_analyze(
    args: &AnalyzeArgs,
    cfg: &Config,
) -> Result<(LossyBeamSplitter, SqueezedCoherentState, SqueezedCoherentState)> {
    let alpha_sq = args.alpha_sq.or(if args.alpha_mag.is_some() { None } else { cfg.alpha_sq });
    let alpha_mag = match (args.alpha_mag.or(if args.alpha_sq.is_some() { None } else { cfg.alpha_mag }), alpha_sq) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidParameter("give either alpha-mag or alpha-sq, not both".into()))
        }
        (Some(m), None) => m,
        (None, Some(s)) if s >= 0.0 => s.sqrt(),
        (None, Some(s)) => return Err(Error::InvalidParameter(format!("alpha-sq must be ≥ 0, got {s}"))),
        (None, None) => 1.0,
    };
    let theta = args.theta.or(cfg.theta).unwrap_or(0.0);
    let xi = args.xi.or(cfg.xi).unwrap_or(0.0);
    let phi = args.phi.or(cfg.phi).unwrap_or(0.0);
    for (name, v) in [("xi", xi), ("xi2", args.xi2.or(cfg.xi2).unwrap_or(xi))] {
        if v.abs() > sweep::MAX_ABS_XI {
            return Err(Error::InvalidParameter(format!("|{name}| must be ≤ {}", sweep::MAX_ABS_XI)));
        }
    }
    let in1 = SqueezedCoherentState::from_params(alpha_mag, theta, xi, phi)?;
    let in2 = if args.single_beam || cfg.single_beam.unwrap_or(false) {
        SqueezedCoherentState::vacuum()
    } else {
        SqueezedCoherentState::from_params(
            args.alpha_mag2.or(cfg.alpha_mag2).unwrap_or(alpha_mag),
            args.theta2.or(cfg.theta2).unwrap_or(theta),
            args.xi2.or(cfg.xi2).unwrap_or(xi),
            args.phi2.or(cfg.phi2).unwrap_or(phi),
        )?
    };
    let pick = |flag: Option<f64>, conf: Option<f64>| flag.or(conf);
    let coeffs = [
        pick(args.t_re, cfg.t_re),
        pick(args.t_im, cfg.t_im),
        pick(args.r_re, cfg.r_re),
        pick(args.r_im, cfg.r_im),
    ];
    let bs = if coeffs.iter().all(Option::is_none) {
        LossyBeamSplitter::cpa()
    } else {
        let [t_re, t_im, r_re, r_im] = coeffs.map(|c| c.unwrap_or(0.0));
        LossyBeamSplitter::new(Complex64::new(t_re, t_im), Complex64::new(r_re, r_im))?
    };
    Ok((bs, in1, in2))
}

#[derive(Debug, Serialize)]
pub struct SweepSummary {
    pub target: Target,
    pub out: PathBuf,
    pub rows: usize,
    pub columns: Vec<String>,
    /// Structural assertions; only evaluated with the default figure axes.
    pub golden: Vec<GoldenCheck>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeOutput {
    pub report: AbsorptionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_state: Option<OutputSummary>,
}

pub fn run_sweep(args: &SweepArgs, cfg: &Config) -> Result<SweepSummary> {
    let (spec, default_axes) = resolve_sweep(args, cfg)?;
    let data = sweep::sweep(&spec)?;
    let golden = if default_axes && spec.fixed == SweepSpec::for_target(spec.target, "", spec.format).fixed {
        sweep::golden_checks(&data)
    } else {
        Vec::new()
    };
    Ok(SweepSummary {
        target: spec.target,
        out: spec.out,
        rows: data.rows.len(),
        columns: data.columns,
        pass: golden.iter().all(|g| g.pass),
        golden,
    })
}

pub fn run_verify(args: &VerifyArgs, cfg: &Config) -> Result<VerifyReport> {
    let scope = Scope::parse(args.scope.as_deref().or(cfg.scope.as_deref()).unwrap_or("all"))?;
    let seed = args.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    Ok(verify::verify(scope, seed))
}

pub fn run_analyze(args: &AnalyzeArgs, cfg: &Config) -> Result<AnalyzeOutput> {
    let (bs, in1, in2) = resolve_analyze(args, cfg)?;
    let report = analyze(&bs, &in1, &in2)?;
    let output_state = if args.gaussian || cfg.gaussian.unwrap_or(false) {
        let out = propagate(&input_state(&in1, &in2), &dilation(&bs)?)?;
        Some(OutputSummary::of(&out)?)
    } else {
        None
    };
    Ok(AnalyzeOutput { report, output_state })
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types always serialize")
}

fn error_json(err: &Error) -> String {
    serde_json::json!({ "error": err.kind(), "message": err.to_string() }).to_string()
}

/// Runs one invocation; returns the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID_INPUT } else { EXIT_OK };
            let _ = if code == EXIT_OK {
                write!(stdout, "{e}")
            } else {
                write!(stderr, "{e}")
            };
            return code;
        }
    };
    let result = (|| -> Result<(String, bool)> {
        let cfg = match &cli.config {
            Some(p) => Config::load(p)?,
            None => Config::default(),
        };
        Ok(match &cli.command {
            Command::Sweep(a) => {
                let s = run_sweep(a, &cfg)?;
                (pretty(&s), s.pass)
            }
            Command::Verify(a) => {
                let r = run_verify(a, &cfg)?;
                (pretty(&r), r.pass)
            }
            Command::Analyze(a) => (pretty(&run_analyze(a, &cfg)?), true),
        })
    })();
    match result {
        Ok((json, pass)) => {
            let _ = writeln!(stdout, "{json}");
            if pass {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(err) => {
            let _ = writeln!(stderr, "{}", error_json(&err));
            exit_code(&err)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("cpa").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn analyze_identical_coherent_inputs() {
        let (code, out, _) = run_str(&["analyze", "--alpha-mag", "1.3", "--theta", "0.4"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["report"]["coeff_c"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!(v["report"]["i_out"].as_f64().unwrap().abs() < 1e-12);
    }

    #[test]
    fn zero_coherence_is_structured_error() {
        let (code, out, err) = run_str(&["analyze", "--alpha-mag", "0", "--single-beam"]);
        assert_eq!(code, EXIT_INVALID_INPUT);
        assert!(out.is_empty());
        let v: serde_json::Value = serde_json::from_str(&err).unwrap();
        assert_eq!(v["error"], "ZeroCoherenceInput");
    }

    #[test]
    fn config_precedence() {
        let cfg = Config::parse("xi = 0.5\ntheta = 1.0\n").unwrap();
        let args = AnalyzeArgs {
            xi: Some(0.2),
            ..Default::default()
        };
        let (_, in1, _) = resolve_analyze(&args, &cfg).unwrap();
        assert_eq!(in1.zeta.xi(), 0.2);
        assert_eq!(in1.alpha.phase(), 1.0);
        assert_eq!(in1.alpha.magnitude(), 1.0);
    }

    #[test]
    fn unknown_config_key_is_invalid() {
        assert!(matches!(Config::parse("colour = 3"), Err(Error::InvalidSpec { .. })));
    }

    #[test]
    fn axis_override_parsing() {
        let a = parse_axis("xi=-1:1:5").unwrap();
        assert_eq!((a.start, a.stop, a.count), (-1.0, 1.0, 5));
        assert!(parse_axis("xi=-1:1").is_err());
        let args = SweepArgs {
            target: Some("fig3b".into()),
            axes: vec!["theta=0:1:3".into()],
            ..Default::default()
        };
        assert!(resolve_sweep(&args, &Config::default()).is_err());
    }

    #[test]
    fn bad_flag_exits_with_invalid_input() {
        let (code, _, _) = run_str(&["analyze", "--xi", "not-a-number"]);
        assert_eq!(code, EXIT_INVALID_INPUT);
        let (code, _, err) = run_str(&["analyze", "--xi", "25"]);
        assert_eq!(code, EXIT_INVALID_INPUT);
        assert!(err.contains("InvalidParameter"));
    }
}

//! The `antisym` command-line interface.
//!
//! Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 usage error,
//! 3 computational error.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use serde::Serialize;
use serde_json::{json, Value};

use crate::antisym::{counterexample_state, AntisymBasis};
use crate::bounds::{check_eigenvalue_bound, cost_bounds, ec_lower_bound, entropy_floor, reduced_state, von_neumann_entropy, BoundReport};
use crate::budget::{saturating_pow, SizeBudget};
use crate::certificates::{certify_xi_spectrum, check_sandwich, cp_certificate, lambda_tilde, minimize_lambda, LineGrid};
use crate::channel::{lambda_combination, lambda_dagger_map, lambda_map, tilde_map, ChannelMap};
use crate::ef::{embed_density, minimize_ef, EfOptions};
use crate::error::Error;
use crate::linalg::{kron, CMatrix, DimSignature};
use crate::report::{emit_report, fmt_real, Format, Report, Table};
use crate::sampler::{run_bound_experiment, ExperimentConfig, StreamRng};
use crate::state::DensityMatrix;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "antisym", version, about = "Antisymmetric-subspace maps, Choi certificates and entanglement bounds")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Write the report here instead of standard output; relative paths
    /// resolve against $ANTISYM_OUT_DIR when set
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
    /// Worker thread cap (≥ 1); defaults to all cores
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Record the wall-clock time in the report (off keeps output reproducible)
    #[arg(long, global = true)]
    pub timestamp: bool,
    /// Numerical tolerance for verdicts (> 0)
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive_f64)]
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the pair basis of the antisymmetric subspace
    Basis(DimArgs),
    /// Choi matrix spectrum of one of the maps
    Choi(ChoiArgs),
    /// Check the Choi spectrum of xΛ + yM† against its closed form
    Spectrum(SpectrumArgs),
    /// Minimize λ(x, y) on the line x + y = 1 and compare with a grid search
    Minimize(MinimizeArgs),
    /// Check that the Choi spectrum of M̃ lies in [−(d−1)/d, (d−1)/d]
    Sandwich(SweepArgs),
    /// Certify complete positivity of λ̃ᴺ·Id# − M̃^⊗N
    CpCheck(CpArgs),
    /// Check the reduced eigenvalue cap and entropy floor for a state
    Bound(BoundArgs),
    /// Reduced spectrum of the two-copy d = 3 counterexample
    Counterexample,
    /// Monte-Carlo run of the bounds over Haar-random states
    Sample(SampleArgs),
    /// Upper-bound the entanglement of formation by ensemble search
    EfUpper(EfArgs),
    /// Bracket the entanglement cost between the analytic floor and an E_f upper bound
    Bracket(BracketArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Basis(_) => "basis",
            Self::Choi(_) => "choi",
            Self::Spectrum(_) => "spectrum",
            Self::Minimize(_) => "minimize",
            Self::Sandwich(_) => "sandwich",
            Self::CpCheck(_) => "cp-check",
            Self::Bound(_) => "bound",
            Self::Counterexample => "counterexample",
            Self::Sample(_) => "sample",
            Self::EfUpper(_) => "ef-upper",
            Self::Bracket(_) => "bracket",
        }
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("{v} is not a positive finite number")),
        Err(e) => Err(e.to_string()),
    }
}

fn finite_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(v) => Err(format!("{v} is not finite")),
        Err(e) => Err(e.to_string()),
    }
}

fn dim_parser() -> clap::builder::RangedU64ValueParser<usize> {
    clap::builder::RangedU64ValueParser::<usize>::new().range(2..=64)
}

fn power_parser() -> clap::builder::RangedU64ValueParser<usize> {
    clap::builder::RangedU64ValueParser::<usize>::new().range(1..=8)
}

fn count_parser() -> clap::builder::RangedU64ValueParser<usize> {
    clap::builder::RangedU64ValueParser::<usize>::new().range(1..)
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DimArgs {
    /// Local dimension d (2–64)
    #[arg(long, default_value_t = 3, value_parser = dim_parser())]
    pub d: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SweepArgs {
    /// Local dimension d (2–64)
    #[arg(long, default_value_t = 3, value_parser = dim_parser())]
    pub d: usize,
    /// Sweep d up to this value (inclusive)
    #[arg(long, value_parser = dim_parser())]
    pub d_max: Option<usize>,
}

impl SweepArgs {
    fn range(&self) -> Result<std::ops::RangeInclusive<usize>, CliError> {
        dim_range(self.d, self.d_max)
    }
}

fn dim_range(d: usize, d_max: Option<usize>) -> Result<std::ops::RangeInclusive<usize>, CliError> {
    let hi = d_max.unwrap_or(d);
    if hi < d {
        return Err(CliError::Usage(format!("--d-max {hi} is below --d {d}")));
    }
    Ok(d..=hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    /// Λ, the A-side reduction of embedded operators
    Lambda,
    /// M†, the conjugate-linear partner of Λ
    LambdaDagger,
    /// M̃ = (1/d)Λ + ((d−1)/d)M†
    Tilde,
    /// xΛ + yM†
    Combination,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ChoiArgs {
    /// Local dimension d (2–64)
    #[arg(long, default_value_t = 3, value_parser = dim_parser())]
    pub d: usize,
    #[arg(long, value_enum, default_value_t = MapKind::Tilde)]
    pub map: MapKind,
    /// Coefficient of Λ for --map combination
    #[arg(long, default_value_t = 1.0, value_parser = finite_f64, allow_negative_numbers = true)]
    pub x: f64,
    /// Coefficient of M† for --map combination
    #[arg(long, default_value_t = 0.0, value_parser = finite_f64, allow_negative_numbers = true)]
    pub y: f64,
    /// Include the full Choi matrix in the report
    #[arg(long)]
    pub matrix: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpectrumArgs {
    /// Local dimension d (2–64)
    #[arg(long, default_value_t = 3, value_parser = dim_parser())]
    pub d: usize,
    /// Sweep d up to this value (inclusive)
    #[arg(long, value_parser = dim_parser())]
    pub d_max: Option<usize>,
    #[arg(long, default_value_t = 1.0, value_parser = finite_f64, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, default_value_t = 1.0, value_parser = finite_f64, allow_negative_numbers = true)]
    pub y: f64,
    /// Also check this many seeded (x, y) drawn uniformly from [−2, 2]²; needs --seed
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MinimizeArgs {
    /// Local dimension d (2–64)
    #[arg(long, default_value_t = 3, value_parser = dim_parser())]
    pub d: usize,
    /// Sweep d up to this value (inclusive)
    #[arg(long, value_parser = dim_parser())]
    pub d_max: Option<usize>,
    /// Grid spacing along x (> 0)
    #[arg(long, default_value_t = 1e-3, value_parser = positive_f64)]
    pub step: f64,
    /// Agreement required between grid and closed form (> 0)
    #[arg(long, default_value_t = 1e-6, value_parser = positive_f64)]
    pub grid_tol: f64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CpArgs {
    /// Local dimension d (2–64)
    #[arg(long, default_value_t = 3, value_parser = dim_parser())]
    pub d: usize,
    /// Number of copies N (1–8)
    #[arg(long = "N", short = 'N', default_value_t = 1, value_parser = power_parser())]
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateKind {
    /// |(1,2)⟩ on every copy
    Pair,
    /// Normalized projector onto the antisymmetric subspace of every copy
    Projector,
    /// (|(1,2)⟩⟨(1,2)| + |(1,3)⟩⟨(1,3)|)/2 on every copy (d ≥ 3)
    Mixture,
    /// Haar-random pure state on all N copies; needs --seed
    Random,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BoundArgs {
    /// Local dimension d (2–64)
    #[arg(long, default_value_t = 3, value_parser = dim_parser())]
    pub d: usize,
    /// Sweep d up to this value (inclusive)
    #[arg(long, value_parser = dim_parser())]
    pub d_max: Option<usize>,
    /// Number of copies N (1–8)
    #[arg(long = "N", short = 'N', default_value_t = 1, value_parser = power_parser())]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = StateKind::Pair)]
    pub state: StateKind,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SampleArgs {
    /// Local dimension d (2–64)
    #[arg(long, default_value_t = 3, value_parser = dim_parser())]
    pub d: usize,
    /// Number of copies N (1–8)
    #[arg(long = "N", short = 'N', default_value_t = 1, value_parser = power_parser())]
    #[serde(rename = "N")]
    pub n: usize,
    /// Number of random states (≥ 1)
    #[arg(long, default_value_t = 10_000, value_parser = count_parser())]
    pub trials: usize,
    /// Master seed; trial t uses substream t
    #[arg(long)]
    pub seed: u64,
    /// Histogram bins over [0, 1] (≥ 1)
    #[arg(long, default_value_t = 20, value_parser = count_parser())]
    pub bins: usize,
    /// Slack on the eigenvalue cap (> 0)
    #[arg(long, default_value_t = 1e-10, value_parser = positive_f64)]
    pub eig_tol: f64,
    /// Slack on the entropy floor in bits (> 0)
    #[arg(long, default_value_t = 1e-8, value_parser = positive_f64)]
    pub entropy_tol: f64,
    /// Add the two-copy counterexample as an extra trial (d = 3, N = 2 only)
    #[arg(long)]
    pub inject_counterexample: bool,
    /// Keep every trial's spectrum in the report
    #[arg(long)]
    pub record_trials: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EfArgs {
    /// Local dimension d (2–64)
    #[arg(long, default_value_t = 3, value_parser = dim_parser())]
    pub d: usize,
    /// Number of copies N (1–8)
    #[arg(long = "N", short = 'N', default_value_t = 1, value_parser = power_parser())]
    #[serde(rename = "N")]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = StateKind::Projector)]
    pub state: StateKind,
    /// Master seed; restart k uses substream k
    #[arg(long)]
    pub seed: u64,
    /// Independent restarts (≥ 1)
    #[arg(long, default_value_t = 16, value_parser = count_parser())]
    pub restarts: usize,
    /// Sweep cap per restart (≥ 1)
    #[arg(long, default_value_t = 200, value_parser = count_parser())]
    pub iterations: usize,
    /// Ensemble size m ≥ rank; defaults to rank²
    #[arg(long, value_parser = count_parser())]
    pub ensemble_size: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BracketArgs {
    /// Local dimension d (2–64)
    #[arg(long, default_value_t = 3, value_parser = dim_parser())]
    pub d: usize,
    /// Master seed for the E_f search
    #[arg(long)]
    pub seed: u64,
    /// Independent restarts (≥ 1)
    #[arg(long, default_value_t = 16, value_parser = count_parser())]
    pub restarts: usize,
    /// Sweep cap per restart (≥ 1)
    #[arg(long, default_value_t = 200, value_parser = count_parser())]
    pub iterations: usize,
}

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(m) => Self::Usage(m),
            other => Self::Compute(other),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Compute(e) => write!(f, "{e}"),
        }
    }
}

fn to_value<S: Serialize>(s: &S) -> Value {
    serde_json::to_value(s).expect("report types serialize")
}

fn params<S: Serialize>(args: &S, tol: f64) -> Value {
    let mut v = to_value(args);
    if let Value::Object(map) = &mut v {
        map.insert("tol".into(), json!(tol));
    }
    v
}

fn need_seed(seed: Option<u64>, why: &str) -> Result<u64, CliError> {
    seed.ok_or_else(|| CliError::Usage(format!("--seed is required {why}")))
}

/// Single-copy coordinate operator for a deterministic state kind.
fn single_copy_state(kind: StateKind, d: usize) -> Result<CMatrix<f64>, CliError> {
    let p = AntisymBasis::new(d)?.dim();
    match kind {
        StateKind::Pair => Ok(CMatrix::unit(p, p, 0, 0)),
        StateKind::Projector => Ok(CMatrix::identity(p).scale(1.0 / p as f64)),
        StateKind::Mixture if d >= 3 => Ok(CMatrix::unit(p, p, 0, 0).add(&CMatrix::unit(p, p, 1, 1)).scale(0.5)),
        StateKind::Mixture => Err(CliError::Usage("--state mixture needs d ≥ 3".into())),
        StateKind::Random => unreachable!("random states are sampled on all copies"),
    }
}

/// Density operator on `D'^N` coordinates.
fn coordinate_state(kind: StateKind, d: usize, n: usize, seed: Option<u64>) -> Result<DensityMatrix<f64>, CliError> {
    let p = AntisymBasis::new(d)?.dim();
    let side = saturating_pow(p, n);
    let m = if kind == StateKind::Random {
        let seed = need_seed(seed, "for --state random")?;
        let mut rng = StreamRng::new(seed, 0);
        let g: Vec<Complex<f64>> = rng.gaussian_vector(side);
        let norm = crate::linalg::vec_norm(&g);
        let unit: Vec<_> = g.iter().map(|z| z / norm).collect();
        CMatrix::outer(&unit, &unit)
    } else {
        let one = single_copy_state(kind, d)?;
        (1..n).fold(one.clone(), |acc, _| kron(&acc, &one))
    };
    Ok(DensityMatrix::new(m, DimSignature::new(vec![p; n])?)?)
}

fn ef_options(seed: u64, restarts: usize, iterations: usize, ensemble_size: Option<usize>) -> EfOptions {
    EfOptions {
        ensemble_size,
        restarts,
        iterations,
        seed,
        ..EfOptions::default()
    }
}

fn map_for(args: &ChoiArgs) -> crate::Result<ChannelMap<f64>> {
    match args.map {
        MapKind::Lambda => lambda_map(args.d),
        MapKind::LambdaDagger => lambda_dagger_map(args.d),
        MapKind::Tilde => tilde_map(args.d),
        MapKind::Combination => lambda_combination(args.d, args.x, args.y),
    }
}

fn bound_row(r: &BoundReport<f64>) -> Vec<String> {
    vec![
        r.d.to_string(),
        r.n.to_string(),
        fmt_real(r.max_reduced_eig),
        fmt_real(r.eig_cap),
        fmt_real(r.entropy),
        fmt_real(r.entropy_floor),
        r.pass.to_string(),
    ]
}

/// Runs one parsed command and returns its report. Thread count, output
/// path and format are left to the caller.
pub fn run_command(cli: &Cli) -> Result<Report, CliError> {
    let tol = cli.global.tol;
    let budget = SizeBudget::default();
    let name = cli.command.name();
    let report = match &cli.command {
        Command::Basis(a) => {
            let b = AntisymBasis::new(a.d)?;
            let mut table = Table::new(["index", "i", "j"]);
            for (k, &(i, j)) in b.pairs().iter().enumerate() {
                table.push(vec![k.to_string(), i.to_string(), j.to_string()]);
            }
            Report::new(name, params(a, tol), json!({"d": a.d, "dim": b.dim(), "pairs": b.pairs()})).with_table(table)
        }
        Command::Choi(a) => {
            let choi = map_for(a)?.choi();
            let spec = choi.spectrum()?;
            let mut table = Table::new(["index", "eigenvalue"]);
            for (k, v) in spec.eigenvalues.iter().enumerate() {
                table.push(vec![k.to_string(), fmt_real(*v)]);
            }
            let mut payload = json!({
                "d": a.d,
                "map": a.map,
                "choi_side": choi.side(),
                "eigenvalues": spec.eigenvalues,
                "min_eig": spec.min(),
                "max_eig": spec.max(),
            });
            if a.matrix {
                payload["matrix"] = to_value(&choi.matrix);
            }
            Report::new(name, params(a, tol), payload).with_table(table)
        }
        Command::Spectrum(a) => {
            let mut points = vec![(a.x, a.y)];
            let mut seed = None;
            if a.random > 0 {
                let s = need_seed(a.seed, "with --random")?;
                seed = Some(s);
                for k in 0..a.random {
                    let mut rng = StreamRng::new(s, k as u64);
                    let x = 4.0 * rng.uniform() - 2.0;
                    let y = 4.0 * rng.uniform() - 2.0;
                    points.push((x, y));
                }
            }
            let mut certs = Vec::new();
            let mut table = Table::new(["d", "x", "y", "max_deviation", "pass"]);
            for d in dim_range(a.d, a.d_max)? {
                for &(x, y) in &points {
                    let c = certify_xi_spectrum(d, x, y, tol, &budget)?;
                    table.push(vec![
                        d.to_string(),
                        fmt_real(x),
                        fmt_real(y),
                        fmt_real(c.max_deviation),
                        c.verdict.to_string(),
                    ]);
                    certs.push(c);
                }
            }
            let ok = certs.iter().all(|c| c.verdict);
            let mut r = Report::new(name, params(a, tol), json!({"certificates": certs})).with_verdict(ok);
            r.seed = seed;
            r.with_table(table)
        }
        Command::Minimize(a) => {
            let grid = LineGrid {
                step: a.step,
                ..LineGrid::default()
            };
            let mut results = Vec::new();
            let mut table = Table::new(["d", "x", "y", "value", "grid_min", "grid_argmin_x", "pass"]);
            for d in dim_range(a.d, a.d_max)? {
                let m = minimize_lambda::<f64>(d, grid.clone())?;
                let pass = (m.grid_min - m.value).abs() <= a.grid_tol;
                table.push(vec![
                    d.to_string(),
                    fmt_real(m.x),
                    fmt_real(m.y),
                    fmt_real(m.value),
                    fmt_real(m.grid_min),
                    fmt_real(m.grid_argmin_x),
                    pass.to_string(),
                ]);
                let mut v = to_value(&m);
                v["pass"] = json!(pass);
                results.push(v);
            }
            let ok = results.iter().all(|v| v["pass"] == json!(true));
            Report::new(name, params(a, tol), json!({"results": results}))
                .with_verdict(ok)
                .with_table(table)
        }
        Command::Sandwich(a) => {
            let mut results = Vec::new();
            let mut table = Table::new(["d", "lambda_tilde", "min_eig", "max_eig", "max_abs_eig", "tight", "pass"]);
            for d in a.range()? {
                let c = check_sandwich::<f64>(d, tol, &budget)?;
                let tight = (c.max_abs_eig - c.lambda_tilde).abs() <= tol;
                table.push(vec![
                    d.to_string(),
                    fmt_real(c.lambda_tilde),
                    fmt_real(c.min_eig),
                    fmt_real(c.max_eig),
                    fmt_real(c.max_abs_eig),
                    tight.to_string(),
                    c.holds.to_string(),
                ]);
                let mut v = to_value(&c);
                v["tight"] = json!(tight);
                results.push(v);
            }
            let ok = results.iter().all(|v| v["holds"] == json!(true));
            Report::new(name, params(a, tol), json!({"results": results}))
                .with_verdict(ok)
                .with_table(table)
        }
        Command::CpCheck(a) => {
            let c = cp_certificate::<f64>(a.d, a.n, tol, &budget)?;
            Report::new(name, params(a, tol), to_value(&c)).with_verdict(c.is_cp)
        }
        Command::Bound(a) => {
            if a.state == StateKind::Random {
                need_seed(a.seed, "for --state random")?;
            }
            let mut reports = Vec::new();
            let mut table = Table::new(BoundReport::<f64>::CSV_HEADER.split(','));
            for d in dim_range(a.d, a.d_max)? {
                let x = coordinate_state(a.state, d, a.n, a.seed)?;
                let r = check_eigenvalue_bound(&x, d, a.n, tol, &budget)?;
                table.push(bound_row(&r));
                let mut v = to_value(&r);
                v["costs"] = to_value(&cost_bounds::<f64>(d, a.n)?);
                reports.push(v);
            }
            let ok = reports.iter().all(|v| v["pass"] == json!(true));
            let mut r = Report::new(name, params(a, tol), json!({"reports": reports}))
                .with_verdict(ok)
                .with_table(table);
            r.seed = a.seed.filter(|_| a.state == StateKind::Random);
            r
        }
        Command::Counterexample => {
            let rho = reduced_state(&counterexample_state::<f64>(), 2)?;
            let spec = rho.spectrum(false);
            let max = spec.max();
            let old_cap = 0.25;
            let cap = lambda_tilde::<f64>(3).powi(2);
            let refutes = max > old_cap + 1e-3;
            let within = max <= cap + tol;
            let payload = json!({
                "d": 3,
                "N": 2,
                "reduced_spectrum": spec.eigenvalues,
                "max_reduced_eig": max,
                "entropy": von_neumann_entropy(&rho)?,
                "entropy_floor": entropy_floor::<f64>(3, 2),
                "two_pow_minus_n_cap": old_cap,
                "refutes_2^-N_cap": refutes,
                "eig_cap": cap,
                "within_eig_cap": within,
            });
            Report::new(name, json!({"tol": tol}), payload).with_verdict(refutes && within)
        }
        Command::Sample(a) => {
            let cfg = ExperimentConfig {
                d: a.d,
                n: a.n,
                trials: a.trials,
                seed: a.seed,
                eig_tol: a.eig_tol,
                entropy_tol: a.entropy_tol,
                bins: a.bins,
                inject_counterexample: a.inject_counterexample,
                record_trials: a.record_trials,
            };
            let rep = run_bound_experiment::<f64>(&cfg, &budget)?;
            let mut table = Table::new(["bin_lower", "count"]);
            for b in &rep.histogram {
                table.push(vec![fmt_real(b.bin_lower), b.count.to_string()]);
            }
            Report::new(name, to_value(a), to_value(&rep))
                .with_seed(a.seed)
                .with_verdict(rep.pass())
                .with_table(table)
        }
        Command::EfUpper(a) => {
            let x = coordinate_state(a.state, a.d, a.n, Some(a.seed))?;
            let rho = embed_density(&x, a.d, a.n, &budget)?;
            let opts = ef_options(a.seed, a.restarts, a.iterations, a.ensemble_size);
            let res = minimize_ef(&rho, &opts, &budget)?;
            let ok = res.upper_bound >= res.lower_bound - 1e-8;
            Report::new(name, params(a, tol), to_value(&res))
                .with_seed(a.seed)
                .with_verdict(ok)
        }
        Command::Bracket(a) => {
            let x = coordinate_state(StateKind::Projector, a.d, 1, None)?;
            let rho = embed_density(&x, a.d, 1, &budget)?;
            let res = minimize_ef(&rho, &ef_options(a.seed, a.restarts, a.iterations, None), &budget)?;
            let ec_lower = ec_lower_bound::<f64>(a.d);
            let ok = ec_lower <= res.upper_bound + 1e-8;
            let payload = json!({
                "d": a.d,
                "state": "antisymmetric projector / dim",
                "ec_lower": ec_lower,
                "ef_upper": res.upper_bound,
                "gap": res.upper_bound - ec_lower,
                "restart_values": res.restart_values,
                "best_restart": res.best_restart,
            });
            Report::new(name, params(a, tol), payload).with_seed(a.seed).with_verdict(ok)
        }
    };
    Ok(if cli.global.timestamp { report.stamped() } else { report })
}

fn error_report(cli: &Cli, err: &CliError) -> Report {
    let kind = match err {
        CliError::Usage(_) => "usage",
        CliError::Compute(_) => "computation",
    };
    Report::new(
        cli.command.name(),
        json!({"tol": cli.global.tol}),
        json!({"error": {"kind": kind, "message": err.to_string()}}),
    )
}

/// Parses `args`, runs the command and writes the report. Returns the exit
/// code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let format = match cli.global.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let outcome = match cli.global.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t as usize).build() {
            Ok(pool) => pool.install(|| run_command(&cli)),
            Err(e) => Err(CliError::Compute(Error::Unsupported(format!("thread pool: {e}")))),
        },
        None => run_command(&cli),
    };
    match outcome {
        Ok(report) => match emit_report(&report, format, cli.global.out.as_deref()) {
            Ok(()) if report.passed() => EXIT_PASS,
            Ok(()) => EXIT_FAIL,
            Err(e) => {
                eprintln!("antisym: {e}");
                EXIT_COMPUTE
            }
        },
        Err(err) => {
            eprintln!("antisym: {err}");
            let _ = emit_report(&error_report(&cli, &err), Format::Json, cli.global.out.as_deref());
            match err {
                CliError::Usage(_) => EXIT_USAGE,
                CliError::Compute(_) => EXIT_COMPUTE,
            }
        }
    }
}

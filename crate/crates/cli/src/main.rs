//! Command-line front end for the heattrace library.

mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heattrace::checks::{run_check, CheckOutcome, CHECK_COUNT};
use heattrace::fit::{boundary_ladder, fit_coefficients, fit_largest_valid, geometric_grid, FitReport};
use heattrace::geometry::ModelGeometry;
use heattrace::predict::{full_expansion, AsymptoticExpansion, Orders};
use heattrace::regularize::{i_reg_weight, RegularizedValue};
use heattrace::spectrum::weighted_trace;
use heattrace::symbols::{symbols_report, SymbolsReport};
use heattrace::weight::{CutoffSpec, WeightProfile};
use heattrace::{Complex64, Error};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "heattrace", version, about = "Weighted heat-trace asymptotics on model manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Predicted small-t expansion as JSON.
    Coeffs(CoeffsArgs),
    /// Weighted heat trace from the exact spectrum as CSV.
    Trace(TraceArgs),
    /// Fit the numerical trace and compare with the prediction.
    Fit(FitArgs),
    /// Regularized integral of the weight.
    Regularize(RegularizeArgs),
    /// Symbol-calculus identity report.
    Symbols(SymbolsArgs),
    /// Run the acceptance suite; exit status 0 iff every check passes.
    VerifyAll(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum GeometryKind {
    Interval,
    Disk,
    Annulus,
    Cylinder,
    Ball3,
    Hemisphere,
}

#[derive(Args, Debug, Serialize)]
struct GeometryArgs {
    #[arg(long, value_enum)]
    geometry: GeometryKind,
    /// Disk, ball or hemisphere radius [default: 1].
    #[arg(long)]
    radius: Option<f64>,
    /// Interval or cylinder length [default: pi].
    #[arg(long)]
    length: Option<f64>,
    /// Annulus inner radius [default: 1].
    #[arg(long)]
    inner: Option<f64>,
    /// Annulus outer radius [default: 2].
    #[arg(long)]
    outer: Option<f64>,
    /// Cylinder circle radius [default: 1].
    #[arg(long)]
    rho: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct WeightArgs {
    /// Boundary exponent: F ~ r^(-alpha).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Imaginary part of alpha (prediction and regularization only).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha_im: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    f0: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    f1: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    f2: f64,
    /// Cutoff: chi = 1 below eps0, 0 above eps (give both or neither).
    #[arg(long)]
    eps0: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Constant potential term E of the operator.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    potential: f64,
}

#[derive(Args, Debug, Serialize)]
struct GridArgs {
    #[arg(long, default_value_t = 1e-4)]
    t_min: f64,
    #[arg(long, default_value_t = 1e-2)]
    t_max: f64,
    #[arg(long, default_value_t = 24)]
    t_points: usize,
}

#[derive(Args, Debug, Serialize)]
struct CoeffsArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
    #[command(flatten)]
    weight: WeightArgs,
    #[arg(long, default_value_t = 1)]
    interior_order: usize,
    #[arg(long, default_value_t = 2)]
    boundary_order: usize,
    #[arg(long, short)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct TraceArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
    #[command(flatten)]
    weight: WeightArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Bound on the truncated spectral tail.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, short)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct FitArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
    #[command(flatten)]
    weight: WeightArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Number of leading ladder terms; by default the largest valid fit.
    #[arg(long)]
    n_fit: Option<usize>,
    /// Unpredicted boundary orders appended to the ladder.
    #[arg(long, default_value_t = 5)]
    extra_orders: usize,
    /// Largest accepted relative deviation of a predicted term; unchecked if absent.
    #[arg(long)]
    tol: Option<f64>,
    /// Bound on the truncated spectral tail.
    #[arg(long, default_value_t = 1e-9)]
    trace_tol: f64,
    #[arg(long, short)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct RegularizeArgs {
    #[command(flatten)]
    geometry: GeometryArgs,
    #[command(flatten)]
    weight: WeightArgs,
    /// Split radius; chosen per collar if absent.
    #[arg(long)]
    radius_split: Option<f64>,
    #[arg(long, short)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SymbolsArgs {
    #[arg(long, short)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// Run only these checks (comma separated ids).
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
    #[arg(long, short)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

/// Failure carrying the process exit status.
#[derive(Debug)]
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::InvalidInput(_) => (2, "invalid_input"),
            Error::Pole { .. } => (2, "pole"),
            Error::Exceptional(_) => (2, "exceptional"),
            Error::Tolerance { .. } => (3, "tolerance"),
            Error::IllConditioned { .. } => (3, "ill_conditioned"),
            Error::Numerical(_) => (3, "numerical"),
            Error::Consistency(_) => (4, "consistency"),
        };
        Failure { code, kind, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 2, kind: "io", message: e.to_string() }
    }
}

fn validation(message: impl Into<String>) -> Failure {
    Failure { code: 2, kind: "invalid_input", message: message.into() }
}

fn tolerance(message: impl Into<String>) -> Failure {
    Failure { code: 3, kind: "tolerance", message: message.into() }
}

type Outcome<T> = std::result::Result<T, Failure>;

impl GeometryArgs {
    fn build(&self) -> Outcome<ModelGeometry> {
        use GeometryKind::*;
        let allowed: &[&str] = match self.geometry {
            Interval => &["length"],
            Disk | Ball3 | Hemisphere => &["radius"],
            Annulus => &["inner", "outer"],
            Cylinder => &["rho", "length"],
        };
        let given = [
            ("radius", self.radius),
            ("length", self.length),
            ("inner", self.inner),
            ("outer", self.outer),
            ("rho", self.rho),
        ];
        for (name, v) in given {
            if v.is_some() && !allowed.contains(&name) {
                return Err(validation(format!("--{name} does not apply to the {:?} geometry", self.geometry)));
            }
        }
        let pi = std::f64::consts::PI;
        let g = match self.geometry {
            Interval => ModelGeometry::interval(self.length.unwrap_or(pi)),
            Disk => ModelGeometry::disk(self.radius.unwrap_or(1.0)),
            Annulus => ModelGeometry::annulus(self.inner.unwrap_or(1.0), self.outer.unwrap_or(2.0)),
            Cylinder => ModelGeometry::cylinder(self.rho.unwrap_or(1.0), self.length.unwrap_or(pi)),
            Ball3 => ModelGeometry::ball3(self.radius.unwrap_or(1.0)),
            Hemisphere => ModelGeometry::hemisphere(self.radius.unwrap_or(1.0)),
        };
        Ok(g?)
    }
}

impl WeightArgs {
    fn build(&self, geom: &ModelGeometry) -> Outcome<WeightProfile> {
        let cutoff = match (self.eps0, self.eps) {
            (Some(a), Some(b)) => Some(CutoffSpec::new(a, b)?),
            (None, None) => None,
            _ => return Err(validation("--eps0 and --eps must be given together")),
        };
        let w = WeightProfile::new(Complex64::new(self.alpha, self.alpha_im), vec![self.f0, self.f1, self.f2], cutoff)?;
        w.check_geometry(geom)?;
        Ok(w)
    }
}

#[derive(Serialize)]
struct TermOut {
    power: f64,
    power_im: f64,
    log: bool,
    coeff: f64,
    coeff_im: f64,
}

fn terms_out(e: &AsymptoticExpansion) -> Vec<TermOut> {
    e.terms
        .iter()
        .map(|t| TermOut {
            power: t.power.re,
            power_im: t.power.im,
            log: t.has_log,
            coeff: t.coefficient.re,
            coeff_im: t.coefficient.im,
        })
        .collect()
}

#[derive(Serialize)]
struct CoeffsOut<'a> {
    config: &'a CoeffsArgs,
    terms: Vec<TermOut>,
}

#[derive(Serialize)]
struct FitOut<'a> {
    config: &'a FitArgs,
    fit: FitReport,
    predicted: Vec<TermOut>,
}

#[derive(Serialize)]
struct RegularizeOut<'a> {
    config: &'a RegularizeArgs,
    result: RegularizedValue,
}

#[derive(Serialize)]
struct SymbolsOut<'a> {
    config: &'a SymbolsArgs,
    report: SymbolsReport,
}

#[derive(Serialize)]
struct VerifyOut<'a> {
    config: &'a VerifyArgs,
    passed: bool,
    checks: Vec<CheckOutcome>,
}

fn coeffs(args: &CoeffsArgs) -> Outcome<()> {
    let geom = args.geometry.build()?;
    let w = args.weight.build(&geom)?;
    let orders = Orders { interior: args.interior_order, boundary: args.boundary_order };
    let e = full_expansion(&geom, &w, args.weight.potential, orders)?;
    output::write_json(&CoeffsOut { config: args, terms: terms_out(&e) }, args.output.as_deref())?;
    Ok(())
}

fn trace(args: &TraceArgs) -> Outcome<()> {
    let geom = args.geometry.build()?;
    let w = args.weight.build(&geom)?;
    if args.weight.potential != 0.0 {
        return Err(validation("the numerical trace is for the plain Dirichlet Laplacian; drop --potential"));
    }
    let ts = geometric_grid(args.grid.t_min, args.grid.t_max, args.grid.t_points)?;
    let s = weighted_trace(&geom, &w, &ts, args.tol)?;
    output::write_csv(&s, args.output.as_deref())?;
    Ok(())
}

fn fit(args: &FitArgs) -> Outcome<()> {
    let geom = args.geometry.build()?;
    let w = args.weight.build(&geom)?;
    if args.weight.potential != 0.0 {
        return Err(validation("the numerical trace is for the plain Dirichlet Laplacian; drop --potential"));
    }
    let alpha = w.real_alpha()?;
    let ts = geometric_grid(args.grid.t_min, args.grid.t_max, args.grid.t_points)?;
    let samples = weighted_trace(&geom, &w, &ts, args.trace_tol)?;
    let expansion = full_expansion(&geom, &w, 0.0, Orders::default())?;
    let ladder = boundary_ladder(&expansion, geom.m, alpha, 3..3 + args.extra_orders)?;
    let report = match args.n_fit {
        Some(n) => fit_coefficients(&samples, &ladder, n)?,
        None => fit_largest_valid(&samples, &ladder, 2)?,
    };
    let worst = report.terms.iter().filter_map(|t| t.rel_deviation).fold(0.0, f64::max);
    let out = FitOut { config: args, fit: report, predicted: terms_out(&expansion) };
    output::write_json(&out, args.output.as_deref())?;
    match args.tol {
        Some(tol) if !(worst <= tol) => Err(tolerance(format!("largest relative deviation {worst:.3e} exceeds {tol:.1e}"))),
        _ => Ok(()),
    }
}

fn regularize(args: &RegularizeArgs) -> Outcome<()> {
    let geom = args.geometry.build()?;
    let w = args.weight.build(&geom)?;
    let result = i_reg_weight(&geom, &w, args.radius_split)?;
    output::write_json(&RegularizeOut { config: args, result }, args.output.as_deref())?;
    Ok(())
}

fn symbols(args: &SymbolsArgs) -> Outcome<()> {
    let report = symbols_report()?;
    let passed = report.passed;
    output::write_json(&SymbolsOut { config: args, report }, args.output.as_deref())?;
    if passed {
        Ok(())
    } else {
        Err(tolerance("symbol identities failed; see the report"))
    }
}

fn verify_all(args: &VerifyArgs) -> Outcome<()> {
    let ids: Vec<u8> = if args.only.is_empty() { (1..=CHECK_COUNT).collect() } else { args.only.clone() };
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > CHECK_COUNT) {
        return Err(validation(format!("checks are numbered 1..={CHECK_COUNT}, got {bad}")));
    }
    let mut checks = Vec::new();
    for id in ids {
        let outcome = run_check(id);
        eprintln!("{}", outcome.summary_line());
        checks.push(outcome);
    }
    let passed = checks.iter().all(|c| c.passed);
    let failed = checks.iter().filter(|c| !c.passed).count();
    output::write_json(&VerifyOut { config: args, passed, checks }, args.output.as_deref())?;
    if passed {
        Ok(())
    } else {
        Err(tolerance(format!("{failed} check(s) failed")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Coeffs(a) => coeffs(a),
        Command::Trace(a) => trace(a),
        Command::Fit(a) => fit(a),
        Command::Regularize(a) => regularize(a),
        Command::Symbols(a) => symbols(a),
        Command::VerifyAll(a) => verify_all(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            output::report_error(f.kind, &f.message);
            ExitCode::from(f.code)
        }
    }
}

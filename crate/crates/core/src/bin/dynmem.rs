//! Command-line front end: kernel tables, Laplace inversion, memory operators
//! on CSV samples, Mittag-Leffler curves, relaxation and Langevin solves, and
//! the identity-verification harness.
//!
//! Exit codes: 0 success, 1 verification failure (`verify` only), 2 runtime
//! divergence, 3 invalid arguments or configuration.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use dynmem::expr::{parse_generator, GeneratorExpr, GeneratorPreset, ParamSet};
use dynmem::gridfn::GridFunction;
use dynmem::kernel::Kernel;
use dynmem::langevin::{self, LangevinProblem, SolverOptions, VelocityTermMode};
use dynmem::laplace::{self, Grid, InversionConfig, InversionMethod};
use dynmem::ml::{self, MLQuery};
use dynmem::operators::{self, DerivMode, QuadratureScheme, Side};
use dynmem::verify::{run_verify, Suite};
use dynmem::{Error, Result};

#[derive(Parser)]
#[command(
    name = "dynmem",
    version,
    about = "Fractional calculus with generator-defined memory kernels",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the memory kernel and its cumulative integrals as CSV.
    Kernel(KernelArgs),
    /// Numerically invert the generator symbol Φ^(-α)·p^(-level).
    Invert(InvertArgs),
    /// Apply the fractional integral to CSV samples.
    Integral(IntegralArgs),
    /// Apply a fractional derivative to CSV samples.
    Derivative(DerivativeArgs),
    /// Tabulate the generalized Mittag-Leffler function E_{Φ,α}(λ, t).
    Ml(MlArgs),
    /// Solve the memory relaxation equation ᶜD^α x = -κ x, x(0) = x₀.
    Relax(RelaxArgs),
    /// Solve a generalized Langevin system from a JSON problem file.
    Langevin(LangevinArgs),
    /// Run identity-verification suites and emit a JSON report.
    Verify(VerifyArgs),
    /// List supported generator families and known out-of-scope kernels.
    Presets,
}

#[derive(Args)]
struct GeneratorArgs {
    /// Generator expression, e.g. "p + lambda" (variable p; ^, *, +, -).
    #[arg(long, conflicts_with = "preset")]
    generator: Option<String>,
    /// Named family: classical, tempered, affine, power-scaled, hybrid.
    #[arg(long)]
    preset: Option<String>,
    /// Parameter binding name=value (repeatable).
    #[arg(long = "theta", value_name = "NAME=VALUE")]
    theta: Vec<String>,
}

impl GeneratorArgs {
    fn theta_pairs(&self) -> Result<Vec<(String, f64)>> {
        self.theta.iter().map(|kv| parse_kv(kv)).collect()
    }

    fn resolve(&self) -> Result<(GeneratorExpr, ParamSet)> {
        let pairs = self.theta_pairs()?;
        if let Some(text) = &self.generator {
            let expr = parse_generator(text)?;
            let theta = ParamSet::from_pairs(pairs)?;
            return Ok((expr, theta));
        }
        let name = self.preset.as_deref().unwrap_or("classical");
        preset_from_name(name, &pairs)?.make()
    }
}

#[derive(Args)]
struct InversionArgs {
    /// Inversion algorithm: talbot or stehfest.
    #[arg(long = "inv-method", default_value = "talbot")]
    inv_method: String,
    /// Number of contour nodes / expansion terms.
    #[arg(long = "inv-nodes")]
    inv_nodes: Option<usize>,
    /// Contour geometry multiplier (Talbot only).
    #[arg(long = "inv-scale", default_value_t = 1.0)]
    inv_scale: f64,
}

impl InversionArgs {
    fn resolve(&self) -> Result<InversionConfig> {
        let method = match self.inv_method.as_str() {
            "talbot" => InversionMethod::Talbot,
            "stehfest" => InversionMethod::GaverStehfest,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown inversion method `{other}` (expected talbot or stehfest)"
                )))
            }
        };
        let config = InversionConfig {
            method,
            node_count: self.inv_nodes.unwrap_or(match method {
                InversionMethod::Talbot => 48,
                InversionMethod::GaverStehfest => 16,
            }),
            contour_scale: self.inv_scale,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct GridArgs {
    /// Final time of the uniform grid.
    #[arg(long = "t-end", default_value_t = 1.0)]
    t_end: f64,
    /// Number of grid steps.
    #[arg(long, default_value_t = 256)]
    steps: usize,
}

impl GridArgs {
    fn resolve(&self) -> Result<Grid> {
        Grid::new(self.t_end, self.steps)
    }
}

#[derive(Args)]
struct KernelArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Kernel order α.
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    inversion: InversionArgs,
    /// Compare kernel curves across comma-separated preset names instead.
    #[arg(long, value_name = "NAMES", num_args = 0..=1,
          default_missing_value = "classical,tempered,affine,hybrid")]
    compare: Option<String>,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InvertArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Symbol power α in Φ^(-α).
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Extra p^(-level) factor: 0 kernel, 1 and 2 cumulative integrals.
    #[arg(long, default_value_t = 0)]
    level: u8,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    inversion: InversionArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IntegralArgs {
    /// Input CSV with header `t,...` and one column per component.
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Integral order α.
    #[arg(long)]
    alpha: f64,
    /// Quadrature: trapezoid (product integration) or rectangle.
    #[arg(long, default_value = "trapezoid")]
    scheme: String,
    /// Operator side: left or right.
    #[arg(long, default_value = "left")]
    side: String,
    #[command(flatten)]
    inversion: InversionArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DerivativeArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Derivative order α ∈ (0, 1].
    #[arg(long)]
    alpha: f64,
    /// Derivative kind: caputo or rl (Riemann-Liouville type).
    #[arg(long, default_value = "caputo")]
    kind: String,
    #[arg(long, default_value = "left")]
    side: String,
    /// Where ᶜD takes x' from: fd (finite differences) or file.
    #[arg(long = "deriv-mode", default_value = "fd")]
    deriv_mode: String,
    /// CSV with x' samples, required when --deriv-mode file.
    #[arg(long = "deriv-input")]
    deriv_input: Option<PathBuf>,
    #[command(flatten)]
    inversion: InversionArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MlArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Eigenvalue λ in E_{Φ,α}(λ, t).
    #[arg(long, allow_hyphen_values = true)]
    lambda: f64,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    inversion: InversionArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RelaxArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Relaxation rate κ > 0.
    #[arg(long)]
    kappa: f64,
    /// Initial value x(0).
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    x0: f64,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    inversion: InversionArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LangevinArgs {
    /// JSON problem description (see README for the schema).
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    inversion: InversionArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Generator preset to verify (repeatable; default: the four families).
    #[arg(long)]
    preset: Vec<String>,
    /// Suite name to run (repeatable; default: all suites).
    #[arg(long)]
    suite: Vec<String>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    inversion: InversionArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    if let Some(n) = dynmem::configured_threads() {
        if n >= 2 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Divergence(_) | Error::NonFiniteInversion(_) => 2,
                _ => 3,
            }
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Kernel(args) => cmd_kernel(args),
        Command::Invert(args) => cmd_invert(args),
        Command::Integral(args) => cmd_integral(args),
        Command::Derivative(args) => cmd_derivative(args),
        Command::Ml(args) => cmd_ml(args),
        Command::Relax(args) => cmd_relax(args),
        Command::Langevin(args) => cmd_langevin(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Presets => cmd_presets(),
    }
}

fn parse_kv(text: &str) -> Result<(String, f64)> {
    let (name, value) = text.split_once('=').ok_or_else(|| {
        Error::InvalidConfig(format!("expected NAME=VALUE, got `{text}`"))
    })?;
    let value: f64 = value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("`{value}` is not a number")))?;
    Ok((name.to_string(), value))
}

fn lookup(pairs: &[(String, f64)], name: &str, default: f64) -> f64 {
    pairs
        .iter()
        .rev()
        .find(|(k, _)| k == name)
        .map(|(_, v)| *v)
        .unwrap_or(default)
}

fn preset_from_name(name: &str, theta: &[(String, f64)]) -> Result<GeneratorPreset> {
    match name {
        "classical" => Ok(GeneratorPreset::Classical),
        "tempered" => Ok(GeneratorPreset::Tempered {
            lambda: lookup(theta, "lambda", 1.0),
        }),
        "affine" => Ok(GeneratorPreset::Affine {
            a: lookup(theta, "a", 1.0),
            b: lookup(theta, "b", 1.0),
        }),
        "power-scaled" => Ok(GeneratorPreset::PowerScaled {
            rho: lookup(theta, "rho", 0.5),
        }),
        "hybrid" => Ok(GeneratorPreset::Hybrid {
            lambda: lookup(theta, "lambda", 1.0),
            eta: lookup(theta, "eta", 0.5),
            mu: lookup(theta, "mu", 0.6),
            nu: lookup(theta, "nu", 0.4),
        }),
        other => Err(Error::InvalidConfig(format!(
            "unknown preset `{other}` (expected classical, tempered, affine, power-scaled, or hybrid)"
        ))),
    }
}

/// Full double precision so CSV round-trips bit-exactly.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn emit(out: Option<&PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn write_gridfn_csv(header: &[String], f: &GridFunction) -> String {
    let mut text = header.join(",");
    text.push('\n');
    let grid = *f.grid();
    for j in 0..grid.len() {
        let mut row = vec![fmt(grid.node(j))];
        match f.value(j) {
            Ok(values) => row.extend(values.iter().copied().map(fmt)),
            Err(_) => row.extend(std::iter::repeat(fmt(f64::NAN)).take(f.dim())),
        }
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

fn read_gridfn_csv(path: &PathBuf) -> Result<(Vec<String>, GridFunction)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::InvalidConfig(format!("{}: empty CSV", path.display())))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    if header.len() < 2 || header[0] != "t" {
        return Err(Error::InvalidConfig(format!(
            "{}: expected header `t,<columns...>`",
            path.display()
        )));
    }
    let dim = header.len() - 1;
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (row, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != dim + 1 {
            return Err(Error::InvalidConfig(format!(
                "{}: row {} has {} cells, expected {}",
                path.display(),
                row + 2,
                cells.len(),
                dim + 1
            )));
        }
        let mut parsed = cells.iter().map(|c| {
            c.parse::<f64>().map_err(|_| {
                Error::InvalidConfig(format!(
                    "{}: row {}: `{c}` is not a number",
                    path.display(),
                    row + 2
                ))
            })
        });
        times.push(parsed.next().unwrap()?);
        for cell in parsed {
            samples.push(cell?);
        }
    }
    if times.len() < 2 || times[0] != 0.0 {
        return Err(Error::InvalidConfig(format!(
            "{}: need at least two rows starting at t = 0",
            path.display()
        )));
    }
    let n = times.len() - 1;
    let t_end = times[n];
    let grid = Grid::new(t_end, n)?;
    for (j, &t) in times.iter().enumerate() {
        if (t - grid.node(j)).abs() > 1e-9 * t_end.max(1.0) {
            return Err(Error::InvalidConfig(format!(
                "{}: non-uniform time column at row {} (t = {t})",
                path.display(),
                j + 2
            )));
        }
    }
    Ok((header, GridFunction::from_samples(grid, dim, samples)?))
}

fn parse_scheme(name: &str) -> Result<QuadratureScheme> {
    match name {
        "trapezoid" => Ok(QuadratureScheme::TrapezoidProduct),
        "rectangle" => Ok(QuadratureScheme::RectangleLeft),
        other => Err(Error::InvalidConfig(format!(
            "unknown scheme `{other}` (expected trapezoid or rectangle)"
        ))),
    }
}

fn parse_side(name: &str) -> Result<Side> {
    match name {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        other => Err(Error::InvalidConfig(format!(
            "unknown side `{other}` (expected left or right)"
        ))),
    }
}

fn cmd_kernel(args: KernelArgs) -> Result<i32> {
    let grid = args.grid.resolve()?;
    let config = args.inversion.resolve()?;

    if let Some(names) = &args.compare {
        let pairs = args.generator.theta_pairs()?;
        let mut header = vec!["t".to_string()];
        let mut kernels = Vec::new();
        for name in names.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (expr, theta) = preset_from_name(name, &pairs)?.make()?;
            header.push(format!("psi_{name}"));
            kernels.push(Kernel::new(expr, theta, args.alpha, config)?);
        }
        if kernels.is_empty() {
            return Err(Error::InvalidConfig("--compare lists no presets".into()));
        }
        let mut text = header.join(",");
        text.push('\n');
        for j in 0..grid.len() {
            let t = grid.node(j);
            let mut row = vec![fmt(t)];
            for kernel in &kernels {
                row.push(fmt(kernel.eval(t, 0).unwrap_or(f64::NAN)));
            }
            text.push_str(&row.join(","));
            text.push('\n');
        }
        emit(args.out.as_ref(), &text)?;
        return Ok(0);
    }

    let (expr, theta) = args.generator.resolve()?;
    let kernel = Kernel::new(expr, theta, args.alpha, config)?;
    let (k1, k2) = kernel.cumulative_table(&grid)?;
    let mut text = String::from("t,psi,K1,K2\n");
    for j in 0..grid.len() {
        let t = grid.node(j);
        let psi = kernel.eval(t, 0).unwrap_or(f64::NAN);
        text.push_str(&format!("{},{},{},{}\n", fmt(t), fmt(psi), fmt(k1[j]), fmt(k2[j])));
    }
    emit(args.out.as_ref(), &text)?;
    Ok(0)
}

fn cmd_invert(args: InvertArgs) -> Result<i32> {
    if args.level > 2 {
        return Err(Error::InvalidConfig("--level must be 0, 1, or 2".into()));
    }
    let grid = args.grid.resolve()?;
    let config = args.inversion.resolve()?;
    let (expr, theta) = args.generator.resolve()?;
    let level = args.level;
    let alpha = args.alpha;
    let values = laplace::invert_on_grid(
        |p: Complex64| Ok(expr.symbol_power(&theta, alpha, p)? * p.powi(-(level as i32))),
        &grid,
        &config,
    )?;
    let header = vec!["t".to_string(), "value".to_string()];
    emit(args.out.as_ref(), &write_gridfn_csv(&header, &values))?;
    Ok(0)
}

fn cmd_integral(args: IntegralArgs) -> Result<i32> {
    let (header, x) = read_gridfn_csv(&args.input)?;
    let config = args.inversion.resolve()?;
    let (expr, theta) = args.generator.resolve()?;
    let y = operators::fractional_integral(
        &expr,
        &theta,
        args.alpha,
        &x,
        parse_scheme(&args.scheme)?,
        parse_side(&args.side)?,
        &config,
    )?;
    emit(args.out.as_ref(), &write_gridfn_csv(&header, &y))?;
    Ok(0)
}

fn cmd_derivative(args: DerivativeArgs) -> Result<i32> {
    let (header, x) = read_gridfn_csv(&args.input)?;
    let config = args.inversion.resolve()?;
    let (expr, theta) = args.generator.resolve()?;
    let side = parse_side(&args.side)?;

    let supplied = match args.deriv_mode.as_str() {
        "fd" => None,
        "file" => {
            let path = args.deriv_input.as_ref().ok_or_else(|| {
                Error::InvalidConfig("--deriv-mode file requires --deriv-input".into())
            })?;
            Some(read_gridfn_csv(path)?.1)
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown deriv mode `{other}` (expected fd or file)"
            )))
        }
    };

    let y = match args.kind.as_str() {
        "rl" => operators::rl_derivative(&expr, &theta, args.alpha, &x, side, &config)?,
        "caputo" => {
            let mode = match &supplied {
                Some(samples) => DerivMode::Supplied(samples),
                None => DerivMode::FiniteDifference,
            };
            operators::caputo_derivative(&expr, &theta, args.alpha, &x, side, mode, &config)?
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown derivative kind `{other}` (expected caputo or rl)"
            )))
        }
    };
    emit(args.out.as_ref(), &write_gridfn_csv(&header, &y))?;
    Ok(0)
}

fn cmd_ml(args: MlArgs) -> Result<i32> {
    let grid = args.grid.resolve()?;
    let config = args.inversion.resolve()?;
    let (generator, theta) = args.generator.resolve()?;
    let query = MLQuery {
        generator,
        theta,
        alpha: args.alpha,
        lambda: args.lambda,
        grid,
        config,
    };
    let e = ml::ml_dynamic(&query)?;
    let header = vec!["t".to_string(), "E".to_string()];
    emit(args.out.as_ref(), &write_gridfn_csv(&header, &e))?;
    Ok(0)
}

fn cmd_relax(args: RelaxArgs) -> Result<i32> {
    let grid = args.grid.resolve()?;
    let config = args.inversion.resolve()?;
    let (expr, theta) = args.generator.resolve()?;
    let x = ml::relaxation_solve(&expr, &theta, args.alpha, args.kappa, args.x0, &grid, &config)?;
    let header = vec!["t".to_string(), "x".to_string()];
    emit(args.out.as_ref(), &write_gridfn_csv(&header, &x))?;
    Ok(0)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LangevinConfig {
    alpha: f64,
    beta: f64,
    generator: String,
    #[serde(default)]
    theta: std::collections::BTreeMap<String, f64>,
    dim: usize,
    #[serde(rename = "A")]
    a_matrix: Vec<f64>,
    #[serde(rename = "B")]
    b_matrix: Vec<f64>,
    x0: Vec<f64>,
    x1: Vec<f64>,
    t_end: f64,
    n_steps: usize,
    #[serde(default)]
    damping: DampingConfig,
    #[serde(default)]
    sigma: SigmaConfig,
    #[serde(rename = "F", default)]
    forcing: ForcingConfig,
    #[serde(default = "default_velocity_mode")]
    velocity_term_mode: VelocityTermMode,
    #[serde(default = "default_corrector_iterations")]
    corrector_iterations: usize,
}

fn default_velocity_mode() -> VelocityTermMode {
    VelocityTermMode::CumulativeKernel
}

fn default_corrector_iterations() -> usize {
    1
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum DampingConfig {
    /// Constant damping coefficient.
    Const(f64),
    /// Expression in the time variable `t`, e.g. "0.5 * t".
    Expr(String),
}

impl Default for DampingConfig {
    fn default() -> Self {
        DampingConfig::Const(0.0)
    }
}

#[derive(Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SigmaConfig {
    /// σ(t) = t (no deviating argument).
    #[default]
    Identity,
    /// σ(t) = q·t with 0 ≤ q ≤ 1.
    Proportional(f64),
    /// σ(t) = max(t − τ, 0) with τ ≥ 0.
    Delay(f64),
}

#[derive(Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ForcingConfig {
    /// F ≡ 0.
    #[default]
    Zero,
    /// F ≡ c in every component.
    Constant(f64),
    /// F_i = c·u_i³ on the current state.
    Cubic(f64),
}

fn build_damping(config: DampingConfig) -> Result<langevin::ScalarFn> {
    match config {
        DampingConfig::Const(value) => {
            if !value.is_finite() {
                return Err(Error::InvalidConfig("damping must be finite".into()));
            }
            Ok(Box::new(move |_| value))
        }
        DampingConfig::Expr(text) => {
            let expr = parse_generator(&text)?;
            let eval = move |t: f64| -> Result<f64> {
                let theta = ParamSet::from_pairs([("t", t)])?;
                Ok(expr.eval(&theta, Complex64::new(t, 0.0))?.re)
            };
            // Surface malformed expressions at load time, not mid-solve.
            eval(0.5)?;
            Ok(Box::new(move |t| eval(t).unwrap_or(f64::NAN)))
        }
    }
}

fn build_sigma(config: SigmaConfig) -> Result<langevin::ScalarFn> {
    match config {
        SigmaConfig::Identity => Ok(Box::new(|t| t)),
        SigmaConfig::Proportional(q) => {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::InvalidConfig(format!(
                    "proportional sigma needs q in [0, 1], got {q}"
                )));
            }
            Ok(Box::new(move |t| q * t))
        }
        SigmaConfig::Delay(tau) => {
            if !(tau >= 0.0 && tau.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "delay sigma needs tau >= 0, got {tau}"
                )));
            }
            Ok(Box::new(move |t| (t - tau).max(0.0)))
        }
    }
}

fn build_forcing(config: ForcingConfig, dim: usize) -> langevin::ForcingFn {
    match config {
        ForcingConfig::Zero => Box::new(move |_, _, _| vec![0.0; dim]),
        ForcingConfig::Constant(c) => Box::new(move |_, _, _| vec![c; dim]),
        ForcingConfig::Cubic(c) => {
            Box::new(move |_, u: &[f64], _| u.iter().map(|&v| c * v * v * v).collect())
        }
    }
}

fn cmd_langevin(args: LangevinArgs) -> Result<i32> {
    let text = fs::read_to_string(&args.config)?;
    let config: LangevinConfig = serde_json::from_str(&text)?;
    let generator = parse_generator(&config.generator)?;
    let theta = ParamSet::from_pairs(config.theta)?;

    let problem = LangevinProblem {
        alpha: config.alpha,
        beta: config.beta,
        generator,
        theta,
        dim: config.dim,
        damping: build_damping(config.damping)?,
        a_matrix: config.a_matrix,
        b_matrix: config.b_matrix,
        sigma: build_sigma(config.sigma)?,
        forcing: build_forcing(config.forcing, config.dim),
        x0: config.x0,
        x1: config.x1,
        t_end: config.t_end,
    };
    let options = SolverOptions {
        n_steps: config.n_steps,
        corrector_iterations: config.corrector_iterations,
        velocity_term_mode: config.velocity_term_mode,
        inversion: args.inversion.resolve()?,
    };
    let trajectory = langevin::solve(&problem, &options)?;

    let mut header = vec!["t".to_string()];
    header.extend((1..=problem.dim).map(|i| format!("x_{i}")));
    emit(args.out.as_ref(), &write_gridfn_csv(&header, &trajectory.states))?;
    Ok(0)
}

#[derive(Serialize)]
struct ReportRecord {
    suite: String,
    check: String,
    measured: f64,
    threshold: f64,
    passed: bool,
}

fn cmd_verify(args: VerifyArgs) -> Result<i32> {
    let pairs: Vec<(String, f64)> = Vec::new();
    let preset_names: Vec<&str> = if args.preset.is_empty() {
        vec!["classical", "tempered", "affine", "hybrid"]
    } else {
        args.preset.iter().map(String::as_str).collect()
    };
    let presets = preset_names
        .iter()
        .map(|name| {
            if let Some(text) = name.strip_prefix("custom:") {
                Ok(GeneratorPreset::Custom(text.to_string()))
            } else {
                preset_from_name(name, &pairs)
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let suites = if args.suite.is_empty() {
        Suite::ALL.to_vec()
    } else {
        args.suite
            .iter()
            .map(|name| {
                Suite::from_name(name).ok_or_else(|| {
                    Error::InvalidConfig(format!("unknown suite `{name}`"))
                })
            })
            .collect::<Result<Vec<_>>>()?
    };

    let grid = args.grid.resolve()?;
    let config = args.inversion.resolve()?;
    let report = run_verify(&presets, &suites, &grid, &config)?;

    let records: Vec<ReportRecord> = report
        .checks
        .iter()
        .map(|check| {
            let (suite, rest) = check.name.split_once('/').unwrap_or(("", &check.name));
            ReportRecord {
                suite: suite.to_string(),
                check: rest.to_string(),
                measured: check.measured,
                threshold: check.threshold,
                passed: check.passed,
            }
        })
        .collect();
    let mut json = serde_json::to_string_pretty(&records)?;
    json.push('\n');
    emit(args.out.as_ref(), &json)?;
    Ok(if report.overall { 0 } else { 1 })
}

fn cmd_presets() -> Result<i32> {
    let text = "\
Supported generator families (kernel = inverse transform of Phi(p)^(-alpha)):
  classical                       Phi(p) = p
      power-law kernel t^(alpha-1)/Gamma(alpha)
  tempered     [lambda]           Phi(p) = p + lambda
      exponentially tempered kernel e^(-lambda t) t^(alpha-1)/Gamma(alpha)
  affine       [a, b]             Phi(p) = a*p + b
      scaled tempered kernel a^(-alpha) e^(-(b/a) t) t^(alpha-1)/Gamma(alpha);
      with a = sin(theta), b = cos(theta) this is the cotangent-weighted kernel
  power-scaled [rho]              Phi(p) = p^rho
      kernel t^(alpha*rho - 1)/Gamma(alpha*rho)
  hybrid       [lambda,eta,mu,nu] Phi(p) = (p + lambda)^mu + eta * p^nu
      crossover between tempered and pure power-law memory
  custom (--generator \"...\")      any expression in p over + - * ^ ( )
      parameters bound with repeated --theta name=value

Kernels outside this family (not representable as Phi(p)^(-alpha) with a
single alpha-independent generator; no preset is provided):
  Hadamard, Katugampola, Riesz, Weyl, Hilfer, conformable
      not time-convolutions with a difference kernel
  Caputo-Fabrizio, Atangana-Baleanu, distributed-order
      the alpha-dependence is not a symbol power of one fixed generator
  Prabhakar
      three-parameter kernel; approximate via a custom generator expression
";
    print!("{text}");
    Ok(0)
}

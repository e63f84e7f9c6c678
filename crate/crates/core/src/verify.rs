//! Identity-verification suites: each suite turns one proved property of the
//! calculus into a measurable residual or convergence order and reports it as
//! named pass/fail checks. Thresholds live in one place below so tolerance
//! changes stay auditable.

use statrs::function::gamma::gamma;

use crate::expr::{GeneratorExpr, GeneratorPreset, ParamSet};
use crate::gridfn::GridFunction;
use crate::kernel::{self, Kernel};
use crate::langevin::{self, LangevinProblem, SolverOptions};
use crate::laplace::{Grid, InversionConfig};
use crate::ml::{self, MLQuery};
use crate::operators::{self, DerivMode, QuadratureScheme, Side};
use crate::report::{Check, VerificationReport};
use crate::{Error, Result};

/// One table of every numeric threshold used by the suites.
pub mod thresholds {
    /// Closed-form kernel oracles, relative error.
    pub const KERNEL_ORACLE_REL: f64 = 1e-8;
    /// Exact-identity residuals (linearity, constants, closed-form paths).
    pub const EXACT_ABS: f64 = 1e-12;
    /// Semigroup residual for the classical α = β = 1/2 case at N = 256.
    pub const SEMIGROUP_CLASSICAL_ABS: f64 = 0.02;
    /// Minimum observed convergence order for the semigroup residual.
    pub const SEMIGROUP_ORDER: f64 = 0.9;
    /// Minimum observed order for inverse relations, power formulas, and the
    /// eigenfunction residual.
    pub const IDENTITY_ORDER: f64 = 0.8;
    /// Mittag-Leffler reduction agreement, absolute.
    pub const ML_REDUCTION_ABS: f64 = 1e-6;
    /// Forward-Laplace symbol identity, relative.
    pub const LAPLACE_SYMBOL_REL: f64 = 1e-3;
    /// Zero-problem trajectory error.
    pub const ZERO_PROBLEM_ABS: f64 = 1e-14;
    /// Manufactured Langevin solution at N = 256.
    pub const LANGEVIN_MANUFACTURED_ABS: f64 = 0.05;
    /// Residuals below this are treated as exact when estimating orders.
    pub const ORDER_FLOOR: f64 = 1e-12;
}

/// The verification suites, named after the identity they check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Admissibility,
    Semigroup,
    InverseRelations,
    Linearity,
    Constants,
    PowerFormulas,
    LaplaceReduction,
    MlReduction,
    MlEigen,
    Ibp,
    Taylor,
    Limits,
    Monotonicity,
    LangevinManufactured,
    UniquenessCondition,
}

impl Suite {
    pub const ALL: [Suite; 15] = [
        Suite::Admissibility,
        Suite::Semigroup,
        Suite::InverseRelations,
        Suite::Linearity,
        Suite::Constants,
        Suite::PowerFormulas,
        Suite::LaplaceReduction,
        Suite::MlReduction,
        Suite::MlEigen,
        Suite::Ibp,
        Suite::Taylor,
        Suite::Limits,
        Suite::Monotonicity,
        Suite::LangevinManufactured,
        Suite::UniquenessCondition,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Admissibility => "admissibility",
            Suite::Semigroup => "semigroup",
            Suite::InverseRelations => "inverse-relations",
            Suite::Linearity => "linearity",
            Suite::Constants => "constants",
            Suite::PowerFormulas => "power-formulas",
            Suite::LaplaceReduction => "laplace-reduction",
            Suite::MlReduction => "ml-reduction",
            Suite::MlEigen => "ml-eigen",
            Suite::Ibp => "ibp",
            Suite::Taylor => "taylor",
            Suite::Limits => "limits",
            Suite::Monotonicity => "monotonicity",
            Suite::LangevinManufactured => "langevin-manufactured",
            Suite::UniquenessCondition => "uniqueness-condition",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.iter().copied().find(|s| s.name() == name)
    }
}

/// Least-squares slope of log2(error) against refinement level (grids halve
/// between consecutive entries). Errors at roundoff level mean the scheme is
/// exact on this problem; `None` signals that.
pub fn observed_order(errors: &[f64]) -> Option<f64> {
    if errors.iter().all(|&e| e <= thresholds::ORDER_FLOOR) {
        return None;
    }
    let n = errors.len() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (i, &e) in errors.iter().enumerate() {
        let x = i as f64;
        let y = e.max(1e-300).log2();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    Some(-(n * sxy - sx * sy) / (n * sxx - sx * sx))
}

fn order_check(name: String, errors: &[f64], min_order: f64) -> Check {
    match observed_order(errors) {
        // Exact to roundoff: the convergence claim is trivially satisfied.
        None => Check::verdict(format!("{name} (exact to roundoff)"), 0.0, min_order, true),
        Some(order) => Check::verdict(name, order, min_order, order >= min_order),
    }
}

fn preset_label(preset: &GeneratorPreset) -> String {
    match preset {
        GeneratorPreset::Classical => "classical".into(),
        GeneratorPreset::Tempered { lambda } => format!("tempered(lambda={lambda})"),
        GeneratorPreset::Affine { a, b } => format!("affine(a={a},b={b})"),
        GeneratorPreset::PowerScaled { rho } => format!("power-scaled(rho={rho})"),
        GeneratorPreset::Hybrid { lambda, eta, mu, nu } => {
            format!("hybrid(lambda={lambda},eta={eta},mu={mu},nu={nu})")
        }
        GeneratorPreset::Custom(text) => format!("custom({text})"),
    }
}

fn is_classical(generator: &GeneratorExpr, theta: &ParamSet) -> bool {
    matches!(generator.affine_coefficients(theta), Some((a, b)) if a == 1.0 && b == 0.0)
}

fn is_affine(generator: &GeneratorExpr, theta: &ParamSet) -> bool {
    matches!(generator.affine_coefficients(theta), Some((a, _)) if a > 0.0)
}

struct SuiteContext<'a> {
    generator: GeneratorExpr,
    theta: ParamSet,
    label: String,
    grid: Grid,
    config: &'a InversionConfig,
}

impl SuiteContext<'_> {
    fn check_name(&self, suite: Suite, detail: &str) -> String {
        format!("{}/{}: {}", suite.name(), self.label, detail)
    }

    fn halved_grids(&self) -> Result<Vec<Grid>> {
        let n = self.grid.n_steps;
        Ok(vec![
            Grid::new(self.grid.t_end, n / 2)?,
            Grid::new(self.grid.t_end, n)?,
        ])
    }
}

/// Run the selected suites for each generator preset and collect every check.
pub fn run_verify(
    generators: &[GeneratorPreset],
    suites: &[Suite],
    grid: &Grid,
    config: &InversionConfig,
) -> Result<VerificationReport> {
    if suites.is_empty() {
        return Err(Error::InvalidConfig("no suites selected".into()));
    }
    let mut suites = suites.to_vec();
    suites.sort();
    suites.dedup();

    let mut report = VerificationReport::new();
    for preset in generators {
        let (generator, theta) = preset.make()?;
        let ctx = SuiteContext {
            generator,
            theta,
            label: preset_label(preset),
            grid: *grid,
            config,
        };
        for &suite in &suites {
            let sub = run_suite(&ctx, suite)?;
            report.merge(sub);
        }
    }
    Ok(report)
}

fn run_suite(ctx: &SuiteContext<'_>, suite: Suite) -> Result<VerificationReport> {
    match suite {
        Suite::Admissibility => suite_admissibility(ctx),
        Suite::Semigroup => suite_semigroup(ctx),
        Suite::InverseRelations => suite_inverse_relations(ctx),
        Suite::Linearity => suite_linearity(ctx),
        Suite::Constants => suite_constants(ctx),
        Suite::PowerFormulas => suite_power_formulas(ctx),
        Suite::LaplaceReduction => suite_laplace_reduction(ctx),
        Suite::MlReduction => suite_ml_reduction(ctx),
        Suite::MlEigen => suite_ml_eigen(ctx),
        Suite::Ibp => suite_ibp(ctx),
        Suite::Taylor => suite_taylor(ctx),
        Suite::Limits => suite_limits(ctx),
        Suite::Monotonicity => suite_monotonicity(ctx),
        Suite::LangevinManufactured => suite_langevin(ctx),
        Suite::UniquenessCondition => suite_uniqueness(ctx),
    }
}

fn suite_admissibility(ctx: &SuiteContext<'_>) -> Result<VerificationReport> {
    let sub = kernel::admissibility_check(
        &ctx.generator,
        &ctx.theta,
        &[0.4, 0.5],
        &ctx.grid,
        ctx.config,
    )?;
    let mut report = VerificationReport::new();
    for check in sub.checks {
        report.push(Check::verdict(
            ctx.check_name(Suite::Admissibility, &check.name),
            check.measured,
            check.threshold,
            check.passed,
        ));
    }
    Ok(report)
}

fn suite_semigroup(ctx: &SuiteContext<'_>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let (alpha, beta) = (0.4, 0.5);
    let mut errs = Vec::new();
    for grid in ctx.halved_grids()? {
        errs.push(kernel::semigroup_residual(
            &ctx.generator,
            &ctx.theta,
            alpha,
            beta,
            &grid,
            ctx.config,
        )?);
    }
    report.push(order_check(
        ctx.check_name(
            Suite::Semigroup,
            &format!("residual order under halving (alpha={alpha}, beta={beta})"),
        ),
        &errs,
        thresholds::SEMIGROUP_ORDER,
    ));

    if is_classical(&ctx.generator, &ctx.theta) {
        let grid = Grid::new(1.0, 256)?;
        let residual =
            kernel::semigroup_residual(&ctx.generator, &ctx.theta, 0.5, 0.5, &grid, ctx.config)?;
        report.push(Check::new(
            ctx.check_name(Suite::Semigroup, "alpha=beta=0.5 vs exact unit kernel, N=256"),
            residual,
            thresholds::SEMIGROUP_CLASSICAL_ABS,
        ));
    }
    Ok(report)
}

fn suite_inverse_relations(ctx: &SuiteContext<'_>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    if !is_affine(&ctx.generator, &ctx.theta) {
        // Inversion goes through the conjugated first-order operator, which
        // has a closed form only for affine generators; for others the
        // identity gap does not vanish under refinement and no claim is made.
        return Ok(report);
    }
    for alpha in [0.3, 0.7] {
        let mut round_trip = Vec::new();
        let mut caputo_trip = Vec::new();
        for grid in ctx.halved_grids()? {
            let x = GridFunction::sample_scalar(grid, f64::sin);
            let xp = GridFunction::sample_scalar(grid, f64::cos);

            let ix = operators::fractional_integral(
                &ctx.generator,
                &ctx.theta,
                alpha,
                &x,
                QuadratureScheme::TrapezoidProduct,
                Side::Left,
                ctx.config,
            )?;
            let back = operators::rl_derivative(
                &ctx.generator,
                &ctx.theta,
                alpha,
                &ix,
                Side::Left,
                ctx.config,
            )?;
            round_trip.push(back.max_abs_diff(&x, 0.1 * grid.t_end));

            let d = operators::caputo_derivative(
                &ctx.generator,
                &ctx.theta,
                alpha,
                &x,
                Side::Left,
                DerivMode::Supplied(&xp),
                ctx.config,
            )?;
            let rebuilt = operators::fractional_integral(
                &ctx.generator,
                &ctx.theta,
                alpha,
                &d,
                QuadratureScheme::TrapezoidProduct,
                Side::Left,
                ctx.config,
            )?;
            // x(0) = 0 for sin, so the target is x itself.
            caputo_trip.push(rebuilt.max_abs_diff(&x, 0.1 * grid.t_end));
        }
        report.push(order_check(
            ctx.check_name(
                Suite::InverseRelations,
                &format!("derivative inverts integral, alpha={alpha}"),
            ),
            &round_trip,
            thresholds::IDENTITY_ORDER,
        ));
        report.push(order_check(
            ctx.check_name(
                Suite::InverseRelations,
                &format!("integral recovers x - x(0) from Caputo, alpha={alpha}"),
            ),
            &caputo_trip,
            thresholds::IDENTITY_ORDER,
        ));
    }
    Ok(report)
}

fn suite_linearity(ctx: &SuiteContext<'_>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let grid = Grid::new(ctx.grid.t_end, ctx.grid.n_steps.min(128))?;
    let x = GridFunction::sample_scalar(grid, f64::sin);
    let y = GridFunction::sample_scalar(grid, |t| (2.0 * t).cos());
    let xp = GridFunction::sample_scalar(grid, f64::cos);
    let yp = GridFunction::sample_scalar(grid, |t| -2.0 * (2.0 * t).sin());
    let combo = x.linear_combination(2.0, &y, -3.0)?;
    let combo_p = xp.linear_combination(2.0, &yp, -3.0)?;
    let alpha = 0.5;

    let integral = |f: &GridFunction| {
        operators::fractional_integral(
            &ctx.generator,
            &ctx.theta,
            alpha,
            f,
            QuadratureScheme::TrapezoidProduct,
            Side::Left,
            ctx.config,
        )
    };
    let lhs = integral(&combo)?;
    let rhs = integral(&x)?.linear_combination(2.0, &integral(&y)?, -3.0)?;
    report.push(Check::new(
        ctx.check_name(Suite::Linearity, "fractional integral"),
        lhs.max_abs_diff(&rhs, 0.0),
        thresholds::EXACT_ABS,
    ));

    let rl = |f: &GridFunction| {
        operators::rl_derivative(&ctx.generator, &ctx.theta, alpha, f, Side::Left, ctx.config)
    };
    let lhs = rl(&combo)?;
    let rhs = rl(&x)?.linear_combination(2.0, &rl(&y)?, -3.0)?;
    report.push(Check::new(
        ctx.check_name(Suite::Linearity, "Riemann-Liouville derivative"),
        lhs.max_abs_diff(&rhs, 0.0),
        thresholds::EXACT_ABS,
    ));

    let caputo = |f: &GridFunction, fp: &GridFunction| {
        operators::caputo_derivative(
            &ctx.generator,
            &ctx.theta,
            alpha,
            f,
            Side::Left,
            DerivMode::Supplied(fp),
            ctx.config,
        )
    };
    let lhs = caputo(&combo, &combo_p)?;
    let rhs = caputo(&x, &xp)?.linear_combination(2.0, &caputo(&y, &yp)?, -3.0)?;
    report.push(Check::new(
        ctx.check_name(Suite::Linearity, "Caputo derivative"),
        lhs.max_abs_diff(&rhs, 0.0),
        thresholds::EXACT_ABS,
    ));
    Ok(report)
}

fn suite_constants(ctx: &SuiteContext<'_>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let grid = Grid::new(ctx.grid.t_end, ctx.grid.n_steps.min(64))?;
    let out = operators::caputo_polynomial(
        &ctx.generator,
        &ctx.theta,
        0.5,
        &[(0, 7.25)],
        0.0,
        &grid,
        ctx.config,
    )?;
    report.push(Check::new(
        ctx.check_name(Suite::Constants, "Caputo derivative of a constant"),
        out.max_abs(0.0),
        thresholds::EXACT_ABS,
    ));
    Ok(report)
}

fn suite_power_formulas(ctx: &SuiteContext<'_>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    if is_classical(&ctx.generator, &ctx.theta) {
        // Closed-form path against the Γ-ratio formula.
        let grid = Grid::new(1.0, 32)?;
        let mut worst = 0.0_f64;
        for b in [1u32, 2, 3] {
            for alpha in [0.3, 0.5, 0.7] {
                let out = operators::caputo_polynomial(
                    &ctx.generator,
                    &ctx.theta,
                    alpha,
                    &[(b, 1.0)],
                    0.0,
                    &grid,
                    ctx.config,
                )?;
                for j in 0..grid.len() {
                    let t = grid.node(j);
                    let exact =
                        gamma(b as f64 + 1.0) / gamma(b as f64 + 1.0 - alpha) * t.powf(b as f64 - alpha);
                    worst = worst.max((out.scalar(j)? - exact).abs());
                }
            }
        }
        report.push(Check::new(
            ctx.check_name(Suite::PowerFormulas, "closed-form path vs Gamma-ratio formula"),
            worst,
            thresholds::EXACT_ABS,
        ));
    }

    // Numeric path: convolve Ψ_{1-α} against the exact derivative samples and
    // check convergence to the same target that the closed form would give
    // (classical) or self-convergence via Richardson reference (otherwise).
    let alpha = 0.5;
    let b = 2u32;
    let mut errs = Vec::new();
    let reference_grid = Grid::new(ctx.grid.t_end, 4 * ctx.grid.n_steps)?;
    let reference = power_numeric(ctx, alpha, b, &reference_grid)?;
    for grid in ctx.halved_grids()? {
        let out = power_numeric(ctx, alpha, b, &grid)?;
        let stride = reference_grid.n_steps / grid.n_steps;
        let mut worst = 0.0_f64;
        for j in 0..grid.len() {
            if grid.node(j) < 0.1 * grid.t_end {
                continue;
            }
            worst = worst.max((out.scalar(j)? - reference.scalar(j * stride)?).abs());
        }
        errs.push(worst);
    }
    report.push(order_check(
        ctx.check_name(
            Suite::PowerFormulas,
            &format!("numeric path order under halving (b={b}, alpha={alpha})"),
        ),
        &errs,
        thresholds::IDENTITY_ORDER,
    ));
    Ok(report)
}

fn power_numeric(
    ctx: &SuiteContext<'_>,
    alpha: f64,
    b: u32,
    grid: &Grid,
) -> Result<GridFunction> {
    let deriv = GridFunction::sample_scalar(*grid, |s| b as f64 * s.powi(b as i32 - 1));
    operators::fractional_integral(
        &ctx.generator,
        &ctx.theta,
        1.0 - alpha,
        &deriv,
        QuadratureScheme::TrapezoidProduct,
        Side::Left,
        ctx.config,
    )
}

/// Forward Laplace transform of grid samples by the trapezoid rule.
fn forward_laplace(x: &GridFunction, p: f64) -> Result<f64> {
    let grid = x.grid();
    let h = grid.h();
    let mut acc = 0.5 * (x.scalar(0)? + x.scalar(grid.n_steps)? * (-p * grid.t_end).exp());
    for j in 1..grid.n_steps {
        acc += x.scalar(j)? * (-p * grid.node(j)).exp();
    }
    Ok(acc * h)
}

fn suite_laplace_reduction(ctx: &SuiteContext<'_>) -> Result<VerificationReport> {
    // L{I^α x}(p) = Φ(p)^(-α) X(p), both sides discretized with the same
    // forward quadrature on [0, 10].
    let mut report = VerificationReport::new();
    let alpha = 0.5;
    let grid = Grid::new(10.0, 1024)?;
    let x = GridFunction::sample_scalar(grid, f64::sin);
    let ix = operators::fractional_integral(
        &ctx.generator,
        &ctx.theta,
        alpha,
        &x,
        QuadratureScheme::TrapezoidProduct,
        Side::Left,
        ctx.config,
    )?;
    let mut worst = 0.0_f64;
    for p in [2.0, 3.0, 4.0, 5.0, 6.0, 8.0] {
        let lhs = forward_laplace(&ix, p)?;
        let symbol = ctx
            .generator
            .symbol_power(&ctx.theta, alpha, num_complex::Complex64::new(p, 0.0))?
            .re;
        let rhs = symbol * forward_laplace(&x, p)?;
        worst = worst.max(((lhs - rhs) / rhs).abs());
    }
    report.push(Check::new(
        ctx.check_name(Suite::LaplaceReduction, "transform of I^alpha x vs symbol times X"),
        worst,
        thresholds::LAPLACE_SYMBOL_REL,
    ));
    Ok(report)
}

fn suite_ml_reduction(ctx: &SuiteContext<'_>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    if !is_classical(&ctx.generator, &ctx.theta) {
        // The reduction theorem is a statement about Φ = p only.
        return Ok(report);
    }
    let grid = Grid::new(2.0, 40)?;
    let mut worst = 0.0_f64;
    for alpha in [0.3, 0.5, 0.8] {
        for lambda in [-1.0, -0.25] {
            let q = MLQuery {
                generator: ctx.generator.clone(),
                theta: ctx.theta.clone(),
                alpha,
                lambda,
                grid,
                config: *ctx.config,
            };
            let e = ml::ml_dynamic(&q)?;
            for j in 1..=grid.n_steps {
                let t = grid.node(j);
                if t < 0.05 {
                    continue;
                }
                let reference = ml::ml_classical(alpha, lambda * t.powf(alpha))?;
                worst = worst.max((e.scalar(j)? - reference).abs());
            }
        }
    }
    report.push(Check::new(
        ctx.check_name(Suite::MlReduction, "generalized vs classical series on [0.05, 2]"),
        worst,
        thresholds::ML_REDUCTION_ABS,
    ));
    Ok(report)
}

fn suite_ml_eigen(ctx: &SuiteContext<'_>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    if !is_affine(&ctx.generator, &ctx.theta) {
        // The conjugated first-order operator underpinning the residual is
        // only exact for affine generators; no claim is made beyond them.
        return Ok(report);
    }
    let mut errs = Vec::new();
    for n in [ctx.grid.n_steps, 4 * ctx.grid.n_steps] {
        let q = MLQuery {
            generator: ctx.generator.clone(),
            theta: ctx.theta.clone(),
            alpha: 0.5,
            lambda: -1.0,
            grid: Grid::new(1.0, n)?,
            config: *ctx.config,
        };
        errs.push(ml::ml_eigen_residual(&q)?);
    }
    // Two refinements of factor 4 total; convert to a per-halving order.
    let order = (errs[0] / errs[1]).log2() / 2.0;
    report.push(Check::verdict(
        ctx.check_name(Suite::MlEigen, "eigen residual order under refinement"),
        order,
        thresholds::IDENTITY_ORDER,
        order >= thresholds::IDENTITY_ORDER,
    ));
    Ok(report)
}

fn suite_ibp(ctx: &SuiteContext<'_>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let mut errs = Vec::new();
    for grid in ctx.halved_grids()? {
        let x = GridFunction::sample_scalar(grid, |t| t * t);
        let xp = GridFunction::sample_scalar(grid, |t| 2.0 * t);
        let y = GridFunction::sample_scalar(grid, |t| t);
        errs.push(operators::ibp_residual(
            &ctx.generator,
            &ctx.theta,
            0.5,
            &x,
            Some(&xp),
            &y,
            ctx.config,
        )?);
    }
    report.push(Check::verdict(
        ctx.check_name(Suite::Ibp, "residual decreases under halving"),
        errs[1],
        errs[0],
        errs[1] < errs[0] || errs[1] <= thresholds::ORDER_FLOOR,
    ));
    Ok(report)
}

fn suite_taylor(ctx: &SuiteContext<'_>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    if !is_affine(&ctx.generator, &ctx.theta) {
        // Same scope as inverse-relations: the reconstruction identity needs
        // the conjugated derivative, available only for affine generators.
        return Ok(report);
    }
    let mut errs = Vec::new();
    for grid in ctx.halved_grids()? {
        let x = GridFunction::sample_scalar(grid, |t| t * t);
        let xp = GridFunction::sample_scalar(grid, |t| 2.0 * t);
        let d = operators::caputo_derivative(
            &ctx.generator,
            &ctx.theta,
            0.5,
            &x,
            Side::Left,
            DerivMode::Supplied(&xp),
            ctx.config,
        )?;
        let rebuilt =
            operators::taylor_reconstruct(&ctx.generator, &ctx.theta, 0.5, &[0.0], &d, ctx.config)?;
        errs.push(rebuilt.max_abs_diff(&x, 0.1 * grid.t_end));
    }
    report.push(Check::verdict(
        ctx.check_name(Suite::Taylor, "reconstruction error decreases under halving"),
        errs[1],
        errs[0],
        errs[1] < errs[0] || errs[1] <= thresholds::ORDER_FLOOR,
    ));
    Ok(report)
}

fn suite_limits(ctx: &SuiteContext<'_>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    if !is_classical(&ctx.generator, &ctx.theta) {
        // The approximate-identity limits are stated for Φ = p.
        return Ok(report);
    }
    let grid = Grid::new(1.0, 2048)?;

    let x = GridFunction::sample_scalar(grid, |t| t * t);
    let xp = GridFunction::sample_scalar(grid, |t| 2.0 * t);
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    for alpha in [0.9, 0.95, 0.99] {
        let d = operators::caputo_derivative(
            &ctx.generator,
            &ctx.theta,
            alpha,
            &x,
            Side::Left,
            DerivMode::Supplied(&xp),
            ctx.config,
        )?;
        let err = d.max_abs_diff(&xp, 0.1);
        monotone &= err < prev;
        prev = err;
    }
    report.push(Check::verdict(
        ctx.check_name(Suite::Limits, "Caputo derivative approaches x' as alpha -> 1"),
        prev,
        f64::INFINITY,
        monotone,
    ));

    let x = GridFunction::sample_scalar(grid, f64::sin);
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    for alpha in [0.1, 0.05, 0.01] {
        let y = operators::fractional_integral(
            &ctx.generator,
            &ctx.theta,
            alpha,
            &x,
            QuadratureScheme::TrapezoidProduct,
            Side::Left,
            ctx.config,
        )?;
        let err = y.max_abs_diff(&x, 0.1);
        monotone &= err < prev;
        prev = err;
    }
    report.push(Check::verdict(
        ctx.check_name(Suite::Limits, "integral approaches identity as alpha -> 0"),
        prev,
        f64::INFINITY,
        monotone,
    ));
    Ok(report)
}

fn suite_monotonicity(ctx: &SuiteContext<'_>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let grid = Grid::new(2.0, 64)?;
    let kernel = Kernel::new(ctx.generator.clone(), ctx.theta.clone(), 0.5, *ctx.config)?;
    let sub = kernel::monotonicity_probe(&kernel, &grid, 3)?;
    let worst = sub.checks.iter().map(|c| c.measured).fold(0.0, f64::max);
    report.push(Check::verdict(
        ctx.check_name(Suite::Monotonicity, "complete monotonicity probe, alpha=0.5"),
        worst,
        1e-10,
        sub.overall,
    ));
    Ok(report)
}

fn zero_problem(ctx: &SuiteContext<'_>) -> LangevinProblem {
    LangevinProblem {
        alpha: 0.5,
        beta: 0.5,
        generator: ctx.generator.clone(),
        theta: ctx.theta.clone(),
        dim: 1,
        damping: Box::new(|_| 0.0),
        a_matrix: vec![0.0],
        b_matrix: vec![0.0],
        sigma: Box::new(|t| t),
        forcing: Box::new(|_, _, _| vec![0.0]),
        x0: vec![1.0],
        x1: vec![0.0],
        t_end: 1.0,
    }
}

fn suite_langevin(ctx: &SuiteContext<'_>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let options = SolverOptions {
        n_steps: 256,
        inversion: *ctx.config,
        ..Default::default()
    };

    let problem = zero_problem(ctx);
    let grid = Grid::new(problem.t_end, options.n_steps)?;
    let constant = GridFunction::sample_scalar(grid, |_| 1.0);
    report.push(Check::new(
        ctx.check_name(Suite::LangevinManufactured, "zero problem stays constant"),
        langevin::manufactured_residual(&problem, &constant, &options)?,
        thresholds::ZERO_PROBLEM_ABS,
    ));

    if is_classical(&ctx.generator, &ctx.theta) {
        let mut problem = zero_problem(ctx);
        problem.x0 = vec![0.0];
        problem.forcing = Box::new(|_, _, _| vec![1.0]);
        let exact = GridFunction::sample_scalar(grid, |t| t);
        report.push(Check::new(
            ctx.check_name(Suite::LangevinManufactured, "constant forcing yields x = t"),
            langevin::manufactured_residual(&problem, &exact, &options)?,
            thresholds::LANGEVIN_MANUFACTURED_ABS,
        ));
    }
    Ok(report)
}

fn suite_uniqueness(ctx: &SuiteContext<'_>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new();
    let problem = zero_problem(ctx);
    let sub = langevin::check_uniqueness_condition(&problem, 0.0, ctx.config)?;
    report.push(Check::verdict(
        ctx.check_name(Suite::UniquenessCondition, "zero problem contracts"),
        sub.checks.last().map(|c| c.measured).unwrap_or(f64::NAN),
        1.0,
        sub.overall,
    ));

    if is_classical(&ctx.generator, &ctx.theta) {
        let mut problem = zero_problem(ctx);
        problem.a_matrix = vec![-1.0];
        let sub = langevin::check_uniqueness_condition(&problem, 0.0, ctx.config)?;
        let lhs = sub.checks.last().unwrap().measured;
        // Hand-computed boundary case: the left side is exactly 1.
        report.push(Check::verdict(
            ctx.check_name(
                Suite::UniquenessCondition,
                "boundary case |A|=1, T=1 reproduces lhs = 1",
            ),
            lhs,
            1.0,
            (lhs - 1.0).abs() <= 1e-10,
        ));
    }
    Ok(report)
}

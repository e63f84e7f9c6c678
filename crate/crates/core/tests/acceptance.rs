//! End-to-end acceptance gate: one test per release criterion, each printing a
//! single PASS/FAIL line. Run with `cargo test --test acceptance -- --nocapture`
//! to see the full scoreboard.

use num_complex::Complex64;
use statrs::function::gamma::gamma;

use dynmem::expr::GeneratorPreset;
use dynmem::gridfn::GridFunction;
use dynmem::kernel::{self, Kernel};
use dynmem::langevin::{self, LangevinProblem, SolverOptions};
use dynmem::laplace::{self, Grid, InversionConfig};
use dynmem::ml::{self, MLQuery};
use dynmem::operators::{self, DerivMode, QuadratureScheme, Side};
use dynmem::verify::observed_order;

fn conclude(num: u32, name: &str, pass: bool, detail: String) {
    println!(
        "criterion {num:02} ({name}): {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {num:02} ({name}): {detail}");
}

/// Order estimate with an escape hatch: schemes that are exact on the test
/// problem report roundoff-level errors from which no slope can be read.
fn order_ok(errors: &[f64], min_order: f64) -> (bool, String) {
    match observed_order(errors) {
        None => (true, "exact to roundoff".into()),
        Some(order) => (order >= min_order, format!("order {order:.3}, errors {errors:?}")),
    }
}

fn config() -> InversionConfig {
    InversionConfig::default()
}

fn affine_preset() -> GeneratorPreset {
    GeneratorPreset::Affine { a: 0.5, b: 1.5 }
}

fn hybrid_preset() -> GeneratorPreset {
    GeneratorPreset::Hybrid { lambda: 1.0, eta: 0.5, mu: 0.6, nu: 0.4 }
}

#[test]
fn criterion_01_classical_kernel_oracle() {
    let mut worst = 0.0_f64;
    for alpha in [0.25, 0.5, 0.75, 1.25] {
        let (expr, theta) = GeneratorPreset::Classical.make().unwrap();
        let kernel = Kernel::new(expr.clone(), theta.clone(), alpha, config()).unwrap();
        for t in [0.1f64, 1.0, 5.0] {
            let exact = t.powf(alpha - 1.0) / gamma(alpha);
            let closed = kernel.eval(t, 0).unwrap();
            let numeric = laplace::invert(
                |p: Complex64| expr.symbol_power(&theta, alpha, p),
                t,
                &config(),
            )
            .unwrap();
            worst = worst.max(((closed - exact) / exact).abs());
            worst = worst.max(((numeric - exact) / exact).abs());
        }
    }
    conclude(1, "classical kernel oracle", worst <= 1e-8, format!("rel err {worst:.3e}"));
}

#[test]
fn criterion_02_tempered_kernel_oracle() {
    let mut worst = 0.0_f64;
    for lambda in [0.5, 1.0] {
        for alpha in [0.25, 0.5, 0.75, 1.25] {
            let (expr, theta) = GeneratorPreset::Tempered { lambda }.make().unwrap();
            let kernel = Kernel::new(expr.clone(), theta.clone(), alpha, config()).unwrap();
            for t in [0.1f64, 1.0, 5.0] {
                let exact = (-lambda * t).exp() * t.powf(alpha - 1.0) / gamma(alpha);
                let closed = kernel.eval(t, 0).unwrap();
                let numeric = laplace::invert(
                    |p: Complex64| expr.symbol_power(&theta, alpha, p),
                    t,
                    &config(),
                )
                .unwrap();
                worst = worst.max(((closed - exact) / exact).abs());
                worst = worst.max(((numeric - exact) / exact).abs());
            }
        }
    }
    conclude(2, "tempered kernel oracle", worst <= 1e-8, format!("rel err {worst:.3e}"));
}

#[test]
fn criterion_03_semigroup_convergence() {
    let presets = [
        GeneratorPreset::Classical,
        GeneratorPreset::Tempered { lambda: 1.0 },
        affine_preset(),
        hybrid_preset(),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for preset in &presets {
        let (expr, theta) = preset.make().unwrap();
        let mut errs = Vec::new();
        for n in [128usize, 256, 512, 1024] {
            let grid = Grid::new(1.0, n).unwrap();
            errs.push(
                kernel::semigroup_residual(&expr, &theta, 0.4, 0.5, &grid, &config()).unwrap(),
            );
        }
        let (ok, info) = order_ok(&errs, 0.9);
        pass &= ok;
        detail.push_str(&format!("{preset:?}: {info}; "));
    }

    let (expr, theta) = GeneratorPreset::Classical.make().unwrap();
    let grid = Grid::new(1.0, 256).unwrap();
    let residual = kernel::semigroup_residual(&expr, &theta, 0.5, 0.5, &grid, &config()).unwrap();
    pass &= residual <= 0.02;
    detail.push_str(&format!("classical half-half residual {residual:.3e}"));
    conclude(3, "semigroup convergence", pass, detail);
}

#[test]
fn criterion_04_inverse_relations() {
    let presets = [GeneratorPreset::Classical, GeneratorPreset::Tempered { lambda: 1.0 }];
    let mut pass = true;
    let mut detail = String::new();
    for preset in &presets {
        let (expr, theta) = preset.make().unwrap();
        for alpha in [0.3, 0.7] {
            let mut round = Vec::new();
            let mut caputo = Vec::new();
            for n in [128usize, 256, 512] {
                let grid = Grid::new(1.0, n).unwrap();
                let x = GridFunction::sample_scalar(grid, f64::sin);
                let xp = GridFunction::sample_scalar(grid, f64::cos);

                let ix = operators::fractional_integral(
                    &expr,
                    &theta,
                    alpha,
                    &x,
                    QuadratureScheme::TrapezoidProduct,
                    Side::Left,
                    &config(),
                )
                .unwrap();
                let back =
                    operators::rl_derivative(&expr, &theta, alpha, &ix, Side::Left, &config())
                        .unwrap();
                round.push(back.max_abs_diff(&x, 0.1));

                let d = operators::caputo_derivative(
                    &expr,
                    &theta,
                    alpha,
                    &x,
                    Side::Left,
                    DerivMode::Supplied(&xp),
                    &config(),
                )
                .unwrap();
                let rebuilt = operators::fractional_integral(
                    &expr,
                    &theta,
                    alpha,
                    &d,
                    QuadratureScheme::TrapezoidProduct,
                    Side::Left,
                    &config(),
                )
                .unwrap();
                // sin(0) = 0, so x - x(0) is x itself.
                caputo.push(rebuilt.max_abs_diff(&x, 0.1));
            }
            let (ok_a, info_a) = order_ok(&round, 0.8);
            let (ok_b, info_b) = order_ok(&caputo, 0.8);
            pass &= ok_a && ok_b;
            detail.push_str(&format!("{preset:?} a={alpha}: D(I x) {info_a}; I(Dc x) {info_b}; "));
        }
    }
    conclude(4, "inverse relations", pass, detail);
}

#[test]
fn criterion_05_power_formula() {
    let (expr, theta) = GeneratorPreset::Classical.make().unwrap();
    let grid = Grid::new(1.0, 32).unwrap();
    let mut worst = 0.0_f64;
    for b in [1u32, 2, 3] {
        for alpha in [0.3, 0.5, 0.7] {
            let out = operators::caputo_polynomial(
                &expr,
                &theta,
                alpha,
                &[(b, 1.0)],
                0.0,
                &grid,
                &config(),
            )
            .unwrap();
            for j in 0..grid.len() {
                let t = grid.node(j);
                let exact = gamma(b as f64 + 1.0) / gamma(b as f64 + 1.0 - alpha)
                    * t.powf(b as f64 - alpha);
                worst = worst.max((out.scalar(j).unwrap() - exact).abs());
            }
        }
    }
    let mut pass = worst <= 1e-12;
    let mut detail = format!("closed-form err {worst:.3e}; ");

    // Numeric path: product-integrate Ψ_{1-α} against the sampled derivative.
    for b in [1u32, 2, 3] {
        for alpha in [0.3, 0.5, 0.7] {
            let mut errs = Vec::new();
            for n in [128usize, 256, 512] {
                let grid = Grid::new(1.0, n).unwrap();
                let deriv =
                    GridFunction::sample_scalar(grid, |s| b as f64 * s.powi(b as i32 - 1));
                let out = operators::fractional_integral(
                    &expr,
                    &theta,
                    1.0 - alpha,
                    &deriv,
                    QuadratureScheme::TrapezoidProduct,
                    Side::Left,
                    &config(),
                )
                .unwrap();
                let mut err = 0.0_f64;
                for j in 0..grid.len() {
                    let t = grid.node(j);
                    if t < 0.1 {
                        continue;
                    }
                    let exact = gamma(b as f64 + 1.0) / gamma(b as f64 + 1.0 - alpha)
                        * t.powf(b as f64 - alpha);
                    err = err.max((out.scalar(j).unwrap() - exact).abs());
                }
                errs.push(err);
            }
            let (ok, info) = order_ok(&errs, 0.8);
            pass &= ok;
            if !ok {
                detail.push_str(&format!("numeric b={b} a={alpha}: {info}; "));
            }
        }
    }
    conclude(5, "power formula", pass, detail);
}

#[test]
fn criterion_06_derivative_of_constants() {
    let presets = [
        GeneratorPreset::Classical,
        GeneratorPreset::Tempered { lambda: 1.0 },
        affine_preset(),
        GeneratorPreset::PowerScaled { rho: 0.5 },
        hybrid_preset(),
    ];
    let grid = Grid::new(1.0, 64).unwrap();
    let mut worst = 0.0_f64;
    for preset in &presets {
        let (expr, theta) = preset.make().unwrap();
        let out =
            operators::caputo_polynomial(&expr, &theta, 0.5, &[(0, 3.5)], 0.0, &grid, &config())
                .unwrap();
        worst = worst.max(out.max_abs(0.0));
    }
    conclude(6, "derivative of constants", worst <= 1e-12, format!("abs err {worst:.3e}"));
}

#[test]
fn criterion_07_ml_reduction() {
    let (generator, theta) = GeneratorPreset::Classical.make().unwrap();
    let grid = Grid::new(2.0, 40).unwrap();
    let mut worst = 0.0_f64;
    for alpha in [0.3, 0.5, 0.8] {
        for lambda in [-1.0, -0.25] {
            let q = MLQuery {
                generator: generator.clone(),
                theta: theta.clone(),
                alpha,
                lambda,
                grid,
                config: config(),
            };
            let e = ml::ml_dynamic(&q).unwrap();
            for j in 1..=grid.n_steps {
                let t = grid.node(j);
                if t < 0.05 {
                    continue;
                }
                let reference = ml::ml_classical(alpha, lambda * t.powf(alpha)).unwrap();
                worst = worst.max((e.scalar(j).unwrap() - reference).abs());
            }
        }
    }
    conclude(7, "ml reduction", worst <= 1e-6, format!("abs err {worst:.3e}"));
}

#[test]
fn criterion_08_ml_eigenfunction() {
    let presets = [GeneratorPreset::Classical, GeneratorPreset::Tempered { lambda: 1.0 }];
    let mut pass = true;
    let mut detail = String::new();
    for preset in &presets {
        let (generator, theta) = preset.make().unwrap();
        let mut errs = Vec::new();
        for n in [256usize, 1024] {
            let q = MLQuery {
                generator: generator.clone(),
                theta: theta.clone(),
                alpha: 0.5,
                lambda: -1.0,
                grid: Grid::new(1.0, n).unwrap(),
                config: config(),
            };
            errs.push(ml::ml_eigen_residual(&q).unwrap());
        }
        // Two halvings between the grids; report the per-halving order.
        let order = (errs[0] / errs[1]).log2() / 2.0;
        pass &= order >= 0.8;
        detail.push_str(&format!("{preset:?}: order {order:.3}, errors {errs:?}; "));
    }
    conclude(8, "ml eigenfunction", pass, detail);
}

fn forward_laplace(x: &GridFunction, p: f64) -> f64 {
    let grid = x.grid();
    let h = grid.h();
    let mut acc = 0.5
        * (x.scalar(0).unwrap() + x.scalar(grid.n_steps).unwrap() * (-p * grid.t_end).exp());
    for j in 1..grid.n_steps {
        acc += x.scalar(j).unwrap() * (-p * grid.node(j)).exp();
    }
    acc * h
}

#[test]
fn criterion_09_laplace_symbol_identity() {
    let presets = [GeneratorPreset::Classical, GeneratorPreset::Tempered { lambda: 1.0 }];
    let grid = Grid::new(10.0, 1024).unwrap();
    let x = GridFunction::sample_scalar(grid, f64::sin);
    let mut worst = 0.0_f64;
    for preset in &presets {
        let (expr, theta) = preset.make().unwrap();
        let ix = operators::fractional_integral(
            &expr,
            &theta,
            0.5,
            &x,
            QuadratureScheme::TrapezoidProduct,
            Side::Left,
            &config(),
        )
        .unwrap();
        for p in [2.0, 3.0, 4.0, 5.0, 6.0, 8.0] {
            let lhs = forward_laplace(&ix, p);
            let symbol = expr
                .symbol_power(&theta, 0.5, Complex64::new(p, 0.0))
                .unwrap()
                .re;
            let rhs = symbol * forward_laplace(&x, p);
            worst = worst.max(((lhs - rhs) / rhs).abs());
        }
    }
    conclude(9, "laplace symbol identity", worst <= 1e-3, format!("rel err {worst:.3e}"));
}

#[test]
fn criterion_10_alpha_limits() {
    let (expr, theta) = GeneratorPreset::Classical.make().unwrap();
    let grid = Grid::new(1.0, 2048).unwrap();

    let x = GridFunction::sample_scalar(grid, |t| t * t);
    let xp = GridFunction::sample_scalar(grid, |t| 2.0 * t);
    let mut prev = f64::INFINITY;
    let mut pass = true;
    let mut detail = String::from("caputo->x': ");
    for alpha in [0.9, 0.95, 0.99] {
        let d = operators::caputo_derivative(
            &expr,
            &theta,
            alpha,
            &x,
            Side::Left,
            DerivMode::Supplied(&xp),
            &config(),
        )
        .unwrap();
        let err = d.max_abs_diff(&xp, 0.1);
        pass &= err < prev;
        detail.push_str(&format!("{err:.3e} "));
        prev = err;
    }

    let x = GridFunction::sample_scalar(grid, f64::sin);
    let mut prev = f64::INFINITY;
    detail.push_str("; integral->x: ");
    for alpha in [0.1, 0.05, 0.01] {
        let y = operators::fractional_integral(
            &expr,
            &theta,
            alpha,
            &x,
            QuadratureScheme::TrapezoidProduct,
            Side::Left,
            &config(),
        )
        .unwrap();
        let err = y.max_abs_diff(&x, 0.1);
        pass &= err < prev;
        detail.push_str(&format!("{err:.3e} "));
        prev = err;
    }
    conclude(10, "alpha limits", pass, detail);
}

fn linear_problem() -> LangevinProblem {
    let (generator, theta) = GeneratorPreset::Classical.make().unwrap();
    LangevinProblem {
        alpha: 0.5,
        beta: 0.5,
        generator,
        theta,
        dim: 1,
        damping: Box::new(|_| 0.0),
        a_matrix: vec![0.0],
        b_matrix: vec![0.0],
        sigma: Box::new(|t| t),
        forcing: Box::new(|_, _, _| vec![1.0]),
        x0: vec![0.0],
        x1: vec![0.0],
        t_end: 1.0,
    }
}

#[test]
fn criterion_11_langevin_manufactured() {
    let mut problem = linear_problem();
    problem.forcing = Box::new(|_, _, _| vec![0.0]);
    problem.x0 = vec![1.0];
    let options = SolverOptions { n_steps: 256, ..Default::default() };
    let grid = Grid::new(1.0, 256).unwrap();
    let constant = GridFunction::sample_scalar(grid, |_| 1.0);
    let zero_err = langevin::manufactured_residual(&problem, &constant, &options).unwrap();
    let mut pass = zero_err <= 1e-14;
    let mut detail = format!("zero problem {zero_err:.3e}; ");

    let problem = linear_problem();
    let mut errs = Vec::new();
    for n in [256usize, 512, 1024] {
        let options = SolverOptions { n_steps: n, ..Default::default() };
        let grid = Grid::new(1.0, n).unwrap();
        let exact = GridFunction::sample_scalar(grid, |t| t);
        errs.push(langevin::manufactured_residual(&problem, &exact, &options).unwrap());
    }
    pass &= errs[0] <= 0.05;
    let (ok, info) = order_ok(&errs, 0.8);
    pass &= ok;
    detail.push_str(&format!("x*=t: {info}"));
    conclude(11, "langevin manufactured solution", pass, detail);
}

#[test]
fn criterion_12_uniqueness_boundary_case() {
    let mut problem = linear_problem();
    problem.forcing = Box::new(|_, _, _| vec![0.0]);
    problem.a_matrix = vec![-1.0];
    let report = langevin::check_uniqueness_condition(&problem, 0.0, &config()).unwrap();
    let lhs = report.checks.last().unwrap().measured;
    conclude(
        12,
        "uniqueness boundary case",
        (lhs - 1.0).abs() <= 1e-10,
        format!("lhs {lhs:.15}"),
    );
}

#[test]
fn criterion_13_admissibility_gate() {
    let grid = Grid::new(1.0, 128).unwrap();
    let mut pass = true;
    let mut detail = String::new();
    for preset in [
        GeneratorPreset::Classical,
        GeneratorPreset::Tempered { lambda: 1.0 },
        affine_preset(),
        hybrid_preset(),
    ] {
        let (expr, theta) = preset.make().unwrap();
        let report =
            kernel::admissibility_check(&expr, &theta, &[0.4, 0.5], &grid, &config()).unwrap();
        pass &= report.overall;
        if !report.overall {
            detail.push_str(&format!("{preset:?} unexpectedly failed; "));
        }
    }

    let (expr, theta) = GeneratorPreset::Custom("p - 2".into()).make().unwrap();
    let report =
        kernel::admissibility_check(&expr, &theta, &[0.5], &grid, &config()).unwrap();
    let a1_failed = report
        .checks
        .iter()
        .any(|c| c.name.contains("(A1)") && !c.passed);
    pass &= !report.overall && a1_failed;
    if report.overall || !a1_failed {
        detail.push_str("p - 2 did not fail (A1)");
    }
    conclude(13, "admissibility gate", pass, detail);
}

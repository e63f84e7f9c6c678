//! Fractional integral and derivative operators on grid functions.
//!
//! Every convolution goes through product-integration weights built from the
//! cumulative kernels K_1/K_2, so singular kernels need no point samples near
//! t = 0. `RectangleLeft` is first order; `TrapezoidProduct` is exact for
//! piecewise-linear integrands.
//!
//! For affine generators Φ = a·p + b the first-order derivative that pairs
//! with the memory operators is the conjugated operator D_Φ y = a·y' + b·y
//! (Laplace symbol Φ·Y − a·y(0)). With Φ = p it reduces to the ordinary
//! derivative; with it, the inverse relations and the eigenfunction identity
//! extend to the whole affine family instead of holding for Φ = p only.
//! Non-affine generators fall back to the plain time derivative.

use crate::expr::{GeneratorExpr, ParamSet};
use crate::gridfn::GridFunction;
use crate::kernel::Kernel;
use crate::laplace::{Grid, InversionConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum QuadratureScheme {
    RectangleLeft,
    TrapezoidProduct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Where the first-derivative samples for a Caputo derivative come from.
pub enum DerivMode<'a> {
    Supplied(&'a GridFunction),
    FiniteDifference,
}

/// Convolution y_n = ∫₀^{t_n} Ψ(t_n - s) x(s) ds against precomputed
/// cumulative tables, for every node. y_0 = 0.
pub(crate) fn convolve(
    k1: &[f64],
    k2: &[f64],
    x: &GridFunction,
    scheme: QuadratureScheme,
) -> Result<GridFunction> {
    let grid = *x.grid();
    let dim = x.dim();
    let h = grid.h();
    let mut out = GridFunction::zeros(grid, dim);
    let mut acc = vec![0.0; dim];
    for n in 1..grid.len() {
        acc.fill(0.0);
        match scheme {
            QuadratureScheme::RectangleLeft => {
                // w_{n,j} = K_1(t_n - t_j) - K_1(t_n - t_{j+1}) applied to x_j.
                for j in 0..n {
                    let w = k1[n - j] - k1[n - j - 1];
                    for (a, v) in acc.iter_mut().zip(x.value(j)?) {
                        *a += w * v;
                    }
                }
            }
            QuadratureScheme::TrapezoidProduct => {
                // In u = t_n - s, the cell [t_i, t_{i+1}] carries the linear
                // factor g with g(lo) = x_{n-i}, g(hi) = x_{n-i-1}; m_0 and
                // m_1 are the kernel's zeroth and first moments on the cell.
                for i in 0..n {
                    let lo = grid.node(i);
                    let hi = grid.node(i + 1);
                    let m0 = k1[i + 1] - k1[i];
                    let m1 = (hi * k1[i + 1] - k2[i + 1]) - (lo * k1[i] - k2[i]);
                    let w_lo = (hi * m0 - m1) / h;
                    let w_hi = (m1 - lo * m0) / h;
                    for ((a, g_lo), g_hi) in
                        acc.iter_mut().zip(x.value(n - i)?).zip(x.value(n - i - 1)?)
                    {
                        *a += w_lo * g_lo + w_hi * g_hi;
                    }
                }
            }
        }
        out.set(n, &acc);
    }
    Ok(out)
}

/// Centered-difference time derivative (second-order one-sided stencils at
/// the ends).
pub(crate) fn grid_derivative(x: &GridFunction) -> Result<GridFunction> {
    let grid = *x.grid();
    let n = grid.n_steps;
    let h = grid.h();
    if n < 2 {
        return Err(Error::InvalidGrid(
            "need at least 2 steps to differentiate".into(),
        ));
    }
    let dim = x.dim();
    let mut out = GridFunction::zeros(grid, dim);
    let mut buf = vec![0.0; dim];
    for j in 0..=n {
        for d in 0..dim {
            buf[d] = if j == 0 {
                (-3.0 * x.value(0)?[d] + 4.0 * x.value(1)?[d] - x.value(2)?[d]) / (2.0 * h)
            } else if j == n {
                (3.0 * x.value(n)?[d] - 4.0 * x.value(n - 1)?[d] + x.value(n - 2)?[d]) / (2.0 * h)
            } else {
                (x.value(j + 1)?[d] - x.value(j - 1)?[d]) / (2.0 * h)
            };
        }
        out.set(j, &buf);
    }
    Ok(out)
}

fn require_defined(x: &GridFunction) -> Result<()> {
    for j in 0..x.len() {
        if !x.is_defined(j) {
            return Err(Error::UndefinedSample(j));
        }
    }
    Ok(())
}

/// (I^α x)(t) = ∫ Ψ_α(t - s) x(s) ds; the right-sided operator integrates the
/// future history and is realized by time reversal.
pub fn fractional_integral(
    generator: &GeneratorExpr,
    theta: &ParamSet,
    alpha: f64,
    x: &GridFunction,
    scheme: QuadratureScheme,
    side: Side,
    config: &InversionConfig,
) -> Result<GridFunction> {
    require_defined(x)?;
    let kernel = Kernel::new(generator.clone(), theta.clone(), alpha, *config)?;
    let (k1, k2) = kernel.cumulative_table(x.grid())?;
    match side {
        Side::Left => convolve(&k1, &k2, x, scheme),
        Side::Right => Ok(convolve(&k1, &k2, &x.mirror(), scheme)?.mirror()),
    }
}

/// D_Φ applied on the grid: a·x' + b·x for affine generators, plain x'
/// otherwise.
pub(crate) fn conjugated_derivative(
    generator: &GeneratorExpr,
    theta: &ParamSet,
    x: &GridFunction,
) -> Result<GridFunction> {
    let xp = grid_derivative(x)?;
    match generator.affine_coefficients(theta) {
        Some((a, b)) if a > 0.0 => xp.linear_combination(a, x, b),
        _ => Ok(xp),
    }
}

/// Same combination applied to supplied derivative samples.
fn conjugated_from_samples(
    generator: &GeneratorExpr,
    theta: &ParamSet,
    x: &GridFunction,
    xp: &GridFunction,
) -> Result<GridFunction> {
    match generator.affine_coefficients(theta) {
        Some((a, b)) if a > 0.0 => xp.linear_combination(a, x, b),
        _ => Ok(xp.clone()),
    }
}

fn check_derivative_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidOrder(format!(
            "derivative order must lie in (0, 1), got {alpha}"
        )));
    }
    Ok(())
}

/// Riemann-Liouville-type derivative D_Φ (I^{1-α} x); node 0 is undefined
/// (the kernel is singular there and the value is not part of the contract).
pub fn rl_derivative(
    generator: &GeneratorExpr,
    theta: &ParamSet,
    alpha: f64,
    x: &GridFunction,
    side: Side,
    config: &InversionConfig,
) -> Result<GridFunction> {
    check_derivative_order(alpha)?;
    let run = |x: &GridFunction| -> Result<GridFunction> {
        let z = fractional_integral(
            generator,
            theta,
            1.0 - alpha,
            x,
            QuadratureScheme::TrapezoidProduct,
            Side::Left,
            config,
        )?;
        conjugated_derivative(generator, theta, &z)
    };
    let mut out = match side {
        Side::Left => run(x)?,
        Side::Right => run(&x.mirror())?.mirror(),
    };
    match side {
        Side::Left => out.mark_undefined(0),
        Side::Right => out.mark_undefined(out.len() - 1),
    }
    Ok(out)
}

/// Caputo-type derivative I^{1-α}(D_Φ x).
pub fn caputo_derivative(
    generator: &GeneratorExpr,
    theta: &ParamSet,
    alpha: f64,
    x: &GridFunction,
    side: Side,
    deriv_mode: DerivMode<'_>,
    config: &InversionConfig,
) -> Result<GridFunction> {
    check_derivative_order(alpha)?;
    require_defined(x)?;
    let run = |x: &GridFunction, integrand: &GridFunction| -> Result<GridFunction> {
        let _ = x;
        fractional_integral(
            generator,
            theta,
            1.0 - alpha,
            integrand,
            QuadratureScheme::TrapezoidProduct,
            Side::Left,
            config,
        )
    };
    match side {
        Side::Left => {
            let integrand = match deriv_mode {
                DerivMode::Supplied(xp) => conjugated_from_samples(generator, theta, x, xp)?,
                DerivMode::FiniteDifference => conjugated_derivative(generator, theta, x)?,
            };
            run(x, &integrand)
        }
        Side::Right => {
            // d/dτ of the mirrored function is -x' mirrored.
            let xm = x.mirror();
            let integrand = match deriv_mode {
                DerivMode::Supplied(xp) => {
                    let neg = xp.linear_combination(-1.0, xp, 0.0)?;
                    conjugated_from_samples(generator, theta, &xm, &neg.mirror())?
                }
                DerivMode::FiniteDifference => conjugated_derivative(generator, theta, &xm)?,
            };
            Ok(run(&xm, &integrand)?.mirror())
        }
    }
}

/// Caputo derivative of a shifted polynomial Σ_k a_k (t - a)^k.
///
/// The constant term never enters — the formula differentiates first — so
/// constants map to zero under every generator. For Φ = p the exact Γ-ratio
/// formula is used; otherwise Ψ_{1-α} is convolved against exact samples of
/// the polynomial's derivative.
pub fn caputo_polynomial(
    generator: &GeneratorExpr,
    theta: &ParamSet,
    alpha: f64,
    coeffs: &[(u32, f64)],
    shift: f64,
    grid: &Grid,
    config: &InversionConfig,
) -> Result<GridFunction> {
    use statrs::function::gamma::gamma;
    check_derivative_order(alpha)?;

    let classical = matches!(
        generator.affine_coefficients(theta),
        Some((a, b)) if a == 1.0 && b == 0.0
    );
    if classical {
        // I^{1-α} of each monomial in the binomially expanded derivative:
        // I^γ t^m = Γ(m+1)/Γ(m+1+γ) t^(m+γ).
        let mut out = GridFunction::zeros(*grid, 1);
        for j in 0..grid.len() {
            let t = grid.node(j);
            let mut acc = 0.0;
            for &(k, a_k) in coeffs {
                if k == 0 {
                    continue;
                }
                // (s-a)^(k-1) = Σ_m C(k-1, m) s^m (-a)^(k-1-m)
                for m in 0..k {
                    let binom = gamma(k as f64) / (gamma(m as f64 + 1.0) * gamma((k - m) as f64));
                    let c = binom * (-shift).powi((k - 1 - m) as i32);
                    acc += k as f64 * a_k * c * gamma(m as f64 + 1.0)
                        / gamma(m as f64 + 2.0 - alpha)
                        * t.powf(m as f64 + 1.0 - alpha);
                }
            }
            out.set_scalar(j, acc);
        }
        return Ok(out);
    }

    // P'(s) sampled exactly, then product integration against Ψ_{1-α}.
    let deriv = GridFunction::sample_scalar(*grid, |s| {
        coeffs
            .iter()
            .filter(|(k, _)| *k > 0)
            .map(|&(k, a_k)| k as f64 * a_k * (s - shift).powi((k - 1) as i32))
            .sum()
    });
    fractional_integral(
        generator,
        theta,
        1.0 - alpha,
        &deriv,
        QuadratureScheme::TrapezoidProduct,
        Side::Left,
        config,
    )
}

/// Taylor-type reconstruction x(t) = x(0) + (I^α d)(t) from Caputo-derivative
/// samples d.
pub fn taylor_reconstruct(
    generator: &GeneratorExpr,
    theta: &ParamSet,
    alpha: f64,
    x0: &[f64],
    d: &GridFunction,
    config: &InversionConfig,
) -> Result<GridFunction> {
    if x0.len() != d.dim() {
        return Err(Error::GridFunction(
            "initial state dimension does not match derivative samples".into(),
        ));
    }
    let integral = fractional_integral(
        generator,
        theta,
        alpha,
        d,
        QuadratureScheme::TrapezoidProduct,
        Side::Left,
        config,
    )?;
    let mut out = GridFunction::zeros(*d.grid(), d.dim());
    let mut buf = vec![0.0; d.dim()];
    for j in 0..d.len() {
        for (i, b) in buf.iter_mut().enumerate() {
            *b = x0[i] + integral.value(j)?[i];
        }
        out.set(j, &buf);
    }
    Ok(out)
}

/// Trapezoid rule over the whole grid.
fn trapezoid_rule(values: &GridFunction) -> Result<f64> {
    let grid = values.grid();
    let h = grid.h();
    let mut acc = 0.5 * (values.scalar(0)? + values.scalar(grid.n_steps)?);
    for j in 1..grid.n_steps {
        acc += values.scalar(j)?;
    }
    Ok(acc * h)
}

/// Residual of the integration-by-parts identity
/// ∫₀ᵀ y ᶜD^α x dt = ∫₀ᵀ x'(s) (∫_sᵀ y(t) Ψ_{1-α}(t-s) dt) ds.
///
/// Both sides are evaluated with the convolution machinery; x' comes from
/// `xp` when supplied and finite differences otherwise. The left side uses
/// the literal ᶜD^α x = I^{1-α} x' — the identity is an adjointness statement
/// for the convolution itself, not for the conjugated operator.
pub fn ibp_residual(
    generator: &GeneratorExpr,
    theta: &ParamSet,
    alpha: f64,
    x: &GridFunction,
    xp: Option<&GridFunction>,
    y: &GridFunction,
    config: &InversionConfig,
) -> Result<f64> {
    check_derivative_order(alpha)?;
    if x.grid() != y.grid() {
        return Err(Error::GridFunction("x and y must share a grid".into()));
    }
    let xp = match xp {
        Some(s) => s.clone(),
        None => grid_derivative(x)?,
    };

    let d = fractional_integral(
        generator,
        theta,
        1.0 - alpha,
        &xp,
        QuadratureScheme::TrapezoidProduct,
        Side::Left,
        config,
    )?;
    let mut lhs_integrand = GridFunction::zeros(*x.grid(), 1);
    for j in 0..x.len() {
        lhs_integrand.set_scalar(j, y.scalar(j)? * d.scalar(j)?);
    }
    let lhs = trapezoid_rule(&lhs_integrand)?;

    let w = fractional_integral(
        generator,
        theta,
        1.0 - alpha,
        y,
        QuadratureScheme::TrapezoidProduct,
        Side::Right,
        config,
    )?;
    let mut rhs_integrand = GridFunction::zeros(*x.grid(), 1);
    for j in 0..x.len() {
        rhs_integrand.set_scalar(j, xp.scalar(j)? * w.scalar(j)?);
    }
    let rhs = trapezoid_rule(&rhs_integrand)?;

    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::GeneratorPreset;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn cfg() -> InversionConfig {
        InversionConfig::default()
    }

    fn classical() -> (GeneratorExpr, ParamSet) {
        GeneratorPreset::Classical.make().unwrap()
    }

    fn tempered() -> (GeneratorExpr, ParamSet) {
        GeneratorPreset::Tempered { lambda: 1.0 }.make().unwrap()
    }

    #[test]
    fn integral_of_constant_classical() {
        let (g, th) = classical();
        let grid = Grid::new(1.0, 64).unwrap();
        let ones = GridFunction::sample_scalar(grid, |_| 1.0);
        for scheme in [QuadratureScheme::RectangleLeft, QuadratureScheme::TrapezoidProduct] {
            let y =
                fractional_integral(&g, &th, 0.5, &ones, scheme, Side::Left, &cfg()).unwrap();
            // I^0.5 1 = t^0.5/Γ(1.5): exact for constant integrands under
            // either weight family.
            assert_relative_eq!(y.scalar(64).unwrap(), 2.0 / PI.sqrt(), epsilon = 1e-10);
            assert_relative_eq!(y.scalar(0).unwrap(), 0.0);
        }
    }

    #[test]
    fn integral_of_constant_tempered() {
        let (g, th) = tempered();
        let grid = Grid::new(1.0, 64).unwrap();
        let ones = GridFunction::sample_scalar(grid, |_| 1.0);
        let y = fractional_integral(
            &g,
            &th,
            0.5,
            &ones,
            QuadratureScheme::TrapezoidProduct,
            Side::Left,
            &cfg(),
        )
        .unwrap();
        // K_1 of the tempered kernel at 1 is erf(1).
        assert_relative_eq!(y.scalar(64).unwrap(), 0.8427007929497149, epsilon = 1e-10);
    }

    #[test]
    fn integral_of_zero_is_zero() {
        let (g, th) = tempered();
        let grid = Grid::new(1.0, 32).unwrap();
        let zeros = GridFunction::zeros(grid, 1);
        let y = fractional_integral(
            &g,
            &th,
            0.7,
            &zeros,
            QuadratureScheme::RectangleLeft,
            Side::Left,
            &cfg(),
        )
        .unwrap();
        assert_eq!(y.max_abs(0.0), 0.0);
    }

    #[test]
    fn trapezoid_exact_on_linear_input() {
        // TrapezoidProduct integrates piecewise-linear integrands exactly:
        // I^0.5 t = t^1.5/Γ(2.5) for Φ = p.
        let (g, th) = classical();
        let grid = Grid::new(1.0, 16).unwrap();
        let x = GridFunction::sample_scalar(grid, |t| t);
        let y = fractional_integral(
            &g,
            &th,
            0.5,
            &x,
            QuadratureScheme::TrapezoidProduct,
            Side::Left,
            &cfg(),
        )
        .unwrap();
        use statrs::function::gamma::gamma;
        for j in 0..=16 {
            let t = grid.node(j);
            assert_relative_eq!(
                y.scalar(j).unwrap(),
                t.powf(1.5) / gamma(2.5),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn operators_are_linear() {
        let (g, th) = tempered();
        let grid = Grid::new(1.0, 32).unwrap();
        let x = GridFunction::sample_scalar(grid, |t| t.sin());
        let y = GridFunction::sample_scalar(grid, |t| (2.0 * t).cos());
        let combo = x.linear_combination(2.0, &y, -3.0).unwrap();
        let apply = |f: &GridFunction| {
            fractional_integral(
                &g,
                &th,
                0.4,
                f,
                QuadratureScheme::TrapezoidProduct,
                Side::Left,
                &cfg(),
            )
            .unwrap()
        };
        let lhs = apply(&combo);
        let rhs = apply(&x).linear_combination(2.0, &apply(&y), -3.0).unwrap();
        assert!(lhs.max_abs_diff(&rhs, 0.0) <= 1e-12);
    }

    #[test]
    fn integral_semigroup_and_commutativity() {
        let (g, th) = tempered();
        let cfg = cfg();
        let scheme = QuadratureScheme::TrapezoidProduct;
        let mut errs = Vec::new();
        for n in [64, 128] {
            let grid = Grid::new(1.0, n).unwrap();
            let x = GridFunction::sample_scalar(grid, |t| t.sin());
            let a = fractional_integral(&g, &th, 0.3, &x, scheme, Side::Left, &cfg).unwrap();
            let ab = fractional_integral(&g, &th, 0.6, &a, scheme, Side::Left, &cfg).unwrap();
            let b = fractional_integral(&g, &th, 0.6, &x, scheme, Side::Left, &cfg).unwrap();
            let ba = fractional_integral(&g, &th, 0.3, &b, scheme, Side::Left, &cfg).unwrap();
            let direct = fractional_integral(&g, &th, 0.9, &x, scheme, Side::Left, &cfg).unwrap();
            assert!(ab.max_abs_diff(&ba, 0.0) <= 1e-12, "order of composition changed the result");
            errs.push(ab.max_abs_diff(&direct, 0.1));
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order >= 0.9, "semigroup order {order}, errors {errs:?}");
    }

    #[test]
    fn rl_inverts_the_integral() {
        for (g, th) in [classical(), tempered()] {
            let mut errs = Vec::new();
            for n in [128, 256] {
                let grid = Grid::new(1.0, n).unwrap();
                let x = GridFunction::sample_scalar(grid, |t| t.sin());
                let ix = fractional_integral(
                    &g,
                    &th,
                    0.7,
                    &x,
                    QuadratureScheme::TrapezoidProduct,
                    Side::Left,
                    &cfg(),
                )
                .unwrap();
                let back = rl_derivative(&g, &th, 0.7, &ix, Side::Left, &cfg()).unwrap();
                errs.push(back.max_abs_diff(&x, 0.1));
            }
            let order = (errs[0] / errs[1]).log2();
            assert!(order >= 0.8, "round-trip order {order}, errors {errs:?}");
        }
    }

    #[test]
    fn caputo_then_integral_recovers_x_minus_x0() {
        for (g, th) in [classical(), tempered()] {
            let mut errs = Vec::new();
            for n in [128, 256] {
                let grid = Grid::new(1.0, n).unwrap();
                let x = GridFunction::sample_scalar(grid, |t| t.sin());
                let xp = GridFunction::sample_scalar(grid, |t| t.cos());
                let d = caputo_derivative(
                    &g,
                    &th,
                    0.3,
                    &x,
                    Side::Left,
                    DerivMode::Supplied(&xp),
                    &cfg(),
                )
                .unwrap();
                let back = fractional_integral(
                    &g,
                    &th,
                    0.3,
                    &d,
                    QuadratureScheme::TrapezoidProduct,
                    Side::Left,
                    &cfg(),
                )
                .unwrap();
                errs.push(back.max_abs_diff(&x, 0.1)); // x(0) = 0
            }
            let order = (errs[0] / errs[1]).log2();
            assert!(order >= 0.8, "round-trip order {order}, errors {errs:?}");
        }
    }

    #[test]
    fn caputo_of_constant_is_zero_classical() {
        let (g, th) = classical();
        let grid = Grid::new(1.0, 32).unwrap();
        let x = GridFunction::sample_scalar(grid, |_| 4.2);
        let xp = GridFunction::zeros(grid, 1);
        let d = caputo_derivative(
            &g,
            &th,
            0.5,
            &x,
            Side::Left,
            DerivMode::Supplied(&xp),
            &cfg(),
        )
        .unwrap();
        assert!(d.max_abs(0.0) <= 1e-12);
    }

    #[test]
    fn rl_of_constant_is_the_kernel_tail() {
        // RL derivative of 1 under Φ = p is t^(-α)/Γ(1-α), not zero.
        let (g, th) = classical();
        let grid = Grid::new(2.0, 256).unwrap();
        let x = GridFunction::sample_scalar(grid, |_| 1.0);
        let d = rl_derivative(&g, &th, 0.5, &x, Side::Left, &cfg()).unwrap();
        let j = 128; // t = 1
        assert_relative_eq!(d.scalar(j).unwrap(), 1.0 / PI.sqrt(), epsilon = 1e-3);
        assert!(!d.is_defined(0));
    }

    #[test]
    fn caputo_near_one_approximates_the_derivative() {
        let (g, th) = classical();
        let grid = Grid::new(1.0, 512).unwrap();
        let x = GridFunction::sample_scalar(grid, |t| t * t);
        let xp = GridFunction::sample_scalar(grid, |t| 2.0 * t);
        let d = caputo_derivative(
            &g,
            &th,
            0.99,
            &x,
            Side::Left,
            DerivMode::Supplied(&xp),
            &cfg(),
        )
        .unwrap();
        let v = d.scalar(512).unwrap();
        assert!((v - 2.0).abs() < 0.05, "got {v}");
    }

    #[test]
    fn polynomial_closed_form_matches_gamma_ratio() {
        use statrs::function::gamma::gamma;
        let (g, th) = classical();
        let grid = Grid::new(1.0, 16).unwrap();
        // P(t) = 3 + 2t, α = 0.5: derivative is 2 t^0.5/Γ(1.5).
        let out = caputo_polynomial(&g, &th, 0.5, &[(0, 3.0), (1, 2.0)], 0.0, &grid, &cfg())
            .unwrap();
        assert_relative_eq!(out.scalar(16).unwrap(), 4.0 / PI.sqrt(), epsilon = 1e-12);
        // Single power t^b for b = 2, α = 0.3.
        let out = caputo_polynomial(&g, &th, 0.3, &[(2, 1.0)], 0.0, &grid, &cfg()).unwrap();
        let t: f64 = 0.5;
        assert_relative_eq!(
            out.scalar(8).unwrap(),
            gamma(3.0) / gamma(2.7) * t.powf(1.7),
            epsilon = 1e-12
        );
    }

    #[test]
    fn polynomial_constant_is_zero_for_every_preset() {
        let presets = [
            GeneratorPreset::Classical,
            GeneratorPreset::Tempered { lambda: 1.0 },
            GeneratorPreset::Affine { a: 2.0, b: 0.5 },
            GeneratorPreset::Hybrid {
                lambda: 1.0,
                eta: 0.5,
                mu: 0.6,
                nu: 0.4,
            },
        ];
        let grid = Grid::new(1.0, 32).unwrap();
        for preset in presets {
            let (g, th) = preset.make().unwrap();
            let out = caputo_polynomial(&g, &th, 0.5, &[(0, 7.5)], 0.0, &grid, &cfg()).unwrap();
            assert!(out.max_abs(0.0) <= 1e-12, "nonzero for {preset:?}");
        }
    }

    #[test]
    fn polynomial_tempered_linear_case() {
        let (g, th) = tempered();
        let grid = Grid::new(1.0, 64).unwrap();
        let out = caputo_polynomial(&g, &th, 0.5, &[(1, 1.0)], 0.0, &grid, &cfg()).unwrap();
        assert_relative_eq!(out.scalar(64).unwrap(), 0.8427007929497149, epsilon = 1e-10);
    }

    #[test]
    fn taylor_round_trip() {
        let (g, th) = tempered();
        let mut errs = Vec::new();
        for n in [128, 256] {
            let grid = Grid::new(1.0, n).unwrap();
            let x = GridFunction::sample_scalar(grid, |t| t * t);
            let xp = GridFunction::sample_scalar(grid, |t| 2.0 * t);
            let d = caputo_derivative(
                &g,
                &th,
                0.5,
                &x,
                Side::Left,
                DerivMode::Supplied(&xp),
                &cfg(),
            )
            .unwrap();
            let rebuilt = taylor_reconstruct(&g, &th, 0.5, &[0.0], &d, &cfg()).unwrap();
            errs.push(rebuilt.max_abs_diff(&x, 0.1));
        }
        assert!(errs[1] < errs[0], "no improvement under halving: {errs:?}");
    }

    #[test]
    fn taylor_of_zero_derivative_is_constant() {
        let (g, th) = classical();
        let grid = Grid::new(1.0, 16).unwrap();
        let d = GridFunction::zeros(grid, 1);
        let x = taylor_reconstruct(&g, &th, 0.5, &[2.5], &d, &cfg()).unwrap();
        for j in 0..=16 {
            assert_relative_eq!(x.scalar(j).unwrap(), 2.5);
        }
    }

    #[test]
    fn ibp_residual_vanishes_for_constant_x() {
        let (g, th) = classical();
        let grid = Grid::new(1.0, 32).unwrap();
        let x = GridFunction::sample_scalar(grid, |_| 1.0);
        let xp = GridFunction::zeros(grid, 1);
        let y = GridFunction::sample_scalar(grid, |t| t.cos());
        let r = ibp_residual(&g, &th, 0.5, &x, Some(&xp), &y, &cfg()).unwrap();
        assert!(r <= 1e-12, "residual {r}");
    }

    #[test]
    fn ibp_residual_converges() {
        for ((g, th), alpha) in [(classical(), 0.5), (tempered(), 0.3)] {
            let mut errs = Vec::new();
            for n in [64, 128] {
                let grid = Grid::new(1.0, n).unwrap();
                let x = GridFunction::sample_scalar(grid, |t| t * t);
                let xp = GridFunction::sample_scalar(grid, |t| 2.0 * t);
                let y = GridFunction::sample_scalar(grid, |t| t);
                errs.push(ibp_residual(&g, &th, alpha, &x, Some(&xp), &y, &cfg()).unwrap());
            }
            assert!(errs[1] < errs[0], "no improvement: {errs:?}");
        }
    }

    #[test]
    fn product_rule_in_integral_form() {
        // ᶜD^α(xy) from (x'y + xy') samples equals I^{1-α}(x'y) + I^{1-α}(xy').
        let (g, th) = classical();
        let grid = Grid::new(1.0, 32).unwrap();
        let xpy = GridFunction::sample_scalar(grid, |t| t.cos() * t);
        let xyp = GridFunction::sample_scalar(grid, |t| t.sin());
        let total = xpy.linear_combination(1.0, &xyp, 1.0).unwrap();
        let apply = |f: &GridFunction| {
            fractional_integral(
                &g,
                &th,
                0.5,
                f,
                QuadratureScheme::TrapezoidProduct,
                Side::Left,
                &cfg(),
            )
            .unwrap()
        };
        let lhs = apply(&total);
        let rhs = apply(&xpy).linear_combination(1.0, &apply(&xyp), 1.0).unwrap();
        assert!(lhs.max_abs_diff(&rhs, 0.0) <= 1e-12);
    }

    #[test]
    fn right_side_is_time_reversal() {
        let (g, th) = classical();
        let grid = Grid::new(1.0, 64).unwrap();
        let x = GridFunction::sample_scalar(grid, |t| t);
        let right = fractional_integral(
            &g,
            &th,
            0.5,
            &x,
            QuadratureScheme::TrapezoidProduct,
            Side::Right,
            &cfg(),
        )
        .unwrap();
        // Right integral of t over [t, 1] with the classical kernel at t = 0:
        // ∫₀¹ s^(-1/2) s ds / Γ(1/2) = (2/3)/sqrt(pi).
        assert_relative_eq!(
            right.scalar(0).unwrap(),
            2.0 / (3.0 * PI.sqrt()),
            epsilon = 1e-12
        );
        assert_relative_eq!(right.scalar(64).unwrap(), 0.0);
    }

    #[test]
    fn alpha_limit_to_identity() {
        let (g, th) = classical();
        let grid = Grid::new(1.0, 512).unwrap();
        let x = GridFunction::sample_scalar(grid, |t| t.sin());
        let mut prev = f64::INFINITY;
        for alpha in [0.1, 0.05, 0.01] {
            let y = fractional_integral(
                &g,
                &th,
                alpha,
                &x,
                QuadratureScheme::TrapezoidProduct,
                Side::Left,
                &cfg(),
            )
            .unwrap();
            let err = y.max_abs_diff(&x, 0.1);
            assert!(err < prev, "alpha={alpha}: {err} >= {prev}");
            prev = err;
        }
    }

    #[test]
    fn rejects_out_of_range_orders() {
        let (g, th) = classical();
        let grid = Grid::new(1.0, 8).unwrap();
        let x = GridFunction::sample_scalar(grid, |t| t);
        assert!(rl_derivative(&g, &th, 1.2, &x, Side::Left, &cfg()).is_err());
        assert!(caputo_derivative(
            &g,
            &th,
            0.0,
            &x,
            Side::Left,
            DerivMode::FiniteDifference,
            &cfg()
        )
        .is_err());
    }

    #[test]
    fn undefined_input_sample_is_rejected() {
        let (g, th) = classical();
        let grid = Grid::new(1.0, 8).unwrap();
        let mut x = GridFunction::sample_scalar(grid, |t| t);
        x.mark_undefined(0);
        assert!(matches!(
            fractional_integral(
                &g,
                &th,
                0.5,
                &x,
                QuadratureScheme::RectangleLeft,
                Side::Left,
                &cfg()
            ),
            Err(Error::UndefinedSample(0))
        ));
    }
}

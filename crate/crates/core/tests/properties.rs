//! Property-based checks of the algebraic invariants: symbol exponent
//! additivity, parser/printer round trips, and operator linearity.

use num_complex::Complex64;
use proptest::prelude::*;

use dynmem::expr::{parse_generator, GeneratorPreset, ParamSet};
use dynmem::gridfn::GridFunction;
use dynmem::laplace::{Grid, InversionConfig};
use dynmem::operators::{self, QuadratureScheme, Side};

fn preset_strategy() -> impl Strategy<Value = GeneratorPreset> {
    prop_oneof![
        Just(GeneratorPreset::Classical),
        (0.1f64..5.0).prop_map(|lambda| GeneratorPreset::Tempered { lambda }),
        ((0.1f64..3.0), (0.0f64..3.0)).prop_map(|(a, b)| GeneratorPreset::Affine { a, b }),
        (0.1f64..=1.0).prop_map(|rho| GeneratorPreset::PowerScaled { rho }),
        ((0.1f64..3.0), (0.1f64..3.0), (0.05f64..0.95), (0.05f64..0.95))
            .prop_map(|(lambda, eta, mu, nu)| GeneratorPreset::Hybrid { lambda, eta, mu, nu }),
    ]
}

proptest! {
    /// Φ^(-α)·Φ^(-β) = Φ^(-(α+β)) away from the branch cut.
    #[test]
    fn symbol_exponent_additivity(
        preset in preset_strategy(),
        alpha in 0.05f64..1.5,
        beta in 0.05f64..1.5,
        re in 0.1f64..50.0,
        im in -20.0f64..20.0,
    ) {
        let (expr, theta) = preset.make().unwrap();
        let p = Complex64::new(re, im);
        let product = expr.symbol_power(&theta, alpha, p).unwrap()
            * expr.symbol_power(&theta, beta, p).unwrap();
        let joint = expr.symbol_power(&theta, alpha + beta, p).unwrap();
        prop_assert!((product - joint).norm() <= 1e-12 * joint.norm().max(1.0));
    }

    /// The canonical printer emits text the parser maps back to the same tree.
    #[test]
    fn parse_print_round_trip(preset in preset_strategy()) {
        let (expr, _) = preset.make().unwrap();
        let printed = expr.print();
        let reparsed = parse_generator(&printed).unwrap();
        prop_assert_eq!(&reparsed, &expr, "printed form: {}", printed);
        prop_assert_eq!(reparsed.print(), printed);
    }

    /// I^α(a·x + b·y) = a·I^α x + b·I^α y to roundoff.
    #[test]
    fn integral_linearity(
        preset in preset_strategy(),
        alpha in 0.1f64..1.0,
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        freq in 0.5f64..4.0,
    ) {
        let (expr, theta) = preset.make().unwrap();
        let grid = Grid::new(1.0, 32).unwrap();
        let config = InversionConfig::default();
        let x = GridFunction::sample_scalar(grid, |t| (freq * t).sin());
        let y = GridFunction::sample_scalar(grid, |t| (freq * t).cos());
        let combo = x.linear_combination(a, &y, b).unwrap();

        let integral = |f: &GridFunction| {
            operators::fractional_integral(
                &expr,
                &theta,
                alpha,
                f,
                QuadratureScheme::TrapezoidProduct,
                Side::Left,
                &config,
            )
            .unwrap()
        };
        let lhs = integral(&combo);
        let rhs = integral(&x).linear_combination(a, &integral(&y), b).unwrap();
        prop_assert!(lhs.max_abs_diff(&rhs, 0.0) <= 1e-12);
    }

    /// Sampled kernels stay nonnegative for orders in (0, 1].
    #[test]
    fn kernel_nonnegative(preset in preset_strategy(), alpha in 0.1f64..=1.0) {
        let (expr, theta) = preset.make().unwrap();
        let kernel = dynmem::kernel::Kernel::new(
            expr,
            theta,
            alpha,
            InversionConfig::default(),
        ).unwrap();
        for j in 1..=16 {
            let t = j as f64 / 8.0;
            let value = kernel.eval(t, 0).unwrap();
            prop_assert!(value >= -1e-10, "kernel({t}) = {value}");
        }
    }
}

#[test]
fn theta_rejects_non_finite_values() {
    assert!(ParamSet::from_pairs([("lambda", f64::NAN)]).is_err());
    assert!(ParamSet::from_pairs([("lambda", f64::INFINITY)]).is_err());
}

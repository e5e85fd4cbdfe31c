//! Property tests for the jet-space algebra, the total derivatives and the
//! numerical building blocks.

use proptest::prelude::*;
use westervelt_core::calculus::{dt, dx, euler_operator, Frame};
use westervelt_core::exact::{group_transform, make_deg2, Generator, Stencil};
use westervelt_core::jetspace::{beta, int, p, parse, print, t, x};
use westervelt_core::pde::{Bc, Grid};
use westervelt_core::{Dep, Indet, JetExpr, SolverConfig};

fn leaf() -> impl Strategy<Value = JetExpr> {
    prop_oneof![
        (0u8..3, 0u8..3).prop_map(|(a, b)| p(a, b)),
        (-3i64..4).prop_map(int),
        Just(beta()),
        Just(t()),
        Just(x()),
    ]
}

fn poly_expr() -> impl Strategy<Value = JetExpr> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            inner.prop_map(|a| -a),
        ]
    })
}

/// Polynomials, optionally divided by a power of the wave-speed factor.
fn expr() -> impl Strategy<Value = JetExpr> {
    (poly_expr(), 0i32..3).prop_map(|(e, k)| {
        let w = 1 - 2 * beta() * p(0, 0);
        e * w.powi(-k).unwrap()
    })
}

fn point(seed: u64) -> impl Fn(Indet) -> f64 {
    move |v: Indet| {
        let h = (v.id() as u64 ^ seed).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        0.05 + 0.2 * ((h >> 11) as f64 / (1u64 << 53) as f64)
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn total_derivatives_commute(e in expr()) {
        let a = dt(&dx(&e).unwrap()).unwrap();
        let b = dx(&dt(&e).unwrap()).unwrap();
        prop_assert!((a - b).is_zero());
    }

    #[test]
    fn leibniz_rule(a in expr(), b in expr()) {
        for d in [dt, dx] {
            let lhs = d(&(&a * &b)).unwrap();
            let rhs = d(&a).unwrap() * &b + &a * d(&b).unwrap();
            prop_assert!((lhs - rhs).is_zero());
        }
    }

    #[test]
    fn divergences_are_variationally_trivial(f in poly_expr(), g in poly_expr()) {
        let div = dt(&f).unwrap() + dx(&g).unwrap();
        let el = euler_operator(&div, &Frame::standard(), Dep::P).unwrap();
        prop_assert!(el.is_zero(), "E[D_t f + D_x g] = {el}");
    }

    #[test]
    fn field_operations_roundtrip(a in expr(), b in expr()) {
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        if !b.is_zero() {
            prop_assert_eq!((&a * &b).try_div(&b).unwrap(), a);
        }
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in expr(), b in expr(), seed in any::<u64>()) {
        let env = point(seed);
        let (fa, fb) = (a.eval_f64(&env), b.eval_f64(&env));
        prop_assert!(close((&a * &b).eval_f64(&env), fa * fb));
        prop_assert!(close((&a + &b).eval_f64(&env), fa + fb));
    }

    #[test]
    fn print_parse_roundtrip(e in expr()) {
        let back = parse(&print(&e)).unwrap();
        prop_assert_eq!(back, e);
    }

    #[test]
    fn derivative_of_explicit_variables(n in 1i32..5) {
        let e = t().powi(n).unwrap();
        prop_assert_eq!(dt(&e).unwrap(), n as i64 * t().powi(n - 1).unwrap());
        prop_assert!(dx(&e).unwrap().is_zero());
    }

    #[test]
    fn periodic_laplacian_sums_to_zero(vals in prop::collection::vec(-1.0f64..1.0, 16..64)) {
        let grid = Grid::new(0.0, 1.0, vals.len(), Bc::Periodic);
        let mut lap = vec![0.0; vals.len()];
        grid.laplacian(&vals, &mut lap);
        prop_assert!(lap.iter().sum::<f64>().abs() < 1e-9 * (vals.len() * vals.len()) as f64);
    }

    #[test]
    fn config_text_roundtrip(
        beta in 0.01f64..2.0,
        nx in 16usize..512,
        cfl in 0.05f64..1.0,
        alpha in prop_oneof![Just(0.0), 0.1f64..2.0],
        width in 0.1f64..3.0,
    ) {
        let mut text = format!("beta = {beta}\nx0 = -5\nx1 = 5\nnx = {nx}\ncfl = {cfl}\nt_end = 1\ninit.name = gaussian\ninit.width = {width}\nalpha = {alpha}\n");
        if alpha > 0.0 {
            text.push_str("init.r = zero\n");
        }
        let cfg = SolverConfig::parse(&text).unwrap();
        prop_assert_eq!(SolverConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn deg2_transforms_keep_residual_small(
        a1 in 0.2f64..2.0,
        a2 in -1.0f64..1.0,
        eps in -0.2f64..0.2,
        g in prop_oneof![Just(Generator::X1), Just(Generator::X2), Just(Generator::X3), Just(Generator::X4)],
    ) {
        let sol = make_deg2(a1, a2, 1.0, 1.0).unwrap();
        prop_assert!(sol.fd_residual(0.3, 0.05, 1e-3, Stencil::Five).unwrap().abs() < 1e-5);
        let moved = group_transform(&sol, g, eps);
        if let Ok(r) = moved.fd_residual(0.3, 0.05, 1e-3, Stencil::Five) {
            let scale = moved.eval_p(0.3, 0.05).unwrap().abs().max(1.0);
            prop_assert!(r.abs() < 1e-5 * scale, "residual {r}");
        }
    }
}

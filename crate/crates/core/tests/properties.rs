//! Randomized checks of the algebraic identities the library relies on.

use colombeau::asymptotics::{classify, growth_profile, Thresholds, Verdict};
use colombeau::embeddings::gallery;
use colombeau::expr::parse_expr;
use colombeau::flow::affine_flow;
use colombeau::invariance::{lie_derivative, linear_combination};
use colombeau::jet::Jet;
use colombeau::net::{EpsilonGrid, NetFunction};
use colombeau::CompactBox;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn quotient_and_log_invert_product_and_exp(x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let v = Jet::seed(&[x, y], 4);
        let u = &v[0].sin() + &v[1].exp();
        let w = &v[0].cos().add_const(2.0) * &v[1];
        let w = w.add_const(3.0);
        let back = (&u * &w).div(&w);
        let roundtrip = w.ln().exp();
        for (a, b) in back.coefficients().iter().zip(u.coefficients()) {
            prop_assert!(close(*a, *b, 1e-10));
        }
        for (a, b) in roundtrip.coefficients().iter().zip(w.coefficients()) {
            prop_assert!(close(*a, *b, 1e-10));
        }
    }

    #[test]
    fn symbolic_partials_agree_with_jets(
        a in -2.0f64..2.0, b in -2.0f64..2.0, x in -1.0f64..1.0, y in -1.0f64..1.0, eps in 0.01f64..0.5,
    ) {
        let src = format!("sin({a:.4} * x1) * exp({b:.4} * x2) + x1^3 * x2 / eps + cos(x1 * x2)^2");
        let e = parse_expr(&src).unwrap();
        let jet = e.eval_jet(eps, &Jet::seed(&[x, y], 3));
        for alpha in [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2], [3, 0], [1, 2]] {
            let symbolic = e.partial(&alpha).eval(eps, &[x, y]);
            prop_assert!(close(jet.partial(&alpha).unwrap(), symbolic, 1e-9), "{alpha:?}");
        }
        let reparsed = parse_expr(&e.to_string()).unwrap();
        prop_assert!(close(reparsed.eval(eps, &[x, y]), e.eval(eps, &[x, y]), 1e-12));
    }

    #[test]
    fn power_scaling_gives_its_moderate_order(c in 0.1f64..10.0, m in 0u32..4) {
        let grid = EpsilonGrid::default();
        let u = NetFunction::closed_form(&grid, 1, 1, move |eps, x| (&x[0] * &x[0]).add_const(1.0) * (c * eps.powi(-(m as i32))));
        let k = CompactBox::cube(1, -1.0, 1.0).unwrap();
        let class = classify(&growth_profile(&u, &k, &[0]).unwrap(), &Thresholds::default()).unwrap();
        if m == 0 {
            prop_assert!(class.verdict.is_bounded());
        } else {
            prop_assert_eq!(class.verdict, Verdict::Moderate(m));
        }
    }

    #[test]
    fn lie_derivative_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0, seed in any::<u64>()) {
        let g = gallery();
        let xi = g.field("xi_12_rotation").unwrap();
        let u = g.function("bump_asym_2d").unwrap();
        let w = g.function("gauss_radial_2d").unwrap();
        let lhs = lie_derivative(&xi, &linear_combination(a, &u, b, &w).unwrap()).unwrap();
        let lu = lie_derivative(&xi, &u).unwrap();
        let lw = lie_derivative(&xi, &w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..8 {
            let eps = g.grid().values()[rng.gen_range(0..4)];
            let p = [rng.gen_range(-1.0..1.0) * eps, rng.gen_range(-1.0..1.0) * eps];
            let expected = a * lu.eval(eps, &p).unwrap() + b * lw.eval(eps, &p).unwrap();
            prop_assert!(close(lhs.eval(eps, &p).unwrap(), expected, 1e-9));
        }
    }
}

#[test]
fn affine_flows_satisfy_the_group_law_at_random_points() {
    let grid = EpsilonGrid::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let a = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
        let b = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
        let fl = affine_flow(&grid, &a, &b).unwrap();
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let (t, s) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let joint = fl.map(0, t + s, &x).unwrap();
        let stepped = fl.map(0, t, &fl.map(0, s, &x).unwrap()).unwrap();
        for (p, q) in joint.iter().zip(&stepped) {
            assert!(close(*p, *q, 1e-10), "{joint:?} vs {stepped:?}");
        }
        let back = fl.map(0, -t, &fl.map(0, t, &x).unwrap()).unwrap();
        for (p, q) in back.iter().zip(&x) {
            assert!(close(*p, *q, 1e-10));
        }
    }
}

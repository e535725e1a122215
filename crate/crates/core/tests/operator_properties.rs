use std::f64::consts::PI;

use muskat_core::profiles::{operator_family, operator_omegas};
use muskat_core::*;
use proptest::prelude::*;

fn bump(g: &Grid, amp: f64, centre: f64, var: f64) -> GridFunction {
    GridFunction::from_fn(g, |x| amp * (-(x - centre) * (x - centre) / var).exp())
}

fn rel_l2(a: &GridFunction, b: &GridFunction) -> f64 {
    (a - b).l2_norm() / b.l2_norm()
}

#[test]
fn flat_line_operator_matches_the_hilbert_multiplier() {
    let g = Grid::new(20.0, 1024).unwrap();
    let z = GridFunction::zeros(&g);
    for (name, w) in operator_omegas(&g) {
        let e = rel_l2(&bnm_apply(&KernelSpec::bnm(&[&z], &[]), &w).unwrap(), &hilbert_transform(&w).scale(PI));
        assert!(e <= 1e-6, "{name}: {e}");
    }
}

#[test]
fn operators_match_their_compositions_on_the_family() {
    let g = Grid::new(20.0, 512).unwrap();
    for c in operator_family(&g) {
        let fp = spectral_derivative(&c.f, 1).unwrap();
        let b01 = bnm_apply(&KernelSpec::bnm(&[&c.f], &[]), &c.omega).unwrap();
        let b11 = bnm_apply(&KernelSpec::bnm(&[&c.f], &[&c.f]), &c.omega).unwrap();
        let a = apply_a(&c.f, &c.omega).unwrap().scale(PI);
        let b = apply_b(&c.f, &c.omega).unwrap();
        assert!(rel_l2(&a, &(&(&fp * &b01) - &b11)) <= 1e-6, "{}", c.name);
        assert!(rel_l2(&b, &(&b01 + &(&fp * &b11))) <= 1e-6, "{}", c.name);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn adjoint_pairing(
        fa in -1.0f64..1.0, fc in -1.0f64..1.0, fv in 0.3f64..2.0,
        wa in -1.0f64..1.0, wc in -2.0f64..2.0, wv in 0.3f64..2.0,
        pa in -1.0f64..1.0, pc in -2.0f64..2.0, pv in 0.3f64..2.0,
    ) {
        let g = Grid::new(10.0, 128).unwrap();
        let f = bump(&g, fa, fc, fv);
        let w = bump(&g, wa, wc, wv);
        let phi = bump(&g, pa, pc, pv);
        let lhs = apply_a(&f, &w).unwrap().dot(&phi);
        let rhs = w.dot(&apply_a_star(&f, &phi).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-8 * w.l2_norm() * phi.l2_norm());
    }

    #[test]
    fn operators_are_linear_in_the_sheet(
        fa in -1.0f64..1.0, s in -3.0f64..3.0, wc in -2.0f64..2.0,
    ) {
        let g = Grid::new(10.0, 128).unwrap();
        let f = bump(&g, fa, 0.2, 1.0);
        let w1 = bump(&g, 1.0, wc, 0.8);
        let w2 = bump(&g, -0.5, -wc, 1.5);
        let combo = &w1 + &w2.scale(s);
        for op in [apply_a, apply_b, apply_a_star] {
            let lhs = op(&f, &combo).unwrap();
            let rhs = &op(&f, &w1).unwrap() + &op(&f, &w2).unwrap().scale(s);
            prop_assert!((&lhs - &rhs).max_abs() <= 1e-12 * (1.0 + rhs.max_abs()));
        }
    }

    #[test]
    fn vertical_shift_of_the_interface_changes_nothing(
        fa in -1.0f64..1.0, shift in -5.0f64..5.0,
    ) {
        let g = Grid::new(10.0, 128).unwrap();
        let f = bump(&g, fa, 0.0, 1.0);
        let fs = f.map(|v| v + shift);
        let w = bump(&g, 1.0, 0.5, 1.0);
        for op in [apply_a, apply_b] {
            let a = op(&f, &w).unwrap();
            let b = op(&fs, &w).unwrap();
            prop_assert!((&a - &b).max_abs() <= 1e-11 * (1.0 + a.max_abs()));
        }
    }

    #[test]
    fn hilbert_transform_is_an_isometry_on_mean_free_data(k in 1.0f64..6.0, phase in 0.0f64..6.0) {
        let g = Grid::new(20.0, 256).unwrap();
        let w = GridFunction::from_fn(&g, |x| (-x * x / 4.0).exp() * (k * x + phase).sin());
        let w = w.map(|v| v - integrate(&w) / 40.0);
        let hw = hilbert_transform(&w);
        prop_assert!((hw.l2_norm() / w.l2_norm() - 1.0).abs() < 1e-12);
        prop_assert!(hw.dot(&w).abs() < 1e-10 * w.l2_norm() * w.l2_norm());
    }
}

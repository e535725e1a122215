use muskat_core::evolution::{measure_rate, resume, RateSetup};
use muskat_core::profiles::{rough, ROUGH_EXPONENT};
use muskat_core::*;

fn bump(g: &Grid, amp: f64) -> GridFunction {
    GridFunction::from_fn(g, |x| amp * (-x * x).exp())
}

#[test]
fn tightening_the_tolerance_converges() {
    let g = Grid::new(10.0, 128).unwrap();
    let f = bump(&g, 0.3);
    let p = FluidParams::normalized(0.5, 1.0, 0.0).unwrap();
    let run = |rel_tol| {
        let ctl = StepControls { rel_tol, ..StepControls::default() };
        simulate(&f, &p, 0.5, &ctl, 1000).unwrap().last().f.clone()
    };
    let reference = run(1e-12);
    let err = |tol| (&run(tol) - &reference).l2_norm() / reference.l2_norm();
    let (loose, tight) = (err(1e-8), err(1e-10));
    assert!(loose < 1e-7, "{loose}");
    assert!(tight < loose / 4.0, "{loose} {tight}");
}

#[test]
fn mass_drift_shrinks_with_the_domain() {
    let p = FluidParams::normalized(0.5, 1.0, 0.0).unwrap();
    let drift = |l: f64, n: usize, rel_tol: f64| {
        let g = Grid::new(l, n).unwrap();
        let f = bump(&g, 0.3);
        let ctl = StepControls { rel_tol, ..StepControls::default() };
        let tr = simulate(&f, &p, 0.5, &ctl, 1000).unwrap();
        (tr.last().diagnostics.mass - tr.snapshots[0].diagnostics.mass).abs()
    };
    let coarse = drift(10.0, 128, 1e-7);
    let fine = drift(20.0, 256, 1e-8);
    assert!(fine < coarse / 4.0, "{coarse} {fine}");
}

#[test]
fn linear_rates_are_reproduced() {
    let cases = [(0.5, 1.0, 0.0, 2.0), (0.3, -1.0, 0.0, 4.0), (0.0, 1.0, 1.0, 4.0)];
    for &(a, theta, sigma, k) in &cases {
        let p = FluidParams::normalized(a, theta, sigma).unwrap();
        let m = measure_rate(&p, k, &RateSetup::default()).unwrap();
        assert!(m.relative_error() < 0.03, "{m:?}");
        assert_eq!(m.high_mode_growth > 1.0, theta < 0.0, "{m:?}");
    }
}

#[test]
fn rough_data_is_smoothed_by_surface_tension() {
    let g = Grid::new(10.0, 128).unwrap();
    let f0 = rough(&g, 0.1, ROUGH_EXPONENT, 3).unwrap();
    let p = FluidParams::normalized(0.0, 1.0, 1.0).unwrap();
    let ctl = StepControls::default();
    let a = simulate(&f0, &p, 0.01, &ctl, 1000).unwrap();
    let b = resume(a.last(), &p, 0.02, &ctl, 1000).unwrap();
    let (s1, s2) = (a.last().diagnostics.sobolev, b.last().diagnostics.sobolev);
    assert!(s1.is_finite() && s2 < s1 && s1 < a.snapshots[0].diagnostics.sobolev);
}

#[test]
fn under_resolved_run_stops_when_the_rt_margin_is_lost() {
    let bumps = [
        (-1.4061342397868448, -1.486241917741462, 0.7621226611189202),
        (-1.9558986153678048, 0.679687991079903, 0.30900239667903884),
        (-0.3698293597086346, -1.4557088059078085, 1.3947502153627358),
    ];
    let g = Grid::new(10.0, 128).unwrap();
    let f0 = GridFunction::from_fn(&g, |x| bumps.iter().map(|&(a, c, w)| a * (-((x - c) / w).powi(2)).exp()).sum());
    let p = FluidParams::normalized(0.9, 1.0, 0.0).unwrap();
    let ctl = StepControls { rel_tol: 1e-7, ..StepControls::default() };
    let tr = simulate(&f0, &p, 1.0, &ctl, 1).unwrap();
    assert_eq!(tr.termination, Termination::RtBreakdown);
    assert!(tr.final_time > 0.0 && tr.final_time < 1.0);
    assert!(matches!(tr.error, Some(Error::RtBreakdown { infimum, .. }) if infimum <= 0.0));
    assert!(tr.snapshots.iter().all(|s| s.diagnostics.rt_infimum.unwrap() > 0.0));
}

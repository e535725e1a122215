//! Property suites run by `muskat verify` and by the acceptance target.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use muskat_core::evolution::{measure_rate, resume, RateSetup};
use muskat_core::kernels::{derivative_of_a, derivative_of_b};
use muskat_core::profiles::{
    derivative_family, operator_family, operator_omegas, plemelj_family, rellich_family, rough, ROUGH_EXPONENT,
};
use muskat_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{ControlsSpec, GridSpec, InitialCondition, NormalizedParams, RawConfig};
use crate::run::run_config;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
    /// The value must be exactly 1 (a yes/no property).
    Holds,
}

/// One measured quantity against its limit.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub bound: Bound,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit,
            bound: Bound::AtMost,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            value,
            limit,
            bound: Bound::AtLeast,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            limit: 1.0,
            bound: Bound::Holds,
        }
    }

    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.value <= self.limit,
            Bound::AtLeast => self.value >= self.limit,
            Bound::Holds => self.value == 1.0,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "pass" } else { "FAIL" };
        match self.bound {
            Bound::AtMost => write!(f, "{tag}  {}: {:.3e} <= {:.1e}", self.name, self.value, self.limit),
            Bound::AtLeast => write!(f, "{tag}  {}: {:.3e} >= {:.1e}", self.name, self.value, self.limit),
            Bound::Holds => write!(f, "{tag}  {}", self.name),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(title: &str) -> Self {
        Report {
            title: title.into(),
            checks: Vec::new(),
        }
    }

    fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

/// Named groups of checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Operators,
    Rellich,
    Plemelj,
    Dispersion,
    Smoothing,
    RtGate,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Operators,
        Suite::Rellich,
        Suite::Plemelj,
        Suite::Dispersion,
        Suite::Smoothing,
        Suite::RtGate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Operators => "operators",
            Suite::Rellich => "rellich",
            Suite::Plemelj => "plemelj",
            Suite::Dispersion => "dispersion",
            Suite::Smoothing => "smoothing",
            Suite::RtGate => "rt-gate",
        }
    }

    pub fn run(&self) -> Result<Vec<Report>> {
        Ok(match self {
            Suite::Operators => vec![hilbert_identity()?, compositions()?, solver_agreement()?, adjoint_pairs(20, 7)?],
            Suite::Rellich => vec![rellich()?],
            Suite::Plemelj => vec![plemelj()?],
            Suite::Dispersion => vec![dispersion_without_tension()?, dispersion_with_tension()?, ill_posedness()?],
            Suite::Smoothing => vec![smoothing()?],
            Suite::RtGate => vec![rt_gate()?],
        })
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .iter()
            .copied()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(Suite::name).collect();
                format!("unknown suite `{s}` (expected one of {})", names.join(", "))
            })
    }
}

fn rel_l2(a: &GridFunction, b: &GridFunction) -> f64 {
    (a - b).l2_norm() / b.l2_norm()
}

/// `B_{0,1}(0)` against `pi H` at `N = 1024`, `L = 20`.
pub fn hilbert_identity() -> Result<Report> {
    let mut r = Report::new("flat line operator vs pi H (N = 1024, L = 20)");
    let g = Grid::new(20.0, 1024)?;
    let z = GridFunction::zeros(&g);
    for (name, w) in operator_omegas(&g) {
        let b = bnm_apply(&KernelSpec::bnm(&[&z], &[]), &w)?;
        r.push(Check::at_most(name, rel_l2(&b, &hilbert_transform(&w).scale(PI)), 1e-6));
    }
    Ok(r)
}

/// `A(f)` and `B(f)` against their `B_{n,m}` compositions, and refinement of
/// the derivative identities from `N = 512` to `N = 1024`.
pub fn compositions() -> Result<Report> {
    let mut r = Report::new("operator compositions and derivative identities");
    let g = Grid::new(20.0, 1024)?;
    for c in operator_family(&g) {
        let fp = spectral_derivative(&c.f, 1)?;
        let b01 = bnm_apply(&KernelSpec::bnm(&[&c.f], &[]), &c.omega)?;
        let b11 = bnm_apply(&KernelSpec::bnm(&[&c.f], &[&c.f]), &c.omega)?;
        let a = apply_a(&c.f, &c.omega)?.scale(PI);
        let b = apply_b(&c.f, &c.omega)?;
        r.push(Check::at_most(format!("A {}", c.name), rel_l2(&a, &(&(&fp * &b01) - &b11)), 1e-6));
        r.push(Check::at_most(format!("B {}", c.name), rel_l2(&b, &(&b01 + &(&fp * &b11))), 1e-6));
    }
    let errors = |n: usize| -> Result<Vec<(&'static str, f64, f64)>> {
        let g = Grid::new(20.0, n)?;
        derivative_family(&g)
            .iter()
            .map(|c| {
                let da = spectral_derivative(&apply_a(&c.f, &c.omega)?, 1)?;
                let db = spectral_derivative(&apply_b(&c.f, &c.omega)?, 1)?;
                Ok((
                    c.name,
                    rel_l2(&derivative_of_a(&c.f, &c.omega)?, &da),
                    rel_l2(&derivative_of_b(&c.f, &c.omega)?, &db),
                ))
            })
            .collect()
    };
    for (coarse, fine) in errors(512)?.iter().zip(errors(1024)?) {
        r.push(Check::at_least(format!("derA refinement {}", coarse.0), coarse.1 / fine.1, 3.0));
        r.push(Check::at_least(format!("derB refinement {}", coarse.0), coarse.2 / fine.2, 3.0));
    }
    Ok(r)
}

/// Direct and Neumann solves for a unit Gaussian interface.
pub fn solver_agreement() -> Result<Report> {
    let mut r = Report::new("sheet-strength solvers (Gaussian f, N = 128, L = 10)");
    let g = Grid::new(10.0, 128)?;
    let f = GridFunction::from_fn(&g, |x| (-x * x).exp());
    for a in [0.0, 0.5, -0.5, 0.9, -0.9] {
        let c = FluidParams::normalized(a, 1.0, 0.0)?.derive_constants()?;
        let rhs = rhs_no_tension(&f, &c);
        let d = solve_omega(&f, &rhs, &c, SolveMethod::Direct)?;
        let n = solve_omega(&f, &rhs, &c, SolveMethod::Neumann)?;
        r.push(Check::at_most(format!("a = {a}: direct vs neumann"), (&d.omega - &n.omega).max_abs(), 1e-8));
        r.push(Check::at_most(format!("a = {a}: direct residual"), d.residual_norm, 1e-10));
        r.push(Check::at_most(format!("a = {a}: neumann residual"), n.residual_norm, 1e-10));
        if a == 0.0 {
            r.push(Check::holds("a = 0 returns the right-hand side", d.omega == rhs && n.omega == rhs));
        }
    }
    Ok(r)
}

fn random_smooth(g: &Grid, rng: &mut ChaCha8Rng, amp: f64) -> GridFunction {
    let bumps: Vec<(f64, f64, f64, f64)> = (0..3)
        .map(|_| {
            (
                rng.gen_range(-amp..amp),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.3..2.0),
                rng.gen_range(0.0..3.0),
            )
        })
        .collect();
    GridFunction::from_fn(g, |x| {
        bumps
            .iter()
            .map(|&(a, c, v, k)| a * (-(x - c) * (x - c) / v).exp() * (k * x).cos())
            .sum()
    })
}

/// `|<A w, phi> - <w, A* phi>|` over random smooth triples.
pub fn adjoint_pairs(count: usize, seed: u64) -> Result<Report> {
    let mut r = Report::new("adjoint pairing (random smooth data, N = 128, L = 10)");
    let g = Grid::new(10.0, 128)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let f = random_smooth(&g, &mut rng, 1.0);
        let w = random_smooth(&g, &mut rng, 1.0);
        let phi = random_smooth(&g, &mut rng, 1.0);
        let lhs = apply_a(&f, &w)?.dot(&phi);
        let rhs = w.dot(&apply_a_star(&f, &phi)?);
        worst = worst.max((lhs - rhs).abs() / (w.l2_norm() * phi.l2_norm()));
    }
    r.push(Check::at_most(format!("worst of {count} pairs"), worst, 1e-8));
    Ok(r)
}

/// Rellich residuals at `N = 512` and their refinement to `N = 1024`.
pub fn rellich() -> Result<Report> {
    let mut r = Report::new("Rellich residuals (L = 20)");
    let residuals = |n: usize| -> Result<Vec<(&'static str, f64, f64)>> {
        let g = Grid::new(20.0, n)?;
        rellich_family(&g)
            .iter()
            .map(|c| {
                let (p, m) = rellich_residual(&c.f, &c.omega)?;
                let w2 = c.omega.l2_norm().powi(2);
                Ok((c.name, p.abs() / w2, m.abs() / w2))
            })
            .collect()
    };
    for (coarse, fine) in residuals(512)?.iter().zip(residuals(1024)?) {
        r.push(Check::at_most(format!("{} r+ at N = 512", coarse.0), coarse.1, 1e-4));
        r.push(Check::at_most(format!("{} r- at N = 512", coarse.0), coarse.2, 1e-4));
        r.push(Check::at_least(format!("{} r+ refinement", coarse.0), coarse.1 / fine.1, 3.0));
        r.push(Check::at_least(format!("{} r- refinement", coarse.0), coarse.2 / fine.2, 3.0));
    }
    Ok(r)
}

/// Tangential jump of the traces, and convergence of the layer potential to
/// the traces at offsets `8h, 4h, 2h`.
pub fn plemelj() -> Result<Report> {
    let mut r = Report::new("traces and the velocity jump (N = 256, L = 10)");
    let n = 256;
    let g = Grid::new(10.0, n)?;
    let h = g.spacing();
    let nodes: Vec<usize> = (n / 4..3 * n / 4).collect();
    for c in plemelj_family(&g) {
        let fp = spectral_derivative(&c.f, 1)?;
        let up = trace_velocity(&c.f, &c.omega, Side::Above)?;
        let down = trace_velocity(&c.f, &c.omega, Side::Below)?;
        let jump = (0..n)
            .map(|j| {
                let d = fp.values()[j];
                let tang = |v: &(GridFunction, GridFunction)| v.0.values()[j] + d * v.1.values()[j];
                (tang(&down) - tang(&up) - c.omega.values()[j]).abs()
            })
            .fold(0.0, f64::max);
        r.push(Check::at_most(format!("{}: tangential jump - omega", c.name), jump / c.omega.max_abs(), 1e-12));
        for (side, sign, trace) in [(Side::Above, 1.0, &up), (Side::Below, -1.0, &down)] {
            let mut errs = Vec::new();
            for m in [8.0, 4.0, 2.0] {
                let pts: Vec<(f64, f64)> = nodes.iter().map(|&j| (g.node(j), c.f.values()[j] + sign * m * h)).collect();
                let v = biot_savart(&c.f, &c.omega, &pts)?;
                let e = nodes
                    .iter()
                    .zip(&v)
                    .map(|(&j, s)| {
                        (s.velocity.0 - trace.0.values()[j])
                            .abs()
                            .max((s.velocity.1 - trace.1.values()[j]).abs())
                    })
                    .fold(0.0, f64::max);
                errs.push(e);
            }
            let monotone = errs[0] > errs[1] && errs[1] > errs[2];
            r.push(Check::holds(
                format!(
                    "{} {}: offsets 8h, 4h, 2h give {:.2e}, {:.2e}, {:.2e}",
                    c.name,
                    side.as_str(),
                    errs[0],
                    errs[1],
                    errs[2]
                ),
                monotone,
            ));
        }
    }
    Ok(r)
}

fn rate_check(r: &mut Report, p: &FluidParams, k: f64, label: &str) -> Result<f64> {
    let m = measure_rate(p, k, &RateSetup::default())?;
    r.push(Check::at_most(
        format!("{label} k = {k}: measured {:.6} vs {:.6}", m.measured, m.predicted),
        m.relative_error(),
        0.03,
    ));
    Ok(m.measured)
}

/// Decay rates `(c_rho_mu / 2) k` of small packets without surface tension.
pub fn dispersion_without_tension() -> Result<Report> {
    let mut r = Report::new("linear decay without surface tension (a = 0.5, Theta = 1)");
    let p = FluidParams::normalized(0.5, 1.0, 0.0)?;
    for k in [2.0, 4.0, 8.0] {
        rate_check(&mut r, &p, k, "sigma = 0")?;
    }
    Ok(r)
}

/// Decay rates `(k^3 + Theta k) / 2` with `b_mu = sigma = 1`.
pub fn dispersion_with_tension() -> Result<Report> {
    let mut r = Report::new("linear decay with surface tension (b_mu = sigma = 1)");
    for theta in [0.0, 1.0] {
        let p = FluidParams::normalized(0.0, theta, 1.0)?;
        for k in [2.0, 4.0] {
            rate_check(&mut r, &p, k, &format!("Theta = {theta}"))?;
        }
    }
    Ok(r)
}

/// Growth rates for `Theta < 0` scale with `k`, high modes gain energy, and the
/// gate refuses such data at `t = 0`.
pub fn ill_posedness() -> Result<Report> {
    let mut r = Report::new("unstable stratification without surface tension (a = 0.3, Theta = -1)");
    let p = FluidParams::normalized(0.3, -1.0, 0.0)?;
    let mut rates = Vec::new();
    for k in [2.0, 4.0, 8.0] {
        let m = measure_rate(&p, k, &RateSetup::default())?;
        r.push(Check::holds(
            format!("k = {k}: growth rate {:.6}, high-mode fraction x{:.3}", -m.measured, m.high_mode_growth),
            m.measured < 0.0 && m.high_mode_growth > 1.0,
        ));
        rates.push((k, m.measured));
    }
    let (k0, r0) = rates[0];
    for &(k, rate) in &rates[1..] {
        let linear = r0 * k / k0;
        r.push(Check::at_most(
            format!("k = {k}: deviation from linear scaling in k"),
            (rate / linear - 1.0).abs(),
            0.1,
        ));
    }
    let g = Grid::new(5.0 * PI, 256)?;
    let f0 = GridFunction::from_fn(&g, |x| 1e-4 * (-x * x / 9.0).exp() * (2.0 * x).cos());
    let refused = matches!(
        simulate(&f0, &p, 1.0, &StepControls::default(), 1),
        Err(Error::RtBreakdown { t, .. }) if t == 0.0
    );
    r.push(Check::holds("gated run refused at t = 0", refused));
    Ok(r)
}

/// `H^3` norm of rough data under surface tension at `t = 0.01` and `t = 0.02`.
pub fn smoothing() -> Result<Report> {
    let mut r = Report::new("smoothing of rough data (b_mu = sigma = Theta = 1, N = 256, L = 10)");
    let g = Grid::new(10.0, 256)?;
    let f0 = rough(&g, 0.1, ROUGH_EXPONENT, 1)?;
    let p = FluidParams::normalized(0.0, 1.0, 1.0)?;
    let ctl = StepControls::default();
    let first = simulate(&f0, &p, 0.01, &ctl, usize::MAX)?;
    let second = resume(first.last(), &p, 0.02, &ctl, usize::MAX)?;
    let (h1, h2) = (first.last().diagnostics.sobolev, second.last().diagnostics.sobolev);
    r.push(Check::holds(format!("H3 at t = 0.01 is finite ({h1:.4e})"), h1.is_finite()));
    r.push(Check::holds(format!("H3 at t = 0.02 ({h2:.4e}) < H3 at t = 0.01"), h2 < h1));
    Ok(r)
}

/// Three Gaussians that leave the Rayleigh-Taylor set mid-run on a 128-point
/// grid (the same data stay inside on finer grids).
pub fn midrun_breakdown_data(g: &Grid) -> GridFunction {
    let bumps = [
        (-1.4061342397868448, -1.486241917741462, 0.7621226611189202),
        (-1.9558986153678048, 0.679687991079903, 0.30900239667903884),
        (-0.3698293597086346, -1.4557088059078085, 1.3947502153627358),
    ];
    GridFunction::from_fn(g, |x| {
        bumps
            .iter()
            .map(|&(a, c, w)| a * (-((x - c) / w) * ((x - c) / w)).exp())
            .sum()
    })
}

/// Refusal of initial data outside the Rayleigh-Taylor set, the mid-run abort,
/// and flat-state membership against the sign of `Theta`.
pub fn rt_gate() -> Result<Report> {
    let mut r = Report::new("Rayleigh-Taylor gate (sigma = 0)");
    let g = Grid::new(10.0, 128)?;
    let bump = GridFunction::from_fn(&g, |x| 0.2 * (-x * x).exp());
    let refusals = [
        ("Theta = -1, Gaussian", 0.3, -1.0, bump.clone()),
        ("Theta = 0, Gaussian", 0.0, 0.0, bump.clone()),
        ("Theta = -0.5, flat", -0.5, -0.5, GridFunction::zeros(&g)),
    ];
    for (label, a, theta, f0) in refusals {
        let p = FluidParams::normalized(a, theta, 0.0)?;
        let infimum = evaluate_rt(&f0, &p.derive_constants()?)?.infimum;
        let refused = matches!(
            simulate(&f0, &p, 1.0, &StepControls::default(), 1),
            Err(Error::RtBreakdown { t, .. }) if t == 0.0
        );
        r.push(Check::holds(format!("{label}: inf a_RT = {infimum:.3e}, refused at t = 0"), refused && infimum <= 0.0));
    }
    let p = FluidParams::normalized(0.9, 1.0, 0.0)?;
    let ctl = StepControls {
        rel_tol: 1e-7,
        ..StepControls::default()
    };
    let tr = simulate(&midrun_breakdown_data(&g), &p, 1.0, &ctl, 1)?;
    let stopped = tr.termination == Termination::RtBreakdown
        && tr.final_time > 0.0
        && matches!(tr.error, Some(Error::RtBreakdown { infimum, .. }) if infimum <= 0.0)
        && tr.snapshots.iter().all(|s| s.diagnostics.rt_infimum.is_some_and(|v| v > 0.0));
    r.push(Check::holds(
        format!("mid-run crossing stops the run at t = {:.4}", tr.final_time),
        stopped,
    ));
    let mut exact = true;
    for a in [0.0, 0.5, -0.5, 0.9, -0.9] {
        for theta in [2.0, 1e-3, 0.0, -1e-3, -2.0] {
            let c = FluidParams::normalized(a, theta, 0.0)?.derive_constants()?;
            let report = evaluate_rt(&GridFunction::zeros(&g), &c)?;
            exact &= report.in_o == (theta > 0.0) && report.infimum == c.c_rho_mu;
        }
    }
    r.push(Check::holds("flat-state membership equals sign(Theta) > 0", exact));
    Ok(r)
}

fn repro_config(dir: &Path, normalized: NormalizedParams, ic: InitialCondition, t_end: f64) -> RawConfig {
    RawConfig {
        params: None,
        normalized: Some(normalized),
        grid: GridSpec {
            half_length: 10.0,
            n: 64,
        },
        initial_condition: ic,
        t_end,
        controls: ControlsSpec::default(),
        snapshot_every: 3,
        output_dir: dir.to_path_buf(),
    }
}

/// Runs two small configurations, re-runs them from their manifests into
/// fresh directories under `work`, and compares the snapshot files byte for byte.
pub fn reproducibility(work: &Path) -> std::result::Result<Report, Box<dyn std::error::Error>> {
    let mut r = Report::new("re-running manifests");
    let cases = [
        (
            "no tension",
            NormalizedParams {
                atwood: 0.5,
                theta: 1.0,
                sigma: 0.0,
            },
            InitialCondition::Gaussian {
                amplitude: 0.3,
                width: 1.0,
                centre: 0.2,
            },
            0.5,
        ),
        (
            "tension",
            NormalizedParams {
                atwood: -0.3,
                theta: 1.0,
                sigma: 0.5,
            },
            InitialCondition::Rough {
                amplitude: 0.05,
                seed: 11,
                exponent: ROUGH_EXPONENT,
            },
            0.005,
        ),
    ];
    for (i, (label, params, ic, t_end)) in cases.into_iter().enumerate() {
        let first_dir = work.join(format!("case{i}-first"));
        let second_dir = work.join(format!("case{i}-second"));
        let first = run_config(&repro_config(&first_dir, params, ic, t_end).validate()?)?;
        let second = crate::run::rerun(&first.manifest_path, Some(&second_dir))?;
        let mut same = first.manifest.snapshots == second.manifest.snapshots && first.manifest.snapshots.len() > 1;
        for entry in &first.manifest.snapshots {
            let a = std::fs::read(first_dir.join(&entry.file))?;
            let b = std::fs::read(second_dir.join(&entry.file))?;
            same &= a == b;
        }
        r.push(Check::holds(
            format!("{label}: {} snapshots identical", first.manifest.snapshots.len()),
            same,
        ));
    }
    Ok(r)
}

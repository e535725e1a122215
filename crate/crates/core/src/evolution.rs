//! Time integration of the interface in physical time:
//! `f_t = (1 / 2 pi) B(f)[omega]`.
//!
//! Two steppers are offered. [`Stepper::RkAdaptive`] is the Dormand-Prince
//! 5(4) pair with first-same-as-last reuse and frozen-coefficient stability
//! caps. [`Stepper::Imex`] (surface tension only) treats the flat-state
//! symbol `-(b_mu sigma / 2)|xi|^3` implicitly and the rest explicitly with
//! first-order splitting, using step doubling for the error estimate and
//! Richardson extrapolation of the accepted value.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, DEFAULT_DECAY_THRESHOLD};
use crate::kernels::apply_b;
use crate::math;
use crate::omega::{rhs_no_tension, rhs_tension, solve_omega, SolveMethod, VortexSheet};
use crate::params::{DerivedConstants, FluidParams};
use crate::spectral::{apply_multiplier, integrate, sobolev_norm};
use crate::stability::{default_rt_tolerance, frozen_symbols, rt_functional};

/// Order of the Sobolev norm reported in [`Diagnostics::sobolev`].
pub const SOBOLEV_ORDER: f64 = 3.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Stepper {
    #[default]
    RkAdaptive,
    Imex,
}

/// Step-size control. `rel_tol` and `abs_tol` bound the local error in the
/// discrete `L2` norm: `||e|| <= abs_tol + rel_tol ||f||`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControls {
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub stepper: Stepper,
    /// Cap `dt <= cfl_c1 h / max((|alpha| + |beta|) / 2)` without surface tension.
    pub cfl_c1: f64,
    /// Cap `dt <= cfl_c3 h^3 / max(gamma3 b_mu sigma / 2)` with surface tension
    /// (explicit stepper only).
    pub cfl_c3: f64,
    /// Stop tension-free runs that leave the Rayleigh-Taylor set.
    pub enforce_rt: bool,
    /// Gate margin; `None` means [`default_rt_tolerance`].
    pub rt_tolerance: Option<f64>,
    pub solve_method: SolveMethod,
}

impl Default for StepControls {
    fn default() -> Self {
        StepControls {
            dt_init: 1e-4,
            dt_min: 1e-14,
            dt_max: 1e-1,
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            stepper: Stepper::RkAdaptive,
            cfl_c1: 1.0,
            cfl_c3: 0.25,
            enforce_rt: true,
            rt_tolerance: None,
            solve_method: SolveMethod::Direct,
        }
    }
}

impl StepControls {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidControls(msg.into()));
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !(positive(self.dt_min) && positive(self.dt_init) && positive(self.dt_max)) {
            return bad("dt_min, dt_init and dt_max must be positive and finite");
        }
        if !(self.dt_min <= self.dt_init && self.dt_init <= self.dt_max) {
            return Err(Error::InvalidControls(format!(
                "need dt_min <= dt_init <= dt_max, got {} / {} / {}",
                self.dt_min, self.dt_init, self.dt_max
            )));
        }
        if !(positive(self.rel_tol) && positive(self.abs_tol)) {
            return bad("rel_tol and abs_tol must be positive");
        }
        if !(positive(self.cfl_c1) && positive(self.cfl_c3)) {
            return bad("cfl_c1 and cfl_c3 must be positive");
        }
        if let Some(tol) = self.rt_tolerance {
            if !tol.is_finite() {
                return bad("rt_tolerance must be finite");
            }
        }
        Ok(())
    }

    fn rt_tolerance_for(&self, c: &DerivedConstants) -> f64 {
        self.rt_tolerance.unwrap_or_else(|| default_rt_tolerance(c))
    }
}

/// Scalar monitors of a state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    /// `h sum f`.
    pub mass: f64,
    pub sup_norm: f64,
    /// Discrete `H^3` norm of `f`.
    pub sobolev: f64,
    /// `inf a_RT`, present only without surface tension.
    pub rt_infimum: Option<f64>,
    /// `max |f_t|`.
    pub max_rhs: f64,
    pub boundary_decay: f64,
}

impl Diagnostics {
    pub fn is_finite(&self) -> bool {
        self.mass.is_finite()
            && self.sup_norm.is_finite()
            && self.sobolev.is_finite()
            && self.rt_infimum.is_none_or(f64::is_finite)
            && self.max_rhs.is_finite()
            && self.boundary_decay.is_finite()
    }
}

/// State of a run at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub f: GridFunction,
    pub omega: VortexSheet,
    /// `f_t` at this state.
    pub dfdt: GridFunction,
    pub diagnostics: Diagnostics,
    /// Step size proposed for the next step.
    pub dt_next: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Completed,
    RtBreakdown,
    DtUnderflow,
    NonFinite,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::RtBreakdown => "rt_breakdown",
            Termination::DtUnderflow => "dt_underflow",
            Termination::NonFinite => "non_finite",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub termination: Termination,
    /// Time of the last valid state (the last snapshot).
    pub final_time: f64,
    /// The error that ended the run early, if any.
    pub error: Option<Error>,
}

impl Trajectory {
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("a trajectory holds at least its initial state")
    }
}

#[derive(Clone, Copy)]
struct Model {
    c: DerivedConstants,
    tension: bool,
    method: SolveMethod,
}

impl Model {
    fn new(p: &FluidParams, method: SolveMethod) -> Result<Self> {
        let c = p.derive_constants()?;
        Ok(Model {
            c,
            tension: c.sigma > 0.0,
            method,
        })
    }

    fn rhs(&self, f: &GridFunction) -> Result<(GridFunction, VortexSheet)> {
        if !f.is_finite() {
            return Err(Error::NonFinite("interface"));
        }
        let data = if self.tension {
            rhs_tension(f, f, &self.c)?
        } else {
            rhs_no_tension(f, &self.c)
        };
        let sheet = solve_omega(f, &data, &self.c, self.method)?;
        let dfdt = apply_b(f, &sheet.omega)?.scale(1.0 / (2.0 * PI));
        let dfdt = dfdt.ensure_finite("interface velocity")?;
        Ok((dfdt, sheet))
    }

    fn diagnostics(&self, f: &GridFunction, dfdt: &GridFunction, omega: &GridFunction) -> Result<Diagnostics> {
        let rt_infimum = if self.tension {
            None
        } else {
            Some(rt_functional(f, omega, &self.c)?.min())
        };
        let d = Diagnostics {
            mass: integrate(f),
            sup_norm: f.max_abs(),
            sobolev: sobolev_norm(f, SOBOLEV_ORDER),
            rt_infimum,
            max_rhs: dfdt.max_abs(),
            boundary_decay: f.boundary_decay(),
        };
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::NonFinite("diagnostics"))
        }
    }

    fn snapshot(&self, t: f64, f: GridFunction, dfdt: GridFunction, omega: VortexSheet, dt_next: f64) -> Result<Snapshot> {
        let diagnostics = self.diagnostics(&f, &dfdt, &omega.omega)?;
        Ok(Snapshot {
            t,
            f,
            omega,
            dfdt,
            diagnostics,
            dt_next,
            accepted_steps: 0,
            rejected_steps: 0,
        })
    }

    /// Frozen-coefficient stability cap for the explicit stepper.
    fn stability_cap(&self, snap: &Snapshot, ctl: &StepControls) -> Result<f64> {
        let h = snap.f.grid().spacing();
        let symbols = frozen_symbols(&snap.f, &snap.omega.omega, &self.c)?;
        if self.tension {
            let kappa = 0.5 * self.c.b_mu * self.c.sigma;
            let speed = symbols.gamma3.max_abs() * kappa;
            Ok(if speed > 0.0 { ctl.cfl_c3 * h * h * h / speed } else { f64::INFINITY })
        } else {
            let speed = (0..snap.f.len())
                .map(|j| 0.5 * (symbols.alpha.values()[j].abs() + symbols.beta.values()[j].abs()))
                .fold(0.0, f64::max);
            Ok(if speed > 0.0 { ctl.cfl_c1 * h / speed } else { f64::INFINITY })
        }
    }

    fn rt_gate(&self, snap: &Snapshot, ctl: &StepControls) -> Result<()> {
        if let Some(infimum) = snap.diagnostics.rt_infimum {
            if ctl.enforce_rt && infimum <= ctl.rt_tolerance_for(&self.c) {
                return Err(Error::RtBreakdown { t: snap.t, infimum });
            }
        }
        Ok(())
    }
}

/// `f_t` in physical time and the sheet strength it was built from.
///
/// Without surface tension `omega` solves `(1 + a_mu A) omega = -c_rho_mu f'`;
/// with it the right-hand side is the tension data at `h = f`.
pub fn rhs_evolution(f: &GridFunction, p: &FluidParams) -> Result<(GridFunction, VortexSheet)> {
    rhs_evolution_with(f, p, SolveMethod::Direct)
}

pub fn rhs_evolution_with(
    f: &GridFunction,
    p: &FluidParams,
    method: SolveMethod,
) -> Result<(GridFunction, VortexSheet)> {
    p.validate()?;
    Model::new(p, method)?.rhs(f)
}

/// Evaluates the state at `t` and wraps it as a snapshot with `dt_next = dt_init`.
pub fn initial_snapshot(f0: &GridFunction, p: &FluidParams, ctl: &StepControls) -> Result<Snapshot> {
    p.validate()?;
    ctl.validate()?;
    let model = Model::new(p, ctl.solve_method)?;
    let (dfdt, omega) = model.rhs(f0)?;
    model.snapshot(0.0, f0.clone(), dfdt, omega, ctl.dt_init)
}

/// One accepted step.
pub fn step(snap: &Snapshot, p: &FluidParams, ctl: &StepControls) -> Result<Snapshot> {
    step_until(snap, p, ctl, f64::INFINITY)
}

/// One accepted step that does not pass `t_limit`.
pub fn step_until(snap: &Snapshot, p: &FluidParams, ctl: &StepControls, t_limit: f64) -> Result<Snapshot> {
    ctl.validate()?;
    let model = Model::new(p, ctl.solve_method)?;
    if ctl.stepper == Stepper::Imex && !model.tension {
        return Err(Error::InvalidControls("the IMEX stepper needs surface tension".into()));
    }
    if !(t_limit > snap.t) {
        return Err(Error::InvalidControls(format!("t_limit {t_limit} is not after t = {}", snap.t)));
    }
    let mut dt = snap.dt_next.min(ctl.dt_max);
    if ctl.stepper == Stepper::RkAdaptive {
        dt = dt.min(model.stability_cap(snap, ctl)?);
    }
    let mut rejected = 0;
    loop {
        let remaining = t_limit - snap.t;
        let last = dt >= remaining;
        let dt_try = if last { remaining } else { dt };
        let attempt = match ctl.stepper {
            Stepper::RkAdaptive => rk_attempt(&model, snap, dt_try, ctl),
            Stepper::Imex => imex_attempt(&model, snap, dt_try, ctl),
        };
        let failure = match attempt {
            Ok(a) if a.err <= 1.0 => {
                let t = if last { t_limit } else { snap.t + dt_try };
                let mut next = model.snapshot(t, a.f, a.dfdt, a.omega, dt_try * a.grow)?;
                next.accepted_steps = snap.accepted_steps + 1;
                next.rejected_steps = snap.rejected_steps + rejected;
                model.rt_gate(&next, ctl)?;
                return Ok(next);
            }
            Ok(a) => {
                dt = dt_try * a.shrink;
                None
            }
            Err(e) => {
                dt = dt_try * 0.2;
                Some(e)
            }
        };
        rejected += 1;
        if dt < ctl.dt_min {
            return Err(failure.unwrap_or(Error::DtUnderflow { t: snap.t, dt }));
        }
    }
}

struct Attempt {
    f: GridFunction,
    dfdt: GridFunction,
    omega: VortexSheet,
    /// Scaled error; the step is accepted when `err <= 1`.
    err: f64,
    grow: f64,
    shrink: f64,
}

fn error_ratio(e: &GridFunction, f_old: &GridFunction, f_new: &GridFunction, ctl: &StepControls) -> f64 {
    let scale = ctl.abs_tol + ctl.rel_tol * f64::max(f_old.l2_norm(), f_new.l2_norm());
    e.l2_norm() / scale
}

fn combine(base: &GridFunction, dt: f64, terms: &[(f64, &GridFunction)]) -> GridFunction {
    let mut out = base.values().to_vec();
    for &(w, k) in terms {
        if w != 0.0 {
            for (o, &v) in out.iter_mut().zip(k.values()) {
                *o += dt * w * v;
            }
        }
    }
    GridFunction::new(base.grid(), out).unwrap_or_else(|_| base.map(|_| f64::NAN))
}

const DP_A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn rk_attempt(model: &Model, snap: &Snapshot, dt: f64, ctl: &StepControls) -> Result<Attempt> {
    let mut k: Vec<GridFunction> = Vec::with_capacity(7);
    k.push(snap.dfdt.clone());
    let mut last = None;
    for row in DP_A.iter() {
        let terms: Vec<(f64, &GridFunction)> = row.iter().copied().zip(k.iter()).collect();
        let y = combine(&snap.f, dt, &terms);
        let (dfdt, sheet) = model.rhs(&y)?;
        k.push(dfdt);
        last = Some((y, sheet));
    }
    let (f_new, omega) = last.expect("six stages");
    let terms: Vec<(f64, &GridFunction)> = DP_E.iter().copied().zip(k.iter()).collect();
    let e = combine(&GridFunction::zeros(snap.f.grid()), dt, &terms);
    let err = error_ratio(&e, &snap.f, &f_new, ctl);
    let dfdt = k.pop().expect("seven stages");
    let (grow, shrink) = controller(err, 5.0, 5.0);
    Ok(Attempt {
        f: f_new,
        dfdt,
        omega,
        err,
        grow,
        shrink,
    })
}

/// Step factors from the scaled error for a local error of order `order`.
fn controller(err: f64, order: f64, max_growth: f64) -> (f64, f64) {
    if !err.is_finite() {
        return (1.0, 0.2);
    }
    let ideal = if err > 0.0 {
        0.9 * math::powf(err, -1.0 / order)
    } else {
        max_growth
    };
    (ideal.clamp(0.2, max_growth), ideal.clamp(0.2, 1.0))
}

/// `(1 + dt kappa |xi|^3)^{-1} (f + dt (F(f) + kappa |D|^3 f))`.
fn imex_euler(f: &GridFunction, dfdt: &GridFunction, kappa: f64, dt: f64) -> GridFunction {
    let d3 = apply_multiplier(f, |_, xi| Complex64::new(math::powi(xi.abs(), 3), 0.0));
    let explicit: Vec<f64> = (0..f.len())
        .map(|j| f.values()[j] + dt * (dfdt.values()[j] + kappa * d3.values()[j]))
        .collect();
    let explicit = GridFunction::new(f.grid(), explicit).unwrap_or_else(|_| f.map(|_| f64::NAN));
    apply_multiplier(&explicit, |_, xi| {
        Complex64::new(1.0 / (1.0 + dt * kappa * math::powi(xi.abs(), 3)), 0.0)
    })
}

fn imex_attempt(model: &Model, snap: &Snapshot, dt: f64, ctl: &StepControls) -> Result<Attempt> {
    let kappa = 0.5 * model.c.b_mu * model.c.sigma;
    let full = imex_euler(&snap.f, &snap.dfdt, kappa, dt);
    let half = imex_euler(&snap.f, &snap.dfdt, kappa, 0.5 * dt);
    let (dfdt_half, _) = model.rhs(&half)?;
    let two_halves = imex_euler(&half, &dfdt_half, kappa, 0.5 * dt);
    let e = &two_halves - &full;
    let f_new = &two_halves.scale(2.0) - &full;
    let err = error_ratio(&e, &snap.f, &f_new, ctl);
    let (grow, shrink) = controller(err, 2.0, 2.0);
    if err > 1.0 {
        return Ok(Attempt {
            f: f_new,
            dfdt: dfdt_half,
            omega: snap.omega.clone(),
            err,
            grow,
            shrink,
        });
    }
    let (dfdt, omega) = model.rhs(&f_new)?;
    Ok(Attempt {
        f: f_new,
        dfdt,
        omega,
        err,
        grow,
        shrink,
    })
}

/// Runs from `f0` to `t_end`, keeping the initial state, every
/// `snapshot_every`-th accepted step and the last valid state.
///
/// `f0` must pass the boundary-decay check. Without surface tension and with
/// `enforce_rt` set, `f0` must lie in the Rayleigh-Taylor set, otherwise
/// [`Error::RtBreakdown`] is returned at `t = 0`.
pub fn simulate(
    f0: &GridFunction,
    p: &FluidParams,
    t_end: f64,
    ctl: &StepControls,
    snapshot_every: usize,
) -> Result<Trajectory> {
    p.validate()?;
    ctl.validate()?;
    if snapshot_every == 0 {
        return Err(Error::InvalidControls("snapshot_every must be at least 1".into()));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidControls(format!("t_end must be finite and >= 0, got {t_end}")));
    }
    if !f0.is_finite() {
        return Err(Error::NonFinite("initial condition"));
    }
    f0.check_decay(DEFAULT_DECAY_THRESHOLD)?;
    let model = Model::new(p, ctl.solve_method)?;
    if ctl.stepper == Stepper::Imex && !model.tension {
        return Err(Error::InvalidControls("the IMEX stepper needs surface tension".into()));
    }
    let current = initial_snapshot(f0, p, ctl)?;
    model.rt_gate(&current, ctl)?;
    run_from(current, p, t_end, ctl, snapshot_every)
}

/// Continues a run from `start` (for instance the last snapshot of an earlier
/// trajectory) to `t_end`. The decay check is not repeated, so states whose
/// tails have grown during a run can be continued.
pub fn resume(start: &Snapshot, p: &FluidParams, t_end: f64, ctl: &StepControls, snapshot_every: usize) -> Result<Trajectory> {
    p.validate()?;
    ctl.validate()?;
    if snapshot_every == 0 {
        return Err(Error::InvalidControls("snapshot_every must be at least 1".into()));
    }
    if !(t_end >= start.t && t_end.is_finite()) {
        return Err(Error::InvalidControls(format!("t_end must be finite and >= {}, got {t_end}", start.t)));
    }
    run_from(start.clone(), p, t_end, ctl, snapshot_every)
}

fn run_from(
    mut current: Snapshot,
    p: &FluidParams,
    t_end: f64,
    ctl: &StepControls,
    snapshot_every: usize,
) -> Result<Trajectory> {
    let mut snapshots = alloc::vec![current.clone()];
    let mut termination = Termination::Completed;
    let mut error = None;
    while current.t < t_end {
        match step_until(&current, p, ctl, t_end) {
            Ok(next) => {
                current = next;
                if current.accepted_steps.is_multiple_of(snapshot_every) {
                    snapshots.push(current.clone());
                }
            }
            Err(e) => {
                termination = match e {
                    Error::RtBreakdown { .. } => Termination::RtBreakdown,
                    Error::DtUnderflow { .. } => Termination::DtUnderflow,
                    Error::NonFinite(_) | Error::DegenerateOperator { .. } => Termination::NonFinite,
                    other => return Err(other),
                };
                error = Some(e);
                break;
            }
        }
    }
    if snapshots.last().map(|s| s.accepted_steps) != Some(current.accepted_steps) {
        snapshots.push(current.clone());
    }
    Ok(Trajectory {
        final_time: current.t,
        snapshots,
        termination,
        error,
    })
}

/// Setup for [`measure_rate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateSetup {
    pub amplitude: f64,
    /// Envelope width of the packet `amplitude exp(-(x / width)^2) cos(k x)`.
    pub width: f64,
    pub half_length: f64,
    pub n_points: usize,
    /// Number of e-foldings of the predicted rate to run for.
    pub e_foldings: f64,
    pub controls: StepControls,
}

impl Default for RateSetup {
    fn default() -> Self {
        RateSetup {
            amplitude: 1e-4,
            width: 3.0,
            half_length: 5.0 * PI,
            n_points: 256,
            e_foldings: 1.0,
            controls: StepControls {
                enforce_rt: false,
                ..StepControls::default()
            },
        }
    }
}

/// A measured decay rate next to the linear prediction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateMeasurement {
    pub k: f64,
    pub predicted: f64,
    pub measured: f64,
    /// Number of snapshots in the fit.
    pub samples: usize,
    /// Fraction of the energy in modes `|xi| >= k` at the end of the run,
    /// divided by the same fraction at the start.
    pub high_mode_growth: f64,
}

impl RateMeasurement {
    pub fn relative_error(&self) -> f64 {
        (self.measured - self.predicted).abs() / self.predicted.abs()
    }
}

/// Runs a small wave packet about the flat state and fits
/// `log |f_hat(k)|` against `t` by least squares.
pub fn measure_rate(p: &FluidParams, k: f64, setup: &RateSetup) -> Result<RateMeasurement> {
    let c = p.derive_constants()?;
    let predicted = crate::stability::dispersion_rate(k, c.sigma > 0.0, &c)?;
    if predicted == 0.0 {
        return Err(Error::InvalidControls(format!("the predicted rate at k = {k} is zero")));
    }
    let g = crate::grid::Grid::new(setup.half_length, setup.n_points)?;
    if g.mode_of(k).is_none() {
        return Err(Error::InvalidWavenumber(k));
    }
    let (amp, width) = (setup.amplitude, setup.width);
    let f0 = GridFunction::from_fn(&g, |x| {
        let s = x / width;
        amp * math::exp(-s * s) * math::cos(k * x)
    });
    let t_end = setup.e_foldings / predicted.abs();
    let run = simulate(&f0, p, t_end, &setup.controls, 1)?;
    if run.termination != Termination::Completed {
        return Err(run.error.unwrap_or(Error::NonFinite("rate measurement")));
    }
    let mut points = Vec::with_capacity(run.snapshots.len());
    for s in &run.snapshots {
        let a = mode_amplitude(&s.f, k).ok_or(Error::InvalidWavenumber(k))?;
        points.push((s.t, math::ln(a)));
    }
    let n = points.len() as f64;
    let (mt, my) = points.iter().fold((0.0, 0.0), |(a, b), &(t, y)| (a + t / n, b + y / n));
    let (sty, stt) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(t, y)| (a + (t - mt) * (y - my), b + (t - mt) * (t - mt)));
    let fraction = |f: &GridFunction| high_mode_energy(f, k) / high_mode_energy(f, 0.0);
    let (start, end) = (fraction(&f0), fraction(&run.last().f));
    Ok(RateMeasurement {
        k,
        predicted,
        measured: -sty / stt,
        samples: points.len(),
        high_mode_growth: if start > 0.0 { end / start } else { f64::INFINITY },
    })
}

/// Sum of `|F_m|^2` over modes with `|xi| >= xi_min`.
pub fn high_mode_energy(f: &GridFunction, xi_min: f64) -> f64 {
    let hp = apply_multiplier(f, |_, xi| {
        if xi.abs() >= xi_min {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    math::powi(hp.l2_norm(), 2)
}

/// Amplitude of the Fourier mode at wavenumber `k`, if `k` is a grid mode.
pub fn mode_amplitude(f: &GridFunction, k: f64) -> Option<f64> {
    let g = f.grid();
    let m = g.mode_of(k)?;
    let (mut re, mut im) = (0.0, 0.0);
    for (j, x) in g.nodes().enumerate() {
        let phase = g.wavenumber(m) * (x + g.half_length());
        re += f.values()[j] * math::cos(phase);
        im -= f.values()[j] * math::sin(phase);
    }
    Some(math::sqrt(re * re + im * im) * 2.0 / g.len() as f64)
}

//! Boundary-integral simulation of the two-phase Muskat problem in the
//! vortex-sheet formulation.
//!
//! The interface is the graph `y = f(t, x)` sampled on a uniform grid over a
//! truncated line `[-L, L)`. The sheet strength `omega` solves
//! `(1 + a_mu A(f)) omega = rhs(f)` and the interface moves with the normal
//! velocity `(1 / 2 pi) B(f)[omega]`.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line live in the `muskat` companion crate.
//!
//! Module map:
//!
//! * [`params`]: physical constants and the derived `a_mu`, `b_mu`, `Theta`, `c_rho_mu`.
//! * [`grid`], [`spectral`], [`fft`]: the periodic grid, Fourier multipliers, norms.
//! * [`kernels`]: the singular operators `B_{n,m}`, `A(f)`, `B(f)`, `A(f)*`.
//! * [`omega`]: right-hand sides and the sheet-strength solve.
//! * [`stability`]: Rayleigh-Taylor functional, frozen symbols, dispersion rates.
//! * [`evolution`]: adaptive explicit and IMEX time stepping.
//! * [`field`]: velocity and pressure off the interface, traces, Rellich residuals.
//! * [`profiles`]: initial-condition families used by tests and the CLI.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod evolution;
pub mod fft;
pub mod field;
pub mod grid;
pub mod kernels;
pub mod linalg;
mod math;
pub mod omega;
pub mod params;
pub mod profiles;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};
pub use evolution::{
    rhs_evolution, simulate, step, Diagnostics, Snapshot, StepControls, Stepper, Termination,
    Trajectory,
};
pub use field::{
    biot_savart, normal_trace, reconstruct_pressure, rellich_residual, trace_velocity,
    FieldSample, PressureOptions, Side,
};
pub use grid::{Grid, GridFunction};
pub use kernels::{
    apply_a, apply_a_star, apply_b, assemble_matrix, bnm_apply, KernelSpec, OperatorMatrix,
};
pub use omega::{
    omega_decomposition, rhs_no_tension, rhs_tension, solve_omega, SheetMethod, SolveMethod,
    VortexSheet,
};
pub use params::{DerivedConstants, FluidParams};
pub use spectral::{hilbert_transform, integrate, sobolev_norm, spectral_derivative};
pub use stability::{dispersion_rate, evaluate_rt, frozen_symbols, FrozenSymbols, RtReport};

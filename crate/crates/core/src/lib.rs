//! Non-Hermitian quantum annealing applied to unstructured (Grover) search.
//!
//! The N-dimensional search Hamiltonian `H0 + h(t) H1`, with
//! `H0 = -|m><m|` and `H1 = -|psi0><psi0|`, leaves the plane spanned by the
//! uniform state and the marked state invariant. Everything here works in
//! that plane:
//!
//! * [`model`] builds the annealing parameters, the effective 2x2 Hamiltonian,
//!   its spectrum and the avoided-crossing gap.
//! * [`schedule`] provides the linear and the arctan coupling profiles.
//! * [`propagate`] integrates the non-Hermitian Schroedinger equation and
//!   derives transition and survival probabilities.
//! * [`analytic`] evaluates the closed-form parabolic cylinder solution, the
//!   complex Gamma function, and the Landau-Zener limit.
//! * [`cli`] owns runs, figure reproduction, sweeps, scaling fits and the
//!   CSV/JSON formats used by the `nhqa` binary.

pub mod analytic;
pub mod cli;
mod error;
pub mod model;
pub mod propagate;
pub mod schedule;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use analytic::{
    asymptotic_ratio, complex_gamma, landau_zener_probability, nqa_time_estimate,
    parabolic_cylinder_d, weber_params, weber_solution, WeberParams, WeberSolution,
};
pub use model::{
    build_full_hamiltonian, effective_hamiltonian, make_params, min_gap_scan, spectrum,
    AnnealParams, EffectiveHamiltonian, Spectrum,
};
pub use propagate::{
    integrate, integrate_full, measurement_probability, survival_probability,
    transition_probability, IntegratorConfig, Picture, Trajectory,
};
pub use schedule::{Schedule, ScheduleKind};

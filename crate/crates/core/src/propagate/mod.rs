//! Time evolution under the non-Hermitian annealing Hamiltonian.
//!
//! The state is never renormalised during a run: the decay of the norm is
//! the survival probability, and every reported probability is a ratio.

mod dop853_tableau;
mod dopri;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::{self, AnnealParams, Spectrum, FULL_MATRIX_CAP};
use crate::schedule::Schedule;
use crate::{Error, Result};

use dopri::{StepControl, DECAY_FLOOR};

/// Largest N accepted by [`integrate_full`].
pub const FULL_INTEGRATION_CAP: u64 = 1 << 10;

/// Smallest relative tolerance the stepper can honour in double precision.
const MIN_REL_TOL: f64 = 1e-15;

/// Which amplitudes the stepper integrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Picture {
    /// `c0, c1` directly.
    Bare,
    /// `U_a = c_a exp(-(i/2) int eps dt)`; the common phase and the common
    /// decay are restored analytically at each output time.
    #[default]
    PhaseFactored,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// `None` means `tau / 1000`.
    pub max_step: Option<f64>,
    pub output_samples: usize,
    pub picture: Picture,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            abs_tol: 1e-12,
            max_step: None,
            output_samples: 2000,
            picture: Picture::PhaseFactored,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter(
                "rel_tol and abs_tol must be positive".into(),
            ));
        }
        if self.rel_tol < MIN_REL_TOL {
            return Err(Error::ToleranceUnachievable(format!(
                "rel_tol {:e} is below double-precision resolution ({MIN_REL_TOL:e})",
                self.rel_tol
            )));
        }
        if self.output_samples < 2 {
            return Err(Error::InvalidParameter(
                "output_samples must be at least 2".into(),
            ));
        }
        if let Some(h) = self.max_step {
            if h.is_nan() || h <= 0.0 {
                return Err(Error::InvalidParameter("max_step must be positive".into()));
            }
        }
        Ok(())
    }

    fn step_control(&self, tau: f64, check_decay: bool) -> StepControl {
        StepControl {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step.unwrap_or(tau / 1000.0),
            check_decay,
        }
    }
}

fn sample_times(tau: f64, samples: usize) -> Vec<f64> {
    let last = (samples - 1) as f64;
    (0..samples)
        .map(|i| {
            if i == samples - 1 {
                tau
            } else {
                tau * i as f64 / last
            }
        })
        .collect()
}

/// Sampled two-level evolution with derived observables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `(c0, c1)`: amplitudes on `|psi0>` and `|psi1>`.
    pub amplitudes: Vec<(Complex64, Complex64)>,
    pub transition_prob: Vec<f64>,
    pub survival_prob: Vec<f64>,
    /// Normalised population of the marked state itself.
    pub marked_prob: Vec<f64>,
    pub spectra: Vec<Spectrum>,
    pub params: AnnealParams,
    pub schedule: Schedule,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

impl Trajectory {
    pub fn scaled_times(&self) -> impl Iterator<Item = f64> + '_ {
        let tau = self.params.tau();
        self.times.iter().map(move |t| t / tau)
    }

    /// `P_tau(tau)`.
    pub fn final_transition(&self) -> f64 {
        *self.transition_prob.last().expect("trajectory has samples")
    }

    /// `P_s(tau)`.
    pub fn final_survival(&self) -> f64 {
        *self.survival_prob.last().expect("trajectory has samples")
    }

    pub fn final_marked(&self) -> f64 {
        *self.marked_prob.last().expect("trajectory has samples")
    }

    /// Least-squares rate `r` in `P_s(t) ~ exp(-r t)` over all samples.
    pub fn fitted_decay_rate(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .times
            .iter()
            .zip(&self.survival_prob)
            .filter(|(_, p)| **p > 0.0)
            .map(|(t, p)| (*t, p.ln()))
            .collect();
        let n = pts.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let ml = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|(t, l)| (t - mt) * (l - ml)).sum();
        let sxx: f64 = pts.iter().map(|(t, _)| (t - mt).powi(2)).sum();
        if sxx == 0.0 {
            0.0
        } else {
            -sxy / sxx
        }
    }
}

/// `|c1|^2 / (|c0|^2 + |c1|^2)`.
pub fn transition_probability(c0: Complex64, c1: Complex64) -> Result<f64> {
    // rescale so the squares neither overflow nor underflow
    let m = c0.norm().max(c1.norm());
    if m == 0.0 {
        return Err(Error::ZeroState);
    }
    if !m.is_finite() {
        return Err(Error::InvalidParameter("non-finite amplitude".into()));
    }
    let a = (c0 / m).norm_sqr();
    let b = (c1 / m).norm_sqr();
    Ok(b / (a + b))
}

/// Unnormalised trace `|c0|^2 + |c1|^2` of the pure-state density matrix.
pub fn survival_probability(c0: Complex64, c1: Complex64) -> f64 {
    c0.norm_sqr() + c1.norm_sqr()
}

/// `|<n|psi>|^2 / <psi|psi>` for a 0-based basis index `n`.
pub fn measurement_probability(state: &[Complex64], n: usize) -> Result<f64> {
    if n >= state.len() {
        return Err(Error::InvalidParameter(format!(
            "basis index {n} outside a state of dimension {}",
            state.len()
        )));
    }
    let scale = state.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    if scale == 0.0 {
        return Err(Error::ZeroState);
    }
    let norm: f64 = state.iter().map(|c| (c / scale).norm_sqr()).sum();
    Ok((state[n] / scale).norm_sqr() / norm)
}

/// Right-hand side `-i H y` on the internal ordering `y = (c1, c0)`.
fn bare_rhs(
    params: &AnnealParams,
    schedule: &Schedule,
) -> impl Fn(f64, &[Complex64], &mut [Complex64]) {
    let p = *params;
    let s = *schedule;
    move |t, y, dy| {
        let m = model::effective_hamiltonian(&p, s.coupling(t)).matrix;
        let hy0 = m[(0, 0)] * y[0] + m[(0, 1)] * y[1];
        let hy1 = m[(1, 0)] * y[0] + m[(1, 1)] * y[1];
        dy[0] = Complex64::new(hy0.im, -hy0.re);
        dy[1] = Complex64::new(hy1.im, -hy1.re);
    }
}

/// Same system with the identity part `-eps/2` removed.
fn factored_rhs(
    params: &AnnealParams,
    schedule: &Schedule,
) -> impl Fn(f64, &[Complex64], &mut [Complex64]) {
    let p = *params;
    let s = *schedule;
    let half_sin = 0.5 * p.sin_alpha();
    move |t, y, dy| {
        let half_dz = (s.coupling(t) - p.cos_alpha()) * 0.5;
        let hy0 = half_dz * y[0] + y[1] * half_sin;
        let hy1 = y[0] * half_sin - half_dz * y[1];
        dy[0] = Complex64::new(hy0.im, -hy0.re);
        dy[1] = Complex64::new(hy1.im, -hy1.re);
    }
}

/// Integrates `i dc/dt = H_ef(t) c` from `(c0, c1) = (1, 0)` over `[0, tau]`.
pub fn integrate(
    params: &AnnealParams,
    schedule: &Schedule,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    config.validate()?;
    if schedule.params() != params {
        return Err(Error::InvalidParameter(
            "schedule was built for different parameters".into(),
        ));
    }
    let tau = params.tau();
    let times = sample_times(tau, config.output_samples);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let y0 = [zero, one];

    let bare = || {
        dopri::solve(
            bare_rhs(params, schedule),
            &y0,
            &times,
            config.step_control(tau, true),
        )
    };
    let mut picture = config.picture;
    let (raw, stats) = match picture {
        Picture::Bare => bare()?,
        Picture::PhaseFactored => {
            match dopri::solve(
                factored_rhs(params, schedule),
                &y0,
                &times,
                config.step_control(tau, false),
            ) {
                // the factored amplitudes grow like the inverse of the common
                // decay and can overflow when the decay itself underflows
                Err(Error::StepUnderflow { .. }) if !params.is_hermitian() => {
                    picture = Picture::Bare;
                    bare()?
                }
                other => other?,
            }
        }
    };

    let mut amplitudes = Vec::with_capacity(times.len());
    for (&t, y) in times.iter().zip(&raw) {
        let (c1, c0) = match picture {
            Picture::Bare => (y[0], y[1]),
            Picture::PhaseFactored => {
                let factor = (Complex64::i() * 0.5 * schedule.phase_integral(t)).exp();
                (y[0] * factor, y[1] * factor)
            }
        };
        if c0.norm() < DECAY_FLOOR && c1.norm() < DECAY_FLOOR {
            return Err(Error::FullyDecayed { t });
        }
        amplitudes.push((c0, c1));
    }

    let mut transition_prob = Vec::with_capacity(times.len());
    let mut survival_prob = Vec::with_capacity(times.len());
    let mut marked_prob = Vec::with_capacity(times.len());
    for &(c0, c1) in &amplitudes {
        transition_prob.push(transition_probability(c0, c1)?);
        survival_prob.push(survival_probability(c0, c1));
        marked_prob.push(model::marked_state_probability(params, c0, c1)?);
    }
    let spectra = times
        .iter()
        .map(|&t| model::spectrum(params, schedule.coupling(t)))
        .collect();

    Ok(Trajectory {
        times,
        amplitudes,
        transition_prob,
        survival_prob,
        marked_prob,
        spectra,
        params: *params,
        schedule: *schedule,
        steps_accepted: stats.accepted,
        steps_rejected: stats.rejected,
    })
}

/// Evolution of the full N-level state, kept alongside its projection on
/// the `{|psi0>, |psi1>}` plane.
#[derive(Debug, Clone, PartialEq)]
pub struct FullTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    /// Projection `(c0, c1) = (<psi0|psi>, <psi1|psi>)`.
    pub reduced: Vec<(Complex64, Complex64)>,
    /// Norm of the component orthogonal to the plane.
    pub leakage: Vec<f64>,
    pub transition_prob: Vec<f64>,
    pub survival_prob: Vec<f64>,
    pub marked_index: usize,
}

impl FullTrajectory {
    pub fn final_transition(&self) -> f64 {
        *self.transition_prob.last().expect("trajectory has samples")
    }

    pub fn max_leakage(&self) -> f64 {
        self.leakage.iter().copied().fold(0.0, f64::max)
    }
}

/// Integrates the dense N-level equation from the uniform superposition.
/// `marked_index` is 1-based. The integration always runs in the bare
/// picture; `config.picture` is ignored here.
pub fn integrate_full(
    n_items: usize,
    marked_index: usize,
    schedule: &Schedule,
    config: &IntegratorConfig,
) -> Result<FullTrajectory> {
    config.validate()?;
    if n_items as u64 > FULL_INTEGRATION_CAP {
        return Err(Error::DeskScaleCap {
            n_items: n_items as u64,
            cap: FULL_INTEGRATION_CAP,
        });
    }
    const { assert!(FULL_INTEGRATION_CAP <= FULL_MATRIX_CAP) };
    let params = schedule.params();
    if params.n_items() != n_items as u64 {
        return Err(Error::InvalidParameter(format!(
            "schedule built for N = {}, asked to integrate N = {n_items}",
            params.n_items()
        )));
    }
    let zero = Complex64::new(0.0, 0.0);
    let h0 = model::build_full_hamiltonian(n_items, marked_index, zero)?;
    let h1 = model::build_full_hamiltonian(n_items, marked_index, Complex64::new(1.0, 0.0))? - &h0;
    let m = marked_index - 1;

    let amp = Complex64::new(1.0 / (n_items as f64).sqrt(), 0.0);
    let psi0 = vec![amp; n_items];
    let tau = params.tau();
    let times = sample_times(tau, config.output_samples);
    let sched = *schedule;

    let rhs = move |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let h = sched.coupling(t);
        for (i, d) in dy.iter_mut().enumerate() {
            let mut acc = zero;
            for j in 0..y.len() {
                acc += (h0[(i, j)] + h * h1[(i, j)]) * y[j];
            }
            *d = Complex64::new(acc.im, -acc.re);
        }
    };
    let (states, _) = dopri::solve(rhs, &psi0, &times, config.step_control(tau, true))?;

    let sin_half = params.sin_half_alpha();
    let cos_half = params.cos_half_alpha();
    let mut reduced = Vec::with_capacity(states.len());
    let mut leakage = Vec::with_capacity(states.len());
    let mut transition_prob = Vec::with_capacity(states.len());
    let mut survival_prob = Vec::with_capacity(states.len());
    for psi in &states {
        let c0: Complex64 = psi.iter().sum::<Complex64>() * amp.re;
        let c1 = (c0 * sin_half - psi[m]) / cos_half;
        // psi1 = (sin_half psi0 - e_m) / cos_half
        let mut rest = 0.0;
        for (i, v) in psi.iter().enumerate() {
            let mut in_plane = c0 * amp.re + c1 * (sin_half * amp.re / cos_half);
            if i == m {
                in_plane -= c1 / cos_half;
            }
            rest += (v - in_plane).norm_sqr();
        }
        leakage.push(rest.sqrt());
        transition_prob.push(transition_probability(c0, c1)?);
        survival_prob.push(psi.iter().map(|c| c.norm_sqr()).sum());
        reduced.push((c0, c1));
    }
    Ok(FullTrajectory {
        times,
        states,
        reduced,
        leakage,
        transition_prob,
        survival_prob,
        marked_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_params;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn transition_probability_values() {
        assert_eq!(
            transition_probability(c(1.0, 0.0), c(0.0, 0.0)).unwrap(),
            0.0
        );
        assert_eq!(
            transition_probability(c(0.0, 0.0), c(1.0, 0.0)).unwrap(),
            1.0
        );
        assert_eq!(
            transition_probability(c(1.0, 0.0), c(1.0, 0.0)).unwrap(),
            0.5
        );
        assert_eq!(
            transition_probability(c(0.0, 0.0), c(0.0, 0.0)),
            Err(Error::ZeroState)
        );
        let p = transition_probability(c(1e200, 0.0), c(0.0, 1e200)).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn survival_probability_values() {
        assert_eq!(survival_probability(c(1.0, 0.0), c(0.0, 0.0)), 1.0);
        assert!((survival_probability(c(0.6, 0.0), c(0.0, 0.8)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn measurement_probability_values() {
        let basis = [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        assert_eq!(measurement_probability(&basis, 1).unwrap(), 1.0);
        assert_eq!(measurement_probability(&basis, 0).unwrap(), 0.0);
        let scaled = [c(0.0, 0.0), c(2.0, 0.0)];
        assert_eq!(measurement_probability(&scaled, 1).unwrap(), 1.0);
        let even = [c(3.0, 0.0), c(0.0, 3.0)];
        assert!((measurement_probability(&even, 0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(
            measurement_probability(&[c(0.0, 0.0)], 0),
            Err(Error::ZeroState)
        );
        assert!(measurement_probability(&basis, 3).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = IntegratorConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.rel_tol = 1e-18;
        assert!(matches!(
            cfg.validate(),
            Err(Error::ToleranceUnachievable(_))
        ));
        cfg.rel_tol = 0.0;
        assert!(cfg.validate().is_err());
        let cfg = IntegratorConfig {
            output_samples: 1,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn initial_sample_is_uniform_state() {
        let p = make_params(2.0, 0.01, 20.0, 4).unwrap();
        let traj = integrate(&p, &Schedule::linear(p), &IntegratorConfig::default()).unwrap();
        assert_eq!(traj.amplitudes[0], (c(1.0, 0.0), c(0.0, 0.0)));
        assert_eq!(traj.survival_prob[0], 1.0);
        assert_eq!(traj.times.len(), 2000);
        assert_eq!(*traj.times.last().unwrap(), 20.0);
    }

    #[test]
    fn hermitian_run_preserves_norm() {
        let p = make_params(2.0, 0.0, 300.0, 8).unwrap();
        for picture in [Picture::Bare, Picture::PhaseFactored] {
            let cfg = IntegratorConfig {
                picture,
                ..Default::default()
            };
            let traj = integrate(&p, &Schedule::linear(p), &cfg).unwrap();
            for ps in &traj.survival_prob {
                assert!((ps - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn mismatched_schedule_rejected() {
        let p = make_params(2.0, 0.0, 30.0, 4).unwrap();
        let q = make_params(2.0, 0.0, 31.0, 4).unwrap();
        assert!(integrate(&p, &Schedule::linear(q), &IntegratorConfig::default()).is_err());
    }

    #[test]
    fn full_integration_cap() {
        let p = AnnealParams::with_items(2.0, 0.0, 1.0, 2048).unwrap();
        let r = integrate_full(2048, 1, &Schedule::linear(p), &IntegratorConfig::default());
        assert!(matches!(r, Err(Error::DeskScaleCap { .. })));
    }

    #[test]
    fn decay_rate_fit() {
        let p = make_params(2.0, 0.05, 100.0, 20).unwrap();
        let traj = integrate(&p, &Schedule::linear(p), &IntegratorConfig::default()).unwrap();
        // |c0|^2 decays with rate 2 Im h(t) while the population stays on psi0
        let rate = traj.fitted_decay_rate();
        assert!(rate > 0.0 && rate < 2.0 * 0.05);
    }
}

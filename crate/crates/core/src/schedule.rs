//! Time profiles of the complex coupling `h(t)` multiplying `H1`.
//!
//! * Linear: `h(t) = gamma (tau - t)` on `[0, tau]`, zero afterwards.
//! * Nonlinear arctan: `h(t) = h0 (1 - f(t))` with
//!   `f(t) = 1/2 + (delta/2) tan(beta (2t/tau - 1))`, `beta = arctan(1/delta)`.
//!   `f` solves `df/dt = (beta delta / tau) (1 + ((1 - 2f)/delta)^2)` with
//!   `f(0) = 0`, `f(tau) = 1`, so the sweep slows down around `f = 1/2`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::model::AnnealParams;
use crate::{Error, Result};

/// Beyond this `|2t/tau - 1|` the nonlinear profile switches to the
/// tangent-subtraction form, which keeps `f` and `1 - f` exact at the ends.
const ENDPOINT_SWITCH: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKind {
    Linear,
    #[serde(rename = "nonlinear")]
    NonlinearArctan,
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleKind::Linear => f.write_str("linear"),
            ScheduleKind::NonlinearArctan => f.write_str("nonlinear"),
        }
    }
}

impl FromStr for ScheduleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(ScheduleKind::Linear),
            "nonlinear" | "arctan" | "nonlinear-arctan" => Ok(ScheduleKind::NonlinearArctan),
            other => Err(Error::InvalidParameter(format!(
                "unknown schedule '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Schedule {
    kind: ScheduleKind,
    params: AnnealParams,
    beta: f64,
}

impl Schedule {
    pub fn linear(params: AnnealParams) -> Self {
        Self {
            kind: ScheduleKind::Linear,
            params,
            beta: f64::NAN,
        }
    }

    /// Requires `delta > 0`: at `delta = 0` the profile degenerates into a step.
    pub fn nonlinear(params: AnnealParams) -> Result<Self> {
        if params.delta() <= 0.0 {
            return Err(Error::InvalidParameter(
                "the arctan schedule needs delta > 0".into(),
            ));
        }
        Ok(Self {
            kind: ScheduleKind::NonlinearArctan,
            params,
            beta: (1.0 / params.delta()).atan(),
        })
    }

    pub fn new(kind: ScheduleKind, params: AnnealParams) -> Result<Self> {
        match kind {
            ScheduleKind::Linear => Ok(Self::linear(params)),
            ScheduleKind::NonlinearArctan => Self::nonlinear(params),
        }
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn params(&self) -> &AnnealParams {
        &self.params
    }

    /// `arctan(1/delta)`; NaN for the linear schedule.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Complex coupling `h(t)`. Times are clamped to `[0, tau]`, so the
    /// coupling is exactly zero for `t >= tau`.
    pub fn coupling(&self, t: f64) -> Complex64 {
        self.params.h0() * self.remaining_fraction(t)
    }

    /// Real factor `h(t) / h0`: `1 - t/tau` or `1 - f(t)`.
    pub fn remaining_fraction(&self, t: f64) -> f64 {
        let tau = self.params.tau();
        let t = t.clamp(0.0, tau);
        match self.kind {
            ScheduleKind::Linear => 1.0 - t / tau,
            ScheduleKind::NonlinearArctan => self.arctan_profile(t).1,
        }
    }

    /// `(f, 1 - f)` at a time already clamped to `[0, tau]`.
    fn arctan_profile(&self, t: f64) -> (f64, f64) {
        let delta = self.params.delta();
        let x = 2.0 * t / self.params.tau() - 1.0;
        if x.abs() <= ENDPOINT_SWITCH {
            let half = 0.5 * delta * (self.beta * x).tan();
            (0.5 + half, 0.5 - half)
        } else {
            // tan(beta - b) = (1/delta - u) / (1 + u/delta), u = tan(b)
            let u = (self.beta * (1.0 - x.abs())).tan();
            let near_end = u * (1.0 + delta * delta) / (2.0 * (delta + u));
            if x > 0.0 {
                (1.0 - near_end, near_end)
            } else {
                (near_end, 1.0 - near_end)
            }
        }
    }

    fn require_nonlinear(&self, what: &str) -> Result<()> {
        match self.kind {
            ScheduleKind::NonlinearArctan => Ok(()),
            ScheduleKind::Linear => Err(Error::Unsupported(format!(
                "{what} is defined only for the nonlinear schedule"
            ))),
        }
    }

    /// Profile `f(t)` of the arctan schedule on `[0, tau]`.
    pub fn profile_f(&self, t: f64) -> Result<f64> {
        self.require_nonlinear("profile_f")?;
        let tau = self.params.tau();
        if !(0.0..=tau).contains(&t) {
            return Err(Error::InvalidParameter(format!(
                "t = {t} outside [0, {tau}]"
            )));
        }
        Ok(self.arctan_profile(t).0)
    }

    /// Right-hand side `df/dt` of the profile equation at a given `f`.
    pub fn profile_rate(&self, f_value: f64) -> Result<f64> {
        self.require_nonlinear("profile_rate")?;
        let delta = self.params.delta();
        let r = (1.0 - 2.0 * f_value) / delta;
        Ok(self.beta * delta / self.params.tau() * (1.0 + r * r))
    }

    /// Inverse of [`Schedule::profile_f`]:
    /// `t(f) = tau/2 + (tau / 2 beta) arctan((2f - 1)/delta)`.
    pub fn time_for_profile(&self, f_value: f64) -> Result<f64> {
        self.require_nonlinear("time_for_profile")?;
        let tau = self.params.tau();
        let delta = self.params.delta();
        Ok(0.5 * tau + tau / (2.0 * self.beta) * ((2.0 * f_value - 1.0) / delta).atan())
    }

    /// `int_0^t h(s) ds`, in closed form for both kinds.
    pub fn coupling_integral(&self, t: f64) -> Complex64 {
        let tau = self.params.tau();
        let t = t.clamp(0.0, tau);
        let fraction = match self.kind {
            ScheduleKind::Linear => t - t * t / (2.0 * tau),
            ScheduleKind::NonlinearArctan => {
                // int_0^t tan(beta(2s/tau - 1)) ds = (tau/2beta) ln(cos beta / cos(beta x))
                let delta = self.params.delta();
                let x = 2.0 * t / tau - 1.0;
                let b = self.beta * (1.0 - x.abs());
                // cos beta / cos(beta |x|) with cos(beta - b) expanded
                let ratio = delta / (delta * b.cos() + b.sin());
                0.5 * t - 0.5 * delta * tau / (2.0 * self.beta) * ratio.ln()
            }
        };
        self.params.h0() * fraction
    }

    /// `int_0^t eps(s) ds` with `eps = h + 1`, valid for any `t >= 0`.
    pub fn phase_integral(&self, t: f64) -> Complex64 {
        self.coupling_integral(t) + t.max(0.0)
    }
}

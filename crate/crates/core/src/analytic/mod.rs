//! Closed-form solution of the linear sweep.
//!
//! With `c_a = U_a exp((i/2) int_0^t eps dt)` and the scaled variable
//! `z(t) = e^{i pi/4} (gamma (tau - t) - cos alpha) / sqrt(gamma)`, the
//! amplitudes obey Weber's equation with order `-i nu`,
//! `nu = sin^2(alpha) / (4 gamma)`:
//!
//! ```text
//! U0(z) = A D_{-i nu}(z) + B D_{-i nu}(-z)
//! U1(z) = sqrt(i nu) (B D_{-i nu - 1}(-z) - A D_{-i nu - 1}(z))
//! ```
//!
//! The constants follow from `U0(z0) = 1`, `U1(z0) = 0` and the Wronskian of
//! `D_p(z)`, `D_p(-z)`: `A = C D_{-i nu - 1}(-z0)`, `B = C D_{-i nu - 1}(z0)`
//! with `C = Gamma(1 + i nu) / sqrt(2 pi)`.

pub mod gamma;
pub mod pcf;

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::model::AnnealParams;
use crate::{Error, Result};

pub use gamma::complex_gamma;
pub use pcf::{parabolic_cylinder_d, parabolic_cylinder_d_with_derivative, Regime};

/// Below this `|z0|` the large-argument ratio is flagged as unreliable.
pub const ASYMPTOTIC_MIN_Z0: f64 = 5.0;

/// `e^{i pi / 4}`
fn eighth_turn() -> Complex64 {
    Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeberParams {
    pub nu: Complex64,
    pub z0: Complex64,
    pub z_tau: Complex64,
    pub a_const: Complex64,
    pub b_const: Complex64,
    /// `sqrt(i nu) = (sin alpha / 2) e^{i pi/4} / sqrt(gamma)`.
    pub coupling: Complex64,
    sqrt_gamma: Complex64,
    h0: Complex64,
    cos_alpha: f64,
    tau: f64,
}

impl WeberParams {
    /// `z(t)` for the linear schedule, `t` clamped to `[0, tau]`.
    pub fn z_at(&self, t: f64) -> Complex64 {
        let t = t.clamp(0.0, self.tau);
        let h = self.h0 * (1.0 - t / self.tau);
        eighth_turn() * (h - self.cos_alpha) / self.sqrt_gamma
    }

    fn order(&self) -> Complex64 {
        -Complex64::i() * self.nu
    }

    /// `(U0, U1)` at an arbitrary point `z` of the Weber plane.
    pub fn amplitudes_at(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let p = self.order();
        let d_plus = parabolic_cylinder_d(p, z)?;
        let d_minus = parabolic_cylinder_d(p, -z)?;
        let e_plus = parabolic_cylinder_d(p - 1.0, z)?;
        let e_minus = parabolic_cylinder_d(p - 1.0, -z)?;
        let u0 = self.a_const * d_plus + self.b_const * d_minus;
        let u1 = self.coupling * (self.b_const * e_minus - self.a_const * e_plus);
        Ok((u0, u1))
    }
}

/// Weber variables and integration constants for the linear schedule.
pub fn weber_params(params: &AnnealParams) -> Result<WeberParams> {
    let gamma = params.gamma();
    let sqrt_gamma = gamma.sqrt();
    let sin_a = params.sin_alpha();
    let cos_a = params.cos_alpha();
    let nu = sin_a * sin_a / (4.0 * gamma);
    if nu == Complex64::new(0.0, 0.0) || !(nu.re.is_finite() && nu.im.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "degenerate Weber order nu = {nu}"
        )));
    }
    let h0 = params.h0();
    let z0 = eighth_turn() * (h0 - cos_a) / sqrt_gamma;
    let z_tau = -eighth_turn() * cos_a / sqrt_gamma;
    let coupling = 0.5 * sin_a * eighth_turn() / sqrt_gamma;

    let p_minus_one = -Complex64::i() * nu - 1.0;
    let norm = complex_gamma(1.0 + Complex64::i() * nu)? / (2.0 * PI).sqrt();
    let a_const = norm * parabolic_cylinder_d(p_minus_one, -z0)?;
    let b_const = norm * parabolic_cylinder_d(p_minus_one, z0)?;

    Ok(WeberParams {
        nu,
        z0,
        z_tau,
        a_const,
        b_const,
        coupling,
        sqrt_gamma,
        h0,
        cos_alpha: cos_a,
        tau: params.tau(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeberSolution {
    pub u0: Complex64,
    pub u1: Complex64,
    pub z: Complex64,
}

impl WeberSolution {
    /// `1 / (1 + |U0|^2 / |U1|^2)`.
    pub fn transition_probability(&self) -> Result<f64> {
        crate::propagate::transition_probability(self.u0, self.u1)
    }
}

/// `(U0, U1)` at time `t` of the linear sweep.
pub fn weber_solution(wp: &WeberParams, t: f64, params: &AnnealParams) -> Result<WeberSolution> {
    let tau = params.tau();
    if !(0.0..=tau).contains(&t) {
        return Err(Error::InvalidParameter(format!(
            "t = {t} outside [0, {tau}]"
        )));
    }
    let z = wp.z_at(t);
    let (u0, u1) = wp.amplitudes_at(z)?;
    Ok(WeberSolution { u0, u1, z })
}

/// Physical amplitudes `(c0, c1)` at time `t`, restoring the factor
/// `exp((i/2) int_0^t eps dt)` with `int eps = t + h0 (t - t^2 / 2tau)`.
pub fn weber_amplitudes(
    wp: &WeberParams,
    t: f64,
    params: &AnnealParams,
) -> Result<(Complex64, Complex64)> {
    let sol = weber_solution(wp, t, params)?;
    let tau = params.tau();
    let phase = t + params.h0() * (t - t * t / (2.0 * tau));
    let factor = (Complex64::i() * 0.5 * phase).exp();
    Ok((sol.u0 * factor, sol.u1 * factor))
}

/// `P_tau(tau)` from the exact closed form.
pub fn weber_transition_probability(params: &AnnealParams) -> Result<f64> {
    let wp = weber_params(params)?;
    weber_solution(&wp, params.tau(), params)?.transition_probability()
}

/// Large-`|z0|` estimate of `U0(z_tau) / U1(z_tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticEstimate {
    pub ratio: Complex64,
    pub z0_magnitude: f64,
    /// Set when `|z0| < ASYMPTOTIC_MIN_Z0`, where the estimate is not
    /// trustworthy.
    pub regime_warning: bool,
}

impl AsymptoticEstimate {
    pub fn transition_probability(&self) -> f64 {
        1.0 / (1.0 + self.ratio.norm_sqr())
    }
}

/// `U0/U1 ~ -e^{-pi nu/2} e^{-z_tau^2/2} Gamma(1+i nu) /
/// (sqrt(2 pi nu i) (1 - e^{-z0^2/2} / (sqrt(2 pi) z0)))`.
pub fn asymptotic_ratio(wp: &WeberParams) -> Result<AsymptoticEstimate> {
    let nu = wp.nu;
    let i = Complex64::i();
    let sqrt_2pi = (2.0 * PI).sqrt();
    let num =
        -(-PI * nu / 2.0).exp() * (-wp.z_tau * wp.z_tau / 2.0).exp() * complex_gamma(1.0 + i * nu)?;
    let den =
        (2.0 * PI * nu * i).sqrt() * (1.0 - (-wp.z0 * wp.z0 / 2.0).exp() / (sqrt_2pi * wp.z0));
    let z0_magnitude = wp.z0.norm();
    Ok(AsymptoticEstimate {
        ratio: num / den,
        z0_magnitude,
        regime_warning: z0_magnitude < ASYMPTOTIC_MIN_Z0,
    })
}

/// `1 - exp(-2 pi nu)` with `nu = tau sin^2(alpha) / (4 g)`, i.e.
/// `tau / (g N)` up to the factor `1 - 1/N`. Hermitian runs only.
pub fn landau_zener_probability(params: &AnnealParams) -> Result<f64> {
    if !params.is_hermitian() {
        return Err(Error::InvalidParameter(
            "the Landau-Zener limit requires delta = 0".into(),
        ));
    }
    let s = params.sin_alpha();
    let nu = params.tau() * s * s / (4.0 * params.g());
    Ok(-(-2.0 * PI * nu).exp_m1())
}

/// Running time `(g^2 / delta) ln N` needed by the dissipative sweep.
pub fn nqa_time_estimate(params: &AnnealParams) -> Result<f64> {
    if params.is_hermitian() {
        return Err(Error::InvalidParameter(
            "the dissipative time estimate requires delta > 0".into(),
        ));
    }
    let g = params.g();
    Ok(g * g / params.delta() * (params.n_items() as f64).ln())
}

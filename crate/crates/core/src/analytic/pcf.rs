//! Parabolic cylinder functions `D_p(z)` for complex order and argument.
//!
//! Three evaluation routes, all returning `(D_p(z), D_p'(z))`:
//!
//! * Maclaurin series from the closed-form values at the origin, used for
//!   `|z| <= SERIES_RADIUS`.
//! * Taylor-series continuation of Weber's equation
//!   `w'' = (z^2/4 - p - 1/2) w` along a ray, anchored either on the series
//!   (marching outwards) or on the asymptotic expansion (marching inwards).
//! * The large-`|z|` expansion, including the `exp(+z^2/4)` contribution
//!   once `|arg z| > pi/2`.
//!
//! Inside `|arg z| < pi/4`, `D_p` is the recessive solution, so outward
//! marching would amplify round-off; there the continuation starts from the
//! asymptotic anchor and marches inwards instead.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use super::gamma::recip_gamma;
use crate::{Error, Result};

pub const SERIES_RADIUS: f64 = 4.0;
pub const ASYMPTOTIC_RADIUS: f64 = 40.0;
pub const MAX_ARGUMENT: f64 = 1e4;

const MAX_ANCHOR_RADIUS: f64 = 640.0;
const MAX_SERIES_TERMS: usize = 4000;
const MAX_TAYLOR_TERMS: usize = 400;
const MAX_ASYMPTOTIC_TERMS: usize = 200;
/// Largest tolerated ratio between the summed term magnitudes and the
/// result of the Maclaurin series.
const MAX_SERIES_CONDITION: f64 = 1e7;
const MIN_ANCHOR_RADIUS: f64 = 0.25;
/// Relative agreement required between two independently anchored marches.
const ANCHOR_AGREEMENT: f64 = 1e-7;
const ASYMPTOTIC_TOL: f64 = 1e-16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Series,
    Continuation,
    Asymptotic,
}

impl Regime {
    fn name(self) -> &'static str {
        match self {
            Regime::Series => "series",
            Regime::Continuation => "continuation",
            Regime::Asymptotic => "asymptotic",
        }
    }
}

fn unconverged(regime: Regime, order: Complex64, z: Complex64) -> Error {
    Error::Unconverged {
        regime: regime.name(),
        order: order.to_string(),
        z: z.to_string(),
    }
}

/// `D_order(z)` on the principal branch.
pub fn parabolic_cylinder_d(order: Complex64, z: Complex64) -> Result<Complex64> {
    parabolic_cylinder_d_with_derivative(order, z).map(|(d, _)| d)
}

/// `(D_order(z), D_order'(z))`, choosing the evaluation route from `|z|`
/// and `arg z`.
pub fn parabolic_cylinder_d_with_derivative(
    order: Complex64,
    z: Complex64,
) -> Result<(Complex64, Complex64)> {
    Ok(evaluate(order, z)?.0)
}

/// Like [`parabolic_cylinder_d_with_derivative`], also reporting the route.
pub fn evaluate(order: Complex64, z: Complex64) -> Result<((Complex64, Complex64), Regime)> {
    let r = z.norm();
    if !r.is_finite() || r > MAX_ARGUMENT {
        return Err(Error::InvalidParameter(format!(
            "|z| = {r} outside the supported range [0, {MAX_ARGUMENT}]"
        )));
    }
    if r <= SERIES_RADIUS {
        return match series(order, z) {
            Ok(v) => Ok((v, Regime::Series)),
            Err(e) => from_anchors(order, z, r / 2.0)
                .map(|v| (v, Regime::Continuation))
                .or(Err(e)),
        };
    }
    if r > ASYMPTOTIC_RADIUS {
        if let Ok(v) = asymptotic(order, z) {
            return Ok((v, Regime::Asymptotic));
        }
    }
    if z.arg().abs() < FRAC_PI_4 {
        let mut anchor = ASYMPTOTIC_RADIUS.max(r);
        while anchor <= MAX_ANCHOR_RADIUS {
            if let Ok(v) = continue_from_asymptotic(order, z, anchor) {
                return Ok((v, Regime::Continuation));
            }
            anchor *= 2.0;
        }
        Err(unconverged(Regime::Continuation, order, z))
    } else {
        from_anchors(order, z, SERIES_RADIUS).map(|v| (v, Regime::Continuation))
    }
}

/// Marches outwards from the first two series anchors that converge, at
/// radii `first, first/2, ...` on the ray of `z`, and accepts the result
/// only when both agree. Large orders make the series cancel at the outer
/// anchors, and can make `D` so subdominant along the march that rounding
/// errors swamp it.
fn from_anchors(order: Complex64, z: Complex64, first: f64) -> Result<(Complex64, Complex64)> {
    let mut found: Option<(Complex64, Complex64)> = None;
    let mut anchor = first;
    while anchor >= MIN_ANCHOR_RADIUS {
        if let Ok(v) = continue_from_series(order, z, anchor) {
            match found {
                None => found = Some(v),
                Some(w) => {
                    let scale = w.0.norm().max(v.0.norm());
                    if (w.0 - v.0).norm() <= ANCHOR_AGREEMENT * scale {
                        return Ok(w);
                    }
                    return Err(unconverged(Regime::Continuation, order, z));
                }
            }
        }
        anchor /= 2.0;
    }
    found.ok_or_else(|| unconverged(Regime::Continuation, order, z))
}

/// Maclaurin series, built from `D_p(0) = 2^(p/2) sqrt(pi) / Gamma((1-p)/2)`
/// and `D_p'(0) = -2^((p+1)/2) sqrt(pi) / Gamma(-p/2)`.
pub fn series(order: Complex64, z: Complex64) -> Result<(Complex64, Complex64)> {
    let sqrt_pi = PI.sqrt();
    let two = Complex64::new(2.0, 0.0);
    let d0 = two.powc(order / 2.0) * sqrt_pi * recip_gamma((1.0 - order) / 2.0);
    let d1 = -two.powc((order + 1.0) / 2.0) * sqrt_pi * recip_gamma(-order / 2.0);
    let q = -order - 0.5;

    // coefficients a_k with (k+2)(k+1) a_{k+2} = q a_k + a_{k-2}/4
    let mut a = [Complex64::new(0.0, 0.0); 4]; // a_{k-2}, a_{k-1}, a_k, a_{k+1}
    a[2] = d0;
    a[3] = d1;
    let mut zk = Complex64::new(1.0, 0.0); // z^k
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    let mut quiet = 0;
    for k in 0..MAX_SERIES_TERMS {
        let term = a[2] * zk;
        value += term;
        magnitude += term.norm();
        if k > 0 {
            deriv += a[2] * (k as f64) * (zk / z);
        }
        let kf = k as f64;
        let next = (q * a[2] + a[0] / 4.0) / ((kf + 1.0) * (kf + 2.0));
        a = [a[1], a[2], a[3], next];
        zk *= z;
        if term.norm() <= f64::EPSILON * 1e-3 * value.norm().max(f64::MIN_POSITIVE) && k > 8 {
            quiet += 1;
            if quiet >= 4 {
                if magnitude > MAX_SERIES_CONDITION * value.norm() {
                    return Err(unconverged(Regime::Series, order, z));
                }
                if z == Complex64::new(0.0, 0.0) {
                    return Ok((d0, d1));
                }
                return Ok((value, deriv));
            }
        } else {
            quiet = 0;
        }
        if z == Complex64::new(0.0, 0.0) {
            return Ok((d0, d1));
        }
    }
    Err(unconverged(Regime::Series, order, z))
}

/// Large-`|z|` expansion. Fails when the series does not reach
/// `ASYMPTOTIC_TOL` before its terms start to grow.
pub fn asymptotic(order: Complex64, z: Complex64) -> Result<(Complex64, Complex64)> {
    let p = order;
    let z2 = z * z;
    let lnz = z.ln();

    // exp(-z^2/4) z^p sum_s (-1)^s (-p)_{2s} / (s! (2z^2)^s)
    let (s, ds) = asymptotic_sum(z, |s| {
        let sf = s as f64;
        -(2.0 * sf - 2.0 - p) * (2.0 * sf - 1.0 - p) / (2.0 * sf * z2)
    })
    .ok_or_else(|| unconverged(Regime::Asymptotic, order, z))?;
    let main = (-z2 / 4.0 + p * lnz).exp();
    let mut value = main * s;
    let mut deriv = main * ((-z / 2.0 + p / z) * s + ds);

    let theta = z.arg();
    if theta.abs() > FRAC_PI_2 {
        // - sqrt(2 pi)/Gamma(-p) e^{+-i pi p} exp(z^2/4) z^{-p-1} sum (p+1)_{2s}/(s!(2z^2)^s)
        let (t, dt) = asymptotic_sum(z, |s| {
            let sf = s as f64;
            (p + 2.0 * sf - 1.0) * (p + 2.0 * sf) / (2.0 * sf * z2)
        })
        .ok_or_else(|| unconverged(Regime::Asymptotic, order, z))?;
        let sign = if theta > 0.0 { 1.0 } else { -1.0 };
        let stokes =
            -(2.0 * PI).sqrt() * recip_gamma(-p) * (Complex64::new(0.0, sign * PI) * p).exp();
        let extra = stokes * (z2 / 4.0 - (p + 1.0) * lnz).exp();
        value += extra * t;
        deriv += extra * ((z / 2.0 - (p + 1.0) / z) * t + dt);
    }
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(unconverged(Regime::Asymptotic, order, z));
    }
    Ok((value, deriv))
}

/// Sums `sum_s t_s` with `t_0 = 1`, `t_s = t_{s-1} ratio(s)`, together with
/// its z-derivative `sum_s t_s (-2s/z)`.
fn asymptotic_sum(
    z: Complex64,
    ratio: impl Fn(usize) -> Complex64,
) -> Option<(Complex64, Complex64)> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut dsum = Complex64::new(0.0, 0.0);
    for s in 1..MAX_ASYMPTOTIC_TERMS {
        let next = term * ratio(s);
        if next.norm() > term.norm() && term.norm() > ASYMPTOTIC_TOL * sum.norm() {
            return None;
        }
        term = next;
        sum += term;
        dsum += term * (-2.0 * s as f64) / z;
        if term.norm() <= ASYMPTOTIC_TOL * sum.norm() {
            return Some((sum, dsum));
        }
    }
    None
}

/// Continues the series value at radius `anchor_radius` (same ray as `z`)
/// outwards to `z`.
pub fn continue_from_series(
    order: Complex64,
    z: Complex64,
    anchor_radius: f64,
) -> Result<(Complex64, Complex64)> {
    let r = z.norm();
    if anchor_radius > SERIES_RADIUS || r == 0.0 {
        return Err(Error::InvalidParameter(format!(
            "series anchor radius {anchor_radius} must not exceed {SERIES_RADIUS}"
        )));
    }
    let start = z * (anchor_radius / r);
    let (w, dw) = series(order, start)?;
    march(order, start, w, dw, z)
}

/// Continues the asymptotic value at radius `anchor_radius` (same ray as
/// `z`) inwards to `z`.
pub fn continue_from_asymptotic(
    order: Complex64,
    z: Complex64,
    anchor_radius: f64,
) -> Result<(Complex64, Complex64)> {
    let r = z.norm();
    if r == 0.0 {
        return Err(Error::InvalidParameter("z = 0 has no ray".into()));
    }
    let start = z * (anchor_radius / r);
    let (w, dw) = asymptotic(order, start)?;
    march(order, start, w, dw, z)
}

/// Steps Weber's equation from `from` to `to` on a straight segment with
/// local Taylor expansions.
fn march(
    order: Complex64,
    from: Complex64,
    mut w: Complex64,
    mut dw: Complex64,
    to: Complex64,
) -> Result<(Complex64, Complex64)> {
    let q = -order - 0.5;
    let total = (to - from).norm();
    if total == 0.0 {
        return Ok((w, dw));
    }
    let dir = (to - from) / total;
    let mut travelled = 0.0;
    let mut c = from;
    while travelled < total {
        let kappa = (c * c / 4.0 + q).norm().sqrt();
        let len = (1.5 / (kappa + 0.5)).min(1.0).min(total - travelled);
        let step_end = if travelled + len >= total {
            to
        } else {
            c + dir * len
        };
        let zeta = step_end - c;
        let (nw, ndw) = taylor_step(q, c, w, dw, zeta)
            .ok_or_else(|| unconverged(Regime::Continuation, order, to))?;
        w = nw;
        dw = ndw;
        c = step_end;
        travelled += len;
    }
    Ok((w, dw))
}

/// One Taylor step of `w'' = (c^2/4 + q + (c/2) x + x^2/4) w`, `x = z - c`.
fn taylor_step(
    q: Complex64,
    c: Complex64,
    w: Complex64,
    dw: Complex64,
    zeta: Complex64,
) -> Option<(Complex64, Complex64)> {
    let a = c * c / 4.0 + q;
    let b = c / 2.0;
    let z2 = zeta * zeta;
    let z3 = z2 * zeta;
    let z4 = z2 * z2;
    // d_k = b_k zeta^k
    let mut d = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        w,
        dw * zeta,
    ];
    let mut value = d[2] + d[3];
    let mut slope = d[3];
    let scale = w.norm() + (dw * zeta).norm();
    let mut quiet = 0;
    for k in 0..MAX_TAYLOR_TERMS {
        let kf = k as f64;
        let next = (a * z2 * d[2] + b * z3 * d[1] + z4 / 4.0 * d[0]) / ((kf + 1.0) * (kf + 2.0));
        value += next;
        slope += next * (kf + 2.0);
        d = [d[1], d[2], d[3], next];
        if next.norm() <= 1e-18 * scale.max(value.norm()) {
            quiet += 1;
            if quiet >= 3 {
                return Some((value, slope / zeta));
            }
        } else {
            quiet = 0;
        }
    }
    None
}

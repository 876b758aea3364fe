//! Dormand-Prince 8(5,3) stepper for complex linear systems.
//!
//! Output times are hit exactly by shortening the step that would cross
//! them, so no interpolant is involved in the reported samples.

use num_complex::Complex64;

use super::dop853_tableau::{A, B, C, E3, E5, STAGES};
use crate::{Error, Result};

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;

/// Amplitudes below this on every component count as a fully decayed state.
pub(crate) const DECAY_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy)]
pub(crate) struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Abort with [`Error::FullyDecayed`] when every component drops below
    /// [`DECAY_FLOOR`].
    pub check_decay: bool,
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates `dy/dt = rhs(t, y)` and returns the state at every time in
/// `outputs` (which must be increasing; `outputs[0]` is the initial time).
pub(crate) fn solve<F>(
    mut rhs: F,
    y0: &[Complex64],
    outputs: &[f64],
    ctl: StepControl,
) -> Result<(Vec<Vec<Complex64>>, StepStats)>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y0.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut k = vec![vec![zero; n]; STAGES + 1];
    let mut tmp = vec![zero; n];
    let mut y_new = vec![zero; n];
    let mut y = y0.to_vec();
    let mut stats = StepStats::default();

    let Some(&t_start) = outputs.first() else {
        return Ok((Vec::new(), stats));
    };
    let mut t = t_start;
    let mut samples = Vec::with_capacity(outputs.len());
    samples.push(y.clone());

    rhs(t, &y, &mut k[0]);
    let span = outputs.last().copied().unwrap_or(t_start) - t_start;
    let mut h_nom = ctl.max_step.min(1e-3 * span.max(1.0)).max(1e-8);

    for &target in &outputs[1..] {
        while t < target {
            let remaining = target - t;
            let truncated = h_nom >= remaining;
            let h = if truncated { remaining } else { h_nom };

            if h < 16.0 * f64::EPSILON * t.abs().max(1.0) && !truncated {
                return Err(Error::StepUnderflow { t });
            }

            for s in 1..STAGES {
                combine(&y, &k[..s], &mut tmp, h, &A[s][..s]);
                rhs(t + C[s] * h, &tmp, &mut k[s]);
            }
            combine(&y, &k[..STAGES], &mut y_new, h, &B);
            let t_next = if truncated { target } else { t + h };
            rhs(t_next, &y_new, &mut k[STAGES]);

            let mut err5 = 0.0;
            let mut err3 = 0.0;
            for i in 0..n {
                let scale = ctl.abs_tol + ctl.rel_tol * y[i].norm().max(y_new[i].norm());
                let mut e5 = Complex64::new(0.0, 0.0);
                let mut e3 = Complex64::new(0.0, 0.0);
                for (s, ks) in k.iter().enumerate() {
                    e5 += ks[i] * E5[s];
                    e3 += ks[i] * E3[s];
                }
                err5 += (e5.norm() / scale).powi(2);
                err3 += (e3.norm() / scale).powi(2);
            }
            let err = if err5 == 0.0 && err3 == 0.0 {
                0.0
            } else {
                h * err5 / ((err5 + 0.01 * err3) * n as f64).sqrt()
            };

            if !err.is_finite() {
                stats.rejected += 1;
                h_nom = h * MIN_FACTOR;
                continue;
            }

            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(ERROR_EXPONENT)).clamp(MIN_FACTOR, MAX_FACTOR)
            };

            if err <= 1.0 {
                stats.accepted += 1;
                t = t_next;
                std::mem::swap(&mut y, &mut y_new);
                k.swap(0, STAGES);
                let proposal = (h * factor).min(ctl.max_step);
                h_nom = if truncated {
                    h_nom.max(proposal)
                } else {
                    proposal
                };
                if ctl.check_decay && y.iter().all(|c| c.norm() < DECAY_FLOOR) {
                    return Err(Error::FullyDecayed { t });
                }
            } else {
                stats.rejected += 1;
                h_nom = h * factor.min(1.0);
                if h_nom < 16.0 * f64::EPSILON * t.abs().max(1.0) {
                    return Err(Error::StepUnderflow { t });
                }
            }
        }
        samples.push(y.clone());
    }
    Ok((samples, stats))
}

/// `out = y + h * sum_j a[j] k[j]`
fn combine(y: &[Complex64], k: &[Vec<Complex64>], out: &mut [Complex64], h: f64, a: &[f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (kj, &aj) in k.iter().zip(a) {
            if aj != 0.0 {
                acc += kj[i] * aj;
            }
        }
        *o = y[i] + acc * h;
    }
}

//! Annealing configuration, Hamiltonians and their spectra.
//!
//! The effective Hamiltonian acts on the plane spanned by `|psi1>` and
//! `|psi0>`, stored in that order: `|psi1> = (1, 0)`, `|psi0> = (0, 1)`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::Serialize;

use crate::schedule::Schedule;
use crate::{Error, Result};

/// Largest database size for which a dense N x N Hamiltonian is built.
pub const FULL_MATRIX_CAP: u64 = 1 << 12;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Physical run configuration: gain `g`, dissipation `delta`, anneal time
/// `tau` and database size `N`, plus the derived mixing angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnnealParams {
    g: f64,
    delta: f64,
    tau: f64,
    n_items: u64,
    log2_n: Option<u32>,
    alpha: f64,
    sin_alpha: f64,
    cos_alpha: f64,
}

/// Builds parameters for a database of `N = 2^log2_n` items.
pub fn make_params(g: f64, delta: f64, tau: f64, log2_n: u32) -> Result<AnnealParams> {
    if log2_n < 1 {
        return Err(Error::InvalidParameter(format!(
            "log2_n must be at least 1, got {log2_n}"
        )));
    }
    if log2_n > 62 {
        return Err(Error::InvalidParameter(format!(
            "log2_n must be at most 62, got {log2_n}"
        )));
    }
    let mut p = AnnealParams::with_items(g, delta, tau, 1u64 << log2_n)?;
    p.log2_n = Some(log2_n);
    Ok(p)
}

impl AnnealParams {
    /// Builds parameters for an arbitrary database size `n_items >= 2`.
    pub fn with_items(g: f64, delta: f64, tau: f64, n_items: u64) -> Result<Self> {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "g must be positive, got {g}"
            )));
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must be non-negative, got {delta}"
            )));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive, got {tau}"
            )));
        }
        if n_items < 2 {
            return Err(Error::InvalidParameter(format!(
                "N must be at least 2, got {n_items}"
            )));
        }
        let n = n_items as f64;
        // sin(alpha/2) = 1/sqrt(N); keep sin/cos alpha free of cancellation.
        let sin_half = 1.0 / n.sqrt();
        let cos_half = (1.0 - 1.0 / n).sqrt();
        let log2_n = if n_items.is_power_of_two() {
            Some(n_items.trailing_zeros())
        } else {
            None
        };
        Ok(Self {
            g,
            delta,
            tau,
            n_items,
            log2_n,
            alpha: 2.0 * sin_half.asin(),
            sin_alpha: 2.0 * sin_half * cos_half,
            cos_alpha: 1.0 - 2.0 / n,
        })
    }

    /// Same run with a different `tau`.
    pub fn with_tau(&self, tau: f64) -> Result<Self> {
        let mut p = Self::with_items(self.g, self.delta, tau, self.n_items)?;
        p.log2_n = self.log2_n;
        Ok(p)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn n_items(&self) -> u64 {
        self.n_items
    }

    pub fn log2_n(&self) -> Option<u32> {
        self.log2_n
    }

    /// Mixing angle with `sin(alpha/2) = 1/sqrt(N)`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sin_alpha(&self) -> f64 {
        self.sin_alpha
    }

    pub fn cos_alpha(&self) -> f64 {
        self.cos_alpha
    }

    pub fn sin_half_alpha(&self) -> f64 {
        1.0 / (self.n_items as f64).sqrt()
    }

    pub fn cos_half_alpha(&self) -> f64 {
        (1.0 - 1.0 / self.n_items as f64).sqrt()
    }

    /// Complex coupling amplitude `h0 = g + i delta`.
    pub fn h0(&self) -> Complex64 {
        Complex64::new(self.g, self.delta)
    }

    /// Sweep rate `gamma = (g + i delta) / tau`.
    pub fn gamma(&self) -> Complex64 {
        self.h0() / self.tau
    }

    pub fn is_hermitian(&self) -> bool {
        self.delta == 0.0
    }
}

/// The 2x2 non-Hermitian Hamiltonian `-(eps/2) I + (1/2) Omega . sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveHamiltonian {
    pub epsilon: Complex64,
    pub omega_vec: [Complex64; 3],
    pub matrix: Matrix2<Complex64>,
}

impl EffectiveHamiltonian {
    pub fn trace(&self) -> Complex64 {
        self.matrix[(0, 0)] + self.matrix[(1, 1)]
    }

    pub fn determinant(&self) -> Complex64 {
        self.matrix[(0, 0)] * self.matrix[(1, 1)] - self.matrix[(0, 1)] * self.matrix[(1, 0)]
    }
}

pub fn effective_hamiltonian(params: &AnnealParams, h: Complex64) -> EffectiveHamiltonian {
    let epsilon = h + 1.0;
    let sin_a = Complex64::from(params.sin_alpha);
    let dz = h - params.cos_alpha;
    let diag = -epsilon / 2.0;
    let matrix = Matrix2::new(diag + dz / 2.0, sin_a / 2.0, sin_a / 2.0, diag - dz / 2.0);
    EffectiveHamiltonian {
        epsilon,
        omega_vec: [sin_a, C0, dz],
        matrix,
    }
}

/// Instantaneous ground/excited pair of the effective Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spectrum {
    pub e0: Complex64,
    pub e1: Complex64,
    pub omega: Complex64,
    pub gap_magnitude: f64,
}

/// `Omega = sqrt(h^2 - 2 h cos(alpha) + 1)`, evaluated as
/// `sqrt((h - cos alpha)^2 + sin^2 alpha)`, on the branch with `Re >= 0`
/// (ties resolved towards `Im >= 0`).
pub fn omega(params: &AnnealParams, h: Complex64) -> Complex64 {
    let dz = h - params.cos_alpha;
    let s = params.sin_alpha;
    let w = (dz * dz + s * s).sqrt();
    if w.re == 0.0 && w.im < 0.0 {
        -w
    } else {
        w
    }
}

pub fn spectrum(params: &AnnealParams, h: Complex64) -> Spectrum {
    let om = omega(params, h);
    let half_eps = (h + 1.0) / 2.0;
    Spectrum {
        e0: -half_eps - om / 2.0,
        e1: -half_eps + om / 2.0,
        omega: om,
        gap_magnitude: om.norm(),
    }
}

/// Locates the minimum of `|Omega(h(t))|` on `[0, tau]`: a coarse scan over
/// `samples` equispaced times followed by golden-section refinement between
/// the neighbours of the best sample. Returns `(t_star, gap_min)`.
pub fn min_gap_scan(
    params: &AnnealParams,
    schedule: &Schedule,
    samples: usize,
) -> Result<(f64, f64)> {
    if samples < 100 {
        return Err(Error::InvalidParameter(format!(
            "min_gap_scan needs at least 100 samples, got {samples}"
        )));
    }
    let tau = params.tau;
    let gap = |t: f64| omega(params, schedule.coupling(t)).norm();
    let dt = tau / (samples - 1) as f64;

    let (best, _) =
        (0..samples)
            .map(|i| (i, gap(i as f64 * dt)))
            .fold(
                (0, f64::INFINITY),
                |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
            );

    let lo = best.saturating_sub(1) as f64 * dt;
    let hi = ((best + 1).min(samples - 1) as f64 * dt).min(tau);
    let t_star = golden_section(gap, lo, hi);
    let (t_star, gap_min) = [
        (t_star, gap(t_star)),
        (best as f64 * dt, gap(best as f64 * dt)),
    ]
    .into_iter()
    .fold(
        (f64::NAN, f64::INFINITY),
        |acc, c| if c.1 < acc.1 { c } else { acc },
    );
    Ok((t_star, gap_min))
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= f64::EPSILON * (a.abs() + b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Dense `H0 + h H1` on the full N-dimensional space, with
/// `H0 = -|m><m|` (`marked_index` is 1-based) and `H1 = -(1/N) J`.
pub fn build_full_hamiltonian(
    n_items: usize,
    marked_index: usize,
    h: Complex64,
) -> Result<DMatrix<Complex64>> {
    if n_items < 2 {
        return Err(Error::InvalidParameter(format!(
            "N must be at least 2, got {n_items}"
        )));
    }
    if n_items as u64 > FULL_MATRIX_CAP {
        return Err(Error::DeskScaleCap {
            n_items: n_items as u64,
            cap: FULL_MATRIX_CAP,
        });
    }
    if marked_index < 1 || marked_index > n_items {
        return Err(Error::InvalidParameter(format!(
            "marked index {marked_index} outside 1..={n_items}"
        )));
    }
    let fill = -h / n_items as f64;
    let mut m = DMatrix::from_element(n_items, n_items, fill);
    m[(marked_index - 1, marked_index - 1)] -= 1.0;
    Ok(m)
}

/// Probability of the marked state `|m> = sin(a/2)|psi0> - cos(a/2)|psi1>`
/// for the two-level amplitudes `(c0, c1)`, normalised by the state norm.
pub fn marked_state_probability(
    params: &AnnealParams,
    c0: Complex64,
    c1: Complex64,
) -> Result<f64> {
    let norm = c0.norm_sqr() + c1.norm_sqr();
    if norm == 0.0 {
        return Err(Error::ZeroState);
    }
    let overlap = c0 * params.sin_half_alpha() - c1 * params.cos_half_alpha();
    Ok(overlap.norm_sqr() / norm)
}

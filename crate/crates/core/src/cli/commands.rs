//! The work behind each subcommand, free of any terminal or file handling.

use std::f64::consts::PI;
use std::fmt::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use super::output::{field, num};
use super::CliError;
use crate::analytic::{
    asymptotic_ratio, landau_zener_probability, nqa_time_estimate, weber_params,
    weber_transition_probability,
};
use crate::model::min_gap_scan;
use crate::propagate::{integrate, IntegratorConfig, Trajectory};
use crate::schedule::ScheduleKind;
use crate::Error;

/// Samples used by the coarse stage of the gap-minimum search.
const GAP_SCAN_SAMPLES: usize = 4000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub config: RunConfig,
    pub n_items: u64,
    pub p_tau: f64,
    pub p_surv: f64,
    /// Normalised population of the marked state at `t = tau`.
    pub p_marked: f64,
    pub min_gap: f64,
    pub t_min_gap: f64,
    /// Weber order `nu` (linear schedule only).
    pub nu: Option<Complex64>,
    /// `1 - exp(-2 pi nu)` (Hermitian runs only).
    pub landau_zener: Option<f64>,
    /// `(g^2 / delta) ln N` (dissipative runs only).
    pub nqa_time_estimate: Option<f64>,
    pub fitted_decay_rate: f64,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

pub struct RunOutput {
    pub trajectory: Trajectory,
    pub summary: RunSummary,
}

pub fn run(config: &RunConfig) -> Result<RunOutput, CliError> {
    config.validate()?;
    let params = config.anneal_params()?;
    let schedule = config.schedule()?;
    let trajectory = integrate(&params, &schedule, &config.integrator)?;
    let (t_min_gap, min_gap) = min_gap_scan(&params, &schedule, GAP_SCAN_SAMPLES)?;
    let nu = match schedule.kind() {
        ScheduleKind::Linear => weber_params(&params).ok().map(|w| w.nu),
        ScheduleKind::NonlinearArctan => None,
    };
    let summary = RunSummary {
        config: config.materialized(),
        n_items: params.n_items(),
        p_tau: trajectory.final_transition(),
        p_surv: trajectory.final_survival(),
        p_marked: trajectory.final_marked(),
        min_gap,
        t_min_gap,
        nu,
        landau_zener: (schedule.kind() == ScheduleKind::Linear)
            .then(|| landau_zener_probability(&params).ok())
            .flatten(),
        nqa_time_estimate: nqa_time_estimate(&params).ok(),
        fitted_decay_rate: trajectory.fitted_decay_rate(),
        steps_accepted: trajectory.steps_accepted,
        steps_rejected: trajectory.steps_rejected,
    };
    Ok(RunOutput {
        trajectory,
        summary,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigureId {
    Fig1Left,
    Fig1Right,
    Fig2,
    Fig3,
}

impl FigureId {
    pub const ALL: [FigureId; 4] = [
        FigureId::Fig1Left,
        FigureId::Fig1Right,
        FigureId::Fig2,
        FigureId::Fig3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1Left => "fig1_left",
            FigureId::Fig1Right => "fig1_right",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
        }
    }

    /// The captioned parameter set, on top of `base` integrator settings.
    pub fn config(self, base: &RunConfig) -> RunConfig {
        let mut cfg = base.clone();
        let (kind, delta, tau) = match self {
            FigureId::Fig1Left => (ScheduleKind::Linear, 0.0, 1.5e4),
            FigureId::Fig1Right => (ScheduleKind::Linear, 0.0025, 1.5e4),
            FigureId::Fig2 => (ScheduleKind::NonlinearArctan, 1e-4, 5e4),
            FigureId::Fig3 => (ScheduleKind::NonlinearArctan, 7.5e-5, 5.5e4),
        };
        cfg.schedule_kind = kind;
        cfg.params.g = 2.0;
        cfg.params.delta = delta;
        cfg.params.tau = tau;
        cfg.params.log2n = 40;
        cfg
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown figure '{s}' (expected fig1_left, fig1_right, fig2 or fig3)"
                ))
            })
    }
}

pub fn figure(id: FigureId, base: &RunConfig) -> Result<RunOutput, CliError> {
    run(&id.config(base))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    G,
    Delta,
    Tau,
    Log2n,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::G => "g",
            SweepAxis::Delta => "delta",
            SweepAxis::Tau => "tau",
            SweepAxis::Log2n => "log2n",
        }
    }

    fn apply(self, cfg: &mut RunConfig, value: f64) -> Result<(), Error> {
        match self {
            SweepAxis::G => cfg.params.g = value,
            SweepAxis::Delta => cfg.params.delta = value,
            SweepAxis::Tau => cfg.params.tau = value,
            SweepAxis::Log2n => {
                if value.fract() != 0.0 || !(1.0..=62.0).contains(&value) {
                    return Err(Error::InvalidParameter(format!(
                        "log2n must be an integer in [1, 62], got {value}"
                    )));
                }
                cfg.params.log2n = value as u32;
            }
        }
        Ok(())
    }
}

impl FromStr for SweepAxis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "g" => Ok(SweepAxis::G),
            "delta" => Ok(SweepAxis::Delta),
            "tau" => Ok(SweepAxis::Tau),
            "log2n" => Ok(SweepAxis::Log2n),
            _ => Err(CliError::Usage(format!(
                "unknown axis '{s}' (expected g, delta, tau or log2n)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub p_tau: Option<f64>,
    pub p_surv: Option<f64>,
    pub min_gap: Option<f64>,
    pub error: Option<String>,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// One row per grid point. The trailing wall-time column is the only
    /// one that varies between identical runs; `with_wall_time = false`
    /// drops it.
    pub fn to_csv(&self, with_wall_time: bool) -> String {
        let mut out = format!("{},p_tau,p_surv,min_gap,error", self.axis.name());
        if with_wall_time {
            out.push_str(",wall_time_s");
        }
        out.push('\n');
        let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
        for r in &self.rows {
            let _ = write!(
                out,
                "{},{},{},{},{}",
                num(r.value),
                opt(r.p_tau),
                opt(r.p_surv),
                opt(r.min_gap),
                field(r.error.as_deref().unwrap_or(""))
            );
            if with_wall_time {
                let _ = write!(out, ",{}", num(r.wall_time_s));
            }
            out.push('\n');
        }
        out
    }
}

fn thread_pool(parallelism: usize) -> Result<rayon::ThreadPool, CliError> {
    if parallelism == 0 {
        return Err(CliError::Usage("parallelism must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker threads: {e}")))
}

/// Runs `base` once per grid value of `axis`. Failures are recorded in the
/// row; rows come back in grid order for any `parallelism`.
pub fn sweep(
    base: &RunConfig,
    axis: SweepAxis,
    grid: &[f64],
    parallelism: usize,
) -> Result<SweepResult, CliError> {
    if grid.is_empty() {
        return Err(CliError::Usage("sweep grid is empty".into()));
    }
    for &value in grid {
        let mut cfg = base.clone();
        axis.apply(&mut cfg, value)?;
        cfg.anneal_params()?;
        cfg.schedule()?;
    }
    let pool = thread_pool(parallelism)?;
    let rows = pool.install(|| {
        grid.par_iter()
            .map(|&value| sweep_point(base, axis, value))
            .collect()
    });
    Ok(SweepResult { axis, rows })
}

fn sweep_point(base: &RunConfig, axis: SweepAxis, value: f64) -> SweepRow {
    let start = Instant::now();
    let outcome = (|| {
        let mut cfg = base.clone();
        axis.apply(&mut cfg, value)?;
        let params = cfg.anneal_params().map_err(CliError::into_error)?;
        let schedule = cfg.schedule().map_err(CliError::into_error)?;
        let traj = integrate(&params, &schedule, &cfg.integrator)?;
        let (_, gap) = min_gap_scan(&params, &schedule, GAP_SCAN_SAMPLES)?;
        Ok::<_, Error>((traj.final_transition(), traj.final_survival(), gap))
    })();
    let wall_time_s = start.elapsed().as_secs_f64();
    match outcome {
        Ok((p_tau, p_surv, gap)) => SweepRow {
            value,
            p_tau: Some(p_tau),
            p_surv: Some(p_surv),
            min_gap: Some(gap),
            error: None,
            wall_time_s,
        },
        Err(e) => SweepRow {
            value,
            p_tau: None,
            p_surv: None,
            min_gap: None,
            error: Some(e.to_string()),
            wall_time_s,
        },
    }
}

/// Ordinary least-squares line `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(points: &[(f64, f64)]) -> Option<LinearFit> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Regressor used by the scaling fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingRegressor {
    /// `ln N`, for dissipative runs.
    LnN,
    /// `N`, for Hermitian runs.
    N,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub log2n: u32,
    pub tau_star: Option<f64>,
    pub p_at_tau_star: Option<f64>,
    /// Closed-form time for comparison: the Landau-Zener time reaching
    /// `target_p` when `delta = 0`, otherwise `(g^2 / delta) ln N`.
    pub reference_time: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub config: RunConfig,
    pub target_p: f64,
    pub regressor: ScalingRegressor,
    pub rows: Vec<ScalingRow>,
    pub fit: Option<LinearFit>,
}

impl ScalingReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("log2n,n_items,tau_star,p_at_tau_star,reference_time,error\n");
        let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.log2n,
                1u64 << r.log2n,
                opt(r.tau_star),
                opt(r.p_at_tau_star),
                num(r.reference_time),
                field(r.error.as_deref().unwrap_or(""))
            );
        }
        out
    }
}

/// Relative width at which the bisection on `tau` stops.
const BISECTION_REL_WIDTH: f64 = 1e-6;
/// Ratio between consecutive `tau` values of the bracketing scan.
const SCAN_RATIO: f64 = 1.01;
/// The scan covers `[SCAN_LOW, SCAN_HIGH] * reference_time`.
const SCAN_LOW: f64 = 1e-2;
const SCAN_HIGH: f64 = 1e2;

/// For each `N = 2^log2n`, the shortest `tau` with `P_tau(tau) >= target_p`,
/// then a line through `tau*` against `ln N` (dissipative) or `N`
/// (Hermitian).
///
/// `P_tau(tau)` need not be monotone in `tau`, so the first crossing is
/// bracketed by a geometric scan upwards from a small multiple of the
/// closed-form time before bisecting.
pub fn scaling(
    base: &RunConfig,
    log2n_grid: &[u32],
    target_p: f64,
    parallelism: usize,
) -> Result<ScalingReport, CliError> {
    if log2n_grid.len() < 4 {
        return Err(CliError::Usage(format!(
            "scaling needs at least 4 grid points, got {}",
            log2n_grid.len()
        )));
    }
    if !(target_p > 0.0 && target_p < 1.0) {
        return Err(CliError::Usage(format!(
            "target probability must lie in (0, 1), got {target_p}"
        )));
    }
    if let Some(bad) = log2n_grid.iter().find(|&&k| !(1..=62).contains(&k)) {
        return Err(CliError::Usage(format!(
            "log2n grid values must lie in [1, 62], got {bad}"
        )));
    }
    base.integrator.validate()?;
    let hermitian = base.params.delta == 0.0;
    let pool = thread_pool(parallelism)?;
    let rows: Vec<ScalingRow> = pool.install(|| {
        log2n_grid
            .par_iter()
            .map(|&log2n| scaling_point(base, log2n, target_p))
            .collect()
    });
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| {
            let n = (1u64 << r.log2n) as f64;
            let x = if hermitian { n } else { n.ln() };
            r.tau_star.map(|t| (x, t))
        })
        .collect();
    Ok(ScalingReport {
        config: base.materialized(),
        target_p,
        regressor: if hermitian {
            ScalingRegressor::N
        } else {
            ScalingRegressor::LnN
        },
        fit: linear_fit(&points),
        rows,
    })
}

fn scaling_point(base: &RunConfig, log2n: u32, target_p: f64) -> ScalingRow {
    let mut cfg = base.clone();
    cfg.params.log2n = log2n;
    let g = cfg.params.g;
    let delta = cfg.params.delta;
    let n = (1u64 << log2n) as f64;
    let reference_time = if delta == 0.0 {
        let sin2 = 4.0 / n * (1.0 - 1.0 / n);
        let nu = -(1.0 - target_p).ln() / (2.0 * PI);
        4.0 * g * nu / sin2
    } else {
        g * g / delta * n.ln()
    };
    let mut row = ScalingRow {
        log2n,
        tau_star: None,
        p_at_tau_star: None,
        reference_time,
        error: None,
    };
    let integ = IntegratorConfig {
        output_samples: 2,
        ..cfg.integrator
    };
    let p_of = |tau: f64| -> Result<f64, Error> {
        let mut c = cfg.clone();
        c.params.tau = tau;
        let params = c.anneal_params().map_err(CliError::into_error)?;
        let schedule = c.schedule().map_err(CliError::into_error)?;
        Ok(integrate(&params, &schedule, &integ)?.final_transition())
    };
    match first_crossing(p_of, reference_time, target_p) {
        Ok((tau, p)) => {
            row.tau_star = Some(tau);
            row.p_at_tau_star = Some(p);
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

fn first_crossing(
    p_of: impl Fn(f64) -> Result<f64, Error>,
    reference_time: f64,
    target_p: f64,
) -> Result<(f64, f64), Error> {
    if !(reference_time.is_finite() && reference_time > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "no usable reference time ({reference_time})"
        )));
    }
    let mut lo = SCAN_LOW * reference_time;
    if p_of(lo)? >= target_p {
        return Err(Error::InvalidParameter(format!(
            "target already reached at the lower scan end tau = {lo:e}"
        )));
    }
    let mut hi = lo;
    let mut p_hi;
    loop {
        hi *= SCAN_RATIO;
        p_hi = p_of(hi)?;
        if p_hi >= target_p {
            break;
        }
        if hi > SCAN_HIGH * reference_time {
            return Err(Error::InvalidParameter(format!(
                "no bracket: P_tau stays below {target_p} up to tau = {hi:e}"
            )));
        }
        lo = hi;
    }
    while hi - lo > BISECTION_REL_WIDTH * hi {
        let mid = 0.5 * (lo + hi);
        let p = p_of(mid)?;
        if p >= target_p {
            hi = mid;
            p_hi = p;
        } else {
            lo = mid;
        }
    }
    Ok((hi, p_hi))
}

/// `P_tau(tau)` from several routes, with pairwise relative deviations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticComparison {
    pub config: RunConfig,
    pub integrator: f64,
    pub weber: Option<f64>,
    pub weber_error: Option<String>,
    pub asymptotic: Option<f64>,
    pub asymptotic_z0: Option<f64>,
    /// The large-`|z0|` estimate is outside its regime of validity.
    pub asymptotic_warning: bool,
    pub landau_zener: Option<f64>,
    pub deviations: Vec<Deviation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deviation {
    pub pair: String,
    pub relative: f64,
}

pub fn compare_analytic(config: &RunConfig) -> Result<AnalyticComparison, CliError> {
    if config.schedule_kind != ScheduleKind::Linear {
        return Err(Error::Unsupported(
            "closed-form comparison exists only for the linear schedule".into(),
        )
        .into());
    }
    config.validate()?;
    let params = config.anneal_params()?;
    let schedule = config.schedule()?;
    let integ = IntegratorConfig {
        output_samples: 2,
        ..config.integrator
    };
    let p_int = integrate(&params, &schedule, &integ)?.final_transition();

    let (weber, weber_error) = match weber_transition_probability(&params) {
        Ok(p) => (Some(p), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let asym = weber_params(&params)
        .and_then(|wp| asymptotic_ratio(&wp))
        .ok();
    let lz = landau_zener_probability(&params).ok();

    let named = [
        ("integrator", Some(p_int)),
        ("weber", weber),
        ("asymptotic", asym.map(|a| a.transition_probability())),
        ("landau_zener", lz),
    ];
    let mut deviations = Vec::new();
    for (i, (na, a)) in named.iter().enumerate() {
        for (nb, b) in &named[i + 1..] {
            if let (Some(a), Some(b)) = (a, b) {
                deviations.push(Deviation {
                    pair: format!("{na}/{nb}"),
                    relative: (a - b).abs() / b.abs().max(f64::MIN_POSITIVE),
                });
            }
        }
    }
    Ok(AnalyticComparison {
        config: config.materialized(),
        integrator: p_int,
        weber,
        weber_error,
        asymptotic: asym.map(|a| a.transition_probability()),
        asymptotic_z0: asym.map(|a| a.z0_magnitude),
        asymptotic_warning: asym.is_none_or(|a| a.regime_warning),
        landau_zener: lz,
        deviations,
    })
}

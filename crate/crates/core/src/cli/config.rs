//! `RunConfig`: the JSON run description shared by every subcommand.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CliError;
use crate::model::{make_params, AnnealParams};
use crate::propagate::IntegratorConfig;
use crate::schedule::{Schedule, ScheduleKind};

/// Environment variable overriding the default relative tolerance.
pub const TOL_ENV: &str = "NHQA_DEFAULT_TOL";

/// Physical parameters as they appear in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub g: f64,
    pub delta: f64,
    pub tau: f64,
    pub log2n: u32,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        Self {
            g: 2.0,
            delta: 0.0,
            tau: 1.5e4,
            log2n: 40,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub trajectory: Option<PathBuf>,
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsConfig,
    pub schedule_kind: ScheduleKind,
    pub integrator: IntegratorConfig,
    pub outputs: OutputPaths,
    /// Append eigenvalue and gap columns to the trajectory CSV.
    pub emit_spectra: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ParamsConfig::default(),
            schedule_kind: ScheduleKind::Linear,
            integrator: IntegratorConfig::default(),
            outputs: OutputPaths::default(),
            emit_spectra: true,
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub schedule: Option<ScheduleKind>,
    pub g: Option<f64>,
    pub delta: Option<f64>,
    pub tau: Option<f64>,
    pub log2n: Option<u32>,
    pub samples: Option<usize>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
}

impl RunConfig {
    /// Defaults, with the relative tolerance taken from `NHQA_DEFAULT_TOL`
    /// when it is set.
    pub fn with_env_defaults() -> Result<Self, CliError> {
        let mut cfg = Self::default();
        if let Ok(raw) = std::env::var(TOL_ENV) {
            let tol: f64 = raw
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{TOL_ENV}={raw:?} is not a number")))?;
            cfg.integrator.rel_tol = tol;
        }
        Ok(cfg)
    }

    /// Environment defaults, then the optional JSON file, then `overrides`.
    pub fn resolve(file: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let mut cfg = Self::with_env_defaults()?;
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            cfg = cfg.merged_with_json(&text)?;
        }
        cfg.apply(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Fields present in `text` replace the current values; absent ones
    /// are kept.
    pub fn merged_with_json(&self, text: &str) -> Result<Self, CliError> {
        let patch: Value = serde_json::from_str(text)
            .map_err(|e| CliError::Usage(format!("config is not valid JSON: {e}")))?;
        if !patch.is_object() {
            return Err(CliError::Usage("config must be a JSON object".into()));
        }
        let mut base = serde_json::to_value(self).expect("config serialises");
        merge(&mut base, patch);
        serde_json::from_value(base).map_err(|e| CliError::Usage(format!("bad config: {e}")))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.schedule {
            self.schedule_kind = v;
        }
        let p = &mut self.params;
        p.g = o.g.unwrap_or(p.g);
        p.delta = o.delta.unwrap_or(p.delta);
        p.tau = o.tau.unwrap_or(p.tau);
        p.log2n = o.log2n.unwrap_or(p.log2n);
        let i = &mut self.integrator;
        i.output_samples = o.samples.unwrap_or(i.output_samples);
        i.rel_tol = o.rel_tol.unwrap_or(i.rel_tol);
        i.abs_tol = o.abs_tol.unwrap_or(i.abs_tol);
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.integrator.validate()?;
        self.schedule()?;
        Ok(())
    }

    pub fn anneal_params(&self) -> Result<AnnealParams, CliError> {
        let p = &self.params;
        Ok(make_params(p.g, p.delta, p.tau, p.log2n)?)
    }

    pub fn schedule(&self) -> Result<Schedule, CliError> {
        Ok(Schedule::new(self.schedule_kind, self.anneal_params()?)?)
    }

    /// Copy with every implicit default written out, for echoing in
    /// summaries.
    pub fn materialized(&self) -> Self {
        let mut c = self.clone();
        if c.integrator.max_step.is_none() {
            c.integrator.max_step = Some(c.params.tau / 1000.0);
        }
        c
    }
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, p) => *b = p,
    }
}

//! One source of truth for tolerances and run parameters, loadable from a
//! `key = value` config file with flag-style overrides on top.

use serde::Serialize;

use crate::conditions::{CheckParams, Ladder};
use crate::newton::NewtonOpts;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Config {
    /// Sphere radius for fiber/flow work.
    pub eps: f64,
    /// Tube radius in the target; defaults to `eps / 100`.
    pub eta: f64,
    pub seed: u64,
    /// Top rung of the radius ladder.
    pub r0: f64,
    pub rungs: usize,
    /// Witness seeds per sampling task.
    pub samples: usize,
    /// Tube points blown away per target-arc in equivalence evidence.
    pub equivalence_points: usize,
    pub weight_bound: u32,
    pub tol_variety: f64,
    pub rank_gap: f64,
    pub tol_zero: f64,
    pub origin_tol: f64,
    pub angular_bin: f64,
    pub angular_tol: f64,
    pub link_scale: f64,
    pub exclude_scale: f64,
    pub drift_budget: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            eps: 0.5,
            eta: 0.005,
            seed: 0,
            r0: 0.5,
            rungs: 4,
            samples: 400,
            equivalence_points: 10,
            weight_bound: 12,
            tol_variety: 1e-10,
            rank_gap: 1e-8,
            tol_zero: 1e-9,
            origin_tol: 1e-6,
            angular_bin: 1e-3,
            angular_tol: 1e-2,
            link_scale: 0.2,
            exclude_scale: 0.2,
            drift_budget: 1e-6,
        }
    }
}

impl Config {
    /// Apply one `key = value` setting; unknown keys and unparsable values
    /// are errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn f(v: &str) -> Result<f64, String> {
            v.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad float '{}': {}", v.trim(), e))
        }
        fn u(v: &str) -> Result<u64, String> {
            v.trim()
                .parse::<u64>()
                .map_err(|e| format!("bad integer '{}': {}", v.trim(), e))
        }
        match key.trim() {
            "eps" => self.eps = f(value)?,
            "eta" => self.eta = f(value)?,
            "seed" => self.seed = u(value)?,
            "r0" => self.r0 = f(value)?,
            "rungs" => self.rungs = u(value)? as usize,
            "samples" => self.samples = u(value)? as usize,
            "equivalence_points" => self.equivalence_points = u(value)? as usize,
            "weight_bound" => self.weight_bound = u(value)? as u32,
            "tol_variety" => self.tol_variety = f(value)?,
            "rank_gap" => self.rank_gap = f(value)?,
            "tol_zero" => self.tol_zero = f(value)?,
            "origin_tol" => self.origin_tol = f(value)?,
            "angular_bin" => self.angular_bin = f(value)?,
            "angular_tol" => self.angular_tol = f(value)?,
            "link_scale" => self.link_scale = f(value)?,
            "exclude_scale" => self.exclude_scale = f(value)?,
            "drift_budget" => self.drift_budget = f(value)?,
            other => return Err(format!("unknown config key '{}'", other)),
        }
        Ok(())
    }

    /// Parse a config file: `key = value` lines, `#` comments, blank lines.
    pub fn from_kv_text(text: &str) -> Result<Config, String> {
        let mut cfg = Config::default();
        cfg.apply_kv_text(text)?;
        Ok(cfg)
    }

    pub fn apply_kv_text(&mut self, text: &str) -> Result<(), String> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("line {}: expected 'key = value'", lineno + 1));
            };
            self.set(key, value)
                .map_err(|e| format!("line {}: {}", lineno + 1, e))?;
        }
        Ok(())
    }

    pub fn newton_opts(&self) -> NewtonOpts {
        NewtonOpts {
            tol: self.tol_variety,
            ..Default::default()
        }
    }

    pub fn check_params(&self) -> CheckParams {
        CheckParams {
            ladder: Ladder {
                r0: self.r0,
                rungs: self.rungs,
            },
            samples_per_rung: self.samples,
            seed: self.seed,
            newton: self.newton_opts(),
            tol_zero: self.tol_zero,
            origin_tol: self.origin_tol,
            angular_bin: self.angular_bin,
            angular_tol: self.angular_tol,
            link_scale: self.link_scale,
            exclude_scale: self.exclude_scale,
            weight_bound: self.weight_bound,
        }
    }
}

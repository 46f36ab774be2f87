//! Performance profiles over a grid of log2 ratios.

use serde::{Deserialize, Serialize};

pub const GRID_POINTS: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub solver: String,
    /// `(τ, π_s(τ))` on the uniform grid over `[0, τ_max]`.
    pub points: Vec<(f64, f64)>,
    /// `log₂ r_{p,s}` per retained problem; `+∞` marks a failure.
    pub log_ratios: Vec<f64>,
}

impl ProfileCurve {
    /// Fraction of problems with `log₂ r_{p,s} ≤ τ`.
    pub fn eval(&self, tau: f64) -> f64 {
        if self.log_ratios.is_empty() {
            return 0.0;
        }
        self.log_ratios.iter().filter(|r| **r <= tau).count() as f64 / self.log_ratios.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub curves: Vec<ProfileCurve>,
    /// Rows where every solver failed.
    pub excluded: usize,
}

/// `t[p][s]` is the metric of solver `s` on problem `p`, `None` for a
/// failure. Ratios are taken to the best solver of each row.
pub fn perf_profile(t: &[Vec<Option<f64>>], solvers: &[String], tau_max: f64) -> Profile {
    let ns = solvers.len();
    let mut logs: Vec<Vec<f64>> = vec![Vec::new(); ns];
    let mut excluded = 0;
    for row in t {
        assert_eq!(row.len(), ns, "profile row width must match the solver count");
        let best = row
            .iter()
            .flatten()
            .copied()
            .filter(|v| *v > 0.0 && v.is_finite())
            .fold(f64::INFINITY, f64::min);
        if !best.is_finite() {
            excluded += 1;
            continue;
        }
        for (s, v) in row.iter().enumerate() {
            let r = match v {
                Some(v) if *v > 0.0 && v.is_finite() => (v / best).log2(),
                _ => f64::INFINITY,
            };
            logs[s].push(r);
        }
    }
    if excluded > 0 {
        log::warn!("{excluded} problem rows excluded: every solver failed");
    }
    let tau_max = tau_max.max(0.0);
    let curves = solvers
        .iter()
        .zip(logs)
        .map(|(name, log_ratios)| {
            let mut c = ProfileCurve { solver: name.clone(), points: Vec::with_capacity(GRID_POINTS), log_ratios };
            for i in 0..GRID_POINTS {
                let tau = tau_max * i as f64 / (GRID_POINTS - 1) as f64;
                let pi = c.eval(tau);
                c.points.push((tau, pi));
            }
            c
        })
        .collect();
    Profile { curves, excluded }
}

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::bcd::{bcd_until_still, BcdUpdate, BlockCache};
use crate::alfn::{al_ip, IpProblem, Multipliers};
use crate::alm::{Branch, IterRecord, SolveReport, SolveStatus};
use crate::error::{AlmError, Result};
use crate::numcore::vecops;
use crate::subsolve::InnerStatus;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BcdConfig {
    pub rho0: f64,
    pub max_outer: usize,
    pub max_sweeps: usize,
    pub update: BcdUpdate,
}

impl Default for BcdConfig {
    fn default() -> Self {
        Self { rho0: 1.0, max_outer: 200, max_sweeps: 100, update: BcdUpdate::Classical }
    }
}

/// Best feasible point seen along a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpOutcome {
    pub report: SolveReport,
    pub best_feasible: Option<(Vec<f64>, f64)>,
}

/// ALM with block coordinate descent inner loops:
/// `μ⁺ = max(μ + ρ(Ax − b), 0)`, `ρ⁺ = ρ + (ρ/2)‖(Ax − b)₊‖²`.
/// Stops once a sweep leaves `x` still, `x` is feasible and `μ` is unchanged.
/// The reported point is the best feasible one seen, else the last iterate.
pub fn alm_bcd_ip(p: &IpProblem, cfg: &BcdConfig) -> Result<IpOutcome> {
    if !(cfg.rho0 > 0.0 && cfg.rho0.is_finite()) {
        return Err(AlmError::InvalidInput(format!("rho0 must be positive, got {}", cfg.rho0)));
    }
    if cfg.max_outer == 0 || cfg.max_sweeps == 0 {
        return Err(AlmError::InvalidInput("max_outer and max_sweeps must be positive".into()));
    }
    let cache = BlockCache::new(p, cfg.update)?;
    let mut x: Vec<f64> = p.blocks.iter().flat_map(|b| b.project(&vec![0.0; b.len()])).collect();
    let mut mu = vec![0.0; p.m()];
    let mut rho = cfg.rho0;
    let mut trace = Vec::new();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut status = SolveStatus::MaxOuter;
    for k in 0..cfg.max_outer {
        let t0 = Instant::now();
        let (sweeps, moved, _) = bcd_until_still(p, &mut x, &mu, rho, cfg.update, &cache, cfg.max_sweeps)?;
        let r = p.residual(&x);
        let rp = vecops::pos(&r);
        let theta = vecops::norm_sq(&rp);
        let e = al_ip(p, &x, &mu, rho)?;
        let obj = p.objective(&x);
        if theta == 0.0 && best.as_ref().is_none_or(|(_, v)| obj < *v) {
            best = Some((x.clone(), obj));
        }
        let mu_next: Vec<f64> = mu.iter().zip(&r).map(|(m, ri)| (m + rho * ri).max(0.0)).collect();
        let still = moved == 0.0;
        let done = still && theta == 0.0 && mu_next == mu;
        trace.push(IterRecord {
            k,
            f_val: obj,
            sigma: if still { 0.0 } else { moved },
            theta,
            rho,
            inner_iters: sweeps,
            wall_ms: t0.elapsed().as_secs_f64() * 1e3,
            eta: 0.0,
            eps: 0.0,
            branch: if done { Branch::Stop } else { Branch::Free },
            al_value: e.value,
            grad_rho: e.grad_rho,
            sign_ok: mu.iter().all(|m| *m >= 0.0),
            rho_capped: false,
            inner_status: if still { InnerStatus::Converged } else { InnerStatus::MaxIter },
        });
        if done {
            status = SolveStatus::Converged;
            break;
        }
        mu = mu_next;
        rho += 0.5 * rho * theta;
    }
    let x_out = best.as_ref().map(|(b, _)| b.clone()).unwrap_or_else(|| x.clone());
    let report = SolveReport {
        status,
        x: x_out,
        mult: Multipliers::new(vec![], vec![], mu),
        rho,
        trace,
        inner_traces: Vec::new(),
        iterates: Vec::new(),
    };
    Ok(IpOutcome { report, best_feasible: best })
}

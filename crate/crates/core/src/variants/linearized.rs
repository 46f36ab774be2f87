use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::alfn::{al_composite_retained, CompositeProblem, Multipliers, Problem};
use crate::alm::{dual_update, measures, AlmState, Branch, IterRecord, SolveReport, SolveStatus};
use crate::error::{AlmError, Result};
use crate::numcore::vecops;
use crate::subsolve::InnerStatus;

/// Parameters shared by the single-loop drivers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoopConfig {
    pub rho: f64,
    pub max_iter: usize,
    pub tol_stat: f64,
    pub tol_feas: f64,
}

impl Default for LoopConfig {
    fn default() -> Self {
        Self { rho: 1.0, max_iter: 10_000, tol_stat: 1e-8, tol_feas: 1e-8 }
    }
}

/// `x⁺ = prox_{s h}(x − s ∇ₓ(smooth AL))`, then the multiplier step at `x⁺`.
pub fn linearized_alm_step(p: &CompositeProblem, state: &AlmState, step: f64) -> Result<AlmState> {
    if !(step > 0.0) {
        return Err(AlmError::InvalidInput(format!("step must be positive, got {step}")));
    }
    if state.mult.has_nu() {
        return Err(AlmError::VariantMismatch("linearized ALM keeps h; drop the nu block".into()));
    }
    let e = al_composite_retained(p, &state.x, &state.mult.lambda, &state.mult.mu, state.rho)?;
    let x = p.h.prox(1.0 / step, &vecops::add_scaled(&state.x, -step, &e.smooth_grad))?;
    let prob = Problem::Composite(p.clone());
    let mult = dual_update(&prob, &x, &state.mult, state.rho)?;
    Ok(AlmState { x, mult, rho: state.rho, eta: state.eta, eps: state.eps, k: state.k + 1 })
}

/// Single-loop linearized ALM at fixed `ρ`.
pub fn linearized_alm(p: &CompositeProblem, cfg: &LoopConfig, step: f64, x0: &[f64]) -> Result<SolveReport> {
    let prob = Problem::Composite(p.clone());
    let mut st = AlmState {
        x: x0.to_vec(),
        mult: Multipliers::zeros(0, p.m(), if p.k.is_some() { p.dim() } else { 0 }),
        rho: cfg.rho,
        eta: cfg.tol_stat,
        eps: cfg.tol_feas,
        k: 0,
    };
    let mut trace = Vec::new();
    let mut status = SolveStatus::MaxOuter;
    for _ in 0..cfg.max_iter {
        let t0 = Instant::now();
        let next = linearized_alm_step(p, &st, step)?;
        let m = measures(&prob, &next.x, &st.mult, st.rho)?;
        let done = m.sigma <= cfg.tol_stat && m.theta <= cfg.tol_feas;
        trace.push(IterRecord {
            k: st.k,
            f_val: m.objective,
            sigma: m.sigma,
            theta: m.theta,
            rho: st.rho,
            inner_iters: 1,
            wall_ms: t0.elapsed().as_secs_f64() * 1e3,
            eta: step,
            eps: 0.0,
            branch: if done { Branch::Stop } else { Branch::Free },
            al_value: m.al_value,
            grad_rho: m.grad_rho,
            sign_ok: crate::alm::sign_ok(&prob, &next.mult),
            rho_capped: false,
            inner_status: InnerStatus::Converged,
        });
        if done {
            st.x = next.x;
            status = SolveStatus::Converged;
            break;
        }
        st = next;
    }
    Ok(SolveReport { status, x: st.x, mult: st.mult, rho: st.rho, trace, inner_traces: Vec::new(), iterates: Vec::new() })
}

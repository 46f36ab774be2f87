use std::time::Instant;

use crate::alfn::Problem;
use crate::alm::{
    dual_update, initial_multipliers, inner_solve, measures, AlmConfig, Branch, IterRecord, SolveReport,
    SolveStatus,
};
use crate::error::{AlmError, Result};
use crate::numcore::vecops;

/// `t_{k+1} = (1 + √(1 + 4 t_k²)) / 2`
pub fn t_next(t: f64) -> f64 {
    0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt())
}

/// Momentum weight `(t_k − 1) / t_{k+1}`.
pub fn momentum(t: f64) -> f64 {
    (t - 1.0) / t_next(t)
}

/// Dual ascent with Nesterov momentum at fixed `ρ = rho0`:
/// `y⁺ = Λ + ρ ∇Φ(Λ)`, `Λ⁺ = y⁺ + ((t_k − 1)/t_{k+1})(y⁺ − y)`.
/// Inner solves run to the final stationarity tolerance.
pub fn accel_dual_alm(p: &Problem, cfg: &AlmConfig, t0: f64) -> Result<SolveReport> {
    cfg.validate()?;
    if !(t0 > 0.0 && t0 <= 1.0) {
        return Err(AlmError::InvalidInput(format!("t0 must lie in (0, 1], got {t0}")));
    }
    match p {
        Problem::Composite(c) if !c.is_convex() => {
            return Err(AlmError::VariantMismatch("accelerated dual ALM needs a convex problem".into()))
        }
        Problem::NcComposite(_) | Problem::Ip(_) => {
            return Err(AlmError::VariantMismatch("accelerated dual ALM needs a convex problem".into()))
        }
        _ => {}
    }
    let rho = cfg.rho0;
    let mut lam = initial_multipliers(p, cfg.inner_solver);
    let mut y = lam.clone();
    let mut t = t0;
    let mut x = vec![0.0; p.dim()];
    let mut trace = Vec::new();
    let mut inner_traces = Vec::new();
    let mut status = SolveStatus::MaxOuter;
    for k in 0..cfg.max_outer {
        let t_start = Instant::now();
        let rep = inner_solve(p, &x, &lam, rho, cfg.inner_solver, &cfg.inner, cfg.eta_final, None, cfg.max_sweeps)?;
        x = rep.x.clone();
        let m = measures(p, &x, &lam, rho)?;
        let done = m.sigma <= cfg.eta_final && m.theta <= cfg.eps_final;
        let y_next = dual_update(p, &x, &lam, rho)?;
        trace.push(IterRecord {
            k,
            f_val: m.objective,
            sigma: m.sigma,
            theta: m.theta,
            rho,
            inner_iters: rep.iters,
            wall_ms: t_start.elapsed().as_secs_f64() * 1e3,
            eta: cfg.eta_final,
            eps: cfg.eps_final,
            branch: if done { Branch::Stop } else { Branch::Free },
            al_value: m.al_value,
            grad_rho: m.grad_rho,
            sign_ok: crate::alm::sign_ok(p, &y_next),
            rho_capped: false,
            inner_status: rep.status,
        });
        inner_traces.push(rep.trace);
        if done {
            status = SolveStatus::Converged;
            break;
        }
        let beta = momentum(t);
        t = t_next(t);
        let ys = y_next.stacked();
        let ext: Vec<f64> = ys
            .iter()
            .zip(y.stacked())
            .map(|(a, b)| a + beta * (a - b))
            .collect();
        lam = y_next.from_stacked(&ext);
        y = y_next;
        debug_assert!(vecops::all_finite(&ext));
    }
    Ok(SolveReport { status, x, mult: y, rho, trace, inner_traces, iterates: Vec::new() })
}

use std::time::Instant;

use crate::alfn::Problem;
use crate::alm::{
    dual_update, initial_multipliers, inner_solve, measures, sign_ok, AlmConfig, AlmState, Branch, IterRecord,
    SolveReport, SolveStatus,
};
use crate::error::{AlmError, Result};
use crate::subsolve::InnerReport;

/// Inner solve of `𝕃(x, Λ_k, ρ) + (ρm/2)‖x − x_k‖²` to `max(η_k, η_final)`,
/// then the multiplier step and the accept-branch tolerance update.
pub fn proximal_alm_step(p: &Problem, cfg: &AlmConfig, state: &AlmState, m: f64) -> Result<(AlmState, InnerReport)> {
    if !(m >= 0.0 && m.is_finite()) {
        return Err(AlmError::InvalidInput(format!("proximal weight must be >= 0, got {m}")));
    }
    let w = state.rho * m;
    let prox = (w > 0.0).then_some((state.x.as_slice(), w));
    let tol = state.eta.max(cfg.eta_final);
    let rep = inner_solve(p, &state.x, &state.mult, state.rho, cfg.inner_solver, &cfg.inner, tol, prox, cfg.max_sweeps)?;
    let mult = dual_update(p, &rep.x, &state.mult, state.rho)?;
    let next = AlmState {
        x: rep.x.clone(),
        mult,
        rho: state.rho,
        eta: state.eta / state.rho,
        eps: state.eps / state.rho.powf(cfg.beta_tol),
        k: state.k + 1,
    };
    Ok((next, rep))
}

/// Proximal ALM at fixed `ρ = rho0`: every iteration takes a proximal step
/// and updates the multipliers. Stops when `ς ≤ η_final` and `ϑ ≤ ε_final`,
/// both measured on the plain AL.
pub fn proximal_alm(p: &Problem, cfg: &AlmConfig, m: f64) -> Result<SolveReport> {
    cfg.validate()?;
    let (eta, eps) = cfg.initial_tolerances();
    let mut st = AlmState {
        x: vec![0.0; p.dim()],
        mult: initial_multipliers(p, cfg.inner_solver),
        rho: cfg.rho0,
        eta,
        eps,
        k: 0,
    };
    let mut trace = Vec::new();
    let mut inner_traces = Vec::new();
    let mut status = SolveStatus::MaxOuter;
    for _ in 0..cfg.max_outer {
        let t0 = Instant::now();
        let (next, rep) = proximal_alm_step(p, cfg, &st, m)?;
        let ms = measures(p, &next.x, &st.mult, st.rho)?;
        let done = ms.sigma <= cfg.eta_final && ms.theta <= cfg.eps_final;
        trace.push(IterRecord {
            k: st.k,
            f_val: ms.objective,
            sigma: ms.sigma,
            theta: ms.theta,
            rho: st.rho,
            inner_iters: rep.iters,
            wall_ms: t0.elapsed().as_secs_f64() * 1e3,
            eta: st.eta.max(cfg.eta_final),
            eps: st.eps.max(cfg.eps_final),
            branch: if done { Branch::Stop } else { Branch::Free },
            al_value: ms.al_value,
            grad_rho: ms.grad_rho,
            sign_ok: sign_ok(p, &next.mult),
            rho_capped: false,
            inner_status: rep.status,
        });
        inner_traces.push(rep.trace);
        if done {
            st.x = next.x;
            status = SolveStatus::Converged;
            break;
        }
        st = next;
    }
    Ok(SolveReport { status, x: st.x, mult: st.mult, rho: st.rho, trace, inner_traces, iterates: Vec::new() })
}

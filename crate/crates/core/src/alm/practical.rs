use std::time::Instant;

use super::classes::{dual_update, initial_multipliers, inner_solve, measures, sign_ok};
use super::rockafellar::rockafellar_stop;
use super::{AlmConfig, AlmState, Branch, IterRecord, PenaltyRule, SolveReport, SolveStatus, StopRule};
use crate::alfn::{Multipliers, Problem};
use crate::error::{check_dim, Result};
use crate::subsolve::{rel_change, InnerReport, InnerStatus};

/// Result of one outer iteration.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: AlmState,
    pub record: IterRecord,
    pub inner: InnerReport,
    /// Set when the iteration ends the solve.
    pub done: Option<SolveStatus>,
}

fn solve_inner(p: &Problem, cfg: &AlmConfig, st: &AlmState, tol: f64) -> Result<(InnerReport, usize)> {
    let w = st.rho * cfg.prox_m;
    let prox = (w > 0.0).then_some((st.x.as_slice(), w));
    let run = |x0: &[f64], tol: f64| {
        inner_solve(p, x0, &st.mult, st.rho, cfg.inner_solver, &cfg.inner, tol, prox, cfg.max_sweeps)
    };
    let StopRule::Rockafellar { criterion, alpha_sc, s0 } = cfg.stop_rule else {
        let rep = run(&st.x, tol)?;
        let iters = rep.iters;
        return Ok((rep, iters));
    };
    let sched = s0 * 0.5f64.powi(st.k.min(1000) as i32);
    let mut tol_try = tol;
    let mut x0 = st.x.clone();
    let mut total = 0;
    loop {
        let rep = run(&x0, tol_try)?;
        total += rep.iters;
        let m = measures(p, &rep.x, &st.mult, st.rho)?;
        let next = dual_update(p, &rep.x, &st.mult, st.rho)?;
        let step = next.dist(&st.mult);
        let ok = rockafellar_stop(criterion, alpha_sc, st.rho, m.sigma, step, sched)?;
        if ok || tol_try <= 1e-14 || rep.status == InnerStatus::Stalled {
            return Ok((rep, total));
        }
        tol_try *= 0.1;
        x0 = rep.x;
    }
}

/// One iteration of the practical ALM from `state`.
pub fn outer_step(p: &Problem, cfg: &AlmConfig, state: &AlmState) -> Result<StepOutcome> {
    let t0 = Instant::now();
    let eta_eff = state.eta.max(cfg.eta_final);
    let eps_eff = state.eps.max(cfg.eps_final);
    let (inner, inner_iters) = solve_inner(p, cfg, state, eta_eff)?;
    let x = inner.x.clone();
    let m = measures(p, &x, &state.mult, state.rho)?;

    let mut next = state.clone();
    next.x = x.clone();
    next.k = state.k + 1;
    let mut done = None;
    let mut rho_capped = false;

    let stop = match cfg.stop_rule {
        StopRule::ExactDiscrete => m.sigma == 0.0 && m.theta == 0.0,
        _ => m.sigma <= cfg.eta_final && m.theta <= cfg.eps_final,
    };
    let branch = if stop {
        done = Some(SolveStatus::Converged);
        Branch::Stop
    } else if inner.status == InnerStatus::Stalled && m.sigma > eta_eff {
        done = Some(SolveStatus::InnerStalled);
        Branch::Stop
    } else if m.theta <= eps_eff {
        next.mult = dual_update(p, &x, &state.mult, state.rho)?;
        next.eta = state.eta / state.rho;
        next.eps = state.eps / state.rho.powf(cfg.beta_tol);
        if let StopRule::RelChange { tol } = cfg.stop_rule {
            if rel_change(&x, &state.x) <= tol {
                done = Some(SolveStatus::Heuristic);
            }
        }
        Branch::Accept
    } else {
        let grown = cfg.kappa_pen * state.rho;
        let rho = match cfg.penalty_rule {
            PenaltyRule::Multiplicative => grown,
            PenaltyRule::SupergradientAscent => {
                let r = state.rho + state.rho * m.grad_rho;
                if r > grown {
                    rho_capped = true;
                    grown
                } else if r <= state.rho {
                    state.rho * (1.0 + 4.0 * f64::EPSILON)
                } else {
                    r
                }
            }
        };
        next.rho = rho;
        next.eta = 1.0 / rho;
        next.eps = 1.0 / rho.powf(cfg.alpha_tol);
        if rho > cfg.rho_max {
            done = Some(SolveStatus::InfeasibleSuspected);
        }
        Branch::Increase
    };

    let record = IterRecord {
        k: state.k,
        f_val: m.objective,
        sigma: m.sigma,
        theta: m.theta,
        rho: state.rho,
        inner_iters,
        wall_ms: t0.elapsed().as_secs_f64() * 1e3,
        eta: state.eta,
        eps: state.eps,
        branch,
        al_value: m.al_value,
        grad_rho: m.grad_rho,
        sign_ok: sign_ok(p, &next.mult),
        rho_capped,
        inner_status: inner.status,
    };
    Ok(StepOutcome { state: next, record, inner, done })
}

/// Practical ALM from `x = 0` and zero multipliers.
pub fn solve_practical(p: &Problem, cfg: &AlmConfig) -> Result<SolveReport> {
    let mult = initial_multipliers(p, cfg.inner_solver);
    solve_practical_from(p, cfg, &vec![0.0; p.dim()], mult)
}

pub fn solve_practical_from(p: &Problem, cfg: &AlmConfig, x0: &[f64], mult0: Multipliers) -> Result<SolveReport> {
    cfg.validate()?;
    check_dim("solve_practical x0", p.dim(), x0.len())?;
    let (eta, eps) = cfg.initial_tolerances();
    let mut state = AlmState { x: x0.to_vec(), mult: mult0, rho: cfg.rho0, eta, eps, k: 0 };
    let mut trace = Vec::new();
    let mut iterates = Vec::new();
    let mut inner_traces = Vec::new();
    let mut status = SolveStatus::MaxOuter;
    for _ in 0..cfg.max_outer {
        let out = outer_step(p, cfg, &state)?;
        log::debug!(
            "outer k={} sigma={:.3e} theta={:.3e} rho={:.3e} branch={:?}",
            out.record.k, out.record.sigma, out.record.theta, out.record.rho, out.record.branch
        );
        trace.push(out.record);
        inner_traces.push(out.inner.trace);
        state = out.state;
        if cfg.keep_iterates {
            iterates.push(state.x.clone());
        }
        if let Some(s) = out.done {
            status = s;
            break;
        }
    }
    Ok(SolveReport {
        status,
        x: state.x,
        mult: state.mult,
        rho: state.rho,
        trace,
        inner_traces,
        iterates,
    })
}

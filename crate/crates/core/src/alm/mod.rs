//! Outer ALM engine: optimality measures, dual updates, the practical ALM
//! with its tolerance schedule, inexactness predicates and the inexact
//! method for strongly convex problems.

mod classes;
mod practical;
mod rockafellar;
mod sc;

use serde::{Deserialize, Serialize};

use crate::alfn::Multipliers;
use crate::error::{AlmError, Result};
use crate::subsolve::{InnerOpts, InnerSolver, InnerStatus};

pub(crate) use classes::sign_ok;
pub use classes::{dual_update, initial_multipliers, inner_solve, measures, uses_retained_form, Measures};
pub use practical::{outer_step, solve_practical, solve_practical_from, StepOutcome};
pub use rockafellar::{rockafellar_stop, RockafellarCriterion};
pub use sc::{solve_sc_inexact, ScConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyRule {
    /// `ρ ← κρ`
    Multiplicative,
    /// `ρ ← ρ + ρ·∇_ρ𝕃`, capped at `κρ`.
    SupergradientAscent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum StopRule {
    /// `ς ≤ η` and `ϑ ≤ ε` at the final tolerances.
    GradNormPair,
    /// Relative change of consecutive outer iterates. Heuristic.
    RelChange { tol: f64 },
    /// Inner solves must satisfy an inexactness criterion with
    /// schedule `s_k = s0 · 2^{-k}`.
    Rockafellar {
        criterion: RockafellarCriterion,
        alpha_sc: f64,
        s0: f64,
    },
    /// `ς = 0` and `ϑ = 0` exactly.
    ExactDiscrete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlmConfig {
    pub rho0: f64,
    pub kappa_pen: f64,
    pub alpha_tol: f64,
    pub beta_tol: f64,
    /// Final stationarity tolerance.
    pub eta_final: f64,
    /// Final feasibility tolerance.
    pub eps_final: f64,
    pub max_outer: usize,
    pub penalty_rule: PenaltyRule,
    pub stop_rule: StopRule,
    pub inner_solver: InnerSolver,
    /// Base inner options; `tol` is overwritten each outer iteration.
    pub inner: InnerOpts,
    /// Weight `m` of the proximal term `(ρm/2)‖x − x_k‖²`; 0 disables it.
    pub prox_m: f64,
    /// Cap on the number of BCD sweeps per inner solve for integer programs.
    pub max_sweeps: usize,
    pub rho_max: f64,
    /// Keep every outer iterate in the report.
    pub keep_iterates: bool,
}

impl Default for AlmConfig {
    fn default() -> Self {
        Self {
            rho0: 10.0,
            kappa_pen: 10.0,
            alpha_tol: 0.5,
            beta_tol: 0.9,
            eta_final: 1e-6,
            eps_final: 1e-6,
            max_outer: 100,
            penalty_rule: PenaltyRule::Multiplicative,
            stop_rule: StopRule::GradNormPair,
            inner_solver: InnerSolver::GdBb,
            inner: InnerOpts::default(),
            prox_m: 0.0,
            max_sweeps: 200,
            rho_max: 1e16,
            keep_iterates: false,
        }
    }
}

impl AlmConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(AlmError::InvalidInput(s));
        // accepted steps divide the tolerances by rho
        if !(self.rho0 > 1.0 && self.rho0.is_finite()) {
            return bad(format!("rho0 must exceed 1, got {}", self.rho0));
        }
        if !(self.kappa_pen > 1.0) {
            return bad(format!("kappa_pen must exceed 1, got {}", self.kappa_pen));
        }
        if !(self.alpha_tol > 0.0 && self.alpha_tol <= self.beta_tol && self.beta_tol <= 1.0) {
            return bad(format!(
                "need 0 < alpha_tol <= beta_tol <= 1, got {} and {}",
                self.alpha_tol, self.beta_tol
            ));
        }
        if !(self.eta_final > 0.0 && self.eps_final > 0.0) {
            return bad("final tolerances must be positive".into());
        }
        if self.max_outer == 0 {
            return bad("max_outer must be at least 1".into());
        }
        if !(self.prox_m >= 0.0) {
            return bad(format!("prox_m must be >= 0, got {}", self.prox_m));
        }
        if let StopRule::Rockafellar { criterion, alpha_sc, s0 } = self.stop_rule {
            if !(s0 > 0.0) {
                return bad("Rockafellar schedule must start positive".into());
            }
            if criterion != RockafellarCriterion::C && !(alpha_sc > 0.0) {
                return bad("criteria A and B need a positive strong convexity modulus".into());
            }
        }
        self.inner.validate()
    }

    /// `(η_0, ε_0) = (1/ρ_0, 1/ρ_0^α)`
    pub fn initial_tolerances(&self) -> (f64, f64) {
        (1.0 / self.rho0, 1.0 / self.rho0.powf(self.alpha_tol))
    }
}

/// Evolving outer state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlmState {
    pub x: Vec<f64>,
    pub mult: Multipliers,
    pub rho: f64,
    pub eta: f64,
    pub eps: f64,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxOuter,
    InnerStalled,
    InfeasibleSuspected,
    /// Stopped by the relative-change heuristic.
    Heuristic,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxOuter => "max_outer",
            SolveStatus::InnerStalled => "inner_stalled",
            SolveStatus::InfeasibleSuspected => "infeasible_suspected",
            SolveStatus::Heuristic => "heuristic",
        }
    }
}

/// Which schedule the record follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Feasibility progressed: multipliers updated, tolerances tightened.
    Accept,
    /// Feasibility stalled: penalty increased, tolerances reset.
    Increase,
    /// Final iteration (terminated before any update).
    Stop,
    /// Not on the practical-ALM schedule (variants with their own rules).
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub k: usize,
    /// Objective `f + h` at the new iterate.
    pub f_val: f64,
    pub sigma: f64,
    pub theta: f64,
    /// Penalty used in this iteration.
    pub rho: f64,
    pub inner_iters: usize,
    pub wall_ms: f64,
    /// Raw tolerances of this iteration (before flooring).
    pub eta: f64,
    pub eps: f64,
    pub branch: Branch,
    /// AL value at the new iterate with the old multipliers.
    pub al_value: f64,
    pub grad_rho: f64,
    /// Multiplier sign conventions hold after the update.
    pub sign_ok: bool,
    pub rho_capped: bool,
    pub inner_status: InnerStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub x: Vec<f64>,
    pub mult: Multipliers,
    pub rho: f64,
    pub trace: Vec<IterRecord>,
    /// Residual trace of every inner solve.
    pub inner_traces: Vec<Vec<f64>>,
    /// Outer iterates, when requested.
    pub iterates: Vec<Vec<f64>>,
}

impl SolveReport {
    pub fn outer_iters(&self) -> usize {
        self.trace.len()
    }

    pub fn inner_iters_total(&self) -> usize {
        self.trace.iter().map(|r| r.inner_iters).sum()
    }

    pub fn last(&self) -> Option<&IterRecord> {
        self.trace.last()
    }

    /// Checks the schedule invariants on the trace: monotone penalty
    /// (strict on penalty increases), the accept-branch tolerance
    /// recursions, the reset rule on increases, sign conventions,
    /// `∇_ρ𝕃 ≥ 0`, and the final tolerances on convergence.
    pub fn check_ledger(&self, cfg: &AlmConfig) -> std::result::Result<(), String> {
        let close = |a: f64, b: f64| (a - b).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs());
        for (i, r) in self.trace.iter().enumerate() {
            if r.grad_rho < 0.0 {
                return Err(format!("k={}: negative rho-gradient {}", r.k, r.grad_rho));
            }
            if !r.sign_ok {
                return Err(format!("k={}: multiplier sign convention violated", r.k));
            }
            if !(r.sigma >= 0.0 && r.theta >= 0.0) {
                return Err(format!("k={}: negative measure", r.k));
            }
            let Some(next) = self.trace.get(i + 1) else { continue };
            if next.rho < r.rho {
                return Err(format!("k={}: penalty decreased {} -> {}", r.k, r.rho, next.rho));
            }
            match r.branch {
                Branch::Accept => {
                    if next.rho != r.rho {
                        return Err(format!("k={}: penalty changed on accept", r.k));
                    }
                    if !close(next.eta * next.rho, r.eta) {
                        return Err(format!("k={}: eta recursion {} * {} != {}", r.k, next.eta, next.rho, r.eta));
                    }
                    if !close(next.eps * next.rho.powf(cfg.beta_tol), r.eps) {
                        return Err(format!("k={}: eps recursion broken", r.k));
                    }
                }
                Branch::Increase => {
                    if next.rho <= r.rho {
                        return Err(format!("k={}: penalty not increased", r.k));
                    }
                    if !close(next.eta, 1.0 / next.rho) || !close(next.eps, 1.0 / next.rho.powf(cfg.alpha_tol)) {
                        return Err(format!("k={}: tolerance reset broken", r.k));
                    }
                }
                Branch::Stop => return Err(format!("k={}: record after a stop", r.k)),
                Branch::Free => {}
            }
        }
        if self.status == SolveStatus::Converged {
            if let Some(r) = self.trace.last() {
                let exact = matches!(cfg.stop_rule, StopRule::ExactDiscrete);
                let (eta, eps) = if exact { (0.0, 0.0) } else { (cfg.eta_final, cfg.eps_final) };
                if !(r.sigma <= eta && r.theta <= eps) {
                    return Err(format!("converged with sigma {} theta {}", r.sigma, r.theta));
                }
            }
        }
        Ok(())
    }
}

//! Inner solvers: Barzilai-Borwein gradient descent, Nesterov acceleration,
//! proximal gradient and a regularized semismooth Newton method.

mod cg;
mod gd_bb;
mod nag;
mod prox_grad;
mod ssn;

use serde::{Deserialize, Serialize};

pub use cg::{cg, CgResult};
pub use gd_bb::gd_bb;
pub use nag::nag;
pub use prox_grad::{prox_grad, prox_grad_residual};
pub use ssn::ssn;

use crate::error::{AlmError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmijoOpts {
    /// Sufficient-decrease constant in (0, 1).
    pub sigma: f64,
    /// Step shrink factor in (0, 1).
    pub backtrack: f64,
    pub max_backtracks: usize,
}

impl Default for ArmijoOpts {
    fn default() -> Self {
        Self {
            sigma: 1e-4,
            backtrack: 0.5,
            max_backtracks: 60,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SsnOpts {
    /// Relative residual target for CG; tightened further to `‖F‖` near the root.
    pub cg_tol: f64,
    pub cg_max: usize,
    /// Regularization is `reg_scale · min(reg_cap, ‖F‖)`.
    pub reg_cap: f64,
    pub reg_scale: f64,
}

impl Default for SsnOpts {
    fn default() -> Self {
        Self {
            cg_tol: 1e-2,
            cg_max: 500,
            reg_cap: 0.1,
            reg_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerOpts {
    /// Stationarity target `η`.
    pub tol: f64,
    pub max_iter: usize,
    pub armijo: ArmijoOpts,
    /// Nonmonotone window for the BB line search.
    pub bb_memory: usize,
    /// Function-value restart for accelerated methods.
    pub nag_restart: bool,
    pub ssn: SsnOpts,
    /// Optional relative-change stop. Heuristic, not a stationarity certificate.
    pub rel_change_tol: Option<f64>,
    /// Known Lipschitz constant of the gradient; estimated by backtracking otherwise.
    pub lipschitz: Option<f64>,
    /// Upper bound on the proximal-gradient step.
    pub step_cap: Option<f64>,
    /// FISTA momentum in `prox_grad`.
    pub accelerate: bool,
}

impl Default for InnerOpts {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 10_000,
            armijo: ArmijoOpts::default(),
            bb_memory: 10,
            nag_restart: true,
            ssn: SsnOpts::default(),
            rel_change_tol: None,
            lipschitz: None,
            step_cap: None,
            accelerate: false,
        }
    }
}

impl InnerOpts {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, n: usize) -> Self {
        self.max_iter = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(AlmError::InvalidInput(format!("inner tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(AlmError::InvalidInput("max_iter must be at least 1".into()));
        }
        let a = &self.armijo;
        if !(a.sigma > 0.0 && a.sigma < 1.0 && a.backtrack > 0.0 && a.backtrack < 1.0) {
            return Err(AlmError::InvalidInput("armijo constants must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InnerStatus {
    Converged,
    /// Stopped by the relative-change heuristic.
    RelChange,
    MaxIter,
    Stalled,
}

/// One accepted line-search step: `f_new ≤ f_ref + sigma · alpha · slope`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmijoRecord {
    pub f_ref: f64,
    pub f_new: f64,
    pub alpha: f64,
    pub slope: f64,
    pub sigma: f64,
}

impl ArmijoRecord {
    pub fn holds(&self) -> bool {
        self.f_new <= self.f_ref + self.sigma * self.alpha * self.slope
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerReport {
    pub x: Vec<f64>,
    /// Gradient norm, or the proximal-gradient residual for `prox_grad`.
    pub residual: f64,
    pub iters: usize,
    pub status: InnerStatus,
    pub newton_steps: usize,
    pub cg_iters: usize,
    /// Residual at each iterate, starting with `x0`.
    pub trace: Vec<f64>,
    pub armijo: Vec<ArmijoRecord>,
}

impl InnerReport {
    pub(crate) fn new(x: Vec<f64>) -> Self {
        Self {
            x,
            residual: f64::INFINITY,
            iters: 0,
            status: InnerStatus::MaxIter,
            newton_steps: 0,
            cg_iters: 0,
            trace: Vec::new(),
            armijo: Vec::new(),
        }
    }

    pub fn converged(&self) -> bool {
        self.status == InnerStatus::Converged
    }
}

/// `‖x⁺ − x‖ / max(‖x‖, 1)`
pub fn rel_change(x_new: &[f64], x_old: &[f64]) -> f64 {
    crate::numcore::vecops::dist(x_new, x_old) / crate::numcore::vecops::norm(x_old).max(1.0)
}

/// Inner solver choice for the outer loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InnerSolver {
    GdBb,
    Nag,
    ProxGrad,
    Ssn,
}

impl std::str::FromStr for InnerSolver {
    type Err = AlmError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gd_bb" | "bb" => Ok(InnerSolver::GdBb),
            "nag" => Ok(InnerSolver::Nag),
            "prox_grad" => Ok(InnerSolver::ProxGrad),
            "ssn" => Ok(InnerSolver::Ssn),
            other => Err(AlmError::InvalidInput(format!("unknown inner solver {other}"))),
        }
    }
}

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::classes::{dual_update, measures, sign_ok};
use super::{Branch, IterRecord, SolveReport, SolveStatus};
use crate::alfn::{multiplier_sign, Multipliers, NlpAl, NlpProblem, Problem};
use crate::error::{check_dim, AlmError, Result};
use crate::subsolve::{nag, InnerOpts};

/// Parameters of the inexact ALM for `min f(x) s.t. Ax ≤ b` with
/// `μ_f`-strongly convex, `L_f`-smooth `f` and `μ_A ≤ σ(A) ≤ L_A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScConfig {
    pub rho: f64,
    /// Radius `D` of the accuracy schedule `δ_k = (1 − σ)^{k/2} D`.
    pub d_radius: f64,
    pub mu_f: Option<f64>,
    pub l_f: Option<f64>,
    pub mu_a: Option<f64>,
    pub l_a: Option<f64>,
    pub max_outer: usize,
    pub eta_final: f64,
    pub eps_final: f64,
    pub inner: InnerOpts,
}

impl Default for ScConfig {
    fn default() -> Self {
        Self {
            rho: 1.0,
            d_radius: 1.0,
            mu_f: None,
            l_f: None,
            mu_a: None,
            l_a: None,
            max_outer: 200,
            eta_final: 1e-8,
            eps_final: 1e-8,
            inner: InnerOpts::default().with_max_iter(100_000),
        }
    }
}

impl ScConfig {
    fn constants(&self) -> Result<(f64, f64, f64, f64)> {
        let need = |v: Option<f64>, name: &str| {
            v.filter(|x| *x > 0.0)
                .ok_or_else(|| AlmError::Capability(format!("strongly convex ALM needs a positive {name}")))
        };
        Ok((need(self.mu_f, "mu_f")?, need(self.l_f, "l_f")?, need(self.mu_a, "mu_a")?, need(self.l_a, "l_a")?))
    }

    /// `σ = μ_A² ρ / (12 L_f)`
    pub fn contraction(&self) -> Result<f64> {
        let (_, l_f, mu_a, _) = self.constants()?;
        Ok(mu_a * mu_a * self.rho / (12.0 * l_f))
    }

    /// `δ_k`
    pub fn delta(&self, k: usize) -> Result<f64> {
        let s = self.contraction()?;
        Ok((1.0 - s).powf(k as f64 / 2.0) * self.d_radius)
    }
}

/// Inexact ALM with NAG inner solves stopped at `‖∇𝕃‖ ≤ μ_f δ_k`, which
/// certifies `‖x_k − x_k*‖ ≤ δ_k`. `c` must be affine with upper bounds only.
pub fn solve_sc_inexact(p: &NlpProblem, cfg: &ScConfig, x0: &[f64]) -> Result<SolveReport> {
    let (mu_f, l_f, mu_a, l_a) = cfg.constants()?;
    if !(cfg.rho > 0.0 && cfg.rho <= l_f / (mu_a * mu_a)) {
        return Err(AlmError::InvalidInput(format!(
            "penalty must lie in (0, L_f/mu_A^2] = (0, {}], got {}",
            l_f / (mu_a * mu_a),
            cfg.rho
        )));
    }
    if !(cfg.d_radius > 0.0) {
        return Err(AlmError::InvalidInput("radius D must be positive".into()));
    }
    let q = p
        .q
        .as_ref()
        .ok_or_else(|| AlmError::Capability("strongly convex ALM needs inequality constraints".into()))?;
    if p.k.is_some() || (0..p.m()).any(|i| multiplier_sign(q, i) != 1) {
        return Err(AlmError::VariantMismatch("expected constraints of the form Ax <= b only".into()));
    }
    check_dim("solve_sc_inexact x0", p.dim(), x0.len())?;
    let prob = Problem::Nlp(p.clone());
    let rho = cfg.rho;
    let mut opts = cfg.inner.clone();
    opts.lipschitz = Some(l_f + rho * l_a * l_a);

    let mut x = x0.to_vec();
    let mut mult = Multipliers::zeros(0, p.m(), 0);
    let mut trace = Vec::new();
    let mut iterates = Vec::new();
    let mut inner_traces = Vec::new();
    let mut status = SolveStatus::MaxOuter;
    for k in 0..cfg.max_outer {
        let t0 = Instant::now();
        let delta = cfg.delta(k)?;
        opts.tol = (mu_f * delta).max(f64::MIN_POSITIVE);
        let al = NlpAl { p, mult: &mult, rho };
        let rep = nag(&al, &x, &opts, mu_f)?;
        x = rep.x.clone();
        let m = measures(&prob, &x, &mult, rho)?;
        let stop = m.sigma <= cfg.eta_final && m.theta <= cfg.eps_final;
        if !stop {
            mult = dual_update(&prob, &x, &mult, rho)?;
        }
        trace.push(IterRecord {
            k,
            f_val: m.objective,
            sigma: m.sigma,
            theta: m.theta,
            rho,
            inner_iters: rep.iters,
            wall_ms: t0.elapsed().as_secs_f64() * 1e3,
            eta: opts.tol,
            eps: delta,
            branch: if stop { Branch::Stop } else { Branch::Free },
            al_value: m.al_value,
            grad_rho: m.grad_rho,
            sign_ok: sign_ok(&prob, &mult),
            rho_capped: false,
            inner_status: rep.status,
        });
        iterates.push(x.clone());
        inner_traces.push(rep.trace);
        if stop {
            status = SolveStatus::Converged;
            break;
        }
    }
    Ok(SolveReport { status, x, mult, rho, trace, inner_traces, iterates })
}

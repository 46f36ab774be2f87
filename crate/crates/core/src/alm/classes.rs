use crate::alfn::{
    al_composite_retained, al_composite_smooth, al_ip, al_nonconvex, multiplier_sign, CompositeAl,
    CompositeProblem, IpProblem, Multipliers, NcCompositeProblem, NlpAl, Problem,
    RetainedAl, SmoothFn,
};
use crate::error::{AlmError, Result};
use crate::numcore::{vecops, LinOp};
use crate::prox::{project, ProxFn, SetSpec};
use crate::subsolve::{gd_bb, nag, prox_grad, ssn, InnerOpts, InnerReport, InnerSolver, InnerStatus};
use crate::variants::{bcd_until_still, BcdUpdate, BlockCache};

/// Optimality measures at `(x, Λ, ρ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measures {
    /// Stationarity `ς`.
    pub sigma: f64,
    /// Feasibility `ϑ`.
    pub theta: f64,
    pub grad_rho: f64,
    pub al_value: f64,
    /// `f + h` (or `cᵀx`).
    pub objective: f64,
}

/// True when the composite AL keeps `h` as is: a proximal-gradient inner
/// solver on a composite problem with nonzero `h`, or a nonconvex `h`
/// in the retained-slack class.
pub fn uses_retained_form(p: &Problem, solver: InnerSolver) -> bool {
    match p {
        Problem::Composite(c) => solver == InnerSolver::ProxGrad && !c.h.is_zero(),
        Problem::NcComposite(c) => !c.smooths_h() && !c.h.is_zero(),
        _ => false,
    }
}

/// Zero multipliers shaped for `p` and the AL form the solver implies.
pub fn initial_multipliers(p: &Problem, solver: InnerSolver) -> Multipliers {
    let retained = uses_retained_form(p, solver);
    match p {
        Problem::Nlp(p) => Multipliers::zeros(0, p.m(), if p.has_k() { p.dim() } else { 0 }),
        Problem::Composite(c) => Multipliers::zeros(
            if retained || c.h.is_zero() { 0 } else { c.dim() },
            c.m(),
            if c.k.is_some() { c.dim() } else { 0 },
        ),
        Problem::NcComposite(c) => Multipliers::zeros(
            if c.smooths_h() { c.dim() } else { 0 },
            c.m(),
            if c.k.is_some() { c.dim() } else { 0 },
        ),
        Problem::Ip(p) => Multipliers::zeros(0, 0, p.m()),
    }
}

fn composite_retained(c: &CompositeProblem, mult: &Multipliers) -> bool {
    !c.h.is_zero() && mult.nu.is_empty()
}

/// `dist(−g, ∂h(x))` for the limiting subdifferential. For `α‖x‖₀` this is
/// the gradient norm on the support; other kinds use the unit-step residual.
fn limiting_residual(h: &ProxFn, x: &[f64], g: &[f64]) -> Result<f64> {
    match h {
        ProxFn::L0(_) => Ok(x
            .iter()
            .zip(g)
            .filter(|(xi, _)| **xi != 0.0)
            .map(|(_, gi)| gi * gi)
            .sum::<f64>()
            .sqrt()),
        _ => unit_prox_residual(h, x, g),
    }
}

/// `‖x − prox_h(x − g)‖`, the unit-step proximal-gradient residual.
fn unit_prox_residual(h: &ProxFn, x: &[f64], g: &[f64]) -> Result<f64> {
    let p = h.prox(1.0, &vecops::sub(x, g))?;
    Ok(vecops::dist(x, &p))
}

fn nc_slack(p: &NcCompositeProblem, x: &[f64], lambda: &[f64], rho: f64) -> Result<Vec<f64>> {
    let cx = p.c.eval(x)?;
    project(&p.q, &vecops::add_scaled(&cx, 1.0 / rho, lambda))
}

fn ip_sweep_move(p: &IpProblem, x: &[f64], mu: &[f64], rho: f64) -> Result<f64> {
    let update = if p.blocks.iter().all(|b| b.len() <= 16) {
        BcdUpdate::Classical
    } else {
        BcdUpdate::ProxLinear { tau: 1.0 }
    };
    let cache = BlockCache::new(p, update)?;
    let mut y = x.to_vec();
    Ok(crate::variants::bcd_sweep(p, &mut y, mu, rho, update, &cache)?.moved)
}

/// `(ς, ϑ)` with the AL value and `∇_ρ𝕃`. For composite problems the
/// multiplier shape selects the form: no `ν` block with nonzero `h` means
/// the retained form. Integer programs use the no-move residual of one
/// classical sweep for `ς` and `‖(Ax − b)₊‖²` for `ϑ`.
pub fn measures(p: &Problem, x: &[f64], mult: &Multipliers, rho: f64) -> Result<Measures> {
    let objective = p.objective(x)?;
    match p {
        Problem::Nlp(n) => {
            let e = n.al_eval(x, mult, rho)?;
            Ok(Measures {
                sigma: vecops::norm(&e.grad_x),
                theta: e.dual_norm(),
                grad_rho: e.grad_rho,
                al_value: e.value,
                objective,
            })
        }
        Problem::Composite(c) if composite_retained(c, mult) => {
            let e = al_composite_retained(c, x, &mult.lambda, &mult.mu, rho)?;
            let theta = (vecops::norm_sq(&e.grad_lambda) + vecops::norm_sq(&e.grad_mu)).sqrt();
            Ok(Measures {
                sigma: unit_prox_residual(&c.h, x, &e.smooth_grad)?,
                theta,
                grad_rho: e.grad_rho,
                al_value: e.value,
                objective,
            })
        }
        Problem::Composite(c) => {
            let e = al_composite_smooth(c, x, mult, rho)?;
            Ok(Measures {
                sigma: vecops::norm(&e.grad_x),
                theta: e.dual_norm(),
                grad_rho: e.grad_rho,
                al_value: e.value,
                objective,
            })
        }
        Problem::NcComposite(c) => {
            let v = nc_slack(c, x, &mult.lambda, rho)?;
            let e = al_nonconvex(c, x, &v, mult, rho)?;
            let sigma = if c.smooths_h() || c.h.is_zero() {
                vecops::norm(&e.grad_x)
            } else {
                limiting_residual(&c.h, x, &e.grad_x)?
            };
            Ok(Measures {
                sigma,
                theta: e.dual_norm(),
                grad_rho: e.grad_rho,
                al_value: e.value,
                objective,
            })
        }
        Problem::Ip(ip) => {
            let e = al_ip(ip, x, &mult.mu, rho)?;
            let rp = vecops::pos(&e.grad_mu);
            Ok(Measures {
                sigma: ip_sweep_move(ip, x, &mult.mu, rho)?,
                theta: vecops::norm_sq(&rp),
                grad_rho: e.grad_rho,
                al_value: e.value,
                objective,
            })
        }
    }
}

/// `ρ (z − Π_S(z))` with `z = y + m/ρ`, which equals `m + ρ(y − Π_S(z))`.
fn set_step(s: &SetSpec, y: &[f64], m: &[f64], rho: f64) -> Result<Vec<f64>> {
    let z = vecops::add_scaled(y, 1.0 / rho, m);
    let pz = project(s, &z)?;
    Ok(z.iter().zip(&pz).map(|(a, b)| rho * (a - b)).collect())
}

fn h_step(h: &ProxFn, x: &[f64], nu: &[f64], rho: f64) -> Result<Vec<f64>> {
    let z = vecops::add_scaled(x, 1.0 / rho, nu);
    let pz = h.prox(rho, &z)?;
    Ok(z.iter().zip(&pz).map(|(a, b)| rho * (a - b)).collect())
}

/// Multiplier step `Λ + ρ ∇_Λ𝕃` at the fresh inner iterate `x`; for
/// integer programs the projected step `max(μ + ρ(Ax − b), 0)`.
pub fn dual_update(p: &Problem, x: &[f64], mult: &Multipliers, rho: f64) -> Result<Multipliers> {
    crate::alfn::Penalty::new(rho)?;
    match p {
        Problem::Nlp(n) => {
            let mut out = Multipliers::default();
            if let (Some(c), Some(q)) = (&n.c, &n.q) {
                out.lambda = set_step(q, &c.eval(x)?, &mult.lambda, rho)?;
            }
            if let Some(k) = &n.k {
                out.mu = set_step(k, x, &mult.mu, rho)?;
            }
            Ok(out)
        }
        Problem::Composite(c) => {
            let mut out = Multipliers::default();
            if mult.has_nu() {
                out.nu = h_step(&c.h, x, &mult.nu, rho)?;
            }
            if let Some(q) = &c.q {
                out.lambda = set_step(q, &c.a.apply(x), &mult.lambda, rho)?;
            }
            if let Some(k) = &c.k {
                out.mu = set_step(k, x, &mult.mu, rho)?;
            }
            Ok(out)
        }
        Problem::NcComposite(c) => {
            let mut out = Multipliers::default();
            if c.smooths_h() {
                out.nu = h_step(&c.h, x, &mult.nu, rho)?;
            }
            out.lambda = set_step(&c.q, &c.c.eval(x)?, &mult.lambda, rho)?;
            if let Some(k) = &c.k {
                out.mu = set_step(k, x, &mult.mu, rho)?;
            }
            Ok(out)
        }
        Problem::Ip(ip) => {
            let r = ip.residual(x);
            let mu = mult
                .mu
                .iter()
                .zip(&r)
                .map(|(m, ri)| (m + rho * ri).max(0.0))
                .collect();
            Ok(Multipliers::new(vec![], vec![], mu))
        }
    }
}

fn signs_match(s: &SetSpec, m: &[f64]) -> bool {
    m.iter().enumerate().all(|(i, v)| match multiplier_sign(s, i) {
        1 => *v >= 0.0,
        -1 => *v <= 0.0,
        _ => true,
    })
}

/// Sign conventions of the multipliers for one-sided bounds.
pub(crate) fn sign_ok(p: &Problem, mult: &Multipliers) -> bool {
    let (q, k) = match p {
        Problem::Nlp(n) => (n.q.as_ref(), n.k.as_ref()),
        Problem::Composite(c) => (c.q.as_ref(), c.k.as_ref()),
        Problem::NcComposite(c) => (Some(&c.q), c.k.as_ref()),
        Problem::Ip(_) => return mult.mu.iter().all(|m| *m >= 0.0),
    };
    q.is_none_or(|s| signs_match(s, &mult.lambda)) && k.is_none_or(|s| signs_match(s, &mult.mu))
}

/// `f + (w/2)‖x − c‖²`
struct ProxReg<'a> {
    f: &'a dyn SmoothFn,
    center: &'a [f64],
    w: f64,
}

struct Shifted<'a> {
    op: Box<dyn LinOp + 'a>,
    w: f64,
}

impl LinOp for Shifted<'_> {
    fn rows(&self) -> usize {
        self.op.rows()
    }
    fn cols(&self) -> usize {
        self.op.cols()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.op.apply(x);
        vecops::axpy(self.w, x, &mut y);
        y
    }
    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        let mut x = self.op.adjoint(y);
        vecops::axpy(self.w, y, &mut x);
        x
    }
}

impl SmoothFn for ProxReg<'_> {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (v, mut g) = self.f.value_grad(x)?;
        let d = vecops::sub(x, self.center);
        vecops::axpy(self.w, &d, &mut g);
        Ok((v + 0.5 * self.w * vecops::norm_sq(&d), g))
    }
    fn hessian(&self, x: &[f64]) -> Result<Option<Box<dyn LinOp + '_>>> {
        Ok(self.f.hessian(x)?.map(|op| Box::new(Shifted { op, w: self.w }) as Box<dyn LinOp + '_>))
    }
}

/// Retained-slack AL with `v` eliminated by its block minimizer; the
/// gradient in `x` is unchanged by the elimination since `∇_v = 0` there.
struct NcElim<'a> {
    p: &'a NcCompositeProblem,
    mult: &'a Multipliers,
    rho: f64,
}

impl SmoothFn for NcElim<'_> {
    fn dim(&self) -> usize {
        self.p.dim()
    }
    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let v = nc_slack(self.p, x, &self.mult.lambda, self.rho)?;
        let e = al_nonconvex(self.p, x, &v, self.mult, self.rho)?;
        Ok((e.smooth_value, e.grad_x))
    }
}

fn run_smooth(f: &dyn SmoothFn, h: Option<&ProxFn>, x0: &[f64], solver: InnerSolver, opts: &InnerOpts) -> Result<InnerReport> {
    if let Some(h) = h {
        return prox_grad(f, h, x0, opts);
    }
    match solver {
        InnerSolver::GdBb => gd_bb(f, x0, opts),
        InnerSolver::Nag => nag(f, x0, opts, 0.0),
        InnerSolver::Ssn => ssn(f, x0, opts),
        InnerSolver::ProxGrad => prox_grad(f, &ProxFn::Zero, x0, opts),
    }
}

/// Minimizes `𝕃(·, Λ, ρ)` (plus `(w/2)‖x − c‖²` when `prox = Some((c, w))`)
/// from `x0` to stationarity `tol`.
#[allow(clippy::too_many_arguments)]
pub fn inner_solve(
    p: &Problem,
    x0: &[f64],
    mult: &Multipliers,
    rho: f64,
    solver: InnerSolver,
    base: &InnerOpts,
    tol: f64,
    prox: Option<(&[f64], f64)>,
    max_sweeps: usize,
) -> Result<InnerReport> {
    let mut opts = base.clone();
    opts.tol = tol;
    if opts.step_cap.is_none() {
        opts.step_cap = Some(1.0);
    }
    let wrap = |f: &dyn SmoothFn, h: Option<&ProxFn>| -> Result<InnerReport> {
        match prox {
            Some((c, w)) if w > 0.0 => run_smooth(&ProxReg { f, center: c, w }, h, x0, solver, &opts),
            _ => run_smooth(f, h, x0, solver, &opts),
        }
    };
    match p {
        Problem::Nlp(n) => wrap(&NlpAl { p: n, mult, rho }, None),
        Problem::Composite(c) if composite_retained(c, mult) => wrap(&RetainedAl { p: c, mult, rho }, Some(&c.h)),
        Problem::Composite(c) => wrap(&CompositeAl { p: c, mult, rho }, None),
        Problem::NcComposite(c) => {
            let h = (!c.smooths_h() && !c.h.is_zero()).then_some(&c.h);
            if solver == InnerSolver::Ssn {
                return Err(AlmError::Capability("no second-order oracle for the retained-slack AL".into()));
            }
            wrap(&NcElim { p: c, mult, rho }, h)
        }
        Problem::Ip(ip) => {
            if prox.is_some_and(|(_, w)| w > 0.0) {
                return Err(AlmError::Capability("proximal term not supported for integer programs".into()));
            }
            let cache = BlockCache::new(ip, BcdUpdate::Classical)?;
            let mut x = x0.to_vec();
            let (sweeps, moved, _) =
                bcd_until_still(ip, &mut x, &mult.mu, rho, BcdUpdate::Classical, &cache, max_sweeps)?;
            let mut rep = InnerReport::new(x);
            rep.iters = sweeps;
            rep.residual = moved;
            rep.trace.push(moved);
            rep.status = if moved == 0.0 { InnerStatus::Converged } else { InnerStatus::MaxIter };
            Ok(rep)
        }
    }
}

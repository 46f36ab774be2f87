//! AL value, x-gradient and dual (super)gradients for each problem class.

use super::oracle::SmoothFn;
use super::problem::{
    check_rho, CompositeProblem, IpProblem, Multipliers, NcCompositeProblem, NlpProblem,
};
use crate::error::{check_dim, check_finite_slice, check_finite_value, AlmError, Result};
use crate::numcore::{vecops, DenseMat, LinOp};
use crate::prox::{moreau, project, ProxFn, SetSpec};

/// Full AL evaluation at `(x, Λ, ρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlEval {
    pub value: f64,
    pub grad_x: Vec<f64>,
    pub grad_nu: Vec<f64>,
    pub grad_lambda: Vec<f64>,
    pub grad_mu: Vec<f64>,
    pub grad_rho: f64,
}

impl AlEval {
    /// `‖∇_Λ 𝕃‖`
    pub fn dual_norm(&self) -> f64 {
        (vecops::norm_sq(&self.grad_nu)
            + vecops::norm_sq(&self.grad_lambda)
            + vecops::norm_sq(&self.grad_mu))
        .sqrt()
    }

    pub fn dual_grad(&self) -> Multipliers {
        Multipliers::new(
            self.grad_nu.clone(),
            self.grad_lambda.clone(),
            self.grad_mu.clone(),
        )
    }
}

/// Dual gradients of the NLP AL.
#[derive(Debug, Clone, PartialEq)]
pub struct NlpDual {
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub rho: f64,
}

/// Residual pieces of a Moreau-smoothed set term at `z = y + m/ρ`.
struct SetTerm {
    /// `z − Π(z)`
    r: Vec<f64>,
    /// `y − Π(z)`, the dual gradient
    g: Vec<f64>,
}

fn set_term(s: &SetSpec, y: &[f64], m: &[f64], rho: f64) -> Result<SetTerm> {
    let z = vecops::add_scaled(y, 1.0 / rho, m);
    let p = project(s, &z)?;
    let r = vecops::sub(&z, &p);
    let g = vecops::sub(y, &p);
    Ok(SetTerm { r, g })
}

fn grad_rho_of(parts: &[&[f64]]) -> f64 {
    0.5 * parts.iter().map(|p| vecops::norm_sq(p)).sum::<f64>()
}

// --- NLP -------------------------------------------------------------------

fn nlp_check(p: &NlpProblem, x: &[f64], mult: &Multipliers, rho: f64) -> Result<()> {
    check_rho(rho)?;
    check_dim("al_nlp x", p.dim(), x.len())?;
    check_finite_slice("al_nlp x", x)?;
    if !mult.nu.is_empty() {
        return Err(AlmError::InvalidInput("NLP AL has no nu block".into()));
    }
    mult.check_shape(0, p.m(), if p.has_k() { p.dim() } else { 0 })
}

impl NlpProblem {
    pub fn al_eval(&self, x: &[f64], mult: &Multipliers, rho: f64) -> Result<AlEval> {
        nlp_check(self, x, mult, rho)?;
        let (fv, mut g) = self.f.value_grad(x)?;
        check_finite_value("f", fv)?;
        let mut value = fv;
        let mut grad_lambda = Vec::new();
        let mut grad_mu = Vec::new();
        if let (Some(c), Some(q)) = (&self.c, &self.q) {
            let cx = c.eval(x)?;
            check_finite_slice("c(x)", &cx)?;
            let t = set_term(q, &cx, &mult.lambda, rho)?;
            value += 0.5 * rho * vecops::norm_sq(&t.r);
            let j = c.jacobian(x)?;
            vecops::axpy(rho, &j.tmatvec(&t.r), &mut g);
            grad_lambda = t.g;
        }
        if let Some(k) = &self.k {
            let t = set_term(k, x, &mult.mu, rho)?;
            value += 0.5 * rho * vecops::norm_sq(&t.r);
            vecops::axpy(rho, &t.r, &mut g);
            grad_mu = t.g;
        }
        value -= mult.norm_sq() / (2.0 * rho);
        let grad_rho = grad_rho_of(&[&grad_lambda, &grad_mu]);
        Ok(AlEval {
            value,
            grad_x: g,
            grad_nu: Vec::new(),
            grad_lambda,
            grad_mu,
            grad_rho,
        })
    }
}

/// Value and x-gradient of the box-form NLP AL
/// `f + (ρ/2)‖c + λ/ρ − Π_Q(·)‖² + (ρ/2)‖x + μ/ρ − Π_K(·)‖² − (‖λ‖² + ‖μ‖²)/(2ρ)`.
pub fn al_nlp(
    p: &NlpProblem,
    x: &[f64],
    lambda: &[f64],
    mu: &[f64],
    rho: f64,
) -> Result<(f64, Vec<f64>)> {
    let e = p.al_eval(x, &Multipliers::new(vec![], lambda.to_vec(), mu.to_vec()), rho)?;
    Ok((e.value, e.grad_x))
}

/// Gradients of the NLP AL in `λ`, `μ` and `ρ`. For an inequality row
/// (`Q = (−∞, 0]`) the `λ` entry reduces to `max(−λ/ρ, c(x))`.
pub fn al_nlp_dual(
    p: &NlpProblem,
    x: &[f64],
    lambda: &[f64],
    mu: &[f64],
    rho: f64,
) -> Result<NlpDual> {
    let e = p.al_eval(x, &Multipliers::new(vec![], lambda.to_vec(), mu.to_vec()), rho)?;
    Ok(NlpDual {
        lambda: e.grad_lambda,
        mu: e.grad_mu,
        rho: e.grad_rho,
    })
}

/// One generalized Hessian of the NLP AL:
/// `W = ∇²f + Σ ψᵢ∇²cᵢ + ρ Jᵀ D_c J + ρ D_x`, with `ψ = ρ(z − Π_Q(z))`.
/// Selection entries are 0 when `z` lies in the closed interval.
pub struct NlpHessian<'a> {
    f_hess: Box<dyn LinOp + 'a>,
    c_hess: Option<DenseMat>,
    jac: Option<DenseMat>,
    dc: Vec<f64>,
    dx: Vec<f64>,
    rho: f64,
    n: usize,
}

impl NlpHessian<'_> {
    pub fn selection_c(&self) -> &[f64] {
        &self.dc
    }
    pub fn selection_x(&self) -> &[f64] {
        &self.dx
    }
}

impl LinOp for NlpHessian<'_> {
    fn rows(&self) -> usize {
        self.n
    }
    fn cols(&self) -> usize {
        self.n
    }
    fn apply(&self, d: &[f64]) -> Vec<f64> {
        let mut out = self.f_hess.apply(d);
        if let Some(h) = &self.c_hess {
            vecops::axpy(1.0, &h.matvec(d), &mut out);
        }
        if let Some(j) = &self.jac {
            let jd: Vec<f64> = j
                .matvec(d)
                .iter()
                .zip(&self.dc)
                .map(|(v, s)| v * s)
                .collect();
            vecops::axpy(self.rho, &j.tmatvec(&jd), &mut out);
        }
        for (i, s) in self.dx.iter().enumerate() {
            out[i] += self.rho * s * d[i];
        }
        out
    }
    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.apply(y)
    }
}

fn residual_selection(s: &SetSpec, z: &[f64]) -> Result<Vec<f64>> {
    let d = s
        .as_prox()
        .jacobian_diag(1.0, z)?
        .ok_or_else(|| AlmError::Capability(format!("no separable Jacobian for {}", s.as_prox().name())))?;
    Ok(d.iter().map(|v| 1.0 - v).collect())
}

pub fn gen_hessian_nlp<'a>(
    p: &'a NlpProblem,
    x: &[f64],
    lambda: &[f64],
    mu: &[f64],
    rho: f64,
) -> Result<NlpHessian<'a>> {
    let mult = Multipliers::new(vec![], lambda.to_vec(), mu.to_vec());
    nlp_check(p, x, &mult, rho)?;
    let n = p.dim();
    let f_hess = p
        .f
        .hessian(x)?
        .ok_or_else(|| AlmError::Capability("objective has no Hessian oracle".into()))?;
    let (mut c_hess, mut jac, mut dc) = (None, None, Vec::new());
    if let (Some(c), Some(q)) = (&p.c, &p.q) {
        let cx = c.eval(x)?;
        let z = vecops::add_scaled(&cx, 1.0 / rho, lambda);
        let pz = project(q, &z)?;
        let psi = vecops::scale(rho, &vecops::sub(&z, &pz));
        c_hess = Some(c.weighted_hessian(x, &psi)?.ok_or_else(|| {
            AlmError::Capability("constraint map has no second-order oracle".into())
        })?);
        dc = residual_selection(q, &z)?;
        jac = Some(c.jacobian(x)?);
    }
    let dx = match &p.k {
        Some(k) => residual_selection(k, &vecops::add_scaled(x, 1.0 / rho, mu))?,
        None => Vec::new(),
    };
    Ok(NlpHessian {
        f_hess,
        c_hess,
        jac,
        dc,
        dx,
        rho,
        n,
    })
}

// --- convex composite -------------------------------------------------------

fn composite_check(
    p: &CompositeProblem,
    x: &[f64],
    mult: &Multipliers,
    rho: f64,
    with_nu: bool,
) -> Result<()> {
    check_rho(rho)?;
    p.require_convex()?;
    check_dim("composite x", p.dim(), x.len())?;
    check_finite_slice("composite x", x)?;
    let nnu = if with_nu && !p.h.is_zero() { p.dim() } else { 0 };
    mult.check_shape(nnu, p.m(), if p.k.is_some() { p.dim() } else { 0 })
}

struct CompositeParts {
    value: f64,
    grad: Vec<f64>,
    grad_lambda: Vec<f64>,
    grad_mu: Vec<f64>,
}

/// `f + (ρ/2)‖Ax + λ/ρ − Π_Q‖² + (ρ/2)‖x + μ/ρ − Π_K‖²` and its gradient,
/// without `h` and without the constant terms.
fn composite_smooth_parts(
    p: &CompositeProblem,
    x: &[f64],
    mult: &Multipliers,
    rho: f64,
) -> Result<CompositeParts> {
    let (fv, mut g) = p.f.value_grad(x)?;
    check_finite_value("f", fv)?;
    let mut value = fv;
    let mut grad_lambda = Vec::new();
    let mut grad_mu = Vec::new();
    if let Some(q) = &p.q {
        let ax = p.a.apply(x);
        let t = set_term(q, &ax, &mult.lambda, rho)?;
        value += 0.5 * rho * vecops::norm_sq(&t.r);
        vecops::axpy(rho, &p.a.adjoint(&t.r), &mut g);
        grad_lambda = t.g;
    }
    if let Some(k) = &p.k {
        let t = set_term(k, x, &mult.mu, rho)?;
        value += 0.5 * rho * vecops::norm_sq(&t.r);
        vecops::axpy(rho, &t.r, &mut g);
        grad_mu = t.g;
    }
    Ok(CompositeParts {
        value,
        grad: g,
        grad_lambda,
        grad_mu,
    })
}

/// Fully smooth composite AL
/// `f + e_ρh(x + ν/ρ) + e_ρδ_Q(Ax + λ/ρ) + e_ρδ_K(x + μ/ρ) − ‖Λ‖²/(2ρ)`.
/// When `h` is [`ProxFn::Zero`] the `ν` block is absent.
pub fn al_composite_smooth(
    p: &CompositeProblem,
    x: &[f64],
    mult: &Multipliers,
    rho: f64,
) -> Result<AlEval> {
    composite_check(p, x, mult, rho, true)?;
    let parts = composite_smooth_parts(p, x, mult, rho)?;
    let mut value = parts.value;
    let mut g = parts.grad;
    let mut grad_nu = Vec::new();
    if !p.h.is_zero() {
        let z = vecops::add_scaled(x, 1.0 / rho, &mult.nu);
        let e = moreau(&p.h, rho, &z)?;
        value += e.value;
        vecops::axpy(1.0, &e.grad, &mut g);
        grad_nu = vecops::sub(x, &e.prox);
    }
    value -= mult.norm_sq() / (2.0 * rho);
    let grad_rho = grad_rho_of(&[&grad_nu, &parts.grad_lambda, &parts.grad_mu]);
    Ok(AlEval {
        value,
        grad_x: g,
        grad_nu,
        grad_lambda: parts.grad_lambda,
        grad_mu: parts.grad_mu,
        grad_rho,
    })
}

/// Composite AL with `h` kept as is.
#[derive(Debug, Clone)]
pub struct RetainedEval {
    /// Smooth part plus `h(x)` minus the constant terms.
    pub value: f64,
    /// Smooth part minus the constant terms (no `h`).
    pub smooth_value: f64,
    pub smooth_grad: Vec<f64>,
    pub h: ProxFn,
    pub grad_lambda: Vec<f64>,
    pub grad_mu: Vec<f64>,
    pub grad_rho: f64,
}

pub fn al_composite_retained(
    p: &CompositeProblem,
    x: &[f64],
    lambda: &[f64],
    mu: &[f64],
    rho: f64,
) -> Result<RetainedEval> {
    let mult = Multipliers::new(vec![], lambda.to_vec(), mu.to_vec());
    composite_check(p, x, &mult, rho, false)?;
    let parts = composite_smooth_parts(p, x, &mult, rho)?;
    let smooth_value = parts.value - mult.norm_sq() / (2.0 * rho);
    let hv = p.h.value(x)?;
    let grad_rho = grad_rho_of(&[&parts.grad_lambda, &parts.grad_mu]);
    Ok(RetainedEval {
        value: smooth_value + hv,
        smooth_value,
        smooth_grad: parts.grad,
        h: p.h.clone(),
        grad_lambda: parts.grad_lambda,
        grad_mu: parts.grad_mu,
        grad_rho,
    })
}

/// Generalized Hessian of the smooth composite AL:
/// `∇²f + ρ D_h + ρ Aᵀ D_Q A + ρ D_K`, where each `D = I − (prox/projection)'`.
pub struct CompositeHessian<'a> {
    f_hess: Box<dyn LinOp + 'a>,
    a: &'a dyn LinOp,
    dh: Vec<f64>,
    dq: Vec<f64>,
    dk: Vec<f64>,
    rho: f64,
    n: usize,
}

impl CompositeHessian<'_> {
    /// Number of active rows in the `Q` selection.
    pub fn active_q(&self) -> usize {
        self.dq.iter().filter(|v| **v != 0.0).count()
    }
}

impl LinOp for CompositeHessian<'_> {
    fn rows(&self) -> usize {
        self.n
    }
    fn cols(&self) -> usize {
        self.n
    }
    fn apply(&self, d: &[f64]) -> Vec<f64> {
        let mut out = self.f_hess.apply(d);
        for (i, s) in self.dh.iter().enumerate() {
            out[i] += self.rho * s * d[i];
        }
        if !self.dq.is_empty() && self.dq.iter().any(|v| *v != 0.0) {
            let ad: Vec<f64> = self
                .a
                .apply(d)
                .iter()
                .zip(&self.dq)
                .map(|(v, s)| v * s)
                .collect();
            vecops::axpy(self.rho, &self.a.adjoint(&ad), &mut out);
        }
        for (i, s) in self.dk.iter().enumerate() {
            out[i] += self.rho * s * d[i];
        }
        out
    }
    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.apply(y)
    }
}

pub fn gen_hessian_composite<'a>(
    p: &'a CompositeProblem,
    x: &[f64],
    mult: &Multipliers,
    rho: f64,
) -> Result<CompositeHessian<'a>> {
    composite_check(p, x, mult, rho, true)?;
    let f_hess = p
        .f
        .hessian(x)?
        .ok_or_else(|| AlmError::Capability("objective has no Hessian oracle".into()))?;
    let cap = |f: &ProxFn| AlmError::Capability(format!("no separable Jacobian for {}", f.name()));
    let dh = if p.h.is_zero() {
        Vec::new()
    } else {
        let z = vecops::add_scaled(x, 1.0 / rho, &mult.nu);
        p.h.jacobian_diag(rho, &z)?
            .ok_or_else(|| cap(&p.h))?
            .iter()
            .map(|v| 1.0 - v)
            .collect()
    };
    let dq = match &p.q {
        Some(q) => residual_selection(q, &vecops::add_scaled(&p.a.apply(x), 1.0 / rho, &mult.lambda))?,
        None => Vec::new(),
    };
    let dk = match &p.k {
        Some(k) => residual_selection(k, &vecops::add_scaled(x, 1.0 / rho, &mult.mu))?,
        None => Vec::new(),
    };
    Ok(CompositeHessian {
        f_hess,
        a: p.a.as_ref(),
        dh,
        dq,
        dk,
        rho,
        n: p.dim(),
    })
}

// --- nonconvex composite with retained slack -------------------------------

/// Evaluation of the retained-slack AL
/// `f + e_ρh(x + ν/ρ) + (ρ/2)‖c(x) − v + λ/ρ‖² + e_ρδ_K(x + μ/ρ) − ‖Λ‖²/(2ρ)`.
/// A nonconvex `h` is kept as `h(x)` (no `ν` block); `grad_x` then covers
/// only the smooth part.
#[derive(Debug, Clone)]
pub struct NcEval {
    pub value: f64,
    pub smooth_value: f64,
    pub grad_x: Vec<f64>,
    /// Gradient of the coupling term in `v`: `−ρ(c(x) − v + λ/ρ)`.
    pub grad_v: Vec<f64>,
    /// Block minimizer `Π_Q(c(x) + λ/ρ)` of the `v`-subproblem.
    pub v_hint: Vec<f64>,
    pub grad_nu: Vec<f64>,
    pub grad_lambda: Vec<f64>,
    pub grad_mu: Vec<f64>,
    pub grad_rho: f64,
}

impl NcEval {
    pub fn dual_norm(&self) -> f64 {
        (vecops::norm_sq(&self.grad_nu)
            + vecops::norm_sq(&self.grad_lambda)
            + vecops::norm_sq(&self.grad_mu))
        .sqrt()
    }
}

pub fn al_nonconvex(
    p: &NcCompositeProblem,
    x: &[f64],
    v: &[f64],
    mult: &Multipliers,
    rho: f64,
) -> Result<NcEval> {
    check_rho(rho)?;
    check_dim("al_nonconvex x", p.dim(), x.len())?;
    check_dim("al_nonconvex v", p.m(), v.len())?;
    check_finite_slice("al_nonconvex x", x)?;
    mult.check_shape(
        if p.smooths_h() { p.dim() } else { 0 },
        p.m(),
        if p.k.is_some() { p.dim() } else { 0 },
    )?;
    let (fv, mut g) = p.f.value_grad(x)?;
    check_finite_value("f", fv)?;
    let mut smooth = fv;
    let mut hv = 0.0;
    let mut grad_nu = Vec::new();
    if p.smooths_h() {
        let z = vecops::add_scaled(x, 1.0 / rho, &mult.nu);
        let e = moreau(&p.h, rho, &z)?;
        smooth += e.value;
        vecops::axpy(1.0, &e.grad, &mut g);
        grad_nu = vecops::sub(x, &e.prox);
    } else if !p.h.is_zero() {
        hv = p.h.value(x)?;
    }
    let cx = p.c.eval(x)?;
    check_finite_slice("c(x)", &cx)?;
    let w = vecops::add_scaled(&vecops::sub(&cx, v), 1.0 / rho, &mult.lambda);
    smooth += 0.5 * rho * vecops::norm_sq(&w);
    let j = p.c.jacobian(x)?;
    vecops::axpy(rho, &j.tmatvec(&w), &mut g);
    let grad_v = vecops::scale(-rho, &w);
    let v_hint = project(&p.q, &vecops::add_scaled(&cx, 1.0 / rho, &mult.lambda))?;
    let grad_lambda = vecops::sub(&cx, v);
    let mut grad_mu = Vec::new();
    if let Some(k) = &p.k {
        let t = set_term(k, x, &mult.mu, rho)?;
        smooth += 0.5 * rho * vecops::norm_sq(&t.r);
        vecops::axpy(rho, &t.r, &mut g);
        grad_mu = t.g;
    }
    smooth -= mult.norm_sq() / (2.0 * rho);
    let grad_rho = grad_rho_of(&[&grad_nu, &grad_lambda, &grad_mu]);
    Ok(NcEval {
        value: smooth + hv,
        smooth_value: smooth,
        grad_x: g,
        grad_v,
        v_hint,
        grad_nu,
        grad_lambda,
        grad_mu,
        grad_rho,
    })
}

// --- integer programs --------------------------------------------------------

/// `cᵀx + μᵀ(Ax − b) + (ρ/2)‖(Ax − b)₊‖²` with gradients in `x`, `μ`, `ρ`.
pub fn al_ip(p: &IpProblem, x: &[f64], mu: &[f64], rho: f64) -> Result<AlEval> {
    check_rho(rho)?;
    check_dim("al_ip x", p.dim(), x.len())?;
    check_dim("al_ip mu", p.m(), mu.len())?;
    check_finite_slice("al_ip x", x)?;
    if let Some(i) = mu.iter().position(|v| *v < 0.0 || !v.is_finite()) {
        return Err(AlmError::InvalidInput(format!(
            "IP multipliers must be nonnegative, mu[{i}] = {}",
            mu[i]
        )));
    }
    let r = p.residual(x);
    let rp = vecops::pos(&r);
    let value = vecops::dot(&p.c, x) + vecops::dot(mu, &r) + 0.5 * rho * vecops::norm_sq(&rp);
    let w = vecops::add_scaled(mu, rho, &rp);
    let grad_x = vecops::add(&p.c, &p.a.tmatvec(&w));
    let grad_rho = 0.5 * vecops::norm_sq(&rp);
    Ok(AlEval {
        value,
        grad_x,
        grad_nu: Vec::new(),
        grad_lambda: Vec::new(),
        grad_mu: r,
        grad_rho,
    })
}

/// AL value of an IP without input validation, for enumeration loops.
pub(crate) fn ip_al_value(p: &IpProblem, ax: &[f64], cx: f64, mu: &[f64], rho: f64) -> f64 {
    let mut v = cx;
    for ((a, b), m) in ax.iter().zip(&p.b).zip(mu) {
        let r = a - b;
        v += m * r;
        if r > 0.0 {
            v += 0.5 * rho * r * r;
        }
    }
    v
}

// --- AL objectives bound to fixed (Λ, ρ) ------------------------------------

/// `x ↦ 𝕃(x, Λ, ρ)` for an NLP, with the generalized Hessian attached.
pub struct NlpAl<'a> {
    pub p: &'a NlpProblem,
    pub mult: &'a Multipliers,
    pub rho: f64,
}

impl SmoothFn for NlpAl<'_> {
    fn dim(&self) -> usize {
        self.p.dim()
    }
    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let e = self.p.al_eval(x, self.mult, self.rho)?;
        Ok((e.value, e.grad_x))
    }
    fn hessian(&self, x: &[f64]) -> Result<Option<Box<dyn LinOp + '_>>> {
        match gen_hessian_nlp(self.p, x, &self.mult.lambda, &self.mult.mu, self.rho) {
            Ok(h) => Ok(Some(Box::new(h))),
            Err(AlmError::Capability(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// `x ↦ 𝕃(x, Λ, ρ)` for a convex composite problem, fully smooth form.
pub struct CompositeAl<'a> {
    pub p: &'a CompositeProblem,
    pub mult: &'a Multipliers,
    pub rho: f64,
}

impl SmoothFn for CompositeAl<'_> {
    fn dim(&self) -> usize {
        self.p.dim()
    }
    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let e = al_composite_smooth(self.p, x, self.mult, self.rho)?;
        Ok((e.value, e.grad_x))
    }
    fn hessian(&self, x: &[f64]) -> Result<Option<Box<dyn LinOp + '_>>> {
        match gen_hessian_composite(self.p, x, self.mult, self.rho) {
            Ok(h) => Ok(Some(Box::new(h))),
            Err(AlmError::Capability(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// Smooth part of the retained-`h` composite AL.
pub struct RetainedAl<'a> {
    pub p: &'a CompositeProblem,
    pub mult: &'a Multipliers,
    pub rho: f64,
}

impl SmoothFn for RetainedAl<'_> {
    fn dim(&self) -> usize {
        self.p.dim()
    }
    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let mult = &self.mult;
        composite_check(self.p, x, mult, self.rho, false)?;
        let parts = composite_smooth_parts(self.p, x, mult, self.rho)?;
        Ok((parts.value - mult.norm_sq() / (2.0 * self.rho), parts.grad))
    }
}

/// Smooth part of the retained-slack AL with `v` frozen.
pub struct NcAl<'a> {
    pub p: &'a NcCompositeProblem,
    pub v: &'a [f64],
    pub mult: &'a Multipliers,
    pub rho: f64,
}

impl SmoothFn for NcAl<'_> {
    fn dim(&self) -> usize {
        self.p.dim()
    }
    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let e = al_nonconvex(self.p, x, self.v, self.mult, self.rho)?;
        Ok((e.smooth_value, e.grad_x))
    }
}

/// Continuous relaxation of the IP AL in `x`.
pub struct IpAl<'a> {
    pub p: &'a IpProblem,
    pub mu: &'a [f64],
    pub rho: f64,
}

impl SmoothFn for IpAl<'_> {
    fn dim(&self) -> usize {
        self.p.dim()
    }
    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let e = al_ip(self.p, x, self.mu, self.rho)?;
        Ok((e.value, e.grad_x))
    }
}

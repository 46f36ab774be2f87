use serde::{Deserialize, Serialize};

use crate::alfn::{al_composite_retained, CompositeProblem, Multipliers};
use crate::error::{check_dim, AlmError, Result};
use crate::numcore::vecops;
use crate::prox::ProxFn;

/// Saddle function `𝕃(x, Λ)` with partial gradients and an optional
/// prox-friendly term `h(x)` handled by the primal step.
pub trait SaddleOracle {
    fn dim_x(&self) -> usize;
    fn dim_dual(&self) -> usize;
    fn grad_x(&self, x: &[f64], l: &[f64]) -> Result<Vec<f64>>;
    fn grad_dual(&self, x: &[f64], l: &[f64]) -> Result<Vec<f64>>;
    fn h(&self) -> &ProxFn {
        &ProxFn::Zero
    }
}

/// Steps `(τ, σ)`, extrapolations `a`, `b` and the Gauss-Seidel ratio `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdParams {
    pub tau: f64,
    pub sigma: f64,
    pub extrap_primal: f64,
    pub extrap_dual: f64,
    pub gs_ratio: f64,
}

impl PdParams {
    pub fn new(tau: f64, sigma: f64, a: f64, b: f64, g: f64) -> Result<Self> {
        if !(tau > 0.0 && sigma > 0.0) {
            return Err(AlmError::InvalidInput("primal-dual steps must be positive".into()));
        }
        if !((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&g) && b.is_finite()) {
            return Err(AlmError::InvalidInput("need a, g in [0, 1] and finite b".into()));
        }
        Ok(Self { tau, sigma, extrap_primal: a, extrap_dual: b, gs_ratio: g })
    }
    pub fn pdhg(tau: f64, sigma: f64) -> Self {
        Self { tau, sigma, extrap_primal: 0.0, extrap_dual: 0.0, gs_ratio: 0.0 }
    }
    pub fn gda(tau: f64, sigma: f64) -> Self {
        Self { tau, sigma, extrap_primal: 0.0, extrap_dual: 0.0, gs_ratio: 1.0 }
    }
    pub fn cp(tau: f64, sigma: f64) -> Self {
        Self { tau, sigma, extrap_primal: 0.0, extrap_dual: 1.0, gs_ratio: 0.0 }
    }
    pub fn ogda(tau: f64, sigma: f64) -> Self {
        Self { tau, sigma, extrap_primal: 1.0, extrap_dual: 1.0, gs_ratio: 1.0 }
    }
    pub fn sogda(tau: f64, sigma: f64) -> Self {
        Self { tau, sigma, extrap_primal: 0.0, extrap_dual: 1.0, gs_ratio: 1.0 }
    }

    pub fn preset(name: &str, tau: f64, sigma: f64) -> Result<Self> {
        match name {
            "pdhg" => Ok(Self::pdhg(tau, sigma)),
            "gda" => Ok(Self::gda(tau, sigma)),
            "cp" => Ok(Self::cp(tau, sigma)),
            "ogda" => Ok(Self::ogda(tau, sigma)),
            "sogda" => Ok(Self::sogda(tau, sigma)),
            other => Err(AlmError::InvalidInput(format!("unknown primal-dual preset {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdResult {
    pub x: Vec<f64>,
    pub l: Vec<f64>,
    pub iters: usize,
    /// The monitor asked to stop.
    pub stopped: bool,
}

/// Observer of `(k, x, Λ)`; returning true stops the iteration.
pub type Monitor<'a> = dyn FnMut(usize, &[f64], &[f64]) -> bool + 'a;

/// Unified primal-dual iteration
/// `x⁺ = prox_{τh}(x − τ((1+a)∇ₓ𝕃(x_k, Λ_k) − a∇ₓ𝕃(x_{k−1}, Λ_{k−1})))`,
/// `Λ⁺ = Λ + σ[g((1+b)∇_Λ𝕃(x_k, Λ_k) − b∇_Λ𝕃(x_{k−1}, Λ_{k−1}))
///          + (1−g)((1+b)∇_Λ𝕃(x_{k+1}, Λ_k) − b∇_Λ𝕃(x_k, Λ_k))]`.
/// The `k − 1` slots start as copies of the `k = 0` gradients. The monitor
/// sees `(k + 1, x_{k+1}, Λ_{k+1})` and returns true to stop.
pub fn updf(
    oracle: &dyn SaddleOracle,
    params: &PdParams,
    x0: &[f64],
    l0: &[f64],
    iters: usize,
    monitor: &mut Monitor,
) -> Result<PdResult> {
    check_dim("updf x0", oracle.dim_x(), x0.len())?;
    check_dim("updf l0", oracle.dim_dual(), l0.len())?;
    let PdParams { tau, sigma, extrap_primal: a, extrap_dual: b, gs_ratio: g } = *params;
    let mut x = x0.to_vec();
    let mut l = l0.to_vec();
    let mut gx_prev: Option<Vec<f64>> = None;
    let mut gl_prev: Option<Vec<f64>> = None;
    let mut stopped = false;
    let mut k = 0;
    while k < iters {
        let gx = oracle.grad_x(&x, &l)?;
        let gl = oracle.grad_dual(&x, &l)?;
        let gxp = gx_prev.as_ref().unwrap_or(&gx);
        let glp = gl_prev.as_ref().unwrap_or(&gl);
        let dir: Vec<f64> = gx.iter().zip(gxp).map(|(c, p)| (1.0 + a) * c - a * p).collect();
        let x_new = oracle.h().prox(1.0 / tau, &vecops::add_scaled(&x, -tau, &dir))?;
        let mut step = vec![0.0; l.len()];
        if g > 0.0 {
            for ((s, c), p) in step.iter_mut().zip(&gl).zip(glp) {
                *s += g * ((1.0 + b) * c - b * p);
            }
        }
        if g < 1.0 {
            let gh = oracle.grad_dual(&x_new, &l)?;
            for ((s, h), c) in step.iter_mut().zip(&gh).zip(&gl) {
                *s += (1.0 - g) * ((1.0 + b) * h - b * c);
            }
        }
        let l_new = vecops::add_scaled(&l, sigma, &step);
        gx_prev = Some(gx);
        gl_prev = Some(gl);
        x = x_new;
        l = l_new;
        k += 1;
        if monitor(k, &x, &l) {
            stopped = true;
            break;
        }
    }
    Ok(PdResult { x, l, iters: k, stopped })
}

/// The retained-`h` composite AL at fixed `ρ` as a saddle function in
/// `(x, (λ, μ))`.
pub struct CompositeSaddle<'a> {
    pub p: &'a CompositeProblem,
    pub rho: f64,
}

impl CompositeSaddle<'_> {
    fn split(&self, l: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let m = self.p.m();
        (l[..m].to_vec(), l[m..].to_vec())
    }
}

impl SaddleOracle for CompositeSaddle<'_> {
    fn dim_x(&self) -> usize {
        self.p.dim()
    }
    fn dim_dual(&self) -> usize {
        self.p.m() + if self.p.k.is_some() { self.p.dim() } else { 0 }
    }
    fn grad_x(&self, x: &[f64], l: &[f64]) -> Result<Vec<f64>> {
        let (lam, mu) = self.split(l);
        Ok(al_composite_retained(self.p, x, &lam, &mu, self.rho)?.smooth_grad)
    }
    fn grad_dual(&self, x: &[f64], l: &[f64]) -> Result<Vec<f64>> {
        let (lam, mu) = self.split(l);
        let e = al_composite_retained(self.p, x, &lam, &mu, self.rho)?;
        Ok(Multipliers::new(vec![], e.grad_lambda, e.grad_mu).stacked())
    }
    fn h(&self) -> &ProxFn {
        &self.p.h
    }
}

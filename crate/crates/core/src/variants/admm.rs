use serde::{Deserialize, Serialize};

use crate::error::{check_dim, AlmError, Result};
use crate::numcore::{vecops, DenseMat};
use crate::prox::ProxFn;

/// One ADMM block: the map `A_i` and the minimizer of
/// `f_i(x) + (ρ/2)‖A_i x − v‖²`.
pub trait AdmmBlock {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    fn adjoint(&self, y: &[f64]) -> Vec<f64>;
    fn argmin(&self, v: &[f64], rho: f64) -> Result<Vec<f64>>;
}

/// `f = h` with `A = s I`: the minimizer is `prox_{h/(ρs²)}(v/s)`.
#[derive(Debug, Clone)]
pub struct ProxBlock {
    pub h: ProxFn,
    pub n: usize,
    pub scale: f64,
}

impl AdmmBlock for ProxBlock {
    fn dim(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        vecops::scale(self.scale, x)
    }
    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        vecops::scale(self.scale, y)
    }
    fn argmin(&self, v: &[f64], rho: f64) -> Result<Vec<f64>> {
        let s = self.scale;
        self.h.prox(rho * s * s, &vecops::scale(1.0 / s, v))
    }
}

/// `f = ½xᵀHx + gᵀx` with a dense `A`: solves `(H + ρAᵀA)x = ρAᵀv − g`.
#[derive(Debug, Clone)]
pub struct QuadBlock {
    pub h: DenseMat,
    pub g: Vec<f64>,
    pub a: DenseMat,
}

impl AdmmBlock for QuadBlock {
    fn dim(&self) -> usize {
        self.g.len()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.a.matvec(x)
    }
    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.a.tmatvec(y)
    }
    fn argmin(&self, v: &[f64], rho: f64) -> Result<Vec<f64>> {
        let lhs = self.h.add(&self.a.transpose().matmul(&self.a).scaled(rho));
        let mut rhs = vecops::scale(rho, &self.a.tmatvec(v));
        vecops::axpy(-1.0, &self.g, &mut rhs);
        lhs.solve_spd(&rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmmParams {
    pub rho: f64,
    /// Dual step factor in `(0, (1 + √5)/2)`.
    pub tau: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl AdmmParams {
    pub fn new(rho: f64, tau: f64) -> Result<Self> {
        let golden = 0.5 * (1.0 + 5f64.sqrt());
        if !(rho > 0.0) {
            return Err(AlmError::InvalidInput(format!("rho must be positive, got {rho}")));
        }
        if !(tau > 0.0 && tau < golden) {
            return Err(AlmError::InvalidInput(format!("tau must lie in (0, {golden}), got {tau}")));
        }
        Ok(Self { rho, tau, max_iter: 10_000, tol: 1e-8 })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmmReport {
    pub x1: Vec<f64>,
    pub x2: Vec<f64>,
    pub lambda: Vec<f64>,
    pub iters: usize,
    pub converged: bool,
    /// `‖A₁x₁ + A₂x₂ − b‖` per iteration.
    pub primal_res: Vec<f64>,
    /// `ρ‖A₁ᵀA₂(x₂⁺ − x₂)‖` per iteration.
    pub dual_res: Vec<f64>,
}

/// Two-block ADMM on `min f₁(x₁) + f₂(x₂) s.t. A₁x₁ + A₂x₂ = b` with
/// `λ ← λ + τρ(A₁x₁ + A₂x₂ − b)`.
pub fn admm2(b1: &dyn AdmmBlock, b2: &dyn AdmmBlock, b: &[f64], params: &AdmmParams) -> Result<AdmmReport> {
    let AdmmParams { rho, tau, .. } = AdmmParams::new(params.rho, params.tau)?;
    let mut x1 = vec![0.0; b1.dim()];
    let mut x2 = vec![0.0; b2.dim()];
    check_dim("admm b", b.len(), b1.apply(&x1).len())?;
    check_dim("admm b", b.len(), b2.apply(&x2).len())?;
    let mut lam = vec![0.0; b.len()];
    let mut rep = AdmmReport {
        x1: Vec::new(),
        x2: Vec::new(),
        lambda: Vec::new(),
        iters: 0,
        converged: false,
        primal_res: Vec::new(),
        dual_res: Vec::new(),
    };
    for it in 0..params.max_iter {
        let a2x2 = b2.apply(&x2);
        let v1: Vec<f64> = b.iter().zip(&a2x2).zip(&lam).map(|((bi, a), l)| bi - a - l / rho).collect();
        x1 = b1.argmin(&v1, rho)?;
        let a1x1 = b1.apply(&x1);
        let v2: Vec<f64> = b.iter().zip(&a1x1).zip(&lam).map(|((bi, a), l)| bi - a - l / rho).collect();
        let x2_new = b2.argmin(&v2, rho)?;
        let a2_new = b2.apply(&x2_new);
        let r: Vec<f64> = a1x1.iter().zip(&a2_new).zip(b).map(|((a, c), bi)| a + c - bi).collect();
        vecops::axpy(tau * rho, &r, &mut lam);
        let s = rho * vecops::norm(&b1.adjoint(&vecops::sub(&a2_new, &a2x2)));
        x2 = x2_new;
        let pr = vecops::norm(&r);
        rep.primal_res.push(pr);
        rep.dual_res.push(s);
        rep.iters = it + 1;
        if pr <= params.tol && s <= params.tol {
            rep.converged = true;
            break;
        }
    }
    rep.x1 = x1;
    rep.x2 = x2;
    rep.lambda = lam;
    Ok(rep)
}

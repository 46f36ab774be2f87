//! Problem adapters and seeded instance generators.

mod generators;
mod sdp;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::alfn::{
    AffineMap, CompositeProblem, IpProblem, LeastSquares, Linear, Multipliers, NcCompositeProblem,
    NlpProblem, Problem, Quadratic,
};
use crate::error::{check_dim, AlmError, Result};
use crate::numcore::{jacobi_eig, vecops, DenseMat, SymMat};
use crate::prox::{BoxBounds, ProxFn, SetSpec};

pub use generators::{
    basis_pursuit_instance, ip_block_toy, ip_enumerate, ip_toy, lasso_random, lp_random, portfolio_random,
    qp_active_set, qp_box, sc_constants, toy_nlp,
};
pub use sdp::{maxcut_edge, sdp_kkt_residual, sdp_random, SdpKkt};

/// How a known optimum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Analytic,
    ActiveSetKkt,
    BruteForce,
    Planted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownOptimum {
    pub value: f64,
    pub x: Option<Vec<f64>>,
    pub mult: Option<Multipliers>,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "weight", rename_all = "snake_case")]
pub enum PortfolioReg {
    None,
    L1(f64),
    L0(f64),
}

/// Raw data from which an instance is built; serializable so generated
/// instances can be stored and reloaded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InstanceData {
    ToyNlp,
    Lasso { a: DenseMat, b: Vec<f64>, gamma: f64 },
    LassoDual { a: DenseMat, b: Vec<f64>, gamma: f64 },
    BasisPursuit { a: DenseMat, b: Vec<f64>, x_star: Vec<f64> },
    LpBox {
        c: Vec<f64>,
        a: DenseMat,
        lq: Vec<f64>,
        uq: Vec<f64>,
        lk: Vec<f64>,
        uk: Vec<f64>,
    },
    /// `min ½xᵀHx + gᵀx s.t. Ax ≤ u`
    QpBox { h: DenseMat, g: Vec<f64>, a: DenseMat, u: Vec<f64> },
    Portfolio { q: DenseMat, gamma: Vec<f64>, varrho: f64, u: f64, reg: PortfolioReg },
    SdpEq { c: SymMat, ops: Vec<SymMat>, b: Vec<f64> },
    Ip(IpProblem),
}

impl InstanceData {
    pub fn kind(&self) -> &'static str {
        match self {
            InstanceData::ToyNlp => "toy_nlp",
            InstanceData::Lasso { .. } => "lasso",
            InstanceData::LassoDual { .. } => "lasso_dual",
            InstanceData::BasisPursuit { .. } => "bp",
            InstanceData::LpBox { .. } => "lp",
            InstanceData::QpBox { .. } => "qp",
            InstanceData::Portfolio { .. } => "portfolio",
            InstanceData::SdpEq { .. } => "sdp",
            InstanceData::Ip(_) => "ip",
        }
    }

    /// Builds the problem object for this data.
    pub fn build_problem(&self) -> Result<Problem> {
        match self {
            InstanceData::ToyNlp => {
                let f = Quadratic::new(DenseMat::identity(1).scaled(2.0), vec![0.0], 0.0)?;
                let c = AffineMap::new(DenseMat::from_rows(&[vec![-1.0]])?, vec![1.0])?;
                Ok(Problem::Nlp(NlpProblem::new(
                    Arc::new(f),
                    Some(Arc::new(c)),
                    Some(SetSpec::nonpos()),
                    None,
                )?))
            }
            InstanceData::Lasso { a, b, gamma } => {
                check_dim("lasso b", a.nrows(), b.len())?;
                let f = LeastSquares::new(Arc::new(a.clone()), b.clone())?;
                Ok(Problem::Composite(CompositeProblem::new(Arc::new(f), ProxFn::l1(*gamma)?, None, None, None)?))
            }
            InstanceData::LassoDual { a, b, gamma } => {
                check_dim("lasso b", a.nrows(), b.len())?;
                if !(*gamma > 0.0) {
                    return Err(AlmError::InvalidInput("lasso weight must be positive".into()));
                }
                let m = b.len();
                let f = Quadratic::new(DenseMat::identity(m), vecops::scale(-1.0, b), 0.5 * vecops::norm_sq(b))?;
                Ok(Problem::Composite(CompositeProblem::new(
                    Arc::new(f),
                    ProxFn::Zero,
                    Some(Arc::new(a.transpose())),
                    Some(SetSpec::inf_ball(*gamma)?),
                    None,
                )?))
            }
            InstanceData::BasisPursuit { a, b, .. } => {
                check_dim("basis pursuit b", a.nrows(), b.len())?;
                Ok(Problem::Composite(CompositeProblem::new(
                    Arc::new(Linear { c: vec![0.0; a.ncols()] }),
                    ProxFn::l1(1.0)?,
                    Some(Arc::new(a.clone())),
                    Some(SetSpec::point(b.clone())?),
                    None,
                )?))
            }
            InstanceData::LpBox { c, a, lq, uq, lk, uk } => {
                check_dim("lp c", a.ncols(), c.len())?;
                let q = SetSpec::boxed(BoxBounds::from_f64(lq, uq)?)?;
                let k = SetSpec::boxed(BoxBounds::from_f64(lk, uk)?)?;
                let q = (a.nrows() > 0).then_some(q);
                let op: Option<crate::numcore::SharedOp> = q.as_ref().map(|_| Arc::new(a.clone()) as _);
                Ok(Problem::Composite(CompositeProblem::new(
                    Arc::new(Linear { c: c.clone() }),
                    ProxFn::Zero,
                    op,
                    q,
                    Some(k),
                )?))
            }
            InstanceData::QpBox { h, g, a, u } => {
                let f = Quadratic::new(h.clone(), g.clone(), 0.0)?;
                let c = AffineMap::new(a.clone(), vec![0.0; a.nrows()])?;
                let lo = vec![f64::NEG_INFINITY; u.len()];
                let q = SetSpec::boxed(BoxBounds::from_f64(&lo, u)?)?;
                Ok(Problem::Nlp(NlpProblem::new(Arc::new(f), Some(Arc::new(c)), Some(q), None)?))
            }
            InstanceData::Portfolio { q, gamma, varrho, u, reg } => portfolio(q, gamma, *varrho, *u, *reg),
            InstanceData::SdpEq { c, ops, b } => sdp::sdp_eq(c, ops, b),
            InstanceData::Ip(p) => Ok(Problem::Ip(p.clone())),
        }
    }
}

/// A problem with its metadata.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub seed: Option<u64>,
    pub data: InstanceData,
    pub problem: Problem,
    pub known: Option<KnownOptimum>,
}

impl Instance {
    pub fn new(name: impl Into<String>, seed: Option<u64>, data: InstanceData) -> Result<Self> {
        let problem = data.build_problem()?;
        Ok(Self { name: name.into(), seed, data, problem, known: None })
    }

    pub fn with_known(mut self, k: KnownOptimum) -> Self {
        self.known = Some(k);
        self
    }

    /// Planted solution, if the generator planted one.
    pub fn planted(&self) -> Option<&[f64]> {
        match &self.data {
            InstanceData::BasisPursuit { x_star, .. } => Some(x_star),
            _ => None,
        }
    }

    /// `‖x − x*‖ / max(‖x*‖, 1)` against the planted solution.
    pub fn rel_err(&self, x: &[f64]) -> Option<f64> {
        self.planted().map(|xs| rel_err(x, xs))
    }

    /// Original objective at a point expressed in this instance's primal
    /// variables. For the dual LASSO the primal point is the multiplier.
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        self.problem.objective(x)
    }
}

pub fn rel_err(x: &[f64], x_star: &[f64]) -> f64 {
    vecops::dist(x, x_star) / vecops::norm(x_star).max(1.0)
}

pub fn lasso(a: DenseMat, b: Vec<f64>, gamma: f64) -> Result<Instance> {
    if !(gamma > 0.0) {
        return Err(AlmError::InvalidInput(format!("lasso weight must be positive, got {gamma}")));
    }
    Instance::new("lasso", None, InstanceData::Lasso { a, b, gamma })
}

pub fn lasso_dual(a: DenseMat, b: Vec<f64>, gamma: f64) -> Result<Instance> {
    Instance::new("lasso_dual", None, InstanceData::LassoDual { a, b, gamma })
}

/// `½‖Ax − b‖² + γ‖x‖₁`
pub fn lasso_objective(a: &DenseMat, b: &[f64], gamma: f64, x: &[f64]) -> f64 {
    0.5 * vecops::norm_sq(&vecops::sub(&a.matvec(x), b)) + gamma * x.iter().map(|v| v.abs()).sum::<f64>()
}

pub fn lp_box(
    c: Vec<f64>,
    a: DenseMat,
    lq: Vec<f64>,
    uq: Vec<f64>,
    lk: Vec<f64>,
    uk: Vec<f64>,
) -> Result<Instance> {
    Instance::new("lp_box", None, InstanceData::LpBox { c, a, lq, uq, lk, uk })
}

fn portfolio(q: &DenseMat, gamma: &[f64], varrho: f64, u: f64, reg: PortfolioReg) -> Result<Problem> {
    let n = gamma.len();
    check_dim("portfolio covariance", n, q.nrows())?;
    let qs = SymMat::new(q.clone())?;
    let eig = jacobi_eig(&qs)?;
    if eig.vals.last().is_some_and(|v| *v < -1e-10 * (1.0 + eig.vals[0].abs())) {
        log::warn!("portfolio covariance is indefinite (min eigenvalue {})", eig.vals[n - 1]);
    }
    if !(u > 0.0) {
        return Err(AlmError::InvalidInput(format!("upper bound must be positive, got {u}")));
    }
    let f = Arc::new(Quadratic::new(q.clone(), vec![0.0; n], 0.0)?);
    let k = SetSpec::boxed(BoxBounds::uniform(0.0, u)?)?;
    match reg {
        PortfolioReg::L0(alpha) => {
            let a = DenseMat::from_rows(&[vecops::scale(-1.0, gamma), vec![1.0; n]])?;
            let c = AffineMap::new(a, vec![varrho, -1.0])?;
            Ok(Problem::NcComposite(NcCompositeProblem::new(
                f,
                ProxFn::l0(alpha)?,
                Arc::new(c),
                SetSpec::nonpos(),
                Some(k),
            )?))
        }
        PortfolioReg::L1(_) | PortfolioReg::None => {
            let h = match reg {
                PortfolioReg::L1(g) => ProxFn::l1(g)?,
                _ => ProxFn::Zero,
            };
            let a = DenseMat::from_rows(&[vecops::scale(-1.0, gamma), vec![1.0; n]])?;
            let qset = SetSpec::boxed(BoxBounds::from_f64(&[f64::NEG_INFINITY; 2], &[-varrho, 1.0])?)?;
            Ok(Problem::Composite(CompositeProblem::new(f, h, Some(Arc::new(a)), Some(qset), Some(k))?))
        }
    }
}

/// Portfolio selection `min ½xᵀQx + reg(x) s.t. γᵀx ≥ ϱ, 1ᵀx ≤ 1, 0 ≤ x ≤ u`.
pub fn portfolio_instance(q: DenseMat, gamma: Vec<f64>, varrho: f64, u: f64, reg: PortfolioReg) -> Result<Instance> {
    Instance::new("portfolio", None, InstanceData::Portfolio { q, gamma, varrho, u, reg })
}

/// Largest `γᵀx` over `1ᵀx ≤ 1, 0 ≤ x ≤ u` (greedy fill).
pub fn max_return(gamma: &[f64], u: f64) -> f64 {
    let mut g: Vec<f64> = gamma.iter().copied().filter(|v| *v > 0.0).collect();
    g.sort_by(|a, b| b.total_cmp(a));
    let mut budget = 1.0f64;
    let mut total = 0.0;
    for v in g {
        let take = u.min(budget);
        total += take * v;
        budget -= take;
        if budget <= 0.0 {
            break;
        }
    }
    total
}

pub use generators::basis_pursuit_from_parts;

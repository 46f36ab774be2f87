//! Smooth scalar and vector oracles plus a few concrete implementations.

use std::fmt;
use std::sync::Arc;

use crate::error::{check_dim, check_finite_slice, AlmError, Result};
use crate::numcore::{vecops, DenseMat, LinOp, SharedOp};

/// A differentiable scalar function. `hessian` is optional; solvers that
/// need second-order information report a capability error without it.
pub trait SmoothFn: Send + Sync {
    fn dim(&self) -> usize;

    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)>;

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.value_grad(x)?.0)
    }

    /// An element of the (generalized) Hessian at `x`, as an operator.
    fn hessian(&self, _x: &[f64]) -> Result<Option<Box<dyn LinOp + '_>>> {
        Ok(None)
    }
}

/// A differentiable vector map `c: R^n → R^m` with dense Jacobian.
pub trait VectorMap: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn jacobian(&self, x: &[f64]) -> Result<DenseMat>;

    /// `Σ uᵢ ∇²cᵢ(x)` if available.
    fn weighted_hessian(&self, _x: &[f64], _u: &[f64]) -> Result<Option<DenseMat>> {
        Ok(None)
    }
}

pub type SharedFn = Arc<dyn SmoothFn>;
pub type SharedMap = Arc<dyn VectorMap>;

/// `½ xᵀHx + gᵀx + c0`
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub h: DenseMat,
    pub g: Vec<f64>,
    pub c0: f64,
}

impl Quadratic {
    pub fn new(h: DenseMat, g: Vec<f64>, c0: f64) -> Result<Self> {
        if h.nrows() != h.ncols() {
            return Err(AlmError::InvalidInput("quadratic term must be square".into()));
        }
        check_dim("Quadratic", h.nrows(), g.len())?;
        check_finite_slice("Quadratic linear term", &g)?;
        Ok(Self { h, g, c0 })
    }
}

impl SmoothFn for Quadratic {
    fn dim(&self) -> usize {
        self.g.len()
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        let hx = self.h.matvec(x);
        Ok(0.5 * vecops::dot(x, &hx) + vecops::dot(&self.g, x) + self.c0)
    }
    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dim("Quadratic", self.dim(), x.len())?;
        let hx = self.h.matvec(x);
        let v = 0.5 * vecops::dot(x, &hx) + vecops::dot(&self.g, x) + self.c0;
        Ok((v, vecops::add(&hx, &self.g)))
    }
    fn hessian(&self, _x: &[f64]) -> Result<Option<Box<dyn LinOp + '_>>> {
        Ok(Some(Box::new(MatRef(&self.h))))
    }
}

/// `⟨c, x⟩`
#[derive(Debug, Clone)]
pub struct Linear {
    pub c: Vec<f64>,
}

impl SmoothFn for Linear {
    fn dim(&self) -> usize {
        self.c.len()
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(vecops::dot(&self.c, x))
    }
    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dim("Linear", self.dim(), x.len())?;
        Ok((vecops::dot(&self.c, x), self.c.clone()))
    }
    fn hessian(&self, _x: &[f64]) -> Result<Option<Box<dyn LinOp + '_>>> {
        Ok(Some(Box::new(ZeroOp(self.c.len()))))
    }
}

/// `½‖Ax − b‖²`
#[derive(Clone)]
pub struct LeastSquares {
    pub a: SharedOp,
    pub b: Vec<f64>,
}

impl fmt::Debug for LeastSquares {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LeastSquares({}x{})", self.a.rows(), self.a.cols())
    }
}

impl LeastSquares {
    pub fn new(a: SharedOp, b: Vec<f64>) -> Result<Self> {
        check_dim("LeastSquares", a.rows(), b.len())?;
        Ok(Self { a, b })
    }
}

impl SmoothFn for LeastSquares {
    fn dim(&self) -> usize {
        self.a.cols()
    }
    fn value(&self, x: &[f64]) -> Result<f64> {
        let r = vecops::sub(&self.a.apply(x), &self.b);
        Ok(0.5 * vecops::norm_sq(&r))
    }
    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dim("LeastSquares", self.dim(), x.len())?;
        let r = vecops::sub(&self.a.apply(x), &self.b);
        Ok((0.5 * vecops::norm_sq(&r), self.a.adjoint(&r)))
    }
    fn hessian(&self, _x: &[f64]) -> Result<Option<Box<dyn LinOp + '_>>> {
        Ok(Some(Box::new(NormalOp(self.a.as_ref()))))
    }
}

type ValueGradFn = dyn Fn(&[f64]) -> Result<(f64, Vec<f64>)> + Send + Sync;
type HessFn = dyn Fn(&[f64]) -> Result<DenseMat> + Send + Sync;

/// Closure-backed smooth function.
#[derive(Clone)]
pub struct FnSmooth {
    n: usize,
    vg: Arc<ValueGradFn>,
    hess: Option<Arc<HessFn>>,
}

impl fmt::Debug for FnSmooth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnSmooth(n={}, hess={})", self.n, self.hess.is_some())
    }
}

impl FnSmooth {
    pub fn new<F>(n: usize, vg: F) -> Self
    where
        F: Fn(&[f64]) -> Result<(f64, Vec<f64>)> + Send + Sync + 'static,
    {
        Self {
            n,
            vg: Arc::new(vg),
            hess: None,
        }
    }

    pub fn with_hessian<H>(mut self, h: H) -> Self
    where
        H: Fn(&[f64]) -> Result<DenseMat> + Send + Sync + 'static,
    {
        self.hess = Some(Arc::new(h));
        self
    }
}

impl SmoothFn for FnSmooth {
    fn dim(&self) -> usize {
        self.n
    }
    fn value_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        check_dim("FnSmooth", self.n, x.len())?;
        (self.vg)(x)
    }
    fn hessian(&self, x: &[f64]) -> Result<Option<Box<dyn LinOp + '_>>> {
        match &self.hess {
            Some(h) => Ok(Some(Box::new(h(x)?))),
            None => Ok(None),
        }
    }
}

/// `c(x) = Ax + offset`
#[derive(Debug, Clone)]
pub struct AffineMap {
    pub a: DenseMat,
    pub offset: Vec<f64>,
}

impl AffineMap {
    pub fn new(a: DenseMat, offset: Vec<f64>) -> Result<Self> {
        check_dim("AffineMap", a.nrows(), offset.len())?;
        Ok(Self { a, offset })
    }
}

impl VectorMap for AffineMap {
    fn dim_in(&self) -> usize {
        self.a.ncols()
    }
    fn dim_out(&self) -> usize {
        self.a.nrows()
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim("AffineMap", self.dim_in(), x.len())?;
        Ok(vecops::add(&self.a.matvec(x), &self.offset))
    }
    fn jacobian(&self, _x: &[f64]) -> Result<DenseMat> {
        Ok(self.a.clone())
    }
    fn weighted_hessian(&self, _x: &[f64], _u: &[f64]) -> Result<Option<DenseMat>> {
        let n = self.dim_in();
        Ok(Some(DenseMat::zeros(n, n)))
    }
}

type EvalFn = dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync;
type JacFn = dyn Fn(&[f64]) -> Result<DenseMat> + Send + Sync;
type WHessFn = dyn Fn(&[f64], &[f64]) -> Result<DenseMat> + Send + Sync;

/// Closure-backed vector map.
#[derive(Clone)]
pub struct FnMap {
    n: usize,
    m: usize,
    eval: Arc<EvalFn>,
    jac: Arc<JacFn>,
    whess: Option<Arc<WHessFn>>,
}

impl fmt::Debug for FnMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnMap({} -> {})", self.n, self.m)
    }
}

impl FnMap {
    pub fn new<E, J>(n: usize, m: usize, eval: E, jac: J) -> Self
    where
        E: Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync + 'static,
        J: Fn(&[f64]) -> Result<DenseMat> + Send + Sync + 'static,
    {
        Self {
            n,
            m,
            eval: Arc::new(eval),
            jac: Arc::new(jac),
            whess: None,
        }
    }

    pub fn with_weighted_hessian<W>(mut self, w: W) -> Self
    where
        W: Fn(&[f64], &[f64]) -> Result<DenseMat> + Send + Sync + 'static,
    {
        self.whess = Some(Arc::new(w));
        self
    }
}

impl VectorMap for FnMap {
    fn dim_in(&self) -> usize {
        self.n
    }
    fn dim_out(&self) -> usize {
        self.m
    }
    fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim("FnMap", self.n, x.len())?;
        let v = (self.eval)(x)?;
        check_dim("FnMap output", self.m, v.len())?;
        Ok(v)
    }
    fn jacobian(&self, x: &[f64]) -> Result<DenseMat> {
        let j = (self.jac)(x)?;
        check_dim("FnMap jacobian rows", self.m, j.nrows())?;
        check_dim("FnMap jacobian cols", self.n, j.ncols())?;
        Ok(j)
    }
    fn weighted_hessian(&self, x: &[f64], u: &[f64]) -> Result<Option<DenseMat>> {
        match &self.whess {
            Some(w) => Ok(Some(w(x, u)?)),
            None => Ok(None),
        }
    }
}

pub(crate) struct MatRef<'a>(pub &'a DenseMat);

impl LinOp for MatRef<'_> {
    fn rows(&self) -> usize {
        self.0.nrows()
    }
    fn cols(&self) -> usize {
        self.0.ncols()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.0.matvec(x)
    }
    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.0.tmatvec(y)
    }
}

pub(crate) struct ZeroOp(pub usize);

impl LinOp for ZeroOp {
    fn rows(&self) -> usize {
        self.0
    }
    fn cols(&self) -> usize {
        self.0
    }
    fn apply(&self, _x: &[f64]) -> Vec<f64> {
        vec![0.0; self.0]
    }
    fn adjoint(&self, _y: &[f64]) -> Vec<f64> {
        vec![0.0; self.0]
    }
}

/// `AᵀA`
pub(crate) struct NormalOp<'a>(pub &'a dyn LinOp);

impl LinOp for NormalOp<'_> {
    fn rows(&self) -> usize {
        self.0.cols()
    }
    fn cols(&self) -> usize {
        self.0.cols()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.0.adjoint(&self.0.apply(x))
    }
    fn adjoint(&self, y: &[f64]) -> Vec<f64> {
        self.apply(y)
    }
}

/// Checks an oracle's gradient against central differences at `x`.
pub fn check_gradient(f: &dyn SmoothFn, x: &[f64], tol: f64) -> Result<f64> {
    let (_, g) = f.value_grad(x)?;
    let fd = crate::numcore::fd_grad(|z| f.value(z), x, crate::numcore::DEFAULT_FD_STEP)?;
    let err = crate::numcore::rel_err(&g, &fd, 1.0);
    if err > tol {
        return Err(AlmError::Oracle {
            context: "gradient check",
            detail: format!("relative error {err:.3e} exceeds {tol:.1e}"),
        });
    }
    Ok(err)
}

/// Checks a map's Jacobian against central differences at `x`.
pub fn check_jacobian(c: &dyn VectorMap, x: &[f64], tol: f64) -> Result<f64> {
    let j = c.jacobian(x)?;
    let h = crate::numcore::DEFAULT_FD_STEP;
    let mut worst = 0.0f64;
    for col in 0..c.dim_in() {
        let mut e = vec![0.0; c.dim_in()];
        e[col] = 1.0;
        let fd = crate::numcore::fd_directional(|z| c.eval(z), x, &e, h)?;
        let err = crate::numcore::rel_err(&j.column(col), &fd, 1.0);
        worst = worst.max(err);
    }
    if worst > tol {
        return Err(AlmError::Oracle {
            context: "jacobian check",
            detail: format!("relative error {worst:.3e} exceeds {tol:.1e}"),
        });
    }
    Ok(worst)
}

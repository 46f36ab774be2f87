//! Proximal operators, projections, projection residuals and Moreau envelopes.
//!
//! Convention: `prox(f, t, x) = argmin_u f(u) + (t/2)‖u − x‖²`, so `t` acts
//! as a penalty. The envelope `e_t f(x)` is the optimal value of that problem
//! and its gradient (convex `f`) is `t (x − prox(f, t, x))`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, AlmError, Result};
use crate::numcore::{jacobi_eig, svec_dim, svec_order, vecops, Rng, SymMat};

/// Membership slack used when evaluating indicator values.
pub const FEAS_TOL: f64 = 1e-9;

/// User-supplied proximal oracle.
pub trait CustomProx: Send + Sync + fmt::Debug {
    fn value(&self, x: &[f64]) -> f64;
    fn prox(&self, t: f64, x: &[f64]) -> Vec<f64>;
    /// Self-declared convexity. See [`audit_convexity`].
    fn is_convex(&self) -> bool;
    fn is_indicator(&self) -> bool {
        false
    }
}

/// Bounds of a box; `None` marks an unbounded side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BoxBounds {
    Uniform {
        lo: Option<f64>,
        hi: Option<f64>,
    },
    PerCoord {
        lo: Vec<Option<f64>>,
        hi: Vec<Option<f64>>,
    },
}

impl BoxBounds {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let b = BoxBounds::Uniform {
            lo: Some(lo),
            hi: Some(hi),
        };
        b.validate()?;
        Ok(b)
    }

    /// Per-coordinate box; infinite entries become unbounded sides.
    pub fn from_f64(lo: &[f64], hi: &[f64]) -> Result<Self> {
        check_dim("BoxBounds::from_f64", lo.len(), hi.len())?;
        let conv = |v: &[f64], inf: f64| -> Vec<Option<f64>> {
            v.iter()
                .map(|&x| if x == inf { None } else { Some(x) })
                .collect()
        };
        let b = BoxBounds::PerCoord {
            lo: conv(lo, f64::NEG_INFINITY),
            hi: conv(hi, f64::INFINITY),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |l: Option<f64>, u: Option<f64>| match (l, u) {
            (Some(l), Some(u)) => l.is_finite() && u.is_finite() && l <= u,
            (Some(l), None) => l.is_finite(),
            (None, Some(u)) => u.is_finite(),
            (None, None) => true,
        };
        let good = match self {
            BoxBounds::Uniform { lo, hi } => ok(*lo, *hi),
            BoxBounds::PerCoord { lo, hi } => {
                lo.len() == hi.len() && lo.iter().zip(hi).all(|(l, u)| ok(*l, *u))
            }
        };
        if good {
            Ok(())
        } else {
            Err(AlmError::InvalidInput(
                "box bounds must be finite where present and satisfy lo <= hi".into(),
            ))
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            BoxBounds::Uniform { .. } => None,
            BoxBounds::PerCoord { lo, .. } => Some(lo.len()),
        }
    }

    pub fn bounds(&self, i: usize) -> (Option<f64>, Option<f64>) {
        match self {
            BoxBounds::Uniform { lo, hi } => (*lo, *hi),
            BoxBounds::PerCoord { lo, hi } => (lo[i], hi[i]),
        }
    }

    fn clamp(&self, i: usize, v: f64) -> f64 {
        let (l, u) = self.bounds(i);
        let mut r = v;
        if let Some(l) = l {
            r = r.max(l);
        }
        if let Some(u) = u {
            r = r.min(u);
        }
        r
    }

    fn contains(&self, i: usize, v: f64) -> bool {
        let (l, u) = self.bounds(i);
        l.is_none_or(|l| v >= l) && u.is_none_or(|u| v <= u)
    }
}

/// A nonsmooth term or constraint set described by its proximal oracle.
#[derive(Debug, Clone)]
pub enum ProxFn {
    Zero,
    L1(f64),
    L0(f64),
    Box(BoxBounds),
    Nonneg,
    Nonpos,
    InfBall(f64),
    Point(Vec<f64>),
    /// Cone of PSD matrices of order `n`, acting on svec vectors.
    PsdCone {
        n: usize,
    },
    Custom(Arc<dyn CustomProx>),
}

impl PartialEq for ProxFn {
    fn eq(&self, other: &Self) -> bool {
        use ProxFn::*;
        match (self, other) {
            (Zero, Zero) | (Nonneg, Nonneg) | (Nonpos, Nonpos) => true,
            (L1(a), L1(b)) | (L0(a), L0(b)) | (InfBall(a), InfBall(b)) => a == b,
            (Box(a), Box(b)) => a == b,
            (Point(a), Point(b)) => a == b,
            (PsdCone { n: a }, PsdCone { n: b }) => a == b,
            (Custom(a), Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(AlmError::InvalidInput(format!(
            "prox penalty must be positive and finite, got {t}"
        )))
    }
}

impl ProxFn {
    pub fn l1(gamma: f64) -> Result<Self> {
        positive("L1 weight", gamma)?;
        Ok(ProxFn::L1(gamma))
    }

    pub fn l0(alpha: f64) -> Result<Self> {
        positive("L0 weight", alpha)?;
        Ok(ProxFn::L0(alpha))
    }

    pub fn inf_ball(gamma: f64) -> Result<Self> {
        positive("inf-ball radius", gamma)?;
        Ok(ProxFn::InfBall(gamma))
    }

    pub fn boxed(b: BoxBounds) -> Result<Self> {
        b.validate()?;
        Ok(ProxFn::Box(b))
    }

    pub fn point(b: Vec<f64>) -> Result<Self> {
        crate::error::check_finite_slice("ProxFn::point", &b)?;
        Ok(ProxFn::Point(b))
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProxFn::Zero => "zero",
            ProxFn::L1(_) => "l1",
            ProxFn::L0(_) => "l0",
            ProxFn::Box(_) => "box",
            ProxFn::Nonneg => "nonneg",
            ProxFn::Nonpos => "nonpos",
            ProxFn::InfBall(_) => "infball",
            ProxFn::Point(_) => "point",
            ProxFn::PsdCone { .. } => "psd",
            ProxFn::Custom(_) => "custom",
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            ProxFn::L0(_) => false,
            ProxFn::Custom(c) => c.is_convex(),
            _ => true,
        }
    }

    pub fn is_indicator(&self) -> bool {
        match self {
            ProxFn::Zero | ProxFn::L1(_) | ProxFn::L0(_) => false,
            ProxFn::Custom(c) => c.is_indicator(),
            _ => true,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ProxFn::Zero)
    }

    /// Fixed dimension if the kind carries one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            ProxFn::Box(b) => b.dim(),
            ProxFn::Point(b) => Some(b.len()),
            ProxFn::PsdCone { n } => Some(svec_dim(*n)),
            _ => None,
        }
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if let Some(d) = self.dim() {
            check_dim("prox argument", d, x.len())?;
        }
        Ok(())
    }

    /// `f(x)`; indicators return 0 or `+∞`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        let ind = |inside: bool| if inside { 0.0 } else { f64::INFINITY };
        let tol = |v: f64| FEAS_TOL * (1.0 + v.abs());
        Ok(match self {
            ProxFn::Zero => 0.0,
            ProxFn::L1(g) => g * x.iter().map(|v| v.abs()).sum::<f64>(),
            ProxFn::L0(a) => a * x.iter().filter(|v| **v != 0.0).count() as f64,
            ProxFn::Box(b) => ind(x
                .iter()
                .enumerate()
                .all(|(i, &v)| (b.clamp(i, v) - v).abs() <= tol(v))),
            ProxFn::Nonneg => ind(x.iter().all(|&v| v >= -tol(0.0))),
            ProxFn::Nonpos => ind(x.iter().all(|&v| v <= tol(0.0))),
            ProxFn::InfBall(g) => ind(x.iter().all(|&v| v.abs() <= g + tol(*g))),
            ProxFn::Point(b) => ind(x.iter().zip(b).all(|(v, bi)| (v - bi).abs() <= tol(*bi))),
            ProxFn::PsdCone { n } => {
                let m = SymMat::smat(*n, x)?;
                let e = jacobi_eig(&m)?;
                let lmin = e.vals.last().copied().unwrap_or(0.0);
                ind(lmin >= -FEAS_TOL * (1.0 + m.frobenius()))
            }
            ProxFn::Custom(c) => c.value(x),
        })
    }

    /// `argmin_u f(u) + (t/2)‖u − x‖²`. For L0, coordinates with
    /// `|x_i| ≤ √(2α/t)` map to 0.
    pub fn prox(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        check_t(t)?;
        self.check_len(x)?;
        let out = match self {
            ProxFn::Zero => x.to_vec(),
            ProxFn::L1(g) => {
                let thr = g / t;
                x.iter()
                    .map(|&v| v.signum() * (v.abs() - thr).max(0.0))
                    .collect()
            }
            ProxFn::L0(a) => {
                let thr = (2.0 * a / t).sqrt();
                x.iter()
                    .map(|&v| if v.abs() <= thr { 0.0 } else { v })
                    .collect()
            }
            ProxFn::Box(b) => x.iter().enumerate().map(|(i, &v)| b.clamp(i, v)).collect(),
            ProxFn::Nonneg => x.iter().map(|v| v.max(0.0)).collect(),
            ProxFn::Nonpos => x.iter().map(|v| v.min(0.0)).collect(),
            ProxFn::InfBall(g) => x.iter().map(|v| v.clamp(-g, *g)).collect(),
            ProxFn::Point(b) => b.clone(),
            ProxFn::PsdCone { n } => psd_project(*n, x)?,
            ProxFn::Custom(c) => {
                let p = c.prox(t, x);
                check_dim("custom prox output", x.len(), p.len())?;
                crate::error::check_finite_slice("custom prox", &p)?;
                p
            }
        };
        Ok(out)
    }

    /// Conjugate for the kinds whose conjugate is again a kind here.
    pub fn conjugate(&self) -> Option<ProxFn> {
        match self {
            ProxFn::L1(g) => Some(ProxFn::InfBall(*g)),
            ProxFn::InfBall(g) => Some(ProxFn::L1(*g)),
            ProxFn::Nonneg => Some(ProxFn::Nonpos),
            ProxFn::Nonpos => Some(ProxFn::Nonneg),
            ProxFn::PsdCone { n } => Some(ProxFn::Custom(Arc::new(NsdCone { n: *n }))),
            _ => None,
        }
    }

    /// Diagonal of one element of the generalized Jacobian of `prox(f, t, ·)`
    /// at `x`, for separable kinds. At a kink the closed-interval convention
    /// applies: projections count boundary points as inside (derivative 1),
    /// soft-thresholding counts `|x| = γ/t` as zeroed (derivative 0).
    pub fn jacobian_diag(&self, t: f64, x: &[f64]) -> Result<Option<Vec<f64>>> {
        check_t(t)?;
        self.check_len(x)?;
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        Ok(match self {
            ProxFn::Zero => Some(vec![1.0; x.len()]),
            ProxFn::L1(g) => Some(x.iter().map(|v| ind(v.abs() > g / t)).collect()),
            ProxFn::L0(a) => {
                let thr = (2.0 * a / t).sqrt();
                Some(x.iter().map(|v| ind(v.abs() > thr)).collect())
            }
            ProxFn::Box(b) => Some(
                x.iter()
                    .enumerate()
                    .map(|(i, &v)| ind(b.contains(i, v)))
                    .collect(),
            ),
            ProxFn::Nonneg => Some(x.iter().map(|&v| ind(v >= 0.0)).collect()),
            ProxFn::Nonpos => Some(x.iter().map(|&v| ind(v <= 0.0)).collect()),
            ProxFn::InfBall(g) => Some(x.iter().map(|v| ind(v.abs() <= *g)).collect()),
            ProxFn::Point(b) => Some(vec![0.0; b.len()]),
            ProxFn::PsdCone { .. } | ProxFn::Custom(_) => None,
        })
    }

    /// Smallest distance from `x` to a kink of the prox map (separable kinds).
    /// `None` for kinds without a coordinatewise kink structure.
    pub fn kink_distance(&self, t: f64, x: &[f64]) -> Option<f64> {
        let d = |v: f64, k: f64| (v - k).abs();
        let m = |it: &mut dyn Iterator<Item = f64>| it.fold(f64::INFINITY, f64::min);
        match self {
            ProxFn::Zero | ProxFn::Point(_) => Some(f64::INFINITY),
            ProxFn::L1(g) => Some(m(&mut x.iter().map(|v| d(v.abs(), g / t)))),
            ProxFn::L0(a) => {
                let thr = (2.0 * a / t).sqrt();
                Some(m(&mut x.iter().map(|v| d(v.abs(), thr))))
            }
            ProxFn::Box(b) => Some(m(&mut x.iter().enumerate().map(|(i, &v)| {
                let (l, u) = b.bounds(i);
                l.map_or(f64::INFINITY, |l| d(v, l)).min(u.map_or(f64::INFINITY, |u| d(v, u)))
            }))),
            ProxFn::Nonneg | ProxFn::Nonpos => Some(m(&mut x.iter().map(|v| v.abs()))),
            ProxFn::InfBall(g) => Some(m(&mut x.iter().map(|v| d(v.abs(), *g)))),
            ProxFn::PsdCone { n } => {
                let mat = SymMat::smat(*n, x).ok()?;
                let e = jacobi_eig(&mat).ok()?;
                Some(m(&mut e.vals.iter().map(|v| v.abs())))
            }
            ProxFn::Custom(_) => None,
        }
    }
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(AlmError::InvalidInput(format!("{what} must be positive, got {v}")))
    }
}

fn psd_project(n: usize, x: &[f64]) -> Result<Vec<f64>> {
    let m = SymMat::smat(n, x)?;
    let e = jacobi_eig(&m)?;
    let d: Vec<f64> = e.vals.iter().map(|v| v.max(0.0)).collect();
    let p = SymMat::symmetrized(&e.recompose(&d))?;
    Ok(p.svec())
}

/// Negative semidefinite cone, the polar (and conjugate) of the PSD cone.
#[derive(Debug)]
struct NsdCone {
    n: usize,
}

impl CustomProx for NsdCone {
    fn value(&self, x: &[f64]) -> f64 {
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        ProxFn::PsdCone { n: self.n }
            .value(&neg)
            .unwrap_or(f64::INFINITY)
    }
    fn prox(&self, _t: f64, x: &[f64]) -> Vec<f64> {
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        match psd_project(self.n, &neg) {
            Ok(p) => p.iter().map(|v| -v).collect(),
            Err(_) => vec![f64::NAN; x.len()],
        }
    }
    fn is_convex(&self) -> bool {
        true
    }
    fn is_indicator(&self) -> bool {
        true
    }
}

/// A constraint set: an indicator-kind [`ProxFn`].
#[derive(Debug, Clone, PartialEq)]
pub struct SetSpec(ProxFn);

impl SetSpec {
    pub fn new(f: ProxFn) -> Result<Self> {
        match &f {
            ProxFn::Box(b) => b.validate()?,
            ProxFn::InfBall(g) => positive("inf-ball radius", *g)?,
            ProxFn::Point(b) => crate::error::check_finite_slice("SetSpec point", b)?,
            _ => {}
        }
        if !f.is_indicator() {
            return Err(AlmError::InvalidInput(format!(
                "{} is not a set indicator",
                f.name()
            )));
        }
        Ok(SetSpec(f))
    }

    pub fn boxed(b: BoxBounds) -> Result<Self> {
        Self::new(ProxFn::Box(b))
    }

    pub fn nonneg() -> Self {
        SetSpec(ProxFn::Nonneg)
    }

    pub fn nonpos() -> Self {
        SetSpec(ProxFn::Nonpos)
    }

    pub fn point(b: Vec<f64>) -> Result<Self> {
        Self::new(ProxFn::Point(b))
    }

    pub fn inf_ball(g: f64) -> Result<Self> {
        Self::new(ProxFn::InfBall(g))
    }

    pub fn psd(n: usize) -> Self {
        SetSpec(ProxFn::PsdCone { n })
    }

    pub fn as_prox(&self) -> &ProxFn {
        &self.0
    }

    pub fn is_convex(&self) -> bool {
        self.0.is_convex()
    }

    pub fn dim(&self) -> Option<usize> {
        self.0.dim()
    }

    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        Ok(self.0.value(x)? == 0.0)
    }

    /// Lower/upper bounds per coordinate for box-like sets, as `f64` with infinities.
    pub fn interval(&self, i: usize) -> Option<(f64, f64)> {
        let ninf = f64::NEG_INFINITY;
        let inf = f64::INFINITY;
        match &self.0 {
            ProxFn::Box(b) => {
                let (l, u) = b.bounds(i);
                Some((l.unwrap_or(ninf), u.unwrap_or(inf)))
            }
            ProxFn::Nonneg => Some((0.0, inf)),
            ProxFn::Nonpos => Some((ninf, 0.0)),
            ProxFn::InfBall(g) => Some((-g, *g)),
            ProxFn::Point(b) => Some((b[i], b[i])),
            _ => None,
        }
    }
}

impl From<SetSpec> for ProxFn {
    fn from(s: SetSpec) -> ProxFn {
        s.0
    }
}

pub fn prox(f: &ProxFn, t: f64, x: &[f64]) -> Result<Vec<f64>> {
    f.prox(t, x)
}

pub fn project(s: &SetSpec, x: &[f64]) -> Result<Vec<f64>> {
    s.0.prox(1.0, x)
}

/// `t (x − Π_S(x))`
pub fn hat_residual(s: &SetSpec, t: f64, x: &[f64]) -> Result<Vec<f64>> {
    check_t(t)?;
    let p = project(s, x)?;
    Ok(x.iter().zip(&p).map(|(a, b)| t * (a - b)).collect())
}

/// Envelope value and gradient. `grad_exact` is false for nonconvex kinds,
/// where `grad` is only the candidate induced by the chosen prox point.
#[derive(Debug, Clone, PartialEq)]
pub struct MoreauEval {
    pub value: f64,
    pub grad: Vec<f64>,
    pub prox: Vec<f64>,
    pub grad_exact: bool,
}

pub fn moreau(f: &ProxFn, t: f64, x: &[f64]) -> Result<MoreauEval> {
    let p = f.prox(t, x)?;
    let hp = if f.is_indicator() { 0.0 } else { f.value(&p)? };
    let diff: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
    let value = hp + 0.5 * t * vecops::norm_sq(&diff);
    let grad = vecops::scale(t, &diff);
    Ok(MoreauEval {
        value,
        grad,
        prox: p,
        grad_exact: f.is_convex(),
    })
}

/// Samples the declared convexity of `f` on `samples` random pairs in `R^dim`:
/// nonexpansiveness of the prox and midpoint convexity of the envelope.
/// Returns false when a declared-convex oracle violates either.
pub fn audit_convexity(f: &ProxFn, dim: usize, rng: &mut Rng, samples: usize) -> Result<bool> {
    if !f.is_convex() {
        return Ok(true);
    }
    for _ in 0..samples {
        let t = 10f64.powf(rng.uniform_in(-1.0, 1.0));
        let x = vecops::scale(3.0, &rng.randn(dim));
        let y = vecops::scale(3.0, &rng.randn(dim));
        let px = f.prox(t, &x)?;
        let py = f.prox(t, &y)?;
        if vecops::dist(&px, &py) > vecops::dist(&x, &y) * (1.0 + 1e-10) + 1e-12 {
            return Ok(false);
        }
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
        let em = moreau(f, t, &mid)?.value;
        let ex = moreau(f, t, &x)?.value;
        let ey = moreau(f, t, &y)?.value;
        if em > 0.5 * (ex + ey) + 1e-9 * (1.0 + ex.abs() + ey.abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Order of the PSD cone encoded by an svec length.
pub fn psd_order_of(len: usize) -> Option<usize> {
    svec_order(len)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn soft_threshold() {
        let p = ProxFn::l1(1.0).unwrap().prox(1.0, &[3.0, -0.5]).unwrap();
        assert_eq!(p, vec![2.0, 0.0]);
    }

    #[test]
    fn hard_threshold_boundary_maps_to_zero() {
        let p = ProxFn::l0(2.0).unwrap().prox(1.0, &[3.0, 1.9, -2.5]).unwrap();
        assert_eq!(p, vec![3.0, 0.0, -2.5]);
        let q = ProxFn::l0(2.0).unwrap().prox(1.0, &[2.0, -2.0]).unwrap();
        assert_eq!(q, vec![0.0, 0.0]);
    }

    #[test]
    fn box_clamp() {
        let f = ProxFn::boxed(BoxBounds::uniform(0.0, 1.0).unwrap()).unwrap();
        for t in [0.1, 1.0, 50.0] {
            assert_eq!(f.prox(t, &[-0.2, 0.4, 1.7]).unwrap(), vec![0.0, 0.4, 1.0]);
        }
    }

    #[test]
    fn psd_diagonal() {
        let x = SymMat::diag(&[2.0, -3.0]).svec();
        let p = ProxFn::PsdCone { n: 2 }.prox(1.0, &x).unwrap();
        let pm = SymMat::smat(2, &p).unwrap();
        assert!((pm[(0, 0)] - 2.0).abs() < 1e-14);
        assert!(pm[(1, 1)].abs() < 1e-14);
        assert!(pm[(0, 1)].abs() < 1e-14);
    }

    #[test]
    fn projections() {
        assert_eq!(
            project(&SetSpec::point(vec![1.0, 2.0]).unwrap(), &[9.0, 9.0]).unwrap(),
            vec![1.0, 2.0]
        );
        assert_eq!(project(&SetSpec::nonneg(), &[-1.0, 2.0]).unwrap(), vec![0.0, 2.0]);
        assert_eq!(
            project(&SetSpec::inf_ball(1.0).unwrap(), &[3.0, -0.2]).unwrap(),
            vec![1.0, -0.2]
        );
    }

    #[test]
    fn residual_map() {
        let b = SetSpec::boxed(BoxBounds::uniform(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(hat_residual(&b, 2.0, &[1.5]).unwrap(), vec![1.0]);
        assert_eq!(hat_residual(&b, 2.0, &[0.3]).unwrap(), vec![0.0]);
        assert_eq!(hat_residual(&SetSpec::nonneg(), 3.0, &[-2.0]).unwrap(), vec![-6.0]);
    }

    #[test]
    fn envelope_values() {
        let b = ProxFn::boxed(BoxBounds::uniform(0.0, 1.0).unwrap()).unwrap();
        let e = moreau(&b, 2.0, &[1.5]).unwrap();
        assert!((e.value - 0.25).abs() < 1e-15);
        assert_eq!(e.grad, vec![1.0]);
        let e = moreau(&ProxFn::L1(1.0), 1.0, &[3.0]).unwrap();
        assert!((e.value - 2.5).abs() < 1e-15);
        assert_eq!(e.grad, vec![1.0]);
        let e = moreau(&b, 2.0, &[0.5]).unwrap();
        assert_eq!(e.grad, vec![0.0]);
        assert!(!moreau(&ProxFn::L0(1.0), 1.0, &[3.0]).unwrap().grad_exact);
    }

    #[test]
    fn bad_penalty() {
        assert!(ProxFn::Zero.prox(0.0, &[1.0]).is_err());
        assert!(ProxFn::Zero.prox(-1.0, &[1.0]).is_err());
        assert!(moreau(&ProxFn::Zero, 0.0, &[1.0]).is_err());
    }

    #[test]
    fn indicator_values() {
        let b = ProxFn::boxed(BoxBounds::from_f64(&[0.0, f64::NEG_INFINITY], &[1.0, 2.0]).unwrap())
            .unwrap();
        assert_eq!(b.value(&[0.5, -100.0]).unwrap(), 0.0);
        assert_eq!(b.value(&[1.5, 0.0]).unwrap(), f64::INFINITY);
        assert!(SetSpec::new(ProxFn::L1(1.0)).is_err());
        assert!(BoxBounds::uniform(2.0, 1.0).is_err());
    }

    #[test]
    fn jacobian_tie_break() {
        let b = ProxFn::boxed(BoxBounds::uniform(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(
            b.jacobian_diag(1.0, &[0.0, 1.0, 1.5, -0.1, 0.5]).unwrap().unwrap(),
            vec![1.0, 1.0, 0.0, 0.0, 1.0]
        );
        let l = ProxFn::L1(1.0);
        assert_eq!(
            l.jacobian_diag(2.0, &[0.5, 0.6, -0.4]).unwrap().unwrap(),
            vec![0.0, 1.0, 0.0]
        );
    }

    #[test]
    fn nsd_conjugate_decomposes() {
        let mut rng = Rng::new(2);
        let psd = ProxFn::PsdCone { n: 3 };
        let nsd = psd.conjugate().unwrap();
        let x = rng.sym_mat(3).svec();
        let a = psd.prox(1.0, &x).unwrap();
        let b = nsd.prox(1.0, &x).unwrap();
        assert!(vecops::dist(&vecops::add(&a, &b), &x) < 1e-10);
    }

    #[test]
    fn audit_flags_fake_convexity() {
        #[derive(Debug)]
        struct Liar;
        impl CustomProx for Liar {
            fn value(&self, x: &[f64]) -> f64 {
                x.iter().filter(|v| **v != 0.0).count() as f64
            }
            fn prox(&self, t: f64, x: &[f64]) -> Vec<f64> {
                ProxFn::L0(1.0).prox(t, x).unwrap()
            }
            fn is_convex(&self) -> bool {
                true
            }
        }
        let mut rng = Rng::new(0);
        let f = ProxFn::Custom(Arc::new(Liar));
        assert!(!audit_convexity(&f, 3, &mut rng, 200).unwrap());
        assert!(audit_convexity(&ProxFn::L1(0.7), 3, &mut rng, 200).unwrap());
    }
}

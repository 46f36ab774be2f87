use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::oracle::{check_jacobian, SharedFn, SharedMap};
use crate::error::{check_dim, check_finite_slice, AlmError, Result};
use crate::numcore::{vecops, DenseMat, Identity, Rng, SharedOp};
use crate::prox::{ProxFn, SetSpec};

fn separable(s: &SetSpec, what: &str) -> Result<()> {
    match s.as_prox() {
        ProxFn::Box(_) | ProxFn::Nonneg | ProxFn::Nonpos | ProxFn::Point(_) | ProxFn::InfBall(_) => {
            Ok(())
        }
        other => Err(AlmError::InvalidInput(format!(
            "{what} must be a box-like set, got {}",
            other.name()
        ))),
    }
}

fn set_dim(s: &Option<SetSpec>, expect: usize, ctx: &'static str) -> Result<()> {
    if let Some(s) = s {
        if let Some(d) = s.dim() {
            check_dim(ctx, expect, d)?;
        }
    }
    Ok(())
}

/// `min f(x) s.t. c(x) ∈ Q, x ∈ K` with box-like `Q`, `K`.
#[derive(Clone)]
pub struct NlpProblem {
    pub f: SharedFn,
    pub c: Option<SharedMap>,
    pub q: Option<SetSpec>,
    pub k: Option<SetSpec>,
}

impl fmt::Debug for NlpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NlpProblem")
            .field("n", &self.dim())
            .field("m", &self.m())
            .field("q", &self.q)
            .field("k", &self.k)
            .finish()
    }
}

impl NlpProblem {
    /// Validates dimensions and spot-checks the Jacobian of `c` at seeded points.
    pub fn new(
        f: SharedFn,
        c: Option<SharedMap>,
        q: Option<SetSpec>,
        k: Option<SetSpec>,
    ) -> Result<Self> {
        let n = f.dim();
        if c.is_some() != q.is_some() {
            return Err(AlmError::InvalidInput(
                "constraint map and its set must be given together".into(),
            ));
        }
        if let (Some(c), Some(q)) = (&c, &q) {
            check_dim("NlpProblem c input", n, c.dim_in())?;
            separable(q, "Q")?;
            if let Some(d) = q.dim() {
                check_dim("NlpProblem Q", c.dim_out(), d)?;
            }
            let mut rng = Rng::new(0x5eed);
            for _ in 0..3 {
                let x = rng.randn(n);
                if c.eval(&x).is_ok() {
                    check_jacobian(c.as_ref(), &x, 1e-4)?;
                }
            }
        }
        if let Some(k) = &k {
            separable(k, "K")?;
        }
        set_dim(&k, n, "NlpProblem K")?;
        Ok(Self { f, c, q, k })
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn m(&self) -> usize {
        self.c.as_ref().map_or(0, |c| c.dim_out())
    }

    pub fn has_k(&self) -> bool {
        self.k.is_some()
    }
}

/// `min f(x) + h(x) s.t. Ax ∈ Q, x ∈ K`, all pieces convex.
#[derive(Clone)]
pub struct CompositeProblem {
    pub f: SharedFn,
    pub h: ProxFn,
    pub a: SharedOp,
    pub q: Option<SetSpec>,
    pub k: Option<SetSpec>,
}

impl fmt::Debug for CompositeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompositeProblem")
            .field("n", &self.dim())
            .field("h", &self.h)
            .field("a", &(self.a.rows(), self.a.cols()))
            .field("q", &self.q)
            .field("k", &self.k)
            .finish()
    }
}

impl CompositeProblem {
    /// `a = None` with `q` present means `x ∈ Q` (identity map).
    pub fn new(
        f: SharedFn,
        h: ProxFn,
        a: Option<SharedOp>,
        q: Option<SetSpec>,
        k: Option<SetSpec>,
    ) -> Result<Self> {
        let n = f.dim();
        let a: SharedOp = match a {
            Some(a) => a,
            None => Arc::new(Identity(if q.is_some() { n } else { 0 })),
        };
        if q.is_some() {
            check_dim("CompositeProblem A cols", n, a.cols())?;
            set_dim(&q, a.rows(), "CompositeProblem Q")?;
        }
        set_dim(&k, n, "CompositeProblem K")?;
        if let Some(d) = h.dim() {
            check_dim("CompositeProblem h", n, d)?;
        }
        Ok(Self { f, h, a, q, k })
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    /// Dimension of the `λ` block (0 when `Q` is absent).
    pub fn m(&self) -> usize {
        if self.q.is_some() {
            self.a.rows()
        } else {
            0
        }
    }

    pub fn is_convex(&self) -> bool {
        self.h.is_convex()
            && self.q.as_ref().is_none_or(|s| s.is_convex())
            && self.k.as_ref().is_none_or(|s| s.is_convex())
    }

    pub(crate) fn require_convex(&self) -> Result<()> {
        if self.is_convex() {
            Ok(())
        } else {
            Err(AlmError::VariantMismatch(
                "nonconvex h or set: use the retained-slack nonconvex AL instead".into(),
            ))
        }
    }

    /// `f(x) + h(x)`
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        Ok(self.f.value(x)? + self.h.value(x)?)
    }
}

/// `min f(x) + h(x) s.t. c(x) ∈ Q, x ∈ K` with possibly nonconvex `f`, `h`, `Q`
/// and convex `K`.
#[derive(Clone)]
pub struct NcCompositeProblem {
    pub f: SharedFn,
    pub h: ProxFn,
    pub c: SharedMap,
    pub q: SetSpec,
    pub k: Option<SetSpec>,
}

impl fmt::Debug for NcCompositeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NcCompositeProblem")
            .field("n", &self.dim())
            .field("h", &self.h)
            .field("q", &self.q)
            .field("k", &self.k)
            .finish()
    }
}

impl NcCompositeProblem {
    pub fn new(
        f: SharedFn,
        h: ProxFn,
        c: SharedMap,
        q: SetSpec,
        k: Option<SetSpec>,
    ) -> Result<Self> {
        let n = f.dim();
        check_dim("NcCompositeProblem c input", n, c.dim_in())?;
        if let Some(d) = q.dim() {
            check_dim("NcCompositeProblem Q", c.dim_out(), d)?;
        }
        set_dim(&k, n, "NcCompositeProblem K")?;
        if k.as_ref().is_some_and(|s| !s.is_convex()) {
            return Err(AlmError::VariantMismatch("K must be convex".into()));
        }
        Ok(Self { f, h, c, q, k })
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn m(&self) -> usize {
        self.c.dim_out()
    }

    /// `h` enters through its Moreau envelope (with a `ν` block) only when convex
    /// and nonzero; otherwise it is kept as is.
    pub fn smooths_h(&self) -> bool {
        !self.h.is_zero() && self.h.is_convex()
    }

    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        Ok(self.f.value(x)? + self.h.value(x)?)
    }
}

/// Feasible set of one block of an integer program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockSet {
    /// `{0,1}^n`
    BinaryBox(usize),
    /// Binary vectors with at most one entry equal to 1.
    PickAtMostOne(usize),
}

impl BlockSet {
    pub fn len(&self) -> usize {
        match self {
            BlockSet::BinaryBox(n) | BlockSet::PickAtMostOne(n) => *n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        let binary = x.iter().all(|v| *v == 0.0 || *v == 1.0);
        match self {
            BlockSet::BinaryBox(n) => x.len() == *n && binary,
            BlockSet::PickAtMostOne(n) => {
                x.len() == *n && binary && x.iter().filter(|v| **v == 1.0).count() <= 1
            }
        }
    }

    /// Nearest point of the block set. Ties at 0.5 round down.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match self {
            BlockSet::BinaryBox(_) => x.iter().map(|v| if *v > 0.5 { 1.0 } else { 0.0 }).collect(),
            BlockSet::PickAtMostOne(n) => {
                let mut out = vec![0.0; *n];
                let best = x
                    .iter()
                    .enumerate()
                    .fold(None::<(usize, f64)>, |acc, (i, &v)| match acc {
                        Some((_, bv)) if bv >= v => acc,
                        _ => Some((i, v)),
                    });
                if let Some((i, v)) = best {
                    if v > 0.5 {
                        out[i] = 1.0;
                    }
                }
                out
            }
        }
    }

    /// All members, in a fixed order (binary counting order).
    pub fn enumerate(&self) -> Result<Vec<Vec<f64>>> {
        match self {
            BlockSet::BinaryBox(n) => {
                if *n > 16 {
                    return Err(AlmError::Capability(format!(
                        "block enumeration limited to 16 variables, got {n}"
                    )));
                }
                Ok((0..1u32 << n)
                    .map(|bits| (0..*n).map(|i| ((bits >> i) & 1) as f64).collect())
                    .collect())
            }
            BlockSet::PickAtMostOne(n) => {
                if *n > 16 {
                    return Err(AlmError::Capability(format!(
                        "block enumeration limited to 16 variables, got {n}"
                    )));
                }
                let mut out = vec![vec![0.0; *n]];
                for i in 0..*n {
                    let mut v = vec![0.0; *n];
                    v[i] = 1.0;
                    out.push(v);
                }
                Ok(out)
            }
        }
    }
}

/// `min cᵀx s.t. Ax ≤ b, x_j ∈ X_j` for consecutive blocks `x_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpProblem {
    pub c: Vec<f64>,
    pub a: DenseMat,
    pub b: Vec<f64>,
    pub blocks: Vec<BlockSet>,
}

impl IpProblem {
    pub fn new(c: Vec<f64>, a: DenseMat, b: Vec<f64>, blocks: Vec<BlockSet>) -> Result<Self> {
        check_finite_slice("IpProblem c", &c)?;
        check_finite_slice("IpProblem b", &b)?;
        check_dim("IpProblem A cols", c.len(), a.ncols())?;
        check_dim("IpProblem b", a.nrows(), b.len())?;
        check_dim(
            "IpProblem block dims",
            c.len(),
            blocks.iter().map(|b| b.len()).sum(),
        )?;
        Ok(Self { c, a, b, blocks })
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn m(&self) -> usize {
        self.b.len()
    }

    /// Index ranges of the blocks.
    pub fn block_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.blocks
            .iter()
            .map(|b| {
                let r = start..start + b.len();
                start += b.len();
                r
            })
            .collect()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        vecops::dot(&self.c, x)
    }

    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        vecops::sub(&self.a.matvec(x), &self.b)
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        vecops::norm(&vecops::pos(&self.residual(x)))
    }

    pub fn in_blocks(&self, x: &[f64]) -> bool {
        self.block_ranges()
            .iter()
            .zip(&self.blocks)
            .all(|(r, b)| b.contains(&x[r.clone()]))
    }

    pub fn is_feasible(&self, x: &[f64]) -> bool {
        self.in_blocks(x) && self.residual(x).iter().all(|r| *r <= 1e-9)
    }
}

/// Any of the four problem classes.
#[derive(Debug, Clone)]
pub enum Problem {
    Nlp(NlpProblem),
    Composite(CompositeProblem),
    NcComposite(NcCompositeProblem),
    Ip(IpProblem),
}

impl Problem {
    pub fn dim(&self) -> usize {
        match self {
            Problem::Nlp(p) => p.dim(),
            Problem::Composite(p) => p.dim(),
            Problem::NcComposite(p) => p.dim(),
            Problem::Ip(p) => p.dim(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Problem::Nlp(_) => "nlp",
            Problem::Composite(_) => "composite",
            Problem::NcComposite(_) => "nc-composite",
            Problem::Ip(_) => "ip",
        }
    }

    /// Original objective `f(x) + h(x)` (or `cᵀx`).
    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        match self {
            Problem::Nlp(p) => p.f.value(x),
            Problem::Composite(p) => p.objective(x),
            Problem::NcComposite(p) => p.objective(x),
            Problem::Ip(p) => Ok(p.objective(x)),
        }
    }
}

/// Dual block `Λ = (ν, λ, μ)`. Absent blocks have length zero.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Multipliers {
    pub nu: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
}

impl Multipliers {
    pub fn new(nu: Vec<f64>, lambda: Vec<f64>, mu: Vec<f64>) -> Self {
        Self { nu, lambda, mu }
    }

    pub fn zeros(n_nu: usize, n_lambda: usize, n_mu: usize) -> Self {
        Self::new(vec![0.0; n_nu], vec![0.0; n_lambda], vec![0.0; n_mu])
    }

    pub fn has_nu(&self) -> bool {
        !self.nu.is_empty()
    }
    pub fn has_lambda(&self) -> bool {
        !self.lambda.is_empty()
    }
    pub fn has_mu(&self) -> bool {
        !self.mu.is_empty()
    }

    pub fn norm_sq(&self) -> f64 {
        vecops::norm_sq(&self.nu) + vecops::norm_sq(&self.lambda) + vecops::norm_sq(&self.mu)
    }

    pub fn stacked(&self) -> Vec<f64> {
        vecops::concat(&[&self.nu, &self.lambda, &self.mu])
    }

    pub fn from_stacked(&self, v: &[f64]) -> Multipliers {
        let a = self.nu.len();
        let b = a + self.lambda.len();
        Multipliers::new(v[..a].to_vec(), v[a..b].to_vec(), v[b..].to_vec())
    }

    pub fn dist(&self, other: &Multipliers) -> f64 {
        vecops::dist(&self.stacked(), &other.stacked())
    }

    pub fn check_shape(&self, nu: usize, lambda: usize, mu: usize) -> Result<()> {
        check_dim("multiplier nu", nu, self.nu.len())?;
        check_dim("multiplier lambda", lambda, self.lambda.len())?;
        check_dim("multiplier mu", mu, self.mu.len())?;
        check_finite_slice("multipliers", &self.stacked())
    }
}

/// Positive penalty parameter.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Penalty(f64);

impl Penalty {
    pub fn new(rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Ok(Penalty(rho))
    }
    pub fn get(self) -> f64 {
        self.0
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(AlmError::InvalidInput(format!(
            "penalty must be positive and finite, got {rho}"
        )))
    }
}

/// Sign pattern a converged multiplier must have for a box-like set:
/// `+1` when only an upper bound exists, `-1` when only a lower bound, `0` otherwise.
pub fn multiplier_sign(set: &SetSpec, i: usize) -> i8 {
    match set.interval(i) {
        Some((l, u)) if l == f64::NEG_INFINITY && u.is_finite() => 1,
        Some((l, u)) if l.is_finite() && u == f64::INFINITY => -1,
        _ => 0,
    }
}

use std::sync::Arc;

use super::{Certificate, Instance, InstanceData, KnownOptimum};
use crate::alfn::{CompositeProblem, Linear, Multipliers, Problem};
use crate::error::{check_dim, AlmError, Result};
use crate::numcore::{jacobi_eig, svec_dim, vecops, DenseMat, Rng, SymMat};
use crate::prox::{ProxFn, SetSpec};

/// `min ⟨C, X⟩ s.t. ⟨A_i, X⟩ = b_i, X ⪰ 0` over `svec(X)`.
pub(super) fn sdp_eq(c: &SymMat, ops: &[SymMat], b: &[f64]) -> Result<Problem> {
    let n = c.order();
    if n > 64 {
        return Err(AlmError::InvalidInput(format!("SDP order limited to 64, got {n}")));
    }
    check_dim("sdp b", ops.len(), b.len())?;
    let rows: Vec<Vec<f64>> = ops
        .iter()
        .map(|a| {
            check_dim("sdp constraint order", n, a.order())?;
            Ok(a.svec())
        })
        .collect::<Result<_>>()?;
    let a = if rows.is_empty() { DenseMat::zeros(0, svec_dim(n)) } else { DenseMat::from_rows(&rows)? };
    let (op, q) = if rows.is_empty() {
        (None, None)
    } else {
        (Some(Arc::new(a) as crate::numcore::SharedOp), Some(SetSpec::point(b.to_vec())?))
    };
    Ok(Problem::Composite(CompositeProblem::new(
        Arc::new(Linear { c: c.svec() }),
        ProxFn::Zero,
        op,
        q,
        Some(SetSpec::psd(n)),
    )?))
}

/// Max-cut relaxation on one edge: `C = −L/4`, `diag(X) = 1`. Optimal
/// value −1 at `X = [[1, −1], [−1, 1]]`.
pub fn maxcut_edge() -> Result<Instance> {
    let c = SymMat::from_rows(&[vec![-0.25, 0.25], vec![0.25, -0.25]])?;
    let ops = vec![SymMat::diag(&[1.0, 0.0]), SymMat::diag(&[0.0, 1.0])];
    let x = SymMat::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]])?.svec();
    Ok(Instance::new("maxcut_edge", None, InstanceData::SdpEq { c, ops, b: vec![1.0, 1.0] })?.with_known(
        KnownOptimum { value: -1.0, x: Some(x), mult: None, certificate: Certificate::Analytic },
    ))
}

/// Random SDP with a trace constraint (bounded feasible set) plus `m − 1`
/// random symmetric constraints, all satisfied by a planted `X₀ ≻ 0`.
pub fn sdp_random(rng: &mut Rng, n: usize, m: usize) -> Result<Instance> {
    if m == 0 {
        return Err(AlmError::InvalidInput("need at least the trace constraint".into()));
    }
    let seed = rng.seed();
    let c = rng.sym_mat(n);
    let g = rng.dense_normal(n, n);
    let x0 = SymMat::symmetrized(&g.matmul(&g.transpose()).scaled(1.0 / n as f64).add(&DenseMat::identity(n).scaled(0.1)))?;
    let mut ops = vec![SymMat::diag(&vec![1.0; n])];
    for _ in 1..m {
        ops.push(rng.sym_mat(n));
    }
    let b: Vec<f64> = ops.iter().map(|a| a.inner(&x0)).collect();
    Instance::new(format!("sdp_{n}x{m}_{seed}"), Some(seed), InstanceData::SdpEq { c, ops, b })
}

/// KKT residuals of an SDP point with dual slack `S = C + Σ λ_i A_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SdpKkt {
    /// `‖𝒜(X) − b‖`
    pub primal: f64,
    /// Norm of the negative eigenvalues of `X`.
    pub cone_x: f64,
    /// Norm of the negative eigenvalues of `S`.
    pub cone_s: f64,
    /// `|⟨X, S⟩|`
    pub complementarity: f64,
}

impl SdpKkt {
    pub fn max(&self) -> f64 {
        self.primal.max(self.cone_x).max(self.cone_s).max(self.complementarity)
    }
}

pub fn sdp_kkt_residual(data: &InstanceData, x: &[f64], mult: &Multipliers) -> Result<SdpKkt> {
    let InstanceData::SdpEq { c, ops, b } = data else {
        return Err(AlmError::VariantMismatch("not an SDP instance".into()));
    };
    let n = c.order();
    let xm = SymMat::smat(n, x)?;
    check_dim("sdp multipliers", ops.len(), mult.lambda.len())?;
    let primal = vecops::norm(&vecops::sub(&ops.iter().map(|a| a.inner(&xm)).collect::<Vec<_>>(), b));
    let mut s = c.svec();
    for (a, l) in ops.iter().zip(&mult.lambda) {
        vecops::axpy(*l, &a.svec(), &mut s);
    }
    let sm = SymMat::smat(n, &s)?;
    let neg = |m: &SymMat| -> Result<f64> {
        let e = jacobi_eig(m)?;
        Ok(e.vals.iter().map(|v| v.min(0.0).powi(2)).sum::<f64>().sqrt())
    };
    Ok(SdpKkt {
        primal,
        cone_x: neg(&xm)?,
        cone_s: neg(&sm)?,
        complementarity: xm.inner(&sm).abs(),
    })
}

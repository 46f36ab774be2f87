use crate::numcore::{vecops, LinOp};

#[derive(Debug, Clone)]
pub struct CgResult {
    pub x: Vec<f64>,
    pub iters: usize,
    pub rel_residual: f64,
    /// Nonpositive curvature was met; `x` is the last iterate before it.
    pub indefinite: bool,
}

/// Conjugate gradients for `(A + shift I) x = b` from `x = 0`.
pub fn cg(a: &dyn LinOp, shift: f64, b: &[f64], rel_tol: f64, max_iter: usize) -> CgResult {
    let n = b.len();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let bnorm = vecops::norm(b);
    if bnorm == 0.0 {
        return CgResult { x, iters: 0, rel_residual: 0.0, indefinite: false };
    }
    let mut rr = vecops::norm_sq(&r);
    let mut iters = 0;
    while iters < max_iter {
        if rr.sqrt() <= rel_tol * bnorm {
            break;
        }
        let mut ap = a.apply(&p);
        vecops::axpy(shift, &p, &mut ap);
        let pap = vecops::dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            return CgResult { x, iters, rel_residual: rr.sqrt() / bnorm, indefinite: true };
        }
        let alpha = rr / pap;
        vecops::axpy(alpha, &p, &mut x);
        vecops::axpy(-alpha, &ap, &mut r);
        let rr_new = vecops::norm_sq(&r);
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        iters += 1;
    }
    CgResult { x, iters, rel_residual: rr.sqrt() / bnorm, indefinite: false }
}

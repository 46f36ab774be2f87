//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use super::dense::{DenseMat, SymMat};
use crate::error::{AlmError, Result};

const MAX_SWEEPS: usize = 100;
const MAX_ORDER: usize = 512;

/// Eigen-decomposition `M = Q diag(vals) Qᵀ`, eigenvalues sorted descending and
/// the columns of `Q` ordered to match.
#[derive(Debug, Clone)]
pub struct SymEig {
    pub vals: Vec<f64>,
    pub vecs: DenseMat,
}

impl SymEig {
    /// Rebuilds `Q diag(d) Qᵀ` for arbitrary diagonal `d`.
    pub fn recompose(&self, d: &[f64]) -> DenseMat {
        let n = self.vals.len();
        let q = &self.vecs;
        let mut out = DenseMat::zeros(n, n);
        for k in 0..n {
            if d[k] == 0.0 {
                continue;
            }
            for i in 0..n {
                let qik = q[(i, k)] * d[k];
                if qik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += qik * q[(j, k)];
                }
            }
        }
        out
    }
}

pub fn jacobi_eig(m: &SymMat) -> Result<SymEig> {
    let n = m.order();
    if n > MAX_ORDER {
        return Err(AlmError::InvalidInput(format!(
            "jacobi_eig supports order <= {MAX_ORDER}, got {n}"
        )));
    }
    let mut a = m.as_dense().clone();
    if a.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(AlmError::InvalidInput("non-finite matrix entry".into()));
    }
    let mut v = DenseMat::identity(n);
    let fro = a.frobenius();
    let thresh = 1e-12 * fro;

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= thresh || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let vals = order.iter().map(|&i| a[(i, i)]).collect();
    let vecs = v.select_columns(&order);
    Ok(SymEig { vals, vecs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::Rng;

    fn recon_err(m: &SymMat, e: &SymEig) -> f64 {
        e.recompose(&e.vals).sub(m.as_dense()).frobenius()
    }

    #[test]
    fn diagonal_input() {
        let m = SymMat::diag(&[2.0, -3.0]);
        let e = jacobi_eig(&m).unwrap();
        assert_eq!(e.vals, vec![2.0, -3.0]);
        for i in 0..2 {
            assert!((e.vecs[(i, i)].abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn swap_matrix() {
        let m = SymMat::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = jacobi_eig(&m).unwrap();
        assert!((e.vals[0] - 1.0).abs() < 1e-14);
        assert!((e.vals[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_eight_by_eight() {
        let mut rng = Rng::new(7);
        let m = rng.sym_mat(8);
        let e = jacobi_eig(&m).unwrap();
        assert!(recon_err(&m, &e) <= 1e-10 * (1.0 + m.frobenius()));
        let qtq = e.vecs.transpose().matmul(&e.vecs);
        assert!(qtq.sub(&DenseMat::identity(8)).frobenius() <= 1e-10);
        let sum: f64 = e.vals.iter().sum();
        assert!((sum - m.trace()).abs() <= 1e-9 * (1.0 + m.trace().abs()));
        assert!(e.vals.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn empty_matrix() {
        let m = SymMat::diag(&[]);
        let e = jacobi_eig(&m).unwrap();
        assert!(e.vals.is_empty());
    }
}

//! Dense numerical substrate: vectors, matrices, linear maps, a Jacobi
//! eigensolver, finite differences and seeded randomness.

mod dense;
mod eig;
mod fd;
mod rng;
pub mod vecops;

pub use dense::{svec_dim, svec_order, DenseMat, Identity, LinOp, SharedOp, SymMat};
pub use eig::{jacobi_eig, SymEig};
pub use fd::{fd_directional, fd_grad, rel_err, DEFAULT_FD_STEP};
pub use rng::{rand_orthonormal_rows, randn, Rng};

/// Checks `|⟨Ax, y⟩ − ⟨x, Aᵀy⟩| ≤ 1e-12 (1 + |⟨Ax, y⟩|)` on `trials` random pairs.
pub fn adjoint_check(op: &dyn LinOp, rng: &mut Rng, trials: usize) -> bool {
    (0..trials).all(|_| {
        let x = rng.randn(op.cols());
        let y = rng.randn(op.rows());
        let lhs = vecops::dot(&op.apply(&x), &y);
        let rhs = vecops::dot(&x, &op.adjoint(&y));
        (lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_adjoint_identity() {
        let mut rng = Rng::new(3);
        let a = rng.dense_normal(5, 9);
        assert!(adjoint_check(&a, &mut rng, 100));
        assert!(adjoint_check(&Identity(4), &mut rng, 100));
    }

    #[test]
    fn svec_roundtrip() {
        let mut rng = Rng::new(4);
        let a = rng.sym_mat(5);
        let b = rng.sym_mat(5);
        let sa = a.svec();
        assert!((vecops::dot(&sa, &b.svec()) - a.inner(&b)).abs() < 1e-12);
        let back = SymMat::smat(5, &sa).unwrap();
        assert!(back.as_dense().sub(a.as_dense()).frobenius() < 1e-14);
        assert_eq!(svec_order(15), Some(5));
        assert_eq!(svec_order(14), None);
    }

    #[test]
    fn solvers_agree() {
        let mut rng = Rng::new(8);
        let b = rng.dense_normal(6, 6);
        let spd = b.transpose().matmul(&b).add(&DenseMat::identity(6));
        let rhs = rng.randn(6);
        let x1 = spd.solve_spd(&rhs).unwrap();
        let x2 = spd.solve(&rhs).unwrap();
        assert!(vecops::dist(&x1, &x2) < 1e-10);
        let r = vecops::sub(&spd.matvec(&x1), &rhs);
        assert!(vecops::norm(&r) < 1e-10);
    }

    #[test]
    fn rejects_nonfinite() {
        assert!(DenseMat::new(1, 1, vec![f64::NAN]).is_err());
        assert!(SymMat::from_rows(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
    }
}

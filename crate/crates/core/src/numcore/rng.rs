use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::dense::{DenseMat, SymMat};
use super::vecops::{dot, norm};
use crate::error::{AlmError, Result};

/// Seeded ChaCha8 stream. Equal seeds give equal draws on every platform.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream, e.g. for one benchmark cell.
    pub fn derive(&self, salt: u64) -> Rng {
        // splitmix64 finalizer so nearby salts give unrelated seeds
        let mut z = self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        Rng::new(z ^ (z >> 31))
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn sign(&mut self) -> f64 {
        if self.inner.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.random()
    }

    /// `k` distinct indices from `0..n`, in draw order.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        rand::seq::index::sample(&mut self.inner, n, k).into_vec()
    }

    pub fn randn(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    pub fn dense_normal(&mut self, m: usize, n: usize) -> DenseMat {
        DenseMat::new(m, n, self.randn(m * n)).expect("finite draws")
    }

    /// Symmetric matrix with standard normal upper triangle.
    pub fn sym_mat(&mut self, n: usize) -> SymMat {
        let mut a = DenseMat::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.normal();
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        SymMat::new(a).expect("symmetric by construction")
    }
}

pub fn randn(rng: &mut Rng, n: usize) -> Vec<f64> {
    rng.randn(n)
}

/// Gaussian `m×n` matrix with rows orthonormalized by two passes of
/// modified Gram-Schmidt.
pub fn rand_orthonormal_rows(rng: &mut Rng, m: usize, n: usize) -> Result<DenseMat> {
    if m > n {
        return Err(AlmError::InvalidInput(format!(
            "orthonormal rows need m <= n, got m={m}, n={n}"
        )));
    }
    let mut a = rng.dense_normal(m, n);
    for i in 0..m {
        for _pass in 0..2 {
            for j in 0..i {
                let proj = dot(a.row(i), a.row(j));
                let rj = a.row(j).to_vec();
                for (x, y) in a.row_mut(i).iter_mut().zip(&rj) {
                    *x -= proj * y;
                }
            }
        }
        let nr = norm(a.row(i));
        if nr < 1e-8 {
            // degenerate draw; vanishingly unlikely for Gaussian input
            return Err(AlmError::InvalidInput("rank-deficient random draw".into()));
        }
        for x in a.row_mut(i) {
            *x /= nr;
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_seeds_equal_streams() {
        let mut a = Rng::new(123);
        let mut b = Rng::new(123);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn orthonormal_rows() {
        let mut rng = Rng::new(42);
        let a = rand_orthonormal_rows(&mut rng, 16, 64).unwrap();
        let g = a.gram_rows();
        assert!(g.sub(&DenseMat::identity(16)).frobenius() <= 1e-10);
    }

    #[test]
    fn square_is_orthogonal() {
        let mut rng = Rng::new(5);
        let a = rand_orthonormal_rows(&mut rng, 7, 7).unwrap();
        let g = a.transpose().matmul(&a);
        assert!(g.sub(&DenseMat::identity(7)).frobenius() <= 1e-10);
    }

    #[test]
    fn single_row_is_unit() {
        let mut rng = Rng::new(9);
        let a = rand_orthonormal_rows(&mut rng, 1, 3).unwrap();
        assert!((norm(a.row(0)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn too_many_rows() {
        let mut rng = Rng::new(1);
        assert!(rand_orthonormal_rows(&mut rng, 4, 3).is_err());
    }
}

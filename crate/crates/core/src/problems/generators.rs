use super::{Certificate, Instance, InstanceData, KnownOptimum, PortfolioReg};
use crate::alfn::{BlockSet, IpProblem, Multipliers};
use crate::error::{AlmError, Result};
use crate::numcore::{jacobi_eig, rand_orthonormal_rows, vecops, DenseMat, Rng, SymMat};

/// `min x² s.t. x ≥ 1`, written as `1 − x ∈ (−∞, 0]`. Optimum `x = 1`
/// with multiplier 2.
pub fn toy_nlp() -> Result<Instance> {
    Ok(Instance::new("toy_nlp", None, InstanceData::ToyNlp)?.with_known(KnownOptimum {
        value: 1.0,
        x: Some(vec![1.0]),
        mult: Some(Multipliers::new(vec![], vec![2.0], vec![])),
        certificate: Certificate::Analytic,
    }))
}

/// Gaussian `A ∈ R^{m×n}` scaled by `1/√m`, `b` Gaussian and
/// `γ = frac · ‖Aᵀb‖_∞`.
pub fn lasso_random(rng: &mut Rng, m: usize, n: usize, frac: f64) -> Result<InstanceData> {
    let a = rng.dense_normal(m, n).scaled(1.0 / (m as f64).sqrt());
    let b = rng.randn(m);
    let gamma = frac * vecops::norm_inf(&a.tmatvec(&b));
    if !(gamma > 0.0) {
        return Err(AlmError::InvalidInput("lasso weight fraction must be positive".into()));
    }
    Ok(InstanceData::Lasso { a, b, gamma })
}

/// Orthonormal-row `A`, a `k`-sparse `x*` with magnitudes
/// `η₁ · 10^{d η₂ / 20}` (`η₁ = ±1`, `η₂ ~ U[0, 1]`) and `b = Ax*`.
pub fn basis_pursuit_instance(rng: &mut Rng, m: usize, n: usize, k: usize, d: f64) -> Result<Instance> {
    if k > n || m > n {
        return Err(AlmError::InvalidInput(format!("need k <= n and m <= n, got k={k} m={m} n={n}")));
    }
    let seed = rng.seed();
    let a = rand_orthonormal_rows(rng, m, n)?;
    let support = rng.sample_indices(n, k);
    let signs: Vec<f64> = (0..k).map(|_| rng.sign()).collect();
    let expo: Vec<f64> = (0..k).map(|_| rng.uniform()).collect();
    let mut inst = basis_pursuit_from_parts(a, &support, &signs, &expo, d)?;
    inst.seed = Some(seed);
    Ok(inst)
}

/// Deterministic core of [`basis_pursuit_instance`].
pub fn basis_pursuit_from_parts(a: DenseMat, support: &[usize], signs: &[f64], expo: &[f64], d: f64) -> Result<Instance> {
    let n = a.ncols();
    let mut x_star = vec![0.0; n];
    for ((&i, s), e) in support.iter().zip(signs).zip(expo) {
        if i >= n {
            return Err(AlmError::InvalidInput(format!("support index {i} out of range")));
        }
        x_star[i] = s * 10f64.powf(d * e / 20.0);
    }
    let b = a.matvec(&x_star);
    let value = x_star.iter().map(|v| v.abs()).sum();
    Ok(Instance::new("basis_pursuit", None, InstanceData::BasisPursuit { a, b, x_star: x_star.clone() })?
        .with_known(KnownOptimum { value, x: Some(x_star), mult: None, certificate: Certificate::Planted }))
}

/// Bounded, feasible LP: `K = [0, 1]^n` and a two-sided `Q` around `A x₀`.
pub fn lp_random(rng: &mut Rng, n: usize, m: usize) -> Result<Instance> {
    let seed = rng.seed();
    let c = rng.randn(n);
    let a = rng.dense_normal(m, n);
    let x0: Vec<f64> = (0..n).map(|_| rng.uniform_in(0.1, 0.9)).collect();
    let ax = a.matvec(&x0);
    let lq: Vec<f64> = ax.iter().map(|v| v - rng.uniform_in(0.05, 0.5)).collect();
    let uq: Vec<f64> = ax.iter().map(|v| v + rng.uniform_in(0.05, 0.5)).collect();
    let data = InstanceData::LpBox { c, a, lq, uq, lk: vec![0.0; n], uk: vec![1.0; n] };
    Instance::new(format!("lp_{n}x{m}_{seed}"), Some(seed), data)
}

/// Exact solution of `min ½xᵀHx + gᵀx s.t. Ax ≤ u` for strictly convex
/// `H` by enumerating active sets. Returns `(x, multipliers, value)`.
pub fn qp_active_set(h: &DenseMat, g: &[f64], a: &DenseMat, u: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let (n, m) = (g.len(), u.len());
    if m > 16 {
        return Err(AlmError::Capability(format!("active-set enumeration limited to 16 constraints, got {m}")));
    }
    let mut best: Option<(Vec<f64>, Vec<f64>, f64)> = None;
    for mask in 0u32..(1 << m) {
        let act: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let s = act.len();
        let mut kkt = DenseMat::zeros(n + s, n + s);
        for i in 0..n {
            for j in 0..n {
                kkt[(i, j)] = h[(i, j)];
            }
        }
        for (r, &ci) in act.iter().enumerate() {
            for j in 0..n {
                kkt[(n + r, j)] = a[(ci, j)];
                kkt[(j, n + r)] = a[(ci, j)];
            }
        }
        let mut rhs = vecops::scale(-1.0, g);
        rhs.extend(act.iter().map(|&ci| u[ci]));
        let Some(sol) = kkt.solve(&rhs) else { continue };
        let x = sol[..n].to_vec();
        let lam_act = &sol[n..];
        if lam_act.iter().any(|l| *l < -1e-10) {
            continue;
        }
        let ax = a.matvec(&x);
        if ax.iter().zip(u).any(|(v, ui)| *v > ui + 1e-9 * (1.0 + ui.abs())) {
            continue;
        }
        let value = 0.5 * vecops::dot(&x, &h.matvec(&x)) + vecops::dot(g, &x);
        if best.as_ref().is_none_or(|b| value < b.2) {
            let mut lam = vec![0.0; m];
            for (&ci, l) in act.iter().zip(lam_act) {
                lam[ci] = l.max(0.0);
            }
            best = Some((x, lam, value));
        }
    }
    best.ok_or_else(|| AlmError::InvalidInput("quadratic program is infeasible".into()))
}

/// Strongly convex QP `min ½xᵀHx + gᵀx s.t. Ax ≤ u` with `H ⪰ I`. Half of
/// the constraints cut off the unconstrained minimizer.
pub fn qp_box(rng: &mut Rng, n: usize, m: usize) -> Result<Instance> {
    let seed = rng.seed();
    let b = rng.dense_normal(n, n);
    let h = b.transpose().matmul(&b).scaled(1.0 / n as f64).add(&DenseMat::identity(n));
    let h = SymMat::symmetrized(&h)?.into_dense();
    let g = rng.randn(n);
    let a = rng.dense_normal(m, n);
    let x_unc = h.solve_spd(&vecops::scale(-1.0, &g))?;
    let ax = a.matvec(&x_unc);
    let u: Vec<f64> = ax
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let s = 0.5 * rng.normal().abs() + 0.05;
            if i < m.div_ceil(2) { v - s } else { v + s }
        })
        .collect();
    let (x, lam, value) = qp_active_set(&h, &g, &a, &u)?;
    Ok(Instance::new(format!("qp_{n}x{m}_{seed}"), Some(seed), InstanceData::QpBox { h, g, a, u })?.with_known(
        KnownOptimum {
            value,
            x: Some(x),
            mult: Some(Multipliers::new(vec![], lam, vec![])),
            certificate: Certificate::ActiveSetKkt,
        },
    ))
}

/// `(μ_f, L_f, μ_A, L_A)`: extreme eigenvalues of `H` and extreme
/// singular values of `A`.
pub fn sc_constants(h: &DenseMat, a: &DenseMat) -> Result<(f64, f64, f64, f64)> {
    let eh = jacobi_eig(&SymMat::symmetrized(h)?)?;
    let ea = jacobi_eig(&SymMat::symmetrized(&a.gram_rows())?)?;
    let lo = |v: &[f64]| v.last().copied().unwrap_or(0.0);
    Ok((lo(&eh.vals), eh.vals[0], lo(&ea.vals).max(0.0).sqrt(), ea.vals[0].max(0.0).sqrt()))
}

/// Random portfolio: `Q = BᵀB/n + 0.01 I`, returns in `[0.5, 1.5]`,
/// `ϱ = 0.5 · max return`, `u = 2/n`.
pub fn portfolio_random(rng: &mut Rng, n: usize, reg: PortfolioReg) -> Result<Instance> {
    let seed = rng.seed();
    let b = rng.dense_normal(n, n);
    let q = b.transpose().matmul(&b).scaled(1.0 / n as f64).add(&DenseMat::identity(n).scaled(0.01));
    let q = SymMat::symmetrized(&q)?.into_dense();
    let gamma: Vec<f64> = (0..n).map(|_| rng.uniform_in(0.5, 1.5)).collect();
    let u = 2.0 / n as f64;
    let varrho = 0.5 * super::max_return(&gamma, u);
    Instance::new(format!("portfolio_{n}_{seed}"), Some(seed), InstanceData::Portfolio { q, gamma, varrho, u, reg })
}

/// One binary variable, `min −x s.t. x ≤ 0`.
pub fn ip_toy() -> Result<Instance> {
    let p = IpProblem::new(vec![-1.0], DenseMat::from_rows(&[vec![1.0]])?, vec![0.0], vec![BlockSet::BinaryBox(1)])?;
    Ok(Instance::new("ip_toy", None, InstanceData::Ip(p))?.with_known(KnownOptimum {
        value: 0.0,
        x: Some(vec![0.0]),
        mult: None,
        certificate: Certificate::Analytic,
    }))
}

/// Exhaustive search over the block sets. `None` when nothing is feasible.
pub fn ip_enumerate(p: &IpProblem) -> Result<Option<(Vec<f64>, f64)>> {
    let sets: Vec<Vec<Vec<f64>>> = p.blocks.iter().map(|b| b.enumerate()).collect::<Result<_>>()?;
    let total: usize = sets.iter().map(|s| s.len()).try_fold(1usize, |a, l| a.checked_mul(l)).unwrap_or(usize::MAX);
    if total > 1 << 20 {
        return Err(AlmError::Capability(format!("{total} candidate points exceed the enumeration cap")));
    }
    let mut idx = vec![0usize; sets.len()];
    let mut best: Option<(Vec<f64>, f64)> = None;
    loop {
        let x: Vec<f64> = idx.iter().zip(&sets).flat_map(|(i, s)| s[*i].iter().copied()).collect();
        if p.is_feasible(&x) {
            let v = p.objective(&x);
            if best.as_ref().is_none_or(|b| v < b.1) {
                best = Some((x, v));
            }
        }
        let mut j = 0;
        loop {
            if j == idx.len() {
                return Ok(best);
            }
            idx[j] += 1;
            if idx[j] < sets[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// `p` binary blocks of `nj` variables, integer costs in `[−10, −1]`,
/// integer couplings in `[0, 3]` and `b = A x_seed + slack` for a planted
/// binary `x_seed`.
pub fn ip_block_toy(rng: &mut Rng, p: usize, nj: usize, m: usize) -> Result<Instance> {
    let n = p * nj;
    if n == 0 || n > 16 {
        return Err(AlmError::InvalidInput(format!("total variables must lie in 1..=16, got {n}")));
    }
    let seed = rng.seed();
    let c: Vec<f64> = (0..n).map(|_| -(1.0 + rng.index(10) as f64)).collect();
    let rows: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| rng.index(4) as f64).collect()).collect();
    let a = DenseMat::from_rows(&rows)?;
    let x_seed: Vec<f64> = (0..n).map(|_| rng.index(2) as f64).collect();
    let b: Vec<f64> = a.matvec(&x_seed).iter().map(|v| v + rng.index(3) as f64).collect();
    let ip = IpProblem::new(c, a, b, vec![BlockSet::BinaryBox(nj); p])?;
    debug_assert!(ip.is_feasible(&x_seed));
    let (x, value) = ip_enumerate(&ip)?.ok_or_else(|| AlmError::InvalidInput("planted point infeasible".into()))?;
    Ok(Instance::new(format!("ip_{p}x{nj}_{seed}"), Some(seed), InstanceData::Ip(ip))?.with_known(KnownOptimum {
        value,
        x: Some(x),
        mult: None,
        certificate: Certificate::BruteForce,
    }))
}

//! Exact and reference optima computed independently of the solvers.

use almkit::alfn::IpProblem;
use almkit::numcore::{vecops, DenseMat};
use almkit::problems::InstanceData;

use crate::{BenchError, Result};

const FEAS_TOL: f64 = 1e-9;

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `min cᵀx s.t. lq ≤ Ax ≤ uq, lk ≤ x ≤ uk` by enumerating every basic
/// solution: `n` active rows of `[I; A]`, each at its lower or upper side.
/// Returns `(x, value)`, or `None` if no vertex is feasible.
pub fn lp_vertex(data: &InstanceData) -> Result<Option<(Vec<f64>, f64)>> {
    let InstanceData::LpBox { c, a, lq, uq, lk, uk } = data else {
        return Err(BenchError::Capability("lp_vertex needs an lp_box instance".into()));
    };
    let (n, m) = (c.len(), a.nrows());
    if n > 10 {
        return Err(BenchError::Capability(format!("lp_vertex supports n <= 10, got {n}")));
    }
    let row = |i: usize| -> Vec<f64> {
        if i < n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        } else {
            a.row(i - n).to_vec()
        }
    };
    let bound = |i: usize, upper: bool| -> f64 {
        match (i < n, upper) {
            (true, false) => lk[i],
            (true, true) => uk[i],
            (false, false) => lq[i - n],
            (false, true) => uq[i - n],
        }
    };
    let feasible = |x: &[f64]| {
        let ax = a.matvec(x);
        let tol = |v: f64| FEAS_TOL * (1.0 + v.abs());
        x.iter().enumerate().all(|(i, v)| *v >= lk[i] - tol(lk[i]) && *v <= uk[i] + tol(uk[i]))
            && ax.iter().enumerate().all(|(i, v)| *v >= lq[i] - tol(*v) && *v <= uq[i] + tol(*v))
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    combinations(n + m, n, |act| {
        let rows: Vec<Vec<f64>> = act.iter().map(|&i| row(i)).collect();
        let Ok(mat) = DenseMat::from_rows(&rows) else { return };
        for sides in 0u32..(1 << n) {
            let rhs: Vec<f64> = act.iter().enumerate().map(|(j, &i)| bound(i, sides >> j & 1 == 1)).collect();
            if rhs.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let Some(x) = mat.solve(&rhs) else { continue };
            if !vecops::all_finite(&x) || !feasible(&x) {
                continue;
            }
            let v = vecops::dot(c, &x);
            if best.as_ref().is_none_or(|(_, b)| v < *b) {
                best = Some((x, v));
            }
        }
    });
    Ok(best)
}

/// Brute force over all binary vectors satisfying the block sets and
/// `Ax ≤ b`. Returns `(x, value)` or `None` when infeasible.
pub fn ip_bruteforce(p: &IpProblem) -> Result<Option<(Vec<f64>, f64)>> {
    let n = p.dim();
    if n > 20 {
        return Err(BenchError::Capability(format!("ip_bruteforce supports at most 20 variables, got {n}")));
    }
    let mut best: Option<(Vec<f64>, f64)> = None;
    for bits in 0u32..(1u32 << n) {
        let x: Vec<f64> = (0..n).map(|i| f64::from((bits >> i) & 1)).collect();
        if !p.in_blocks(&x) || p.a.matvec(&x).iter().zip(&p.b).any(|(r, b)| r > b) {
            continue;
        }
        let v = vecops::dot(&p.c, &x);
        if best.as_ref().is_none_or(|(_, b)| v < *b) {
            best = Some((x, v));
        }
    }
    Ok(best)
}

/// `min ½xᵀHx + gᵀx s.t. Ax ≤ u` for positive definite `H`: the unique
/// active set whose KKT system yields a feasible primal and nonnegative
/// dual. Returns `(x, λ, value)`.
pub fn qp_kkt(data: &InstanceData) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let InstanceData::QpBox { h, g, a, u } = data else {
        return Err(BenchError::Capability("qp_kkt needs a qp_box instance".into()));
    };
    let (n, m) = (g.len(), u.len());
    if m > 20 {
        return Err(BenchError::Capability(format!("qp_kkt supports at most 20 constraints, got {m}")));
    }
    for set in 0u32..(1u32 << m) {
        let act: Vec<usize> = (0..m).filter(|i| set >> i & 1 == 1).collect();
        let k = act.len();
        let mut kkt = DenseMat::zeros(n + k, n + k);
        for i in 0..n {
            for j in 0..n {
                kkt[(i, j)] = h[(i, j)];
            }
        }
        for (r, &i) in act.iter().enumerate() {
            for j in 0..n {
                kkt[(n + r, j)] = a[(i, j)];
                kkt[(j, n + r)] = a[(i, j)];
            }
        }
        let mut rhs = vecops::scale(-1.0, g);
        rhs.extend(act.iter().map(|&i| u[i]));
        let Some(sol) = kkt.solve(&rhs) else { continue };
        let x = sol[..n].to_vec();
        let mut lam = vec![0.0; m];
        for (r, &i) in act.iter().enumerate() {
            lam[i] = sol[n + r];
        }
        let ax = a.matvec(&x);
        let primal_ok = ax.iter().zip(u).all(|(r, ui)| *r <= ui + FEAS_TOL * (1.0 + ui.abs()));
        if primal_ok && lam.iter().all(|l| *l >= -FEAS_TOL) {
            let value = 0.5 * vecops::dot(&x, &h.matvec(&x)) + vecops::dot(g, &x);
            return Ok((x, lam, value));
        }
    }
    Err(BenchError::Capability("no active set satisfies the KKT conditions".into()))
}

/// Largest singular value of `a` by power iteration on `AᵀA`.
pub fn spectral_norm(a: &DenseMat) -> f64 {
    let n = a.ncols();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut s = 0.0;
    for _ in 0..500 {
        let w = a.tmatvec(&a.matvec(&v));
        let nw = vecops::norm(&w);
        if nw == 0.0 {
            return 0.0;
        }
        let next = nw.sqrt();
        v = vecops::scale(1.0 / nw, &w);
        if (next - s).abs() <= 1e-14 * next {
            return next;
        }
        s = next;
    }
    s
}

/// FISTA on `½‖Ax − b‖² + γ‖x‖₁` from zero with step `1/‖A‖²`, run for
/// `iters` iterations. Returns `(x, value)`.
pub fn ref_prox_grad(a: &DenseMat, b: &[f64], gamma: f64, iters: usize) -> (Vec<f64>, f64) {
    let n = a.ncols();
    let l = spectral_norm(a).powi(2) * (1.0 + 1e-10);
    let obj = |x: &[f64]| {
        0.5 * vecops::norm_sq(&vecops::sub(&a.matvec(x), b)) + gamma * x.iter().map(|v| v.abs()).sum::<f64>()
    };
    if l == 0.0 {
        let x = vec![0.0; n];
        let v = obj(&x);
        return (x, v);
    }
    let mut x = vec![0.0; n];
    let mut y = x.clone();
    let mut t = 1.0f64;
    for _ in 0..iters {
        let g = a.tmatvec(&vecops::sub(&a.matvec(&y), b));
        let z = vecops::add_scaled(&y, -1.0 / l, &g);
        let xn: Vec<f64> = z.iter().map(|v| v.signum() * (v.abs() - gamma / l).max(0.0)).collect();
        let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        let beta = (t - 1.0) / tn;
        y = xn.iter().zip(&x).map(|(a, b)| a + beta * (a - b)).collect();
        x = xn;
        t = tn;
    }
    let v = obj(&x);
    (x, v)
}

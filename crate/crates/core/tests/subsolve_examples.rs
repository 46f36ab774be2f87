use std::sync::Arc;

use almkit::alfn::*;
use almkit::numcore::{vecops, DenseMat, Rng};
use almkit::prox::{ProxFn, SetSpec};
use almkit::subsolve::*;
use proptest::prelude::*;

fn shifted_square() -> FnSmooth {
    FnSmooth::new(1, |x| Ok(((x[0] - 3.0).powi(2), vec![2.0 * (x[0] - 3.0)])))
}

fn toy() -> NlpProblem {
    let f = Quadratic::new(DenseMat::identity(1).scaled(2.0), vec![0.0], 0.0).unwrap();
    let c = AffineMap::new(DenseMat::from_rows(&[vec![-1.0]]).unwrap(), vec![1.0]).unwrap();
    NlpProblem::new(Arc::new(f), Some(Arc::new(c)), Some(SetSpec::nonpos()), None).unwrap()
}

fn random_quadratic(rng: &mut Rng, n: usize, cond: f64) -> Quadratic {
    let q = almkit::numcore::rand_orthonormal_rows(rng, n, n).unwrap();
    let eig: Vec<f64> = (0..n)
        .map(|i| cond.powf(i as f64 / (n - 1).max(1) as f64))
        .collect();
    let h = q.transpose().matmul(&DenseMat::diag(&eig)).matmul(&q);
    let h = DenseMat::from_rows(
        &(0..n)
            .map(|i| (0..n).map(|j| 0.5 * (h[(i, j)] + h[(j, i)])).collect())
            .collect::<Vec<_>>(),
    )
    .unwrap();
    Quadratic::new(h, rng.randn(n), 0.0).unwrap()
}

#[test]
fn gd_bb_shifted_square() {
    let f = shifted_square();
    let r = gd_bb(&f, &[0.0], &InnerOpts::default().with_tol(1e-8)).unwrap();
    assert!(r.converged());
    assert!(r.residual <= 1e-8);
    assert!(r.iters <= 30, "iters {}", r.iters);
    assert!((r.x[0] - 3.0).abs() < 1e-8);
}

#[test]
fn gd_bb_unbounded_hits_max_iter() {
    let f = Linear { c: vec![1.0, -2.0] };
    let r = gd_bb(&f, &[0.0, 0.0], &InnerOpts::default().with_max_iter(50)).unwrap();
    assert_ne!(r.status, InnerStatus::Converged);
}

#[test]
fn gd_bb_toy_al_minimizer() {
    let p = toy();
    let m = Multipliers::new(vec![], vec![2.0], vec![]);
    let al = NlpAl { p: &p, mult: &m, rho: 1.0 };
    let r = gd_bb(&al, &[-4.0], &InnerOpts::default().with_tol(1e-10)).unwrap();
    assert!(r.converged());
    assert!((r.x[0] - 1.0).abs() < 1e-9);
}

#[test]
fn nag_condition_100_within_textbook_bound() {
    let mut rng = Rng::new(21);
    let f = random_quadratic(&mut rng, 12, 100.0);
    let eps: f64 = 1e-10;
    let bound = (10.0 * 100f64.sqrt() * (1.0 / eps).ln()).ceil() as usize;
    let x0 = rng.randn(12);
    let known = InnerOpts { lipschitz: Some(100.0), ..InnerOpts::default().with_tol(eps) };
    let r = nag(&f, &x0, &known, 1.0).unwrap();
    assert!(r.converged() && r.iters <= bound, "iters {} bound {bound}", r.iters);
    let est = nag(&f, &x0, &InnerOpts::default().with_tol(eps), 1.0).unwrap();
    assert!(est.converged() && est.iters <= bound, "iters {} bound {bound}", est.iters);
}

#[test]
fn nag_flat_valley() {
    let f = FnSmooth::new(1, |x| Ok(((x[0] - 3.0).powi(4), vec![4.0 * (x[0] - 3.0).powi(3)])));
    let r = nag(&f, &[0.0], &InnerOpts::default().with_tol(1e-8).with_max_iter(100_000), 0.0).unwrap();
    assert!(r.x[0].is_finite());
    assert!(r.converged());
    assert!(r.trace.iter().all(|v| v.is_finite()));
}

#[test]
fn nag_matches_gd_bb() {
    let mut rng = Rng::new(5);
    for _ in 0..5 {
        let f = random_quadratic(&mut rng, 8, 30.0);
        let x0 = rng.randn(8);
        let opts = InnerOpts::default().with_tol(1e-11).with_max_iter(50_000);
        let a = nag(&f, &x0, &opts, 0.0).unwrap();
        let b = gd_bb(&f, &x0, &opts).unwrap();
        assert!(a.converged() && b.converged());
        assert!(vecops::dist(&a.x, &b.x) < 1e-8);
    }
}

#[test]
fn prox_grad_soft_threshold() {
    let f = FnSmooth::new(1, |x| Ok((0.5 * (x[0] - 2.0).powi(2), vec![x[0] - 2.0])));
    let r = prox_grad(&f, &ProxFn::l1(1.0).unwrap(), &[0.0], &InnerOpts::default().with_tol(1e-10)).unwrap();
    assert!(r.converged());
    assert!((r.x[0] - 1.0).abs() < 1e-10);
}

#[test]
fn prox_grad_zero_is_gradient_descent() {
    let mut rng = Rng::new(8);
    let f = random_quadratic(&mut rng, 5, 10.0);
    let x0 = rng.randn(5);
    let l = 10.0;
    for n in [1, 3, 17] {
        let opts = InnerOpts { lipschitz: Some(l), ..InnerOpts::default().with_tol(1e-300).with_max_iter(n) };
        let r = prox_grad(&f, &ProxFn::Zero, &x0, &opts).unwrap();
        let mut x = x0.clone();
        for _ in 0..n {
            let (_, g) = f.value_grad(&x).unwrap();
            x = vecops::add_scaled(&x, -1.0 / l, &g);
        }
        assert_eq!(r.x, x);
    }
}

fn ista_reference(a: &DenseMat, b: &[f64], gamma: f64, iters: usize) -> Vec<f64> {
    // plain ISTA with 1/L step, L = ‖A‖² bounded by the Frobenius norm
    let l = a.frobenius().powi(2);
    let mut x = vec![0.0; a.ncols()];
    for _ in 0..iters {
        let r = vecops::sub(&a.matvec(&x), b);
        let g = a.tmatvec(&r);
        x = x
            .iter()
            .zip(&g)
            .map(|(xi, gi)| {
                let z = xi - gi / l;
                z.signum() * (z.abs() - gamma / l).max(0.0)
            })
            .collect();
    }
    x
}

#[test]
fn prox_grad_lasso_matches_long_reference() {
    let mut rng = Rng::new(99);
    let (m, n) = (15, 30);
    let a = rng.dense_normal(m, n);
    let b = rng.randn(m);
    let gamma = 0.5;
    let obj = |x: &[f64]| {
        0.5 * vecops::norm_sq(&vecops::sub(&a.matvec(x), &b)) + gamma * x.iter().map(|v| v.abs()).sum::<f64>()
    };
    let xref = ista_reference(&a, &b, gamma, 100_000);
    let f = LeastSquares::new(Arc::new(a.clone()), b.clone()).unwrap();
    let r = prox_grad(&f, &ProxFn::l1(gamma).unwrap(), &vec![0.0; n], &InnerOpts::default().with_tol(1e-10).with_max_iter(200_000))
        .unwrap();
    assert!(r.converged());
    assert!((obj(&r.x) - obj(&xref)).abs() <= 1e-8, "{} vs {}", obj(&r.x), obj(&xref));
}

fn kinked() -> FnSmooth {
    FnSmooth::new(1, |x| {
        let p = x[0].max(0.0);
        Ok((0.5 * x[0] * x[0] + 0.5 * p * p - x[0], vec![x[0] + p - 1.0]))
    })
    .with_hessian(|x| Ok(DenseMat::diag(&[if x[0] > 0.0 { 2.0 } else { 1.0 }])))
}

#[test]
fn ssn_piecewise_linear_root() {
    let r = ssn(&kinked(), &[1.0], &InnerOpts::default().with_tol(1e-6)).unwrap();
    assert!(r.converged());
    assert!((r.x[0] - 0.5).abs() < 1e-6);
    assert!(r.newton_steps <= 3, "steps {}", r.newton_steps);
}

#[test]
fn ssn_quadratic_one_step() {
    let mut rng = Rng::new(3);
    let f = random_quadratic(&mut rng, 10, 50.0);
    let mut opts = InnerOpts::default().with_tol(1e-12);
    opts.ssn.reg_scale = 0.0;
    opts.ssn.cg_tol = 1e-15;
    let r = ssn(&f, &rng.randn(10), &opts).unwrap();
    assert!(r.converged());
    assert_eq!(r.newton_steps, 1);
    assert!(r.residual <= 1e-12);
}

#[test]
fn ssn_toy_al_superlinear_tail() {
    let p = toy();
    let m = Multipliers::new(vec![], vec![0.5], vec![]);
    let al = NlpAl { p: &p, mult: &m, rho: 10.0 };
    let r = ssn(&al, &[6.0], &InnerOpts::default().with_tol(1e-13)).unwrap();
    assert!(r.converged());
    let t = &r.trace;
    assert!(t.len() >= 4, "trace {t:?}");
    let ratios: Vec<f64> = t.windows(2).map(|w| w[1] / w[0]).collect();
    let tail = &ratios[ratios.len() - 3..];
    assert!(tail[2] < tail[0] && tail[2] < 1e-2, "ratios {ratios:?}");
}

#[test]
fn armijo_records_hold_and_runs_are_deterministic() {
    let p = toy();
    let m = Multipliers::new(vec![], vec![1.0], vec![]);
    let al = NlpAl { p: &p, mult: &m, rho: 3.0 };
    for solver in [0, 1] {
        let run = || match solver {
            0 => gd_bb(&al, &[7.0], &InnerOpts::default()).unwrap(),
            _ => ssn(&al, &[7.0], &InnerOpts::default()).unwrap(),
        };
        let (a, b) = (run(), run());
        assert!(!a.armijo.is_empty());
        assert!(a.armijo.iter().all(|r| r.holds()));
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.x, b.x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn converged_reports_meet_tolerance(seed in 0u64..10_000, tol_exp in 4i32..11) {
        let mut rng = Rng::new(seed);
        let f = random_quadratic(&mut rng, 6, 20.0);
        let x0 = rng.randn(6);
        let tol = 10f64.powi(-tol_exp);
        let opts = InnerOpts::default().with_tol(tol);
        let reps = [
            gd_bb(&f, &x0, &opts).unwrap(),
            nag(&f, &x0, &opts, 0.0).unwrap(),
            prox_grad(&f, &ProxFn::l1(0.1).unwrap(), &x0, &opts).unwrap(),
            ssn(&f, &x0, &opts).unwrap(),
        ];
        for (i, r) in reps.iter().enumerate() {
            prop_assert!(r.converged(), "{i} {:?} {} {}", r.status, r.iters, r.residual);
            prop_assert!(r.residual <= tol);
            prop_assert!(r.armijo.iter().all(|a| a.holds()));
        }
        let pg = prox_grad_residual(&f, &ProxFn::l1(0.1).unwrap(), &reps[2].x, 1.0 / 20.0).unwrap();
        prop_assert!(pg.is_finite());
    }
}

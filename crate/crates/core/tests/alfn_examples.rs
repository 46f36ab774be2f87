use std::sync::Arc;

use almkit::alfn::*;
use almkit::numcore::{fd_directional, fd_grad, rel_err, vecops, DenseMat, Identity, LinOp, Rng};
use almkit::prox::{BoxBounds, ProxFn, SetSpec};

fn toy() -> NlpProblem {
    let f = Quadratic::new(DenseMat::identity(1).scaled(2.0), vec![0.0], 0.0).unwrap();
    let c = AffineMap::new(DenseMat::from_rows(&[vec![-1.0]]).unwrap(), vec![1.0]).unwrap();
    NlpProblem::new(Arc::new(f), Some(Arc::new(c)), Some(SetSpec::nonpos()), None).unwrap()
}

#[test]
fn toy_kkt_point_value_and_gradient() {
    let p = toy();
    let (v, g) = al_nlp(&p, &[1.0], &[2.0], &[], 1.0).unwrap();
    assert!((v - 1.0).abs() < 1e-15);
    assert!(g[0].abs() < 1e-15);
    let d = al_nlp_dual(&p, &[1.0], &[2.0], &[], 1.0).unwrap();
    assert_eq!(d.lambda, vec![0.0]);
    assert_eq!(d.rho, 0.0);
}

#[test]
fn feasible_point_zero_multipliers() {
    let p = toy();
    let (v, _) = al_nlp(&p, &[1.7], &[0.0], &[], 3.0).unwrap();
    assert!((v - 1.7 * 1.7).abs() < 1e-14);
    let d = al_nlp_dual(&p, &[1.7], &[0.0], &[], 3.0).unwrap();
    assert_eq!(d.lambda, vec![0.0]);
    assert_eq!(d.rho, 0.0);
}

#[test]
fn inequality_dual_gradient_formula() {
    let p = toy();
    let mut rng = Rng::new(4);
    for _ in 0..100 {
        let x = rng.normal() * 2.0;
        let lam = rng.uniform() * 3.0;
        let rho = rng.uniform_in(0.1, 10.0);
        let d = al_nlp_dual(&p, &[x], &[lam], &[], rho).unwrap();
        let expect = (-lam / rho).max(1.0 - x);
        assert!((d.lambda[0] - expect).abs() < 1e-12);
        assert!((d.rho - 0.5 * expect * expect).abs() < 1e-12);
    }
}

#[test]
fn nlp_gradient_matches_fd() {
    let mut rng = Rng::new(10);
    let n = 4;
    let b = rng.dense_normal(n, n);
    let h = b.transpose().matmul(&b);
    let f = Quadratic::new(h, rng.randn(n), 0.0).unwrap();
    let c = FnMap::new(
        n,
        2,
        |x| Ok(vec![x[0] * x[1] + x[2].sin(), x.iter().map(|v| v * v).sum::<f64>() - 1.0]),
        |x| {
            DenseMat::from_rows(&[
                vec![x[1], x[0], x[2].cos(), 0.0],
                x.iter().map(|v| 2.0 * v).collect(),
            ])
        },
    );
    let q = SetSpec::boxed(BoxBounds::from_f64(&[-0.5, f64::NEG_INFINITY], &[0.5, 0.0]).unwrap()).unwrap();
    let k = SetSpec::boxed(BoxBounds::uniform(-1.0, 1.0).unwrap()).unwrap();
    let p = NlpProblem::new(Arc::new(f), Some(Arc::new(c)), Some(q), Some(k)).unwrap();
    for _ in 0..20 {
        let x = rng.randn(n);
        let lam = rng.randn(2);
        let mu = rng.randn(n);
        let (_, g) = al_nlp(&p, &x, &lam, &mu, 2.5).unwrap();
        let fd = fd_grad(|z| Ok(al_nlp(&p, z, &lam, &mu, 2.5)?.0), &x, 1e-6).unwrap();
        assert!(rel_err(&g, &fd, 1.0) < 1e-5);
    }
}

#[test]
fn hessian_reduces_to_h_when_inactive() {
    let h = DenseMat::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
    let f = Quadratic::new(h.clone(), vec![0.0; 2], 0.0).unwrap();
    let k = SetSpec::boxed(BoxBounds::uniform(-10.0, 10.0).unwrap()).unwrap();
    let p = NlpProblem::new(Arc::new(f), None, None, Some(k)).unwrap();
    let w = gen_hessian_nlp(&p, &[0.3, -0.2], &[], &[0.0, 0.0], 5.0).unwrap();
    assert_eq!(w.apply(&[1.0, 0.0]), h.column(0));
    assert_eq!(w.apply(&[0.0, 1.0]), h.column(1));
}

#[test]
fn hessian_fully_violated_affine() {
    let mut rng = Rng::new(2);
    let a = rng.dense_normal(3, 4);
    let f = Linear { c: vec![0.0; 4] };
    let c = AffineMap::new(a.clone(), vec![-100.0; 3]).unwrap();
    let k = SetSpec::nonneg();
    let p = NlpProblem::new(Arc::new(f), Some(Arc::new(c)), Some(SetSpec::point(vec![0.0; 3]).unwrap()), Some(k)).unwrap();
    let rho = 3.0;
    let x = vec![-1.0; 4];
    let w = gen_hessian_nlp(&p, &x, &[0.0; 3], &[0.0; 4], rho).unwrap();
    let d = rng.randn(4);
    let expect = vecops::add(&vecops::scale(rho, &a.tmatvec(&a.matvec(&d))), &vecops::scale(rho, &d));
    assert!(vecops::dist(&w.apply(&d), &expect) < 1e-12);
}

#[test]
fn hessian_matches_directional_fd() {
    let mut rng = Rng::new(21);
    let n = 3;
    let f = FnSmooth::new(n, |x: &[f64]| {
        Ok((x[0].powi(4) + x[1] * x[2], vec![4.0 * x[0].powi(3), x[2], x[1]]))
    })
    .with_hessian(|x| {
        DenseMat::from_rows(&[
            vec![12.0 * x[0] * x[0], 0.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
        ])
    });
    let c = FnMap::new(n, 1, |x| Ok(vec![x[0] * x[0] + x[1] - x[2]]), |x| {
        DenseMat::from_rows(&[vec![2.0 * x[0], 1.0, -1.0]])
    })
    .with_weighted_hessian(|_x, u| Ok(DenseMat::diag(&[2.0 * u[0], 0.0, 0.0])));
    let q = SetSpec::boxed(BoxBounds::uniform(-0.3, 0.3).unwrap()).unwrap();
    let k = SetSpec::boxed(BoxBounds::uniform(-0.8, 0.8).unwrap()).unwrap();
    let p = NlpProblem::new(Arc::new(f), Some(Arc::new(c)), Some(q), Some(k)).unwrap();
    let mut checked = 0;
    while checked < 20 {
        let x = rng.randn(n);
        let lam = rng.randn(1);
        let mu = rng.randn(n);
        let rho = 2.0;
        let cx = p.c.as_ref().unwrap().eval(&x).unwrap()[0] + lam[0] / rho;
        let zx = vecops::add_scaled(&x, 1.0 / rho, &mu);
        let near = |v: f64, b: f64| (v.abs() - b).abs() < 1e-3;
        if near(cx, 0.3) || zx.iter().any(|v| near(*v, 0.8)) {
            continue;
        }
        let d = rng.randn(n);
        let w = gen_hessian_nlp(&p, &x, &lam, &mu, rho).unwrap();
        let fd = fd_directional(|z| Ok(al_nlp(&p, z, &lam, &mu, rho)?.1), &x, &d, 1e-6).unwrap();
        assert!(rel_err(&w.apply(&d), &fd, 1.0) < 1e-4);
        checked += 1;
    }
}

#[test]
fn composite_pure_penalty() {
    let f = Linear { c: vec![0.0] };
    let p = CompositeProblem::new(
        Arc::new(f),
        ProxFn::Zero,
        Some(Arc::new(Identity(1))),
        Some(SetSpec::point(vec![0.0]).unwrap()),
        None,
    )
    .unwrap();
    let e = al_composite_smooth(&p, &[1.0], &Multipliers::new(vec![], vec![0.0], vec![]), 2.0).unwrap();
    assert_eq!(e.value, 1.0);
    assert_eq!(e.grad_x, vec![2.0]);
    assert_eq!(e.grad_lambda, vec![1.0]);
}

#[test]
fn composite_saddle_consistency() {
    // x interior of K with mu = 0, Ax = b, nu chosen so that prox(x + nu/rho) = x.
    let mut rng = Rng::new(5);
    let a = rng.dense_normal(2, 3);
    let x = vec![0.5, -0.7, 1.2];
    let b = a.matvec(&x);
    let gamma = 0.4;
    let f = Quadratic::new(DenseMat::identity(3), vec![0.1, 0.2, 0.3], 0.0).unwrap();
    let p = CompositeProblem::new(
        Arc::new(f),
        ProxFn::L1(gamma),
        Some(Arc::new(a)),
        Some(SetSpec::point(b).unwrap()),
        Some(SetSpec::boxed(BoxBounds::uniform(-2.0, 2.0).unwrap()).unwrap()),
    )
    .unwrap();
    let nu: Vec<f64> = x.iter().map(|v| gamma * v.signum()).collect();
    let mult = Multipliers::new(nu, rng.randn(2), vec![0.0; 3]);
    let rho = 3.0;
    let e = al_composite_smooth(&p, &x, &mult, rho).unwrap();
    assert!(e.dual_norm() < 1e-12);
    assert!((e.value - p.objective(&x).unwrap()).abs() < 1e-12);
}

#[test]
fn nonconvex_h_rejected_by_smooth_form() {
    let p = CompositeProblem::new(Arc::new(Linear { c: vec![0.0] }), ProxFn::L0(1.0), None, None, None).unwrap();
    let r = al_composite_smooth(&p, &[1.0], &Multipliers::zeros(1, 0, 0), 1.0);
    assert!(matches!(r, Err(almkit::AlmError::VariantMismatch(_))));
}

#[test]
fn retained_coincides_with_smooth_for_zero_h() {
    let mut rng = Rng::new(8);
    let a = rng.dense_normal(3, 5);
    let f = LeastSquares::new(Arc::new(rng.dense_normal(4, 5)), rng.randn(4)).unwrap();
    let p = CompositeProblem::new(
        Arc::new(f),
        ProxFn::Zero,
        Some(Arc::new(a)),
        Some(SetSpec::boxed(BoxBounds::uniform(-0.5, 0.5).unwrap()).unwrap()),
        Some(SetSpec::nonneg()),
    )
    .unwrap();
    for _ in 0..50 {
        let x = rng.randn(5);
        let lam = rng.randn(3);
        let mu = rng.randn(5);
        let rho = rng.uniform_in(0.5, 5.0);
        let s = al_composite_smooth(&p, &x, &Multipliers::new(vec![], lam.clone(), mu.clone()), rho).unwrap();
        let r = al_composite_retained(&p, &x, &lam, &mu, rho).unwrap();
        assert!((s.value - r.value).abs() <= 1e-12 * (1.0 + s.value.abs()));
        assert!(vecops::dist(&s.grad_x, &r.smooth_grad) <= 1e-12 * (1.0 + vecops::norm(&s.grad_x)));
    }
}

#[test]
fn nonconvex_block_minimizer_and_consistency() {
    let mut rng = Rng::new(12);
    let n = 4;
    let f = Quadratic::new(DenseMat::identity(n), vec![0.0; n], 0.0).unwrap();
    let c = AffineMap::new(rng.dense_normal(2, n), vec![0.0; 2]).unwrap();
    let p = NcCompositeProblem::new(Arc::new(f), ProxFn::L0(0.1), Arc::new(c), SetSpec::nonpos(), Some(SetSpec::nonneg())).unwrap();
    let x = rng.randn(n);
    let mult = Multipliers::new(vec![], rng.randn(2), rng.randn(n));
    let e0 = al_nonconvex(&p, &x, &[0.0, 0.0], &mult, 2.0).unwrap();
    let e = al_nonconvex(&p, &x, &e0.v_hint, &mult, 2.0).unwrap();
    let projected = almkit::prox::project(&p.q, &vecops::sub(&e.v_hint, &e.grad_v)).unwrap();
    assert!(vecops::dist(&projected, &e.v_hint) < 1e-12);

    // feasible consistent point: x ≥ 0 interior, c(x) ≤ 0 with λ = 0, v = c(x), μ = 0
    let c2 = AffineMap::new(DenseMat::from_rows(&[vec![1.0, 1.0, 1.0, 1.0]]).unwrap(), vec![-10.0]).unwrap();
    let f2 = Quadratic::new(DenseMat::identity(n), vec![0.0; n], 0.0).unwrap();
    let p2 = NcCompositeProblem::new(Arc::new(f2), ProxFn::L0(0.1), Arc::new(c2), SetSpec::nonpos(), Some(SetSpec::nonneg())).unwrap();
    let x2 = vec![1.0, 2.0, 0.5, 0.25];
    let v2 = p2.c.eval(&x2).unwrap();
    let e2 = al_nonconvex(&p2, &x2, &v2, &Multipliers::zeros(0, 1, n), 4.0).unwrap();
    assert!(e2.dual_norm() < 1e-15);
    assert!((e2.value - p2.objective(&x2).unwrap()).abs() < 1e-12);
}

#[test]
fn ip_arithmetic() {
    let p = IpProblem::new(vec![-1.0], DenseMat::from_rows(&[vec![1.0]]).unwrap(), vec![0.0], vec![BlockSet::BinaryBox(1)]).unwrap();
    let e = al_ip(&p, &[1.0], &[0.0], 2.0).unwrap();
    assert_eq!(e.value, 0.0);
    assert_eq!(e.grad_mu, vec![1.0]);
    assert_eq!(e.grad_rho, 0.5);
    assert!(al_ip(&p, &[1.0], &[-1.0], 2.0).is_err());
    let e = al_ip(&p, &[0.0], &[3.0], 2.0).unwrap();
    assert_eq!(e.value, 0.0);
}

#[test]
fn block_projection_tie_breaks() {
    assert_eq!(BlockSet::BinaryBox(3).project(&[0.7, 0.5, 0.2]), vec![1.0, 0.0, 0.0]);
    assert_eq!(BlockSet::PickAtMostOne(3).project(&[0.7, 0.9, 0.2]), vec![0.0, 1.0, 0.0]);
    assert_eq!(BlockSet::PickAtMostOne(2).project(&[0.5, 0.3]), vec![0.0, 0.0]);
    assert_eq!(BlockSet::BinaryBox(3).enumerate().unwrap().len(), 8);
    assert_eq!(BlockSet::PickAtMostOne(3).enumerate().unwrap().len(), 4);
    assert!(BlockSet::BinaryBox(17).enumerate().is_err());
}

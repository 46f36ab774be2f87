use almkit::numcore::{fd_grad, jacobi_eig, rel_err, vecops, Rng, SymMat};
use almkit::prox::{moreau, BoxBounds, ProxFn, SetSpec};
use proptest::prelude::*;

fn convex_kinds(n: usize) -> Vec<ProxFn> {
    vec![
        ProxFn::Zero,
        ProxFn::L1(0.7),
        ProxFn::Box(BoxBounds::uniform(-0.5, 1.5).unwrap()),
        ProxFn::Box(BoxBounds::from_f64(&vec![0.0; n], &vec![f64::INFINITY; n]).unwrap()),
        ProxFn::Nonneg,
        ProxFn::Nonpos,
        ProxFn::InfBall(1.3),
        ProxFn::Point(vec![0.25; n]),
    ]
}

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn moreau_decomposition(x in vec_strategy(6), lt in -2.0f64..2.0) {
        let t = 10f64.powf(lt);
        for f in [ProxFn::L1(0.8), ProxFn::InfBall(0.8), ProxFn::Nonneg, ProxFn::Nonpos] {
            let conj = f.conjugate().unwrap();
            let p = f.prox(t, &x).unwrap();
            let tx = vecops::scale(t, &x);
            let q = conj.prox(1.0 / t, &tx).unwrap();
            let recon = vecops::add_scaled(&p, 1.0 / t, &q);
            prop_assert!(vecops::dist(&recon, &x) <= 1e-10 * (1.0 + vecops::norm(&x)));
        }
    }

    #[test]
    fn prox_nonexpansive(x in vec_strategy(5), y in vec_strategy(5), lt in -2.0f64..2.0) {
        let t = 10f64.powf(lt);
        for f in convex_kinds(5) {
            let d = vecops::dist(&f.prox(t, &x).unwrap(), &f.prox(t, &y).unwrap());
            prop_assert!(d <= vecops::dist(&x, &y) + 1e-12);
        }
    }

    #[test]
    fn envelope_gradient_matches_fd(x in vec_strategy(4), lt in -1.0f64..1.0) {
        let t = 10f64.powf(lt);
        for f in convex_kinds(4) {
            let e = moreau(&f, t, &x).unwrap();
            let g = fd_grad(|z| Ok(moreau(&f, t, z)?.value), &x, 1e-6).unwrap();
            prop_assert!(rel_err(&e.grad, &g, 1.0) <= 1e-5, "{} t={t}", f.name());
        }
    }

    #[test]
    fn envelope_monotone_in_t(x in vec_strategy(4), a in 0.01f64..10.0, b in 0.01f64..10.0) {
        let (t1, t2) = if a <= b { (a, b) } else { (b, a) };
        for f in convex_kinds(4) {
            let e1 = moreau(&f, t1, &x).unwrap().value;
            let e2 = moreau(&f, t2, &x).unwrap().value;
            prop_assert!(e1 <= e2 + 1e-12 * (1.0 + e2.abs()));
        }
    }

    #[test]
    fn projection_idempotent(x in vec_strategy(5)) {
        let sets = [
            SetSpec::nonneg(),
            SetSpec::nonpos(),
            SetSpec::inf_ball(0.5).unwrap(),
            SetSpec::boxed(BoxBounds::uniform(-1.0, 2.0).unwrap()).unwrap(),
            SetSpec::point(vec![1.0; 5]).unwrap(),
        ];
        for s in &sets {
            let p = almkit::prox::project(s, &x).unwrap();
            let pp = almkit::prox::project(s, &p).unwrap();
            prop_assert_eq!(p, pp);
        }
    }
}

#[test]
fn psd_projection_is_nearest() {
    let mut rng = Rng::new(17);
    let cone = ProxFn::PsdCone { n: 4 };
    for _ in 0..10 {
        let x = rng.sym_mat(4);
        let p = cone.prox(1.0, &x.svec()).unwrap();
        let pm = SymMat::smat(4, &p).unwrap();
        let e = jacobi_eig(&pm).unwrap();
        assert!(*e.vals.last().unwrap() >= -1e-10);
        let dp = vecops::dist(&p, &x.svec());
        for _ in 0..20 {
            let b = rng.dense_normal(4, 4);
            let z = SymMat::symmetrized(&b.matmul(&b.transpose())).unwrap();
            assert!(dp <= vecops::dist(&z.svec(), &x.svec()) + 1e-12);
        }
    }
}

#[test]
fn psd_envelope_gradient() {
    let mut rng = Rng::new(23);
    let cone = ProxFn::PsdCone { n: 3 };
    for _ in 0..20 {
        let x = rng.sym_mat(3).svec();
        let e = moreau(&cone, 2.0, &x).unwrap();
        let g = fd_grad(|z| Ok(moreau(&cone, 2.0, z)?.value), &x, 1e-6).unwrap();
        assert!(rel_err(&e.grad, &g, 1.0) <= 1e-5);
    }
}

use almkit::alfn::*;
use almkit::alm::*;
use almkit::numcore::{vecops, DenseMat, Rng};
use almkit::problems::*;
use almkit::prox::ProxFn;
use almkit::variants::*;

fn composite(p: &Problem) -> &CompositeProblem {
    match p {
        Problem::Composite(c) => c,
        other => panic!("expected composite, got {}", other.kind()),
    }
}

fn small_bp(seed: u64) -> Instance {
    let mut rng = Rng::new(seed);
    basis_pursuit_instance(&mut rng, 20, 40, 3, 0.0).unwrap()
}

#[test]
fn linearized_alm_recovers_planted_point() {
    let inst = small_bp(3);
    let c = composite(&inst.problem);
    let Some(InstanceData::BasisPursuit { a, .. }) = Some(&inst.data) else { panic!() };
    let l = a.frobenius().powi(2);
    let cfg = LoopConfig { rho: 1.0, max_iter: 200_000, tol_stat: 1e-10, tol_feas: 1e-16 };
    let r = linearized_alm(c, &cfg, 1.0 / (cfg.rho * l), &vec![0.0; 40]).unwrap();
    assert_eq!(r.status, SolveStatus::Converged);
    assert!(inst.rel_err(&r.x).unwrap() <= 1e-6, "relerr {}", inst.rel_err(&r.x).unwrap());
}

#[test]
fn linearized_step_fixed_point_has_zero_measures() {
    let inst = small_bp(4);
    let c = composite(&inst.problem);
    let cfg = LoopConfig { rho: 1.0, max_iter: 200_000, tol_stat: 1e-12, tol_feas: 1e-20 };
    let Some(InstanceData::BasisPursuit { a, .. }) = Some(&inst.data) else { panic!() };
    let step = 1.0 / a.frobenius().powi(2);
    let r = linearized_alm(c, &cfg, step, &vec![0.0; 40]).unwrap();
    let st = AlmState { x: r.x.clone(), mult: r.mult.clone(), rho: 1.0, eta: 0.0, eps: 0.0, k: 0 };
    let next = linearized_alm_step(c, &st, step).unwrap();
    assert!(vecops::dist(&next.x, &st.x) <= 1e-8);
    assert!(next.mult.dist(&st.mult) <= 1e-8);
    let m = measures(&inst.problem, &st.x, &st.mult, 1.0).unwrap();
    assert!(m.sigma <= 1e-8 && m.theta <= 1e-14, "{m:?}");
}

#[test]
fn linearized_step_rejects_smooth_form() {
    let inst = small_bp(5);
    let c = composite(&inst.problem);
    let st = AlmState {
        x: vec![0.0; 40],
        mult: Multipliers::zeros(40, 20, 0),
        rho: 1.0,
        eta: 1.0,
        eps: 1.0,
        k: 0,
    };
    assert!(linearized_alm_step(c, &st, 0.1).is_err());
    assert!(linearized_alm_step(c, &AlmState { mult: Multipliers::zeros(0, 20, 0), ..st }, 0.0).is_err());
}

#[test]
fn proximal_alm_zero_weight_matches_practical() {
    let mut rng = Rng::new(11);
    let inst = lp_random(&mut rng, 6, 3).unwrap();
    let cfg = AlmConfig::default();

    let st = AlmState {
        x: vec![0.0; 6],
        mult: initial_multipliers(&inst.problem, cfg.inner_solver),
        rho: cfg.rho0,
        eta: 1.0 / cfg.rho0,
        eps: 1.0 / cfg.rho0.sqrt(),
        k: 0,
    };
    let (next, _) = proximal_alm_step(&inst.problem, &cfg, &st, 0.0).unwrap();
    let out = outer_step(&inst.problem, &cfg, &st).unwrap();
    assert_eq!(next.x, out.state.x);
    if out.record.branch == Branch::Accept {
        assert_eq!(next.mult, out.state.mult);
    }
    assert!(proximal_alm_step(&inst.problem, &cfg, &st, -1.0).is_err());
}

#[test]
fn proximal_alm_converges_and_keeps_ledger() {
    for seed in 0..5 {
        let mut rng = Rng::new(20 + seed);
        let inst = lp_random(&mut rng, 6, 3).unwrap();
        let cfg = AlmConfig::default();
        let base = solve_practical(&inst.problem, &cfg).unwrap();
        let r = proximal_alm(&inst.problem, &cfg, 0.01).unwrap();
        assert_eq!(r.status, SolveStatus::Converged, "seed {seed}");
        r.check_ledger(&cfg).unwrap();
        let fa = inst.objective(&base.x).unwrap();
        let fb = inst.objective(&r.x).unwrap();
        assert!((fa - fb).abs() <= 1e-4 * (1.0 + fa.abs()), "{fa} vs {fb}");
    }
}

#[test]
fn momentum_sequence() {
    let mut t = 1.0;
    for k in 0..50 {
        assert!(t >= (k as f64 + 2.0) / 2.0 - 1e-12);
        let b = momentum(t);
        assert!((0.0..1.0).contains(&b));
        let tn = t_next(t);
        assert!((tn * tn - tn - t * t).abs() <= 1e-9 * tn * tn);
        t = tn;
    }
}

#[test]
fn accel_dual_alm_matches_practical() {
    for seed in 0..4 {
        let mut rng = Rng::new(40 + seed);
        let inst = qp_box(&mut rng, 8, 4).unwrap();
        let cfg = AlmConfig { rho0: 2.0, eta_final: 1e-8, eps_final: 1e-8, max_outer: 500, ..AlmConfig::default() };
        let r = accel_dual_alm(&inst.problem, &cfg, 1.0).unwrap();
        assert_eq!(r.status, SolveStatus::Converged, "seed {seed}");
        let known = inst.known.as_ref().unwrap();
        let f = inst.objective(&r.x).unwrap();
        assert!((f - known.value).abs() <= 1e-6 * (1.0 + known.value.abs()), "{f} vs {}", known.value);
        assert!(r.trace.iter().all(|t| t.rho == 2.0 && t.sign_ok));
    }
}

#[test]
fn accel_dual_alm_rejects_nonconvex() {
    let mut rng = Rng::new(1);
    let inst = ip_block_toy(&mut rng, 2, 2, 2).unwrap();
    assert!(accel_dual_alm(&inst.problem, &AlmConfig::default(), 1.0).is_err());
}

#[test]
fn admm_scalar_consensus() {
    let b1 = ProxBlock { h: ProxFn::l1(1.0).unwrap(), n: 1, scale: 1.0 };
    let b2 = QuadBlock {
        h: DenseMat::identity(1),
        g: vec![-3.0],
        a: DenseMat::identity(1).scaled(-1.0),
    };
    let params = AdmmParams::new(1.0, 1.6).unwrap();
    let r = admm2(&b1, &b2, &[0.0], &params).unwrap();
    assert!(r.converged);
    // min |x| + ½(x − 3)²
    assert!((r.x1[0] - 2.0).abs() <= 1e-7 && (r.x2[0] - 2.0).abs() <= 1e-7);
    assert_eq!(r.primal_res.len(), r.iters);
}

#[test]
fn admm_lasso_matches_ista() {
    let mut rng = Rng::new(9);
    let data = lasso_random(&mut rng, 15, 30, 0.2).unwrap();
    let InstanceData::Lasso { a, b, gamma } = &data else { panic!() };
    let b1 = QuadBlock { h: a.transpose().matmul(a), g: vecops::scale(-1.0, &a.tmatvec(b)), a: DenseMat::identity(30) };
    let b2 = ProxBlock { h: ProxFn::l1(*gamma).unwrap(), n: 30, scale: -1.0 };
    let params = AdmmParams { max_iter: 20_000, tol: 1e-10, ..AdmmParams::new(1.0, 1.0).unwrap() };
    let r = admm2(&b1, &b2, &vec![0.0; 30], &params).unwrap();
    assert!(r.converged);

    let l = a.frobenius().powi(2);
    let mut x = vec![0.0; 30];
    for _ in 0..100_000 {
        let g = a.tmatvec(&vecops::sub(&a.matvec(&x), b));
        x = vecops::add_scaled(&x, -1.0 / l, &g)
            .iter()
            .map(|v| v.signum() * (v.abs() - gamma / l).max(0.0))
            .collect();
    }
    let fa = lasso_objective(a, b, *gamma, &r.x1);
    let fr = lasso_objective(a, b, *gamma, &x);
    assert!((fa - fr).abs() <= 1e-8 * (1.0 + fr.abs()), "{fa} vs {fr}");
}

#[test]
fn admm_rejects_bad_tau() {
    assert!(AdmmParams::new(1.0, 1.62).is_err());
    assert!(AdmmParams::new(1.0, 0.0).is_err());
    assert!(AdmmParams::new(0.0, 1.0).is_err());
    assert!(AdmmParams::new(1.0, 1.61).is_ok());
}

struct Bilinear;

impl SaddleOracle for Bilinear {
    fn dim_x(&self) -> usize {
        1
    }
    fn dim_dual(&self) -> usize {
        1
    }
    fn grad_x(&self, _x: &[f64], l: &[f64]) -> almkit::Result<Vec<f64>> {
        Ok(vec![l[0]])
    }
    fn grad_dual(&self, x: &[f64], _l: &[f64]) -> almkit::Result<Vec<f64>> {
        Ok(vec![x[0]])
    }
}

fn run_bilinear(params: PdParams, iters: usize) -> f64 {
    let r = updf(&Bilinear, &params, &[1.0], &[1.0], iters, &mut |_, _, _| false).unwrap();
    assert_eq!(r.iters, iters);
    (r.x[0] * r.x[0] + r.l[0] * r.l[0]).sqrt()
}

#[test]
fn updf_presets_on_bilinear_saddle() {
    let s = 0.2;
    assert!(run_bilinear(PdParams::gda(s, s), 500) > 10.0);
    assert!(run_bilinear(PdParams::ogda(s, s), 2000) < 1e-6);
    assert!(run_bilinear(PdParams::cp(s, s), 2000) < 1.5);
}

#[test]
fn updf_preset_coefficients() {
    let t = |p: PdParams| (p.extrap_primal, p.extrap_dual, p.gs_ratio);
    assert_eq!(t(PdParams::pdhg(1.0, 1.0)), (0.0, 0.0, 0.0));
    assert_eq!(t(PdParams::gda(1.0, 1.0)), (0.0, 0.0, 1.0));
    assert_eq!(t(PdParams::cp(1.0, 1.0)), (0.0, 1.0, 0.0));
    assert_eq!(t(PdParams::ogda(1.0, 1.0)), (1.0, 1.0, 1.0));
    assert_eq!(t(PdParams::sogda(1.0, 1.0)), (0.0, 1.0, 1.0));
    assert!(PdParams::preset("nope", 1.0, 1.0).is_err());
    assert!(PdParams::new(-1.0, 1.0, 0.0, 0.0, 0.0).is_err());
    assert!(PdParams::new(1.0, 1.0, 0.0, 0.0, 2.0).is_err());
}

#[test]
fn updf_monitor_stops_and_cp_recovers_basis_pursuit() {
    let inst = small_bp(6);
    let c = composite(&inst.problem);
    let xs = inst.planted().unwrap().to_vec();
    let sad = CompositeSaddle { p: c, rho: 1.0 };
    let mut seen = 0;
    let r = updf(&sad, &PdParams::cp(0.5, 0.5), &[0.0; 40], &[0.0; 20], 50_000, &mut |k, x, _| {
        seen = k;
        rel_err(x, &xs) <= 1e-8
    })
    .unwrap();
    assert!(r.stopped);
    assert_eq!(seen, r.iters);
}

#[test]
fn alm_bcd_ip_toy_and_ledger() {
    let inst = ip_toy().unwrap();
    let Problem::Ip(p) = &inst.problem else { panic!() };
    let out = alm_bcd_ip(p, &BcdConfig::default()).unwrap();
    assert_eq!(out.report.status, SolveStatus::Converged);
    assert_eq!(out.best_feasible.as_ref().unwrap().1, 0.0);
    let cfg = AlmConfig { stop_rule: StopRule::ExactDiscrete, ..AlmConfig::default() };
    out.report.check_ledger(&cfg).unwrap();
}

#[test]
fn alm_bcd_ip_penalty_grows_while_infeasible() {
    for seed in 0..6 {
        let mut rng = Rng::new(300 + seed);
        let inst = ip_block_toy(&mut rng, 3, 3, 2).unwrap();
        let Problem::Ip(p) = &inst.problem else { panic!() };
        for update in [BcdUpdate::Classical, BcdUpdate::ProxLinear { tau: 0.1 }] {
            let out = alm_bcd_ip(p, &BcdConfig { update, ..BcdConfig::default() }).unwrap();
            let tr = &out.report.trace;
            for w in tr.windows(2) {
                if w[0].theta > 0.0 {
                    assert!(w[1].rho > w[0].rho);
                } else {
                    assert_eq!(w[1].rho, w[0].rho);
                }
            }
            assert!(out.report.mult.mu.iter().all(|m| *m >= 0.0));
            if let Some((x, v)) = &out.best_feasible {
                assert!(p.is_feasible(x));
                assert_eq!(*v, p.objective(x));
                assert!(*v >= inst.known.as_ref().unwrap().value);
            }
        }
    }
}

#[test]
fn alm_bcd_ip_validates_config() {
    let inst = ip_toy().unwrap();
    let Problem::Ip(p) = &inst.problem else { panic!() };
    assert!(alm_bcd_ip(p, &BcdConfig { rho0: 0.0, ..BcdConfig::default() }).is_err());
    assert!(alm_bcd_ip(p, &BcdConfig { max_sweeps: 0, ..BcdConfig::default() }).is_err());
}

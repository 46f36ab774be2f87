use almkit::alfn::Problem;
use almkit::numcore::{DenseMat, Rng};
use almkit::problems::{ip_block_toy, ip_enumerate, ip_toy, lp_random, qp_box, InstanceData};
use almkit_bench::emit::{parse_results_json, results_csv_string, results_json, write_outputs, RESULT_COLUMNS};
use almkit_bench::oracles::{ip_bruteforce, lp_vertex, qp_kkt, ref_prox_grad};
use almkit_bench::profile::{perf_profile, GRID_POINTS};
use almkit_bench::runner::{run_suite, CellResult, TraceRow};
use almkit_bench::suite::RunSpec;
use almkit_bench::BenchError;
use proptest::prelude::*;

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("s{i}")).collect()
}

#[test]
fn lp_vertex_on_unit_interval() {
    let data = InstanceData::LpBox {
        c: vec![-1.0],
        a: DenseMat::zeros(0, 1),
        lq: vec![],
        uq: vec![],
        lk: vec![0.0],
        uk: vec![1.0],
    };
    let (x, v) = lp_vertex(&data).unwrap().unwrap();
    assert_eq!(x, vec![1.0]);
    assert_eq!(v, -1.0);
}

#[test]
fn lp_vertex_rejects_large_and_wrong_kinds() {
    let mut rng = Rng::new(1);
    let big = lp_random(&mut rng, 11, 2).unwrap();
    assert!(matches!(lp_vertex(&big.data), Err(BenchError::Capability(_))));
    assert!(lp_vertex(&InstanceData::ToyNlp).is_err());
}

#[test]
fn ip_bruteforce_on_toy_and_against_core_enumeration() {
    let inst = ip_toy().unwrap();
    let Problem::Ip(p) = &inst.problem else { panic!() };
    assert_eq!(ip_bruteforce(p).unwrap(), Some((vec![0.0], 0.0)));
    for s in 0..5 {
        let inst = ip_block_toy(&mut Rng::new(40 + s), 3, 3, 2).unwrap();
        let Problem::Ip(p) = &inst.problem else { panic!() };
        let a = ip_bruteforce(p).unwrap().map(|o| o.1);
        let b = ip_enumerate(p).unwrap().map(|o| o.1);
        assert_eq!(a, b);
    }
}

#[test]
fn qp_kkt_matches_generator_certificate() {
    for s in 0..4 {
        let inst = qp_box(&mut Rng::new(s), 8, 4).unwrap();
        let (x, lam, v) = qp_kkt(&inst.data).unwrap();
        let known = inst.known.as_ref().unwrap();
        assert!((v - known.value).abs() <= 1e-9 * (1.0 + v.abs()));
        assert!(lam.iter().all(|l| *l >= -1e-9));
        assert!(almkit::problems::rel_err(&x, known.x.as_ref().unwrap()) <= 1e-8);
    }
}

#[test]
fn ref_prox_grad_scalar_lasso() {
    let (x, v) = ref_prox_grad(&DenseMat::identity(1), &[2.0], 1.0, 100_000);
    assert!((x[0] - 1.0).abs() <= 1e-12);
    assert!((v - 1.5).abs() <= 1e-12);
}

#[test]
fn profile_hand_matrix() {
    // solver-major [[1,2],[3,1]], passed problem-major
    let t = vec![vec![Some(1.0), Some(3.0)], vec![Some(2.0), Some(1.0)]];
    let p = perf_profile(&t, &names(2), 2.0);
    assert_eq!(p.excluded, 0);
    assert_eq!(p.curves[0].eval(0.0), 0.5);
    assert_eq!(p.curves[1].eval(0.0), 0.5);
    assert_eq!(p.curves[0].eval(1.0), 1.0);
    assert_eq!(p.curves[1].eval(3f64.log2()), 1.0);
    assert_eq!(p.curves[0].points.len(), GRID_POINTS);
    assert_eq!(p.curves[0].points[GRID_POINTS - 1].0, 2.0);
}

#[test]
fn profile_single_solver_and_failures() {
    let t = vec![vec![Some(4.0)], vec![Some(0.5)]];
    let p = perf_profile(&t, &names(1), 3.0);
    assert!(p.curves[0].points.iter().all(|(_, pi)| *pi == 1.0));

    let t = vec![vec![Some(1.0), None], vec![None, None], vec![Some(2.0), Some(1.0)]];
    let p = perf_profile(&t, &names(2), 5.0);
    assert_eq!(p.excluded, 1);
    assert_eq!(p.curves[1].eval(1e9), 0.5);
    assert_eq!(p.curves[0].eval(1.0), 1.0);
}

proptest! {
    #[test]
    fn profile_random_matrix(cells in proptest::collection::vec(proptest::option::weighted(0.8, 1.0f64..100.0), 60)) {
        let t: Vec<Vec<Option<f64>>> = cells.chunks(3).map(|c| c.to_vec()).collect();
        let tau_max = 12.0;
        let p = perf_profile(&t, &names(3), tau_max);
        let kept: Vec<&Vec<Option<f64>>> = t.iter().filter(|r| r.iter().any(|v| v.is_some())).collect();
        prop_assert_eq!(p.excluded, t.len() - kept.len());
        for (s, c) in p.curves.iter().enumerate() {
            prop_assert!(c.points.windows(2).all(|w| w[0].1 <= w[1].1));
            prop_assert!(c.points.iter().all(|(_, pi)| (0.0..=1.0).contains(pi)));
            if !kept.is_empty() {
                // ratios stay below 100 < 2^12, so the last grid point counts every success
                let solved = kept.iter().filter(|r| r[s].is_some()).count() as f64 / kept.len() as f64;
                prop_assert_eq!(c.points.last().unwrap().1, solved);
            }
        }
    }
}

fn sample_cell() -> CellResult {
    CellResult {
        problem: "toy".into(),
        solver: "alm".into(),
        status: "converged".into(),
        outer_iters: 7,
        inner_iters_total: 42,
        f_final: Some(2.0),
        stat_sigma: Some(1e-9),
        feas_theta: Some(3e-10),
        rho_final: Some(100.0),
        wall_ms: 0.25,
        rel_err: None,
        seed: 9,
        ledger_ok: Some(true),
        message: None,
        trace: vec![TraceRow { k: 0, f: 2.5, sigma: 0.1, theta: 0.2, rho: 10.0, inner_iters: 6, wall_ms: 0.1 }],
    }
}

#[test]
fn emit_empty_and_one_row() {
    let empty = results_csv_string(&[]).unwrap();
    assert_eq!(empty, format!("{}\n", RESULT_COLUMNS.join(",")));
    let one = results_csv_string(&[sample_cell()]).unwrap();
    let lines: Vec<&str> = one.lines().collect();
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields.len(), 10);
    assert!(fields.iter().all(|f| !f.is_empty()));
    assert_eq!(fields[0], "toy");
    assert_eq!(fields[3], "7");
}

#[test]
fn emit_json_round_trip() {
    let cells = vec![sample_cell(), CellResult { f_final: None, status: "error".into(), ..sample_cell() }];
    let back = parse_results_json(&results_json(&cells).unwrap()).unwrap();
    assert_eq!(back, cells);
}

const TOY_SUITE: &str = r#"
seed = 5
[[problems]]
name = "toy"
generator = "toy_nlp"
[[solvers]]
name = "alm"
kind = "practical"
inner = "gd_bb"
"#;

#[test]
fn toy_suite_single_converged_cell() {
    let spec = RunSpec::from_toml(TOY_SUITE).unwrap();
    let r = run_suite(&spec, 1).unwrap();
    assert_eq!(r.len(), 1);
    assert_eq!(r[0].status, "converged");
    assert!(r[0].wall_ms > 0.0);
    assert_eq!(r[0].ledger_ok, Some(true));
    assert!((r[0].f_final.unwrap() - 1.0).abs() <= 1e-5);
}

#[test]
fn suite_validation() {
    let dup = format!("{TOY_SUITE}\n[[solvers]]\nname = \"alm\"\nkind = \"bcd\"\n");
    assert!(matches!(RunSpec::from_toml(&dup), Err(BenchError::Suite(_))));
    assert!(RunSpec::from_toml("seed = 1").is_err());
    let unknown = TOY_SUITE.replace("toy_nlp", "nope");
    assert!(RunSpec::from_toml(&unknown).is_err());
    let badkind = TOY_SUITE.replace("practical", "simplex");
    assert!(RunSpec::from_toml(&badkind).is_err());
    let badrho = format!("{TOY_SUITE}rho0 = 0.5\n");
    assert!(RunSpec::from_toml(&badrho).is_err());
    let mut spec = RunSpec::from_toml(TOY_SUITE).unwrap();
    assert!(spec.select_solvers(&["missing".into()]).is_err());
}

const DET_SUITE: &str = r#"
seed = 11
timing = "iterations"
[[problems]]
name = "lp"
generator = "lp_random"
count = 3
params = { n = 5, m = 2 }
[[problems]]
name = "ip"
generator = "ip_block_toy"
count = 2
params = { p = 3, nj = 2, m = 2 }
[[solvers]]
name = "alm"
kind = "practical"
[[solvers]]
name = "prox"
kind = "proximal"
m = 0.01
[[solvers]]
name = "bcd"
kind = "bcd"
"#;

#[test]
fn suite_is_deterministic_across_parallelism() {
    let spec = RunSpec::from_toml(DET_SUITE).unwrap();
    let a = results_csv_string(&run_suite(&spec, 1).unwrap()).unwrap();
    let b = results_csv_string(&run_suite(&spec, 4).unwrap()).unwrap();
    assert_eq!(a, b);
    let r = run_suite(&spec, 3).unwrap();
    assert_eq!(r.len(), 15);
    assert!(r.iter().any(|c| c.status == "unsupported"));
    assert!(r.iter().filter(|c| c.ledger_ok.is_some()).all(|c| c.ledger_ok == Some(true)));
    let dir = tempfile::tempdir().unwrap();
    write_outputs(&r, dir.path()).unwrap();
    assert_eq!(std::fs::read_to_string(dir.path().join("results.csv")).unwrap(), a);
    assert_eq!(std::fs::read_dir(dir.path().join("traces")).unwrap().count(), 15);
}

#[test]
fn bp_smoke_suite_with_four_presets() {
    let mut text = String::from(
        "seed = 2\n[[problems]]\nname = \"bp\"\ngenerator = \"basis_pursuit\"\ncount = 3\nparams = { m = 32, n = 96, k = 4 }\n",
    );
    for preset in ["pdhg", "cp", "ogda", "sogda"] {
        text += &format!("[[solvers]]\nname = \"{preset}\"\nkind = \"primal_dual\"\npreset = \"{preset}\"\ntau = 0.5\nsigma = 0.5\n");
    }
    let spec = RunSpec::from_toml(&text).unwrap();
    let r = run_suite(&spec, 2).unwrap();
    assert_eq!(r.len(), 12);
    for c in &r {
        assert!(!c.status.is_empty() && c.status != "error", "{c:?}");
        assert!(c.wall_ms > 0.0);
        assert!(c.f_final.is_some() && c.rel_err.is_some());
    }
}

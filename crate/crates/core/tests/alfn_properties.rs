use almkit::alfn::*;
use almkit::numcore::{vecops, Rng};
use almkit::problems::*;
use proptest::prelude::*;

/// Value, dual supergradient (stacked) and ρ-gradient of one AL variant.
type Eval = Box<dyn Fn(&[f64], &Multipliers, f64) -> (f64, Vec<f64>, f64)>;

struct Case {
    name: &'static str,
    n: usize,
    shape: (usize, usize, usize),
    nonneg: bool,
    eval: Eval,
}

fn cases(seed: u64) -> Vec<Case> {
    let mut rng = Rng::new(seed);
    let mut out = Vec::new();

    let Problem::Nlp(qp) = qp_box(&mut rng, 5, 3).unwrap().problem else { panic!() };
    out.push(Case {
        name: "nlp",
        n: 5,
        shape: (0, 3, 0),
        nonneg: false,
        eval: Box::new(move |x, m, rho| {
            let e = qp.al_eval(x, m, rho).unwrap();
            (e.value, e.dual_grad().stacked(), e.grad_rho)
        }),
    });

    let lasso = Instance::new("l", None, lasso_random(&mut rng, 6, 5, 0.3).unwrap()).unwrap();
    let Problem::Composite(c) = lasso.problem else { panic!() };
    out.push(Case {
        name: "composite_smooth",
        n: 5,
        shape: (5, 0, 0),
        nonneg: false,
        eval: Box::new(move |x, m, rho| {
            let e = al_composite_smooth(&c, x, m, rho).unwrap();
            (e.value, e.dual_grad().stacked(), e.grad_rho)
        }),
    });

    let Problem::Composite(lp) = lp_random(&mut rng, 5, 3).unwrap().problem else { panic!() };
    out.push(Case {
        name: "composite_retained",
        n: 5,
        shape: (0, 3, 5),
        nonneg: false,
        eval: Box::new(move |x, m, rho| {
            let e = al_composite_retained(&lp, x, &m.lambda, &m.mu, rho).unwrap();
            let g = vecops::concat(&[&e.grad_lambda, &e.grad_mu]);
            (e.value, g, e.grad_rho)
        }),
    });

    let Problem::NcComposite(nc) = portfolio_random(&mut rng, 5, PortfolioReg::L0(0.01)).unwrap().problem else {
        panic!()
    };
    let m = nc.m();
    out.push(Case {
        name: "nonconvex",
        n: 5,
        shape: (0, m, 5),
        nonneg: false,
        eval: Box::new(move |x, mult, rho| {
            let v0 = vec![0.0; nc.m()];
            let v = al_nonconvex(&nc, x, &v0, mult, rho).unwrap().v_hint;
            let e = al_nonconvex(&nc, x, &v, mult, rho).unwrap();
            let g = vecops::concat(&[&e.grad_nu, &e.grad_lambda, &e.grad_mu]);
            (e.value, g, e.grad_rho)
        }),
    });

    let Problem::Ip(ip) = ip_block_toy(&mut rng, 2, 3, 2).unwrap().problem else { panic!() };
    out.push(Case {
        name: "ip",
        n: 6,
        shape: (0, 0, 2),
        nonneg: true,
        eval: Box::new(move |x, m, rho| {
            let e = al_ip(&ip, x, &m.mu, rho).unwrap();
            (e.value, e.grad_mu.clone(), e.grad_rho)
        }),
    });
    out
}

fn draw(rng: &mut Rng, n: usize, nonneg: bool) -> Vec<f64> {
    (0..n).map(|_| if nonneg { 3.0 * rng.uniform() } else { 3.0 * rng.normal() }).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn concave_in_duals_and_rho(seed in 0u64..1_000_000) {
        let mut rng = Rng::new(seed);
        for case in cases(seed % 7) {
            let (a, b, c) = case.shape;
            for _ in 0..5 {
                let x = draw(&mut rng, case.n, false);
                let mk = |rng: &mut Rng| {
                    Multipliers::new(draw(rng, a, false), draw(rng, b, false), draw(rng, c, case.nonneg))
                };
                let m1 = mk(&mut rng);
                let m2 = mk(&mut rng);
                let r1 = 0.1 + 10.0 * rng.uniform();
                let r2 = 0.1 + 10.0 * rng.uniform();
                let (v1, g1, gr1) = (case.eval)(&x, &m1, r1);
                let (v2, _, gr2) = (case.eval)(&x, &m2, r2);
                prop_assert!(gr1 >= 0.0 && gr2 >= 0.0, "{}", case.name);
                let d = vecops::sub(&m2.stacked(), &m1.stacked());
                let bound = v1 + vecops::dot(&g1, &d) + gr1 * (r2 - r1);
                prop_assert!(v2 <= bound + 1e-9 * (1.0 + v1.abs() + v2.abs()), "{}: {v2} > {bound}", case.name);
            }
        }
    }
}

#[test]
fn all_five_assemblers_covered() {
    let names: Vec<&str> = cases(0).iter().map(|c| c.name).collect();
    assert_eq!(names, ["nlp", "composite_smooth", "composite_retained", "nonconvex", "ip"]);
}

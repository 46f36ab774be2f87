//! Executes every (problem, solver) cell of a suite on a worker pool.

use std::time::Instant;

use almkit::alfn::{Multipliers, Problem};
use almkit::alm::{self, AlmConfig, SolveReport, StopRule};
use almkit::numcore::Rng;
use almkit::problems::Instance;
use almkit::variants::{self, BcdConfig, CompositeSaddle, LoopConfig, PdParams};
use almkit::AlmError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::suite::{generate, ProblemSpec, RunSpec, SolverKind, SolverSpec, Timing};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub f: f64,
    pub sigma: f64,
    pub theta: f64,
    pub rho: f64,
    pub inner_iters: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub problem: String,
    pub solver: String,
    /// One of `converged`, `max_outer`, `inner_stalled`,
    /// `infeasible_suspected`, `heuristic`, `max_iter`, `diverged`,
    /// `time_limit`, `unsupported`, `error`.
    pub status: String,
    pub outer_iters: usize,
    pub inner_iters_total: usize,
    pub f_final: Option<f64>,
    pub stat_sigma: Option<f64>,
    pub feas_theta: Option<f64>,
    pub rho_final: Option<f64>,
    pub wall_ms: f64,
    pub rel_err: Option<f64>,
    pub seed: u64,
    /// Outcome of the schedule ledger check for solvers that produce one.
    pub ledger_ok: Option<bool>,
    pub message: Option<String>,
    pub trace: Vec<TraceRow>,
}

impl CellResult {
    pub fn succeeded(&self) -> bool {
        self.status == "converged"
    }
}

struct Outcome {
    status: String,
    x: Vec<f64>,
    outer_iters: usize,
    inner_iters_total: usize,
    finals: Option<(f64, f64, f64, f64)>,
    ledger_ok: Option<bool>,
    trace: Vec<TraceRow>,
}

fn from_report(r: &SolveReport, cfg: &AlmConfig) -> Outcome {
    let mut inner = 0;
    let trace = r
        .trace
        .iter()
        .map(|t| {
            inner += t.inner_iters;
            TraceRow {
                k: t.k,
                f: t.f_val,
                sigma: t.sigma,
                theta: t.theta,
                rho: t.rho,
                inner_iters: t.inner_iters,
                wall_ms: t.wall_ms,
            }
        })
        .collect();
    Outcome {
        status: r.status.as_str().to_string(),
        x: r.x.clone(),
        outer_iters: r.outer_iters(),
        inner_iters_total: r.inner_iters_total(),
        finals: r.last().map(|t| (t.f_val, t.sigma, t.theta, t.rho)),
        ledger_ok: Some(r.check_ledger(cfg).is_ok()),
        trace,
    }
}

fn unsupported(what: &str) -> AlmError {
    AlmError::VariantMismatch(format!("{what} does not apply to this problem class"))
}

fn solve(inst: &Instance, solver: &SolverSpec, spec: &RunSpec) -> almkit::Result<Outcome> {
    let budgets = &spec.budgets;
    let alm_cfg = |o: &crate::suite::AlmOverrides| -> almkit::Result<AlmConfig> {
        let mut c = o.config(budgets).map_err(|e| AlmError::InvalidInput(e.to_string()))?;
        if matches!(inst.problem, Problem::Ip(_)) {
            c.stop_rule = StopRule::ExactDiscrete;
        }
        Ok(c)
    };
    match &solver.kind {
        SolverKind::Practical { alm } => {
            let cfg = alm_cfg(alm)?;
            Ok(from_report(&alm::solve_practical(&inst.problem, &cfg)?, &cfg))
        }
        SolverKind::Proximal { m, alm } => {
            let cfg = alm_cfg(alm)?;
            Ok(from_report(&variants::proximal_alm(&inst.problem, &cfg, *m)?, &cfg))
        }
        SolverKind::AccelDual { alm } => {
            let cfg = alm_cfg(alm)?;
            Ok(from_report(&variants::accel_dual_alm(&inst.problem, &cfg, 1.0)?, &cfg))
        }
        SolverKind::Linearized { step, rho, tol } => {
            let Problem::Composite(c) = &inst.problem else { return Err(unsupported("linearized ALM")) };
            let lc = LoopConfig { rho: *rho, max_iter: budgets.max_inner, tol_stat: *tol, tol_feas: *tol };
            let r = variants::linearized_alm(c, &lc, *step, &vec![0.0; c.dim()])?;
            Ok(from_report(&r, &AlmConfig::default()))
        }
        SolverKind::PrimalDual { preset, tau, sigma, rho, tol } => {
            let Problem::Composite(c) = &inst.problem else { return Err(unsupported("primal-dual")) };
            let params = PdParams::preset(preset, *tau, *sigma)?;
            let sad = CompositeSaddle { p: c, rho: *rho };
            let m = c.m();
            let dual_dim = m + if c.k.is_some() { c.dim() } else { 0 };
            let t0 = Instant::now();
            let mut trace = Vec::new();
            let mut failure = None;
            let r = variants::updf(&sad, &params, &vec![0.0; c.dim()], &vec![0.0; dual_dim], budgets.max_inner, &mut |k, x, l| {
                let mult = Multipliers::new(vec![], l[..m].to_vec(), l[m..].to_vec());
                match alm::measures(&inst.problem, x, &mult, *rho) {
                    Ok(ms) => {
                        trace.push(TraceRow {
                            k,
                            f: ms.objective,
                            sigma: ms.sigma,
                            theta: ms.theta,
                            rho: *rho,
                            inner_iters: 1,
                            wall_ms: t0.elapsed().as_secs_f64() * 1e3,
                        });
                        ms.sigma <= *tol && ms.theta <= *tol
                    }
                    Err(e) => {
                        failure = Some(e);
                        true
                    }
                }
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
            let finals = trace.last().map(|t| (t.f, t.sigma, t.theta, t.rho));
            let converged = finals.is_some_and(|(_, s, t, _)| s <= *tol && t <= *tol);
            Ok(Outcome {
                status: if converged { "converged" } else { "max_iter" }.into(),
                x: r.x,
                outer_iters: r.iters,
                inner_iters_total: r.iters,
                finals,
                ledger_ok: None,
                trace,
            })
        }
        SolverKind::Bcd { rho0, .. } => {
            let Problem::Ip(p) = &inst.problem else { return Err(unsupported("ALM-BCD")) };
            let cfg = BcdConfig { rho0: *rho0, max_outer: budgets.max_outer, update: solver.bcd_update(), ..BcdConfig::default() };
            let out = variants::alm_bcd_ip(p, &cfg)?;
            let ledger_cfg = AlmConfig { stop_rule: StopRule::ExactDiscrete, ..AlmConfig::default() };
            Ok(from_report(&out.report, &ledger_cfg))
        }
    }
}

struct Job<'a> {
    problem: String,
    instance_seed: Rng,
    cell_seed: u64,
    spec: &'a ProblemSpec,
    solver: &'a SolverSpec,
}

fn run_cell(job: &Job, spec: &RunSpec) -> CellResult {
    let mut cell = CellResult {
        problem: job.problem.clone(),
        solver: job.solver.name.clone(),
        status: "error".into(),
        outer_iters: 0,
        inner_iters_total: 0,
        f_final: None,
        stat_sigma: None,
        feas_theta: None,
        rho_final: None,
        wall_ms: 0.0,
        rel_err: None,
        seed: job.cell_seed,
        ledger_ok: None,
        message: None,
        trace: Vec::new(),
    };
    let mut rng = job.instance_seed.clone();
    let inst = match generate(&job.spec.generator, &job.spec.params, &mut rng) {
        Ok(i) => i,
        Err(e) => {
            cell.message = Some(e.to_string());
            cell.wall_ms = 1.0;
            return cell;
        }
    };
    let t0 = Instant::now();
    let res = solve(&inst, job.solver, spec);
    let elapsed = t0.elapsed().as_secs_f64() * 1e3;
    match res {
        Ok(o) => {
            cell.status = if elapsed > spec.budgets.wall_ms { "time_limit".into() } else { o.status };
            cell.outer_iters = o.outer_iters;
            cell.inner_iters_total = o.inner_iters_total;
            if let Some((f, s, t, r)) = o.finals {
                (cell.f_final, cell.stat_sigma, cell.feas_theta, cell.rho_final) = (Some(f), Some(s), Some(t), Some(r));
            }
            cell.rel_err = inst.rel_err(&o.x);
            cell.ledger_ok = o.ledger_ok;
            cell.trace = o.trace;
        }
        Err(e @ (AlmError::VariantMismatch(_) | AlmError::Capability(_))) => {
            cell.status = "unsupported".into();
            cell.message = Some(e.to_string());
        }
        Err(e @ AlmError::Oracle { .. }) => {
            cell.status = "diverged".into();
            cell.message = Some(e.to_string());
        }
        Err(e) => cell.message = Some(e.to_string()),
    }
    match spec.timing {
        Timing::Wall => cell.wall_ms = elapsed.max(1e-6),
        Timing::Iterations => {
            cell.wall_ms = cell.inner_iters_total.max(1) as f64;
            let mut acc = 0;
            for row in &mut cell.trace {
                acc += row.inner_iters;
                row.wall_ms = acc as f64;
            }
        }
    }
    cell
}

/// Runs every cell on `jobs` worker threads. Each problem instance is
/// generated from a seed derived from the suite seed and its position, so
/// all solvers see the same instance and the results do not depend on
/// the degree of parallelism. Results are sorted by (problem, solver).
pub fn run_suite(spec: &RunSpec, jobs: usize) -> Result<Vec<CellResult>> {
    spec.validate()?;
    let base = Rng::new(spec.seed);
    let mut cells = Vec::new();
    for (pi, p) in spec.problems.iter().enumerate() {
        for i in 0..p.count {
            let inst_rng = base.derive(((pi as u64) << 32) | i as u64);
            let problem = if p.count == 1 { p.name.clone() } else { format!("{}_{i}", p.name) };
            for (si, s) in spec.solvers.iter().enumerate() {
                cells.push(Job {
                    problem: problem.clone(),
                    cell_seed: inst_rng.derive(si as u64 + 1).seed(),
                    instance_seed: inst_rng.clone(),
                    spec: p,
                    solver: s,
                });
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| crate::BenchError::Suite(format!("worker pool: {e}")))?;
    let mut out: Vec<CellResult> = pool.install(|| cells.par_iter().map(|j| run_cell(j, spec)).collect());
    out.sort_by(|a, b| (&a.problem, &a.solver).cmp(&(&b.problem, &b.solver)));
    for c in &out {
        log::info!("{} / {}: {} in {:.3}", c.problem, c.solver, c.status, c.wall_ms);
    }
    Ok(out)
}

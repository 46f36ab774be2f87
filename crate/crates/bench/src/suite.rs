//! Suite files: which instances to generate and which solvers to run.

use std::collections::BTreeSet;
use std::path::Path;

use almkit::alm::{AlmConfig, PenaltyRule};
use almkit::numcore::Rng;
use almkit::problems::{self, Instance, PortfolioReg};
use almkit::subsolve::InnerSolver;
use almkit::variants::{BcdUpdate, PdParams};
use serde::{Deserialize, Serialize};

use crate::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Timing {
    /// Wall-clock milliseconds of the solve call.
    #[default]
    Wall,
    /// Total inner iterations stand in for time; makes the CSV reproducible.
    Iterations,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budgets {
    pub max_outer: usize,
    pub max_inner: usize,
    pub wall_ms: f64,
}

impl Default for Budgets {
    fn default() -> Self {
        Self { max_outer: 200, max_inner: 10_000, wall_ms: 60_000.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub name: String,
    pub generator: String,
    #[serde(default = "one")]
    pub count: usize,
    #[serde(default)]
    pub params: toml::Table,
}

fn one() -> usize {
    1
}

/// Optional overrides of the practical-ALM configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AlmOverrides {
    pub inner: Option<String>,
    pub rho0: Option<f64>,
    pub kappa_pen: Option<f64>,
    pub penalty_rule: Option<PenaltyRule>,
    pub eta_final: Option<f64>,
    pub eps_final: Option<f64>,
}

impl AlmOverrides {
    pub fn config(&self, budgets: &Budgets) -> Result<AlmConfig> {
        let mut c = AlmConfig { max_outer: budgets.max_outer, ..AlmConfig::default() };
        c.inner.max_iter = budgets.max_inner;
        if let Some(s) = &self.inner {
            c.inner_solver = s.parse::<InnerSolver>()?;
        }
        c.rho0 = self.rho0.unwrap_or(c.rho0);
        c.kappa_pen = self.kappa_pen.unwrap_or(c.kappa_pen);
        c.penalty_rule = self.penalty_rule.unwrap_or(c.penalty_rule);
        c.eta_final = self.eta_final.unwrap_or(c.eta_final);
        c.eps_final = self.eps_final.unwrap_or(c.eps_final);
        c.validate()?;
        Ok(c)
    }
}

fn default_tol() -> f64 {
    1e-6
}

fn default_rho() -> f64 {
    1.0
}

fn default_bcd_rho() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverKind {
    Practical {
        #[serde(flatten)]
        alm: AlmOverrides,
    },
    Proximal {
        m: f64,
        #[serde(flatten)]
        alm: AlmOverrides,
    },
    AccelDual {
        #[serde(flatten)]
        alm: AlmOverrides,
    },
    Linearized {
        step: f64,
        #[serde(default = "default_rho")]
        rho: f64,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    PrimalDual {
        preset: String,
        tau: f64,
        sigma: f64,
        #[serde(default = "default_rho")]
        rho: f64,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    Bcd {
        #[serde(default = "default_bcd_rho")]
        rho0: f64,
        #[serde(default)]
        prox_linear_tau: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub name: String,
    #[serde(flatten)]
    pub kind: SolverKind,
}

impl SolverSpec {
    fn check(&self, budgets: &Budgets) -> Result<()> {
        let bad = |s: String| Err(BenchError::Suite(format!("solver {}: {s}", self.name)));
        match &self.kind {
            SolverKind::Practical { alm } | SolverKind::AccelDual { alm } => {
                alm.config(budgets)?;
            }
            SolverKind::Proximal { m, alm } => {
                alm.config(budgets)?;
                if !(*m >= 0.0) {
                    return bad(format!("proximal weight must be >= 0, got {m}"));
                }
            }
            SolverKind::Linearized { step, rho, tol } => {
                if !(*step > 0.0 && *rho > 0.0 && *tol > 0.0) {
                    return bad("step, rho and tol must be positive".into());
                }
            }
            SolverKind::PrimalDual { preset, tau, sigma, rho, tol } => {
                PdParams::preset(preset, *tau, *sigma)?;
                if !(*rho > 0.0 && *tol > 0.0) {
                    return bad("rho and tol must be positive".into());
                }
            }
            SolverKind::Bcd { rho0, prox_linear_tau } => {
                if !(*rho0 > 0.0) || prox_linear_tau.is_some_and(|t| !(t > 0.0)) {
                    return bad("rho0 and prox_linear_tau must be positive".into());
                }
            }
        }
        Ok(())
    }

    pub fn bcd_update(&self) -> BcdUpdate {
        match self.kind {
            SolverKind::Bcd { prox_linear_tau: Some(tau), .. } => BcdUpdate::ProxLinear { tau },
            _ => BcdUpdate::Classical,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub timing: Timing,
    #[serde(default)]
    pub budgets: Budgets,
    #[serde(default)]
    pub problems: Vec<ProblemSpec>,
    #[serde(default)]
    pub solvers: Vec<SolverSpec>,
}

impl RunSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: RunSpec = toml::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.problems.is_empty() || self.solvers.is_empty() {
            return Err(BenchError::Suite("suite needs at least one problem and one solver".into()));
        }
        let b = &self.budgets;
        if b.max_outer == 0 || b.max_inner == 0 || !(b.wall_ms > 0.0) {
            return Err(BenchError::Suite("budgets must be positive".into()));
        }
        let mut seen = BTreeSet::new();
        for p in &self.problems {
            if !seen.insert(p.name.as_str()) {
                return Err(BenchError::Suite(format!("duplicate problem name {}", p.name)));
            }
            if p.count == 0 {
                return Err(BenchError::Suite(format!("problem {} has count 0", p.name)));
            }
            if !GENERATORS.contains(&p.generator.as_str()) {
                return Err(BenchError::Suite(format!("unknown generator {}", p.generator)));
            }
        }
        let mut seen = BTreeSet::new();
        for s in &self.solvers {
            if !seen.insert(s.name.as_str()) {
                return Err(BenchError::Suite(format!("duplicate solver name {}", s.name)));
            }
            s.check(b)?;
        }
        Ok(())
    }

    /// Keeps only the named solvers; unknown names are an error.
    pub fn select_solvers(&mut self, names: &[String]) -> Result<()> {
        for n in names {
            if !self.solvers.iter().any(|s| &s.name == n) {
                return Err(BenchError::Suite(format!("unknown solver {n}")));
            }
        }
        self.solvers.retain(|s| names.contains(&s.name));
        Ok(())
    }
}

pub const GENERATORS: &[&str] = &[
    "toy_nlp",
    "ip_toy",
    "maxcut_edge",
    "lp_random",
    "qp_box",
    "basis_pursuit",
    "lasso_random",
    "lasso_dual",
    "portfolio",
    "ip_block_toy",
    "sdp_random",
];

fn get_usize(t: &toml::Table, key: &str, default: usize) -> Result<usize> {
    match t.get(key) {
        None => Ok(default),
        Some(toml::Value::Integer(v)) if *v >= 0 => Ok(*v as usize),
        Some(v) => Err(BenchError::Suite(format!("parameter {key} must be a nonnegative integer, got {v}"))),
    }
}

fn get_f64(t: &toml::Table, key: &str, default: f64) -> Result<f64> {
    match t.get(key) {
        None => Ok(default),
        Some(toml::Value::Float(v)) => Ok(*v),
        Some(toml::Value::Integer(v)) => Ok(*v as f64),
        Some(v) => Err(BenchError::Suite(format!("parameter {key} must be a number, got {v}"))),
    }
}

fn get_str<'a>(t: &'a toml::Table, key: &str, default: &'a str) -> Result<&'a str> {
    match t.get(key) {
        None => Ok(default),
        Some(toml::Value::String(s)) => Ok(s),
        Some(v) => Err(BenchError::Suite(format!("parameter {key} must be a string, got {v}"))),
    }
}

/// Builds one instance of a named generator from its parameter table.
pub fn generate(generator: &str, params: &toml::Table, rng: &mut Rng) -> Result<Instance> {
    let u = |k, d| get_usize(params, k, d);
    let f = |k, d| get_f64(params, k, d);
    let inst = match generator {
        "toy_nlp" => problems::toy_nlp()?,
        "ip_toy" => problems::ip_toy()?,
        "maxcut_edge" => problems::maxcut_edge()?,
        "lp_random" => problems::lp_random(rng, u("n", 6)?, u("m", 3)?)?,
        "qp_box" => problems::qp_box(rng, u("n", 20)?, u("m", 5)?)?,
        "basis_pursuit" => problems::basis_pursuit_instance(rng, u("m", 64)?, u("n", 256)?, u("k", 6)?, f("d", 0.0)?)?,
        "lasso_random" | "lasso_dual" => {
            let data = problems::lasso_random(rng, u("m", 50)?, u("n", 200)?, f("frac", 0.1)?)?;
            let problems::InstanceData::Lasso { a, b, gamma } = data else { unreachable!() };
            if generator == "lasso_dual" {
                problems::lasso_dual(a, b, gamma)?
            } else {
                problems::lasso(a, b, gamma)?
            }
        }
        "portfolio" => {
            let w = f("weight", 0.01)?;
            let reg = match get_str(params, "reg", "none")? {
                "none" => PortfolioReg::None,
                "l1" => PortfolioReg::L1(w),
                "l0" => PortfolioReg::L0(w),
                other => return Err(BenchError::Suite(format!("unknown portfolio regularizer {other}"))),
            };
            problems::portfolio_random(rng, u("n", 20)?, reg)?
        }
        "ip_block_toy" => problems::ip_block_toy(rng, u("p", 4)?, u("nj", 3)?, u("m", 3)?)?,
        "sdp_random" => problems::sdp_random(rng, u("n", 6)?, u("m", 4)?)?,
        other => return Err(BenchError::Suite(format!("unknown generator {other}"))),
    };
    Ok(inst)
}

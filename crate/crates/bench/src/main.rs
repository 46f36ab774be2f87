use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use almkit::numcore::Rng;
use almkit::problems::PortfolioReg;
use almkit_bench::emit::{read_results_csv, write_outputs, write_profile_csv};
use almkit_bench::profile::perf_profile;
use almkit_bench::runner::run_suite;
use almkit_bench::suite::RunSpec;
use almkit_bench::{BenchError, Result};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "alm-bench", version, about = "Benchmark harness for almkit solvers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Metric {
    Time,
    InnerIters,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Bp,
    Lp,
    Qp,
    Ip,
    Sdp,
    Portfolio,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a suite and write results.csv, results.json and per-cell traces.
    Run {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the suite file.
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Comma-separated subset of solver names.
        #[arg(long, value_delimiter = ',')]
        solvers: Option<Vec<String>>,
    },
    /// Build performance profiles from a results CSV.
    Profile {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        metric: Metric,
        #[arg(long)]
        tau_max: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate one instance and write its data as JSON.
    Gen {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Run { suite, out, seed, jobs, solvers } => {
            let mut spec = RunSpec::load(&suite)?;
            spec.seed = seed;
            if let Some(names) = solvers {
                spec.select_solvers(&names)?;
            }
            let results = run_suite(&spec, jobs)?;
            write_outputs(&results, &out)?;
            let ok = results.iter().filter(|c| c.succeeded()).count();
            println!("{} cells, {ok} converged, written to {}", results.len(), out.display());
        }
        Cmd::Profile { input, metric, tau_max, out } => {
            let rows = read_results_csv(&input)?;
            let mut solvers: Vec<String> = rows.iter().map(|r| r.solver.clone()).collect();
            solvers.sort();
            solvers.dedup();
            let mut table: BTreeMap<String, Vec<Option<f64>>> = BTreeMap::new();
            for r in &rows {
                let row = table.entry(r.problem.clone()).or_insert_with(|| vec![None; solvers.len()]);
                let s = solvers.binary_search(&r.solver).expect("solver collected above");
                if r.status == "converged" {
                    row[s] = Some(match metric {
                        Metric::Time => r.wall_ms,
                        Metric::InnerIters => r.inner_iters_total.max(1) as f64,
                    });
                }
            }
            let t: Vec<Vec<Option<f64>>> = table.into_values().collect();
            let profile = perf_profile(&t, &solvers, tau_max);
            write_profile_csv(&profile, std::fs::File::create(&out)?)?;
            println!("{} problems profiled, {} excluded", t.len() - profile.excluded, profile.excluded);
        }
        Cmd::Gen { kind, seed, out } => {
            let mut rng = Rng::new(seed);
            let inst = match kind {
                Kind::Bp => almkit::problems::basis_pursuit_instance(&mut rng, 64, 256, 6, 0.0)?,
                Kind::Lp => almkit::problems::lp_random(&mut rng, 6, 3)?,
                Kind::Qp => almkit::problems::qp_box(&mut rng, 20, 5)?,
                Kind::Ip => almkit::problems::ip_block_toy(&mut rng, 4, 3, 3)?,
                Kind::Sdp => almkit::problems::sdp_random(&mut rng, 6, 4)?,
                Kind::Portfolio => almkit::problems::portfolio_random(&mut rng, 20, PortfolioReg::L1(0.01))?,
            };
            std::fs::write(&out, serde_json::to_string_pretty(&inst.data)?)?;
            println!("{} written to {}", inst.name, out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("alm-bench: {e}");
            if matches!(e, BenchError::Suite(_) | BenchError::Toml(_)) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

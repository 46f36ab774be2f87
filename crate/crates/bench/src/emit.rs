//! CSV and JSON output.

use std::io::Write;
use std::path::Path;

use crate::profile::Profile;
use crate::runner::{CellResult, TraceRow};
use crate::Result;

pub const RESULT_COLUMNS: [&str; 10] = [
    "problem",
    "solver",
    "status",
    "outer_iters",
    "inner_iters_total",
    "f_final",
    "stat_sigma",
    "feas_theta",
    "rho_final",
    "wall_ms",
];

pub const TRACE_COLUMNS: [&str; 7] = ["k", "f", "sigma", "theta", "rho", "inner_iters", "wall_ms"];

fn num(v: Option<f64>) -> String {
    v.map(|v| format!("{v:e}")).unwrap_or_default()
}

pub fn write_results_csv<W: Write>(results: &[CellResult], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(RESULT_COLUMNS)?;
    for c in results {
        out.write_record([
            c.problem.clone(),
            c.solver.clone(),
            c.status.clone(),
            c.outer_iters.to_string(),
            c.inner_iters_total.to_string(),
            num(c.f_final),
            num(c.stat_sigma),
            num(c.feas_theta),
            num(c.rho_final),
            format!("{:e}", c.wall_ms),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn results_csv_string(results: &[CellResult]) -> Result<String> {
    let mut buf = Vec::new();
    write_results_csv(results, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

pub fn write_trace_csv<W: Write>(trace: &[TraceRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(TRACE_COLUMNS)?;
    for r in trace {
        out.write_record([
            r.k.to_string(),
            format!("{:e}", r.f),
            format!("{:e}", r.sigma),
            format!("{:e}", r.theta),
            format!("{:e}", r.rho),
            r.inner_iters.to_string(),
            format!("{:e}", r.wall_ms),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn results_json(results: &[CellResult]) -> Result<String> {
    Ok(serde_json::to_string_pretty(results)?)
}

pub fn parse_results_json(text: &str) -> Result<Vec<CellResult>> {
    Ok(serde_json::from_str(text)?)
}

/// A results row read back from CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub problem: String,
    pub solver: String,
    pub status: String,
    pub inner_iters_total: usize,
    pub wall_ms: f64,
}

pub fn read_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut rd = csv::Reader::from_path(path)?;
    let headers = rd.headers()?.clone();
    if headers.iter().ne(RESULT_COLUMNS) {
        return Err(crate::BenchError::Suite(format!("unexpected results header in {}", path.display())));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let parse_err = |col: &str| crate::BenchError::Suite(format!("bad {col} value in {}", path.display()));
        rows.push(ResultRow {
            problem: rec[0].to_string(),
            solver: rec[1].to_string(),
            status: rec[2].to_string(),
            inner_iters_total: rec[4].parse().map_err(|_| parse_err("inner_iters_total"))?,
            wall_ms: rec[9].parse().map_err(|_| parse_err("wall_ms"))?,
        });
    }
    Ok(rows)
}

/// Grid columns `tau` then one column per solver.
pub fn write_profile_csv<W: Write>(profile: &Profile, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header = vec!["tau".to_string()];
    header.extend(profile.curves.iter().map(|c| c.solver.clone()));
    out.write_record(&header)?;
    let npts = profile.curves.first().map_or(0, |c| c.points.len());
    for i in 0..npts {
        let mut rec = vec![format!("{:e}", profile.curves[0].points[i].0)];
        rec.extend(profile.curves.iter().map(|c| format!("{:e}", c.points[i].1)));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `results.csv`, `results.json` and one trace file per cell under
/// `dir/traces`.
pub fn write_outputs(results: &[CellResult], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir.join("traces"))?;
    write_results_csv(results, std::fs::File::create(dir.join("results.csv"))?)?;
    std::fs::write(dir.join("results.json"), results_json(results)?)?;
    for c in results {
        let file = format!("{}__{}.csv", sanitize(&c.problem), sanitize(&c.solver));
        write_trace_csv(&c.trace, std::fs::File::create(dir.join("traces").join(file))?)?;
    }
    Ok(())
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect()
}

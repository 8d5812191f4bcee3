//! Experiment harness: registered suites over solver-by-problem grids at
//! desk scale, run records, Dolan-More performance profiles and CSV I/O.
//! Suites run their instances on a rayon pool and merge records in a fixed
//! order, so a given seed always produces identical records (wall time
//! aside).

pub mod suites;

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// One (solver, problem) execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub solver: String,
    pub problem: String,
    pub iters: usize,
    pub nfe: usize,
    pub time: f64,
    pub converged: bool,
    pub residual: f64,
}

/// Empirical CDF of per-problem metric ratios for one solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub solver: String,
    /// (rho, fraction) points with rho >= 1 ascending and fraction
    /// nondecreasing; failures never enter the curve, so the terminal
    /// fraction is the solved share.
    pub points: Vec<(f64, f64)>,
}

/// Metric a profile ranks by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileMetric {
    Iterations,
    Time,
}

impl std::str::FromStr for ProfileMetric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "iterations" | "iters" => Ok(ProfileMetric::Iterations),
            "time" => Ok(ProfileMetric::Time),
            other => Err(format!("unknown metric '{other}' (iterations|time)")),
        }
    }
}

/// Dolan-More performance profiles: for every problem each solver's metric
/// is divided by the best value among solvers; a solver's curve is the
/// fraction of problems with ratio at most rho. Failed runs count as ratio
/// infinity.
pub fn performance_profile(
    records: &[RunRecord],
    metric: ProfileMetric,
) -> anyhow::Result<Vec<ProfileCurve>> {
    if records.is_empty() {
        anyhow::bail!("empty record set");
    }
    let mut solvers: Vec<String> = records.iter().map(|r| r.solver.clone()).collect();
    solvers.sort();
    solvers.dedup();
    let mut problems: Vec<String> = records.iter().map(|r| r.problem.clone()).collect();
    problems.sort();
    problems.dedup();

    let measure = |r: &RunRecord| -> f64 {
        if !r.converged {
            return f64::INFINITY;
        }
        match metric {
            ProfileMetric::Iterations => r.iters as f64,
            ProfileMetric::Time => r.time,
        }
    };

    // ratios[s][p]
    let mut ratios: Vec<Vec<f64>> = vec![Vec::new(); solvers.len()];
    for p in &problems {
        let best = records
            .iter()
            .filter(|r| &r.problem == p)
            .map(|r| measure(r))
            .fold(f64::INFINITY, f64::min);
        for (si, s) in solvers.iter().enumerate() {
            let v = records
                .iter()
                .find(|r| &r.problem == p && &r.solver == s)
                .map(measure)
                .unwrap_or(f64::INFINITY);
            let ratio = if v.is_finite() && best.is_finite() && best > 0.0 {
                v / best
            } else if v.is_finite() && best == 0.0 {
                1.0
            } else {
                f64::INFINITY
            };
            ratios[si].push(ratio);
        }
    }

    let n_problems = problems.len() as f64;
    let mut curves = Vec::new();
    for (si, solver) in solvers.iter().enumerate() {
        let mut finite: Vec<f64> = ratios[si]
            .iter()
            .cloned()
            .filter(|v| v.is_finite())
            .collect();
        finite.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut points = Vec::new();
        let mut count = 0usize;
        for rho in finite {
            count += 1;
            match points.last_mut() {
                Some((last_rho, frac)) if *last_rho == rho => *frac = count as f64 / n_problems,
                _ => points.push((rho, count as f64 / n_problems)),
            }
        }
        curves.push(ProfileCurve {
            solver: solver.clone(),
            points,
        });
    }
    Ok(curves)
}

/// Writes records as CSV with the fixed column order
/// solver,problem,iters,nfe,time,converged,residual. An empty set still
/// gets the header row.
pub fn emit_records_csv<P: AsRef<Path>>(records: &[RunRecord], path: P) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    if records.is_empty() {
        w.write_record([
            "solver",
            "problem",
            "iters",
            "nfe",
            "time",
            "converged",
            "residual",
        ])?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads records back from [`emit_records_csv`] output.
pub fn read_records_csv<P: AsRef<Path>>(path: P) -> anyhow::Result<Vec<RunRecord>> {
    let mut rd = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in rd.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

/// Writes profile curves as CSV rows solver,rho,fraction.
pub fn emit_curves_csv<P: AsRef<Path>>(curves: &[ProfileCurve], path: P) -> anyhow::Result<()> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "solver,rho,fraction")?;
    for c in curves {
        for (rho, frac) in &c.points {
            writeln!(f, "{},{},{}", c.solver, rho, frac)?;
        }
    }
    Ok(())
}

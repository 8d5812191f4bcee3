use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};

use bbqt_bench::suites::{run_suite, ConfigOverrides, SuiteOptions, SUITES};
use bbqt_bench::{
    emit_curves_csv, emit_records_csv, performance_profile, read_records_csv, ProfileMetric,
};

#[derive(Parser)]
#[command(name = "bbqt-bench", about = "Experiment harness for the bbqt solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a registered suite and print a summary (optionally writing CSV).
    Run {
        /// One of: termination2d, rand-quad, diag-quad, unc, eig, box, slb, svm
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override the suite's tolerance grid with a single value.
        #[arg(long)]
        eps: Option<f64>,
        /// Override the suite's problem dimension.
        #[arg(long)]
        n: Option<usize>,
        /// Write records to this CSV path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON file with solver parameter overrides.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Compute Dolan-More performance profiles from a records CSV.
    Profile {
        records: PathBuf,
        #[arg(long, default_value = "iterations")]
        metric: String,
        /// Write curves to this CSV path instead of printing them.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the r smallest eigenpairs of a Laplacian grid operator and
    /// emit the report as JSON.
    Eig {
        /// Grid sizes as nx,ny,nz
        #[arg(long, default_value = "8,8,8")]
        grid: String,
        #[arg(long, default_value_t = 5)]
        r: usize,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 100)]
        seed: u64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the unconstrained solver on a registry test function by name,
    /// or list the registry with `--list`.
    Func {
        name: Option<String>,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
        #[arg(long)]
        list: bool,
    },
    /// List the registered suites.
    Suites,
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Run {
            suite,
            seed,
            eps,
            n,
            out,
            config,
        } => {
            let overrides: ConfigOverrides = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str(&text).context("parsing config overrides")?
                }
                None => ConfigOverrides::default(),
            };
            let opts = SuiteOptions {
                seed,
                eps,
                n,
                overrides,
            };
            let records = run_suite(&suite, &opts)?;
            let solved = records.iter().filter(|r| r.converged).count();
            let total_iters: usize = records.iter().map(|r| r.iters).sum();
            println!(
                "suite {suite}: {} runs, {solved} converged, {total_iters} total iterations",
                records.len()
            );
            let mut solvers: Vec<&str> = records.iter().map(|r| r.solver.as_str()).collect();
            solvers.sort_unstable();
            solvers.dedup();
            for s in solvers {
                let (count, iters, conv): (usize, usize, usize) = records
                    .iter()
                    .filter(|r| r.solver == s)
                    .fold((0, 0, 0), |(c, i, v), r| {
                        (c + 1, i + r.iters, v + usize::from(r.converged))
                    });
                println!("  {s}: {conv}/{count} converged, {iters} iterations");
            }
            if let Some(path) = out {
                emit_records_csv(&records, &path)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
        Command::Profile {
            records,
            metric,
            out,
        } => {
            let metric: ProfileMetric = metric.parse().map_err(anyhow::Error::msg)?;
            let recs = read_records_csv(&records)?;
            let curves = performance_profile(&recs, metric)?;
            match out {
                Some(path) => {
                    emit_curves_csv(&curves, &path)?;
                    println!("wrote {}", path.display());
                }
                None => {
                    for c in &curves {
                        println!("{}:", c.solver);
                        for (rho, frac) in &c.points {
                            println!("  rho {rho:<10.4} fraction {frac:.3}");
                        }
                    }
                }
            }
            Ok(())
        }
        Command::Eig {
            grid,
            r,
            eps,
            seed,
            out,
        } => {
            let dims: Vec<usize> = grid
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .context("grid must be nx,ny,nz")?;
            anyhow::ensure!(dims.len() == 3, "grid must have three sizes");
            let a = bbqt::LinearOperator::laplacian3d(dims[0], dims[1], dims[2])?;
            let truth = bbqt::linops::laplacian3d_eigenvalues(dims[0], dims[1], dims[2]);
            let cfg = bbqt::SolverConfig::eig().with_eps(eps).with_seed(seed);
            let clock = std::time::Instant::now();
            let report = bbqt::eigsolver::solve_eigen(&a, r, &cfg)?;
            let wall = clock.elapsed().as_secs_f64();
            let (err, resi) = bbqt::eigsolver::eig_metrics(&a, &truth[..r], &report);
            #[derive(serde::Serialize)]
            struct Out {
                eigenvalues: Vec<f64>,
                err: f64,
                resi: f64,
                iter: usize,
                nfe: usize,
                wall_time_s: f64,
            }
            let json = serde_json::to_string_pretty(&Out {
                eigenvalues: report.eigenvalues.clone(),
                err,
                resi,
                iter: report.iterations,
                nfe: report.nfe,
                wall_time_s: wall,
            })?;
            match out {
                Some(path) => {
                    std::fs::write(&path, json)?;
                    println!("wrote {}", path.display());
                }
                None => println!("{json}"),
            }
            Ok(())
        }
        Command::Func { name, eps, list } => {
            use bbqt::problems::testfuncs;
            if list || name.is_none() {
                for f in testfuncs::registry() {
                    println!("{:<16} n = {}", f.name, f.dim);
                }
                return Ok(());
            }
            let name = name.unwrap();
            let f = testfuncs::by_name(&name)
                .ok_or_else(|| anyhow::anyhow!("unknown test function '{name}'"))?;
            let cfg = bbqt::SolverConfig::default()
                .with_eps(eps)
                .with_max_iter(100_000);
            let rep = bbqt::uncsolver::solve_unconstrained(&f, &f.start, &cfg)?;
            println!(
                "{name} (n = {}): {:?} in {} iterations, {} evaluations, final ||g||_inf = {:.3e}, f = {:.6e}",
                f.dim,
                rep.termination,
                rep.iterations,
                rep.nfe,
                rep.grad_norms.last().unwrap(),
                rep.f_final
            );
            Ok(())
        }
        Command::Suites => {
            for s in SUITES {
                println!("{s}");
            }
            Ok(())
        }
    }
}

//! Registered experiment suites at desk scale. Every suite is deterministic
//! under its seed: instances run on a worker pool and the records are merged
//! in (solver, problem) order.

use std::time::Instant;

use rayon::prelude::*;
use serde::Deserialize;

use bbqt::config::{SolverConfig, StopRule};
use bbqt::eigsolver::{eig_metrics, solve_eigen};
use bbqt::linops::{laplacian3d_eigenvalues, norm2, LinearOperator};
use bbqt::problems::svm::{build_svm_dual, gen_gaussian_clouds};
use bbqt::problems::{
    gen_2d_termination_case, gen_diagonal_hard, gen_random_box, gen_random_quadratic,
    gen_random_slb, testfuncs, SLBGenSpec, SpectrumSpec,
};
use bbqt::projgrad::solve_projected;
use bbqt::quadsolver::{
    solve_abb, solve_bb1, solve_bb_experiment, solve_quadratic, BBKind, QuadraticProblem,
};
use bbqt::report::Termination;
use bbqt::uncsolver::solve_unconstrained;

use crate::RunRecord;

pub const SUITES: &[&str] = &[
    "termination2d",
    "rand-quad",
    "diag-quad",
    "unc",
    "eig",
    "box",
    "slb",
    "svm",
];

/// Optional overrides for the solver tunables, read from a JSON file.
#[derive(Debug, Clone, Default, Deserialize)]
pub struct ConfigOverrides {
    pub alpha_min: Option<f64>,
    pub alpha_max: Option<f64>,
    pub tau1: Option<f64>,
    pub gamma: Option<f64>,
    pub eps: Option<f64>,
    pub sigma: Option<f64>,
    pub delta: Option<f64>,
    pub m: Option<usize>,
    pub max_iter: Option<usize>,
}

impl ConfigOverrides {
    pub fn apply(&self, mut cfg: SolverConfig) -> SolverConfig {
        if let Some(v) = self.alpha_min {
            cfg.alpha_min = v;
        }
        if let Some(v) = self.alpha_max {
            cfg.alpha_max = v;
        }
        if let Some(v) = self.tau1 {
            cfg.tau1 = v;
        }
        if let Some(v) = self.gamma {
            cfg.gamma = v;
        }
        if let Some(v) = self.eps {
            cfg.eps = v;
        }
        if let Some(v) = self.sigma {
            cfg.sigma = v;
        }
        if let Some(v) = self.delta {
            cfg.delta = v;
        }
        if let Some(v) = self.m {
            cfg.m = v;
        }
        if let Some(v) = self.max_iter {
            cfg.max_iter = v;
        }
        cfg
    }
}

/// Suite-level knobs coming from the CLI.
#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    pub seed: u64,
    pub eps: Option<f64>,
    pub n: Option<usize>,
    pub overrides: ConfigOverrides,
}

/// Runs a registered suite and returns its records sorted by
/// (solver, problem).
pub fn run_suite(suite: &str, opts: &SuiteOptions) -> anyhow::Result<Vec<RunRecord>> {
    let mut records = match suite {
        "termination2d" => termination2d(opts),
        "rand-quad" => rand_quad(opts),
        "diag-quad" => diag_quad(opts),
        "unc" => unc(opts),
        "eig" => eig(opts),
        "box" => box_suite(opts),
        "slb" => slb_suite(opts),
        "svm" => svm_suite(opts),
        other => anyhow::bail!("unknown suite '{other}' (expected one of {SUITES:?})"),
    };
    records.sort_by(|a, b| (&a.solver, &a.problem).cmp(&(&b.solver, &b.problem)));
    Ok(records)
}

fn timed<F: FnOnce() -> (usize, usize, bool, f64)>(
    solver: &str,
    problem: &str,
    run: F,
) -> RunRecord {
    let clock = Instant::now();
    let (iters, nfe, converged, residual) = run();
    RunRecord {
        solver: solver.to_string(),
        problem: problem.to_string(),
        iters,
        nfe,
        time: clock.elapsed().as_secs_f64(),
        converged,
        residual,
    }
}

fn quad_record(
    solver: &str,
    problem: &str,
    p: &QuadraticProblem,
    cfg: &SolverConfig,
    which: u8,
) -> RunRecord {
    timed(solver, problem, || {
        let r = match which {
            0 => solve_quadratic(p, cfg),
            1 => solve_bb1(p, cfg),
            _ => solve_abb(p, 0.15, cfg),
        };
        match r {
            Ok(rep) => (
                rep.iterations,
                rep.nfe,
                rep.termination == Termination::Converged,
                *rep.grad_norms.last().unwrap(),
            ),
            Err(_) => (0, 0, false, f64::INFINITY),
        }
    })
}

fn termination2d(opts: &SuiteOptions) -> Vec<RunRecord> {
    let lambdas = [10.0, 100.0, 1000.0, 10000.0];
    let variants: [(&str, BBKind, bool); 3] = [
        ("bb1", BBKind::Long, false),
        ("bb1+anew", BBKind::Long, true),
        ("bb2+anew", BBKind::Short, true),
    ];
    let mut jobs = Vec::new();
    for &lambda in &lambdas {
        for start in 0..10u64 {
            for v in &variants {
                jobs.push((lambda, start, *v));
            }
        }
    }
    jobs.par_iter()
        .map(|&(lambda, start, (name, kind, use_new))| {
            let p = gen_2d_termination_case(lambda, opts.seed ^ (lambda as u64 * 131 + start));
            let cfg = opts
                .overrides
                .apply(SolverConfig::default().with_eps(1e-12));
            let problem = format!("lam{lambda:.0}_s{start}");
            timed(name, &problem, || {
                let g1 = norm2(&p.gradient(&p.x0));
                match solve_bb_experiment(&p, kind, use_new, 5, &cfg) {
                    Ok(rep) => {
                        let g6 = *rep.grad_norms.last().unwrap();
                        (rep.iterations, 0, g6 <= 1e-10 * g1, g6)
                    }
                    Err(_) => (0, 0, false, f64::INFINITY),
                }
            })
        })
        .collect()
}

fn rand_quad(opts: &SuiteOptions) -> Vec<RunRecord> {
    let n = opts.n.unwrap_or(500);
    let eps_grid: Vec<f64> = opts.eps.map(|e| vec![e]).unwrap_or(vec![1e-6, 1e-9, 1e-12]);
    let kappa = 1e5;
    let mut jobs = Vec::new();
    for set_id in 1..=5u8 {
        for &eps in &eps_grid {
            for inst in 0..10u64 {
                jobs.push((set_id, eps, inst));
            }
        }
    }
    jobs.par_iter()
        .flat_map(|&(set_id, eps, inst)| {
            let spec = SpectrumSpec::new(set_id, n, kappa);
            let rq = gen_random_quadratic(&spec, opts.seed ^ (set_id as u64 * 977 + inst));
            let cfg = opts.overrides.apply(SolverConfig::default().with_eps(eps));
            let problem = format!("set{set_id}_eps{eps:.0e}_i{inst}");
            vec![
                quad_record("adaptive", &problem, &rq.problem, &cfg, 0),
                quad_record("bb1", &problem, &rq.problem, &cfg, 1),
                quad_record("abb0.15", &problem, &rq.problem, &cfg, 2),
            ]
        })
        .collect()
}

fn diag_quad(opts: &SuiteOptions) -> Vec<RunRecord> {
    let n = opts.n.unwrap_or(500);
    let eps_grid: Vec<f64> = opts.eps.map(|e| vec![e]).unwrap_or(vec![1e-6, 1e-9, 1e-12]);
    let mut jobs = Vec::new();
    for &kappa in &[1e4, 1e5, 1e6] {
        for &eps in &eps_grid {
            for start in 0..10u64 {
                jobs.push((kappa, eps, start));
            }
        }
    }
    jobs.par_iter()
        .flat_map(|&(kappa, eps, start)| {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
                opts.seed ^ (kappa as u64).wrapping_mul(31) ^ start,
            );
            let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let p = gen_diagonal_hard(n, kappa).with_start(x0);
            let cfg = opts.overrides.apply(SolverConfig::default().with_eps(eps));
            let problem = format!("kap{kappa:.0e}_eps{eps:.0e}_s{start}");
            vec![
                quad_record("adaptive", &problem, &p, &cfg, 0),
                quad_record("bb1", &problem, &p, &cfg, 1),
                quad_record("abb0.15", &problem, &p, &cfg, 2),
            ]
        })
        .collect()
}

fn unc(opts: &SuiteOptions) -> Vec<RunRecord> {
    let eps = opts.eps.unwrap_or(1e-6);
    let solvers: [(&str, usize); 2] = [("gll-m10", 10), ("gll-m1", 1)];
    testfuncs::registry()
        .par_iter()
        .flat_map(|f| {
            solvers
                .iter()
                .map(|&(name, m)| {
                    let mut cfg = opts
                        .overrides
                        .apply(SolverConfig::default().with_eps(eps).with_max_iter(100_000));
                    cfg.m = m;
                    timed(name, f.name, || {
                        match solve_unconstrained(f, &f.start, &cfg) {
                            Ok(rep) => (
                                rep.iterations,
                                rep.nfe,
                                rep.termination == Termination::Converged,
                                *rep.grad_norms.last().unwrap(),
                            ),
                            Err(_) => (0, 0, false, f64::INFINITY),
                        }
                    })
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn eig(opts: &SuiteOptions) -> Vec<RunRecord> {
    let a = LinearOperator::laplacian3d(8, 8, 8).expect("grid");
    let truth = laplacian3d_eigenvalues(8, 8, 8);
    let base = SolverConfig::eig();
    let eps = opts.eps.unwrap_or(base.eps);
    [5usize, 10, 20]
        .par_iter()
        .map(|&r| {
            let cfg = opts
                .overrides
                .apply(base.clone().with_eps(eps).with_seed(opts.seed + 100));
            let problem = format!("lap8x8x8_r{r}");
            timed("eig-adaptive", &problem, || {
                match solve_eigen(&a, r, &cfg) {
                    Ok(rep) => {
                        let (_, resi) = eig_metrics(&a, &truth[..r], &rep);
                        (rep.iterations, rep.nfe, resi <= eps, resi)
                    }
                    Err(_) => (0, 0, false, f64::INFINITY),
                }
            })
        })
        .collect()
}

fn projected_record(
    solver: &str,
    problem: &str,
    p: &QuadraticProblem,
    cons: &bbqt::projgrad::ConstraintSet,
    cfg: &SolverConfig,
) -> RunRecord {
    timed(solver, problem, || {
        match solve_projected(p, cons, &p.x0, cfg) {
            Ok(rep) => (
                rep.iterations,
                rep.nfe,
                rep.termination == Termination::Converged,
                *rep.grad_norms.last().unwrap(),
            ),
            Err(_) => (0, 0, false, f64::INFINITY),
        }
    })
}

fn planted_suite(opts: &SuiteOptions, with_equality: bool) -> Vec<RunRecord> {
    let n = opts.n.unwrap_or(200);
    let eps = opts.eps.unwrap_or(1e-8);
    let mut jobs = Vec::new();
    for &ncond in &[2.0, 3.0] {
        for &ndeg in &[1.0, 3.0] {
            for &frac in &[0.1, 0.5, 0.9] {
                for inst in 0..3u64 {
                    jobs.push((ncond, ndeg, frac, inst));
                }
            }
        }
    }
    jobs.par_iter()
        .flat_map(|&(ncond, ndeg, frac, inst)| {
            let spec = SLBGenSpec {
                n,
                ncond,
                ndeg,
                na_xstar: (frac * n as f64) as usize,
                na_x1: n / 4,
            };
            let seed = opts.seed
                ^ (ncond as u64 * 7919 + ndeg as u64 * 127 + (frac * 10.0) as u64 * 13 + inst);
            let gen = if with_equality {
                gen_random_slb(&spec, seed)
            } else {
                gen_random_box(&spec, seed)
            };
            let base = if with_equality {
                SolverConfig::slb()
            } else {
                SolverConfig::default()
            };
            let mut cfg = opts
                .overrides
                .apply(base.with_eps(eps).with_max_iter(50_000));
            cfg.stop_rule = StopRule::Residual;
            // second solver: the other threshold setting, mirroring the
            // parameter study between the unconstrained and SLB defaults
            let mut cfg_alt = cfg.clone();
            if with_equality {
                cfg_alt.tau1 = 0.2;
                cfg_alt.gamma = 1.02;
            } else {
                cfg_alt.tau1 = 0.5;
                cfg_alt.gamma = 1.3;
            }
            let (name, name_alt) = if with_equality {
                ("proj-t05", "proj-t02")
            } else {
                ("proj-t02", "proj-t05")
            };
            let problem = format!("nc{ncond}_nd{ndeg}_a{frac}_i{inst}");
            vec![
                projected_record(name, &problem, &gen.problem, &gen.constraint, &cfg),
                projected_record(name_alt, &problem, &gen.problem, &gen.constraint, &cfg_alt),
            ]
        })
        .collect()
}

fn box_suite(opts: &SuiteOptions) -> Vec<RunRecord> {
    planted_suite(opts, false)
}

fn slb_suite(opts: &SuiteOptions) -> Vec<RunRecord> {
    planted_suite(opts, true)
}

fn svm_suite(opts: &SuiteOptions) -> Vec<RunRecord> {
    let n = opts.n.unwrap_or(200);
    let eps_grid: Vec<f64> = opts.eps.map(|e| vec![e]).unwrap_or(vec![1e-3, 1e-6, 1e-9]);
    let data = gen_gaussian_clouds(n, 5, opts.seed ^ 0x5317);
    let (p, cons) = build_svm_dual(&data, 1.0, 10f64.sqrt()).expect("dual");
    eps_grid
        .par_iter()
        .map(|&eps| {
            let mut cfg = opts
                .overrides
                .apply(SolverConfig::slb().with_eps(eps).with_max_iter(100_000));
            cfg.stop_rule = StopRule::StepNorm;
            let problem = format!("clouds{n}_eps{eps:.0e}");
            // null starting point
            let x0 = vec![0.0; n];
            timed(
                "proj-slb",
                &problem,
                || match bbqt::projgrad::solve_projected(&p, &cons, &x0, &cfg) {
                    Ok(rep) => (
                        rep.iterations,
                        rep.nfe,
                        rep.termination == Termination::Converged,
                        *rep.grad_norms.last().unwrap(),
                    ),
                    Err(_) => (0, 0, false, f64::INFINITY),
                },
            )
        })
        .collect()
}

//! Gradient methods for strictly convex quadratics q(x) = 1/2 x'Ax - b'x:
//! the adaptive long/short method built on `alpha_new`, the plain BB1
//! baseline, the fixed-threshold ABB baseline, and the five-step termination
//! experiment where the third stepsize is replaced by `alpha_new`.
//!
//! One operator product per iteration: with g the current gradient and
//! w = A g, the next gradient is g - alpha w and the BB pair of the next
//! iteration equals (g'g / g'w, g'w / w'w).

use crate::config::SolverConfig;
use crate::error::SolverError;
use crate::linops::{check_finite, dot, norm2, LinearOperator};
use crate::report::{Branch, SolveReport, Termination, TraceSink};
use crate::stepsize::{alpha_new, clamp, BBPair, BBState, TauController};

/// Strictly convex quadratic minimization data.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    pub a: LinearOperator,
    pub b: Vec<f64>,
    pub x0: Vec<f64>,
}

impl QuadraticProblem {
    pub fn new(a: LinearOperator, b: Vec<f64>, x0: Vec<f64>) -> Result<Self, SolverError> {
        let n = a.dim();
        if b.len() != n {
            return Err(SolverError::DimensionMismatch {
                expected: n,
                got: b.len(),
            });
        }
        if x0.len() != n {
            return Err(SolverError::DimensionMismatch {
                expected: n,
                got: x0.len(),
            });
        }
        check_finite(&b, "quadratic linear term")?;
        check_finite(&x0, "quadratic starting point")?;
        Ok(QuadraticProblem { a, b, x0 })
    }

    pub fn with_start(mut self, x0: Vec<f64>) -> Self {
        assert_eq!(x0.len(), self.a.dim());
        self.x0 = x0;
        self
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    /// q(x) = 1/2 x'Ax - b'x
    pub fn value(&self, x: &[f64]) -> f64 {
        let ax = self.a.matvec(x).expect("dimension checked");
        0.5 * dot(x, &ax) - dot(&self.b, x)
    }

    /// g(x) = Ax - b
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.a.matvec(x).expect("dimension checked");
        for (gi, bi) in g.iter_mut().zip(&self.b) {
            *gi -= bi;
        }
        g
    }
}

impl crate::uncsolver::Objective for QuadraticProblem {
    fn dim(&self) -> usize {
        self.a.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        QuadraticProblem::value(self, x)
    }
    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        self.a.matvec_into(x, g);
        for (gi, bi) in g.iter_mut().zip(&self.b) {
            *gi -= bi;
        }
    }
}

/// Which plain BB stepsize a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BBKind {
    Long,
    Short,
}

enum Strategy {
    Adaptive { tau: TauController },
    Bb1,
    Abb { tau_fixed: f64 },
    Experiment { kind: BBKind, use_alpha_new: bool },
}

/// True iff ||g|| <= eps * ||g_1|| (inclusive).
pub fn termination_check(g: &[f64], g1_norm: f64, eps: f64) -> bool {
    debug_assert!(g1_norm >= 0.0);
    norm2(g) <= eps * g1_norm
}

fn run(
    p: &QuadraticProblem,
    cfg: &SolverConfig,
    mut strategy: Strategy,
    max_iter: usize,
    eps: f64,
    mut trace: Option<&mut dyn TraceSink>,
) -> Result<SolveReport, SolverError> {
    cfg.validate()?;
    let n = p.dim();
    let mut x = p.x0.clone();
    let mut g = p.gradient(&x);
    check_finite(&g, "initial gradient")?;
    let g1_norm = norm2(&g);
    let mut grad_norms = vec![g1_norm];
    let mut stepsizes = Vec::new();
    let mut state: Option<BBState> = None;
    let mut w = vec![0.0; n];
    let mut termination = Termination::MaxIter;
    let mut iterations = 0;

    for k in 1..=max_iter {
        if termination_check(&g, g1_norm, eps) {
            termination = Termination::Converged;
            break;
        }
        let gg = dot(&g, &g);
        if gg == 0.0 {
            termination = Termination::Converged;
            break;
        }
        p.a.matvec_into(&g, &mut w);
        let gw = dot(&g, &w);
        if gw <= 0.0 {
            return Err(SolverError::NotPositiveDefinite(gw));
        }
        let sd = gg / gw;

        let (alpha, branch) = match &mut strategy {
            Strategy::Adaptive { tau } => match (k, &state) {
                (1, _) | (_, None) => (sd, Branch::SteepestDescent),
                (2, Some(st)) => (st.curr.bb1, Branch::Fixed),
                (_, Some(st)) => {
                    let before = tau.tau;
                    let (a, t2) = crate::stepsize::adaptive_select(st, alpha_new(st), *tau);
                    *tau = t2;
                    let branch = if t2.tau < before {
                        Branch::Short
                    } else {
                        Branch::Long
                    };
                    (a, branch)
                }
            },
            Strategy::Bb1 => match &state {
                None => (sd, Branch::SteepestDescent),
                Some(st) => (st.curr.bb1, Branch::Fixed),
            },
            Strategy::Abb { tau_fixed } => match &state {
                None => (sd, Branch::SteepestDescent),
                Some(st) => {
                    if st.curr.bb2 / st.curr.bb1 < *tau_fixed {
                        (st.curr.bb2, Branch::Short)
                    } else {
                        (st.curr.bb1, Branch::Long)
                    }
                }
            },
            Strategy::Experiment {
                kind,
                use_alpha_new,
            } => match &state {
                None => (sd, Branch::SteepestDescent),
                Some(st) => {
                    let plain = match kind {
                        BBKind::Long => st.curr.bb1,
                        BBKind::Short => st.curr.bb2,
                    };
                    if k == 3 && *use_alpha_new {
                        match alpha_new(st) {
                            Some(a) if a > 0.0 => (a, Branch::Short),
                            _ => (st.prev.bb2.min(st.curr.bb2), Branch::Short),
                        }
                    } else {
                        (plain, Branch::Fixed)
                    }
                }
            },
        };
        let alpha = clamp(alpha, cfg.alpha_min, cfg.alpha_max);

        // x <- x - alpha g, g <- g - alpha A g; the BB pair of the next
        // iteration is formed from the pre-step gradient.
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= alpha * gi;
        }
        let ww = dot(&w, &w);
        let next = BBPair {
            bb1: gg / gw,
            bb2: gw / ww,
        };
        state = Some(match state {
            None => BBState {
                prev: next,
                curr: next,
            },
            Some(st) => BBState {
                prev: st.curr,
                curr: next,
            },
        });
        for (gi, wi) in g.iter_mut().zip(&w) {
            *gi -= alpha * wi;
        }
        iterations = k;
        grad_norms.push(norm2(&g));
        stepsizes.push(alpha);
        if let Some(sink) = trace.as_deref_mut() {
            sink.record(k, *grad_norms.last().unwrap(), alpha, branch);
        }
        if !grad_norms.last().unwrap().is_finite() {
            return Err(SolverError::NonFinite("gradient during quadratic solve"));
        }
    }
    if termination == Termination::MaxIter && termination_check(&g, g1_norm, eps) {
        termination = Termination::Converged;
    }
    Ok(SolveReport {
        f_final: p.value(&x),
        x,
        iterations,
        nfe: 0,
        grad_norms,
        stepsizes,
        termination,
    })
}

/// The adaptive method with the dynamic threshold: alpha_1 exact SD,
/// alpha_2 the long BB stepsize, afterwards the long/short switch with
/// `alpha_new` among the short candidates.
pub fn solve_quadratic(
    p: &QuadraticProblem,
    cfg: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    solve_quadratic_traced(p, cfg, None)
}

pub fn solve_quadratic_traced(
    p: &QuadraticProblem,
    cfg: &SolverConfig,
    trace: Option<&mut dyn TraceSink>,
) -> Result<SolveReport, SolverError> {
    let tau = TauController::new(cfg.tau1, cfg.gamma);
    run(
        p,
        cfg,
        Strategy::Adaptive { tau },
        cfg.max_iter,
        cfg.eps,
        trace,
    )
}

/// Plain BB1 baseline: alpha_1 exact SD, then the long BB stepsize.
pub fn solve_bb1(p: &QuadraticProblem, cfg: &SolverConfig) -> Result<SolveReport, SolverError> {
    run(p, cfg, Strategy::Bb1, cfg.max_iter, cfg.eps, None)
}

/// Fixed-threshold adaptive BB baseline.
pub fn solve_abb(
    p: &QuadraticProblem,
    tau_fixed: f64,
    cfg: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    if !(tau_fixed > 0.0 && tau_fixed < 1.0) {
        return Err(SolverError::InvalidArgument(format!(
            "abb threshold must lie in (0,1), got {tau_fixed}"
        )));
    }
    run(
        p,
        cfg,
        Strategy::Abb { tau_fixed },
        cfg.max_iter,
        cfg.eps,
        None,
    )
}

/// Five-step termination experiment: a plain BB run (long or short kind)
/// with the third stepsize optionally replaced by `alpha_new`. Runs exactly
/// `iters` steps unless the gradient vanishes identically first.
pub fn solve_bb_experiment(
    p: &QuadraticProblem,
    kind: BBKind,
    use_alpha_new: bool,
    iters: usize,
    cfg: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    run(
        p,
        cfg,
        Strategy::Experiment {
            kind,
            use_alpha_new,
        },
        iters,
        0.0,
        None,
    )
}

//! Nonmonotone gradient descent for general smooth unconstrained problems:
//! steepest-descent directions, GLL backtracking, BB stepsizes with the
//! adaptive long/short switch and `alpha_new` among the short candidates,
//! and a safeguard stepsize whenever the curvature gate s'y > 0 fails.

use crate::config::SolverConfig;
use crate::error::SolverError;
use crate::linesearch::{backtrack, GLLMemory};
use crate::linops::{check_finite, dot, norm2, norm_inf, sub};
use crate::report::{IterObserver, SolveReport, Termination};
use crate::stepsize::{alpha_new, clamp, BBPair, BBState, TauController};

/// A smooth objective with an analytic gradient.
pub trait Objective {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], g: &mut [f64]);
}

/// Adapter for closure-based objectives.
pub struct FnObjective<F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut [f64]),
{
    pub dim: usize,
    pub f: F,
    pub g: G,
}

impl<F, G> Objective for FnObjective<F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        (self.g)(x, g)
    }
}

/// Relative deviation between the analytic gradient and central differences
/// at h = 1e-6 (1 + ||x||). Values at or below 1e-5 indicate consistency.
pub fn check_gradient<O: Objective + ?Sized>(f: &O, x: &[f64]) -> f64 {
    let n = x.len();
    let h = 1e-6 * (1.0 + norm2(x));
    let mut g = vec![0.0; n];
    f.gradient(x, &mut g);
    let mut fd = vec![0.0; n];
    let mut xp = x.to_vec();
    for i in 0..n {
        let xi = x[i];
        xp[i] = xi + h;
        let fp = f.value(&xp);
        xp[i] = xi - h;
        let fm = f.value(&xp);
        xp[i] = xi;
        fd[i] = (fp - fm) / (2.0 * h);
    }
    let diff = sub(&g, &fd);
    norm2(&diff) / norm2(&g).max(1.0)
}

/// First stepsize: ||x||_inf / ||g||_inf away from the origin, 1 / ||g||_inf
/// at it. Requires g != 0.
pub fn initial_stepsize(x1: &[f64], g1: &[f64]) -> f64 {
    let gn = norm_inf(g1);
    debug_assert!(gn > 0.0);
    if x1.iter().any(|&v| v != 0.0) {
        norm_inf(x1) / gn
    } else {
        1.0 / gn
    }
}

/// Runs the solver without an observer.
pub fn solve_unconstrained<O: Objective + ?Sized>(
    f: &O,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    solve_unconstrained_observed(f, x0, cfg, None)
}

/// Minimizes `f` from `x0`, stopping at ||g||_inf <= eps. The observer, when
/// given, is called after every accepted step with (k, lambda_k, x_{k+1}).
pub fn solve_unconstrained_observed<O: Objective + ?Sized>(
    f: &O,
    x0: &[f64],
    cfg: &SolverConfig,
    mut observer: Option<IterObserver<'_>>,
) -> Result<SolveReport, SolverError> {
    cfg.validate()?;
    let n = f.dim();
    if x0.len() != n {
        return Err(SolverError::DimensionMismatch {
            expected: n,
            got: x0.len(),
        });
    }
    check_finite(x0, "starting point")?;

    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    f.gradient(&x, &mut g);
    check_finite(&g, "initial gradient")?;
    let mut fval = f.value(&x);
    let mut nfe = 1usize;

    let mut grad_norms = vec![norm_inf(&g)];
    let mut stepsizes = Vec::new();
    let mut termination = Termination::MaxIter;
    let mut iterations = 0usize;

    if grad_norms[0] <= cfg.eps {
        return Ok(SolveReport {
            x,
            iterations: 0,
            nfe,
            grad_norms,
            stepsizes,
            f_final: fval,
            termination: Termination::Converged,
        });
    }

    let mut alpha = clamp(initial_stepsize(&x, &g), cfg.alpha_min, cfg.alpha_max);
    let mut tau = TauController::new(cfg.tau1, cfg.gamma);
    let mut gll = GLLMemory::new(cfg.m);
    gll.push(fval);
    // most recent BB pair with a positive curvature gate; None right after a
    // failed gate so the short branch waits for two fresh pairs
    let mut window: Option<BBPair> = None;

    for k in 1..=cfg.max_iter {
        let d: Vec<f64> = g.iter().map(|v| -v).collect();
        let gd = -dot(&g, &g);
        let f_r = gll.reference();
        let (lambda, f_new, evals) =
            backtrack(|p| f.value(p), &x, &d, alpha, f_r, cfg.sigma, cfg.delta, gd)?;
        nfe += evals;
        let x_new: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + lambda * di).collect();
        let mut g_new = vec![0.0; n];
        f.gradient(&x_new, &mut g_new);
        check_finite(&g_new, "gradient")?;

        let s = sub(&x_new, &x);
        let y = sub(&g_new, &g);
        let sy = dot(&s, &y);

        let alpha_next = if sy > 0.0 {
            let new_pair = BBPair {
                bb1: dot(&s, &s) / sy,
                bb2: sy / dot(&y, &y),
            };
            let chosen = match window {
                Some(cur) if cur.bb2 / cur.bb1 < tau.tau => {
                    let state = BBState {
                        prev: cur,
                        curr: new_pair,
                    };
                    let mut a = cur.bb2.min(new_pair.bb2);
                    if let Some(an) = alpha_new(&state) {
                        if an > 0.0 {
                            a = a.min(an);
                        }
                    }
                    tau = tau.shrink();
                    a
                }
                _ => {
                    tau = tau.grow();
                    new_pair.bb1
                }
            };
            window = Some(new_pair);
            chosen
        } else {
            // safeguard from the pre-step point; the pair window restarts
            window = None;
            let gn = norm_inf(&g);
            (1.0 / gn).min(norm_inf(&x) / gn)
        };
        alpha = clamp(alpha_next, cfg.alpha_min, cfg.alpha_max);

        x = x_new;
        g = g_new;
        fval = f_new;
        gll.push(fval);
        iterations = k;
        grad_norms.push(norm_inf(&g));
        stepsizes.push(lambda);
        if let Some(obs) = observer.as_deref_mut() {
            obs(k, lambda, &x);
        }
        if *grad_norms.last().unwrap() <= cfg.eps {
            termination = Termination::Converged;
            break;
        }
    }

    Ok(SolveReport {
        x,
        iterations,
        nfe,
        grad_norms,
        stepsizes,
        f_final: fval,
        termination,
    })
}

//! Projections onto box and singly-linearly-box (SLB) feasible sets,
//! constraint-aware modified BB stepsizes, and the projected gradient
//! method with GLL backtracking along the projection-arc direction.

use serde::{Deserialize, Serialize};

use crate::config::{ActiveSetRule, SolverConfig, StopRule};
use crate::error::SolverError;
use crate::linesearch::{backtrack, GLLMemory};
use crate::linops::{check_finite, dot, norm2, norm_inf, sub};
use crate::report::{IterObserver, SolveReport, Termination};
use crate::stepsize::{alpha_new, clamp, BBPair, BBState, TauController};
use crate::uncsolver::Objective;

/// Default relative tolerance of the SLB projection's multiplier equation.
pub const SLB_PROJECTION_TOL: f64 = 1e-12;

/// Componentwise bounds l <= x <= u; infinities mark absent bounds.
#[derive(Debug, Clone)]
pub struct BoxConstraint {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxConstraint {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, SolverError> {
        if lower.len() != upper.len() {
            return Err(SolverError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(SolverError::Infeasible(
                "lower bound exceeds upper bound".into(),
            ));
        }
        Ok(BoxConstraint { lower, upper })
    }

    /// Unbounded box of dimension n.
    pub fn free(n: usize) -> Self {
        BoxConstraint {
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn project_into(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..x.len() {
            out[i] = x[i].max(self.lower[i]).min(self.upper[i]);
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.iter()
            .zip(&self.lower)
            .zip(&self.upper)
            .all(|((xi, l), u)| *xi >= l - tol && *xi <= u + tol)
    }
}

/// Box intersected with one linear equality a'x = b.
#[derive(Debug, Clone)]
pub struct SLBConstraint {
    pub bounds: BoxConstraint,
    pub a: Vec<f64>,
    pub b: f64,
}

impl SLBConstraint {
    pub fn new(bounds: BoxConstraint, a: Vec<f64>, b: f64) -> Result<Self, SolverError> {
        if a.len() != bounds.dim() {
            return Err(SolverError::DimensionMismatch {
                expected: bounds.dim(),
                got: a.len(),
            });
        }
        let slb = SLBConstraint { bounds, a, b };
        let (lo, hi) = slb.equality_range();
        let tol = 1e-12 * slb.b.abs().max(1.0);
        if slb.b < lo - tol || slb.b > hi + tol {
            return Err(SolverError::Infeasible(format!(
                "a'x ranges over [{lo}, {hi}] on the box but b = {}",
                slb.b
            )));
        }
        Ok(slb)
    }

    /// Range of a'x over the box.
    fn equality_range(&self) -> (f64, f64) {
        let mut lo = 0.0;
        let mut hi = 0.0;
        for i in 0..self.a.len() {
            let ai = self.a[i];
            if ai > 0.0 {
                lo += ai * self.bounds.lower[i];
                hi += ai * self.bounds.upper[i];
            } else if ai < 0.0 {
                lo += ai * self.bounds.upper[i];
                hi += ai * self.bounds.lower[i];
            }
        }
        (lo, hi)
    }
}

/// Feasible set: unconstrained, box, or box plus one linear equality.
#[derive(Debug, Clone)]
pub enum ConstraintSet {
    Free,
    Box(BoxConstraint),
    Slb(SLBConstraint),
}

impl ConstraintSet {
    /// Euclidean projection onto the set.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>, SolverError> {
        match self {
            ConstraintSet::Free => Ok(x.to_vec()),
            ConstraintSet::Box(c) => Ok(project_box(x, c)),
            ConstraintSet::Slb(c) => project_slb(x, c, SLB_PROJECTION_TOL),
        }
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        match self {
            ConstraintSet::Free => true,
            ConstraintSet::Box(c) => c.contains(x, tol),
            ConstraintSet::Slb(c) => {
                c.bounds.contains(x, tol)
                    && (dot(&c.a, x) - c.b).abs() <= tol.max(1e-8 * c.b.abs().max(1.0))
            }
        }
    }

    /// JSON description with nulls for absent bounds.
    pub fn to_json(&self) -> Result<String, SolverError> {
        Ok(serde_json::to_string(&ConstraintRepr::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self, SolverError> {
        let repr: ConstraintRepr = serde_json::from_str(s)?;
        repr.try_into()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ConstraintRepr {
    Free,
    Box {
        lower: Vec<Option<f64>>,
        upper: Vec<Option<f64>>,
    },
    Slb {
        lower: Vec<Option<f64>>,
        upper: Vec<Option<f64>>,
        a: Vec<f64>,
        b: f64,
    },
}

fn bounds_to_repr(b: &BoxConstraint) -> (Vec<Option<f64>>, Vec<Option<f64>>) {
    let enc = |v: f64| v.is_finite().then_some(v);
    (
        b.lower.iter().map(|&v| enc(v)).collect(),
        b.upper.iter().map(|&v| enc(v)).collect(),
    )
}

fn bounds_from_repr(
    lower: Vec<Option<f64>>,
    upper: Vec<Option<f64>>,
) -> Result<BoxConstraint, SolverError> {
    BoxConstraint::new(
        lower
            .into_iter()
            .map(|v| v.unwrap_or(f64::NEG_INFINITY))
            .collect(),
        upper
            .into_iter()
            .map(|v| v.unwrap_or(f64::INFINITY))
            .collect(),
    )
}

impl From<&ConstraintSet> for ConstraintRepr {
    fn from(c: &ConstraintSet) -> Self {
        match c {
            ConstraintSet::Free => ConstraintRepr::Free,
            ConstraintSet::Box(b) => {
                let (lower, upper) = bounds_to_repr(b);
                ConstraintRepr::Box { lower, upper }
            }
            ConstraintSet::Slb(s) => {
                let (lower, upper) = bounds_to_repr(&s.bounds);
                ConstraintRepr::Slb {
                    lower,
                    upper,
                    a: s.a.clone(),
                    b: s.b,
                }
            }
        }
    }
}

impl TryFrom<ConstraintRepr> for ConstraintSet {
    type Error = SolverError;
    fn try_from(r: ConstraintRepr) -> Result<Self, SolverError> {
        Ok(match r {
            ConstraintRepr::Free => ConstraintSet::Free,
            ConstraintRepr::Box { lower, upper } => {
                ConstraintSet::Box(bounds_from_repr(lower, upper)?)
            }
            ConstraintRepr::Slb { lower, upper, a, b } => {
                ConstraintSet::Slb(SLBConstraint::new(bounds_from_repr(lower, upper)?, a, b)?)
            }
        })
    }
}

/// Componentwise clamp onto the box.
pub fn project_box(x: &[f64], c: &BoxConstraint) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    c.project_into(x, &mut out);
    out
}

/// Euclidean projection onto {l <= z <= u, a'z = b} via the monotone scalar
/// equation a' clamp(x - t a) = b, solved by bracketing plus a
/// bisection-safeguarded secant to |a'z - b| <= tol * max(1, |b|).
pub fn project_slb(x: &[f64], c: &SLBConstraint, tol: f64) -> Result<Vec<f64>, SolverError> {
    let n = x.len();
    if n != c.bounds.dim() {
        return Err(SolverError::DimensionMismatch {
            expected: c.bounds.dim(),
            got: n,
        });
    }
    let tol_eff = tol * c.b.abs().max(1.0);
    let clamp_at = |t: f64, out: &mut Vec<f64>| {
        out.clear();
        out.extend((0..n).map(|i| {
            (x[i] - t * c.a[i])
                .max(c.bounds.lower[i])
                .min(c.bounds.upper[i])
        }));
    };
    let mut z = Vec::with_capacity(n);
    let h = |t: f64, z: &mut Vec<f64>| -> f64 {
        clamp_at(t, z);
        dot(&c.a, z) - c.b
    };

    // h is nonincreasing in t; bracket the root by doubling outward.
    let mut t_lo = 0.0;
    let mut h_lo = h(t_lo, &mut z);
    if h_lo.abs() <= tol_eff {
        return Ok(z);
    }
    let mut t_hi;
    let mut h_hi;
    let mut step = 1.0 + norm_inf(x) / dot(&c.a, &c.a).max(1e-30).sqrt();
    if h_lo > 0.0 {
        // need larger t
        t_hi = t_lo + step;
        h_hi = h(t_hi, &mut z);
        let mut tries = 0;
        while h_hi > 0.0 {
            t_lo = t_hi;
            h_lo = h_hi;
            step *= 2.0;
            t_hi += step;
            h_hi = h(t_hi, &mut z);
            tries += 1;
            if tries > 200 {
                return Err(SolverError::Infeasible(
                    "bracket failure in SLB projection".into(),
                ));
            }
        }
    } else {
        // h_lo < 0: need smaller t; swap roles so h(t_lo) >= 0 >= h(t_hi)
        t_hi = t_lo;
        h_hi = h_lo;
        t_lo -= step;
        h_lo = h(t_lo, &mut z);
        let mut tries = 0;
        while h_lo < 0.0 {
            t_hi = t_lo;
            h_hi = h_lo;
            step *= 2.0;
            t_lo -= step;
            h_lo = h(t_lo, &mut z);
            tries += 1;
            if tries > 200 {
                return Err(SolverError::Infeasible(
                    "bracket failure in SLB projection".into(),
                ));
            }
        }
    }

    // secant alternated with bisection on the bracket h(t_lo) >= 0 >= h(t_hi);
    // plain regula falsi can crawl when the slopes around the root differ by
    // orders of magnitude, so every other step halves the bracket outright
    for iter in 0..200 {
        if h_lo.abs() <= tol_eff {
            let _ = h(t_lo, &mut z);
            return Ok(z);
        }
        if h_hi.abs() <= tol_eff {
            let _ = h(t_hi, &mut z);
            return Ok(z);
        }
        if (t_hi - t_lo).abs() <= 1e-17 * (1.0 + t_lo.abs().max(t_hi.abs())) {
            break;
        }
        let denom = h_lo - h_hi;
        let mut t = if iter % 2 == 0 && denom.abs() > 0.0 {
            t_lo + h_lo * (t_hi - t_lo) / denom
        } else {
            0.5 * (t_lo + t_hi)
        };
        // keep strictly inside the bracket, else bisect
        if !(t > t_lo.min(t_hi) && t < t_lo.max(t_hi)) {
            t = 0.5 * (t_lo + t_hi);
        }
        let ht = h(t, &mut z);
        if ht.abs() <= tol_eff {
            return Ok(z);
        }
        if ht > 0.0 {
            t_lo = t;
            h_lo = ht;
        } else {
            t_hi = t;
            h_hi = ht;
        }
    }
    // bracket collapsed; the closer endpoint is the piecewise-linear root
    let t = if h_lo.abs() <= h_hi.abs() { t_lo } else { t_hi };
    let residual = h(t, &mut z);
    if residual.abs() <= tol_eff.max(1e-9 * c.b.abs().max(1.0)) {
        Ok(z)
    } else {
        Err(SolverError::Infeasible(format!(
            "SLB projection stalled with |a'z - b| = {:.3e}",
            residual.abs()
        )))
    }
}

/// Projection-arc direction d = P(x - alpha g) - x.
pub fn search_direction(
    x: &[f64],
    g: &[f64],
    alpha: f64,
    c: &ConstraintSet,
) -> Result<Vec<f64>, SolverError> {
    debug_assert!(alpha > 0.0);
    let shifted: Vec<f64> = x.iter().zip(g).map(|(xi, gi)| xi - alpha * gi).collect();
    let p = c.project(&shifted)?;
    Ok(sub(&p, x))
}

/// Stationarity measure ||P(x - g) - x||_inf.
pub fn stationarity_residual(x: &[f64], g: &[f64], c: &ConstraintSet) -> Result<f64, SolverError> {
    let d = search_direction(x, g, 1.0, c)?;
    Ok(norm_inf(&d))
}

/// Gradient-difference deflation for box constraints: components with a zero
/// step are treated as active and zeroed.
pub fn ybar_box(y: &[f64], s: &[f64]) -> Vec<f64> {
    y.iter()
        .zip(s)
        .map(|(yi, si)| if *si == 0.0 { 0.0 } else { *yi })
        .collect()
}

/// Deflation for SLB constraints: active components are zeroed and the
/// inactive block is orthogonalized against `a` restricted to it, removing
/// the estimated multiplier drift of the equality. Falls back to the box
/// rule when `a` vanishes on the inactive set.
pub fn ybar_slb(y: &[f64], s: &[f64], a: &[f64]) -> Vec<f64> {
    let mask: Vec<bool> = s.iter().map(|si| *si == 0.0).collect();
    ybar_slb_masked(y, &mask, a)
}

fn ybar_slb_masked(y: &[f64], active: &[bool], a: &[f64]) -> Vec<f64> {
    let mut ay = 0.0;
    let mut aa = 0.0;
    for i in 0..y.len() {
        if !active[i] {
            ay += a[i] * y[i];
            aa += a[i] * a[i];
        }
    }
    let t_diff = if aa > 0.0 { ay / aa } else { 0.0 };
    y.iter()
        .zip(active)
        .zip(a)
        .map(|((yi, act), ai)| if *act { 0.0 } else { yi - t_diff * ai })
        .collect()
}

fn active_mask(
    rule: ActiveSetRule,
    s: &[f64],
    x_new: &[f64],
    bounds: Option<&BoxConstraint>,
) -> Vec<bool> {
    match (rule, bounds) {
        (ActiveSetRule::ZeroStep, _) | (ActiveSetRule::AtBound, None) => {
            s.iter().map(|si| *si == 0.0).collect()
        }
        (ActiveSetRule::AtBound, Some(b)) => s
            .iter()
            .enumerate()
            .map(|(i, si)| *si == 0.0 && (x_new[i] == b.lower[i] || x_new[i] == b.upper[i]))
            .collect(),
    }
}

/// Projected gradient method: directions along the projection arc, GLL
/// backtracking on lambda in (0, 1], modified BB pairs from the deflated
/// gradient differences, and the adaptive long/short switch with alpha_new.
pub fn solve_projected<O: Objective + ?Sized>(
    f: &O,
    c: &ConstraintSet,
    x0: &[f64],
    cfg: &SolverConfig,
) -> Result<SolveReport, SolverError> {
    solve_projected_observed(f, c, x0, cfg, None)
}

pub fn solve_projected_observed<O: Objective + ?Sized>(
    f: &O,
    c: &ConstraintSet,
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

    let mut x = c.project(x0)?;
    let mut g = vec![0.0; n];
    f.gradient(&x, &mut g);
    check_finite(&g, "initial gradient")?;
    let mut fval = f.value(&x);
    let mut nfe = 1usize;
    let mut residual = stationarity_residual(&x, &g, c)?;

    let mut grad_norms = vec![residual];
    let mut stepsizes = Vec::new();
    let mut iterations = 0usize;
    let mut termination = Termination::MaxIter;

    if residual <= cfg.eps {
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

    // first trial stepsize: the unconstrained rule with the projection
    // residual standing in for the gradient norm
    let mut alpha = {
        let raw = if x.iter().any(|&v| v != 0.0) {
            norm_inf(&x) / residual
        } else {
            1.0 / residual
        };
        clamp(raw, cfg.alpha_min, cfg.alpha_max)
    };
    let mut tau = TauController::new(cfg.tau1, cfg.gamma);
    let mut gll = GLLMemory::new(cfg.m);
    gll.push(fval);
    let mut window: Option<BBPair> = None;
    let mut step_norm = f64::INFINITY;
    let mut stalled = 0usize;

    for k in 1..=cfg.max_iter {
        let converged = match cfg.stop_rule {
            StopRule::Residual => residual <= cfg.eps,
            StopRule::StepNorm => step_norm <= cfg.eps,
        };
        if converged {
            termination = Termination::Converged;
            break;
        }

        let shifted: Vec<f64> = x.iter().zip(&g).map(|(xi, gi)| xi - alpha * gi).collect();
        let p = c.project(&shifted)?;
        let d = sub(&p, &x);
        if norm_inf(&d) == 0.0 {
            // fixed point of the projection arc: stationary
            termination = Termination::Converged;
            break;
        }
        let gd = dot(&g, &d);
        if gd >= 0.0 {
            // The projection arc guarantees g'd <= -||d||^2/alpha exactly, so
            // a nonnegative value means the predicted decrease sits below the
            // rounding floor of g'd at this alpha. Retry once along the
            // unit-stepsize arc (the one the stopping residual measures);
            // if that also yields no computable descent, x is stationary to
            // working precision.
            if alpha != 1.0 {
                alpha = 1.0;
                continue;
            }
            termination = Termination::Converged;
            break;
        }
        let f_r = gll.reference();
        let (lambda, f_new, evals) =
            backtrack(|q| f.value(q), &x, &d, 1.0, f_r, cfg.sigma, cfg.delta, gd)?;
        nfe += evals;
        // lambda = 1 lands exactly on the projected point
        let x_new: Vec<f64> = if lambda == 1.0 {
            p
        } else {
            x.iter().zip(&d).map(|(xi, di)| xi + lambda * di).collect()
        };
        let mut g_new = vec![0.0; n];
        f.gradient(&x_new, &mut g_new);
        check_finite(&g_new, "gradient")?;

        let s = sub(&x_new, &x);
        if norm_inf(&s) <= 1e-14 * (1.0 + norm_inf(&x)) {
            // a step below working precision; several in a row mean the
            // method is cycling on rounding noise and cannot move further
            stalled += 1;
            if stalled >= 5 {
                if residual <= cfg.eps || cfg.stop_rule == StopRule::StepNorm {
                    termination = Termination::Converged;
                }
                iterations = k;
                break;
            }
        } else {
            stalled = 0;
        }
        let y = sub(&g_new, &g);
        let ybar = match c {
            ConstraintSet::Free => y.clone(),
            ConstraintSet::Box(b) => {
                let mask = active_mask(cfg.active_set_rule, &s, &x_new, Some(b));
                y.iter()
                    .zip(&mask)
                    .map(|(yi, act)| if *act { 0.0 } else { *yi })
                    .collect()
            }
            ConstraintSet::Slb(slb) => {
                let mask = active_mask(cfg.active_set_rule, &s, &x_new, Some(&slb.bounds));
                ybar_slb_masked(&y, &mask, &slb.a)
            }
        };
        let sy = dot(&s, &ybar);

        let alpha_next = if sy > 0.0 {
            let new_pair = BBPair {
                bb1: dot(&s, &s) / sy,
                bb2: sy / dot(&ybar, &ybar),
            };
            let chosen = match window {
                Some(cur) if cur.bb2 / cur.bb1 < tau.tau => {
                    let state = BBState {
                        prev: cur,
                        curr: new_pair,
                    };
                    let mut a_next = cur.bb2.min(new_pair.bb2);
                    if let Some(an) = alpha_new(&state) {
                        if an > 0.0 {
                            a_next = a_next.min(an);
                        }
                    }
                    tau = tau.shrink();
                    a_next
                }
                _ => {
                    tau = tau.grow();
                    new_pair.bb1
                }
            };
            window = Some(new_pair);
            chosen
        } else {
            window = None;
            // safeguard from the pre-step residual and iterate
            (1.0 / residual).min(norm_inf(&x) / residual)
        };
        alpha = clamp(alpha_next, cfg.alpha_min, cfg.alpha_max);

        step_norm = norm2(&s);
        x = x_new;
        g = g_new;
        fval = f_new;
        gll.push(fval);
        residual = stationarity_residual(&x, &g, c)?;
        iterations = k;
        grad_norms.push(residual);
        stepsizes.push(lambda);
        if let Some(obs) = observer.as_deref_mut() {
            obs(k, lambda, &x);
        }
    }
    if termination == Termination::MaxIter {
        let converged = match cfg.stop_rule {
            StopRule::Residual => residual <= cfg.eps,
            StopRule::StepNorm => step_norm <= cfg.eps,
        };
        if converged {
            termination = Termination::Converged;
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

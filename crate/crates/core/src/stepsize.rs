//! Stepsize formulas: the long and short Barzilai-Borwein choices, the exact
//! steepest-descent and Dai-Yuan stepsizes, the quadratic-termination
//! stepsize `alpha_new`, and the adaptive long/short selector with a
//! dynamically adjusted threshold.
//!
//! `alpha_new` is the smaller root of a quadratic whose coefficient ratios
//! are built from the BB stepsizes of two consecutive iterations. On any
//! 2-dimensional strictly convex quadratic, a BB run that takes this value
//! once reaches an exact minimizer within a handful of steps.

use crate::error::SolverError;
use crate::linops::{dot, LinearOperator};

/// Relative tolerance used to decide that two BB1 values coincide and for
/// clamping a slightly negative discriminant to zero.
const EQ_TOL: f64 = 1e-14;

/// Long/short BB stepsizes from one pair of difference vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBPair {
    pub bb1: f64,
    pub bb2: f64,
}

impl BBPair {
    /// Builds the pair from step and gradient differences; requires s'y > 0
    /// so that both values are positive and bb2 <= bb1.
    pub fn from_differences(s: &[f64], y: &[f64]) -> Result<Self, SolverError> {
        let sy = dot(s, y);
        if sy <= 0.0 {
            return Err(SolverError::UndefinedStepsize(
                "s'y <= 0: BB pair not defined",
            ));
        }
        Ok(BBPair {
            bb1: dot(s, s) / sy,
            bb2: sy / dot(y, y),
        })
    }
}

/// BB stepsizes of two consecutive iterations: `prev` at k-1 and `curr` at k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBState {
    pub prev: BBPair,
    pub curr: BBPair,
}

/// Long BB stepsize (s's)/(s'y). May be negative for nonconvex objectives;
/// errors only on an exactly zero denominator.
pub fn bb1(s: &[f64], y: &[f64]) -> Result<f64, SolverError> {
    let sy = dot(s, y);
    if sy == 0.0 {
        return Err(SolverError::UndefinedStepsize("s'y = 0 in bb1"));
    }
    Ok(dot(s, s) / sy)
}

/// Short BB stepsize (s'y)/(y'y). Errors when y = 0.
pub fn bb2(s: &[f64], y: &[f64]) -> Result<f64, SolverError> {
    let yy = dot(y, y);
    if yy == 0.0 {
        return Err(SolverError::UndefinedStepsize("y = 0 in bb2"));
    }
    Ok(dot(s, y) / yy)
}

/// Exact line-search stepsize (g'g)/(g'Ag) for a quadratic with Hessian A.
pub fn sd_exact(g: &[f64], a: &LinearOperator) -> Result<f64, SolverError> {
    let ag = a.matvec(g)?;
    let gag = dot(g, &ag);
    if gag <= 0.0 {
        return Err(SolverError::NotPositiveDefinite(gag));
    }
    Ok(dot(g, g) / gag)
}

/// The Dai-Yuan stepsize from two consecutive exact SD stepsizes and
/// gradient norms. All inputs must be positive.
pub fn dy_stepsize(
    sd_prev: f64,
    sd_curr: f64,
    g_prev_norm: f64,
    g_curr_norm: f64,
) -> Result<f64, SolverError> {
    if sd_prev <= 0.0 || sd_curr <= 0.0 || g_prev_norm <= 0.0 || g_curr_norm < 0.0 {
        return Err(SolverError::UndefinedStepsize(
            "dy_stepsize requires positive inputs",
        ));
    }
    let ip = 1.0 / sd_prev;
    let ic = 1.0 / sd_curr;
    let ratio = g_curr_norm / (sd_prev * g_prev_norm);
    let radical = ((ip - ic) * (ip - ic) + 4.0 * ratio * ratio).sqrt();
    Ok(2.0 / (ip + ic + radical))
}

/// Coefficient ratios r1 = phi1/phi3 and r2 = phi2/phi3 of the quadratic
/// r1 a^2 - r2 a + 1 = 0 whose smaller root is `alpha_new`. `None` when the
/// two BB1 values coincide (to relative tolerance) or a bb2 vanishes.
pub fn alpha_new_ratios(state: &BBState) -> Option<(f64, f64)> {
    let BBPair { bb1: b1p, bb2: b2p } = state.prev;
    let BBPair { bb1: b1c, bb2: b2c } = state.curr;
    if (b1p - b1c).abs() <= EQ_TOL * b1p.abs().max(b1c.abs()) {
        return None;
    }
    if b2p == 0.0 || b2c == 0.0 {
        return None; // phi3 = 0: quadratic degenerates
    }
    let den = b2p * b2c * (b1p - b1c);
    let r1 = (b2p - b2c) / den;
    let r2 = (b1p * b2p - b1c * b2c) / den;
    if r1.is_finite() && r2.is_finite() {
        Some((r1, r2))
    } else {
        None
    }
}

/// The quadratic-termination stepsize: 2 / (r2 + sqrt(r2^2 - 4 r1)).
///
/// Returns `None` when the underlying quadratic has no usable positive root:
/// coinciding BB1 values, a negative discriminant (possible only with inputs
/// violating the construction), or a nonpositive denominator.
pub fn alpha_new(state: &BBState) -> Option<f64> {
    let (r1, r2) = alpha_new_ratios(state)?;
    let mut disc = r2 * r2 - 4.0 * r1;
    let scale = EQ_TOL * (r2 * r2).max(1.0);
    if disc < -scale {
        return None;
    }
    if disc < 0.0 {
        disc = 0.0;
    }
    let denom = r2 + disc.sqrt();
    if !(denom > 0.0) || !denom.is_finite() {
        return None;
    }
    let alpha = 2.0 / denom;
    alpha.is_finite().then_some(alpha)
}

/// Dynamic threshold for the long/short switch: divided by `gamma` whenever
/// the short branch fires, multiplied by `gamma` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauController {
    pub tau: f64,
    pub gamma: f64,
}

impl TauController {
    pub fn new(tau: f64, gamma: f64) -> Self {
        assert!(tau > 0.0 && gamma > 1.0);
        TauController { tau, gamma }
    }

    /// Threshold after a short step.
    pub fn shrink(self) -> Self {
        TauController {
            tau: self.tau / self.gamma,
            ..self
        }
    }

    /// Threshold after a long step.
    pub fn grow(self) -> Self {
        TauController {
            tau: self.tau * self.gamma,
            ..self
        }
    }
}

/// Adaptive rule for quadratics: the long stepsize bb1 when bb2/bb1 of the
/// current pair is at least `tau`, otherwise the shortest of the two recent
/// bb2 values and `alpha_new_val` (dropped when undefined or nonpositive).
/// Returns the chosen stepsize and the updated threshold.
pub fn adaptive_select(
    state: &BBState,
    alpha_new_val: Option<f64>,
    tau: TauController,
) -> (f64, TauController) {
    if state.curr.bb2 / state.curr.bb1 < tau.tau {
        let mut alpha = state.prev.bb2.min(state.curr.bb2);
        if let Some(a) = alpha_new_val {
            if a > 0.0 {
                alpha = alpha.min(a);
            }
        }
        (alpha, tau.shrink())
    } else {
        (state.curr.bb1, tau.grow())
    }
}

/// Clamp to [lo, hi]; requires 0 < lo <= hi.
pub fn clamp(alpha: f64, lo: f64, hi: f64) -> f64 {
    debug_assert!(0.0 < lo && lo <= hi);
    alpha.max(lo).min(hi)
}

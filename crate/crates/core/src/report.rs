//! Solve reports and per-iteration tracing.

use serde::{Deserialize, Serialize};

/// Why a solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Converged,
    MaxIter,
}

/// Outcome of a gradient-solver run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Objective evaluations, line-search trials included.
    pub nfe: usize,
    /// Stationarity measure per iteration, starting at the initial point.
    pub grad_norms: Vec<f64>,
    /// Stepsize used at each iteration.
    pub stepsizes: Vec<f64>,
    pub f_final: f64,
    pub termination: Termination,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

/// Which branch chose the stepsize of an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Exact steepest descent (first iteration on quadratics).
    SteepestDescent,
    /// Plain long BB stepsize outside the adaptive switch.
    Fixed,
    /// Long branch of the adaptive switch.
    Long,
    /// Short branch of the adaptive switch.
    Short,
    /// Safeguard used when the BB update gate fails.
    Fallback,
}

/// Per-iteration trace row: iteration index, stationarity measure, stepsize
/// taken and the branch that produced it.
pub trait TraceSink {
    fn record(&mut self, k: usize, grad_norm: f64, alpha: f64, branch: Branch);
}

/// Collects trace rows into vectors.
#[derive(Debug, Default)]
pub struct VecTrace {
    pub rows: Vec<(usize, f64, f64, Branch)>,
}

impl TraceSink for VecTrace {
    fn record(&mut self, k: usize, grad_norm: f64, alpha: f64, branch: Branch) {
        self.rows.push((k, grad_norm, alpha, branch));
    }
}

/// Observer invoked after every accepted step with the iteration index, the
/// accepted line-search stepsize and the new iterate.
pub type IterObserver<'a> = &'a mut dyn FnMut(usize, f64, &[f64]);

//! Solver tunables with the defaults used throughout the experiments.

use serde::{Deserialize, Serialize};

/// Stopping rule for the projected solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopRule {
    /// Stop on the projection residual ||P(x - g) - x||_inf <= eps.
    Residual,
    /// Stop on the step norm ||x_k - x_{k-1}||_2 <= eps.
    StepNorm,
}

/// Active-set estimate used to deflate gradient differences under SLB
/// constraints. The zero-step rule is the default; the bound rule
/// additionally requires the frozen component to sit at a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActiveSetRule {
    ZeroStep,
    AtBound,
}

/// All solver tunables. `Default` carries the unconstrained settings; use
/// [`SolverConfig::slb`] for singly-linearly-box-constrained runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Initial threshold of the long/short switch.
    pub tau1: f64,
    /// Multiplicative update factor for the threshold (> 1).
    pub gamma: f64,
    /// Gradient tolerance; the norm it applies to depends on the solver.
    pub eps: f64,
    /// Sufficient-decrease constant of the nonmonotone acceptance test.
    pub sigma: f64,
    /// Backtracking contraction factor.
    pub delta: f64,
    /// Nonmonotone window length / reference patience.
    pub m: usize,
    pub max_iter: usize,
    pub seed: u64,
    pub stop_rule: StopRule,
    pub active_set_rule: ActiveSetRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            alpha_min: 1e-10,
            alpha_max: 1e6,
            tau1: 0.2,
            gamma: 1.02,
            eps: 1e-6,
            sigma: 1e-4,
            delta: 0.5,
            m: 10,
            max_iter: 20_000,
            seed: 0,
            stop_rule: StopRule::Residual,
            active_set_rule: ActiveSetRule::ZeroStep,
        }
    }
}

impl SolverConfig {
    /// Settings used for SLB problems: larger initial threshold, faster
    /// threshold adaptation, step-norm stopping.
    pub fn slb() -> Self {
        SolverConfig {
            tau1: 0.5,
            gamma: 1.3,
            stop_rule: StopRule::StepNorm,
            ..SolverConfig::default()
        }
    }

    /// Settings used for eigenpair computation: the Frobenius-norm gradient
    /// tolerance defaults to 1e-3.
    pub fn eig() -> Self {
        SolverConfig {
            eps: 1e-3,
            ..SolverConfig::default()
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn validate(&self) -> Result<(), crate::error::SolverError> {
        let ok = self.alpha_min > 0.0
            && self.alpha_min <= self.alpha_max
            && self.sigma > 0.0
            && self.sigma < 1.0
            && self.delta > 0.0
            && self.delta < 1.0
            && self.m >= 1
            && self.tau1 > 0.0
            && self.gamma > 1.0
            && self.eps > 0.0;
        if ok {
            Ok(())
        } else {
            Err(crate::error::SolverError::InvalidArgument(
                "solver config violates 0 < alpha_min <= alpha_max, sigma/delta in (0,1), M >= 1, tau1 > 0, gamma > 1, eps > 0".into(),
            ))
        }
    }
}

//! Nonmonotone acceptance tests and the backtracking loop: the GLL window
//! reference and the Dai-Fletcher best/candidate reference tracking.

use crate::error::SolverError;
use std::collections::VecDeque;

/// Hard cap on halvings before the line search reports failure; at that point
/// the trial step has shrunk by 2^-60 and the inputs are inconsistent.
pub const MAX_HALVINGS: usize = 60;

/// Ring buffer of the most recent objective values. The reference value is
/// the window maximum and the window includes the current iterate.
#[derive(Debug, Clone)]
pub struct GLLMemory {
    window: VecDeque<f64>,
    m: usize,
}

impl GLLMemory {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1);
        GLLMemory {
            window: VecDeque::with_capacity(m),
            m,
        }
    }

    pub fn push(&mut self, f: f64) {
        if self.window.len() == self.m {
            self.window.pop_front();
        }
        self.window.push_back(f);
    }

    /// Maximum objective value over the window.
    pub fn reference(&self) -> f64 {
        self.window.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    pub fn len(&self) -> usize {
        self.window.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window.is_empty()
    }
}

/// GLL acceptance: f_trial <= f_r + sigma * lambda * g'd.
pub fn gll_accepts(f_trial: f64, f_r: f64, lambda: f64, gd: f64, sigma: f64) -> bool {
    f_trial <= f_r + sigma * lambda * gd
}

/// Backtracks lambda = alpha0 * delta^j for the smallest j >= 0 accepted by
/// the GLL test against `f_r`. Returns (lambda, f at the accepted point,
/// number of objective evaluations).
pub fn backtrack<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x: &[f64],
    d: &[f64],
    alpha0: f64,
    f_r: f64,
    sigma: f64,
    delta: f64,
    gd: f64,
) -> Result<(f64, f64, usize), SolverError> {
    assert!(delta > 0.0 && delta < 1.0);
    if gd >= 0.0 {
        return Err(SolverError::NotDescent(gd));
    }
    let mut lambda = alpha0;
    let mut trial = vec![0.0; x.len()];
    for j in 0..=MAX_HALVINGS {
        for ((t, xi), di) in trial.iter_mut().zip(x).zip(d) {
            *t = xi + lambda * di;
        }
        let f_trial = f(&trial);
        if gll_accepts(f_trial, f_r, lambda, gd, sigma) {
            return Ok((lambda, f_trial, j + 1));
        }
        lambda *= delta;
    }
    Err(SolverError::LineSearchFailure(MAX_HALVINGS))
}

/// Dai-Fletcher reference tracking: `f_r` stays put while the method keeps
/// improving on `f_best` within `m_max` iterations; once the patience runs
/// out, `f_r` drops to the worst value seen since the last improvement.
#[derive(Debug, Clone, Copy)]
pub struct DFReference {
    pub f_best: f64,
    pub f_c: f64,
    pub f_r: f64,
    pub m: usize,
    pub m_max: usize,
}

impl DFReference {
    pub fn new(f1: f64, m_max: usize) -> Self {
        assert!(m_max >= 1);
        DFReference {
            f_best: f1,
            f_c: f1,
            f_r: f1,
            m: 0,
            m_max,
        }
    }
}

/// One update of the Dai-Fletcher reference state with the current objective.
pub fn df_update(mut r: DFReference, f_curr: f64) -> DFReference {
    if f_curr < r.f_best {
        r.f_best = f_curr;
        r.f_c = f_curr;
        r.m = 0;
    } else {
        r.f_c = r.f_c.max(f_curr);
        r.m += 1;
        if r.m == r.m_max {
            r.f_r = r.f_c;
            r.f_c = f_curr;
            r.m = 0;
        }
    }
    r
}

//! Gradient methods built around Barzilai-Borwein stepsizes and a short
//! stepsize with two-dimensional quadratic termination.
//!
//! The crate provides:
//!
//! - [`linops`]: vector kernels, symmetric linear operators (dense, diagonal,
//!   sparse, 3D Laplacian stencil) and small dense reference routines,
//! - [`stepsize`]: BB1/BB2, exact steepest-descent and Dai-Yuan stepsizes,
//!   the quadratic-termination stepsize [`stepsize::alpha_new`] and the
//!   adaptive long/short selector with a dynamic threshold,
//! - [`linesearch`]: GLL nonmonotone acceptance with backtracking and
//!   Dai-Fletcher reference-value tracking,
//! - [`quadsolver`]: the adaptive gradient method for strictly convex
//!   quadratics plus BB1 and fixed-threshold ABB baselines,
//! - [`uncsolver`]: nonmonotone gradient descent for general smooth
//!   unconstrained problems,
//! - [`eigsolver`]: extreme eigenpairs of an SPD operator through an
//!   unconstrained quartic penalty model,
//! - [`projgrad`]: projected gradient descent for box and singly linearly
//!   box-constrained (SLB) problems,
//! - [`problems`]: seeded generators for the test-problem families, a
//!   classic test-function registry, LIBSVM ingestion and the SVM dual.
//!
//! With the default `parallel` feature the dense, sparse and stencil
//! operator products and the SVM Gram matrix assembly run on rayon;
//! without it everything falls back to sequential loops. Results are
//! deterministic either way.

pub mod config;
pub mod eigsolver;
pub mod error;
pub mod linesearch;
pub mod linops;
pub mod problems;
pub mod projgrad;
pub mod quadsolver;
pub mod report;
pub mod stepsize;
pub mod uncsolver;

pub use config::SolverConfig;
pub use error::SolverError;
pub use linops::{LinearOperator, Mat};
pub use report::{SolveReport, Termination};

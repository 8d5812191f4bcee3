//! LIBSVM-format ingestion, a synthetic two-cloud dataset generator, and the
//! SVM dual quadratic program with the Gaussian kernel.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::SolverError;
use crate::linops::LinearOperator;
use crate::projgrad::{BoxConstraint, ConstraintSet, SLBConstraint};
use crate::quadsolver::QuadraticProblem;

/// One training example: sparse feature vector and a +/-1 label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Example {
    /// (0-based feature index, value), sorted by index.
    pub features: Vec<(usize, f64)>,
    pub label: i8,
}

/// A labeled dataset with feature dimension `m`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SVMDataset {
    pub examples: Vec<Example>,
    pub m: usize,
}

impl SVMDataset {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    /// Keeps the first `k` examples of each class, preserving order.
    pub fn subsample(&self, k: usize) -> SVMDataset {
        let mut pos = 0usize;
        let mut neg = 0usize;
        let examples: Vec<Example> = self
            .examples
            .iter()
            .filter(|e| {
                if e.label > 0 {
                    pos += 1;
                    pos <= k / 2 + k % 2
                } else {
                    neg += 1;
                    neg <= k / 2
                }
            })
            .cloned()
            .collect();
        SVMDataset {
            examples,
            m: self.m,
        }
    }
}

/// Parses the LIBSVM text format: `label idx:val idx:val ...` per line with
/// 1-based indices; missing indices are zeros. Labels must be +/-1.
pub fn load_libsvm<P: AsRef<Path>>(path: P) -> Result<SVMDataset, SolverError> {
    let file = std::fs::File::open(path)?;
    parse_libsvm(BufReader::new(file))
}

fn parse_libsvm<R: BufRead>(reader: R) -> Result<SVMDataset, SolverError> {
    let mut examples = Vec::new();
    let mut m = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let label_tok = parts.next().unwrap();
        let label = match label_tok.parse::<f64>() {
            Ok(v) if v == 1.0 || v == -1.0 => v as i8,
            _ => {
                return Err(SolverError::Parse {
                    line: lineno + 1,
                    msg: format!("label must be +1 or -1, got '{label_tok}'"),
                })
            }
        };
        let mut features = Vec::new();
        for tok in parts {
            let (idx_s, val_s) = tok.split_once(':').ok_or_else(|| SolverError::Parse {
                line: lineno + 1,
                msg: format!("expected idx:val, got '{tok}'"),
            })?;
            let idx: usize = idx_s.parse().map_err(|e| SolverError::Parse {
                line: lineno + 1,
                msg: format!("bad index '{idx_s}': {e}"),
            })?;
            let val: f64 = val_s.parse().map_err(|e| SolverError::Parse {
                line: lineno + 1,
                msg: format!("bad value '{val_s}': {e}"),
            })?;
            if idx == 0 {
                return Err(SolverError::Parse {
                    line: lineno + 1,
                    msg: "feature indices are 1-based".into(),
                });
            }
            m = m.max(idx);
            features.push((idx - 1, val));
        }
        features.sort_by_key(|&(i, _)| i);
        examples.push(Example { features, label });
    }
    Ok(SVMDataset { examples, m })
}

/// Writes the dataset in LIBSVM text format; values print in shortest
/// round-trip form so write/read is lossless.
pub fn write_libsvm<P: AsRef<Path>>(data: &SVMDataset, path: P) -> Result<(), SolverError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    for e in &data.examples {
        write!(out, "{}", if e.label > 0 { "+1" } else { "-1" })?;
        for &(idx, val) in &e.features {
            write!(out, " {}:{}", idx + 1, val)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Two Gaussian clouds with opposite labels, centered at +/- mu with unit
/// covariance. Substitutes for the real binary-classification downloads.
pub fn gen_gaussian_clouds(n: usize, m: usize, seed: u64) -> SVMDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift = 1.5 / (m as f64).sqrt();
    let mut examples = Vec::with_capacity(n);
    for i in 0..n {
        let label: i8 = if i % 2 == 0 { 1 } else { -1 };
        let center = shift * label as f64;
        let features: Vec<(usize, f64)> = (0..m)
            .map(|j| {
                let z: f64 = rng.sample(rand_distr::StandardNormal);
                (j, center + z)
            })
            .collect();
        examples.push(Example { features, label });
    }
    SVMDataset { examples, m }
}

fn sparse_sq_dist(a: &[(usize, f64)], b: &[(usize, f64)]) -> f64 {
    let mut acc = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (ia, va) = a[i];
        let (ib, vb) = b[j];
        match ia.cmp(&ib) {
            std::cmp::Ordering::Less => {
                acc += va * va;
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                acc += vb * vb;
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let d = va - vb;
                acc += d * d;
                i += 1;
                j += 1;
            }
        }
    }
    for &(_, v) in &a[i..] {
        acc += v * v;
    }
    for &(_, v) in &b[j..] {
        acc += v * v;
    }
    acc
}

/// Gaussian kernel K(z_i, z_j) = exp(-||z_i - z_j||^2 / (2 sigma^2)).
pub fn gaussian_kernel(a: &[(usize, f64)], b: &[(usize, f64)], sigma: f64) -> f64 {
    (-sparse_sq_dist(a, b) / (2.0 * sigma * sigma)).exp()
}

/// Builds the SVM dual: minimize 1/2 x'Gx - e'x subject to 0 <= x <= C and
/// w'x = 0, with G_ij = w_i w_j K(z_i, z_j). The start is the null vector.
pub fn build_svm_dual(
    data: &SVMDataset,
    c: f64,
    sigma_kernel: f64,
) -> Result<(QuadraticProblem, ConstraintSet), SolverError> {
    if !(c > 0.0) || !(sigma_kernel > 0.0) {
        return Err(SolverError::InvalidArgument(
            "svm dual needs C > 0 and sigma > 0".into(),
        ));
    }
    let n = data.len();
    let w: Vec<f64> = data.examples.iter().map(|e| e.label as f64).collect();
    let mut g = vec![0.0; n * n];
    let fill_row = |i: usize, row: &mut [f64]| {
        for j in 0..n {
            row[j] = w[i]
                * w[j]
                * gaussian_kernel(
                    &data.examples[i].features,
                    &data.examples[j].features,
                    sigma_kernel,
                );
        }
    };
    #[cfg(feature = "parallel")]
    g.par_chunks_mut(n)
        .enumerate()
        .for_each(|(i, row)| fill_row(i, row));
    #[cfg(not(feature = "parallel"))]
    for (i, row) in g.chunks_mut(n).enumerate() {
        fill_row(i, row);
    }
    // exact symmetry: K is symmetric but enforce bitwise equality
    for i in 0..n {
        for j in 0..i {
            g[i * n + j] = g[j * n + i];
        }
    }
    let op = LinearOperator::dense(n, g)?;
    let problem = QuadraticProblem::new(op, vec![1.0; n], vec![0.0; n])?;
    let bounds = BoxConstraint::new(vec![0.0; n], vec![c; n])?;
    let constraint = ConstraintSet::Slb(SLBConstraint::new(bounds, w, 0.0)?);
    Ok((problem, constraint))
}

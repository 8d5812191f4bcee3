//! Vector kernels, the symmetric linear operator abstraction and the dense
//! matrix-variable type shared by every solver.
//!
//! All arithmetic is 64-bit. Operators are read-only after construction and
//! safe to share across threads. With the `parallel` feature the operator
//! products split by output row (or column for block products), which keeps
//! every floating-point sum in a fixed order and the results bitwise
//! deterministic.

pub mod dense;

use std::io::{BufRead, BufReader};
use std::path::Path;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use serde::{Deserialize, Serialize};

use crate::error::SolverError;

// ---------------------------------------------------------------------------
// Vector kernels
// ---------------------------------------------------------------------------

/// Dot product. Panics in debug builds on length mismatch.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// Euclidean norm.
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Infinity norm; 0 for the empty slice.
pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// y += alpha * x
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Elementwise difference a - b.
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Returns an error naming `ctx` if any entry is NaN or infinite.
pub fn check_finite(a: &[f64], ctx: &'static str) -> Result<(), SolverError> {
    if a.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(SolverError::NonFinite(ctx))
    }
}

fn check_dim(expected: usize, got: usize) -> Result<(), SolverError> {
    if expected == got {
        Ok(())
    } else {
        Err(SolverError::DimensionMismatch { expected, got })
    }
}

// ---------------------------------------------------------------------------
// Sparse storage
// ---------------------------------------------------------------------------

/// Compressed sparse rows with both symmetric halves stored.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Csr {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<f64>,
}

impl Csr {
    /// Builds symmetric CSR from (row, col, value) triplets holding one half;
    /// the mirrored entries are added automatically and duplicates are summed.
    pub fn from_sym_triplets(
        n: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, SolverError> {
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(SolverError::InvalidArgument(format!(
                    "triplet index ({i}, {j}) out of range for dimension {n}"
                )));
            }
            rows[i].push((j, v));
            if i != j {
                rows[j].push((i, v));
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in &mut rows {
            row.sort_by_key(|&(j, _)| j);
            let mut last: Option<usize> = None;
            for &(j, v) in row.iter() {
                if last == Some(j) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    col_idx.push(j);
                    vals.push(v);
                    last = Some(j);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Csr {
            n,
            row_ptr,
            col_idx,
            vals,
        })
    }

    fn row_apply(&self, i: usize, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            acc += self.vals[k] * x[self.col_idx[k]];
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// LinearOperator
// ---------------------------------------------------------------------------

/// Symmetric linear operator with interchangeable backends.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum LinearOperator {
    /// Dense symmetric matrix, row-major, n*n entries.
    Dense { n: usize, data: Vec<f64> },
    /// Diagonal matrix.
    Diagonal { d: Vec<f64> },
    /// Sparse symmetric matrix.
    Sparse(Csr),
    /// 7-point-stencil negative Laplacian on an nx*ny*nz grid with Dirichlet
    /// boundaries and unit spacing. Axes of size 1 contribute nothing, so
    /// (n,1,1) is the 1D tridiagonal stencil.
    Laplacian3d { nx: usize, ny: usize, nz: usize },
}

impl LinearOperator {
    /// Dense symmetric operator from row-major entries.
    pub fn dense(n: usize, data: Vec<f64>) -> Result<Self, SolverError> {
        check_dim(n * n, data.len())?;
        Ok(LinearOperator::Dense { n, data })
    }

    pub fn diagonal(d: Vec<f64>) -> Self {
        LinearOperator::Diagonal { d }
    }

    pub fn identity(n: usize) -> Self {
        LinearOperator::Diagonal { d: vec![1.0; n] }
    }

    /// 3D negative Laplacian stencil operator. Grid sizes must be positive.
    pub fn laplacian3d(nx: usize, ny: usize, nz: usize) -> Result<Self, SolverError> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(SolverError::InvalidArgument(format!(
                "laplacian3d grid sizes must be positive, got ({nx}, {ny}, {nz})"
            )));
        }
        Ok(LinearOperator::Laplacian3d { nx, ny, nz })
    }

    /// Sparse symmetric operator from 0-based triplets of one half.
    pub fn sparse_from_triplets(
        n: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, SolverError> {
        Ok(LinearOperator::Sparse(Csr::from_sym_triplets(n, triplets)?))
    }

    /// Loads a sparse symmetric operator from a coordinate-format text file:
    /// one `row col value` triple per line, 1-based indices, one symmetric
    /// half stored. Blank lines and lines starting with `%` or `#` are
    /// skipped. The dimension is the largest index seen.
    pub fn from_coo_file<P: AsRef<Path>>(path: P) -> Result<Self, SolverError> {
        let file = std::fs::File::open(path)?;
        let reader = BufReader::new(file);
        let mut triplets = Vec::new();
        let mut n = 0usize;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('%') || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.split_whitespace();
            let parse = |tok: Option<&str>, what: &str| -> Result<f64, SolverError> {
                tok.ok_or_else(|| SolverError::Parse {
                    line: lineno + 1,
                    msg: format!("missing {what}"),
                })?
                .parse::<f64>()
                .map_err(|e| SolverError::Parse {
                    line: lineno + 1,
                    msg: format!("bad {what}: {e}"),
                })
            };
            let i = parse(parts.next(), "row")? as i64;
            let j = parse(parts.next(), "col")? as i64;
            let v = parse(parts.next(), "value")?;
            if i < 1 || j < 1 {
                return Err(SolverError::Parse {
                    line: lineno + 1,
                    msg: "indices are 1-based".into(),
                });
            }
            let (i, j) = (i as usize - 1, j as usize - 1);
            n = n.max(i + 1).max(j + 1);
            triplets.push((i, j, v));
        }
        Self::sparse_from_triplets(n, &triplets)
    }

    /// Operator dimension.
    pub fn dim(&self) -> usize {
        match self {
            LinearOperator::Dense { n, .. } => *n,
            LinearOperator::Diagonal { d } => d.len(),
            LinearOperator::Sparse(csr) => csr.n,
            LinearOperator::Laplacian3d { nx, ny, nz } => nx * ny * nz,
        }
    }

    /// y = A x.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, SolverError> {
        check_dim(self.dim(), x.len())?;
        let mut y = vec![0.0; x.len()];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    /// y = A x without allocating; dimensions must already agree.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(self.dim(), x.len());
        assert_eq!(x.len(), y.len());
        match self {
            LinearOperator::Dense { n, data } => dense_matvec(*n, data, x, y),
            LinearOperator::Diagonal { d } => {
                for ((yi, di), xi) in y.iter_mut().zip(d).zip(x) {
                    *yi = di * xi;
                }
            }
            LinearOperator::Sparse(csr) => sparse_matvec(csr, x, y),
            LinearOperator::Laplacian3d { nx, ny, nz } => stencil_matvec(*nx, *ny, *nz, x, y),
        }
    }

    /// Y = A X, column by column.
    pub fn mat_matvec(&self, x: &Mat) -> Result<Mat, SolverError> {
        check_dim(self.dim(), x.rows())?;
        let mut y = Mat::zeros(x.rows(), x.cols());
        self.mat_matvec_into(x, &mut y);
        Ok(y)
    }

    /// Y = A X without allocating. Columns split across threads when the
    /// block is large enough for that to pay.
    pub fn mat_matvec_into(&self, x: &Mat, y: &mut Mat) {
        assert_eq!(self.dim(), x.rows());
        assert_eq!(x.rows(), y.rows());
        assert_eq!(x.cols(), y.cols());
        #[cfg(feature = "parallel")]
        if x.cols() >= 2 && x.rows() * x.cols() >= 65_536 {
            y.columns_par_mut()
                .zip(x.columns_par())
                .for_each(|(yc, xc)| self.matvec_into(xc, yc));
            return;
        }
        for j in 0..x.cols() {
            let (xc, yc) = (x.col(j).to_vec(), y.col_mut(j));
            self.matvec_into(&xc, yc);
        }
    }

    /// Materializes the operator as a dense row-major matrix. Intended for
    /// small reference computations and tests.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n * n];
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.matvec_into(&e, &mut col);
            for i in 0..n {
                out[i * n + j] = col[i];
            }
            e[j] = 0.0;
        }
        out
    }
}

// Parallel cutovers: row-splitting a memory-bound product only pays once a
// call carries around a megaflop, so smaller operators take the plain loops
// even with the `parallel` feature on.
const PAR_DENSE_MIN_DIM: usize = 1024;
const PAR_SPARSE_MIN_DIM: usize = 8192;
const PAR_STENCIL_MIN_POINTS: usize = 262_144;

fn dense_matvec(n: usize, data: &[f64], x: &[f64], y: &mut [f64]) {
    let row = |i: usize| &data[i * n..(i + 1) * n];
    #[cfg(feature = "parallel")]
    if n >= PAR_DENSE_MIN_DIM {
        y.par_iter_mut()
            .enumerate()
            .for_each(|(i, yi)| *yi = dot(row(i), x));
        return;
    }
    for (i, yi) in y.iter_mut().enumerate() {
        *yi = dot(row(i), x);
    }
}

fn sparse_matvec(csr: &Csr, x: &[f64], y: &mut [f64]) {
    #[cfg(feature = "parallel")]
    if csr.n >= PAR_SPARSE_MIN_DIM {
        y.par_iter_mut()
            .enumerate()
            .for_each(|(i, yi)| *yi = csr.row_apply(i, x));
        return;
    }
    for (i, yi) in y.iter_mut().enumerate() {
        *yi = csr.row_apply(i, x);
    }
}

/// One output entry of the 7-point stencil; axes of size 1 are skipped.
#[inline]
fn stencil_at(nx: usize, ny: usize, nz: usize, x: &[f64], i: usize, j: usize, k: usize) -> f64 {
    let idx = |i: usize, j: usize, k: usize| i + nx * (j + ny * k);
    let mut acc = 0.0;
    let c = x[idx(i, j, k)];
    if nx > 1 {
        acc += 2.0 * c;
        if i > 0 {
            acc -= x[idx(i - 1, j, k)];
        }
        if i + 1 < nx {
            acc -= x[idx(i + 1, j, k)];
        }
    }
    if ny > 1 {
        acc += 2.0 * c;
        if j > 0 {
            acc -= x[idx(i, j - 1, k)];
        }
        if j + 1 < ny {
            acc -= x[idx(i, j + 1, k)];
        }
    }
    if nz > 1 {
        acc += 2.0 * c;
        if k > 0 {
            acc -= x[idx(i, j, k - 1)];
        }
        if k + 1 < nz {
            acc -= x[idx(i, j, k + 1)];
        }
    }
    acc
}

fn stencil_matvec(nx: usize, ny: usize, nz: usize, x: &[f64], y: &mut [f64]) {
    let plane = nx * ny;
    let slab = |k: usize, yk: &mut [f64]| {
        for j in 0..ny {
            for i in 0..nx {
                yk[i + nx * j] = stencil_at(nx, ny, nz, x, i, j, k);
            }
        }
    };
    #[cfg(feature = "parallel")]
    if nz >= 4 && plane * nz >= PAR_STENCIL_MIN_POINTS {
        y.par_chunks_mut(plane)
            .enumerate()
            .for_each(|(k, yk)| slab(k, yk));
        return;
    }
    for (k, yk) in y.chunks_mut(plane).enumerate() {
        slab(k, yk);
    }
}

/// All eigenvalues of the `laplacian3d` operator in ascending order, from the
/// closed form 2 - 2 cos(k pi / (m + 1)) summed over axes of size > 1.
pub fn laplacian3d_eigenvalues(nx: usize, ny: usize, nz: usize) -> Vec<f64> {
    let axis = |m: usize| -> Vec<f64> {
        if m <= 1 {
            vec![0.0]
        } else {
            (1..=m)
                .map(|k| 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (m as f64 + 1.0)).cos())
                .collect()
        }
    };
    let (ex, ey, ez) = (axis(nx), axis(ny), axis(nz));
    let mut out = Vec::with_capacity(nx * ny * nz);
    for a in &ex {
        for b in &ey {
            for c in &ez {
                out.push(a + b + c);
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

// ---------------------------------------------------------------------------
// Mat: dense matrix variable, column-major
// ---------------------------------------------------------------------------

/// Dense n x r matrix variable with column-major storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from column slices.
    pub fn from_columns(rows: usize, columns: &[&[f64]]) -> Self {
        let mut m = Mat::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows);
            m.col_mut(j).copy_from_slice(c);
        }
        m
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, SolverError> {
        check_dim(rows * cols, data.len())?;
        Ok(Mat { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Flat column-major view; `tr(A' B)` is the dot product of flat views.
    pub fn flat(&self) -> &[f64] {
        &self.data
    }

    pub fn flat_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[cfg(feature = "parallel")]
    fn columns_par(&self) -> rayon::slice::Chunks<'_, f64> {
        self.data.par_chunks(self.rows)
    }

    #[cfg(feature = "parallel")]
    fn columns_par_mut(&mut self) -> rayon::slice::ChunksMut<'_, f64> {
        self.data.par_chunks_mut(self.rows)
    }

    pub fn fro_norm(&self) -> f64 {
        norm2(&self.data)
    }

    /// self += alpha * other
    pub fn axpy(&mut self, alpha: f64, other: &Mat) {
        assert_eq!(self.data.len(), other.data.len());
        axpy(alpha, &other.data, &mut self.data);
    }

    /// Gram matrix X'X as a col-major cols x cols buffer.
    pub fn xtx(&self) -> Vec<f64> {
        let r = self.cols;
        let mut g = vec![0.0; r * r];
        for j in 0..r {
            for i in 0..=j {
                let v = dot(self.col(i), self.col(j));
                g[j * r + i] = v;
                g[i * r + j] = v;
            }
        }
        g
    }

    /// Product X * B where B is a col-major cols x k buffer.
    pub fn times_small(&self, b: &[f64], k: usize) -> Mat {
        assert_eq!(b.len(), self.cols * k);
        let mut out = Mat::zeros(self.rows, k);
        for j in 0..k {
            let target = j * self.rows;
            for l in 0..self.cols {
                let coeff = b[j * self.cols + l];
                if coeff != 0.0 {
                    let src = l * self.rows;
                    for i in 0..self.rows {
                        out.data[target + i] += coeff * self.data[src + i];
                    }
                }
            }
        }
        out
    }

    /// Standard-normal entries from a seeded generator.
    pub fn random_gaussian(rows: usize, cols: usize, seed: u64) -> Self {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let data = (0..rows * cols)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        Mat { rows, cols, data }
    }
}

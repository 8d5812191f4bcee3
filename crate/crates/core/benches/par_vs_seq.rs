//! Compares the crate's operator products and Gram assembly (parallel under
//! the default `parallel` feature) against plain sequential loops written
//! here. Build with `--no-default-features` to measure the crate's own
//! sequential fallback instead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bbqt::linops::{LinearOperator, Mat};
use bbqt::problems::svm::{build_svm_dual, gaussian_kernel, gen_gaussian_clouds};

fn seq_dense_matvec(n: usize, data: &[f64], x: &[f64], y: &mut [f64]) {
    for i in 0..n {
        let row = &data[i * n..(i + 1) * n];
        let mut acc = 0.0;
        for (a, b) in row.iter().zip(x) {
            acc += a * b;
        }
        y[i] = acc;
    }
}

fn seq_stencil_matvec(m: usize, x: &[f64], y: &mut [f64]) {
    let idx = |i: usize, j: usize, k: usize| i + m * (j + m * k);
    for k in 0..m {
        for j in 0..m {
            for i in 0..m {
                let mut acc = 6.0 * x[idx(i, j, k)];
                if i > 0 {
                    acc -= x[idx(i - 1, j, k)];
                }
                if i + 1 < m {
                    acc -= x[idx(i + 1, j, k)];
                }
                if j > 0 {
                    acc -= x[idx(i, j - 1, k)];
                }
                if j + 1 < m {
                    acc -= x[idx(i, j + 1, k)];
                }
                if k > 0 {
                    acc -= x[idx(i, j, k - 1)];
                }
                if k + 1 < m {
                    acc -= x[idx(i, j, k + 1)];
                }
                y[idx(i, j, k)] = acc;
            }
        }
    }
}

fn bench_dense_matvec(c: &mut Criterion) {
    let mut group = c.benchmark_group("dense_matvec");
    for &n in &[256usize, 1024] {
        let data: Vec<f64> = (0..n * n).map(|i| ((i % 17) as f64 - 8.0) / 17.0).collect();
        // symmetrize
        let mut sym = data.clone();
        for i in 0..n {
            for j in 0..i {
                sym[i * n + j] = sym[j * n + i];
            }
        }
        let a = LinearOperator::dense(n, sym.clone()).unwrap();
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut y = vec![0.0; n];
        group.bench_with_input(BenchmarkId::new("crate", n), &n, |b, _| {
            b.iter(|| a.matvec_into(&x, &mut y))
        });
        group.bench_with_input(BenchmarkId::new("seq_baseline", n), &n, |b, _| {
            b.iter(|| seq_dense_matvec(n, &sym, &x, &mut y))
        });
    }
    group.finish();
}

fn bench_stencil_matvec(c: &mut Criterion) {
    let mut group = c.benchmark_group("laplacian3d_matvec");
    for &m in &[16usize, 32] {
        let a = LinearOperator::laplacian3d(m, m, m).unwrap();
        let n = m * m * m;
        let x: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let mut y = vec![0.0; n];
        group.bench_with_input(BenchmarkId::new("crate", m), &m, |b, _| {
            b.iter(|| a.matvec_into(&x, &mut y))
        });
        group.bench_with_input(BenchmarkId::new("seq_baseline", m), &m, |b, _| {
            b.iter(|| seq_stencil_matvec(m, &x, &mut y))
        });
    }
    group.finish();
}

fn bench_block_product(c: &mut Criterion) {
    let mut group = c.benchmark_group("mat_matvec");
    let m = 24;
    let a = LinearOperator::laplacian3d(m, m, m).unwrap();
    let n = m * m * m;
    for &r in &[4usize, 16] {
        let x = Mat::random_gaussian(n, r, 3);
        let mut y = Mat::zeros(n, r);
        group.bench_with_input(BenchmarkId::new("crate", r), &r, |b, _| {
            b.iter(|| a.mat_matvec_into(&x, &mut y))
        });
        group.bench_with_input(BenchmarkId::new("seq_baseline", r), &r, |b, _| {
            b.iter(|| {
                for j in 0..r {
                    let col = x.col(j).to_vec();
                    let mut out = vec![0.0; n];
                    seq_stencil_matvec(m, &col, &mut out);
                    y.col_mut(j).copy_from_slice(&out);
                }
            })
        });
    }
    group.finish();
}

fn bench_gram_assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("svm_gram");
    group.sample_size(20);
    let n = 400;
    let data = gen_gaussian_clouds(n, 5, 11);
    let sigma = 10f64.sqrt();
    group.bench_function("crate", |b| {
        b.iter(|| build_svm_dual(&data, 1.0, sigma).unwrap())
    });
    group.bench_function("seq_baseline", |b| {
        b.iter(|| {
            let w: Vec<f64> = data.examples.iter().map(|e| e.label as f64).collect();
            let mut g = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..n {
                    g[i * n + j] = w[i]
                        * w[j]
                        * gaussian_kernel(
                            &data.examples[i].features,
                            &data.examples[j].features,
                            sigma,
                        );
                }
            }
            g
        })
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_dense_matvec,
    bench_stencil_matvec,
    bench_block_product,
    bench_gram_assembly
);
criterion_main!(benches);

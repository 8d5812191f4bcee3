//! Registry of classic smooth test functions with analytic gradients,
//! standing in for the usual collection-based problem sets. Each entry
//! carries its conventional starting point.

use crate::uncsolver::Objective;

/// A named test function with analytic gradient and standard start.
#[derive(Clone)]
pub struct TestFunction {
    pub name: &'static str,
    pub dim: usize,
    pub start: Vec<f64>,
    eval: fn(&[f64]) -> f64,
    grad: fn(&[f64], &mut [f64]),
}

impl Objective for TestFunction {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }
    fn gradient(&self, x: &[f64], g: &mut [f64]) {
        (self.grad)(x, g)
    }
}

fn sphere(x: &[f64]) -> f64 {
    0.5 * x.iter().map(|v| v * v).sum::<f64>()
}
fn sphere_g(x: &[f64], g: &mut [f64]) {
    g.copy_from_slice(x);
}

fn ill_diag(i: usize, n: usize) -> f64 {
    10f64.powf(4.0 * i as f64 / (n as f64 - 1.0))
}
fn ill_quad(x: &[f64]) -> f64 {
    let n = x.len();
    0.5 * x
        .iter()
        .enumerate()
        .map(|(i, v)| ill_diag(i, n) * v * v)
        .sum::<f64>()
}
fn ill_quad_g(x: &[f64], g: &mut [f64]) {
    let n = x.len();
    for (i, (gi, xi)) in g.iter_mut().zip(x).enumerate() {
        *gi = ill_diag(i, n) * xi;
    }
}

fn tridiag_quad(x: &[f64]) -> f64 {
    let mut g = vec![0.0; x.len()];
    tridiag_quad_g(x, &mut g);
    0.5 * crate::linops::dot(x, &g)
}
fn tridiag_quad_g(x: &[f64], g: &mut [f64]) {
    let n = x.len();
    for i in 0..n {
        let mut v = 2.0 * x[i];
        if i > 0 {
            v -= x[i - 1];
        }
        if i + 1 < n {
            v -= x[i + 1];
        }
        g[i] = v;
    }
}

fn rosenbrock2(x: &[f64]) -> f64 {
    (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
}
fn rosenbrock2_g(x: &[f64], g: &mut [f64]) {
    let t = x[1] - x[0] * x[0];
    g[0] = -2.0 * (1.0 - x[0]) - 400.0 * x[0] * t;
    g[1] = 200.0 * t;
}

fn ext_rosenbrock(x: &[f64]) -> f64 {
    x.chunks_exact(2)
        .map(|p| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2))
        .sum()
}
fn ext_rosenbrock_g(x: &[f64], g: &mut [f64]) {
    for (p, gp) in x.chunks_exact(2).zip(g.chunks_exact_mut(2)) {
        let t = p[1] - p[0] * p[0];
        gp[0] = -2.0 * (1.0 - p[0]) - 400.0 * p[0] * t;
        gp[1] = 200.0 * t;
    }
}

fn beale(x: &[f64]) -> f64 {
    let (a, b) = (x[0], x[1]);
    (1.5 - a + a * b).powi(2) + (2.25 - a + a * b * b).powi(2) + (2.625 - a + a * b * b * b).powi(2)
}
fn beale_g(x: &[f64], g: &mut [f64]) {
    let (a, b) = (x[0], x[1]);
    let e1 = 1.5 - a + a * b;
    let e2 = 2.25 - a + a * b * b;
    let e3 = 2.625 - a + a * b * b * b;
    g[0] = 2.0 * e1 * (b - 1.0) + 2.0 * e2 * (b * b - 1.0) + 2.0 * e3 * (b * b * b - 1.0);
    g[1] = 2.0 * e1 * a + 2.0 * e2 * 2.0 * a * b + 2.0 * e3 * 3.0 * a * b * b;
}

fn booth(x: &[f64]) -> f64 {
    (x[0] + 2.0 * x[1] - 7.0).powi(2) + (2.0 * x[0] + x[1] - 5.0).powi(2)
}
fn booth_g(x: &[f64], g: &mut [f64]) {
    let e1 = x[0] + 2.0 * x[1] - 7.0;
    let e2 = 2.0 * x[0] + x[1] - 5.0;
    g[0] = 2.0 * e1 + 4.0 * e2;
    g[1] = 4.0 * e1 + 2.0 * e2;
}

fn matyas(x: &[f64]) -> f64 {
    0.26 * (x[0] * x[0] + x[1] * x[1]) - 0.48 * x[0] * x[1]
}
fn matyas_g(x: &[f64], g: &mut [f64]) {
    g[0] = 0.52 * x[0] - 0.48 * x[1];
    g[1] = 0.52 * x[1] - 0.48 * x[0];
}

fn himmelblau(x: &[f64]) -> f64 {
    (x[0] * x[0] + x[1] - 11.0).powi(2) + (x[0] + x[1] * x[1] - 7.0).powi(2)
}
fn himmelblau_g(x: &[f64], g: &mut [f64]) {
    let e1 = x[0] * x[0] + x[1] - 11.0;
    let e2 = x[0] + x[1] * x[1] - 7.0;
    g[0] = 4.0 * x[0] * e1 + 2.0 * e2;
    g[1] = 2.0 * e1 + 4.0 * x[1] * e2;
}

fn zakharov(x: &[f64]) -> f64 {
    let s: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| 0.5 * (i + 1) as f64 * v)
        .sum();
    x.iter().map(|v| v * v).sum::<f64>() + s * s + s.powi(4)
}
fn zakharov_g(x: &[f64], g: &mut [f64]) {
    let s: f64 = x
        .iter()
        .enumerate()
        .map(|(i, v)| 0.5 * (i + 1) as f64 * v)
        .sum();
    let c = 2.0 * s + 4.0 * s.powi(3);
    for (i, (gi, xi)) in g.iter_mut().zip(x).enumerate() {
        *gi = 2.0 * xi + c * 0.5 * (i + 1) as f64;
    }
}

fn dixon_price(x: &[f64]) -> f64 {
    let mut f = (x[0] - 1.0).powi(2);
    for i in 1..x.len() {
        f += (i + 1) as f64 * (2.0 * x[i] * x[i] - x[i - 1]).powi(2);
    }
    f
}
fn dixon_price_g(x: &[f64], g: &mut [f64]) {
    g.iter_mut().for_each(|v| *v = 0.0);
    g[0] = 2.0 * (x[0] - 1.0);
    for i in 1..x.len() {
        let t = 2.0 * (i + 1) as f64 * (2.0 * x[i] * x[i] - x[i - 1]);
        g[i] += 4.0 * x[i] * t;
        g[i - 1] -= t;
    }
}

fn trid(x: &[f64]) -> f64 {
    let a: f64 = x.iter().map(|v| (v - 1.0).powi(2)).sum();
    let b: f64 = x.windows(2).map(|w| w[0] * w[1]).sum();
    a - b
}
fn trid_g(x: &[f64], g: &mut [f64]) {
    let n = x.len();
    for i in 0..n {
        let mut v = 2.0 * (x[i] - 1.0);
        if i > 0 {
            v -= x[i - 1];
        }
        if i + 1 < n {
            v -= x[i + 1];
        }
        g[i] = v;
    }
}

fn raydan1(x: &[f64]) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| (i + 1) as f64 / 10.0 * (v.exp() - v))
        .sum()
}
fn raydan1_g(x: &[f64], g: &mut [f64]) {
    for (i, (gi, xi)) in g.iter_mut().zip(x).enumerate() {
        *gi = (i + 1) as f64 / 10.0 * (xi.exp() - 1.0);
    }
}

fn raydan2(x: &[f64]) -> f64 {
    x.iter().map(|v| v.exp() - v).sum()
}
fn raydan2_g(x: &[f64], g: &mut [f64]) {
    for (gi, xi) in g.iter_mut().zip(x) {
        *gi = xi.exp() - 1.0;
    }
}

fn trigonometric(x: &[f64]) -> f64 {
    let n = x.len();
    let cos_sum: f64 = x.iter().map(|v| v.cos()).sum();
    (0..n)
        .map(|i| {
            let fi = n as f64 - cos_sum + (i + 1) as f64 * (1.0 - x[i].cos()) - x[i].sin();
            fi * fi
        })
        .sum()
}
fn trigonometric_g(x: &[f64], g: &mut [f64]) {
    let n = x.len();
    let cos_sum: f64 = x.iter().map(|v| v.cos()).sum();
    let f: Vec<f64> = (0..n)
        .map(|i| n as f64 - cos_sum + (i + 1) as f64 * (1.0 - x[i].cos()) - x[i].sin())
        .collect();
    let f_sum: f64 = f.iter().sum();
    for k in 0..n {
        g[k] = 2.0 * x[k].sin() * f_sum + 2.0 * f[k] * ((k + 1) as f64 * x[k].sin() - x[k].cos());
    }
}

fn powell_singular(x: &[f64]) -> f64 {
    (x[0] + 10.0 * x[1]).powi(2)
        + 5.0 * (x[2] - x[3]).powi(2)
        + (x[1] - 2.0 * x[2]).powi(4)
        + 10.0 * (x[0] - x[3]).powi(4)
}
fn powell_singular_g(x: &[f64], g: &mut [f64]) {
    let t1 = x[0] + 10.0 * x[1];
    let t2 = x[2] - x[3];
    let t3 = x[1] - 2.0 * x[2];
    let t4 = x[0] - x[3];
    g[0] = 2.0 * t1 + 40.0 * t4.powi(3);
    g[1] = 20.0 * t1 + 4.0 * t3.powi(3);
    g[2] = 10.0 * t2 - 8.0 * t3.powi(3);
    g[3] = -10.0 * t2 - 40.0 * t4.powi(3);
}

fn wood(x: &[f64]) -> f64 {
    100.0 * (x[1] - x[0] * x[0]).powi(2)
        + (1.0 - x[0]).powi(2)
        + 90.0 * (x[3] - x[2] * x[2]).powi(2)
        + (1.0 - x[2]).powi(2)
        + 10.1 * ((x[1] - 1.0).powi(2) + (x[3] - 1.0).powi(2))
        + 19.8 * (x[1] - 1.0) * (x[3] - 1.0)
}
fn wood_g(x: &[f64], g: &mut [f64]) {
    let t1 = x[1] - x[0] * x[0];
    let t2 = x[3] - x[2] * x[2];
    g[0] = -400.0 * x[0] * t1 - 2.0 * (1.0 - x[0]);
    g[1] = 200.0 * t1 + 20.2 * (x[1] - 1.0) + 19.8 * (x[3] - 1.0);
    g[2] = -360.0 * x[2] * t2 - 2.0 * (1.0 - x[2]);
    g[3] = 180.0 * t2 + 20.2 * (x[3] - 1.0) + 19.8 * (x[1] - 1.0);
}

fn engval1(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| (w[0] * w[0] + w[1] * w[1]).powi(2) - 4.0 * w[0] + 3.0)
        .sum()
}
fn engval1_g(x: &[f64], g: &mut [f64]) {
    let n = x.len();
    g.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..n - 1 {
        let s = x[i] * x[i] + x[i + 1] * x[i + 1];
        g[i] += 4.0 * x[i] * s - 4.0;
        g[i + 1] += 4.0 * x[i + 1] * s;
    }
}

fn quartic(x: &[f64]) -> f64 {
    x.iter().map(|v| 0.25 * v.powi(4) + 0.5 * v * v).sum()
}
fn quartic_g(x: &[f64], g: &mut [f64]) {
    for (gi, xi) in g.iter_mut().zip(x) {
        *gi = xi.powi(3) + xi;
    }
}

fn perturbed_quad(x: &[f64]) -> f64 {
    let s: f64 = x.iter().sum();
    x.iter()
        .enumerate()
        .map(|(i, v)| (i + 1) as f64 * v * v)
        .sum::<f64>()
        + s * s / 100.0
}
fn perturbed_quad_g(x: &[f64], g: &mut [f64]) {
    let s: f64 = x.iter().sum();
    for (i, (gi, xi)) in g.iter_mut().zip(x).enumerate() {
        *gi = 2.0 * (i + 1) as f64 * xi + 2.0 * s / 100.0;
    }
}

/// The full registry with standard starting points.
pub fn registry() -> Vec<TestFunction> {
    let alt_start = |n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| if i % 2 == 0 { -1.2 } else { 1.0 })
            .collect()
    };
    vec![
        TestFunction {
            name: "sphere",
            dim: 50,
            start: vec![1.0; 50],
            eval: sphere,
            grad: sphere_g,
        },
        TestFunction {
            name: "ill_quad",
            dim: 100,
            start: vec![1.0; 100],
            eval: ill_quad,
            grad: ill_quad_g,
        },
        TestFunction {
            name: "tridiag_quad",
            dim: 100,
            start: vec![1.0; 100],
            eval: tridiag_quad,
            grad: tridiag_quad_g,
        },
        TestFunction {
            name: "rosenbrock",
            dim: 2,
            start: vec![-1.2, 1.0],
            eval: rosenbrock2,
            grad: rosenbrock2_g,
        },
        TestFunction {
            name: "ext_rosenbrock",
            dim: 20,
            start: alt_start(20),
            eval: ext_rosenbrock,
            grad: ext_rosenbrock_g,
        },
        TestFunction {
            name: "beale",
            dim: 2,
            start: vec![1.0, 1.0],
            eval: beale,
            grad: beale_g,
        },
        TestFunction {
            name: "booth",
            dim: 2,
            start: vec![0.0, 0.0],
            eval: booth,
            grad: booth_g,
        },
        TestFunction {
            name: "matyas",
            dim: 2,
            start: vec![1.0, 1.0],
            eval: matyas,
            grad: matyas_g,
        },
        TestFunction {
            name: "himmelblau",
            dim: 2,
            start: vec![1.0, 1.0],
            eval: himmelblau,
            grad: himmelblau_g,
        },
        TestFunction {
            name: "zakharov",
            dim: 10,
            start: vec![0.5; 10],
            eval: zakharov,
            grad: zakharov_g,
        },
        TestFunction {
            name: "dixon_price",
            dim: 10,
            start: vec![1.0; 10],
            eval: dixon_price,
            grad: dixon_price_g,
        },
        TestFunction {
            name: "trid",
            dim: 10,
            start: vec![0.0; 10],
            eval: trid,
            grad: trid_g,
        },
        TestFunction {
            name: "raydan1",
            dim: 100,
            start: vec![1.0; 100],
            eval: raydan1,
            grad: raydan1_g,
        },
        TestFunction {
            name: "raydan2",
            dim: 100,
            start: vec![1.0; 100],
            eval: raydan2,
            grad: raydan2_g,
        },
        TestFunction {
            name: "trigonometric",
            dim: 10,
            start: vec![0.1; 10],
            eval: trigonometric,
            grad: trigonometric_g,
        },
        TestFunction {
            name: "powell_singular",
            dim: 4,
            start: vec![3.0, -1.0, 0.0, 1.0],
            eval: powell_singular,
            grad: powell_singular_g,
        },
        TestFunction {
            name: "wood",
            dim: 4,
            start: vec![-3.0, -1.0, -3.0, -1.0],
            eval: wood,
            grad: wood_g,
        },
        TestFunction {
            name: "engval1",
            dim: 50,
            start: vec![2.0; 50],
            eval: engval1,
            grad: engval1_g,
        },
        TestFunction {
            name: "quartic",
            dim: 20,
            start: vec![1.0; 20],
            eval: quartic,
            grad: quartic_g,
        },
        TestFunction {
            name: "perturbed_quad",
            dim: 50,
            start: vec![0.5; 50],
            eval: perturbed_quad,
            grad: perturbed_quad_g,
        },
    ]
}

/// Looks a function up by name.
pub fn by_name(name: &str) -> Option<TestFunction> {
    registry().into_iter().find(|f| f.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::uncsolver::check_gradient;
    use rand::{Rng, SeedableRng};

    #[test]
    fn registry_has_twenty_distinct_entries() {
        let reg = registry();
        assert_eq!(reg.len(), 20);
        let mut names: Vec<_> = reg.iter().map(|f| f.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), 20);
        for f in &reg {
            assert_eq!(f.start.len(), f.dim);
        }
        assert!(by_name("rosenbrock").is_some());
        assert!(by_name("nope").is_none());
    }

    #[test]
    fn analytic_gradients_match_central_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for f in registry() {
            for trial in 0..3 {
                let x: Vec<f64> = f
                    .start
                    .iter()
                    .map(|s| s + rng.gen_range(-0.5..0.5))
                    .collect();
                let rel = check_gradient(&f, &x);
                assert!(rel <= 1e-5, "{} trial {trial}: rel err {rel}", f.name);
            }
        }
    }
}

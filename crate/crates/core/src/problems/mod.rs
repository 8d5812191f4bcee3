//! Seeded generators for the test-problem families: random quadratics over
//! five spectrum layouts, the log-spaced diagonal quadratic, the 2-variable
//! termination problem, planted-solution box and SLB quadratic programs, and
//! the SVM dual (see [`svm`]). Everything is deterministic given its seed.

pub mod svm;
pub mod testfuncs;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::linops::{dot, LinearOperator};
use crate::projgrad::{BoxConstraint, ConstraintSet, SLBConstraint};
use crate::quadsolver::QuadraticProblem;

/// Spectrum layout of the random diagonal quadratics: v_1 = 1, v_n = kappa,
/// interior entries drawn per the banded set definitions (1..=5).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SpectrumSpec {
    pub set_id: u8,
    pub n: usize,
    pub kappa: f64,
}

/// A generated random quadratic together with its spectrum and minimizer.
#[derive(Debug, Clone)]
pub struct RandomQuadratic {
    pub problem: QuadraticProblem,
    pub v: Vec<f64>,
    pub x_star: Vec<f64>,
}

impl SpectrumSpec {
    pub fn new(set_id: u8, n: usize, kappa: f64) -> Self {
        assert!((1..=5).contains(&set_id));
        assert!(n >= 3);
        assert!(kappa > 1.0);
        SpectrumSpec { set_id, n, kappa }
    }
}

/// f(x) = (x - x*)' diag(v) (x - x*), without a 1/2 factor, so the gradient
/// is 2 diag(v) (x - x*). Encoded as the equivalent 1/2 x'Ax - b'x problem
/// with A = 2 diag(v) and b = 2 diag(v) x*. The start is the null vector.
pub fn gen_random_quadratic(spec: &SpectrumSpec, seed: u64) -> RandomQuadratic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, kappa) = (spec.n, spec.kappa);
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    v[n - 1] = kappa;
    // interior bands are expressed over 1-based positions j = 2..=n-1
    let band = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| rng.gen_range(lo..hi);
    for j in 2..n {
        let frac_cut1 = n / 5;
        let frac_cut2 = n / 2;
        let frac_cut3 = 4 * n / 5;
        let value = match spec.set_id {
            1 => band(&mut rng, 1.0, kappa),
            2 => {
                if j <= frac_cut1 {
                    band(&mut rng, 1.0, 100.0)
                } else {
                    band(&mut rng, kappa / 2.0, kappa)
                }
            }
            3 => {
                if j <= frac_cut2 {
                    band(&mut rng, 1.0, 100.0)
                } else {
                    band(&mut rng, kappa / 2.0, kappa)
                }
            }
            4 => {
                if j <= frac_cut3 {
                    band(&mut rng, 1.0, 100.0)
                } else {
                    band(&mut rng, kappa / 2.0, kappa)
                }
            }
            5 => {
                if j <= frac_cut1 {
                    band(&mut rng, 1.0, 100.0)
                } else if j <= frac_cut3 {
                    band(&mut rng, 100.0, kappa / 2.0)
                } else {
                    band(&mut rng, kappa / 2.0, kappa)
                }
            }
            _ => unreachable!(),
        };
        v[j - 1] = value;
    }
    let x_star: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
    let a: Vec<f64> = v.iter().map(|vi| 2.0 * vi).collect();
    let b: Vec<f64> = a.iter().zip(&x_star).map(|(ai, xi)| ai * xi).collect();
    let problem =
        QuadraticProblem::new(LinearOperator::diagonal(a), b, vec![0.0; n]).expect("dims agree");
    RandomQuadratic { problem, v, x_star }
}

/// Diagonal quadratic with A_jj = 10^{(log10 kappa / (n-1)) (n-j)}, so the
/// entries run from kappa down to 1, and b = 0. The harness supplies starts.
pub fn gen_diagonal_hard(n: usize, kappa: f64) -> QuadraticProblem {
    assert!(n >= 2 && kappa > 1.0);
    let e = kappa.log10() / (n as f64 - 1.0);
    let d: Vec<f64> = (1..=n).map(|j| 10f64.powf(e * (n - j) as f64)).collect();
    QuadraticProblem::new(LinearOperator::diagonal(d), vec![0.0; n], vec![0.0; n])
        .expect("dims agree")
}

/// The 2-variable termination problem A = diag{1, lambda}, b = 0, with a
/// seeded random start in [-10, 10]^2.
pub fn gen_2d_termination_case(lambda: f64, seed: u64) -> QuadraticProblem {
    assert!(lambda > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0 = vec![rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)];
    QuadraticProblem::new(
        LinearOperator::diagonal(vec![1.0, lambda]),
        vec![0.0; 2],
        x0,
    )
    .expect("dims agree")
}

/// Generator parameters of the random SLB family: dimension, decimal
/// condition exponent, near-degeneracy exponent, and the number of active
/// bounds at the planted solution and at the start.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SLBGenSpec {
    pub n: usize,
    pub ncond: f64,
    pub ndeg: f64,
    pub na_xstar: usize,
    pub na_x1: usize,
}

/// A generated constrained quadratic with its planted KKT solution.
#[derive(Debug, Clone)]
pub struct PlantedQP {
    pub problem: QuadraticProblem,
    pub constraint: ConstraintSet,
    pub x_star: Vec<f64>,
}

fn householder_dense(n: usize, d: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    // A = P D P' with P = H3 H2 H1, H_i = I - 2 p_i p_i', unit p_i.
    let mut ps = Vec::new();
    for _ in 0..3 {
        let mut p: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = crate::linops::norm2(&p);
        for v in &mut p {
            *v /= norm;
        }
        ps.push(p);
    }
    let reflect = |p: &[f64], x: &mut [f64]| {
        let c = 2.0 * dot(p, x);
        for (xi, pi) in x.iter_mut().zip(p) {
            *xi -= c * pi;
        }
    };
    let mut a = vec![0.0; n * n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        col.iter_mut().for_each(|c| *c = 0.0);
        col[j] = 1.0;
        // P' e_j = H1 H2 H3 e_j
        reflect(&ps[2], &mut col);
        reflect(&ps[1], &mut col);
        reflect(&ps[0], &mut col);
        for (c, di) in col.iter_mut().zip(d) {
            *c *= di;
        }
        // P (D P' e_j)
        reflect(&ps[0], &mut col);
        reflect(&ps[1], &mut col);
        reflect(&ps[2], &mut col);
        for i in 0..n {
            a[i * n + j] = col[i];
        }
    }
    // enforce exact symmetry against roundoff
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = m;
            a[j * n + i] = m;
        }
    }
    a
}

/// Random SLB quadratic program with a planted KKT point. The Hessian is a
/// Householder-rotated diagonal with log d_i = ncond (i-1)/(n-1); the box is
/// [-1, 1]^n; `na_xstar` components of x* sit at bounds with multiplier
/// magnitudes 10^(-ndeg u), u uniform; c closes the stationarity equation and
/// b = a'x*. The start has `na_x1` components at bounds before projection.
pub fn gen_random_slb(spec: &SLBGenSpec, seed: u64) -> PlantedQP {
    gen_planted(spec, seed, true)
}

/// Box-constrained sibling of [`gen_random_slb`]: same construction without
/// the linear equality.
pub fn gen_random_box(spec: &SLBGenSpec, seed: u64) -> PlantedQP {
    gen_planted(spec, seed, false)
}

fn gen_planted(spec: &SLBGenSpec, seed: u64, with_equality: bool) -> PlantedQP {
    let n = spec.n;
    assert!(n >= 2);
    assert!(spec.na_xstar <= n && spec.na_x1 <= n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d: Vec<f64> = (0..n)
        .map(|i| 10f64.powf(spec.ncond * i as f64 / (n as f64 - 1.0)))
        .collect();
    let a_data = householder_dense(n, &d, &mut rng);
    let lower = vec![-1.0; n];
    let upper = vec![1.0; n];

    let mut idx: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        idx.swap(i, j);
    }
    let active: Vec<usize> = idx[..spec.na_xstar].to_vec();

    let mut x_star = vec![0.0; n];
    let mut at_upper = vec![false; n];
    let mut is_active = vec![false; n];
    for &i in &active {
        is_active[i] = true;
        at_upper[i] = rng.gen_bool(0.5);
        x_star[i] = if at_upper[i] { upper[i] } else { lower[i] };
    }
    for i in 0..n {
        if !is_active[i] {
            x_star[i] = rng.gen_range(-1.0..1.0);
        }
    }

    let a_vec: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let t_star = if with_equality {
        rng.gen_range(-1.0..1.0)
    } else {
        0.0
    };

    // target gradient at x*: t a_i on free components, t a_i +/- multiplier
    // at active bounds (+ at lower, - at upper keeps the signs right)
    let mut g_target = vec![0.0; n];
    for i in 0..n {
        g_target[i] = t_star * a_vec[i];
        if is_active[i] {
            let magnitude = 10f64.powf(-spec.ndeg * rng.gen::<f64>());
            if at_upper[i] {
                g_target[i] -= magnitude;
            } else {
                g_target[i] += magnitude;
            }
        }
    }

    let op = LinearOperator::dense(n, a_data).expect("square");
    let ax = op.matvec(&x_star).expect("dims");
    let c: Vec<f64> = ax.iter().zip(&g_target).map(|(axi, gi)| axi - gi).collect();

    // start with na_x1 components at bounds; the solver projects it anyway
    let mut x1 = vec![0.0; n];
    let mut idx2: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        idx2.swap(i, j);
    }
    for (pos, &i) in idx2.iter().enumerate() {
        x1[i] = if pos < spec.na_x1 {
            if rng.gen_bool(0.5) {
                upper[i]
            } else {
                lower[i]
            }
        } else {
            rng.gen_range(-1.0..1.0)
        };
    }

    let bx = BoxConstraint::new(lower, upper).expect("valid box");
    let constraint = if with_equality {
        let b = dot(&a_vec, &x_star);
        ConstraintSet::Slb(SLBConstraint::new(bx, a_vec, b).expect("feasible"))
    } else {
        ConstraintSet::Box(bx)
    };
    let problem = QuadraticProblem::new(op, c, x1).expect("dims agree");
    PlantedQP {
        problem,
        constraint,
        x_star,
    }
}

/// Round-trips a problem description through JSON, for harness replay.
pub fn quadratic_to_json(p: &QuadraticProblem) -> Result<String, SolverError> {
    #[derive(Serialize)]
    struct Repr<'a> {
        a: &'a LinearOperator,
        b: &'a [f64],
        x0: &'a [f64],
    }
    Ok(serde_json::to_string(&Repr {
        a: &p.a,
        b: &p.b,
        x0: &p.x0,
    })?)
}

pub fn quadratic_from_json(s: &str) -> Result<QuadraticProblem, SolverError> {
    #[derive(Deserialize)]
    struct Repr {
        a: LinearOperator,
        b: Vec<f64>,
        x0: Vec<f64>,
    }
    let r: Repr = serde_json::from_str(s)?;
    QuadraticProblem::new(r.a, r.b, r.x0)
}

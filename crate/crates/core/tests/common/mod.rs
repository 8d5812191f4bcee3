//! Independent reference solvers used by the integration tests: exhaustive
//! active-set enumeration for small box and SLB quadratic programs, and a
//! pairwise coordinate optimizer for the SVM dual. None of them share code
//! with the solvers under test.

use bbqt::linops::dense::lu_solve;

/// Projection of x onto {l <= z <= u, a'z = b} by enumerating all 3^n
/// lower/free/upper patterns. Each feasible candidate is a KKT point of its
/// pattern; the closest feasible candidate is the projection.
pub fn slb_projection_oracle(
    x: &[f64],
    l: &[f64],
    u: &[f64],
    a: &[f64],
    b: f64,
) -> Option<Vec<f64>> {
    let n = x.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let patterns = 3usize.pow(n as u32);
    for code in 0..patterns {
        let mut state = code;
        let mut z = vec![0.0; n];
        let mut free = Vec::new();
        let mut fixed_sum = 0.0;
        for i in 0..n {
            match state % 3 {
                0 => {
                    z[i] = l[i];
                    fixed_sum += a[i] * l[i];
                }
                1 => free.push(i),
                _ => {
                    z[i] = u[i];
                    fixed_sum += a[i] * u[i];
                }
            }
            state /= 3;
        }
        // on the free set: z_F = x_F - t a_F with a'z = b
        let aa: f64 = free.iter().map(|&i| a[i] * a[i]).sum();
        let ax: f64 = free.iter().map(|&i| a[i] * x[i]).sum();
        if aa > 0.0 {
            let t = (ax + fixed_sum - b) / aa;
            for &i in &free {
                z[i] = x[i] - t * a[i];
            }
        } else {
            for &i in &free {
                z[i] = x[i];
            }
            if (fixed_sum + ax - b).abs() > 1e-10 * b.abs().max(1.0) {
                continue;
            }
        }
        // feasibility of the candidate
        let ok = (0..n).all(|i| z[i] >= l[i] - 1e-12 && z[i] <= u[i] + 1e-12);
        if !ok {
            continue;
        }
        let dist: f64 = z.iter().zip(x).map(|(zi, xi)| (zi - xi) * (zi - xi)).sum();
        match &best {
            Some((d, _)) if *d <= dist => {}
            _ => best = Some((dist, z)),
        }
    }
    best.map(|(_, z)| z)
}

/// Minimizer of 1/2 x'Ax - c'x over a box by enumerating active-set
/// patterns; A is dense row-major SPD. Feasible candidates are compared by
/// objective value, which is minimal exactly at the solution.
pub fn box_qp_oracle(n: usize, a: &[f64], c: &[f64], l: &[f64], u: &[f64]) -> Option<Vec<f64>> {
    let value = |x: &[f64]| -> f64 {
        let mut q = 0.0;
        for i in 0..n {
            let mut axi = 0.0;
            for j in 0..n {
                axi += a[i * n + j] * x[j];
            }
            q += 0.5 * x[i] * axi - c[i] * x[i];
        }
        q
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for code in 0..3usize.pow(n as u32) {
        let mut state = code;
        let mut x = vec![0.0; n];
        let mut free = Vec::new();
        for i in 0..n {
            match state % 3 {
                0 => x[i] = l[i],
                1 => free.push(i),
                _ => x[i] = u[i],
            }
            state /= 3;
        }
        if !free.is_empty() {
            // solve A_FF x_F = c_F - A_FB x_B
            let m = free.len();
            let mut sub = vec![0.0; m * m];
            let mut rhs = vec![0.0; m];
            for (p, &i) in free.iter().enumerate() {
                rhs[p] = c[i];
                for (q, &j) in free.iter().enumerate() {
                    sub[p * m + q] = a[i * n + j];
                }
                for j in 0..n {
                    if !free.contains(&j) {
                        rhs[p] -= a[i * n + j] * x[j];
                    }
                }
            }
            if lu_solve(m, &mut sub, &mut rhs).is_err() {
                continue;
            }
            for (p, &i) in free.iter().enumerate() {
                x[i] = rhs[p];
            }
        }
        let ok = (0..n).all(|i| x[i] >= l[i] - 1e-10 && x[i] <= u[i] + 1e-10);
        if !ok {
            continue;
        }
        let v = value(&x);
        match &best {
            Some((bv, _)) if *bv <= v => {}
            _ => best = Some((v, x)),
        }
    }
    best.map(|(_, x)| x)
}

/// Pairwise coordinate descent for the SVM dual
///   min 1/2 x'Gx - e'x  s.t.  0 <= x <= c,  w'x = 0,
/// picking the most violating pair each round. Independent of the projected
/// gradient path; used as the reference optimum.
pub fn smo_solve(n: usize, g: &[f64], c: f64, w: &[f64], tol: f64, max_iter: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    // gradient of the dual objective: Gx - e
    let mut grad: Vec<f64> = (0..n).map(|_| -1.0).collect();
    for _ in 0..max_iter {
        // maximal-violation pair over the feasible directions: increasing
        // x_i is allowed when x_i < c, decreasing when x_i > 0; the signed
        // quantity w_i grad_i orders the candidates
        let mut i_up: Option<usize> = None;
        let mut i_lo: Option<usize> = None;
        let mut up_val = f64::INFINITY;
        let mut lo_val = f64::NEG_INFINITY;
        for t in 0..n {
            let v = w[t] * grad[t];
            let can_up = (w[t] > 0.0 && x[t] < c - 1e-14) || (w[t] < 0.0 && x[t] > 1e-14);
            let can_lo = (w[t] > 0.0 && x[t] > 1e-14) || (w[t] < 0.0 && x[t] < c - 1e-14);
            if can_up && v < up_val {
                up_val = v;
                i_up = Some(t);
            }
            if can_lo && v > lo_val {
                lo_val = v;
                i_lo = Some(t);
            }
        }
        let (Some(i), Some(j)) = (i_up, i_lo) else {
            break;
        };
        if lo_val - up_val <= tol {
            break;
        }
        // optimize the pair (i, j) along the feasible ray x_i += w_i d,
        // x_j -= w_j d with d >= 0; the pair choice makes it a descent ray
        let eta = g[i * n + i] + g[j * n + j] - 2.0 * w[i] * w[j] * g[i * n + j];
        let deriv = w[i] * grad[i] - w[j] * grad[j]; // negative by selection
                                                     // distance until a bound stops the ray
        let room_up = if w[i] > 0.0 {
            (c - x[i]) / w[i]
        } else {
            -x[i] / w[i]
        };
        let room_lo = if w[j] > 0.0 {
            x[j] / w[j]
        } else {
            (x[j] - c) / w[j]
        };
        let d_max = room_up.min(room_lo);
        let d = if eta > 1e-14 {
            (-deriv / eta).min(d_max)
        } else {
            d_max
        };
        if !(d > 1e-16) {
            break;
        }
        let di = w[i] * d;
        let dj = -w[j] * d;
        x[i] += di;
        x[j] += dj;
        x[i] = x[i].clamp(0.0, c);
        x[j] = x[j].clamp(0.0, c);
        for t in 0..n {
            grad[t] += g[t * n + i] * di + g[t * n + j] * dj;
        }
    }
    x
}

/// Dual objective value 1/2 x'Gx - e'x.
pub fn dual_objective(n: usize, g: &[f64], x: &[f64]) -> f64 {
    let mut v = 0.0;
    for i in 0..n {
        let mut gx = 0.0;
        for j in 0..n {
            gx += g[i * n + j] * x[j];
        }
        v += 0.5 * x[i] * gx - x[i];
    }
    v
}

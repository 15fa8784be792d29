//! Quadrature building blocks: Gauss-Legendre and Gauss-Hermite rules via
//! Golub-Welsch on the Jacobi matrix, and adaptive Simpson integration.

use nalgebra::DMatrix;

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_01(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for k in 1..m {
        let kf = k as f64;
        let b = kf / (4.0 * kf * kf - 1.0).sqrt();
        jac[(k - 1, k)] = b;
        jac[(k, k - 1)] = b;
    }
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let q0 = eig.eigenvectors[(0, i)];
            (0.5 * (node + 1.0), q0 * q0) // weight on [-1,1] is 2 q0^2; halved by the map
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Nodes and weights for expectations against a standard normal:
/// `E[g(Z)] ~= sum_i w_i g(z_i)` with the weights summing to one.
pub fn gauss_hermite_standard_normal(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for k in 1..m {
        let b = (k as f64 / 2.0).sqrt();
        jac[(k - 1, k)] = b;
        jac[(k, k - 1)] = b;
    }
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let t = eig.eigenvalues[i];
            let q0 = eig.eigenvectors[(0, i)];
            (std::f64::consts::SQRT_2 * t, q0 * q0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Adaptive Simpson integration of `f` on `[a, b]` to absolute tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

/// Adaptive Simpson with a pre-split for oscillatory integrands: the range
/// is cut into roughly one panel per half-cycle before refinement.
pub fn adaptive_simpson_oscillatory<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    cycles: f64,
) -> f64 {
    let panels = (2.0 * cycles.abs()).ceil().max(1.0) as usize;
    let panels = panels.min(100_000);
    let h = (b - a) / panels as f64;
    let per_panel_tol = tol / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let hi = lo + h;
        total += adaptive_simpson(f, lo, hi, per_panel_tol, 28);
    }
    total
}

//! Kac-Rice densities of colliding zero pairs and the monitors built on
//! them.
//!
//! The one-pair density at `(x, y)` is
//! `p1 = E[|X'(x) Y'(y)| phi_U | X(x) = Y(y) = 0] / (2 pi det(Sigma)^{1/2})`
//! with `Sigma = Cov(X(x), Y(y))` and `phi_U` the indicator that the
//! collision statistic `n^2 (x-y) X'Y' / (X'^2 + Y'^2)` lands in `U`.
//! Integrating `p1` over the axis-free window and the proximity range in
//! `x - y` yields the expected pair count `|U|/12 + o(1)`. The `k`-pair
//! density generalizes the conditioning to `2k` zeros and is estimated by
//! Monte Carlo; the bound monitors record the scale-free ratios that the
//! density, numerator, and determinant obey.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::quad::{adaptive_simpson, gauss_hermite_standard_normal};
use super::{condition_on_zeros, covariance_block, cov_finite, ProcessFn, RowSpec};
use crate::process::proximity_cutoff;
use crate::roots::axis_margin;
use crate::{Error, Result};

/// How a density value was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityMethod {
    ClosedFormExpectation,
    GaussHermite,
    MonteCarlo,
}

/// One evaluated Kac-Rice density with its pieces kept separate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityEval {
    pub value: f64,
    pub numerator: f64,
    pub det_sigma: f64,
    pub method: DensityMethod,
    pub rel_error_estimate: f64,
    /// Set when coincident locations force the value to zero by convention.
    pub degenerate: bool,
}

/// Lower-triangular factor `L` with `L L^T = m`, via Cholesky with an
/// eigenvalue-clamping fallback for nearly singular input.
fn factor_covariance(m: &DMatrix<f64>) -> DMatrix<f64> {
    if let Some(chol) = m.clone().cholesky() {
        return chol.l();
    }
    let eig = m.clone().symmetric_eigen();
    let d = m.nrows();
    let mut l = DMatrix::<f64>::zeros(d, d);
    for k in 0..d {
        let lam = eig.eigenvalues[k].max(0.0).sqrt();
        for i in 0..d {
            l[(i, k)] = eig.eigenvectors[(i, k)] * lam;
        }
    }
    l
}

fn in_union(g: f64, u_set: &[(f64, f64)]) -> bool {
    u_set.iter().any(|&(lo, hi)| g > lo && g < hi)
}

/// Conditioned covariance of `(X'(x_i), Y'(y_i))_i` given all `2k` zeros,
/// together with `det Cov(X(x_i), Y(y_i))`.
fn conditioned_pair_covariance(
    n: usize,
    xs: &[f64],
    ys: &[f64],
) -> Result<(DMatrix<f64>, f64)> {
    let k = xs.len();
    let mut spec = Vec::with_capacity(4 * k);
    for &x in xs {
        spec.push(RowSpec::new(ProcessFn::X, 1, x));
    }
    for &y in ys {
        spec.push(RowSpec::new(ProcessFn::Y, 1, y));
    }
    for &x in xs {
        spec.push(RowSpec::new(ProcessFn::X, 0, x));
    }
    for &y in ys {
        spec.push(RowSpec::new(ProcessFn::Y, 0, y));
    }
    let block = covariance_block(n, &spec)?;
    let pinned: Vec<usize> = (2 * k..4 * k).collect();
    let det_sigma = {
        let mut c = DMatrix::<f64>::zeros(2 * k, 2 * k);
        for (ii, &pi) in pinned.iter().enumerate() {
            for (jj, &pj) in pinned.iter().enumerate() {
                c[(ii, jj)] = block.entries[(pi, pj)];
            }
        }
        c.lu().determinant()
    };
    let cond = condition_on_zeros(&block, &pinned)?;
    Ok((cond.reduced.entries, det_sigma))
}

fn gh_numerator(
    l: &DMatrix<f64>,
    gamma_scale: f64,
    u_set: &[(f64, f64)],
    nodes: &[f64],
    weights: &[f64],
) -> f64 {
    let m = nodes.len();
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            let v1 = l[(0, 0)] * nodes[i] + l[(0, 1)] * nodes[j];
            let v2 = l[(1, 0)] * nodes[i] + l[(1, 1)] * nodes[j];
            let denom = v1 * v1 + v2 * v2;
            let gamma = if denom == 0.0 {
                0.0
            } else {
                gamma_scale * v1 * v2 / denom
            };
            if in_union(gamma, u_set) {
                total += weights[i] * weights[j] * (v1 * v2).abs();
            }
        }
    }
    total
}

fn p1_eval(
    n: usize,
    x: f64,
    y: f64,
    u_set: &[(f64, f64)],
    nodes: &[f64],
    weights: &[f64],
) -> Result<(f64, f64)> {
    let (m, det_sigma) = conditioned_pair_covariance(n, &[x], &[y])?;
    let l = factor_covariance(&m);
    let n2 = (n as f64) * (n as f64);
    let numerator = gh_numerator(&l, n2 * (x - y), u_set, nodes, weights);
    Ok((numerator, det_sigma))
}

/// Exact polar reduction of the p1 numerator.
///
/// The collision statistic `gamma = s v1 v2 / (v1^2 + v2^2)` is
/// zero-homogeneous in `(v1, v2)`, so in polar coordinates the indicator is
/// purely angular and the radial integral against the `N(0, M)` density is
/// analytic: with `q(phi) = e(phi)^T M^{-1} e(phi)`,
/// `E[|V1 V2| 1(gamma in U)] = (1/(pi sqrt(det M)))
///   int |cos sin| 1((s/2) sin 2phi in U) q(phi)^{-2} dphi`.
/// Machine-accurate, unlike tensor Gauss-Hermite on the kinked integrand.
fn polar_numerator(m: &DMatrix<f64>, s: f64, u_set: &[(f64, f64)]) -> f64 {
    // Work with the unit-scale matrix so the integrand is O(1) and the
    // absolute quadrature tolerance is meaningful at any n.
    let scale = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let (a, b, c) = (m[(0, 0)] / scale, m[(0, 1)] / scale, m[(1, 1)] / scale);
    let det_m = (a * c - b * b).max(1e-300);
    let q = |phi: f64| -> f64 {
        let (sin, cos) = phi.sin_cos();
        (c * cos * cos - 2.0 * b * cos * sin + a * sin * sin) / det_m
    };
    let weight = |phi: f64| -> f64 {
        let (sin, cos) = phi.sin_cos();
        let qq = q(phi);
        (cos * sin).abs() / (qq * qq)
    };
    let two_pi = 2.0 * std::f64::consts::PI;
    // Breakpoints: |cos sin| kinks at multiples of pi/2 plus every angle
    // where (s/2) sin 2phi crosses a boundary of U.
    let mut cuts = vec![0.0, 0.25 * two_pi, 0.5 * two_pi, 0.75 * two_pi, two_pi];
    if s != 0.0 {
        for &(lo, hi) in u_set {
            for bound in [lo, hi] {
                let cb = 2.0 * bound / s;
                if cb.abs() <= 1.0 {
                    let psi = cb.asin();
                    for base in [psi, std::f64::consts::PI - psi] {
                        for k in 0..2 {
                            let phi = (base + two_pi * k as f64) / 2.0;
                            let phi = phi.rem_euclid(two_pi);
                            cuts.push(phi);
                        }
                    }
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
    let mut total = 0.0f64;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo < 1e-14 {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let gamma_mid = 0.5 * s * (2.0 * mid).sin();
        if !in_union(gamma_mid, u_set) {
            continue;
        }
        total += adaptive_simpson(&weight, lo, hi, 1e-11, 18);
    }
    scale * total / (std::f64::consts::PI * det_m.sqrt())
}

/// p1 value via the exact angular reduction (no quadrature kink error).
fn p1_value_exact(n: usize, x: f64, y: f64, u_set: &[(f64, f64)]) -> Result<f64> {
    let (m, det_sigma) = conditioned_pair_covariance(n, &[x], &[y])?;
    let n2 = (n as f64) * (n as f64);
    let numerator = polar_numerator(&m, n2 * (x - y), u_set);
    Ok(numerator / (2.0 * std::f64::consts::PI * det_sigma.sqrt()))
}

/// One-pair Kac-Rice density at `(x, y)` for target set `U` (a union of
/// open intervals), by two-dimensional Gauss-Hermite quadrature on the
/// exact conditioned covariance. The error estimate comes from doubling the
/// node count.
pub fn p1_density(n: usize, x: f64, y: f64, u_set: &[(f64, f64)]) -> Result<DensityEval> {
    if (x - y).abs() > proximity_cutoff(n, 1.0) {
        return Ok(DensityEval {
            value: 0.0,
            numerator: 0.0,
            det_sigma: 0.0,
            method: DensityMethod::GaussHermite,
            rel_error_estimate: 0.0,
            degenerate: false,
        });
    }
    let (nodes64, weights64) = gauss_hermite_standard_normal(64);
    let (nodes128, weights128) = gauss_hermite_standard_normal(128);
    let (num64, _) = p1_eval(n, x, y, u_set, &nodes64, &weights64)?;
    let (num128, det_sigma) = p1_eval(n, x, y, u_set, &nodes128, &weights128)?;
    let value = num128 / (2.0 * std::f64::consts::PI * det_sigma.sqrt());
    let rel = (num128 - num64).abs() / num128.abs().max(1e-300);
    Ok(DensityEval {
        value,
        numerator: num128,
        det_sigma,
        method: DensityMethod::GaussHermite,
        rel_error_estimate: rel,
        degenerate: false,
    })
}

/// Cross-check mode: the conditioned pair is replaced by the idealized
/// independent Gaussian with variance `n^3 / 24` per coordinate. With `U`
/// the whole line the numerator collapses to the closed form
/// `sigma^2 E|Z_1 Z_2| = sigma^2 (2/pi)`.
pub fn p1_density_idealized(n: usize, x: f64, y: f64, u_set: &[(f64, f64)]) -> Result<DensityEval> {
    let nf = n as f64;
    let sigma2 = nf.powi(3) / 24.0;
    let det_sigma = nf * nf / 4.0;
    let whole_line = u_set
        .iter()
        .any(|&(lo, hi)| lo == f64::NEG_INFINITY && hi == f64::INFINITY);
    let (numerator, method, rel) = if whole_line {
        (
            sigma2 * 2.0 / std::f64::consts::PI,
            DensityMethod::ClosedFormExpectation,
            0.0,
        )
    } else {
        let (nodes, weights) = gauss_hermite_standard_normal(96);
        let l = DMatrix::<f64>::identity(2, 2) * sigma2.sqrt();
        let n2 = nf * nf;
        (
            gh_numerator(&l, n2 * (x - y), u_set, &nodes, &weights),
            DensityMethod::GaussHermite,
            f64::NAN,
        )
    };
    Ok(DensityEval {
        value: numerator / (2.0 * std::f64::consts::PI * det_sigma.sqrt()),
        numerator,
        det_sigma,
        method,
        rel_error_estimate: if rel.is_nan() { 0.0 } else { rel },
        degenerate: false,
    })
}

/// Expected pair count `E mu(U)`: the double integral of `p1` over the
/// axis-free window in `x` (uniform panel rule) and the proximity range in
/// `r = y - x` (adaptive in the scaled separation `g = n^2 r`, over dyadic
/// panels so the `O(|U|)`-wide indicator feature near `g = 0` is never
/// stepped over). The inner expectation uses the exact angular reduction.
pub fn mean_mu_integral(n: usize, u: (f64, f64)) -> Result<f64> {
    if !(u.0 < u.1) {
        return Ok(0.0);
    }
    let n2 = (n as f64) * (n as f64);
    let eta_scaled = proximity_cutoff(n, 1.0) * n2;
    let margin = axis_margin(n, 1.0);
    let (lo, hi) = (margin, std::f64::consts::PI - margin);
    let u_set = [u];

    // Dyadic panel edges 0, 1, 2, 4, ... out to the cutoff, both signs.
    let mut edges = vec![0.0f64, eta_scaled.min(1.0)];
    while *edges.last().unwrap() < eta_scaled {
        let next = edges.last().unwrap() * 2.0;
        edges.push(next.min(eta_scaled));
    }

    let panels = 32usize;
    let h = (hi - lo) / panels as f64;
    let scale = (u.1 - u.0).abs() / (12.0 * std::f64::consts::PI);
    let mut total = 0.0;
    for p in 0..panels {
        let x = lo + (p as f64 + 0.5) * h;
        let integrand = |g: f64| -> f64 {
            p1_value_exact(n, x, x + g / n2, &u_set)
                .expect("interior points give nonsingular blocks")
                / n2
        };
        let mut inner = 0.0;
        for w in edges.windows(2) {
            for (a, b) in [(w[0], w[1]), (-w[1], -w[0])] {
                inner += adaptive_simpson(&integrand, a, b, 2e-5 * scale.max(1e-8), 16);
            }
        }
        total += inner * h;
    }
    Ok(total)
}

fn has_coincident(points: &[f64]) -> bool {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return true;
            }
        }
    }
    false
}

fn degenerate_eval(method: DensityMethod) -> DensityEval {
    DensityEval {
        value: 0.0,
        numerator: 0.0,
        det_sigma: 0.0,
        method,
        rel_error_estimate: 0.0,
        degenerate: true,
    }
}

/// Monte Carlo mean of `prod |v_i|` under `N(0, L L^T)`, with antithetic
/// pairs; the integrand is even, so the mate of `u` contributes the same
/// value and each pair reduces to one evaluation. Returns
/// `(mean, standard error)` over the pair means.
fn mc_abs_product(l: &DMatrix<f64>, pairs: usize, seed: u64) -> (f64, f64) {
    let d = l.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut u = vec![0.0f64; d];
    for _ in 0..pairs {
        for ui in u.iter_mut() {
            *ui = rng.sample(StandardNormal);
        }
        let mut pair_mean = 1.0f64;
        for i in 0..d {
            let mut vi = 0.0;
            for j in 0..d {
                vi += l[(i, j)] * u[j];
            }
            pair_mean *= vi.abs();
        }
        sum += pair_mean;
        sumsq += pair_mean * pair_mean;
    }
    let mean = sum / pairs as f64;
    let var = (sumsq / pairs as f64 - mean * mean).max(0.0);
    (mean, (var / pairs as f64).sqrt())
}

/// `k`-pair Kac-Rice density with default Monte Carlo budget.
pub fn pk_density(n: usize, xs: &[f64], ys: &[f64]) -> Result<DensityEval> {
    pk_density_with(n, xs, ys, 100_000, 0x9e3779b97f4a7c15)
}

/// `k`-pair density `p_k(x, y)` (no target-set indicator): numerator by
/// conditioned Monte Carlo with antithetic pairs, denominator exact.
/// Coincident locations within `xs` or within `ys` give the degenerate
/// zero value by convention.
pub fn pk_density_with(
    n: usize,
    xs: &[f64],
    ys: &[f64],
    mc_pairs: usize,
    seed: u64,
) -> Result<DensityEval> {
    let k = xs.len();
    if k == 0 || k > 3 || ys.len() != k {
        return Err(Error::InvalidParameter(
            "need 1 <= k <= 3 with matching xs/ys".into(),
        ));
    }
    if has_coincident(xs) || has_coincident(ys) {
        return Ok(degenerate_eval(DensityMethod::MonteCarlo));
    }
    let (m, det_sigma) = match conditioned_pair_covariance(n, xs, ys) {
        Ok(v) => v,
        Err(Error::SingularPinnedBlock { .. }) => {
            return Ok(degenerate_eval(DensityMethod::MonteCarlo))
        }
        Err(e) => return Err(e),
    };
    let l = factor_covariance(&m);
    let (numerator, se) = mc_abs_product(&l, mc_pairs, seed);
    let denom = (2.0 * std::f64::consts::PI).powi(k as i32) * det_sigma.sqrt();
    Ok(DensityEval {
        value: numerator / denom,
        numerator,
        det_sigma,
        method: DensityMethod::MonteCarlo,
        rel_error_estimate: se / numerator.abs().max(1e-300),
        degenerate: false,
    })
}

/// Expected number of zeros of `X` or `Y` on a sub-interval of the
/// axis-free window, by integrating the one-dimensional Kac-Rice intensity
/// `(1/pi) sqrt(Var(F' | F = 0) / Var F)` built from the exact kernels.
pub fn kacrice_zero_count(n: usize, which: ProcessFn, interval: (f64, f64)) -> Result<f64> {
    assert!(matches!(which, ProcessFn::X | ProcessFn::Y));
    let margin = axis_margin(n, 1.0);
    if interval.0 < margin || interval.1 > std::f64::consts::PI - margin || interval.0 > interval.1
    {
        return Err(Error::InvalidParameter(
            "interval must sit inside the axis-free window".into(),
        ));
    }
    if interval.0 == interval.1 {
        return Ok(0.0);
    }
    let intensity = |x: f64| -> f64 {
        let var_f = cov_finite(n, which, 0, which, 0, x, x);
        let var_df = cov_finite(n, which, 1, which, 1, x, x);
        let cross = cov_finite(n, which, 0, which, 1, x, x);
        let cond = (var_df - cross * cross / var_f).max(0.0);
        (cond / var_f).sqrt() / std::f64::consts::PI
    };
    let tol = 1e-8 * (n as f64) * (interval.1 - interval.0) + 1e-12;
    Ok(adaptive_simpson(&intensity, interval.0, interval.1, tol, 24))
}

fn log_min_gap_product(points: &[f64], n: usize) -> f64 {
    let cap = 1.0 / n as f64;
    let mut total = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            total += 2.0 * (points[j] - points[i]).abs().min(cap).ln();
        }
    }
    total
}

/// Determinant lower-bound monitor: returns `(det Sigma_k, ratio)` where
/// `ratio = det / (n^{2k^2} prod min(gap, 1/n)^2)` over both coordinate
/// families. The ratio should stay bounded away from zero across sweeps.
pub fn det_lower_bound_monitor(n: usize, xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let k = xs.len();
    if k == 0 || k > 3 || ys.len() != k {
        return Err(Error::InvalidParameter(
            "need 1 <= k <= 3 with matching xs/ys".into(),
        ));
    }
    let mut spec = Vec::with_capacity(2 * k);
    for &x in xs {
        spec.push(RowSpec::new(ProcessFn::X, 0, x));
    }
    for &y in ys {
        spec.push(RowSpec::new(ProcessFn::Y, 0, y));
    }
    let block = covariance_block(n, &spec)?;
    let det = block.determinant();
    let nf = n as f64;
    let log_bound = 2.0 * (k * k) as f64 * nf.ln()
        + log_min_gap_product(xs, n)
        + log_min_gap_product(ys, n);
    let ratio = if det > 0.0 {
        (det.ln() - log_bound).exp()
    } else {
        0.0
    };
    Ok((det, ratio))
}

/// Numerator upper-bound monitor with default Monte Carlo budget.
pub fn numerator_bound_monitor(n: usize, xs: &[f64], ys: &[f64]) -> Result<f64> {
    numerator_bound_monitor_with(n, xs, ys, 100_000, 0xd1b54a32d192ed03)
}

/// Numerator upper-bound monitor: estimates
/// `alpha_k = E[prod |X'(x_i) Y'(y_i)| | all zeros]` by conditioned Monte
/// Carlo and returns `alpha_k / (n^{2k^2 + k} prod min(gap, 1/n)^2)`.
pub fn numerator_bound_monitor_with(
    n: usize,
    xs: &[f64],
    ys: &[f64],
    mc_pairs: usize,
    seed: u64,
) -> Result<f64> {
    let k = xs.len();
    if k == 0 || k > 2 || ys.len() != k {
        return Err(Error::InvalidParameter(
            "need 1 <= k <= 2 with matching xs/ys".into(),
        ));
    }
    let (m, _) = conditioned_pair_covariance(n, xs, ys)?;
    let l = factor_covariance(&m);
    let (alpha, _se) = mc_abs_product(&l, mc_pairs, seed);
    let nf = n as f64;
    let log_bound = (2.0 * (k * k) as f64 + k as f64) * nf.ln()
        + log_min_gap_product(xs, n)
        + log_min_gap_product(ys, n);
    Ok((alpha.ln() - log_bound).exp())
}

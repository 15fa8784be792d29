//! The limiting local process `(W, Z)`: the stationary Gaussian pair with
//! `Cov(W(t), W(s)) = sin(t-s)/(2(t-s))` and cross-covariance
//! `E[Z(t) W(s)] = (1 - cos(t-s))/(2(t-s))`, equal in law to the `1/n`-scale
//! limit of the normalized circle pair (`X -> W`, `Y -> Z` at `t = n x`).
//!
//! Everything is evaluated through the moment integrals
//! `int_0^1 theta^m trig(u theta + phi) dtheta`, which stay regular at
//! `u = 0`; a short Taylor series takes over below `|u| = 1e-4` and an
//! oscillation-aware adaptive Simpson elsewhere.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::quad::{adaptive_simpson_oscillatory, gauss_legendre_01};
use super::{check_duplicates, CovarianceMatrix, ProcessFn, RowSpec};
use crate::{Error, Result};

const SERIES_CUT: f64 = 1e-4;

/// `int_0^1 theta^m cos(u theta) dtheta` by series (small `u` only).
fn moment_cos_series(m: usize, u: f64) -> f64 {
    let mut total = 0.0;
    let mut u2p = 1.0;
    let mut fact = 1.0;
    for p in 0..6u32 {
        let denom = fact * (m as f64 + 2.0 * p as f64 + 1.0);
        total += if p % 2 == 0 { u2p / denom } else { -u2p / denom };
        u2p *= u * u;
        fact *= (2.0 * p as f64 + 1.0) * (2.0 * p as f64 + 2.0);
    }
    total
}

/// `int_0^1 theta^m sin(u theta) dtheta` by series (small `u` only).
fn moment_sin_series(m: usize, u: f64) -> f64 {
    let mut total = 0.0;
    let mut upow = u;
    let mut fact = 1.0;
    for p in 0..6u32 {
        let denom = fact * (m as f64 + 2.0 * p as f64 + 2.0);
        total += if p % 2 == 0 { upow / denom } else { -upow / denom };
        upow *= u * u;
        fact *= (2.0 * p as f64 + 2.0) * (2.0 * p as f64 + 3.0);
    }
    total
}

/// `int_0^1 theta^m cos(u theta + phi) dtheta`.
pub(crate) fn theta_moment_cos(m: usize, u: f64, phi: f64) -> f64 {
    if u.abs() < SERIES_CUT {
        phi.cos() * moment_cos_series(m, u) - phi.sin() * moment_sin_series(m, u)
    } else {
        let cycles = u.abs() / (2.0 * std::f64::consts::PI);
        adaptive_simpson_oscillatory(
            &|t: f64| t.powi(m as i32) * (u * t + phi).cos(),
            0.0,
            1.0,
            1e-13,
            cycles,
        )
    }
}

fn theta_moment_sin(m: usize, u: f64, phi: f64) -> f64 {
    // sin(x) = cos(x - pi/2)
    theta_moment_cos(m, u, phi - std::f64::consts::FRAC_PI_2)
}

/// Covariance of the limit pair and its derivatives:
/// `Cov(F^{(a)}(t), G^{(b)}(s))` for `F, G` in `{W, Z}`.
pub fn limit_cov(f: ProcessFn, a: usize, g: ProcessFn, b: usize, t: f64, s: f64) -> f64 {
    assert!(a <= 6 && b <= 6, "derivative order capped at 6");
    assert!(
        matches!(f, ProcessFn::W | ProcessFn::Z) && matches!(g, ProcessFn::W | ProcessFn::Z),
        "limit_cov is for the limit pair; use cov_finite for X/Y"
    );
    let m = a + b;
    let u = t - s;
    let phi = (a as f64 - b as f64) * std::f64::consts::FRAC_PI_2;
    match (f, g) {
        (ProcessFn::W, ProcessFn::W) | (ProcessFn::Z, ProcessFn::Z) => {
            0.5 * theta_moment_cos(m, u, phi)
        }
        (ProcessFn::Z, ProcessFn::W) => 0.5 * theta_moment_sin(m, u, phi),
        (ProcessFn::W, ProcessFn::Z) => -0.5 * theta_moment_sin(m, u, phi),
        _ => unreachable!(),
    }
}

/// Assemble the covariance matrix of the requested limit-pair rows.
pub fn limit_block(spec: &[RowSpec]) -> Result<CovarianceMatrix> {
    check_duplicates(spec)?;
    let d = spec.len();
    let mut entries = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let v = limit_cov(
                spec[i].func,
                spec[i].order,
                spec[j].func,
                spec[j].order,
                spec[i].location,
                spec[j].location,
            );
            entries[(i, j)] = v;
            entries[(j, i)] = v;
        }
    }
    Ok(CovarianceMatrix {
        entries,
        labels: spec.to_vec(),
    })
}

/// Row layout used for quadratic forms and eigenvalue bounds over `r` points
/// and derivative orders `0..=s`: all `W` rows first, then all `Z` rows,
/// each point-major.
pub fn limit_spec(zs: &[f64], s_max: usize) -> Vec<RowSpec> {
    let mut spec = Vec::with_capacity(2 * zs.len() * (s_max + 1));
    for func in [ProcessFn::W, ProcessFn::Z] {
        for &z in zs {
            for j in 0..=s_max {
                spec.push(RowSpec::new(func, j, z));
            }
        }
    }
    spec
}

/// Both sides of the quadratic-form identity: the left side is
/// `v^T Sigma v` with `Sigma` the assembled limit block; the right side is
/// `(1/2) int_0^1 |F_v(theta)|^2 dtheta` for the exponential polynomial
/// `F_v(theta) = sum (x_{a,b} - i y_{a,b}) (i theta)^b e^{i z_a theta}`,
/// where `x` weights the `W` rows and `y` the `Z` rows.
pub fn quadratic_form_integral(zs: &[f64], s_max: usize, v: &[f64]) -> Result<(f64, f64)> {
    let r = zs.len();
    let per = s_max + 1;
    if v.len() != 2 * r * per {
        return Err(Error::InvalidParameter(format!(
            "coefficient vector must have length {}, got {}",
            2 * r * per,
            v.len()
        )));
    }
    let spec = limit_spec(zs, s_max);
    let sigma = limit_block(&spec)?;
    let mut lhs = 0.0;
    for i in 0..v.len() {
        for j in 0..v.len() {
            lhs += v[i] * sigma.entries[(i, j)] * v[j];
        }
    }

    let spread = zs.iter().fold(0.0f64, |acc, &z| acc.max(z.abs()))
        + zs
            .iter()
            .flat_map(|&a| zs.iter().map(move |&b| (a - b).abs()))
            .fold(0.0f64, f64::max);
    let f_v = |theta: f64| -> f64 {
        let mut total = Complex64::new(0.0, 0.0);
        let itheta = Complex64::new(0.0, theta);
        for (ai, &z) in zs.iter().enumerate() {
            let phase = (Complex64::new(0.0, 1.0) * z * theta).exp();
            let mut pow = Complex64::new(1.0, 0.0);
            for b in 0..per {
                let xw = v[ai * per + b];
                let yw = v[r * per + ai * per + b];
                total += Complex64::new(xw, -yw) * pow * phase;
                pow *= itheta;
            }
        }
        total.norm_sqr()
    };
    let cycles = spread / std::f64::consts::PI + s_max as f64 + 1.0;
    let rhs = 0.5 * adaptive_simpson_oscillatory(&f_v, 0.0, 1.0, 1e-12, cycles);
    Ok((lhs, rhs))
}

/// Smallest eigenvalue of the limit block over `r` points and orders
/// `0..=s_max`.
pub fn min_eig_limit(zs: &[f64], s_max: usize) -> f64 {
    let spec = limit_spec(zs, s_max);
    let sigma = limit_block(&spec).expect("distinct points give distinct rows");
    sigma.min_eigenvalue()
}

/// Spectral simulation of the limit pair on a grid of times.
///
/// With `(theta_j, v_j)` a Gauss-Legendre rule on `[0, 1]` and iid standard
/// normals `xi, xi'`:
/// `W(t) = 2^{-1/2} sum_j sqrt(v_j) (cos(t theta_j) xi_j + sin(t theta_j) xi'_j)`
/// `Z(t) = 2^{-1/2} sum_j sqrt(v_j) (sin(t theta_j) xi_j - cos(t theta_j) xi'_j)`
/// which reproduces every covariance in [`limit_cov`] up to quadrature error.
pub fn simulate_limit_process(
    grid: &[f64],
    spectral_nodes: usize,
    seed: u64,
) -> (Vec<f64>, Vec<f64>) {
    assert!(spectral_nodes >= 64, "need at least 64 spectral nodes");
    let (nodes, weights) = gauss_legendre_01(spectral_nodes);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi: Vec<f64> = (0..spectral_nodes)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let xi2: Vec<f64> = (0..spectral_nodes)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut w = Vec::with_capacity(grid.len());
    let mut z = Vec::with_capacity(grid.len());
    for &t in grid {
        let mut wt = 0.0;
        let mut zt = 0.0;
        for j in 0..spectral_nodes {
            let sw = weights[j].sqrt();
            let (sin, cos) = (t * nodes[j]).sin_cos();
            wt += sw * (cos * xi[j] + sin * xi2[j]);
            zt += sw * (sin * xi[j] - cos * xi2[j]);
        }
        w.push(inv_sqrt2 * wt);
        z.push(inv_sqrt2 * zt);
    }
    (w, z)
}

//! Sampling of random polynomial draws and evaluation of `f`, its circle
//! restriction `X(x) + iY(x) = f(e^{ix})`, and their derivatives.
//!
//! The grid evaluator goes through a single inverse FFT of the zero-padded
//! coefficient sequence; direct summation is kept as the point evaluator
//! (and as the test oracle for the transform path).

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Coefficient law for one draw.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientLaw {
    /// iid standard normal coefficients.
    Gaussian,
    /// iid uniform signs in `{-1, +1}` (exploratory knob, no acceptance
    /// criteria attached).
    Rademacher,
}

/// One sampled polynomial: `f(z) = sum_{k=0}^n coeffs[k] z^k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoefficientVector {
    pub n: usize,
    pub coeffs: Vec<f64>,
    pub law: CoefficientLaw,
    pub seed: u64,
}

/// Values of `X` and `Y` (and optionally their derivatives) on a uniform
/// angle grid. Carries the source coefficients so zero refinement can
/// re-evaluate between grid points.
#[derive(Clone, Debug)]
pub struct CircleSample {
    pub m: usize,
    pub angles: Vec<f64>,
    pub x_values: Vec<f64>,
    pub y_values: Vec<f64>,
    /// order -> (X^(j) grid, Y^(j) grid) for orders >= 1.
    pub derivative_orders: BTreeMap<usize, (Vec<f64>, Vec<f64>)>,
    pub coeffs: Vec<f64>,
}

/// Draw a degree-`n` polynomial. Deterministic in `(n, seed, law)`.
pub fn sample_polynomial(n: usize, seed: u64, law: CoefficientLaw) -> Result<CoefficientVector> {
    if n == 0 {
        return Err(Error::DegenerateDegree);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..=n)
        .map(|_| match law {
            CoefficientLaw::Gaussian => rng.sample(StandardNormal),
            CoefficientLaw::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        })
        .collect();
    Ok(CoefficientVector { n, coeffs, law, seed })
}

/// Horner evaluation of `f(z)`.
pub fn eval_complex(f: &CoefficientVector, z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in f.coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Horner evaluation of `(f(z), f'(z))` in one pass.
pub fn eval_complex_with_derivative(f: &CoefficientVector, z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in f.coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn fft_grid(coeffs: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    buf[..coeffs.len()].copy_from_slice(coeffs);
    let fft = FftPlanner::new().plan_fft_inverse(m);
    // Unnormalized inverse transform: out[i] = sum_k buf[k] e^{+2\pi i k i / m}.
    fft.process(&mut buf);
    buf
}

/// Evaluate `X`, `Y` on `m` uniform angles via the transform path.
///
/// Requires `m >= 2(n+1)` so the grid is alias-free and zero localization
/// between grid points is reliable.
pub fn eval_circle_grid(f: &CoefficientVector, m: usize) -> Result<CircleSample> {
    eval_circle_grid_with_derivatives(f, m, 0)
}

/// Same as [`eval_circle_grid`], additionally filling derivative grids up to
/// `max_order` (inclusive).
pub fn eval_circle_grid_with_derivatives(
    f: &CoefficientVector,
    m: usize,
    max_order: usize,
) -> Result<CircleSample> {
    let min = 2 * (f.n + 1);
    if m < min {
        return Err(Error::GridTooCoarse { got: m, min });
    }
    let angles: Vec<f64> = (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect();

    let base: Vec<Complex64> = f.coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect();
    let grid = fft_grid(&base, m);
    let x_values = grid.iter().map(|v| v.re).collect();
    let y_values = grid.iter().map(|v| v.im).collect();

    let mut derivative_orders = BTreeMap::new();
    for j in 1..=max_order {
        // X^(j) + i Y^(j) has spectral coefficients eps_k k^j i^j.
        let rot = Complex64::new(0.0, 1.0).powu(j as u32);
        let cj: Vec<Complex64> = f
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| rot * c * (k as f64).powi(j as i32))
            .collect();
        let g = fft_grid(&cj, m);
        derivative_orders.insert(j, (g.iter().map(|v| v.re).collect(), g.iter().map(|v| v.im).collect()));
    }

    Ok(CircleSample {
        m,
        angles,
        x_values,
        y_values,
        derivative_orders,
        coeffs: f.coeffs.clone(),
    })
}

/// Direct-summation values of `(X^(j)(x), Y^(j)(x))` for `j = 0..=max_order`.
///
/// `X^(j)(x) = sum_k eps_k k^j cos(kx + j pi/2)` and likewise with sine.
/// Orders above 6 are unsupported (never needed).
pub fn eval_derivatives(f: &CoefficientVector, x: f64, max_order: usize) -> Vec<(f64, f64)> {
    assert!(max_order <= 6, "derivative order capped at 6");
    let mut out = vec![(0.0, 0.0); max_order + 1];
    for (k, &c) in f.coeffs.iter().enumerate() {
        let kf = k as f64;
        let mut kp = 1.0;
        for (j, slot) in out.iter_mut().enumerate() {
            let phase = kf * x + j as f64 * PI / 2.0;
            slot.0 += c * kp * phase.cos();
            slot.1 += c * kp * phase.sin();
            kp *= kf;
        }
    }
    out
}

/// Direct summation of `X(x)` or `Y(x)` from raw coefficients.
pub(crate) fn eval_trig_direct(coeffs: &[f64], x: f64, imaginary: bool) -> f64 {
    let mut acc = 0.0;
    for (k, &c) in coeffs.iter().enumerate() {
        let kx = k as f64 * x;
        acc += c * if imaginary { kx.sin() } else { kx.cos() };
    }
    acc
}

/// Maximum of `|f|` on the unit circle: coarse grid of `16(n+1)` points,
/// then golden-section refinement around the grid argmax.
pub fn sup_norm_circle(f: &CoefficientVector) -> f64 {
    let m = 16 * (f.n + 1);
    let sample = eval_circle_grid(f, m).expect("grid above Nyquist margin");
    let mut best = 0;
    let mut best_sq = -1.0;
    for i in 0..m {
        let sq = sample.x_values[i] * sample.x_values[i] + sample.y_values[i] * sample.y_values[i];
        if sq > best_sq {
            best_sq = sq;
            best = i;
        }
    }
    let step = 2.0 * PI / m as f64;
    let center = sample.angles[best];
    let g = |x: f64| eval_complex(f, Complex64::new(0.0, x).exp()).norm_sqr();
    let refined = golden_max(g, center - step, center + step);
    refined.max(best_sq).sqrt()
}

/// Golden-section search for the maximum of `g` on `[a, b]`.
fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..80 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
    }
    gc.max(gd)
}

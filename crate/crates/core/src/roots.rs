//! Root finding: all complex roots of a draw via Aberth-Ehrlich
//! simultaneous iteration, and zeros of `X`/`Y` on the circle inside the
//! angular window that stays clear of the real axis.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::gpoly::{eval_complex_with_derivative, eval_trig_direct, CircleSample, CoefficientVector};
use crate::{Error, Result};

/// All complex roots of one draw with residual metadata.
#[derive(Clone, Debug)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// Certified residual per root: `|f(root)|` for roots inside the unit
    /// disk, `|f(root)| / |root|^n` (the coefficient-reversed evaluation)
    /// outside. Direct evaluation at `|z| > 1` is drowned by the `|z|^n`
    /// roundoff amplification, so the reversed form is the one that is
    /// numerically meaningful there.
    pub residuals: Vec<f64>,
    /// Aberth sweeps used.
    pub iterations: usize,
    pub converged: bool,
}

/// Which circle function a zero set belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrigTarget {
    X,
    Y,
}

/// Zeros of `X` or `Y` in the axis-free window, sorted increasing.
#[derive(Clone, Debug)]
pub struct CircleZeroSet {
    pub zeros: Vec<f64>,
    /// Derivative of the target function at each refined zero.
    pub derivative_at_zero: Vec<f64>,
    pub which: TrigTarget,
    /// Grid angles where a double zero is suspected (tiny value, no sign
    /// change); recorded, never silently dropped.
    pub suspected_double: Vec<f64>,
}

/// Angular margin of the axis-free window: zeros are kept only in
/// `[margin, pi - margin]` with `margin = mult * n^{-1/2}`.
pub fn axis_margin(n: usize, mult: f64) -> f64 {
    mult / (n as f64).sqrt()
}

const GOLDEN_FRACTION: f64 = 0.618_033_988_749_894_8;

/// Find all `n` complex roots by Aberth-Ehrlich iteration.
///
/// Starts from `n` points on the circle of radius `(|eps_0|/|eps_n|)^{1/n}`
/// with equispaced, irrationally rotated arguments; sweeps until the largest
/// per-root correction drops below `tol` or `max_sweeps` is hit; polishes
/// every root with two Newton steps. Convergence failure is reported via the
/// `converged` flag, never silently.
pub fn find_all_roots(f: &CoefficientVector, tol: f64, max_sweeps: usize) -> Result<RootSet> {
    let n = f.n;
    let lead = f.coeffs[n];
    if lead == 0.0 {
        return Err(Error::ZeroLeadingCoefficient);
    }
    if tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }

    let a0 = f.coeffs[0].abs();
    let radius = if a0 == 0.0 {
        1.0
    } else {
        (a0 / lead.abs()).powf(1.0 / n as f64)
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let arg = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + GOLDEN_FRACTION;
            Complex64::from_polar(radius, arg)
        })
        .collect();

    let reversed = reversed_coefficients(f);
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < max_sweeps {
        sweeps += 1;
        let mut max_step = 0.0f64;
        for i in 0..n {
            // Coincident iterates make the mutual-repulsion term swallow the
            // Newton correction and freeze a bogus pair in place; kick such
            // pairs apart before they can fake convergence.
            let mut min_dist = f64::INFINITY;
            let mut repulsion = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    min_dist = min_dist.min(d.norm());
                    repulsion += d.inv();
                }
            }
            if min_dist < 1e-9 * (1.0 + z[i].norm()) {
                let kick = 1e-4 * (1.0 + (i as f64) / n as f64);
                z[i] += Complex64::from_polar(kick, 2.0 * (i as f64) + 1.0);
                max_step = f64::INFINITY;
                continue;
            }
            let newton = match newton_ratio(f, &reversed, z[i], tol) {
                Some(v) => v,
                None => continue, // exactly on a root
            };
            let denom = Complex64::new(1.0, 0.0) - newton * repulsion;
            let mut step = if denom == Complex64::new(0.0, 0.0) {
                newton
            } else {
                newton / denom
            };
            if !step.is_finite() {
                // Numerical breakdown; pull the point back toward the
                // cluster rather than leaving it stranded.
                z[i] *= 0.5;
                max_step = f64::INFINITY;
                continue;
            }
            // Trust region: wild early steps are what strand iterates far
            // from the root cluster in the first place.
            let cap = 0.1 * (1.0 + z[i].norm());
            if step.norm() > cap {
                step *= cap / step.norm();
            }
            z[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < tol {
            converged = true;
            break;
        }
    }

    // Newton polish; roots outside the unit disk are polished as roots of
    // the coefficient-reversed polynomial at 1/z, where evaluation is
    // backward stable.
    for zi in z.iter_mut() {
        for _ in 0..2 {
            if zi.norm() <= 1.0 {
                let (p, dp) = eval_complex_with_derivative(f, *zi);
                if dp != Complex64::new(0.0, 0.0) {
                    let step = p / dp;
                    if step.is_finite() && step.norm() < 0.1 {
                        *zi -= step;
                    }
                }
            } else {
                let w = zi.inv();
                let (p, dp) = eval_complex_with_derivative(&reversed, w);
                if dp != Complex64::new(0.0, 0.0) {
                    let step = p / dp;
                    if step.is_finite() && step.norm() < 0.1 {
                        *zi = (w - step).inv();
                    }
                }
            }
        }
    }

    let residuals = z.iter().map(|&zi| certified_residual(f, &reversed, zi)).collect();
    Ok(RootSet {
        roots: z,
        residuals,
        iterations: sweeps,
        converged,
    })
}

/// Newton ratio `f(z) / f'(z)`, evaluated directly inside the unit disk and
/// through the coefficient-reversed polynomial outside it:
/// with `w = 1/z`, `f(z) = z^n f_R(w)` gives
/// `f/f' = z f_R(w) / (n f_R(w) - w f_R'(w))`, which never touches the
/// overflowing `|z|^n` scale. Returns `None` exactly on a root.
fn newton_ratio(
    f: &CoefficientVector,
    reversed: &CoefficientVector,
    z: Complex64,
    tol: f64,
) -> Option<Complex64> {
    if z.norm() <= 1.0 {
        let (p, dp) = eval_complex_with_derivative(f, z);
        if p == Complex64::new(0.0, 0.0) {
            return None;
        }
        if dp == Complex64::new(0.0, 0.0) {
            // Derivative vanished exactly; nudge off the saddle.
            return Some(Complex64::new(tol, tol));
        }
        Some(p / dp)
    } else {
        let w = z.inv();
        let (p, dp) = eval_complex_with_derivative(reversed, w);
        if p == Complex64::new(0.0, 0.0) {
            return None;
        }
        let denom = Complex64::new(f.n as f64, 0.0) * p - w * dp;
        if denom == Complex64::new(0.0, 0.0) {
            return Some(Complex64::new(tol, tol));
        }
        Some(z * p / denom)
    }
}

fn reversed_coefficients(f: &CoefficientVector) -> CoefficientVector {
    let mut coeffs = f.coeffs.clone();
    coeffs.reverse();
    CoefficientVector {
        n: f.n,
        coeffs,
        law: f.law,
        seed: f.seed,
    }
}

fn certified_residual(f: &CoefficientVector, reversed: &CoefficientVector, z: Complex64) -> f64 {
    if z.norm() <= 1.0 {
        eval_complex_with_derivative(f, z).0.norm()
    } else {
        eval_complex_with_derivative(reversed, z.inv()).0.norm()
    }
}

/// Upper-half-plane representatives of the root set: complex roots with
/// `Im > 0` plus real roots counted once (a real root appears once in the
/// solver output and is its own conjugate).
pub(crate) fn upper_half_roots(rs: &RootSet) -> impl Iterator<Item = Complex64> + '_ {
    rs.roots.iter().copied().filter(|z| z.im > -1e-12)
}

/// Roots of the annulus window: upper-half roots with scaled radial
/// distance `(|z| - 1) n^2` inside `window`, returned as
/// `(scaled_distance, arg)` pairs.
pub fn annulus_roots(rs: &RootSet, n: usize, window: (f64, f64)) -> Vec<(f64, f64)> {
    let n2 = (n as f64) * (n as f64);
    upper_half_roots(rs)
        .filter_map(|z| {
            let scaled = (z.norm() - 1.0) * n2;
            (scaled > window.0 && scaled < window.1).then(|| (scaled, z.arg().abs()))
        })
        .collect()
}

/// Minimum pairwise complex distance among annulus-window roots, scaled by
/// `n^2`. Returns `+inf` when fewer than two roots fall in the window.
pub fn min_root_gap(rs: &RootSet, n: usize, window: (f64, f64)) -> f64 {
    let n2 = (n as f64) * (n as f64);
    let in_window: Vec<Complex64> = upper_half_roots(rs)
        .filter(|z| {
            let scaled = (z.norm() - 1.0) * n2;
            scaled > window.0 && scaled < window.1
        })
        .collect();
    if in_window.len() < 2 {
        return f64::INFINITY;
    }
    let mut best = f64::INFINITY;
    for i in 0..in_window.len() {
        for j in i + 1..in_window.len() {
            best = best.min((in_window[i] - in_window[j]).norm());
        }
    }
    best * n2
}

/// Zeros of `X` or `Y` on the circle inside the axis-free window.
///
/// Sign changes between adjacent grid points are bracketed, refined by
/// bisection to width `1e-14`, and finished with one Newton step. Grid points
/// carrying a suspiciously small value without a sign change are recorded in
/// the `suspected_double` diagnostics list.
pub fn trig_zeros(sample: &CircleSample, which: TrigTarget, n: usize) -> Result<CircleZeroSet> {
    trig_zeros_with_margin(sample, which, n, 1.0)
}

/// [`trig_zeros`] with a configurable multiplier on the `n^{-1/2}` axis
/// margin, for sensitivity studies.
pub fn trig_zeros_with_margin(
    sample: &CircleSample,
    which: TrigTarget,
    n: usize,
    margin_mult: f64,
) -> Result<CircleZeroSet> {
    let min = 8 * (n + 1);
    if sample.m < min {
        return Err(Error::GridTooCoarse { got: sample.m, min });
    }
    let values = match which {
        TrigTarget::X => &sample.x_values,
        TrigTarget::Y => &sample.y_values,
    };
    let imaginary = which == TrigTarget::Y;
    let scale = sample.coeffs.iter().map(|c| c.abs()).fold(0.0f64, f64::max);
    let floor = 1e-12 * (n as f64 + 1.0) * scale.max(1.0);
    if values.iter().all(|v| v.abs() <= floor) {
        return Err(Error::DegenerateTarget);
    }

    let margin = axis_margin(n, margin_mult);
    let (lo, hi) = (margin, std::f64::consts::PI - margin);
    let eval = |x: f64| eval_trig_direct(&sample.coeffs, x, imaginary);
    let small = 1e-9 * (n as f64).sqrt();

    let mut zeros = Vec::new();
    let mut derivative_at_zero = Vec::new();
    let mut suspected_double = Vec::new();

    // Scan one grid step past the window so brackets straddling the edge
    // are still refined; the refined zero decides membership.
    let step = 2.0 * std::f64::consts::PI / sample.m as f64;
    let first = ((lo - step).max(0.0) / step) as usize;
    let last = (((hi + step) / step) as usize).min(sample.m - 1);
    for i in first..last {
        let (a, b) = (sample.angles[i], sample.angles[i + 1]);
        let (va, vb) = (values[i], values[i + 1]);
        if va == 0.0 {
            if a > lo && a < hi {
                zeros.push(a);
                derivative_at_zero.push(derivative_at(sample, a, which));
            }
            continue;
        }
        if va * vb < 0.0 {
            let mut x0 = a;
            let mut x1 = b;
            let mut v0 = va;
            while x1 - x0 > 1e-14 {
                let mid = 0.5 * (x0 + x1);
                let vm = eval(mid);
                if vm == 0.0 {
                    x0 = mid;
                    x1 = mid;
                    break;
                }
                if v0 * vm < 0.0 {
                    x1 = mid;
                } else {
                    x0 = mid;
                    v0 = vm;
                }
            }
            let mut z = 0.5 * (x0 + x1);
            // One Newton step sharpens the bisection result.
            let d = derivative_at(sample, z, which);
            let v = eval(z);
            if d != 0.0 {
                let newton = z - v / d;
                if (newton - z).abs() < step {
                    z = newton;
                }
            }
            if z > lo && z < hi {
                zeros.push(z);
                derivative_at_zero.push(derivative_at(sample, z, which));
            }
        } else if i > 0 && va.abs() < small && values[i - 1] * va > 0.0 && va * vb > 0.0 {
            if a > lo && a < hi {
                suspected_double.push(a);
            }
        }
    }

    Ok(CircleZeroSet {
        zeros,
        derivative_at_zero,
        which,
        suspected_double,
    })
}

fn derivative_at(sample: &CircleSample, x: f64, which: TrigTarget) -> f64 {
    let mut acc = 0.0;
    for (k, &c) in sample.coeffs.iter().enumerate() {
        let kf = k as f64;
        let kx = kf * x;
        acc += match which {
            TrigTarget::X => -c * kf * kx.sin(),
            TrigTarget::Y => c * kf * kx.cos(),
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gpoly::{eval_circle_grid, sample_polynomial, sup_norm_circle, CoefficientLaw};

    fn poly(coeffs: &[f64]) -> CoefficientVector {
        CoefficientVector {
            n: coeffs.len() - 1,
            coeffs: coeffs.to_vec(),
            law: CoefficientLaw::Gaussian,
            seed: 0,
        }
    }

    #[test]
    fn quadratic_roots() {
        let rs = find_all_roots(&poly(&[-1.0, 0.0, 1.0]), 1e-14, 100).unwrap();
        assert!(rs.converged);
        let mut re: Vec<f64> = rs.roots.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-12);
        assert!((re[1] - 1.0).abs() < 1e-12);
        assert!(rs.roots.iter().all(|z| z.im.abs() < 1e-12));
    }

    #[test]
    fn deflated_cubic() {
        // z^3 - z = z (z^2 - 1); deflating the factor z leaves z^2 - 1.
        let rs = find_all_roots(&poly(&[-1.0, 0.0, 1.0]), 1e-14, 100).unwrap();
        assert_eq!(rs.roots.len(), 2);
        assert!(rs.residuals.iter().all(|&r| r < 1e-12));
    }

    #[test]
    fn zero_leading_coefficient_rejected() {
        assert!(matches!(
            find_all_roots(&poly(&[1.0, 1.0, 0.0]), 1e-12, 40),
            Err(Error::ZeroLeadingCoefficient)
        ));
    }

    #[test]
    fn gaussian_draw_certification() {
        let f = sample_polynomial(200, 42, CoefficientLaw::Gaussian).unwrap();
        let rs = find_all_roots(&f, 1e-12, 100).unwrap();
        assert!(rs.converged);
        assert_eq!(rs.roots.len(), 200);
        let sup = sup_norm_circle(&f);
        for (z, r) in rs.roots.iter().zip(&rs.residuals) {
            if z.norm() >= 0.5 && z.norm() <= 2.0 {
                assert!(*r <= 1e-8 * sup, "residual {r:.3e} vs sup {sup:.3e}");
            }
        }
        // Conjugate closure within pairing tolerance.
        for z in &rs.roots {
            if z.im.abs() > 1e-12 {
                let conj = z.conj();
                let nearest = rs
                    .roots
                    .iter()
                    .map(|w| (w - conj).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(nearest < 1e-8, "conjugate miss {nearest:.3e}");
            }
        }
    }

    #[test]
    fn planted_roots_recovered() {
        // Expand prod (z - r_i)(z - conj r_i) for roots planted near the
        // unit circle; the expansion is conjugate-closed so the real parts
        // of the coefficients are exact up to roundoff.
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let n = 40;
        let n2 = (n * n) as f64;
        let mut full: Vec<Complex64> = Vec::new();
        for _ in 0..n / 2 {
            let r = 1.0 + rng.random_range(-3.0..3.0) / n2;
            let arg = rng.random_range(0.05..std::f64::consts::PI - 0.05);
            let z = Complex64::from_polar(r, arg);
            full.push(z);
            full.push(z.conj());
        }
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for r in &full {
            let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            coeffs = next;
        }
        let real: Vec<f64> = coeffs.iter().map(|c| c.re).collect();
        let f = poly(&real);
        // Clustered roots leave a pseudo-root chatter of ~1e-9 from the
        // expansion roundoff, so the correction tolerance sits above it.
        let rs = find_all_roots(&f, 1e-8, 200).unwrap();
        assert!(rs.converged);
        for r in &full {
            let nearest = rs.roots.iter().map(|z| (z - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-6, "planted root missed by {nearest:.3e}");
        }
    }

    #[test]
    fn companion_matrix_cross_check() {
        let f = sample_polynomial(32, 77, CoefficientLaw::Gaussian).unwrap();
        let rs = find_all_roots(&f, 1e-13, 100).unwrap();
        let n = f.n;
        let mut comp = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 1..n {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..n {
            comp[(i, n - 1)] = -f.coeffs[i] / f.coeffs[n];
        }
        let eig = comp.complex_eigenvalues();
        for e in eig.iter() {
            let nearest = rs
                .roots
                .iter()
                .map(|z| (z - Complex64::new(e.re, e.im)).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-6, "companion eigenvalue off by {nearest:.3e}");
        }
    }

    #[test]
    fn annulus_window_arithmetic() {
        let n = 10usize;
        let n2 = (n * n) as f64;
        let rs = RootSet {
            roots: vec![
                Complex64::from_polar(1.0 + 1.0 / n2, 1.0),
                Complex64::from_polar(1.0 + 1.0 / n2, -1.0),
                Complex64::from_polar(1.0 - 3.0 / n2, 2.0),
                Complex64::from_polar(1.0 - 3.0 / n2, -2.0),
            ],
            residuals: vec![0.0; 4],
            iterations: 1,
            converged: true,
        };
        let mut pts = annulus_roots(&rs, n, (-4.0, 4.0));
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(pts.len(), 2);
        assert!((pts[0].0 + 3.0).abs() < 1e-9 && (pts[0].1 - 2.0).abs() < 1e-12);
        assert!((pts[1].0 - 1.0).abs() < 1e-9 && (pts[1].1 - 1.0).abs() < 1e-12);
        assert!(annulus_roots(&rs, n, (0.0, 0.0)).is_empty());
    }

    #[test]
    fn min_gap_sentinel_and_arithmetic() {
        let n = 10usize;
        let n2 = (n * n) as f64;
        let one = RootSet {
            roots: vec![Complex64::from_polar(1.0 + 1.0 / n2, 1.0)],
            residuals: vec![0.0],
            iterations: 1,
            converged: true,
        };
        assert!(min_root_gap(&one, n, (-4.0, 4.0)).is_infinite());
        // Two upper-half roots straddling the circle on the imaginary axis,
        // 4/n^2 apart in the plane.
        let pair = RootSet {
            roots: vec![
                Complex64::new(0.0, 1.0 + 2.0 / n2),
                Complex64::new(0.0, 1.0 - 2.0 / n2),
            ],
            residuals: vec![0.0; 2],
            iterations: 1,
            converged: true,
        };
        let gap = min_root_gap(&pair, n, (-3.0, 3.0));
        assert!((gap - 4.0).abs() < 1e-9, "gap {gap}");
    }

    #[test]
    fn trig_zero_single_cosine() {
        let f = poly(&[0.0, 1.0]); // X = cos x, Y = sin x
        let s = eval_circle_grid(&f, 64).unwrap();
        let zx = trig_zeros(&s, TrigTarget::X, 1).unwrap();
        assert_eq!(zx.zeros.len(), 1);
        assert!((zx.zeros[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert!((zx.derivative_at_zero[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn trig_zero_degenerate_rejected() {
        let f = poly(&[1.0]);
        // Manually widen the grid; degree 0 has Y identically zero.
        let s = eval_circle_grid(&f, 16).unwrap();
        assert!(matches!(
            trig_zeros(&s, TrigTarget::Y, 1),
            Err(Error::DegenerateTarget)
        ));
    }

    #[test]
    fn trig_zero_grid_too_coarse() {
        let f = sample_polynomial(20, 3, CoefficientLaw::Gaussian).unwrap();
        let s = eval_circle_grid(&f, 64).unwrap();
        assert!(matches!(
            trig_zeros(&s, TrigTarget::X, 20),
            Err(Error::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn near_tangency_lands_in_suspect_list() {
        // X(x) = (1 + 1e-12) + cos(2x) dips to +1e-12 at pi/2 without
        // crossing zero; the grid point there must be flagged, not dropped.
        let f = poly(&[1.0 + 1e-12, 0.0, 1.0]);
        let s = eval_circle_grid(&f, 32).unwrap();
        let zs = trig_zeros(&s, TrigTarget::X, 2).unwrap();
        assert!(zs.zeros.is_empty());
        assert_eq!(zs.suspected_double.len(), 1);
        assert!((zs.suspected_double[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn trig_zeros_are_accurate_and_sorted() {
        let n = 60;
        let f = sample_polynomial(n, 31, CoefficientLaw::Gaussian).unwrap();
        let s = eval_circle_grid(&f, 1024).unwrap();
        let margin = axis_margin(n, 1.0);
        for which in [TrigTarget::X, TrigTarget::Y] {
            let zs = trig_zeros(&s, which, n).unwrap();
            let bound = 1e-9 * (n as f64).sqrt();
            for (i, &z) in zs.zeros.iter().enumerate() {
                assert!(z > margin && z < std::f64::consts::PI - margin);
                let v = eval_trig_direct(&f.coeffs, z, which == TrigTarget::Y);
                assert!(v.abs() <= bound, "|value| = {:.3e} at zero {z}", v.abs());
                if i > 0 {
                    assert!(z > zs.zeros[i - 1]);
                }
            }
        }
    }
}

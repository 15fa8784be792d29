//! The two point processes attached to one draw and the maps between them.
//!
//! `NuMeasure` lives on the complex roots: every upper-half root is recorded
//! as `(scaled_distance, arg)` with `scaled_distance = (|z| - 1) n^2`.
//! `MuMeasure` lives on the circle: pairs `(x, y)` of zeros of `X` and `Y`
//! within the proximity cutoff `n^{-2} (log n)^4`, each weighted into the
//! real line by the collision statistic
//! `gamma = (x - y) X'(x) Y'(y) n^2 / (X'(x)^2 + Y'(y)^2)`.
//! The two counting measures agree on fixed intervals with probability
//! tending to one, which is what `pairing_check` measures empirically.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::roots::{upper_half_roots, CircleZeroSet, RootSet, TrigTarget};
use crate::{Error, Result};

/// Scaled radial point process of the complex roots (upper half-plane).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NuMeasure {
    /// `(scaled_distance, arg)` per root, no window truncation.
    pub points: Vec<(f64, f64)>,
    pub n: usize,
}

/// One colliding pair of circle zeros.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MuPair {
    /// Zero of `X`.
    pub x: f64,
    /// Zero of `Y`.
    pub y: f64,
    /// Collision statistic; predicted scaled radial distance of the root
    /// the pair generates.
    pub gamma: f64,
    /// `X'(x)`.
    pub dx: f64,
    /// `Y'(y)`.
    pub dy: f64,
    /// Both derivatives clear the `n^{3/2} / log n` floor.
    pub regular: bool,
}

/// Circle-pair point process of one draw.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MuMeasure {
    pub pairs: Vec<MuPair>,
    pub n: usize,
    /// The proximity cutoff actually used for |x - y|.
    pub proximity_cutoff: f64,
}

/// Outcome of comparing the two measures on one interval.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairingReport {
    pub interval: (f64, f64),
    pub nu_count: usize,
    pub mu_count: usize,
    pub agreed: bool,
    /// `(arg, circle distance to nearest pair)` for root points left
    /// unmatched by the greedy matching; empty when counts agree.
    pub unmatched_roots: Vec<(f64, f64)>,
    /// `(x, circle distance to nearest root)` for pair points left
    /// unmatched; empty when counts agree.
    pub unmatched_pairs: Vec<(f64, f64)>,
}

/// Map a converged root set to its scaled radial process.
pub fn nu_measure(rs: &RootSet, n: usize) -> NuMeasure {
    let n2 = (n as f64) * (n as f64);
    let points = upper_half_roots(rs)
        .map(|z| ((z.norm() - 1.0) * n2, z.arg().abs()))
        .collect();
    NuMeasure { points, n }
}

impl NuMeasure {
    /// Counting measure of the open interval.
    pub fn count(&self, interval: (f64, f64)) -> usize {
        self.points
            .iter()
            .filter(|(s, _)| *s > interval.0 && *s < interval.1)
            .count()
    }

    /// Minimum of `|scaled_distance|`; `+inf` when empty.
    pub fn min_scaled_distance(&self) -> f64 {
        self.points
            .iter()
            .map(|(s, _)| s.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Minimum `|scaled_distance|` of the radial process (`+inf` when empty).
pub fn min_scaled_distance(nu: &NuMeasure) -> f64 {
    nu.min_scaled_distance()
}

/// The proximity cutoff `mult * n^{-2} (log n)^4` (natural log).
pub fn proximity_cutoff(n: usize, mult: f64) -> f64 {
    let nf = n as f64;
    mult * nf.powi(-2) * nf.ln().powi(4)
}

/// Derivative floor `n^{3/2} / log n` below which a pair is irregular.
pub fn derivative_floor(n: usize) -> f64 {
    let nf = n as f64;
    nf.powf(1.5) / nf.ln()
}

/// Build the circle-pair process from the zero sets of one draw.
pub fn mu_measure(zx: &CircleZeroSet, zy: &CircleZeroSet, n: usize) -> MuMeasure {
    mu_measure_scaled(zx, zy, n, 1.0)
}

/// [`mu_measure`] with a multiplier on the proximity cutoff.
///
/// All `(x, y)` within the cutoff are enumerated by a two-pointer sweep over
/// the sorted zero lists; duplicates (one zero near two partners) stay in
/// the raw list since the measure counts pairs.
pub fn mu_measure_scaled(
    zx: &CircleZeroSet,
    zy: &CircleZeroSet,
    n: usize,
    cutoff_mult: f64,
) -> MuMeasure {
    debug_assert_eq!(zx.which, TrigTarget::X);
    debug_assert_eq!(zy.which, TrigTarget::Y);
    let cutoff = proximity_cutoff(n, cutoff_mult);
    let floor = derivative_floor(n);
    let n2 = (n as f64) * (n as f64);
    let mut pairs = Vec::new();
    let mut start = 0usize;
    for (i, &x) in zx.zeros.iter().enumerate() {
        while start < zy.zeros.len() && zy.zeros[start] < x - cutoff {
            start += 1;
        }
        let mut j = start;
        while j < zy.zeros.len() && zy.zeros[j] <= x + cutoff {
            let y = zy.zeros[j];
            let dx = zx.derivative_at_zero[i];
            let dy = zy.derivative_at_zero[j];
            let denom = dx * dx + dy * dy;
            let gamma = if denom == 0.0 {
                0.0
            } else {
                (x - y) * dx * dy * n2 / denom
            };
            pairs.push(MuPair {
                x,
                y,
                gamma,
                dx,
                dy,
                regular: dx.abs() > floor && dy.abs() > floor,
            });
            j += 1;
        }
    }
    MuMeasure {
        pairs,
        n,
        proximity_cutoff: cutoff,
    }
}

impl MuMeasure {
    /// Counting measure: pairs with `gamma` in the open interval.
    pub fn count(&self, interval: (f64, f64)) -> usize {
        self.pairs
            .iter()
            .filter(|p| p.gamma > interval.0 && p.gamma < interval.1)
            .count()
    }

    /// Minimum of `|gamma|`; `+inf` when empty.
    pub fn min_abs_gamma(&self) -> f64 {
        self.pairs
            .iter()
            .map(|p| p.gamma.abs())
            .fold(f64::INFINITY, f64::min)
    }
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % (2.0 * std::f64::consts::PI);
    d.min(2.0 * std::f64::consts::PI - d)
}

/// Compare the two counting measures on one interval; on disagreement, run
/// a greedy nearest-neighbor matching between root args and pair positions
/// to populate the diagnostic lists.
pub fn pairing_check(nu: &NuMeasure, mu: &MuMeasure, interval: (f64, f64)) -> PairingReport {
    let roots: Vec<f64> = nu
        .points
        .iter()
        .filter(|(s, _)| *s > interval.0 && *s < interval.1)
        .map(|(_, arg)| *arg)
        .collect();
    let pairs: Vec<f64> = mu
        .pairs
        .iter()
        .filter(|p| p.gamma > interval.0 && p.gamma < interval.1)
        .map(|p| p.x)
        .collect();
    let agreed = roots.len() == pairs.len();
    let mut unmatched_roots = Vec::new();
    let mut unmatched_pairs = Vec::new();
    if !agreed {
        // Greedy matching by increasing circle distance.
        let mut edges: Vec<(f64, usize, usize)> = Vec::new();
        for (i, &a) in roots.iter().enumerate() {
            for (j, &x) in pairs.iter().enumerate() {
                edges.push((circle_distance(a, x), i, j));
            }
        }
        edges.sort_by(|l, r| l.0.total_cmp(&r.0));
        let mut root_used = vec![false; roots.len()];
        let mut pair_used = vec![false; pairs.len()];
        for (_, i, j) in edges {
            if !root_used[i] && !pair_used[j] {
                root_used[i] = true;
                pair_used[j] = true;
            }
        }
        for (i, &a) in roots.iter().enumerate() {
            if !root_used[i] {
                let near = pairs
                    .iter()
                    .map(|&x| circle_distance(a, x))
                    .fold(f64::INFINITY, f64::min);
                unmatched_roots.push((a, near));
            }
        }
        for (j, &x) in pairs.iter().enumerate() {
            if !pair_used[j] {
                let near = roots
                    .iter()
                    .map(|&a| circle_distance(a, x))
                    .fold(f64::INFINITY, f64::min);
                unmatched_pairs.push((x, near));
            }
        }
    }
    PairingReport {
        interval,
        nu_count: roots.len(),
        mu_count: pairs.len(),
        agreed,
        unmatched_roots,
        unmatched_pairs,
    }
}

/// Predict the complex root generated by a colliding pair.
///
/// Inverts the first-order collision system: the predicted argument is the
/// derivative-weighted mean `(dx^2 x + dy^2 y) / (dx^2 + dy^2)` and the
/// predicted radius is `1 + gamma / n^2`.
pub fn predict_root_from_pair(x: f64, y: f64, dx: f64, dy: f64, n: usize) -> Result<Complex64> {
    let floor = derivative_floor(n);
    if dx.abs() <= floor || dy.abs() <= floor {
        return Err(Error::DerivativeFloor {
            dx: dx.abs(),
            dy: dy.abs(),
            floor,
        });
    }
    let n2 = (n as f64) * (n as f64);
    let denom = dx * dx + dy * dy;
    let gamma = (x - y) * dx * dy * n2 / denom;
    let theta = (dx * dx * x + dy * dy * y) / denom;
    Ok(Complex64::from_polar(1.0 + gamma / n2, theta))
}

/// Predict the pair of circle zeros generated by a root at
/// `(1 + gamma/n^2) e^{i theta}`, given `X'(theta)` and `Y'(theta)`.
///
/// First-order zero displacements: `x = theta + (gamma/n^2) Y'/X'` and
/// `y = theta - (gamma/n^2) X'/Y'`.
pub fn predict_pair_from_root(
    zeta: Complex64,
    dx_theta: f64,
    dy_theta: f64,
    n: usize,
) -> Result<(f64, f64)> {
    let floor = derivative_floor(n);
    if dx_theta.abs() <= floor || dy_theta.abs() <= floor {
        return Err(Error::DerivativeFloor {
            dx: dx_theta.abs(),
            dy: dy_theta.abs(),
            floor,
        });
    }
    let n2 = (n as f64) * (n as f64);
    let theta = zeta.arg();
    let gamma = (zeta.norm() - 1.0) * n2;
    let x = theta + gamma / n2 * dy_theta / dx_theta;
    let y = theta - gamma / n2 * dx_theta / dy_theta;
    Ok((x, y))
}

/// Count annulus roots suspiciously close to the real axis: scaled distance
/// in `[-m_window, m_window]` and argument within `n^{-eps}` of `0` or `pi`.
pub fn near_axis_scan(rs: &RootSet, n: usize, m_window: f64, eps: f64) -> Result<usize> {
    if m_window <= 0.0 || eps <= 0.0 || eps >= 1.0 {
        return Err(Error::InvalidParameter(
            "need M > 0 and eps in (0, 1)".into(),
        ));
    }
    let n2 = (n as f64) * (n as f64);
    let band = (n as f64).powf(-eps);
    Ok(upper_half_roots(rs)
        .filter(|z| {
            let scaled = (z.norm() - 1.0) * n2;
            let arg = z.arg().abs();
            scaled.abs() <= m_window && (arg <= band || std::f64::consts::PI - arg <= band)
        })
        .count())
}

/// Histogram of how many `Y`-zeros fall between consecutive `X`-zeros;
/// diagnostic only (loose interlacing monitor).
pub fn interlacing_histogram(zx: &CircleZeroSet, zy: &CircleZeroSet) -> Vec<usize> {
    let mut hist = vec![0usize; 8];
    let mut j = 0usize;
    for w in zx.zeros.windows(2) {
        let mut count = 0usize;
        while j < zy.zeros.len() && zy.zeros[j] < w[0] {
            j += 1;
        }
        let mut jj = j;
        while jj < zy.zeros.len() && zy.zeros[jj] < w[1] {
            count += 1;
            jj += 1;
        }
        let slot = count.min(hist.len() - 1);
        hist[slot] += 1;
    }
    hist
}

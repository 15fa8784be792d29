//! Aggregation of Monte Carlo trials into the statistical verdicts: the
//! exponential law of the closest root, Poisson window counts via factorial
//! moments, independence across disjoint windows, and argument uniformity.

use serde::{Deserialize, Serialize};

use crate::roots::axis_margin;
use crate::{Error, Result};

/// Scaled-radial intensity of the limiting point process.
pub const POISSON_INTENSITY: f64 = 1.0 / 12.0;

/// Per-trial summary produced by the sampling pipeline.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub seed: u64,
    /// Minimum |scaled distance| (or |gamma| for the circle-pair source).
    pub min_scaled: f64,
    /// Count per configured window, in configuration order.
    pub window_counts: Vec<WindowCount>,
    /// Set when the trial ran both pipelines on the pairing interval.
    pub pairing_agreed: Option<bool>,
    /// `(scaled_distance, arg)` of annulus points inside the recording
    /// window.
    pub args: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WindowCount {
    pub lo: f64,
    pub hi: f64,
    pub count: u32,
}

/// Outcome of one statistical test.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TestReport {
    /// Worst normalized deviation across sub-tests.
    pub statistic: f64,
    pub threshold: f64,
    pub passed: bool,
    pub sample_size: usize,
    pub notes: String,
}

impl TestReport {
    fn from_statistic(statistic: f64, threshold: f64, sample_size: usize, notes: String) -> Self {
        TestReport {
            statistic,
            threshold,
            passed: statistic <= threshold,
            sample_size,
            notes,
        }
    }
}

/// CDF of the exponential law with the given mean.
pub fn exp_cdf(t: f64, mean: f64) -> f64 {
    assert!(t >= 0.0 && mean > 0.0);
    1.0 - (-t / mean).exp()
}

/// Two-sided Kolmogorov-Smirnov statistic of the samples against `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    assert!(samples.len() >= 2, "need at least two samples");
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        sup = sup
            .max(((i + 1) as f64 / n - f).abs())
            .max((i as f64 / n - f).abs());
    }
    sup
}

/// Mean falling factorial `E[(C)_k] = E[C (C-1) ... (C-k+1)]` over trials.
pub fn factorial_moment(counts: &[u32], k: u32) -> f64 {
    assert!(k >= 1);
    if counts.is_empty() {
        return 0.0;
    }
    counts
        .iter()
        .map(|&c| falling_factorial(c, k))
        .sum::<f64>()
        / counts.len() as f64
}

fn falling_factorial(c: u32, k: u32) -> f64 {
    let mut p = 1.0;
    for i in 0..k {
        if c < i + 1 {
            return 0.0;
        }
        p *= (c - i) as f64;
    }
    p
}

fn window_counts_for(records: &[TrialRecord], window: (f64, f64)) -> Result<Vec<u32>> {
    records
        .iter()
        .map(|r| {
            r.window_counts
                .iter()
                .find(|w| w.lo == window.0 && w.hi == window.1)
                .map(|w| w.count)
                .ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "window ({}, {}) not recorded in trials",
                        window.0, window.1
                    ))
                })
        })
        .collect()
}

fn sample_correlation(a: &[u32], b: &[u32]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().map(|&v| v as f64).sum::<f64>() / n;
    let mb = b.iter().map(|&v| v as f64).sum::<f64>() / n;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    let mut sab = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let dx = x as f64 - ma;
        let dy = y as f64 - mb;
        saa += dx * dx;
        sbb += dy * dy;
        sab += dx * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}

/// Poisson verification across windows: factorial moments `k = 1, 2` match
/// `(|U|/12)^k` within three standard errors plus 10% model slack, and the
/// count correlation across every disjoint window pair stays within three
/// standard errors of zero. The statistic is the worst normalized
/// deviation; it passes at threshold 1.
pub fn poisson_window_test(
    records: &[TrialRecord],
    windows: &[(f64, f64)],
) -> Result<TestReport> {
    const MIN_TRIALS: usize = 500;
    if records.len() < MIN_TRIALS {
        return Err(Error::TooFewTrials {
            got: records.len(),
            min: MIN_TRIALS,
        });
    }
    let trials = records.len();
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for &w in windows {
        let counts = window_counts_for(records, w)?;
        for k in 1..=2u32 {
            let target = ((w.1 - w.0) * POISSON_INTENSITY).powi(k as i32);
            let per_trial: Vec<f64> = counts.iter().map(|&c| falling_factorial(c, k)).collect();
            let mean = per_trial.iter().sum::<f64>() / trials as f64;
            let var = per_trial
                .iter()
                .map(|v| (v - mean) * (v - mean))
                .sum::<f64>()
                / trials as f64;
            let se = (var / trials as f64).sqrt();
            let allowed = 3.0 * se + 0.10 * target;
            let dev = (mean - target).abs() / allowed;
            worst = worst.max(dev);
            notes.push(format!(
                "moment k={k} on ({:.1},{:.1}): {mean:.4} vs {target:.4} (band {allowed:.4})",
                w.0, w.1
            ));
        }
    }
    let corr_band = 3.0 / (trials as f64).sqrt();
    for i in 0..windows.len() {
        for j in i + 1..windows.len() {
            let (a, b) = (windows[i], windows[j]);
            let disjoint = a.1 <= b.0 || b.1 <= a.0;
            if !disjoint {
                continue;
            }
            let ca = window_counts_for(records, a)?;
            let cb = window_counts_for(records, b)?;
            let rho = sample_correlation(&ca, &cb);
            let dev = rho.abs() / corr_band;
            worst = worst.max(dev);
            notes.push(format!(
                "corr ({:.1},{:.1})x({:.1},{:.1}): {rho:.4} (band {corr_band:.4})",
                a.0, a.1, b.0, b.1
            ));
        }
    }
    Ok(TestReport::from_statistic(worst, 1.0, trials, notes.join("; ")))
}

/// Argument-uniformity test: the pooled root arguments inside the scaled
/// window, restricted to the axis-free range, against the uniform law
/// there. Threshold `2.2 / sqrt(N)` leaves slack for finite-n bias.
pub fn arg_uniformity_test(records: &[TrialRecord], window: (f64, f64)) -> Result<TestReport> {
    const MIN_TRIALS: usize = 500;
    if records.len() < MIN_TRIALS {
        return Err(Error::TooFewTrials {
            got: records.len(),
            min: MIN_TRIALS,
        });
    }
    let n = records[0].n;
    let margin = axis_margin(n, 1.0);
    let (lo, hi) = (margin, std::f64::consts::PI - margin);
    let pooled: Vec<f64> = records
        .iter()
        .flat_map(|r| r.args.iter())
        .filter(|(s, a)| *s > window.0 && *s < window.1 && *a > lo && *a < hi)
        .map(|(_, a)| *a)
        .collect();
    if pooled.len() < 2 {
        return Ok(TestReport {
            statistic: f64::INFINITY,
            threshold: 0.0,
            passed: false,
            sample_size: pooled.len(),
            notes: "inconclusive: empty pooled sample".into(),
        });
    }
    let stat = ks_statistic(&pooled, |x| (x - lo) / (hi - lo));
    let threshold = 2.2 / (pooled.len() as f64).sqrt();
    Ok(TestReport::from_statistic(
        stat,
        threshold,
        pooled.len(),
        format!("pooled {} args in ({:.1},{:.1})", pooled.len(), window.0, window.1),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_cdf_values() {
        assert_eq!(exp_cdf(0.0, 6.0), 0.0);
        assert!((exp_cdf(6.0 * std::f64::consts::LN_2, 6.0) - 0.5).abs() < 1e-12);
        assert!((exp_cdf(6.0, 6.0) - (1.0 - (-1.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn exp_cdf_monotone() {
        let mut last = 0.0;
        for i in 0..200 {
            let v = exp_cdf(i as f64 * 0.3, 6.0);
            assert!(v >= last && v <= 1.0);
            last = v;
        }
    }

    #[test]
    fn ks_statistic_bounds_and_degenerate_cases() {
        // Repeated single value against a continuous CDF: at least 1/2.
        let stat = ks_statistic(&[0.5; 10], |x| x);
        assert!(stat >= 0.5 && stat <= 1.0);
        // Perfectly placed quantiles: at most 1/N.
        let n = 100usize;
        let samples: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let stat = ks_statistic(&samples, |x| x);
        assert!(stat <= 1.0 / n as f64 + 1e-12);
    }

    #[test]
    fn ks_inverse_transform_calibration() {
        // Exponential samples via inverse transform stay under 1.95/sqrt(N)
        // in essentially every run; frozen seeds keep it deterministic.
        use rand::Rng;
        use rand::SeedableRng;
        let n = 10_000usize;
        let mut fails = 0;
        for seed in 0..50u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<f64> = (0..n)
                .map(|_| -6.0 * (1.0 - rng.random::<f64>()).ln())
                .collect();
            let stat = ks_statistic(&samples, |x| exp_cdf(x.max(0.0), 6.0));
            if stat > 1.95 / (n as f64).sqrt() {
                fails += 1;
            }
        }
        assert!(fails == 0, "{fails} of 50 calibration runs exceeded the band");
    }

    #[test]
    fn factorial_moment_trivia() {
        assert_eq!(factorial_moment(&[0, 0, 0], 1), 0.0);
        assert_eq!(factorial_moment(&[0, 0, 0], 3), 0.0);
        assert_eq!(factorial_moment(&[2, 2], 2), 2.0);
        // k = 1 is exactly the arithmetic mean.
        let counts = [3u32, 1, 4, 1, 5];
        let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / 5.0;
        assert_eq!(factorial_moment(&counts, 1), mean);
    }

    #[test]
    fn factorial_moments_of_simulated_poisson() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let lambda = 1.0f64;
        let trials = 20_000usize;
        let counts: Vec<u32> = (0..trials)
            .map(|_| {
                // Knuth sampling is fine at lambda = 1.
                let limit = (-lambda).exp();
                let mut p = 1.0;
                let mut c = 0u32;
                loop {
                    p *= rng.random::<f64>();
                    if p <= limit {
                        break c;
                    }
                    c += 1;
                }
            })
            .collect();
        for k in 1..=3u32 {
            let m = factorial_moment(&counts, k);
            // Poisson(1): all factorial moments are 1; allow 3 SEs.
            let per: Vec<f64> = counts.iter().map(|&c| falling_factorial(c, k)).collect();
            let mean = per.iter().sum::<f64>() / trials as f64;
            let var = per.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / trials as f64;
            let se = (var / trials as f64).sqrt();
            assert!((m - 1.0).abs() <= 3.0 * se, "k={k}: {m} (se {se})");
        }
    }

    fn synthetic_records(counts_per_window: &[(f64, f64, Vec<u32>)], n: usize) -> Vec<TrialRecord> {
        let trials = counts_per_window[0].2.len();
        (0..trials)
            .map(|t| TrialRecord {
                n,
                seed: t as u64,
                min_scaled: 1.0,
                window_counts: counts_per_window
                    .iter()
                    .map(|(lo, hi, counts)| WindowCount {
                        lo: *lo,
                        hi: *hi,
                        count: counts[t],
                    })
                    .collect(),
                pairing_agreed: None,
                args: vec![],
            })
            .collect()
    }

    #[test]
    fn poisson_test_on_ideal_counts() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let trials = 4000usize;
        let sample_poisson = |rng: &mut rand_chacha::ChaCha8Rng, lambda: f64| -> u32 {
            let limit = (-lambda).exp();
            let mut p = 1.0;
            let mut c = 0u32;
            loop {
                p *= rng.random::<f64>();
                if p <= limit {
                    break c;
                }
                c += 1;
            }
        };
        // Two disjoint windows of length 6 each: independent Poisson(1/2).
        let a: Vec<u32> = (0..trials).map(|_| sample_poisson(&mut rng, 0.5)).collect();
        let b: Vec<u32> = (0..trials).map(|_| sample_poisson(&mut rng, 0.5)).collect();
        let records = synthetic_records(&[(-6.0, 0.0, a), (0.0, 6.0, b)], 500);
        let report = poisson_window_test(&records, &[(-6.0, 0.0), (0.0, 6.0)]).unwrap();
        assert!(report.passed, "{}", report.notes);
        assert_eq!(report.passed, report.statistic <= report.threshold);
    }

    #[test]
    fn poisson_test_rejects_wrong_intensity() {
        let trials = 2000usize;
        // Deterministic count 2 on a window whose Poisson mean should be 1.
        let records = synthetic_records(&[(0.0, 12.0, vec![2; trials])], 500);
        let report = poisson_window_test(&records, &[(0.0, 12.0)]).unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn poisson_test_order_independence() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let trials = 1000usize;
        let counts: Vec<u32> = (0..trials).map(|_| rng.random_range(0..4)).collect();
        let records = synthetic_records(&[(0.0, 12.0, counts)], 500);
        let mut shuffled = records.clone();
        shuffled.reverse();
        let a = poisson_window_test(&records, &[(0.0, 12.0)]).unwrap();
        let b = poisson_window_test(&shuffled, &[(0.0, 12.0)]).unwrap();
        assert!((a.statistic - b.statistic).abs() <= 1e-12 * a.statistic.max(1.0));
        assert_eq!(a.passed, b.passed);
    }

    #[test]
    fn poisson_test_needs_enough_trials() {
        let records = synthetic_records(&[(0.0, 12.0, vec![1; 100])], 500);
        assert!(matches!(
            poisson_window_test(&records, &[(0.0, 12.0)]),
            Err(Error::TooFewTrials { .. })
        ));
    }

    #[test]
    fn uniformity_accepts_uniform_and_rejects_point_mass() {
        use rand::Rng;
        use rand::SeedableRng;
        let n = 500usize;
        let margin = axis_margin(n, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let uniform: Vec<TrialRecord> = (0..600)
            .map(|t| TrialRecord {
                n,
                seed: t,
                min_scaled: 1.0,
                window_counts: vec![],
                pairing_agreed: None,
                args: (0..4)
                    .map(|_| {
                        (
                            rng.random_range(-10.0..10.0),
                            rng.random_range(margin..std::f64::consts::PI - margin),
                        )
                    })
                    .collect(),
            })
            .collect();
        let report = arg_uniformity_test(&uniform, (-10.0, 10.0)).unwrap();
        assert!(report.passed, "{} > {}", report.statistic, report.threshold);

        let spike: Vec<TrialRecord> = (0..600)
            .map(|t| TrialRecord {
                n,
                seed: t,
                min_scaled: 1.0,
                window_counts: vec![],
                pairing_agreed: None,
                args: vec![(0.5, std::f64::consts::FRAC_PI_2); 4],
            })
            .collect();
        let report = arg_uniformity_test(&spike, (-10.0, 10.0)).unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn uniformity_empty_sample_is_inconclusive() {
        let records: Vec<TrialRecord> = (0..600)
            .map(|t| TrialRecord {
                n: 500,
                seed: t,
                min_scaled: 1.0,
                window_counts: vec![],
                pairing_agreed: None,
                args: vec![],
            })
            .collect();
        let report = arg_uniformity_test(&records, (0.0, 1.0)).unwrap();
        assert!(!report.passed);
        assert!(report.notes.contains("inconclusive"));
    }
}

//! Deterministic per-trial seeding and the sampling pipeline shared by the
//! CLI and the verification suites.
//!
//! Every trial derives its own stream from `(base_seed, trial_index)` by a
//! fixed 64-bit mix, so results are independent of worker count and
//! scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gpoly::{eval_circle_grid, sample_polynomial, CoefficientLaw, CoefficientVector};
use crate::process::{mu_measure_scaled, nu_measure, pairing_check, MuMeasure, NuMeasure, PairingReport};
use crate::roots::{find_all_roots, trig_zeros, CircleZeroSet, RootSet, TrigTarget};
use crate::stats::{TrialRecord, WindowCount};
use crate::{Error, Result};

/// splitmix64 of the base seed advanced by the trial index.
pub fn mix_seed(base: u64, trial: u64) -> u64 {
    let mut z = base.wrapping_add(trial.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Which measure supplies window counts and the minimum statistic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// Complex roots through the simultaneous solver.
    Nu,
    /// Circle-pair collisions through the grid pipeline.
    Mu,
}

/// Per-trial configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialPlan {
    pub n: usize,
    pub law: CoefficientLaw,
    pub source: Source,
    pub windows: Vec<(f64, f64)>,
    /// Multiplier on the proximity cutoff used by the pair enumeration.
    pub cutoff_mult: f64,
    /// Annulus points inside this window are recorded as `(scaled, arg)`.
    pub record_window: (f64, f64),
    /// When set, both pipelines run and agreement is checked on this
    /// interval.
    pub pairing_interval: Option<(f64, f64)>,
}

impl TrialPlan {
    pub fn new(n: usize, source: Source) -> Self {
        TrialPlan {
            n,
            law: CoefficientLaw::Gaussian,
            source,
            windows: Vec::new(),
            cutoff_mult: 1.0,
            record_window: (-20.0, 20.0),
            pairing_interval: None,
        }
    }
}

/// Everything one trial produced; heavier intermediates are kept so callers
/// can extract more than the flat record.
pub struct TrialOutput {
    pub record: TrialRecord,
    pub draw: CoefficientVector,
    pub roots: Option<RootSet>,
    pub nu: Option<NuMeasure>,
    pub mu: Option<MuMeasure>,
    pub zeros_x: Option<CircleZeroSet>,
    pub zeros_y: Option<CircleZeroSet>,
    pub pairing: Option<PairingReport>,
}

/// Grid size for the circle pipeline: the first power of two at or above
/// `32 (n+1)`, fine enough that sub-grid zero pairs are negligible.
pub fn circle_grid_size(n: usize) -> usize {
    (32 * (n + 1)).next_power_of_two()
}

fn solve_roots(f: &CoefficientVector) -> Result<RootSet> {
    // Draws holding a very close root pair chatter at the pseudo-root cloud
    // of double precision; retry with a looser (still ample) correction
    // tolerance before giving up.
    for tol in [1e-10, 3e-9] {
        let rs = find_all_roots(f, tol, 200)?;
        if rs.converged {
            return Ok(rs);
        }
    }
    Err(Error::InvalidParameter(format!(
        "root finder did not converge for seed {}",
        f.seed
    )))
}

/// Run one trial of the plan.
pub fn run_trial(plan: &TrialPlan, base_seed: u64, trial: u64) -> Result<TrialOutput> {
    let seed = mix_seed(base_seed, trial);
    let draw = sample_polynomial(plan.n, seed, plan.law)?;

    let need_nu = plan.source == Source::Nu || plan.pairing_interval.is_some();
    let need_mu = plan.source == Source::Mu || plan.pairing_interval.is_some();

    let (roots, nu) = if need_nu {
        let rs = solve_roots(&draw)?;
        let nu = nu_measure(&rs, plan.n);
        (Some(rs), Some(nu))
    } else {
        (None, None)
    };

    let (zeros_x, zeros_y, mu) = if need_mu {
        let sample = eval_circle_grid(&draw, circle_grid_size(plan.n))?;
        let zx = trig_zeros(&sample, TrigTarget::X, plan.n)?;
        let zy = trig_zeros(&sample, TrigTarget::Y, plan.n)?;
        let mu = mu_measure_scaled(&zx, &zy, plan.n, plan.cutoff_mult);
        (Some(zx), Some(zy), Some(mu))
    } else {
        (None, None, None)
    };

    let pairing = plan.pairing_interval.map(|interval| {
        pairing_check(
            nu.as_ref().expect("nu built for pairing"),
            mu.as_ref().expect("mu built for pairing"),
            interval,
        )
    });

    let (min_scaled, window_counts, args) = match plan.source {
        Source::Nu => {
            let nu = nu.as_ref().expect("nu built for nu source");
            let counts = plan
                .windows
                .iter()
                .map(|&(lo, hi)| WindowCount {
                    lo,
                    hi,
                    count: nu.count((lo, hi)) as u32,
                })
                .collect();
            let args = nu
                .points
                .iter()
                .copied()
                .filter(|(s, _)| *s > plan.record_window.0 && *s < plan.record_window.1)
                .collect();
            (nu.min_scaled_distance(), counts, args)
        }
        Source::Mu => {
            let mu = mu.as_ref().expect("mu built for mu source");
            let counts = plan
                .windows
                .iter()
                .map(|&(lo, hi)| WindowCount {
                    lo,
                    hi,
                    count: mu.count((lo, hi)) as u32,
                })
                .collect();
            let args = mu
                .pairs
                .iter()
                .filter(|p| p.gamma > plan.record_window.0 && p.gamma < plan.record_window.1)
                .map(|p| (p.gamma, p.x))
                .collect();
            (mu.min_abs_gamma(), counts, args)
        }
    };

    let record = TrialRecord {
        n: plan.n,
        seed,
        min_scaled,
        window_counts,
        pairing_agreed: pairing.as_ref().map(|p| p.agreed),
        args,
    };

    Ok(TrialOutput {
        record,
        draw,
        roots,
        nu,
        mu,
        zeros_x,
        zeros_y,
        pairing,
    })
}

/// Run `trials` plan executions in parallel, in trial order. Results are
/// identical for any worker count since seeding is per-trial.
pub fn run_trials(plan: &TrialPlan, base_seed: u64, trials: usize) -> Result<Vec<TrialRecord>> {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| run_trial(plan, base_seed, t).map(|out| out.record))
        .collect()
}

use rayon::prelude::*;
use rootlab::gpoly::*;
use rootlab::kacrice::*;
use rootlab::process::*;
use rootlab::roots::*;
use rootlab::trial::*;
fn main() {
    let n = 500usize;
    // Pipeline: mean number of pairs within the cutoff (any gamma).
    let trials = 400u64;
    let totals: Vec<(usize, usize, usize)> = (0..trials).into_par_iter().map(|t| {
        let f = sample_polynomial(n, mix_seed(0xBB, t), CoefficientLaw::Gaussian).unwrap();
        let grid = eval_circle_grid(&f, circle_grid_size(n)).unwrap();
        let zx = trig_zeros(&grid, TrigTarget::X, n).unwrap();
        let zy = trig_zeros(&grid, TrigTarget::Y, n).unwrap();
        let mu = mu_measure(&zx, &zy, n);
        (mu.pairs.len(), zx.zeros.len(), zy.zeros.len())
    }).collect();
    let mean_pairs = totals.iter().map(|t| t.0).sum::<usize>() as f64 / trials as f64;
    let mean_zx = totals.iter().map(|t| t.1).sum::<usize>() as f64 / trials as f64;
    println!("pipeline: mean pairs/draw = {mean_pairs:.3}, mean X zeros = {mean_zx:.2}");
    // KR: same quantity as the double integral with U = R.
    let v = mean_mu_integral(n, (-1e18, 1e18)).unwrap();
    println!("kacrice:  integral of p1 over window x cutoff = {v:.3}");
    // Also compare a pure zero-count product heuristic for scale:
    let dens = (n as f64) / (3.0f64.sqrt() * std::f64::consts::PI);
    let span = std::f64::consts::PI - 2.0 * axis_margin(n, 1.0);
    let eta = proximity_cutoff(n, 1.0);
    println!("independent-points estimate = {:.3}", dens * dens * span * 2.0 * eta);
}

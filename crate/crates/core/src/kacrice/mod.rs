//! Covariance kernels of the circle pair `(X, Y)` and their derivatives,
//! exact at finite `n`; Gaussian conditioning; Kac-Rice densities and the
//! bound monitors built on them; divided differences; and the limiting
//! local process.
//!
//! The finite-`n` kernels reduce to the power-weighted Dirichlet sums
//! `D_{n,d}(x) = sum_k k^d cos(kx)` and `S_{n,d}(x) = sum_k k^d sin(kx)`
//! through product-to-sum expansion, which is what [`cov_finite`] does.
//! After normalizing `F^{(j)}` by `n^{j+1/2}` these kernels converge, at
//! angular scale `1/n`, to the sinc-type kernels of the stationary limit
//! pair implemented in [`limit`].

pub mod density;
pub mod divided;
pub mod limit;
pub mod quad;

pub use density::*;
pub use divided::*;
pub use limit::*;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which process a covariance row refers to: the finite-`n` circle pair
/// (`X`, `Y`) or the limiting pair (`W`, `Z`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProcessFn {
    X,
    Y,
    W,
    Z,
}

/// One row of a covariance block: `func^(order)(location)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RowSpec {
    pub func: ProcessFn,
    pub order: usize,
    pub location: f64,
}

impl RowSpec {
    pub fn new(func: ProcessFn, order: usize, location: f64) -> Self {
        Self { func, order, location }
    }
}

/// Dense symmetric covariance matrix with row labels.
#[derive(Clone, Debug)]
pub struct CovarianceMatrix {
    pub entries: DMatrix<f64>,
    pub labels: Vec<RowSpec>,
}

impl CovarianceMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.entries
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b))
    }

    pub fn determinant(&self) -> f64 {
        self.entries.clone().lu().determinant()
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.dim()).fold(0.0f64, |a, i| a.max(self.entries[(i, i)].abs()))
    }
}

/// A Gaussian vector with some coordinates pinned to zero: the remaining
/// coordinates keep mean zero and get the Schur-complement covariance.
#[derive(Clone, Debug)]
pub struct ConditionedGaussian {
    pub base: CovarianceMatrix,
    pub conditioned_indices: Vec<usize>,
    pub reduced: CovarianceMatrix,
}

/// Power-weighted Dirichlet sums `(D_{n,d}(x), S_{n,d}(x))` by direct
/// summation. `0^0 = 1` so the `k = 0` term contributes only at `d = 0`.
pub fn dirichlet_sum(n: usize, d: usize, x: f64) -> (f64, f64) {
    assert!(d <= 12, "power-weight order capped at 12");
    let mut dc = 0.0;
    let mut ds = 0.0;
    for k in 0..=n {
        let kf = k as f64;
        let w = if d == 0 { 1.0 } else { kf.powi(d as i32) };
        let kx = kf * x;
        dc += w * kx.cos();
        ds += w * kx.sin();
    }
    (dc, ds)
}

/// Exact covariance of derivatives of the circle pair:
/// `Cov(F^{(a)}(x), G^{(b)}(y))` for `F, G` in `{X, Y}`.
///
/// Uses `X^{(a)}(x) = sum_k k^a cos(kx + a pi/2)` (and sine for `Y`) and the
/// product-to-sum identities, so each value is two Dirichlet-sum evaluations
/// at `x - y` and `x + y`.
pub fn cov_finite(
    n: usize,
    f: ProcessFn,
    a: usize,
    g: ProcessFn,
    b: usize,
    x: f64,
    y: f64,
) -> f64 {
    assert!(a <= 6 && b <= 6, "derivative order capped at 6");
    assert!(
        matches!(f, ProcessFn::X | ProcessFn::Y) && matches!(g, ProcessFn::X | ProcessFn::Y),
        "cov_finite is for the finite-n pair; use limit_cov for W/Z"
    );
    let m = a + b;
    let phi_minus = (a as f64 - b as f64) * std::f64::consts::FRAC_PI_2;
    let phi_plus = (a as f64 + b as f64) * std::f64::consts::FRAC_PI_2;
    let (dm, sm) = dirichlet_sum(n, m, x - y);
    let (dp, sp) = dirichlet_sum(n, m, x + y);
    // sum_k k^m cos(k u + phi) and the sine analogue.
    let cos_sum = |d: f64, s: f64, phi: f64| phi.cos() * d - phi.sin() * s;
    let sin_sum = |d: f64, s: f64, phi: f64| phi.cos() * s + phi.sin() * d;
    match (f, g) {
        (ProcessFn::X, ProcessFn::X) => {
            0.5 * cos_sum(dm, sm, phi_minus) + 0.5 * cos_sum(dp, sp, phi_plus)
        }
        (ProcessFn::Y, ProcessFn::Y) => {
            0.5 * cos_sum(dm, sm, phi_minus) - 0.5 * cos_sum(dp, sp, phi_plus)
        }
        (ProcessFn::X, ProcessFn::Y) => {
            0.5 * sin_sum(dp, sp, phi_plus) - 0.5 * sin_sum(dm, sm, phi_minus)
        }
        (ProcessFn::Y, ProcessFn::X) => cov_finite(n, ProcessFn::X, b, ProcessFn::Y, a, y, x),
        _ => unreachable!(),
    }
}

pub(crate) fn check_duplicates(spec: &[RowSpec]) -> Result<()> {
    for i in 0..spec.len() {
        for j in i + 1..spec.len() {
            if spec[i].func == spec[j].func
                && spec[i].order == spec[j].order
                && spec[i].location == spec[j].location
            {
                return Err(Error::DuplicateRow(format!(
                    "{:?}^({}) at {}",
                    spec[i].func, spec[i].order, spec[i].location
                )));
            }
        }
    }
    Ok(())
}

/// Assemble the covariance matrix of the requested finite-`n` rows.
pub fn covariance_block(n: usize, spec: &[RowSpec]) -> Result<CovarianceMatrix> {
    check_duplicates(spec)?;
    let d = spec.len();
    let mut entries = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let v = cov_finite(
                n,
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

/// Assemble the finite-`n` block with every row `F^{(j)}` normalized by
/// `n^{j + 1/2}`; at this normalization the entries are O(1) and comparable
/// with the limiting kernels.
pub fn covariance_block_normalized(n: usize, spec: &[RowSpec]) -> Result<CovarianceMatrix> {
    let mut block = covariance_block(n, spec)?;
    let nf = n as f64;
    let d = spec.len();
    for i in 0..d {
        for j in 0..d {
            block.entries[(i, j)] /=
                nf.powi((spec[i].order + spec[j].order) as i32 + 1);
        }
    }
    Ok(block)
}

/// Condition the block on a subset of coordinates being zero: the reduced
/// covariance of the remaining rows is the Schur complement
/// `A - B C^{-1} B^T` with `C` the pinned sub-block.
pub fn condition_on_zeros(
    block: &CovarianceMatrix,
    pinned: &[usize],
) -> Result<ConditionedGaussian> {
    let d = block.dim();
    for &p in pinned {
        assert!(p < d, "pinned index out of range");
    }
    let keep: Vec<usize> = (0..d).filter(|i| !pinned.contains(i)).collect();
    let np = pinned.len();
    let nk = keep.len();

    let mut c = DMatrix::<f64>::zeros(np, np);
    for (ii, &pi) in pinned.iter().enumerate() {
        for (jj, &pj) in pinned.iter().enumerate() {
            c[(ii, jj)] = block.entries[(pi, pj)];
        }
    }
    let eig = c.clone().symmetric_eigen();
    let max_diag = (0..np).fold(0.0f64, |a, i| a.max(c[(i, i)].abs()));
    let min_eig = eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if min_eig <= 1e-12 * max_diag {
        let locations = pinned.iter().map(|&p| block.labels[p].location).collect();
        return Err(Error::SingularPinnedBlock { locations });
    }

    // C^{-1} through the eigendecomposition already in hand.
    let mut inv = DMatrix::<f64>::zeros(np, np);
    for k in 0..np {
        let lk = eig.eigenvalues[k];
        let qk = eig.eigenvectors.column(k);
        for i in 0..np {
            for j in 0..np {
                inv[(i, j)] += qk[i] * qk[j] / lk;
            }
        }
    }

    let mut a = DMatrix::<f64>::zeros(nk, nk);
    let mut bmat = DMatrix::<f64>::zeros(nk, np);
    for (ii, &ki) in keep.iter().enumerate() {
        for (jj, &kj) in keep.iter().enumerate() {
            a[(ii, jj)] = block.entries[(ki, kj)];
        }
        for (jj, &pj) in pinned.iter().enumerate() {
            bmat[(ii, jj)] = block.entries[(ki, pj)];
        }
    }
    let mut reduced = &a - &bmat * inv * bmat.transpose();
    // Symmetrize away roundoff.
    for i in 0..nk {
        for j in i + 1..nk {
            let v = 0.5 * (reduced[(i, j)] + reduced[(j, i)]);
            reduced[(i, j)] = v;
            reduced[(j, i)] = v;
        }
    }
    Ok(ConditionedGaussian {
        base: block.clone(),
        conditioned_indices: pinned.to_vec(),
        reduced: CovarianceMatrix {
            entries: reduced,
            labels: keep.iter().map(|&k| block.labels[k]).collect(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_trivia() {
        let (d, s) = dirichlet_sum(10, 0, 0.0);
        assert_eq!(d, 11.0);
        assert_eq!(s, 0.0);
        let (d, _) = dirichlet_sum(2, 1, std::f64::consts::PI);
        assert!((d - 1.0).abs() < 1e-12); // 0 - 1 + 2
    }

    #[test]
    fn dirichlet_matches_scaled_integral() {
        // n^{-(d+1)} D_{n,d}(x) ~ int_0^1 t^d cos(x n t) dt within O(n^{-1/2}).
        let n = 10_000usize;
        let d = 2usize;
        let x = 0.3;
        let (dc, _) = dirichlet_sum(n, d, x);
        let c = x * n as f64;
        // Oracle: closed form of int_0^1 t^2 cos(ct) dt by parts.
        let integral =
            (c * c - 2.0) * c.sin() / c.powi(3) + 2.0 * c.cos() / c.powi(2);
        let err = (dc / (n as f64).powi(d as i32 + 1) - integral).abs();
        assert!(err <= 5.0 / (n as f64).sqrt(), "err {err:.3e}");
    }

    #[test]
    fn cov_finite_direct_sum_examples() {
        // n = 4, Var-like sum at x = y = pi/2: 1 + 0 + 1 + 0 + 1.
        let v = cov_finite(4, ProcessFn::X, 0, ProcessFn::X, 0, std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
        assert!((v - 3.0).abs() < 1e-12);
        // Cross XY at equal points is sin-sum of the doubled angle.
        let x = 0.83;
        let v = cov_finite(17, ProcessFn::X, 0, ProcessFn::Y, 0, x, x);
        let (_, s) = dirichlet_sum(17, 0, 2.0 * x);
        assert!((v - 0.5 * s).abs() < 1e-10);
    }

    #[test]
    fn cov_finite_matches_direct_summation_oracle() {
        let n = 60usize;
        let direct = |f: ProcessFn, a: usize, g: ProcessFn, b: usize, x: f64, y: f64| -> f64 {
            let term = |which: ProcessFn, j: usize, t: f64, k: f64| -> f64 {
                let phase = k * t + j as f64 * std::f64::consts::FRAC_PI_2;
                let w = if j == 0 && k == 0.0 { 1.0 } else { k.powi(j as i32) };
                match which {
                    ProcessFn::X => w * phase.cos(),
                    ProcessFn::Y => w * phase.sin(),
                    _ => unreachable!(),
                }
            };
            (0..=n)
                .map(|k| term(f, a, x, k as f64) * term(g, b, y, k as f64))
                .sum()
        };
        let pts = [(0.7, 0.9), (1.3, 1.3), (2.4, 0.2)];
        for &(x, y) in &pts {
            for &(f, g) in &[
                (ProcessFn::X, ProcessFn::X),
                (ProcessFn::X, ProcessFn::Y),
                (ProcessFn::Y, ProcessFn::X),
                (ProcessFn::Y, ProcessFn::Y),
            ] {
                for a in 0..=2usize {
                    for b in 0..=2usize {
                        let fast = cov_finite(n, f, a, g, b, x, y);
                        let slow = direct(f, a, g, b, x, y);
                        let scale = 1.0 + slow.abs();
                        assert!(
                            (fast - slow).abs() <= 1e-9 * scale,
                            "{f:?}^{a} {g:?}^{b} at ({x},{y}): {fast} vs {slow}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn cov_finite_kernel_symmetry() {
        let n = 33;
        for &(f, g) in &[
            (ProcessFn::X, ProcessFn::X),
            (ProcessFn::X, ProcessFn::Y),
            (ProcessFn::Y, ProcessFn::Y),
        ] {
            for (a, b) in [(0usize, 1usize), (2, 0), (1, 1)] {
                let lhs = cov_finite(n, f, a, g, b, 0.9, 1.7);
                let rhs = cov_finite(n, g, b, f, a, 1.7, 0.9);
                assert!((lhs - rhs).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn variance_of_x_near_half_n() {
        // Var X(x) / n -> 1/2 inside the axis-free window.
        let n = 2000usize;
        for &x in &[0.4, 1.1, 2.2, 2.9] {
            let v = cov_finite(n, ProcessFn::X, 0, ProcessFn::X, 0, x, x) / n as f64;
            assert!(
                (v - 0.5).abs() <= 5.0 / (n as f64).sqrt(),
                "Var X({x})/n = {v}"
            );
        }
    }

    #[test]
    fn derivative_kernel_consistent_with_finite_difference() {
        let n = 120usize;
        let h = 1e-5;
        let (x, y) = (1.1, 0.6);
        for &(f, g) in &[(ProcessFn::X, ProcessFn::X), (ProcessFn::X, ProcessFn::Y)] {
            let fd = (cov_finite(n, f, 0, g, 0, x + h, y) - cov_finite(n, f, 0, g, 0, x - h, y))
                / (2.0 * h);
            let exact = cov_finite(n, f, 1, g, 0, x, y);
            assert!(
                (fd - exact).abs() <= 1e-3 * (1.0 + exact.abs()),
                "{fd} vs {exact}"
            );
        }
    }

    #[test]
    fn block_assembly_and_duplicates() {
        let spec = [RowSpec::new(ProcessFn::X, 0, 1.0)];
        let block = covariance_block(50, &spec).unwrap();
        assert_eq!(block.dim(), 1);
        assert!((block.entries[(0, 0)] - cov_finite(50, ProcessFn::X, 0, ProcessFn::X, 0, 1.0, 1.0)).abs() < 1e-12);

        let dup = [
            RowSpec::new(ProcessFn::X, 0, 1.0),
            RowSpec::new(ProcessFn::X, 0, 1.0),
        ];
        assert!(matches!(covariance_block(50, &dup), Err(Error::DuplicateRow(_))));
    }

    #[test]
    fn assembled_blocks_are_psd() {
        let n = 300;
        let spec = [
            RowSpec::new(ProcessFn::X, 0, 0.8),
            RowSpec::new(ProcessFn::Y, 0, 0.8002),
            RowSpec::new(ProcessFn::X, 1, 0.8),
            RowSpec::new(ProcessFn::Y, 1, 0.8002),
            RowSpec::new(ProcessFn::X, 0, 2.1),
        ];
        let block = covariance_block(n, &spec).unwrap();
        let floor = -1e-9 * block.max_diagonal();
        assert!(block.min_eigenvalue() >= floor);
    }

    #[test]
    fn conditioning_textbook_identities() {
        // Block-diagonal: conditioning leaves the free block untouched.
        let spec = [
            RowSpec::new(ProcessFn::X, 0, 0.0),
            RowSpec::new(ProcessFn::Y, 0, 0.0),
        ];
        let mut block = covariance_block(10, &spec).unwrap();
        block.entries = nalgebra::dmatrix![2.0, 0.0; 0.0, 3.0];
        let cond = condition_on_zeros(&block, &[1]).unwrap();
        assert!((cond.reduced.entries[(0, 0)] - 2.0).abs() < 1e-14);

        // Correlated 2x2: reduced variance is (1 - rho^2) Var.
        let rho = 0.7;
        block.entries = nalgebra::dmatrix![1.0, rho; rho, 1.0];
        let cond = condition_on_zeros(&block, &[1]).unwrap();
        assert!((cond.reduced.entries[(0, 0)] - (1.0 - rho * rho)).abs() < 1e-14);
    }

    #[test]
    fn conditioning_shrinks_variance() {
        let n = 400;
        let x = 1.2;
        let y = x + 3.0 / (n as f64 * n as f64);
        let spec = [
            RowSpec::new(ProcessFn::X, 1, x),
            RowSpec::new(ProcessFn::Y, 1, y),
            RowSpec::new(ProcessFn::X, 0, x),
            RowSpec::new(ProcessFn::Y, 0, y),
        ];
        let block = covariance_block(n, &spec).unwrap();
        let cond = condition_on_zeros(&block, &[2, 3]).unwrap();
        for i in 0..2 {
            assert!(cond.reduced.entries[(i, i)] <= block.entries[(i, i)] + 1e-9);
        }
    }

    #[test]
    fn conditioning_rejects_singular_pinned_block() {
        let spec = [
            RowSpec::new(ProcessFn::X, 0, 1.0),
            RowSpec::new(ProcessFn::X, 0, 1.0 + 1e-13),
            RowSpec::new(ProcessFn::X, 1, 1.0),
        ];
        let block = covariance_block(200, &spec).unwrap();
        match condition_on_zeros(&block, &[0, 1]) {
            Err(Error::SingularPinnedBlock { locations }) => assert_eq!(locations.len(), 2),
            other => panic!("expected singular pinned block, got {other:?}"),
        }
    }
}

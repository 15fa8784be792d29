//! Divided differences and the determinant of the differencing operator.

use crate::{Error, Result};

fn check_increasing(xs: &[f64]) -> Result<()> {
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonIncreasingAbscissae);
    }
    Ok(())
}

/// Top row of the divided-difference table: `[y0], [y0,y1], ...,
/// [y0,...,y_{k}]` for strictly increasing abscissae.
pub fn divided_differences(xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::InvalidParameter(
            "xs and ys must be nonempty and of equal length".into(),
        ));
    }
    check_increasing(xs)?;
    let k = xs.len();
    let mut column = ys.to_vec();
    let mut top = Vec::with_capacity(k);
    top.push(column[0]);
    for depth in 1..k {
        for i in 0..k - depth {
            column[i] = (column[i + 1] - column[i]) / (xs[i + depth] - xs[i]);
        }
        top.push(column[0]);
    }
    Ok(top)
}

/// Determinant of the divided-differencing operator on `k` points:
/// the product `prod_{i<j} (x_j - x_i)^{-1}`, evaluated in log space.
/// Always positive for increasing abscissae.
pub fn delta_det(xs: &[f64]) -> Result<f64> {
    check_increasing(xs)?;
    let mut log_total = 0.0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            log_total -= (xs[j] - xs[i]).ln();
        }
    }
    Ok(log_total.exp())
}

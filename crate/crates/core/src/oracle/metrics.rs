use super::grid::{trapezoid, GridDensity};
use super::mc::PathEnsemble;
use crate::error::{Error, Result};

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Trapezoidal integral of `|g1 - g2|` over a shared grid.
pub fn l1_distance(g1: &GridDensity, g2: &GridDensity) -> Result<f64> {
    if g1.n() != g2.n() || !same(g1.x_min(), g2.x_min()) || !same(g1.x_max(), g2.x_max()) {
        return Err(Error::IncompatibleGrids(format!(
            "[{}, {}] x {} vs [{}, {}] x {}",
            g1.x_min(),
            g1.x_max(),
            g1.n(),
            g2.x_min(),
            g2.x_max(),
            g2.n()
        )));
    }
    if !same(g1.time(), g2.time()) {
        return Err(Error::IncompatibleGrids(format!(
            "times differ: {} vs {}",
            g1.time(),
            g2.time()
        )));
    }
    let diff: Vec<f64> = g1
        .values()
        .iter()
        .zip(g2.values())
        .map(|(a, b)| (a - b).abs())
        .collect();
    Ok(trapezoid(&diff, g1.dx()))
}

/// Kolmogorov-Smirnov distance between the terminal positions and `cdf`.
pub fn ks_statistic(ensemble: &PathEnsemble, cdf: impl Fn(f64) -> f64) -> f64 {
    ks_of_samples(&ensemble.terminal_positions, cdf)
}

pub(crate) fn ks_of_samples(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

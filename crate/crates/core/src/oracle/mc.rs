//! Euler-Maruyama for `dx = D1 dt + sqrt(2 D2) dB` (Itô).
//!
//! Path `i` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `i`, so the
//! ensemble is bit-reproducible and independent of how paths are scheduled
//! across threads. Uniforms take the top 53 bits of a `u64` and are offset by
//! half an ulp into `(0, 1)`; normals come from the inverse normal CDF.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::function::erf::erfc_inv;

use crate::error::{Error, Result};
use crate::profiles::DomainKind;
use crate::scaling::CoefficientPair;
use crate::solutions::SimilaritySolution;

pub const MIN_PATHS: usize = 10_000;
/// `dt` may be at most `(t1 - t0) / MIN_STEPS`.
pub const MIN_STEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub n_paths: usize,
    pub terminal_positions: Vec<f64>,
    pub t0: f64,
    pub t1: f64,
    /// Step actually taken: the requested step shrunk to divide `t1 - t0` evenly.
    pub dt: f64,
    pub seed: u64,
}

impl PathEnsemble {
    pub fn mean(&self) -> f64 {
        self.terminal_positions.iter().sum::<f64>() / self.n_paths as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.terminal_positions.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (self.n_paths as f64 - 1.0)
    }
}

#[inline]
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * uniform(rng))
}

pub fn mc_sample(
    pair: &CoefficientPair,
    initial: &SimilaritySolution,
    t0: f64,
    t1: f64,
    n_paths: usize,
    dt: f64,
    seed: u64,
) -> Result<PathEnsemble> {
    if !(t0 > 0.0 && t1 > t0 && t1.is_finite()) {
        return Err(Error::Precondition(format!("need 0 < t0 < t1, got t0 = {t0}, t1 = {t1}")));
    }
    if n_paths < MIN_PATHS {
        return Err(Error::Precondition(format!("n_paths must be >= {MIN_PATHS}, got {n_paths}")));
    }
    let max_dt = (t1 - t0) / MIN_STEPS as f64;
    if !(dt > 0.0 && dt <= max_dt * (1.0 + 1e-12)) {
        return Err(Error::Precondition(format!("dt must be in (0, {max_dt}], got {dt}")));
    }
    let steps = ((t1 - t0) / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let sqrt_h = h.sqrt();
    let kind = initial.domain().kind;
    let reflect = move |x: f64| match kind {
        DomainKind::FullLine => x,
        DomainKind::NonNegative => x.abs(),
        DomainKind::NonPositive => -x.abs(),
    };

    // time factors are shared by every path, so freeze them once per step
    let frozen: Vec<_> = (0..steps)
        .map(|k| {
            let t = t0 + k as f64 * h;
            (t, pair.at_time(t))
        })
        .collect();

    let positions = (0..n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut x = initial.quantile(uniform(&mut rng), t0)?;
            for (t, coeffs) in &frozen {
                let d2 = coeffs.diffusion(x);
                if d2.is_nan() || d2 < 0.0 {
                    return Err(Error::IllPosedDiffusion { x, t: *t, value: d2 });
                }
                let dw = sqrt_h * standard_normal(&mut rng);
                x = reflect(x + coeffs.drift(x) * h + (2.0 * d2).sqrt() * dw);
            }
            Ok(x)
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(PathEnsemble {
        n_paths,
        terminal_positions: positions,
        t0,
        t1,
        dt: h,
        seed,
    })
}

use crate::error::{Error, Result};
use crate::solutions::SimilaritySolution;

pub const MIN_GRID_POINTS: usize = 16;

/// Density sampled at `n` uniform nodes spanning `[x_min, x_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    x_min: f64,
    x_max: f64,
    values: Vec<f64>,
    time: f64,
}

impl GridDensity {
    pub fn new(x_min: f64, x_max: f64, values: Vec<f64>, time: f64) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidInput(format!(
                "grid bounds must be finite with x_max > x_min, got [{x_min}, {x_max}]"
            )));
        }
        if values.len() < MIN_GRID_POINTS {
            return Err(Error::InvalidInput(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {}",
                values.len()
            )));
        }
        if !(time.is_finite() && time > 0.0) {
            return Err(Error::InvalidTime(time));
        }
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "grid value {i} must be finite and non-negative, got {}",
                values[i]
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            values,
            time,
        })
    }

    pub fn from_fn(x_min: f64, x_max: f64, n: usize, time: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n < MIN_GRID_POINTS {
            return Err(Error::InvalidInput(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {n}"
            )));
        }
        let dx = (x_max - x_min) / (n - 1) as f64;
        let values = (0..n).map(|i| f(x_min + i as f64 * dx)).collect();
        Self::new(x_min, x_max, values, time)
    }

    /// Closed-form density sampled at time `t`.
    pub fn from_solution(sol: &SimilaritySolution, x_min: f64, x_max: f64, n: usize, t: f64) -> Result<Self> {
        crate::scaling::check_time(t)?;
        Self::from_fn(x_min, x_max, n, t, |x| sol.density_unchecked(x, t))
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn n(&self) -> usize {
        self.values.len()
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n() - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n()).map(|i| self.x(i))
    }

    /// Trapezoidal integral of the values.
    pub fn mass(&self) -> f64 {
        trapezoid(&self.values, self.dx())
    }

    pub(crate) fn with_values(&self, values: Vec<f64>, time: f64) -> Self {
        Self {
            x_min: self.x_min,
            x_max: self.x_max,
            values,
            time,
        }
    }
}

pub(crate) fn trapezoid(v: &[f64], dx: f64) -> f64 {
    let n = v.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = v[1..n - 1].iter().sum();
    dx * (inner + 0.5 * (v[0] + v[n - 1]))
}

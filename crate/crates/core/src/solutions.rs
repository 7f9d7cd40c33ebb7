//! The three normalized similarity-solution families, their probability
//! currents, descriptive statistics and parameter symmetries.
//!
//! | family      | `rho1`        | `rho2`  | domain        |
//! |-------------|---------------|---------|---------------|
//! | gaussian    | `mu1 z + mu2` | `mu4`   | full line     |
//! | exponential | `alpha z + mu2` | `mu4` | half line by `sign(mu2/mu4)` |
//! | gamma       | `mu1 z + mu2` | `mu3 z` | `[0, inf)`    |

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma};
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::error::{Error, Result};
use crate::profiles::{DomainInterval, DomainKind, Polynomial, Profile};
use crate::quadrature::Quadrature;
use crate::reduction::{first_integral, reduce, solve_shape, ShapeSolution};
use crate::scaling::{check_alpha, check_time, synthesize_coefficients, CoefficientPair};

/// `2 sqrt(2 ln 2)`, the FWHM of a unit-variance Gaussian.
pub const FWHM_FACTOR: f64 = 2.354_820_045_030_949_3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
    Exponential,
    Gamma,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gaussian => "gaussian",
            Self::Exponential => "exponential",
            Self::Gamma => "gamma",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilaritySolution {
    family: Family,
    alpha: f64,
    mu1: f64,
    mu2: f64,
    mu3: Option<f64>,
    mu4: Option<f64>,
    domain: DomainInterval,
    /// `ln A`, with `W = A t^(-alpha) y(z)` and `y = exp(F)` anchored at `F(0) = 0`
    /// (at `F(1) = 0` for the gamma family).
    ln_normalization: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileStats {
    pub peak_location: f64,
    pub peak_value: f64,
    pub fwhm: Option<f64>,
    pub mean: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symmetry {
    /// `mu2 -> -mu2`: the density is mirrored, `W'(x, t) = W(-x, t)`.
    MirrorMu2,
    /// `(mu1, mu2, mu4) -> (2 alpha - mu1, -mu2, -mu4)` for the Gaussian family.
    ConjugateParams,
    /// Scales the parameter pair whose ratio fixes the density.
    RatioRescale(f64),
    /// `(alpha, mu1) -> (-alpha, mu1 - 2 alpha)`; the image at `1/t` equals the original at `t`.
    TimeInversion,
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MirrorMu2 => f.write_str("mirror-mu2"),
            Self::ConjugateParams => f.write_str("conjugate-params"),
            Self::RatioRescale(k) => write!(f, "ratio-rescale({k})"),
            Self::TimeInversion => f.write_str("time-inversion"),
        }
    }
}

fn check_finite(values: &[(&str, f64)]) -> Result<()> {
    for (name, v) in values {
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!("{name} must be finite, got {v}")));
        }
    }
    Ok(())
}

/// Normalized Gaussian on the full line with mean `mu2 t^alpha / (alpha - mu1)`
/// and variance `mu4 t^(2 alpha) / (alpha - mu1)`.
pub fn gaussian_solution(alpha: f64, mu1: f64, mu2: f64, mu4: f64) -> Result<SimilaritySolution> {
    check_finite(&[("alpha", alpha), ("mu1", mu1), ("mu2", mu2), ("mu4", mu4)])?;
    check_alpha(alpha)?;
    let valid = (mu4 > 0.0 && mu1 < alpha) || (mu4 < 0.0 && mu1 > alpha);
    if !valid {
        return Err(Error::Unnormalizable(format!(
            "gaussian family needs (mu4 > 0, mu1 < alpha) or (mu4 < 0, mu1 > alpha); \
             got alpha = {alpha}, mu1 = {mu1}, mu4 = {mu4}"
        )));
    }
    let g = alpha - mu1;
    let ln_a = 0.5 * (g / (2.0 * PI * mu4)).ln() - mu2 * mu2 / (2.0 * mu4 * g);
    Ok(SimilaritySolution {
        family: Family::Gaussian,
        alpha,
        mu1,
        mu2,
        mu3: None,
        mu4: Some(mu4),
        domain: DomainInterval::full_line(),
        ln_normalization: ln_a,
    })
}

/// `W = |c| exp(c x)` with `c = mu2 / (mu4 t^alpha)` on the half line where it decays.
/// The drift slope `mu1` equals `alpha` on this branch.
pub fn exponential_solution(alpha: f64, mu2: f64, mu4: f64) -> Result<SimilaritySolution> {
    check_finite(&[("alpha", alpha), ("mu2", mu2), ("mu4", mu4)])?;
    check_alpha(alpha)?;
    if mu2 == 0.0 || mu4 == 0.0 {
        return Err(Error::DegenerateFamily(format!(
            "exponential family needs mu2 != 0 and mu4 != 0; got mu2 = {mu2}, mu4 = {mu4}"
        )));
    }
    let ratio = mu2 / mu4;
    let domain = if ratio < 0.0 {
        DomainInterval::non_negative()
    } else {
        DomainInterval::non_positive()
    };
    Ok(SimilaritySolution {
        family: Family::Exponential,
        alpha,
        mu1: alpha,
        mu2,
        mu3: None,
        mu4: Some(mu4),
        domain,
        ln_normalization: ratio.abs().ln(),
    })
}

/// Gamma density on `[0, inf)` with shape `mu2 / mu3` and rate `(alpha - mu1) / (mu3 t^alpha)`.
pub fn gamma_solution(alpha: f64, mu1: f64, mu2: f64, mu3: f64) -> Result<SimilaritySolution> {
    check_finite(&[("alpha", alpha), ("mu1", mu1), ("mu2", mu2), ("mu3", mu3)])?;
    check_alpha(alpha)?;
    if mu3 == 0.0 {
        return Err(Error::DegenerateFamily("gamma family needs mu3 != 0".into()));
    }
    let rate = (alpha - mu1) / mu3;
    let shape = mu2 / mu3;
    if rate.is_nan() || rate <= 0.0 {
        return Err(Error::Unnormalizable(format!(
            "gamma family needs (alpha - mu1) / mu3 > 0, got {rate}"
        )));
    }
    if shape.is_nan() || shape < 1.0 {
        return Err(Error::Unnormalizable(format!(
            "gamma family needs mu2 / mu3 >= 1, got {shape}"
        )));
    }
    // y(z) = z^(k-1) exp(-rate z) is 1/e^rate at z = 1; fold that into A
    Ok(SimilaritySolution {
        family: Family::Gamma,
        alpha,
        mu1,
        mu2,
        mu3: Some(mu3),
        mu4: None,
        domain: DomainInterval::non_negative(),
        ln_normalization: shape * rate.ln() - ln_gamma(shape),
    })
}

impl SimilaritySolution {
    /// Dispatches on the family; unused parameters are ignored.
    pub fn from_parameters(
        family: Family,
        alpha: f64,
        mu1: Option<f64>,
        mu2: f64,
        mu3: Option<f64>,
        mu4: Option<f64>,
    ) -> Result<Self> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::InvalidInput(format!("{family} family requires {name}")))
        };
        match family {
            Family::Gaussian => gaussian_solution(alpha, need(mu1, "mu1")?, mu2, need(mu4, "mu4")?),
            Family::Exponential => {
                if let Some(m1) = mu1 {
                    if m1 != alpha {
                        return Err(Error::InvalidInput(format!(
                            "exponential family has mu1 = alpha; got mu1 = {m1}, alpha = {alpha}"
                        )));
                    }
                }
                exponential_solution(alpha, mu2, need(mu4, "mu4")?)
            }
            Family::Gamma => gamma_solution(alpha, need(mu1, "mu1")?, mu2, need(mu3, "mu3")?),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn mu1(&self) -> f64 {
        self.mu1
    }
    pub fn mu2(&self) -> f64 {
        self.mu2
    }
    pub fn mu3(&self) -> Option<f64> {
        self.mu3
    }
    pub fn mu4(&self) -> Option<f64> {
        self.mu4
    }
    pub fn domain(&self) -> DomainInterval {
        self.domain
    }

    /// The constant `A` in `W = A t^(-alpha) y(z)`.
    pub fn normalization(&self) -> f64 {
        self.ln_normalization.exp()
    }

    pub fn ln_normalization(&self) -> f64 {
        self.ln_normalization
    }

    /// Gamma shape `k = mu2 / mu3`.
    fn shape_k(&self) -> f64 {
        self.mu2 / self.mu3.unwrap_or(f64::NAN)
    }

    /// Exponential or gamma rate at time `t` (positive).
    fn rate(&self, t: f64) -> f64 {
        let ta = t.powf(self.alpha);
        match self.family {
            Family::Gaussian => f64::NAN,
            Family::Exponential => (self.mu2 / (self.mu4.unwrap_or(f64::NAN) * ta)).abs(),
            Family::Gamma => (self.alpha - self.mu1) / (self.mu3.unwrap_or(f64::NAN) * ta),
        }
    }

    fn gaussian_moments(&self, t: f64) -> (f64, f64) {
        let g = self.alpha - self.mu1;
        let ta = t.powf(self.alpha);
        let mu4 = self.mu4.unwrap_or(f64::NAN);
        (self.mu2 * ta / g, mu4 * ta * ta / g)
    }

    /// Drift and diffusion profiles `(rho1, rho2)` of this family.
    pub fn profiles(&self) -> (Profile, Profile) {
        let rho1 = Polynomial::linear(self.mu2, self.mu1);
        let rho2 = match self.family {
            Family::Gaussian | Family::Exponential => Polynomial::constant(self.mu4.unwrap_or(f64::NAN)),
            Family::Gamma => Polynomial::linear(0.0, self.mu3.unwrap_or(f64::NAN)),
        };
        (Profile::Polynomial(rho1), Profile::Polynomial(rho2))
    }

    pub fn coefficients(&self) -> CoefficientPair {
        let (rho1, rho2) = self.profiles();
        synthesize_coefficients(&rho1, &rho2, self.alpha).expect("alpha validated at construction")
    }

    /// The unnormalized profile obtained through the general reduction route.
    pub fn shape(&self) -> Result<ShapeSolution> {
        let (rho1, rho2) = self.profiles();
        let ode = reduce(&rho1, &rho2, self.alpha)?;
        let fi = first_integral(&ode, self.domain);
        solve_shape(&fi, &rho1, &rho2, self.alpha, self.domain)
    }

    /// `W(x, t)`, zero outside the domain.
    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(self.density_unchecked(x, t))
    }

    pub(crate) fn density_unchecked(&self, x: f64, t: f64) -> f64 {
        if !self.domain.contains(x) {
            return 0.0;
        }
        match self.family {
            Family::Gaussian => {
                let (mean, var) = self.gaussian_moments(t);
                let d = x - mean;
                (1.0 / (2.0 * PI * var)).sqrt() * (-d * d / (2.0 * var)).exp()
            }
            Family::Exponential => {
                let ta = t.powf(self.alpha);
                let c = self.mu2 / (self.mu4.unwrap_or(f64::NAN) * ta);
                c.abs() * (c * x).exp()
            }
            Family::Gamma => {
                let k = self.shape_k();
                let rate = self.rate(t);
                if x == 0.0 {
                    return if k == 1.0 { rate } else { 0.0 };
                }
                (k * rate.ln() - ln_gamma(k) + (k - 1.0) * x.ln() - rate * x).exp()
            }
        }
    }

    /// Probability current `J = alpha x W / t`.
    pub fn current(&self, x: f64, t: f64) -> Result<f64> {
        Ok(self.alpha * x * self.density(x, t)? / t)
    }

    /// `P(X <= x)` at time `t`.
    pub fn cdf(&self, x: f64, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(match self.family {
            Family::Gaussian => {
                let (mean, var) = self.gaussian_moments(t);
                0.5 * erfc(-(x - mean) / (2.0 * var).sqrt())
            }
            Family::Exponential => {
                let lambda = self.rate(t);
                match self.domain.kind {
                    DomainKind::NonNegative if x <= 0.0 => 0.0,
                    DomainKind::NonNegative => -(-lambda * x).exp_m1(),
                    _ if x >= 0.0 => 1.0,
                    _ => (lambda * x).exp(),
                }
            }
            Family::Gamma => {
                if x <= 0.0 {
                    0.0
                } else {
                    gamma_lr(self.shape_k(), self.rate(t) * x)
                }
            }
        })
    }

    /// Inverse CDF for `u` in `(0, 1)`.
    pub fn quantile(&self, u: f64, t: f64) -> Result<f64> {
        check_time(t)?;
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidInput(format!("quantile level must be in (0, 1), got {u}")));
        }
        Ok(match self.family {
            Family::Gaussian => {
                let (mean, var) = self.gaussian_moments(t);
                mean - (2.0 * var).sqrt() * erfc_inv(2.0 * u)
            }
            Family::Exponential => {
                let lambda = self.rate(t);
                match self.domain.kind {
                    DomainKind::NonNegative => -(-u).ln_1p() / lambda,
                    _ => u.ln() / lambda,
                }
            }
            Family::Gamma => {
                let k = self.shape_k();
                let rate = self.rate(t);
                if k == 1.0 {
                    -(-u).ln_1p() / rate
                } else {
                    Gamma::new(k, rate)
                        .map_err(|e| Error::InvalidInput(e.to_string()))?
                        .inverse_cdf(u)
                }
            }
        })
    }

    /// `integral of W(x, t) dx` over the domain by adaptive quadrature.
    pub fn mass(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let stats = self.profile_stats(t)?;
        let sd = stats.variance.sqrt();
        let m = stats.mean;
        let breaks = [m - 8.0 * sd, m - sd, m, m + sd, m + 8.0 * sd, stats.peak_location];
        let q = Quadrature::default();
        Ok(q
            .integrate_with_breaks(
                |x| self.density_unchecked(x, t),
                self.domain.lower,
                self.domain.upper,
                &breaks,
            )
            .value)
    }

    pub fn profile_stats(&self, t: f64) -> Result<ProfileStats> {
        check_time(t)?;
        Ok(match self.family {
            Family::Gaussian => {
                let (mean, var) = self.gaussian_moments(t);
                ProfileStats {
                    peak_location: mean,
                    peak_value: (1.0 / (2.0 * PI * var)).sqrt(),
                    fwhm: Some(FWHM_FACTOR * var.sqrt()),
                    mean,
                    variance: var,
                }
            }
            Family::Exponential => {
                let lambda = self.rate(t);
                let sign = if self.domain.kind == DomainKind::NonNegative { 1.0 } else { -1.0 };
                ProfileStats {
                    peak_location: 0.0,
                    peak_value: lambda,
                    fwhm: None,
                    mean: sign / lambda,
                    variance: 1.0 / (lambda * lambda),
                }
            }
            Family::Gamma => {
                let k = self.shape_k();
                let rate = self.rate(t);
                let mode = ((k - 1.0) / rate).max(0.0);
                ProfileStats {
                    peak_location: mode,
                    peak_value: self.density_unchecked(mode, t),
                    fwhm: None,
                    mean: k / rate,
                    variance: k / (rate * rate),
                }
            }
        })
    }

    /// Full width at half maximum; defined for the Gaussian family only.
    pub fn fwhm(&self, t: f64) -> Result<f64> {
        match self.profile_stats(t)?.fwhm {
            Some(w) => Ok(w),
            None => Err(Error::UnsupportedStatistic("fwhm")),
        }
    }

    pub fn apply_symmetry(&self, transform: Symmetry) -> Result<Self> {
        let unsupported = || Error::UnsupportedTransform {
            transform: transform.to_string(),
            family: self.family.to_string(),
        };
        let mu4 = self.mu4.unwrap_or(f64::NAN);
        let mu3 = self.mu3.unwrap_or(f64::NAN);
        match (transform, self.family) {
            (Symmetry::MirrorMu2, Family::Gaussian) => {
                gaussian_solution(self.alpha, self.mu1, -self.mu2, mu4)
            }
            (Symmetry::MirrorMu2, Family::Exponential) => {
                exponential_solution(self.alpha, -self.mu2, mu4)
            }
            (Symmetry::ConjugateParams, Family::Gaussian) => {
                gaussian_solution(self.alpha, 2.0 * self.alpha - self.mu1, -self.mu2, -mu4)
            }
            (Symmetry::RatioRescale(k), Family::Exponential | Family::Gamma) => {
                if !k.is_finite() || k == 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "ratio-rescale factor must be finite and nonzero, got {k}"
                    )));
                }
                if self.family == Family::Exponential {
                    exponential_solution(self.alpha, k * self.mu2, k * mu4)
                } else {
                    let mu1 = self.alpha + k * (self.mu1 - self.alpha);
                    gamma_solution(self.alpha, mu1, k * self.mu2, k * mu3)
                }
            }
            (Symmetry::TimeInversion, Family::Gamma) => {
                gamma_solution(-self.alpha, self.mu1 - 2.0 * self.alpha, self.mu2, mu3)
            }
            _ => Err(unsupported()),
        }
    }
}

/// Time at which the constant-diffusion and linear-in-time-diffusion Gaussian
/// solutions with drift `mu1 x / t`, `mu2 = 0` and equal `mu4` coincide.
pub fn crossing_time(mu1: f64) -> Result<f64> {
    if !mu1.is_finite() {
        return Err(Error::InvalidInput(format!("mu1 must be finite, got {mu1}")));
    }
    if mu1 == 0.5 {
        return Err(Error::UndefinedCrossing);
    }
    Ok(2.0 * (1.0 - mu1) / (1.0 - 2.0 * mu1))
}

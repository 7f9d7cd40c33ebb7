//! Reduction of the scaled equation to a second-order ODE in `y(z)`, its first
//! integral under vanishing boundary current, and the resulting shape `y(z)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::profiles::{shape_function, DomainInterval, DomainKind, Polynomial, Profile};
use crate::quadrature::Quadrature;
use crate::scaling::check_alpha;

/// Slopes this close to `alpha` are treated as the exponential branch.
const BRANCH_TOL: f64 = 1e-12;

/// `p2 y'' + p1 y' + p0 y = 0`
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedOde {
    pub p2: Polynomial,
    pub p1: Polynomial,
    pub p0: Polynomial,
    pub alpha: f64,
    pub rho1: Polynomial,
    pub rho2: Polynomial,
}

impl ReducedOde {
    /// `p1' - p2'' - p0`; identically zero for every reduced equation.
    pub fn reducibility_residual(&self) -> Polynomial {
        &(&self.p1.derivative() - &self.p2.derivative().derivative()) - &self.p0
    }
}

fn polynomial_profile<'a>(p: &'a Profile, name: &str) -> Result<&'a Polynomial> {
    p.as_polynomial().ok_or_else(|| {
        Error::Unsupported(format!("{name} must be a polynomial profile for symbolic reduction"))
    })
}

/// Coefficients of the reduced ODE:
/// `p2 = rho2`, `p1 = 2 rho2' - rho1 + alpha z`, `p0 = rho2'' - rho1' + alpha`.
pub fn reduce(rho1: &Profile, rho2: &Profile, alpha: f64) -> Result<ReducedOde> {
    check_alpha(alpha)?;
    let r1 = polynomial_profile(rho1, "rho1")?;
    let r2 = polynomial_profile(rho2, "rho2")?;
    let r2p = r2.derivative();
    let p1 = &(&r2p.scale(2.0) - r1) + &Polynomial::linear(0.0, alpha);
    let p0 = &(&r2p.derivative() - &r1.derivative()) + &Polynomial::constant(alpha);
    let ode = ReducedOde {
        p2: r2.clone(),
        p1,
        p0,
        alpha,
        rho1: r1.clone(),
        rho2: r2.clone(),
    };
    let residual = ode.reducibility_residual();
    let scale = ode
        .p1
        .coeffs()
        .iter()
        .chain(ode.p0.coeffs())
        .chain(ode.p2.coeffs())
        .fold(1.0f64, |m, c| m.max(c.abs()));
    debug_assert!(
        residual.approx_eq(&Polynomial::zero(), 1e-12 * scale * 16.0),
        "reducibility identity failed: {residual}"
    );
    Ok(ode)
}

/// `p2 y' + q y = constant`
#[derive(Debug, Clone, PartialEq)]
pub struct FirstIntegral {
    pub p2: Polynomial,
    /// `rho2' - rho1 + alpha z`
    pub q: Polynomial,
    /// Always zero: vanishing current and `x W -> 0` at the boundary.
    pub constant: f64,
    pub domain: DomainInterval,
}

pub fn first_integral(ode: &ReducedOde, domain: DomainInterval) -> FirstIntegral {
    let q = &(&ode.rho2.derivative() - &ode.rho1) + &Polynomial::linear(0.0, ode.alpha);
    FirstIntegral {
        p2: ode.p2.clone(),
        q,
        constant: 0.0,
        domain,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeForm {
    GaussianQuadraticExponent,
    PureExponential,
    PowerTimesExponential,
    GenericQuadrature,
}

pub type Antiderivative = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Unnormalized similarity profile `y(z) = exp(F(z))` with `F' = f`.
#[derive(Clone)]
pub struct ShapeSolution {
    pub f: Profile,
    antiderivative: Antiderivative,
    pub domain: DomainInterval,
    pub form: ShapeForm,
}

impl fmt::Debug for ShapeSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShapeSolution")
            .field("f", &self.f)
            .field("domain", &self.domain)
            .field("form", &self.form)
            .finish_non_exhaustive()
    }
}

impl ShapeSolution {
    /// `F(z)`, the log of the unnormalized profile.
    pub fn antiderivative(&self, z: f64) -> f64 {
        (self.antiderivative)(z)
    }

    pub fn y(&self, z: f64) -> f64 {
        self.antiderivative(z).exp()
    }

    /// Generic branch: `F(z) = integral of f from z0 to z` by adaptive quadrature,
    /// with `z0 = 0` on the full line and `z0 = +-1` on the half lines.
    pub fn by_quadrature(f: Profile, domain: DomainInterval) -> Self {
        let anchor = quadrature_anchor(&domain);
        let integrand = f.clone();
        let quad = Quadrature::default();
        let antiderivative: Antiderivative = Arc::new(move |z: f64| {
            let g = |s: f64| integrand.eval(s).unwrap_or(f64::NAN);
            quad.integrate(g, anchor, z).value
        });
        Self {
            f,
            antiderivative,
            domain,
            form: ShapeForm::GenericQuadrature,
        }
    }
}

fn quadrature_anchor(domain: &DomainInterval) -> f64 {
    match domain.kind {
        DomainKind::FullLine => 0.0,
        DomainKind::NonNegative => 1.0,
        DomainKind::NonPositive => -1.0,
    }
}

/// Linear `rho1 = mu1 z + mu2` as `(mu1, mu2)`.
fn linear_parts(p: &Polynomial) -> Option<(f64, f64)> {
    (p.degree() <= 1).then(|| (p.coeff(1), p.coeff(0)))
}

fn check_nonzero_in_interior(rho2: &Profile, domain: &DomainInterval) -> Result<()> {
    match rho2 {
        Profile::Polynomial(p) => p.check_no_interior_roots(domain),
        Profile::Rational {
            numerator,
            denominator,
        } => {
            numerator.check_no_interior_roots(domain)?;
            denominator.check_no_interior_roots(domain)
        }
        Profile::Generic(_) => {
            // sign scan over a bounded window
            let lo = domain.lower.max(-50.0);
            let hi = domain.upper.min(50.0);
            let n = 4000;
            let mut prev: Option<(f64, f64)> = None;
            for i in 1..n {
                let z = lo + (hi - lo) * i as f64 / n as f64;
                let v = rho2.eval(z)?;
                if v == 0.0 {
                    return Err(Error::InteriorDegeneracy { z });
                }
                if let Some((pz, pv)) = prev {
                    if pv.signum() != v.signum() {
                        return Err(Error::InteriorDegeneracy { z: 0.5 * (pz + z) });
                    }
                }
                prev = Some((z, v));
            }
            Ok(())
        }
    }
}

/// Closed-form or quadrature solution of `p2 y' + q y = 0`.
///
/// Recognized symbolically:
/// constant `rho2` with linear `rho1` of slope `!= alpha` (Gaussian exponent),
/// constant `rho2` with slope `== alpha` (pure exponential), and
/// `rho2 = mu3 z` with linear `rho1` (power times exponential, half lines only).
pub fn solve_shape(
    fi: &FirstIntegral,
    rho1: &Profile,
    rho2: &Profile,
    alpha: f64,
    domain: DomainInterval,
) -> Result<ShapeSolution> {
    check_alpha(alpha)?;
    if fi.constant != 0.0 {
        return Err(Error::Unsupported("first integrals with nonzero constant".into()));
    }
    check_nonzero_in_interior(rho2, &domain)?;
    let f = shape_function(rho1, rho2, alpha)?;

    if let (Profile::Polynomial(r1), Profile::Polynomial(r2)) = (rho1, rho2) {
        if let Some((mu1, mu2)) = linear_parts(r1) {
            if r2.degree() == 0 {
                let mu4 = r2.coeff(0);
                if (mu1 - alpha).abs() <= BRANCH_TOL {
                    let rate = mu2 / mu4;
                    return Ok(ShapeSolution {
                        f,
                        antiderivative: Arc::new(move |z| rate * z),
                        domain,
                        form: ShapeForm::PureExponential,
                    });
                }
                let (quad, lin) = ((mu1 - alpha) / (2.0 * mu4), mu2 / mu4);
                return Ok(ShapeSolution {
                    f,
                    antiderivative: Arc::new(move |z| quad * z * z + lin * z),
                    domain,
                    form: ShapeForm::GaussianQuadraticExponent,
                });
            }
            if r2.degree() == 1 && r2.coeff(0) == 0.0 {
                let mu3 = r2.coeff(1);
                let power = mu2 / mu3 - 1.0;
                let lin = (mu1 - alpha) / mu3;
                let antiderivative: Antiderivative = if power == 0.0 {
                    Arc::new(move |z| lin * z)
                } else {
                    Arc::new(move |z: f64| power * z.abs().ln() + lin * z)
                };
                return Ok(ShapeSolution {
                    f,
                    antiderivative,
                    domain,
                    form: ShapeForm::PowerTimesExponential,
                });
            }
        }
    }
    Ok(ShapeSolution::by_quadrature(f, domain))
}

fn central_step(z: f64) -> f64 {
    1e-5 * (z.abs() + 1.0)
}

// larger step for the second difference keeps its round-off near 1e-8
fn second_difference_step(z: f64) -> f64 {
    1e-4 * (z.abs() + 1.0)
}

/// Max over samples of `|p2 y'' + p1 y' + p0 y| / (1 + |y|)`, derivatives by central differences.
pub fn ode_residual<F: Fn(f64) -> f64>(ode: &ReducedOde, y: F, z_samples: &[f64]) -> f64 {
    z_samples
        .iter()
        .map(|&z| {
            let h = central_step(z);
            let y0 = y(z);
            let d1 = (y(z + h) - y(z - h)) / (2.0 * h);
            let h2 = second_difference_step(z);
            let d2 = (y(z + h2) - 2.0 * y0 + y(z - h2)) / (h2 * h2);
            let r = ode.p2.eval(z) * d2 + ode.p1.eval(z) * d1 + ode.p0.eval(z) * y0;
            r.abs() / (1.0 + y0.abs())
        })
        .fold(0.0, f64::max)
}

/// Max over samples of `|p2 y' + q y - C| / (1 + |y|)`.
pub fn first_integral_residual<F: Fn(f64) -> f64>(fi: &FirstIntegral, y: F, z_samples: &[f64]) -> f64 {
    z_samples
        .iter()
        .map(|&z| {
            let h = central_step(z);
            let y0 = y(z);
            let d1 = (y(z + h) - y(z - h)) / (2.0 * h);
            let r = fi.p2.eval(z) * d1 + fi.q.eval(z) * y0 - fi.constant;
            r.abs() / (1.0 + y0.abs())
        })
        .fold(0.0, f64::max)
}

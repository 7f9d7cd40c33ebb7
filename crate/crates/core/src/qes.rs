//! Reducibility test for `P y'' + Q y' + R y = 0`: the equation can only be
//! a similarity-reduced Fokker-Planck equation if `Q' = P'' + R`.

use crate::error::{Error, Result};
use crate::profiles::{Polynomial, Profile};
use crate::reduction::ReducedOde;

/// Absolute tolerance on each coefficient of `Q' - P'' - R`.
pub const REDUCIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QesOde {
    p: Polynomial,
    q: Polynomial,
    r: Polynomial,
}

impl QesOde {
    pub fn new(p: &Profile, q: &Profile, r: &Profile) -> Result<Self> {
        let poly = |prof: &Profile, name: &str| {
            prof.as_polynomial().cloned().ok_or_else(|| {
                Error::Unsupported(format!("{name} must be a polynomial for the reducibility test"))
            })
        };
        Self::from_polynomials(poly(p, "P")?, poly(q, "Q")?, poly(r, "R")?)
    }

    pub fn from_polynomials(p: Polynomial, q: Polynomial, r: Polynomial) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::InvalidInput("P must not be identically zero".into()));
        }
        Ok(Self { p, q, r })
    }

    pub fn p(&self) -> &Polynomial {
        &self.p
    }
    pub fn q(&self) -> &Polynomial {
        &self.q
    }
    pub fn r(&self) -> &Polynomial {
        &self.r
    }

    /// `Q' - P'' - R`.
    pub fn residual(&self) -> Polynomial {
        &(&self.q.derivative() - &self.p.derivative().derivative()) - &self.r
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k.is_finite() && k != 0.0) {
            return Err(Error::InvalidInput(format!("scale factor must be finite and nonzero, got {k}")));
        }
        Ok(Self {
            p: self.p.scale(k),
            q: self.q.scale(k),
            r: self.r.scale(k),
        })
    }
}

impl From<&ReducedOde> for QesOde {
    fn from(ode: &ReducedOde) -> Self {
        Self {
            p: ode.p2.clone(),
            q: ode.p1.clone(),
            r: ode.p0.clone(),
        }
    }
}

/// Whether `Q' = P'' + R` holds coefficient by coefficient.
pub fn fpe_reducible(ode: &QesOde) -> bool {
    ode.residual().coeffs().iter().all(|c| c.abs() <= REDUCIBILITY_TOL)
}

/// Parameters of `mu z^2 y'' - [2a z^2 - (2b + mu) z - 2c] y' + [2a N z + E/mu] y = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QesClass1Params {
    pub mu: f64,
    pub a_q: f64,
    pub b_q: f64,
    pub c_q: f64,
    pub n: u32,
    pub e: f64,
}

pub fn qes_class1(params: &QesClass1Params) -> Result<QesOde> {
    let QesClass1Params { mu, a_q, b_q, c_q, n, e } = *params;
    for (name, v) in [("mu", mu), ("a", a_q), ("b", b_q), ("c", c_q), ("E", e)] {
        if !v.is_finite() {
            return Err(Error::InvalidInput(format!("{name} must be finite, got {v}")));
        }
    }
    if mu == 0.0 {
        return Err(Error::InvalidInput("mu must be nonzero".into()));
    }
    QesOde::from_polynomials(
        Polynomial::from_coeffs(vec![0.0, 0.0, mu]),
        Polynomial::from_coeffs(vec![2.0 * c_q, 2.0 * b_q + mu, -2.0 * a_q]),
        Polynomial::from_coeffs(vec![e / mu, 2.0 * a_q * n as f64]),
    )
}

//! Scale-invariant profiles of the similarity variable `z = x / t^alpha`.
//!
//! Drift and diffusion profiles are almost always low-degree polynomials, so
//! the symbolic side of the crate works on a small dense [`Polynomial`] type.
//! The shape function built from two polynomial profiles is a rational
//! function; anything else is carried as an opaque [`Profile::Generic`]
//! evaluator that the symbolic operations refuse to touch.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Highest degree accepted from user input.
pub const MAX_DEGREE: usize = 8;

/// Denominator magnitude below which a rational profile is treated as a pole.
pub const POLE_THRESHOLD: f64 = 1e-300;

/// Dense polynomial in ascending powers of `z`, with trailing zeros stripped.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    /// Builds a canonical polynomial from user-supplied coefficients.
    pub fn new(coeffs: &[f64]) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidInput("coefficient list is empty".into()));
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "coefficient {i} is not finite ({})",
                coeffs[i]
            )));
        }
        let p = Self::from_coeffs(coeffs.to_vec());
        if p.degree() > MAX_DEGREE {
            return Err(Error::InvalidInput(format!(
                "degree {} exceeds the cap of {MAX_DEGREE}",
                p.degree()
            )));
        }
        Ok(p)
    }

    pub(crate) fn from_coeffs(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c0 + c1 z`
    pub fn linear(c0: f64, c1: f64) -> Self {
        Self::from_coeffs(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Coefficient of `z^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> f64 {
        self.coeffs.get(i).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == 0.0
    }

    /// Horner evaluation.
    pub fn eval(&self, z: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c)
    }

    /// `sum |c_i| |z|^i`, the scale against which rounding in [`eval`](Self::eval) is measured.
    pub fn eval_abs(&self, z: f64) -> f64 {
        let z = z.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * z + c.abs())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Coefficient-wise comparison with an absolute tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).all(|i| (self.coeff(i) - other.coeff(i)).abs() <= tol)
    }

    /// Drops the factor `z^m` where `m` is the multiplicity of the root at zero.
    fn deflate_zero_roots(&self) -> (Self, usize) {
        if self.is_zero() {
            return (self.clone(), 0);
        }
        let m = self.coeffs.iter().take_while(|&&c| c == 0.0).count();
        (Self::from_coeffs(self.coeffs[m..].to_vec()), m)
    }

    fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree();
        let lead = divisor.coeffs[dd];
        let mut rem = self.coeffs.clone();
        if self.degree() < dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![0.0; self.degree() - dd + 1];
        for k in (0..quot.len()).rev() {
            let q = rem[k + dd] / lead;
            quot[k] = q;
            for (j, &c) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * c;
            }
            rem[k + dd] = 0.0;
        }
        rem.truncate(dd.max(1));
        (Self::from_coeffs(quot), Self::from_coeffs(rem))
    }

    fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone(), self.derivative()];
        let norm = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        while !seq[seq.len() - 1].is_zero() && seq[seq.len() - 1].degree() > 0 {
            let n = seq.len();
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            let r = r.scale(-1.0);
            // remainders at rounding level mean the previous entry was a common factor
            let r_norm = r.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if r_norm <= 1e-12 * norm.max(1.0) {
                break;
            }
            seq.push(r);
        }
        seq
    }

    fn sign_at(&self, z: f64) -> f64 {
        if z.is_infinite() {
            let lead = self.coeffs[self.degree()];
            if z > 0.0 || self.degree().is_multiple_of(2) {
                lead.signum()
            } else {
                -lead.signum()
            }
        } else {
            let v = self.eval(z);
            if v == 0.0 {
                0.0
            } else {
                v.signum()
            }
        }
    }

    fn sign_changes(seq: &[Self], z: f64) -> usize {
        let signs: Vec<f64> = seq
            .iter()
            .map(|p| p.sign_at(z))
            .filter(|&s| s != 0.0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots strictly inside the given domain.
    pub fn interior_root_count(&self, domain: &DomainInterval) -> usize {
        let (p, multiplicity) = self.deflate_zero_roots();
        let zero_root = usize::from(domain.kind == DomainKind::FullLine && multiplicity > 0);
        if p.is_zero() || p.degree() == 0 {
            return zero_root;
        }
        let seq = p.sturm_sequence();
        let v = |z| Self::sign_changes(&seq, z);
        match domain.kind {
            DomainKind::FullLine => v(f64::NEG_INFINITY) - v(f64::INFINITY) + zero_root,
            DomainKind::NonNegative => v(0.0) - v(f64::INFINITY),
            DomainKind::NonPositive => v(f64::NEG_INFINITY) - v(0.0),
        }
    }

    /// Smallest-magnitude sample on a scan of the Cauchy root bound, used for error messages.
    fn approx_root_in(&self, domain: &DomainInterval) -> f64 {
        let lead = self.coeffs[self.degree()].abs();
        let bound = 1.0
            + self.coeffs[..self.degree()]
                .iter()
                .fold(0.0f64, |m, c| m.max(c.abs() / lead));
        let lo = domain.lower.max(-bound);
        let hi = domain.upper.min(bound);
        let n = 10_000;
        (1..n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .min_by(|a, b| self.eval(*a).abs().total_cmp(&self.eval(*b).abs()))
            .unwrap_or(f64::NAN)
    }

    pub(crate) fn check_no_interior_roots(&self, domain: &DomainInterval) -> Result<()> {
        if self.interior_root_count(domain) > 0 {
            return Err(Error::InteriorDegeneracy {
                z: self.approx_root_in(domain),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0.0 {
                continue;
            }
            let mag = c.abs();
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c < 0.0 { '-' } else { '+' })?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ if mag == 1.0 => {}
                _ => write!(f, "{mag}")?,
            }
            match i {
                0 => {}
                1 => write!(f, "z")?,
                _ => write!(f, "z^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::from_coeffs(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    FullLine,
    NonNegative,
    NonPositive,
}

/// One of the three domains a normalizable similarity solution can live on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainInterval {
    pub lower: f64,
    pub upper: f64,
    pub kind: DomainKind,
}

impl DomainInterval {
    pub const fn full_line() -> Self {
        Self {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            kind: DomainKind::FullLine,
        }
    }

    pub const fn non_negative() -> Self {
        Self {
            lower: 0.0,
            upper: f64::INFINITY,
            kind: DomainKind::NonNegative,
        }
    }

    pub const fn non_positive() -> Self {
        Self {
            lower: f64::NEG_INFINITY,
            upper: 0.0,
            kind: DomainKind::NonPositive,
        }
    }

    pub fn from_kind(kind: DomainKind) -> Self {
        match kind {
            DomainKind::FullLine => Self::full_line(),
            DomainKind::NonNegative => Self::non_negative(),
            DomainKind::NonPositive => Self::non_positive(),
        }
    }

    /// Half lines include the origin.
    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }

    pub fn is_half_line(&self) -> bool {
        self.kind != DomainKind::FullLine
    }

    /// `x -> -x`
    pub fn mirrored(&self) -> Self {
        match self.kind {
            DomainKind::FullLine => Self::full_line(),
            DomainKind::NonNegative => Self::non_positive(),
            DomainKind::NonPositive => Self::non_negative(),
        }
    }
}

pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Opaque evaluable profile with a declared domain.
#[derive(Clone)]
pub struct GenericProfile {
    eval: Evaluator,
    domain: DomainInterval,
}

impl fmt::Debug for GenericProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GenericProfile")
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum Profile {
    Polynomial(Polynomial),
    /// Kept unreduced; no common factors are cancelled.
    Rational {
        numerator: Polynomial,
        denominator: Polynomial,
    },
    Generic(GenericProfile),
}

/// Canonical polynomial profile from ascending-power coefficients.
pub fn make_polynomial(coeffs: &[f64]) -> Result<Profile> {
    Polynomial::new(coeffs).map(Profile::Polynomial)
}

impl Profile {
    pub fn polynomial(coeffs: &[f64]) -> Result<Self> {
        make_polynomial(coeffs)
    }

    pub fn rational(numerator: Polynomial, denominator: Polynomial) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::InvalidInput("rational denominator is the zero polynomial".into()));
        }
        Ok(Self::Rational {
            numerator,
            denominator,
        })
    }

    pub fn generic<F>(domain: DomainInterval, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::Generic(GenericProfile {
            eval: Arc::new(f),
            domain,
        })
    }

    pub fn domain(&self) -> DomainInterval {
        match self {
            Self::Generic(g) => g.domain,
            _ => DomainInterval::full_line(),
        }
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        match self {
            Self::Polynomial(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_symbolic(&self) -> bool {
        !matches!(self, Self::Generic(_))
    }

    pub fn eval(&self, z: f64) -> Result<f64> {
        match self {
            Self::Polynomial(p) => Ok(p.eval(z)),
            Self::Rational {
                numerator,
                denominator,
            } => {
                let d = denominator.eval(z);
                if d.abs() < POLE_THRESHOLD {
                    return Err(Error::Pole { z });
                }
                Ok(numerator.eval(z) / d)
            }
            Self::Generic(g) => {
                if !g.domain.contains(z) {
                    return Err(Error::InvalidInput(format!(
                        "z = {z} is outside the profile domain"
                    )));
                }
                let v = (g.eval)(z);
                if !v.is_finite() {
                    return Err(Error::InvalidInput(format!(
                        "profile evaluated to a non-finite value at z = {z}"
                    )));
                }
                Ok(v)
            }
        }
    }

    /// Exact symbolic derivative; generic profiles are rejected.
    pub fn derivative(&self) -> Result<Self> {
        match self {
            Self::Polynomial(p) => Ok(Self::Polynomial(p.derivative())),
            Self::Rational {
                numerator,
                denominator,
            } => {
                let num = &(&numerator.derivative() * denominator)
                    - &(numerator * &denominator.derivative());
                Ok(Self::Rational {
                    numerator: num,
                    denominator: denominator * denominator,
                })
            }
            Self::Generic(_) => Err(Error::Unsupported(
                "symbolic derivative of a generic profile; use numeric differentiation".into(),
            )),
        }
    }

    fn is_identically_zero(&self) -> bool {
        match self {
            Self::Polynomial(p) => p.is_zero(),
            Self::Rational { numerator, .. } => numerator.is_zero(),
            Self::Generic(_) => false,
        }
    }
}

/// Central-difference first derivative with step `1e-5 (|z| + 1)`.
pub(crate) fn numeric_derivative(f: impl Fn(f64) -> Result<f64>, z: f64) -> Result<f64> {
    let h = 1e-5 * (z.abs() + 1.0);
    Ok((f(z + h)? - f(z - h)?) / (2.0 * h))
}

/// The logarithmic derivative `f(z) = (rho1 - rho2' - alpha z) / rho2` of the similarity profile.
///
/// Polynomial inputs produce a rational profile; any other input produces a
/// generic profile that differentiates `rho2` symbolically when it can and
/// numerically otherwise.
pub fn shape_function(rho1: &Profile, rho2: &Profile, alpha: f64) -> Result<Profile> {
    if !alpha.is_finite() || alpha == 0.0 {
        return Err(Error::InvalidInput(format!(
            "alpha must be finite and nonzero, got {alpha}"
        )));
    }
    if rho2.is_identically_zero() {
        return Err(Error::DegenerateDiffusion);
    }
    if let (Profile::Polynomial(r1), Profile::Polynomial(r2)) = (rho1, rho2) {
        let numerator = &(r1 - &r2.derivative()) - &Polynomial::linear(0.0, alpha);
        return Profile::rational(numerator, r2.clone());
    }

    let domain = match (rho1, rho2) {
        (Profile::Generic(g), _) | (_, Profile::Generic(g)) => g.domain,
        _ => DomainInterval::full_line(),
    };
    let r1 = rho1.clone();
    let r2 = rho2.clone();
    let r2_prime = rho2.derivative().ok();
    Ok(Profile::generic(domain, move |z| {
        let value = || -> Result<f64> {
            let d2 = match &r2_prime {
                Some(p) => p.eval(z)?,
                None => numeric_derivative(|s| r2.eval(s), z)?,
            };
            let den = r2.eval(z)?;
            if den.abs() < POLE_THRESHOLD {
                return Err(Error::Pole { z });
            }
            Ok((r1.eval(z)? - d2 - alpha * z) / den)
        };
        value().unwrap_or(f64::NAN)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn poly(c: &[f64]) -> Polynomial {
        Polynomial::new(c).unwrap()
    }

    #[test]
    fn make_polynomial_canonicalizes() {
        let p = make_polynomial(&[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(p.as_polynomial().unwrap().coeffs(), &[1.0]);
        let z = make_polynomial(&[0.0]).unwrap();
        let z = z.as_polynomial().unwrap();
        assert!(z.is_zero());
        assert_eq!(z.degree(), 0);
        let lin = make_polynomial(&[0.7, -0.3]).unwrap();
        assert_eq!(lin.as_polynomial().unwrap().degree(), 1);
    }

    #[test]
    fn make_polynomial_rejects_bad_input() {
        assert!(matches!(make_polynomial(&[]), Err(Error::InvalidInput(_))));
        assert!(matches!(
            make_polynomial(&[1.0, f64::NAN]),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            make_polynomial(&[1.0, f64::INFINITY]),
            Err(Error::InvalidInput(_))
        ));
        assert!(make_polynomial(&[0.0; 20]).is_ok());
        let mut long = vec![0.0; 10];
        long[9] = 1.0;
        assert!(make_polynomial(&long).is_err());
    }

    #[test]
    fn eval_examples() {
        let p = make_polynomial(&[1.0, 0.5]).unwrap();
        assert_eq!(p.eval(2.0).unwrap(), 2.0);
        let q = make_polynomial(&[0.0, 0.5]).unwrap();
        assert_eq!(q.eval(0.0).unwrap(), 0.0);
        let inv = Profile::rational(Polynomial::constant(1.0), poly(&[0.0, 1.0])).unwrap();
        assert_eq!(inv.eval(0.0), Err(Error::Pole { z: 0.0 }));
        assert_eq!(inv.eval(4.0).unwrap(), 0.25);
    }

    #[test]
    fn rational_with_zero_denominator_is_rejected() {
        assert!(Profile::rational(Polynomial::constant(1.0), Polynomial::zero()).is_err());
    }

    #[test]
    fn generic_profile_checks_domain_and_finiteness() {
        let g = Profile::generic(DomainInterval::non_negative(), f64::sqrt);
        assert_eq!(g.eval(4.0).unwrap(), 2.0);
        assert!(g.eval(-1.0).is_err());
        let bad = Profile::generic(DomainInterval::full_line(), |z| 1.0 / z);
        assert!(bad.eval(0.0).is_err());
    }

    #[test]
    fn derivative_examples() {
        let (mu1, mu2, mu4) = (0.5, 1.0, 3.0);
        let d = make_polynomial(&[mu2, mu1]).unwrap().derivative().unwrap();
        assert_eq!(d.as_polynomial().unwrap().coeffs(), &[mu1]);
        let d = make_polynomial(&[mu4]).unwrap().derivative().unwrap();
        assert_eq!(d.as_polynomial().unwrap().coeffs(), &[0.0]);
        let d = make_polynomial(&[0.0, 0.0, 1.0]).unwrap().derivative().unwrap();
        assert_eq!(d.as_polynomial().unwrap().coeffs(), &[0.0, 2.0]);
    }

    #[test]
    fn derivative_rejects_generic() {
        let g = Profile::generic(DomainInterval::full_line(), f64::sin);
        assert!(matches!(g.derivative(), Err(Error::Unsupported(_))));
    }

    #[test]
    fn rational_derivative_matches_quotient_rule() {
        // (1 + z) / z -> -1 / z^2
        let r = Profile::rational(poly(&[1.0, 1.0]), poly(&[0.0, 1.0])).unwrap();
        let d = r.derivative().unwrap();
        for z in [0.5, 1.0, 2.0, -3.0] {
            assert_relative_eq!(d.eval(z).unwrap(), -1.0 / (z * z), max_relative = 1e-14);
        }
    }

    #[test]
    fn shape_function_gaussian_family() {
        let (alpha, mu1, mu2, mu4) = (1.0, 0.5, 1.0, 2.0);
        let f = shape_function(
            &make_polynomial(&[mu2, mu1]).unwrap(),
            &make_polynomial(&[mu4]).unwrap(),
            alpha,
        )
        .unwrap();
        match &f {
            Profile::Rational {
                numerator,
                denominator,
            } => {
                assert_eq!(numerator.coeffs(), &[mu2, mu1 - alpha]);
                assert_eq!(denominator.coeffs(), &[mu4]);
            }
            other => panic!("expected rational, got {other:?}"),
        }
    }

    #[test]
    fn shape_function_gamma_family_matches_simplified_form() {
        let (alpha, mu1, mu2, mu3) = (-2.0, -3.0, 1.5, 0.5);
        let f = shape_function(
            &make_polynomial(&[mu2, mu1]).unwrap(),
            &make_polynomial(&[0.0, mu3]).unwrap(),
            alpha,
        )
        .unwrap();
        // deterministic pseudo-random sample points away from the pole
        let mut s = 12345u64;
        for _ in 0..100 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let u = (s >> 11) as f64 / (1u64 << 53) as f64;
            let z = if u < 0.5 { -10.0 * u - 0.01 } else { 10.0 * (u - 0.5) + 0.01 };
            let expected = (mu2 / mu3 - 1.0) / z + (mu1 - alpha) / mu3;
            assert_relative_eq!(f.eval(z).unwrap(), expected, max_relative = 1e-12);
        }
        assert!(matches!(f.eval(0.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn shape_function_cancels_to_zero() {
        let alpha = 0.75;
        let f = shape_function(
            &make_polynomial(&[0.0, alpha]).unwrap(),
            &make_polynomial(&[1.0]).unwrap(),
            alpha,
        )
        .unwrap();
        for z in [-3.0, 0.0, 1.0, 9.0] {
            assert_eq!(f.eval(z).unwrap(), 0.0);
        }
    }

    #[test]
    fn shape_function_errors() {
        let r1 = make_polynomial(&[1.0]).unwrap();
        let zero = make_polynomial(&[0.0]).unwrap();
        assert_eq!(
            shape_function(&r1, &zero, 1.0).unwrap_err(),
            Error::DegenerateDiffusion
        );
        assert!(shape_function(&r1, &r1, 0.0).is_err());
        assert!(shape_function(&r1, &r1, f64::NAN).is_err());
    }

    #[test]
    fn shape_function_generic_inputs() {
        let alpha = 0.5;
        let rho1 = Profile::generic(DomainInterval::full_line(), |z| z.sin());
        let rho2 = Profile::generic(DomainInterval::full_line(), |z| 2.0 + z.cos());
        let f = shape_function(&rho1, &rho2, alpha).unwrap();
        assert!(!f.is_symbolic());
        for z in [-2.0f64, 0.3, 1.7] {
            let expected = (z.sin() + z.sin() - alpha * z) / (2.0 + z.cos());
            assert_relative_eq!(f.eval(z).unwrap(), expected, max_relative = 1e-8);
        }
    }

    #[test]
    fn root_counting() {
        let full = DomainInterval::full_line();
        let pos = DomainInterval::non_negative();
        let neg = DomainInterval::non_positive();
        // z
        let z = poly(&[0.0, 1.0]);
        assert_eq!(z.interior_root_count(&full), 1);
        assert_eq!(z.interior_root_count(&pos), 0);
        assert_eq!(z.interior_root_count(&neg), 0);
        // (z - 1)(z + 2)
        let q = poly(&[-2.0, 1.0, 1.0]);
        assert_eq!(q.interior_root_count(&full), 2);
        assert_eq!(q.interior_root_count(&pos), 1);
        assert_eq!(q.interior_root_count(&neg), 1);
        // z^2 + 1
        assert_eq!(poly(&[1.0, 0.0, 1.0]).interior_root_count(&full), 0);
        // (z - 1)^2, a double root
        assert_eq!(poly(&[1.0, -2.0, 1.0]).interior_root_count(&pos), 1);
        assert_eq!(Polynomial::constant(3.0).interior_root_count(&full), 0);
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(poly(&[0.0, -6.0]).to_string(), "-6z");
        assert_eq!(poly(&[2.0, 3.0, -2.0]).to_string(), "-2z^2 + 3z + 2");
        assert_eq!(Polynomial::zero().to_string(), "0");
        assert_eq!(poly(&[-1.0, 1.0]).to_string(), "z - 1");
    }

    fn coeffs_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0f64..5.0, 1..=6)
    }

    proptest! {
        #[test]
        fn derivative_matches_central_difference(c in coeffs_strategy(), z in -4.0f64..4.0) {
            let p = make_polynomial(&c).unwrap();
            let d = p.derivative().unwrap().eval(z).unwrap();
            let h = 1e-5 * (z.abs() + 1.0);
            let fd = (p.eval(z + h).unwrap() - p.eval(z - h).unwrap()) / (2.0 * h);
            let scale = p.as_polynomial().unwrap().derivative().eval_abs(z).max(1.0);
            prop_assert!((d - fd).abs() <= 1e-6 * scale, "d={d} fd={fd}");
        }

        #[test]
        fn shape_function_satisfies_defining_identity(
            c1 in coeffs_strategy(),
            c2 in coeffs_strategy(),
            alpha in prop_oneof![-3.0f64..-0.1, 0.1f64..3.0],
            z in -5.0f64..5.0,
        ) {
            let rho1 = make_polynomial(&c1).unwrap();
            let rho2 = make_polynomial(&c2).unwrap();
            let r2 = rho2.as_polynomial().unwrap();
            prop_assume!(!r2.is_zero() && r2.eval(z).abs() > 1e-3);
            let f = shape_function(&rho1, &rho2, alpha).unwrap();
            let lhs = f.eval(z).unwrap() * r2.eval(z);
            let rhs = rho1.eval(z).unwrap() - r2.derivative().eval(z) - alpha * z;
            let scale = rho1.as_polynomial().unwrap().eval_abs(z)
                + r2.derivative().eval_abs(z)
                + (alpha * z).abs();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1.0), "lhs={lhs} rhs={rhs}");
        }

        #[test]
        fn canonicalization_is_idempotent(c in coeffs_strategy(), pad in 0usize..3) {
            let mut c = c;
            c.extend(std::iter::repeat_n(0.0, pad));
            let p = Polynomial::new(&c).unwrap();
            prop_assert_eq!(Polynomial::new(p.coeffs()).unwrap(), p);
        }
    }
}

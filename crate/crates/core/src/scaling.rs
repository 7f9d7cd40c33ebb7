//! Scaling exponents of the Fokker-Planck equation and the drift/diffusion
//! coefficients they admit.
//!
//! Under `x -> eps^a x`, `t -> eps^b t` the equation keeps its form when the
//! drift scales with `eps^d` and the diffusion with `eps^e`, `b = a - d = 2a - e`.
//! Normalization then forces the density to scale with `eps^(-a)`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::profiles::Profile;

const EXPONENT_TOL: f64 = 1e-12;
const INVARIANCE_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingExponents {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub alpha: f64,
}

impl ScalingExponents {
    /// Checks the three consistency relations.
    pub fn is_consistent(&self) -> bool {
        (self.b - (self.a - self.d)).abs() <= EXPONENT_TOL
            && (self.b - (2.0 * self.a - self.e)).abs() <= EXPONENT_TOL
            && self.c == -self.a
            && self.a != 0.0
            && self.b != 0.0
            && (self.alpha - self.a / self.b).abs() <= EXPONENT_TOL * self.alpha.abs().max(1.0)
    }

    /// The gauge `a = alpha`, `b = 1` used when only `alpha` is known.
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            a: alpha,
            b: 1.0,
            c: -alpha,
            d: alpha - 1.0,
            e: 2.0 * alpha - 1.0,
            alpha,
        })
    }
}

pub fn solve_exponents(a: f64, d: f64, e: f64) -> Result<ScalingExponents> {
    if !(a.is_finite() && d.is_finite() && e.is_finite()) {
        return Err(Error::InvalidInput("scaling exponents must be finite".into()));
    }
    if a == 0.0 {
        return Err(Error::InvalidInput("a must be nonzero".into()));
    }
    let b = a - d;
    let b2 = 2.0 * a - e;
    if (b - b2).abs() > EXPONENT_TOL {
        return Err(Error::InconsistentScaling {
            a_minus_d: b,
            two_a_minus_e: b2,
        });
    }
    if b == 0.0 {
        return Err(Error::DegenerateTimeScaling);
    }
    Ok(ScalingExponents {
        a,
        b,
        c: -a,
        d,
        e,
        alpha: a / b,
    })
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha == 0.0 {
        return Err(Error::InvalidInput(format!(
            "alpha must be finite and nonzero, got {alpha}"
        )));
    }
    Ok(())
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t <= 0.0 {
        return Err(Error::InvalidTime(t));
    }
    Ok(())
}

/// `z = x t^(-alpha)`
pub fn similarity_variable(x: f64, t: f64, alpha: f64) -> Result<f64> {
    check_time(t)?;
    check_alpha(alpha)?;
    Ok(x * t.powf(-alpha))
}

pub type CoefficientFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Drift `D1(x, t)` and diffusion `D2(x, t)` of a scale-invariant equation.
#[derive(Clone)]
pub struct CoefficientPair {
    drift: CoefficientFn,
    diffusion: CoefficientFn,
    alpha: f64,
    rho1: Option<Profile>,
    rho2: Option<Profile>,
}

impl fmt::Debug for CoefficientPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientPair")
            .field("alpha", &self.alpha)
            .field("rho1", &self.rho1)
            .field("rho2", &self.rho2)
            .finish_non_exhaustive()
    }
}

impl CoefficientPair {
    /// Arbitrary coefficient functions, for checks against hand-written systems.
    pub fn custom<F, G>(alpha: f64, drift: F, diffusion: G) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        check_alpha(alpha)?;
        Ok(Self {
            drift: Arc::new(drift),
            diffusion: Arc::new(diffusion),
            alpha,
            rho1: None,
            rho2: None,
        })
    }

    pub fn drift(&self, x: f64, t: f64) -> f64 {
        (self.drift)(x, t)
    }

    pub fn diffusion(&self, x: f64, t: f64) -> f64 {
        (self.diffusion)(x, t)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn rho1(&self) -> Option<&Profile> {
        self.rho1.as_ref()
    }

    pub fn rho2(&self) -> Option<&Profile> {
        self.rho2.as_ref()
    }

    /// Both coefficients at a fixed time, with the time factors of
    /// profile-backed pairs computed once.
    pub fn at_time(&self, t: f64) -> FrozenCoefficients<'_> {
        let profiles = match (self.rho1.as_ref(), self.rho2.as_ref()) {
            (Some(r1), Some(r2)) => {
                let ta = t.powf(self.alpha);
                Some(ProfileFactors {
                    rho1: r1,
                    rho2: r2,
                    inv_ta: 1.0 / ta,
                    drift_factor: ta / t,
                    diffusion_factor: ta * ta / t,
                })
            }
            _ => None,
        };
        FrozenCoefficients {
            pair: self,
            t,
            profiles,
        }
    }

    /// Same pair with the drift replaced.
    pub fn with_drift<F>(&self, drift: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            drift: Arc::new(drift),
            rho1: None,
            ..self.clone()
        }
    }

    // Rounding scale of a profile-backed coefficient at (x, t).
    fn magnitude(profile: Option<&Profile>, power: f64, x: f64, t: f64, alpha: f64) -> f64 {
        match profile.and_then(Profile::as_polynomial) {
            Some(p) => t.powf(power) * p.eval_abs(x * t.powf(-alpha)),
            None => 0.0,
        }
    }
}

struct ProfileFactors<'a> {
    rho1: &'a Profile,
    rho2: &'a Profile,
    inv_ta: f64,
    drift_factor: f64,
    diffusion_factor: f64,
}

/// Coefficients of a [`CoefficientPair`] frozen at one time.
pub struct FrozenCoefficients<'a> {
    pair: &'a CoefficientPair,
    t: f64,
    profiles: Option<ProfileFactors<'a>>,
}

impl FrozenCoefficients<'_> {
    pub fn drift(&self, x: f64) -> f64 {
        match &self.profiles {
            Some(p) => p.drift_factor * p.rho1.eval(x * p.inv_ta).unwrap_or(f64::NAN),
            None => self.pair.drift(x, self.t),
        }
    }

    pub fn diffusion(&self, x: f64) -> f64 {
        match &self.profiles {
            Some(p) => p.diffusion_factor * p.rho2.eval(x * p.inv_ta).unwrap_or(f64::NAN),
            None => self.pair.diffusion(x, self.t),
        }
    }
}

/// `D1 = t^(alpha-1) rho1(x / t^alpha)`, `D2 = t^(2 alpha - 1) rho2(x / t^alpha)`.
///
/// Evaluation errors inside the profiles surface as `NaN`.
pub fn synthesize_coefficients(rho1: &Profile, rho2: &Profile, alpha: f64) -> Result<CoefficientPair> {
    check_alpha(alpha)?;
    let r1 = rho1.clone();
    let r2 = rho2.clone();
    Ok(CoefficientPair {
        drift: Arc::new(move |x, t| {
            let z = x * t.powf(-alpha);
            t.powf(alpha - 1.0) * r1.eval(z).unwrap_or(f64::NAN)
        }),
        diffusion: Arc::new(move |x, t| {
            let z = x * t.powf(-alpha);
            t.powf(2.0 * alpha - 1.0) * r2.eval(z).unwrap_or(f64::NAN)
        }),
        alpha,
        rho1: Some(rho1.clone()),
        rho2: Some(rho2.clone()),
    })
}

/// Checks `D1(eps^a x, eps^b t) = eps^d D1(x, t)` and the diffusion analogue
/// with exponent `e` at every sample, in the gauge `a = alpha`, `b = 1`.
pub fn verify_scale_invariance(pair: &CoefficientPair, epsilon: f64, samples: &[(f64, f64)]) -> Result<bool> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
    }
    if epsilon == 1.0 {
        return Err(Error::Precondition("epsilon = 1 is the identity scaling".into()));
    }
    let ex = ScalingExponents::from_alpha(pair.alpha)?;
    let sx = epsilon.powf(ex.a);
    let st = epsilon.powf(ex.b);
    let sd = epsilon.powf(ex.d);
    let se = epsilon.powf(ex.e);

    for &(x, t) in samples {
        check_time(t)?;
        check_time(st * t)?;
        let checks = [
            (
                pair.drift(sx * x, st * t),
                sd * pair.drift(x, t),
                sd * CoefficientPair::magnitude(pair.rho1(), pair.alpha - 1.0, x, t, pair.alpha),
            ),
            (
                pair.diffusion(sx * x, st * t),
                se * pair.diffusion(x, t),
                se * CoefficientPair::magnitude(pair.rho2(), 2.0 * pair.alpha - 1.0, x, t, pair.alpha),
            ),
        ];
        for (lhs, rhs, mag) in checks {
            let scale = lhs.abs().max(rhs.abs()).max(mag);
            if !(lhs - rhs).abs().le(&(INVARIANCE_REL_TOL * scale)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::make_polynomial;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn frozen_coefficients_agree() {
        let pair = synthesize_coefficients(
            &make_polynomial(&[1.0, -0.5, 0.25]).unwrap(),
            &make_polynomial(&[2.0, 0.0, 1.0]).unwrap(),
            -1.5,
        )
        .unwrap();
        let custom = CoefficientPair::custom(1.0, |x, t| x * t, |x, t| x + t).unwrap();
        for t in [0.3, 1.0, 2.7] {
            let f = pair.at_time(t);
            let g = custom.at_time(t);
            for x in [-3.0, 0.0, 0.8, 5.0] {
                assert_relative_eq!(f.drift(x), pair.drift(x, t), max_relative = 1e-13);
                assert_relative_eq!(f.diffusion(x), pair.diffusion(x, t), max_relative = 1e-13);
                assert_eq!(g.drift(x), x * t);
                assert_eq!(g.diffusion(x), x + t);
            }
        }
    }

    #[test]
    fn diffusion_equation_exponents() {
        let ex = solve_exponents(1.0, -1.0, 0.0).unwrap();
        assert_eq!((ex.b, ex.c, ex.alpha), (2.0, -1.0, 0.5));
        assert!(ex.is_consistent());
    }

    #[test]
    fn linear_time_exponents() {
        let ex = solve_exponents(1.0, 0.0, 1.0).unwrap();
        assert_eq!((ex.b, ex.c, ex.alpha), (1.0, -1.0, 1.0));
    }

    #[test]
    fn inconsistent_exponents() {
        assert!(matches!(
            solve_exponents(1.0, 0.0, 0.0),
            Err(Error::InconsistentScaling { .. })
        ));
        assert!(matches!(solve_exponents(1.0, 1.0, 2.0), Err(Error::DegenerateTimeScaling)));
        assert!(solve_exponents(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn similarity_variable_examples() {
        assert_eq!(similarity_variable(2.0, 1.0, 1.0).unwrap(), 2.0);
        assert_eq!(similarity_variable(4.0, 4.0, 0.5).unwrap(), 2.0);
        assert_relative_eq!(similarity_variable(1.0, 0.5, -2.0).unwrap(), 0.25, max_relative = 1e-15);
        assert_eq!(similarity_variable(1.0, 0.0, 1.0), Err(Error::InvalidTime(0.0)));
        assert!(similarity_variable(1.0, -1.0, 1.0).is_err());
    }

    fn pair(r1: &[f64], r2: &[f64], alpha: f64) -> CoefficientPair {
        synthesize_coefficients(
            &make_polynomial(r1).unwrap(),
            &make_polynomial(r2).unwrap(),
            alpha,
        )
        .unwrap()
    }

    #[test]
    fn synthesized_gaussian_coefficients() {
        let p = pair(&[1.0, 0.5], &[1.0], 1.0);
        for (x, t) in [(0.0, 1.0), (3.0, 2.0), (-1.5, 0.3)] {
            assert_relative_eq!(p.drift(x, t), x / (2.0 * t) + 1.0, max_relative = 1e-14);
            assert_relative_eq!(p.diffusion(x, t), t, max_relative = 1e-14);
        }
    }

    #[test]
    fn synthesized_exponential_coefficients() {
        let p = pair(&[-6.0, 3.0], &[2.0], 3.0);
        for (x, t) in [(0.5, 1.0), (3.0, 1.9), (0.1, 1.3)] {
            assert_relative_eq!(p.drift(x, t), 3.0 * x / t - 6.0 * t * t, max_relative = 1e-12);
            assert_relative_eq!(p.diffusion(x, t), 2.0 * t.powi(5), max_relative = 1e-13);
        }
    }

    #[test]
    fn synthesized_pure_diffusion() {
        let p = pair(&[0.0], &[1.0], 0.5);
        assert_eq!(p.drift(1.3, 2.0), 0.0);
        assert_relative_eq!(p.diffusion(1.3, 2.0), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn scale_invariance_examples() {
        let p = pair(&[1.0, 0.5], &[1.0], 1.0);
        let samples = [(0.3, 1.0), (-2.0, 0.7), (5.0, 3.0)];
        assert!(verify_scale_invariance(&p, 2.0, &samples).unwrap());
        let broken = p.with_drift(|x, t| x * x / t);
        assert!(!verify_scale_invariance(&broken, 2.0, &samples).unwrap());
        assert!(verify_scale_invariance(&p, 1.0, &samples).is_err());
        assert!(verify_scale_invariance(&p, -2.0, &samples).is_err());
        assert!(verify_scale_invariance(&p, 2.0, &[(1.0, -1.0)]).is_err());
    }

    fn profile_coeffs() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-4.0f64..4.0, 1..=4)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn synthesized_pairs_are_scale_invariant(
            r1 in profile_coeffs(),
            r2 in profile_coeffs(),
            alpha in prop_oneof![-2.5f64..-0.1, 0.1f64..2.5],
            samples in prop::collection::vec((-10.0f64..10.0, 0.05f64..5.0), 50),
        ) {
            let p = pair(&r1, &r2, alpha);
            for eps in [0.5, 2.0, 10.0] {
                prop_assert!(verify_scale_invariance(&p, eps, &samples).unwrap());
            }
        }

        #[test]
        fn solved_exponents_are_consistent(a in -5.0f64..5.0, b in -5.0f64..5.0) {
            prop_assume!(a.abs() > 1e-3 && b.abs() > 1e-3);
            let (d, e) = (a - b, 2.0 * a - b);
            let ex = solve_exponents(a, d, e).unwrap();
            prop_assert!(ex.is_consistent());
        }

        #[test]
        fn alpha_is_gauge_invariant(a in -5.0f64..5.0, b in -5.0f64..5.0, k in prop_oneof![-4.0f64..-0.25, 0.25f64..4.0]) {
            prop_assume!(a.abs() > 1e-3 && b.abs() > 1e-3);
            let (d, e) = (a - b, 2.0 * a - b);
            let ex = solve_exponents(a, d, e).unwrap();
            let ek = solve_exponents(k * a, k * d, k * e).unwrap();
            prop_assert!((ex.alpha - ek.alpha).abs() <= 1e-12 * ex.alpha.abs().max(1.0));
        }
    }
}

//! Risk preferences: CARA expected utility and Prelec probability weighting.
//!
//! Every certainty equivalent in the crate has the form `-x - c(zeta)`, where
//! `x` is the premium and `c` the risk cost of the deductible lottery. For
//! expected utility `c` is the CARA certainty equivalent of the loss; under
//! probability distortion it is `Omega(mu) * d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper end of the absolute risk aversion support.
pub const NU_MAX: f64 = 0.025;

/// Upper end of the Prelec curvature support.
pub const OMEGA_MAX: f64 = 1.0;

/// Below this magnitude the CARA coefficient is treated as zero.
pub const NU_LINEAR_THRESHOLD: f64 = 1e-9;

/// Beyond this exponent the EU risk cost switches to a log-sum-exp form.
const LSE_SWITCH: f64 = 30.0;

/// Below this `|nu * d|` the risk-cost derivative uses its cumulant series.
const SERIES_SWITCH: f64 = 1e-3;

/// The two preference types in the population.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PreferenceType {
    /// Expected utility with CARA coefficient `nu`.
    #[serde(rename = "EU")]
    Eu,
    /// Risk-neutral utility over Prelec-distorted probabilities with curvature `omega`.
    #[serde(rename = "DT")]
    Dt,
}

impl PreferenceType {
    pub const ALL: [PreferenceType; 2] = [PreferenceType::Eu, PreferenceType::Dt];

    /// Upper end of the coefficient support `[0, upper]`.
    pub fn support_upper(self) -> f64 {
        match self {
            PreferenceType::Eu => NU_MAX,
            PreferenceType::Dt => OMEGA_MAX,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PreferenceType::Eu => "EU",
            PreferenceType::Dt => "DT",
        }
    }

    /// Coefficient value at which the type is risk neutral.
    pub fn neutral_value(self) -> f64 {
        match self {
            PreferenceType::Eu => 0.0,
            PreferenceType::Dt => 1.0,
        }
    }
}

/// A preference coefficient tagged with its type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub ptype: PreferenceType,
    pub value: f64,
}

impl Coefficient {
    /// Builds a coefficient, rejecting values outside the type's support.
    pub fn new(ptype: PreferenceType, value: f64) -> Result<Self> {
        let upper = ptype.support_upper();
        if !(0.0..=upper).contains(&value) {
            return Err(Error::invalid(
                "coefficient",
                format!("{} value {value} outside [0, {upper}]", ptype.label()),
            ));
        }
        Ok(Coefficient { ptype, value })
    }
}

/// Binary loss lottery: lose `premium` for sure, plus `deductible` with
/// probability `claim_prob`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lottery {
    pub premium: f64,
    pub deductible: f64,
    pub claim_prob: f64,
}

impl Lottery {
    pub fn new(premium: f64, deductible: f64, claim_prob: f64) -> Result<Self> {
        if !(premium.is_finite() && premium > 0.0) {
            return Err(Error::invalid("lottery", format!("premium {premium} must be positive")));
        }
        if !(deductible.is_finite() && deductible > 0.0) {
            return Err(Error::invalid(
                "lottery",
                format!("deductible {deductible} must be positive"),
            ));
        }
        if !(claim_prob > 0.0 && claim_prob < 1.0) {
            return Err(Error::ProbabilityDomain(claim_prob));
        }
        Ok(Lottery {
            premium,
            deductible,
            claim_prob,
        })
    }

    /// Expected net present value `-x - mu d`.
    pub fn npv(&self) -> f64 {
        -self.premium - self.claim_prob * self.deductible
    }
}

/// CARA utility `(1 - exp(-nu y)) / nu`, linear when `|nu| < 1e-9`.
pub fn cara_utility(y: f64, nu: f64) -> f64 {
    if nu.abs() < NU_LINEAR_THRESHOLD {
        y
    } else {
        -(-nu * y).exp_m1() / nu
    }
}

/// Prelec weighting `exp(-(-ln mu)^omega)`.
pub fn prelec(mu: f64, omega: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::ProbabilityDomain(mu));
    }
    if !omega.is_finite() {
        return Err(Error::invalid("prelec curvature", format!("{omega} is not finite")));
    }
    Ok(prelec_unchecked(mu, omega))
}

#[inline]
pub(crate) fn prelec_unchecked(mu: f64, omega: f64) -> f64 {
    if omega == 1.0 {
        return mu;
    }
    (-(-mu.ln()).powf(omega)).exp()
}

/// Prelec weighting from the precomputed `ln(-ln mu)`.
#[inline]
pub(crate) fn prelec_from_loglog(loglog_mu: f64, omega: f64) -> f64 {
    (-(omega * loglog_mu).exp()).exp()
}

/// Derivative of the Prelec weight with respect to `omega`.
#[inline]
pub(crate) fn prelec_domega_from_loglog(loglog_mu: f64, omega: f64) -> f64 {
    let power = (omega * loglog_mu).exp();
    -(-power).exp() * power * loglog_mu
}

/// Cumulant generating function of the loss `d * Bernoulli(mu)` at `nu`.
#[inline]
fn loss_cgf(nu: f64, d: f64, mu: f64) -> f64 {
    let s = nu * d;
    if s <= LSE_SWITCH {
        (mu * s.exp_m1()).ln_1p()
    } else {
        s + (mu + (1.0 - mu) * (-s).exp()).ln()
    }
}

/// EU risk cost `(1/nu) ln(1 + mu (e^{nu d} - 1))`, equal to `mu d` at zero.
#[inline]
pub fn risk_cost_eu(nu: f64, d: f64, mu: f64) -> f64 {
    if nu.abs() < NU_LINEAR_THRESHOLD {
        mu * d
    } else {
        loss_cgf(nu, d, mu) / nu
    }
}

/// Derivative of [`risk_cost_eu`] with respect to `nu`.
pub fn risk_cost_eu_dnu(nu: f64, d: f64, mu: f64) -> f64 {
    let s = nu * d;
    if s.abs() < SERIES_SWITCH {
        let v = mu * (1.0 - mu);
        let k2 = v * d * d;
        let k3 = v * (1.0 - 2.0 * mu) * d.powi(3);
        let k4 = v * (1.0 - 6.0 * mu + 6.0 * mu * mu) * d.powi(4);
        k2 / 2.0 + nu * k3 / 3.0 + nu * nu * k4 / 8.0
    } else {
        let k = loss_cgf(nu, d, mu);
        // Tilted claim probability, the derivative of the CGF divided by d.
        let tilted = if s <= LSE_SWITCH {
            mu * s.exp() / (1.0 + mu * s.exp_m1())
        } else {
            mu / (mu + (1.0 - mu) * (-s).exp())
        };
        (nu * d * tilted - k) / (nu * nu)
    }
}

/// Certainty equivalent of a lottery for a CARA expected-utility maximizer.
pub fn ce_eu(lot: &Lottery, nu: f64) -> f64 {
    -lot.premium - risk_cost_eu(nu, lot.deductible, lot.claim_prob)
}

/// Derivative of [`ce_eu`] with respect to `nu`.
pub fn ce_eu_dnu(lot: &Lottery, nu: f64) -> f64 {
    -risk_cost_eu_dnu(nu, lot.deductible, lot.claim_prob)
}

/// Certainty equivalent under Prelec probability distortion.
pub fn ce_dt(lot: &Lottery, omega: f64) -> f64 {
    -lot.premium - prelec_unchecked(lot.claim_prob, omega) * lot.deductible
}

/// Derivative of [`ce_dt`] with respect to `omega`.
pub fn ce_dt_domega(lot: &Lottery, omega: f64) -> f64 {
    let loglog = (-lot.claim_prob.ln()).ln();
    -lot.deductible * prelec_domega_from_loglog(loglog, omega)
}

/// Certainty equivalent for either type.
pub fn ce(ptype: PreferenceType, lot: &Lottery, zeta: f64) -> f64 {
    match ptype {
        PreferenceType::Eu => ce_eu(lot, zeta),
        PreferenceType::Dt => ce_dt(lot, zeta),
    }
}

/// Derivative of [`ce`] with respect to the coefficient.
pub fn ce_dzeta(ptype: PreferenceType, lot: &Lottery, zeta: f64) -> f64 {
    match ptype {
        PreferenceType::Eu => ce_eu_dnu(lot, zeta),
        PreferenceType::Dt => ce_dt_domega(lot, zeta),
    }
}

/// Sign of the derivative of `Omega(mu; omega)` in `omega`.
///
/// Negative for `mu < 1/e`, where weighting of small probabilities weakens as
/// curvature rises; zero at `mu = 1/e`.
pub fn prelec_slope_sign(mu: f64) -> f64 {
    let loglog = (-mu.ln()).ln();
    if loglog > 0.0 {
        -1.0
    } else if loglog < 0.0 {
        1.0
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn lot() -> Lottery {
        Lottery::new(187.0, 500.0, 0.081).unwrap()
    }

    /// Certainty equivalent found by bisection on expected CARA utility.
    fn ce_by_bisection(lot: &Lottery, nu: f64) -> f64 {
        let eu = (1.0 - lot.claim_prob) * cara_utility(-lot.premium, nu)
            + lot.claim_prob * cara_utility(-lot.premium - lot.deductible, nu);
        let (mut lo, mut hi) = (-lot.premium - lot.deductible, -lot.premium);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cara_utility(mid, nu) < eu {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn eu_certainty_equivalent_matches_bisection() {
        let l = lot();
        let value = ce_eu(&l, 0.002);
        assert_relative_eq!(value, ce_by_bisection(&l, 0.002), epsilon = 1e-8);
        assert!((value - (-252.16)).abs() < 1e-2);
        assert!(value < l.npv());
    }

    #[test]
    fn dt_certainty_equivalent() {
        let value = ce_dt(&lot(), 0.5);
        assert!((value - (-289.44)).abs() < 5e-3);
        let check = -187.0 - (-(-(0.081f64).ln()).sqrt()).exp() * 500.0;
        assert_relative_eq!(value, check, epsilon = 1e-12);
    }

    #[test]
    fn prelec_reference_values() {
        assert!((prelec(0.1, 0.5).unwrap() - 0.21926).abs() < 2e-5);
        assert!((prelec(0.081, 0.5).unwrap() - 0.20487).abs() < 2e-5);
        assert_relative_eq!(prelec(0.1, 0.5).unwrap(), (-(10f64.ln()).sqrt()).exp(), epsilon = 1e-15);
        assert!(matches!(prelec(0.0, 0.5), Err(Error::ProbabilityDomain(_))));
        assert!(matches!(prelec(1.0, 0.5), Err(Error::ProbabilityDomain(_))));
    }

    #[test]
    fn prelec_fixed_point_at_inverse_e() {
        let mu = (-1.0f64).exp();
        for omega in [0.1, 0.5, 0.9, 1.0] {
            assert!((prelec(mu, omega).unwrap() - mu).abs() < 1e-12);
        }
    }

    #[test]
    fn eu_is_npv_at_zero_and_tiny_nu() {
        let l = lot();
        assert_eq!(ce_eu(&l, 0.0), l.npv());
        assert_eq!(ce_eu(&l, 1e-10), l.npv());
        // At nu = 1e-8 the gap follows the cumulant expansion of the loss.
        let nu = 1e-8;
        let (mu, d) = (0.081, 500.0);
        let k2 = mu * (1.0 - mu) * d * d;
        let k3 = mu * (1.0 - mu) * (1.0 - 2.0 * mu) * d * d * d;
        let gap = l.npv() - ce_eu(&l, nu);
        assert_relative_eq!(gap, nu * k2 / 2.0 + nu * nu * k3 / 6.0, max_relative = 1e-7);
    }

    #[test]
    fn eu_extreme_aversion_is_finite() {
        let l = Lottery::new(187.0, 1000.0, 0.081).unwrap();
        let value = ce_eu(&l, 2.5);
        assert!(value.is_finite());
        let expected = -187.0 - 1000.0 - (0.081f64).ln() / 2.5;
        assert_relative_eq!(value, expected, max_relative = 1e-12);
    }

    #[test]
    fn cara_utility_linear_limit() {
        assert_eq!(cara_utility(-100.0, 0.0), -100.0);
        assert_relative_eq!(cara_utility(-100.0, 1e-6), -100.0, max_relative = 1e-3);
    }

    #[test]
    fn lottery_validation() {
        assert!(Lottery::new(-1.0, 500.0, 0.1).is_err());
        assert!(Lottery::new(1.0, 0.0, 0.1).is_err());
        assert!(matches!(Lottery::new(1.0, 5.0, 1.0), Err(Error::ProbabilityDomain(_))));
    }

    #[test]
    fn coefficient_support() {
        assert!(Coefficient::new(PreferenceType::Eu, 0.03).is_err());
        assert!(Coefficient::new(PreferenceType::Dt, 0.7).is_ok());
    }

    proptest! {
        #[test]
        fn eu_ce_brackets(x in 1.0f64..3000.0, d in 10.0f64..1000.0, mu in 0.001f64..0.5, nu in 0.0f64..0.025) {
            let l = Lottery::new(x, d, mu).unwrap();
            let c = ce_eu(&l, nu);
            prop_assert!(c <= l.npv() + 1e-9);
            prop_assert!(c >= -x - d - 1e-9);
        }

        #[test]
        fn eu_ce_decreasing_in_nu(d in 10.0f64..1000.0, mu in 0.001f64..0.5, nu in 0.0f64..0.024) {
            let l = Lottery::new(100.0, d, mu).unwrap();
            prop_assert!(ce_eu(&l, nu + 1e-3) <= ce_eu(&l, nu) + 1e-9);
        }

        #[test]
        fn dt_ce_monotone_in_omega_below_inverse_e(d in 10.0f64..1000.0, mu in 0.001f64..0.36, w in 0.01f64..0.99) {
            let l = Lottery::new(100.0, d, mu).unwrap();
            prop_assert!(ce_dt(&l, w + 0.01) >= ce_dt(&l, w));
        }

        #[test]
        fn eu_derivative_matches_finite_difference(d in 50.0f64..1000.0, mu in 0.005f64..0.3, nu in 0.0005f64..0.024) {
            let l = Lottery::new(100.0, d, mu).unwrap();
            let h = 1e-6;
            let fd = (ce_eu(&l, nu + h) - ce_eu(&l, nu - h)) / (2.0 * h);
            let an = ce_eu_dnu(&l, nu);
            prop_assert!((fd - an).abs() <= 1e-4 * an.abs().max(1e-6));
        }

        #[test]
        fn dt_derivative_matches_finite_difference(d in 50.0f64..1000.0, mu in 0.005f64..0.3, w in 0.05f64..0.95) {
            let l = Lottery::new(100.0, d, mu).unwrap();
            let h = 1e-6;
            let fd = (ce_dt(&l, w + h) - ce_dt(&l, w - h)) / (2.0 * h);
            let an = ce_dt_domega(&l, w);
            prop_assert!((fd - an).abs() <= 1e-4 * an.abs().max(1e-6));
        }
    }

    #[test]
    fn eu_derivative_on_both_sides_of_series_switch() {
        // Reference values from 40-digit arithmetic.
        let (d, mu) = (1000.0, 0.08);
        assert_relative_eq!(risk_cost_eu_dnu(0.999e-6, d, mu), 36820.592519250273, max_relative = 1e-10);
        assert_relative_eq!(risk_cost_eu_dnu(1.001e-6, d, mu), 36820.633755800835, max_relative = 1e-10);
    }
}

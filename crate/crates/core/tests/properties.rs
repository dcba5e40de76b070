use proptest::prelude::*;

use bundlechoice::preferences::{ce, prelec};
use bundlechoice::simulation::calibrated_params;
use bundlechoice::welfare::excess_wtp;
use bundlechoice::{choice_probs, BetaShape, Household, HouseholdMenu, Integration, Lottery, PreferenceType};

fn household() -> impl Strategy<Value = Household> {
    (30.0..800.0f64, 15.0..500.0f64, 0.005..0.3f64, 0.002..0.2f64)
        .prop_map(|(x1, x2, m1, m2)| Household::new(0, x1, x2, m1, m2))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn probabilities_form_a_distribution(
        hh in household(),
        alpha in 0.0..=1.0f64,
        a in 1.1..20.0f64,
        b in 1.1..40.0f64,
        phi in proptest::collection::vec(0.0..=1.0f64, 29),
    ) {
        let mut mp = calibrated_params();
        mp.preferences.alpha = alpha;
        mp.preferences.nu = BetaShape::new(a, b).unwrap();
        mp.consideration.phi[1..].copy_from_slice(&phi);
        let p = choice_probs(&hh, &mp, &Integration::default()).unwrap();
        prop_assert!(p.iter().all(|&v| v >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        for (j, &v) in p.iter().enumerate() {
            if mp.consideration.phi[j] == 0.0 {
                prop_assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn distortion_is_increasing_in_probability(mu in 0.001..0.998f64, omega in 0.05..2.0f64) {
        let lo = prelec(mu, omega).unwrap();
        let hi = prelec(mu + 0.001, omega).unwrap();
        prop_assert!(hi > lo && lo > 0.0 && hi < 1.0);
    }

    #[test]
    fn certainty_equivalent_below_expected_value_for_small_claim_probabilities(
        premium in 1.0..1000.0f64,
        d in 10.0..2000.0f64,
        mu in 0.001..0.36f64,
        nu in 0.0..0.025f64,
        omega in 0.01..1.0f64,
    ) {
        let lot = Lottery::new(premium, d, mu).unwrap();
        for (ptype, zeta) in [(PreferenceType::Eu, nu), (PreferenceType::Dt, omega)] {
            prop_assert!(ce(ptype, &lot, zeta) <= lot.npv() + 1e-9);
            prop_assert!(ce(ptype, &lot, zeta) >= -premium - d);
        }
    }

    #[test]
    fn excess_wtp_is_nonnegative_for_risk_averse_types(nu in 0.0..0.025f64, omega in 0.01..1.0f64) {
        prop_assert!(excess_wtp(PreferenceType::Eu, nu) >= 0.0);
        prop_assert!(excess_wtp(PreferenceType::Dt, omega) >= 0.0);
    }

    #[test]
    fn cheaper_prices_never_lower_certainty_equivalents(hh in household(), zeta in 0.0..0.025f64, cut in 0.5..0.99f64) {
        let mp = calibrated_params();
        let hm = HouseholdMenu::for_household(&mp.menu, &hh).unwrap();
        let lower = HouseholdMenu::new(&mp.menu, hh.base_prices().map(|x| x * cut), hh.claim_probs()).unwrap();
        for b in mp.menu.bundles() {
            prop_assert!(lower.bundle_ce(b, PreferenceType::Eu, zeta) > hm.bundle_ce(b, PreferenceType::Eu, zeta));
        }
    }
}

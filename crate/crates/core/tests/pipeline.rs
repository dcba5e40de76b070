use bundlechoice::consideration::NarrowConsideration;
use bundlechoice::estimation::{self, loglik, EstimationOptions, FreeParams};
use bundlechoice::io::{read_households, write_households};
use bundlechoice::partition::PartitionOptions;
use bundlechoice::simulation::{
    calibrated_params, choice_shares, gen_population, simulate_choices, ConsiderationRegime, PopulationConfig,
};
use bundlechoice::welfare::{welfare_report, WelfareOptions};
use bundlechoice::{choice_probs, Household, Integration, ModelParams};

fn simulated(n: usize, seed: u64, regime: &ConsiderationRegime) -> (ModelParams, Vec<Household>) {
    let mp = calibrated_params();
    let pop = gen_population(&PopulationConfig {
        n,
        seed,
        ..PopulationConfig::default()
    })
    .unwrap();
    let data = simulate_choices(&pop, &mp, regime, seed).unwrap();
    (mp, data)
}

#[test]
fn csv_round_trip_keeps_likelihood() {
    let (mp, data) = simulated(500, 5, &ConsiderationRegime::Broad);
    let mut buf = Vec::new();
    write_households(&mut buf, &data, &mp.menu).unwrap();
    let back = read_households(buf.as_slice(), "memory", &mp.menu).unwrap();
    assert_eq!(back, data);
    let a = loglik(&mp, &data, PartitionOptions::PRECISE).unwrap();
    let b = loglik(&mp, &back, PartitionOptions::PRECISE).unwrap();
    assert_eq!(a, b);
}

#[test]
fn truth_beats_perturbations() {
    let (mp, data) = simulated(3000, 8, &ConsiderationRegime::Broad);
    let (at_truth, floored) = loglik(&mp, &data, PartitionOptions::PRECISE).unwrap();
    assert_eq!(floored, 0);
    let mut alpha = mp.clone();
    alpha.preferences.alpha = 0.7;
    let mut nu = mp.clone();
    nu.preferences.nu.shape2 = 12.0;
    let mut phi = mp.clone();
    phi.consideration.phi[7] = 0.5;
    for other in [alpha, nu, phi] {
        let (ll, _) = loglik(&other, &data, PartitionOptions::PRECISE).unwrap();
        assert!(ll < at_truth, "{ll} >= {at_truth}");
    }
}

#[test]
fn likelihood_ignores_household_order() {
    let (mp, mut data) = simulated(400, 9, &ConsiderationRegime::Broad);
    let a = loglik(&mp, &data, PartitionOptions::PRECISE).unwrap();
    data.reverse();
    let b = loglik(&mp, &data, PartitionOptions::PRECISE).unwrap();
    assert_eq!(a, b);
}

#[test]
fn fit_with_fixed_preferences_recovers_consideration_scale() {
    let (mp, data) = simulated(4000, 10, &ConsiderationRegime::Broad);
    let mut init = mp.clone();
    init.consideration.phi[7] = 0.5;
    let opts = EstimationOptions {
        multistart: 1,
        free: FreeParams {
            alpha: false,
            nu: false,
            omega: false,
            consideration: true,
        },
        ..EstimationOptions::default()
    };
    let fit = estimation::fit(&data, &init, &opts).unwrap();
    assert!(fit.converged);
    assert_eq!(fit.params.preferences, mp.preferences);
    assert!((fit.params.consideration.phi[7] - 0.83).abs() < 0.05, "{}", fit.params.consideration.phi[7]);
}

#[test]
fn model_shares_track_simulated_shares() {
    let (mp, data) = simulated(20_000, 12, &ConsiderationRegime::Broad);
    let observed = choice_shares(&data, &mp.menu);
    let mut model = vec![0.0; mp.menu.n_bundles()];
    for h in data.iter().take(4000) {
        for (m, p) in model.iter_mut().zip(choice_probs(h, &mp, &Integration::default()).unwrap()) {
            *m += p / 4000.0;
        }
    }
    for (m, o) in model.iter().zip(&observed) {
        assert!((m - o).abs() < 0.02, "{m} vs {o}");
    }
}

#[test]
fn narrow_consideration_fills_the_lower_triangle() {
    let mp = calibrated_params();
    let narrow = ConsiderationRegime::Narrow(NarrowConsideration::from_marginals(&mp.consideration));
    let (_, data) = simulated(5000, 13, &narrow);
    let shares = choice_shares(&data, &mp.menu);
    let below: f64 = (0..shares.len())
        .filter(|&j| {
            let (d1, d2) = mp.menu.deductibles(mp.menu.bundle_at(j));
            d1 < d2
        })
        .map(|j| shares[j])
        .sum();
    assert!(below > 0.01, "{below}");
}

#[test]
fn welfare_report_covers_every_household() {
    let (mp, data) = simulated(30, 14, &ConsiderationRegime::Broad);
    let report = welfare_report(&data, &mp, &WelfareOptions::default()).unwrap();
    assert_eq!(report.households.len(), 30);
    assert_eq!(report.summaries.len(), 4);
    for h in &report.households {
        assert!(h.full_consideration_gain >= 0.0);
        assert!(h.bundled_full >= h.bundled_middle && h.bundled_middle >= h.bundled_worst);
    }
}

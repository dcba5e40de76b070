//! Synthetic populations and simulated choices.
//!
//! Every household draws from its own ChaCha stream keyed by the run seed,
//! a purpose tag and the household id, so results do not depend on thread
//! count or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta::BetaShape;
use crate::choice::{ModelParams, PreferenceParams};
use crate::consideration::{sample_set, BundleSet, ConsiderationParams, NarrowConsideration};
use crate::error::{Error, Result};
use crate::household::Household;
use crate::menu::{HouseholdMenu, MenuConfig};
use crate::preferences::PreferenceType;

const POPULATION_TAG: u64 = 0x5052_4943_4553_0001;
const CHOICE_TAG: u64 = 0x4348_4f49_4345_0002;

/// Per-household random stream.
pub fn household_rng(seed: u64, tag: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ tag.rotate_left(17));
    rng.set_stream(id);
    rng
}

/// Distribution of base prices and claim probabilities. Both are lognormal
/// with the given means and standard deviations; claim probabilities are
/// clipped to `[0.001, 0.5]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationConfig {
    pub n: usize,
    pub price_means: [f64; 2],
    pub price_sds: [f64; 2],
    /// Correlation between collision and comprehensive base prices.
    pub price_corr: f64,
    pub claim_means: [f64; 2],
    pub claim_sds: [f64; 2],
    /// Correlation between the log base price and log claim probability
    /// within each context.
    pub claim_price_corr: f64,
    pub seed: u64,
}

impl Default for PopulationConfig {
    fn default() -> Self {
        PopulationConfig {
            n: 10_000,
            price_means: [187.0, 117.0],
            price_sds: [104.0, 86.0],
            price_corr: 0.74,
            claim_means: [0.081, 0.023],
            claim_sds: [0.026, 0.012],
            claim_price_corr: 0.0,
            seed: 1,
        }
    }
}

struct LogNormal {
    location: f64,
    scale: f64,
}

impl LogNormal {
    fn from_moments(mean: f64, sd: f64) -> Self {
        let s2 = (1.0 + (sd / mean).powi(2)).ln();
        LogNormal {
            location: mean.ln() - s2 / 2.0,
            scale: s2.sqrt(),
        }
    }
}

/// Normal-scale correlation giving lognormal correlation `target`.
fn normal_correlation(target: f64, a: &LogNormal, b: &LogNormal) -> f64 {
    let denom = ((a.scale.powi(2)).exp_m1() * (b.scale.powi(2)).exp_m1()).sqrt();
    (1.0 + target * denom).ln() / (a.scale * b.scale)
}

fn cholesky4(c: &[[f64; 4]; 4]) -> Result<[[f64; 4]; 4]> {
    let mut l = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = c[i][i] - s;
                if d <= 0.0 {
                    return Err(Error::invalid("population", "correlation matrix is not positive definite"));
                }
                l[i][i] = d.sqrt();
            } else {
                l[i][j] = (c[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(l)
}

impl PopulationConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: &[f64; 2]| v.iter().all(|x| x.is_finite() && *x > 0.0);
        if !(positive(&self.price_means) && positive(&self.price_sds) && positive(&self.claim_means) && positive(&self.claim_sds)) {
            return Err(Error::invalid("population", "means and standard deviations must be positive"));
        }
        if !(self.price_corr.abs() < 1.0 && self.claim_price_corr.abs() < 1.0) {
            return Err(Error::invalid("population", "correlations must lie in (-1, 1)"));
        }
        Ok(())
    }
}

/// Draws base prices and claim probabilities for `pc.n` households.
pub fn gen_population(pc: &PopulationConfig) -> Result<Vec<Household>> {
    pc.validate()?;
    let price: [LogNormal; 2] = std::array::from_fn(|c| LogNormal::from_moments(pc.price_means[c], pc.price_sds[c]));
    let claim: [LogNormal; 2] = std::array::from_fn(|c| LogNormal::from_moments(pc.claim_means[c], pc.claim_sds[c]));
    let rho = normal_correlation(pc.price_corr, &price[0], &price[1]);
    let kappa = pc.claim_price_corr;
    // Order: price I, price II, claim I, claim II.
    let corr = [
        [1.0, rho, kappa, 0.0],
        [rho, 1.0, 0.0, kappa],
        [kappa, 0.0, 1.0, 0.0],
        [0.0, kappa, 0.0, 1.0],
    ];
    let chol = cholesky4(&corr)?;
    let households = (0..pc.n as u64)
        .into_par_iter()
        .map(|id| {
            let mut rng = household_rng(pc.seed, POPULATION_TAG, id);
            let z: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(&mut rng));
            let y: [f64; 4] = std::array::from_fn(|i| (0..=i).map(|k| chol[i][k] * z[k]).sum());
            let x: [f64; 2] = std::array::from_fn(|c| (price[c].location + price[c].scale * y[c]).exp());
            let mu: [f64; 2] =
                std::array::from_fn(|c| (claim[c].location + claim[c].scale * y[2 + c]).exp().clamp(0.001, 0.5));
            Household::new(id, x[0], x[1], mu[0], mu[1])
        })
        .collect();
    Ok(households)
}

/// How consideration sets are drawn in a simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConsiderationRegime {
    /// Bundle-level random consideration with the model's grid.
    Broad,
    /// Context-by-context consideration.
    Narrow(NarrowConsideration),
    /// Bundles with collision deductible below comprehensive deductible are
    /// never considered; all others always are.
    Triangular,
    /// Every bundle is considered.
    Full,
}

/// Latent draws behind a simulated choice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatentDraw {
    pub ptype: PreferenceType,
    pub zeta: f64,
    pub considered: BundleSet,
}

/// Draws a coefficient from a Beta distribution on `[0, upper]`.
pub fn draw_coefficient<R: Rng + ?Sized>(shape: BetaShape, upper: f64, rng: &mut R) -> f64 {
    let beta = rand_distr::Beta::new(shape.shape1, shape.shape2).expect("validated shape");
    upper * beta.sample(rng)
}

/// Simulates each household's chosen bundle.
pub fn simulate_choices(
    population: &[Household],
    mp: &ModelParams,
    regime: &ConsiderationRegime,
    seed: u64,
) -> Result<Vec<Household>> {
    Ok(simulate_with_latent(population, mp, regime, seed)?
        .into_iter()
        .map(|(h, _)| h)
        .collect())
}

/// Simulates choices and returns the latent type, coefficient and
/// consideration set of each household.
pub fn simulate_with_latent(
    population: &[Household],
    mp: &ModelParams,
    regime: &ConsiderationRegime,
    seed: u64,
) -> Result<Vec<(Household, LatentDraw)>> {
    mp.validate()?;
    let triangular = ConsiderationParams::triangular(&mp.menu);
    let full = ConsiderationParams::full(mp.menu.collision.len(), mp.menu.comprehensive.len());
    if let ConsiderationRegime::Narrow(nc) = regime {
        nc.validate()?;
        if (nc.collision.len(), nc.comprehensive.len()) != mp.menu.shape() {
            return Err(Error::invalid("narrow consideration", "sizes do not match the menu"));
        }
    }
    population
        .par_iter()
        .map(|hh| {
            let hm = HouseholdMenu::for_household(&mp.menu, hh)?;
            let mut rng = household_rng(seed, CHOICE_TAG, hh.id);
            let draw = draw_latent(&mp.preferences, &mut rng);
            let considered = match regime {
                ConsiderationRegime::Broad => sample_set(&mp.consideration, &mut rng),
                ConsiderationRegime::Narrow(nc) => nc.sample(&mut rng),
                ConsiderationRegime::Triangular => sample_set(&triangular, &mut rng),
                ConsiderationRegime::Full => sample_set(&full, &mut rng),
            };
            let choice = best_in_set(&hm, draw.0, draw.1, considered);
            let latent = LatentDraw {
                ptype: draw.0,
                zeta: draw.1,
                considered,
            };
            Ok((hh.clone().with_choice(hm.bundle_at(choice)), latent))
        })
        .collect()
}

fn draw_latent<R: Rng + ?Sized>(prefs: &PreferenceParams, rng: &mut R) -> (PreferenceType, f64) {
    let u: f64 = rng.gen();
    let ptype = if u < prefs.alpha {
        PreferenceType::Eu
    } else {
        PreferenceType::Dt
    };
    (ptype, draw_coefficient(prefs.shape(ptype), ptype.support_upper(), rng))
}

/// Highest-ranked bundle within a consideration set.
pub fn best_in_set(hm: &HouseholdMenu, ptype: PreferenceType, zeta: f64, set: BundleSet) -> usize {
    let mut ces = Vec::new();
    hm.bundle_ces(ptype, zeta, &mut ces);
    let mut best = usize::MAX;
    for j in set.iter() {
        if best == usize::MAX || hm.ranks_above(j, ces[j], best, ces[best]) {
            best = j;
        }
    }
    best
}

/// Consideration grid with the seeded pattern: observed rates for the
/// default 5x6 menu with every bundle whose collision deductible is below its
/// comprehensive deductible set to zero.
pub fn seeded_consideration() -> ConsiderationParams {
    // Rows: collision 1000, 500, 250, 200, 100.
    // Columns: comprehensive 1000, 500, 250, 200, 100, 50.
    let rows = vec![
        vec![1.00, 0.47, 0.07, 0.18, 0.03, 0.04],
        vec![0.00, 0.83, 0.18, 0.46, 0.06, 0.13],
        vec![0.00, 0.00, 0.09, 0.08, 0.03, 0.04],
        vec![0.00, 0.00, 0.00, 0.29, 0.04, 0.12],
        vec![0.00, 0.00, 0.00, 0.00, 0.01, 0.05],
    ];
    ConsiderationParams::from_rows(&rows).expect("static grid is valid")
}

/// Calibrated parameter set used for simulation studies: EU share 0.46,
/// `nu/0.025 ~ Beta(2.5, 22.5)`, `omega ~ Beta(6, 4)`, the seeded
/// consideration grid and the default menu.
pub fn calibrated_params() -> ModelParams {
    ModelParams {
        preferences: PreferenceParams {
            alpha: 0.46,
            nu: BetaShape {
                shape1: 2.5,
                shape2: 22.5,
            },
            omega: BetaShape {
                shape1: 6.0,
                shape2: 4.0,
            },
        },
        consideration: seeded_consideration(),
        menu: MenuConfig::default_menu(),
    }
}

/// Share of households choosing each bundle.
pub fn choice_shares(households: &[Household], menu: &MenuConfig) -> Vec<f64> {
    let mut counts = vec![0usize; menu.n_bundles()];
    let mut n = 0usize;
    for h in households {
        if let Some(b) = h.choice {
            counts[menu.bundle_index(b)] += 1;
            n += 1;
        }
    }
    counts.into_iter().map(|c| c as f64 / n.max(1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::menu::Bundle;

    fn mean_sd(v: &[f64]) -> (f64, f64) {
        let n = v.len() as f64;
        let m = v.iter().sum::<f64>() / n;
        let s = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        (m, s)
    }

    fn corr(a: &[f64], b: &[f64]) -> f64 {
        let (ma, sa) = mean_sd(a);
        let (mb, sb) = mean_sd(b);
        let n = a.len() as f64;
        a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / ((n - 1.0) * sa * sb)
    }

    #[test]
    fn population_moments() {
        let pc = PopulationConfig {
            n: 100_000,
            seed: 3,
            ..Default::default()
        };
        let pop = gen_population(&pc).unwrap();
        let x1: Vec<f64> = pop.iter().map(|h| h.base_price_collision).collect();
        let x2: Vec<f64> = pop.iter().map(|h| h.base_price_comprehensive).collect();
        let m1: Vec<f64> = pop.iter().map(|h| h.claim_prob_collision).collect();
        let m2: Vec<f64> = pop.iter().map(|h| h.claim_prob_comprehensive).collect();
        let (a, _) = mean_sd(&x1);
        let (b, _) = mean_sd(&x2);
        assert!((a / 187.0 - 1.0).abs() < 0.02 && (b / 117.0 - 1.0).abs() < 0.02);
        assert!((corr(&x1, &x2) - 0.74).abs() < 0.03);
        let (c, _) = mean_sd(&m1);
        let (d, _) = mean_sd(&m2);
        assert!((c / 0.081 - 1.0).abs() < 0.02 && (d / 0.023 - 1.0).abs() < 0.02);
    }

    #[test]
    fn population_is_reproducible() {
        let pc = PopulationConfig {
            n: 500,
            ..Default::default()
        };
        assert_eq!(gen_population(&pc).unwrap(), gen_population(&pc).unwrap());
        let other = gen_population(&PopulationConfig { seed: 2, ..pc.clone() }).unwrap();
        assert_ne!(gen_population(&pc).unwrap(), other);
    }

    #[test]
    fn zero_probability_bundles_are_never_chosen() {
        let mp = calibrated_params();
        let pop = gen_population(&PopulationConfig {
            n: 20_000,
            ..Default::default()
        })
        .unwrap();
        let sim = simulate_choices(&pop, &mp, &ConsiderationRegime::Broad, 5).unwrap();
        for h in &sim {
            assert!(mp.consideration.get(h.choice.unwrap()) > 0.0);
        }
    }

    #[test]
    fn full_consideration_matches_argmax() {
        let mut mp = calibrated_params();
        mp.preferences.alpha = 1.0;
        let pop = gen_population(&PopulationConfig {
            n: 300,
            ..Default::default()
        })
        .unwrap();
        let sim = simulate_with_latent(&pop, &mp, &ConsiderationRegime::Full, 9).unwrap();
        for (h, latent) in &sim {
            let hm = HouseholdMenu::for_household(&mp.menu, h).unwrap();
            let order = crate::partition::ranking_at(&hm, PreferenceType::Eu, latent.zeta);
            assert_eq!(hm.bundle_index(h.choice.unwrap()), order[0]);
        }
    }

    #[test]
    fn narrow_marginals_and_weaker_association() {
        let mp = calibrated_params();
        let narrow = NarrowConsideration::from_marginals(&mp.consideration);
        let pop = gen_population(&PopulationConfig {
            n: 30_000,
            ..Default::default()
        })
        .unwrap();
        let broad = simulate_with_latent(&pop, &mp, &ConsiderationRegime::Broad, 4).unwrap();
        let nar = simulate_with_latent(&pop, &mp, &ConsiderationRegime::Narrow(narrow.clone()), 4).unwrap();
        // Per-context marginal consideration rates agree.
        let n2 = mp.menu.comprehensive.len();
        for i in 0..mp.menu.collision.len() {
            let rate = |sims: &[(Household, LatentDraw)]| {
                sims.iter()
                    .filter(|(_, l)| (0..n2).any(|j| l.considered.contains(i * n2 + j)))
                    .count() as f64
                    / sims.len() as f64
            };
            assert!((rate(&broad) - narrow.collision[i]).abs() < 0.015);
            assert!((rate(&nar) - narrow.collision[i]).abs() < 0.015);
        }
        let rank_corr = |sims: &[(Household, LatentDraw)]| {
            let a: Vec<f64> = sims.iter().map(|(h, _)| h.choice.unwrap().collision as f64).collect();
            let b: Vec<f64> = sims.iter().map(|(h, _)| h.choice.unwrap().comprehensive as f64).collect();
            corr(&a, &b)
        };
        assert!(rank_corr(&nar) < rank_corr(&broad));
        let sb = choice_shares(&broad.iter().map(|x| x.0.clone()).collect::<Vec<_>>(), &mp.menu);
        let sn = choice_shares(&nar.iter().map(|x| x.0.clone()).collect::<Vec<_>>(), &mp.menu);
        assert!(sb.iter().zip(&sn).any(|(a, b)| (a - b).abs() > 0.01));
    }

    #[test]
    fn simulated_shares_match_model_probabilities() {
        let mp = calibrated_params();
        let pop = gen_population(&PopulationConfig {
            n: 400,
            seed: 8,
            ..Default::default()
        })
        .unwrap();
        let mut expected = vec![0.0; mp.menu.n_bundles()];
        for h in &pop {
            let p = crate::choice::choice_probs(h, &mp, &Default::default()).unwrap();
            for (e, q) in expected.iter_mut().zip(p) {
                *e += q / pop.len() as f64;
            }
        }
        let mut reps = Vec::new();
        for r in 0..25 {
            reps.extend(simulate_choices(&pop, &mp, &ConsiderationRegime::Broad, 100 + r).unwrap());
        }
        let shares = choice_shares(&reps, &mp.menu);
        let n = reps.len() as f64;
        for (s, e) in shares.iter().zip(&expected) {
            assert!((s - e).abs() < 4.0 * (e * (1.0 - e) / n).sqrt() + 1e-3, "{s} vs {e}");
        }
        let modal = shares
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(mp.menu.bundle_at(modal), Bundle::new(1, 1));
    }
}

//! Brute-force reference for integrated choice probabilities.
//!
//! Enumerates every consideration set, applies the argmax rule inside each,
//! and integrates over a dense coefficient grid whose cells are split by
//! bisection wherever the chosen bundle changes. Intended for tests on small
//! grids.

use crate::choice::ModelParams;
use crate::consideration::{set_prob, BundleSet};
use crate::error::{Error, Result};
use crate::household::Household;
use crate::menu::{Bundle, HouseholdMenu};
use crate::preferences::PreferenceType;

/// Largest grid accepted by the enumeration.
pub const MAX_ENUMERATED_BUNDLES: usize = 12;

fn winners(hm: &HouseholdMenu, ptype: PreferenceType, zeta: f64, sets: &[(BundleSet, f64)]) -> Vec<usize> {
    let n = hm.n_bundles();
    let ces: Vec<f64> = (0..n).map(|j| hm.bundle_ce(hm.bundle_at(j), ptype, zeta)).collect();
    sets.iter()
        .map(|(s, _)| {
            let mut best = usize::MAX;
            for j in s.iter() {
                if best == usize::MAX {
                    best = j;
                    continue;
                }
                let better = ces[j] > ces[best]
                    || (ces[j] == ces[best]
                        && (hm.total_premium(j) < hm.total_premium(best)
                            || (hm.total_premium(j) == hm.total_premium(best) && j < best)));
                if better {
                    best = j;
                }
            }
            best
        })
        .collect()
}

/// Integrated probability of `b` by enumeration over consideration sets and
/// a coefficient grid of `n_grid` cells per type.
pub fn choice_prob_bruteforce(b: Bundle, hh: &Household, mp: &ModelParams, n_grid: usize) -> Result<f64> {
    let n = mp.menu.n_bundles();
    if n > MAX_ENUMERATED_BUNDLES {
        return Err(Error::Size {
            bundles: n,
            limit: MAX_ENUMERATED_BUNDLES,
        });
    }
    let hm = HouseholdMenu::for_household(&mp.menu, hh)?;
    let target = hm.bundle_index(b);
    let sets: Vec<(BundleSet, f64)> = (0..1u64 << (n - 1))
        .map(|m| BundleSet(m << 1 | 1))
        .map(|s| (s, set_prob(s, &mp.consideration)))
        .filter(|(_, p)| *p > 0.0)
        .collect();
    let mut total = 0.0;
    for ptype in PreferenceType::ALL {
        let weight = mp.preferences.weight(ptype);
        if weight == 0.0 {
            continue;
        }
        let dist = mp.preferences.distribution(ptype);
        let upper = ptype.support_upper();
        let mut z0 = 0.0;
        let mut w0 = winners(&hm, ptype, z0, &sets);
        let mut type_total = 0.0;
        for i in 1..=n_grid {
            let z1 = upper * i as f64 / n_grid as f64;
            let w1 = winners(&hm, ptype, z1, &sets);
            let (f0, f1) = (dist.cdf(z0), dist.cdf(z1));
            for (s, (&a, &c)) in w0.iter().zip(&w1).enumerate() {
                if a != target && c != target {
                    continue;
                }
                let p = sets[s].1;
                if a == c {
                    type_total += p * (f1 - f0);
                    continue;
                }
                let (mut lo, mut hi) = (z0, z1);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    let wm = winners(&hm, ptype, mid, &sets[s..=s])[0];
                    if wm == a {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let fs = dist.cdf(0.5 * (lo + hi));
                if a == target {
                    type_total += p * (fs - f0);
                }
                if c == target {
                    type_total += p * (f1 - fs);
                }
            }
            z0 = z1;
            w0 = w1;
        }
        total += weight * type_total;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::BetaShape;
    use crate::choice::{choice_probs, PreferenceParams};
    use crate::consideration::ConsiderationParams;
    use crate::menu::MenuConfig;
    use crate::quadrature::Integration;

    #[test]
    fn rejects_large_grids() {
        let mp = ModelParams::new(
            PreferenceParams {
                alpha: 0.5,
                nu: BetaShape::new(2.0, 5.0).unwrap(),
                omega: BetaShape::new(6.0, 4.0).unwrap(),
            },
            ConsiderationParams::uniform(5, 6, 0.5),
            MenuConfig::default_menu(),
        )
        .unwrap();
        let hh = Household::new(0, 187.0, 117.0, 0.08, 0.02);
        assert!(matches!(
            choice_prob_bruteforce(Bundle::CHEAPEST, &hh, &mp, 100),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn agrees_with_exact_integration_on_small_grid() {
        let mut menu = MenuConfig::default_menu();
        menu.collision.deductibles.truncate(2);
        menu.collision.factors.truncate(2);
        menu.comprehensive.deductibles.truncate(3);
        menu.comprehensive.factors.truncate(3);
        let mp = ModelParams::new(
            PreferenceParams {
                alpha: 0.4,
                nu: BetaShape::new(2.0, 6.0).unwrap(),
                omega: BetaShape::new(5.0, 3.0).unwrap(),
            },
            ConsiderationParams::new(2, 3, vec![1.0, 0.5, 0.3, 0.7, 0.2, 0.9]).unwrap(),
            menu,
        )
        .unwrap();
        let hh = Household::new(0, 190.0, 110.0, 0.085, 0.03);
        let exact = choice_probs(&hh, &mp, &Integration::default()).unwrap();
        for j in 0..6 {
            let b = mp.menu.bundle_at(j);
            let brute = choice_prob_bruteforce(b, &hh, &mp, 2000).unwrap();
            assert!((brute - exact[j]).abs() < 1e-9, "bundle {j}: {brute} vs {}", exact[j]);
        }
    }
}

//! Choice probabilities under random consideration and a two-type mixture of
//! risk preferences.

use serde::{Deserialize, Serialize};

use crate::beta::{BetaShape, ScaledBeta};
use crate::consideration::{ConsiderationParams, NarrowConsideration};
use crate::error::{Error, Result};
use crate::household::Household;
use crate::menu::{Bundle, Context, HouseholdMenu, MenuConfig};
use crate::partition::{cutpoints, focus_masks, interval_rankings, ranking_at, PartitionOptions};
use crate::preferences::PreferenceType;
use crate::quadrature::{Integration, QuadratureRule};

/// Type share and coefficient distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreferenceParams {
    /// Share of expected-utility households.
    pub alpha: f64,
    /// Beta shape of `nu / 0.025`.
    pub nu: BetaShape,
    /// Beta shape of `omega`.
    pub omega: BetaShape,
}

impl PreferenceParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid("type share", format!("{} outside [0, 1]", self.alpha)));
        }
        self.nu.validate()?;
        self.omega.validate()
    }

    pub fn shape(&self, ptype: PreferenceType) -> BetaShape {
        match ptype {
            PreferenceType::Eu => self.nu,
            PreferenceType::Dt => self.omega,
        }
    }

    pub fn distribution(&self, ptype: PreferenceType) -> ScaledBeta {
        ScaledBeta::new(self.shape(ptype), ptype.support_upper())
    }

    /// Mixture weight of a type.
    pub fn weight(&self, ptype: PreferenceType) -> f64 {
        match ptype {
            PreferenceType::Eu => self.alpha,
            PreferenceType::Dt => 1.0 - self.alpha,
        }
    }
}

/// Full model parameter set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub preferences: PreferenceParams,
    pub consideration: ConsiderationParams,
    pub menu: MenuConfig,
}

impl ModelParams {
    pub fn new(preferences: PreferenceParams, consideration: ConsiderationParams, menu: MenuConfig) -> Result<Self> {
        let mp = ModelParams {
            preferences,
            consideration,
            menu,
        };
        mp.validate()?;
        Ok(mp)
    }

    pub fn validate(&self) -> Result<()> {
        self.menu.validate()?;
        self.preferences.validate()?;
        self.consideration.validate()?;
        self.consideration.check_menu(&self.menu)
    }
}

/// ARC probability of every bundle given a ranking, best first.
pub fn arc_probs_from_ranking(order: &[usize], phi: &[f64]) -> Vec<f64> {
    let mut probs = vec![0.0; phi.len()];
    let mut none_above = 1.0;
    for &j in order {
        probs[j] = phi[j] * none_above;
        none_above *= 1.0 - phi[j];
        if none_above == 0.0 {
            break;
        }
    }
    probs
}

/// Probability of a bundle given the bundles ranked above it.
#[inline]
pub fn arc_prob_from_mask(b: usize, mask: u64, phi: &[f64]) -> f64 {
    let mut p = phi[b];
    let mut bits = mask;
    while bits != 0 {
        let j = bits.trailing_zeros() as usize;
        p *= 1.0 - phi[j];
        bits &= bits - 1;
    }
    p
}

/// Probability of choosing `b` at a fixed coefficient.
pub fn choice_prob_given_coeff(
    b: Bundle,
    ptype: PreferenceType,
    zeta: f64,
    hm: &HouseholdMenu,
    cp: &ConsiderationParams,
) -> f64 {
    let idx = hm.bundle_index(b);
    let mut ces = Vec::new();
    hm.bundle_ces(ptype, zeta, &mut ces);
    let mask = crate::consideration::outranking_set(idx, &ces, hm).0;
    arc_prob_from_mask(idx, mask, &cp.phi)
}

/// Probabilities of every bundle at a fixed coefficient.
pub fn choice_probs_given_coeff(
    ptype: PreferenceType,
    zeta: f64,
    hm: &HouseholdMenu,
    cp: &ConsiderationParams,
) -> Vec<f64> {
    arc_probs_from_ranking(&ranking_at(hm, ptype, zeta), &cp.phi)
}

fn node_weights(rule: &QuadratureRule, dist: &ScaledBeta) -> Vec<(f64, f64)> {
    let raw: Vec<(f64, f64)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&u, &w)| (u * dist.upper, w * dist.unit_pdf(u)))
        .collect();
    let total: f64 = raw.iter().map(|p| p.1).sum();
    raw.into_iter().map(|(z, w)| (z, w / total)).collect()
}

/// Probability of choosing bundle index `b` for one preference type.
pub fn type_choice_prob(
    b: usize,
    ptype: PreferenceType,
    hm: &HouseholdMenu,
    mp: &ModelParams,
    integration: &Integration,
) -> f64 {
    let dist = mp.preferences.distribution(ptype);
    let phi = &mp.consideration.phi;
    match integration {
        Integration::CutoffExact(opts) => {
            let cuts = cutpoints(hm, ptype, Some(b), *opts);
            let masks = focus_masks(hm, ptype, b, &cuts);
            let mut prev = 0.0;
            let mut total = 0.0;
            for (k, mask) in masks.iter().enumerate() {
                let next = if k < cuts.len() { dist.cdf(cuts[k]) } else { 1.0 };
                total += (next - prev) * arc_prob_from_mask(b, *mask, phi);
                prev = next;
            }
            total
        }
        Integration::Nodes(rule) => {
            let bundle = hm.bundle_at(b);
            node_weights(rule, &dist)
                .into_iter()
                .map(|(z, w)| w * choice_prob_given_coeff(bundle, ptype, z, hm, &mp.consideration))
                .sum()
        }
    }
}

/// Probabilities of every bundle for one preference type.
pub fn type_choice_probs(
    ptype: PreferenceType,
    hm: &HouseholdMenu,
    mp: &ModelParams,
    integration: &Integration,
) -> Vec<f64> {
    let dist = mp.preferences.distribution(ptype);
    let phi = &mp.consideration.phi;
    let mut out = vec![0.0; hm.n_bundles()];
    match integration {
        Integration::CutoffExact(opts) => {
            let cuts = cutpoints(hm, ptype, None, *opts);
            let mut prev = 0.0;
            for (k, order) in interval_rankings(hm, ptype, &cuts).iter().enumerate() {
                let next = if k < cuts.len() { dist.cdf(cuts[k]) } else { 1.0 };
                let mass = next - prev;
                prev = next;
                for (o, p) in out.iter_mut().zip(arc_probs_from_ranking(order, phi)) {
                    *o += mass * p;
                }
            }
        }
        Integration::Nodes(rule) => {
            for (z, w) in node_weights(rule, &dist) {
                for (o, p) in out.iter_mut().zip(choice_probs_given_coeff(ptype, z, hm, &mp.consideration)) {
                    *o += w * p;
                }
            }
        }
    }
    out
}

/// Probability that a household chooses `b`, integrated over types and
/// coefficients.
pub fn choice_prob(b: Bundle, hh: &Household, mp: &ModelParams, integration: &Integration) -> Result<f64> {
    let hm = HouseholdMenu::for_household(&mp.menu, hh)?;
    let (n1, n2) = mp.menu.shape();
    if b.collision >= n1 || b.comprehensive >= n2 {
        return Err(Error::invalid("bundle", format!("{b:?} outside a {n1}x{n2} grid")));
    }
    Ok(choice_prob_in(hm.bundle_index(b), &hm, mp, integration))
}

/// [`choice_prob`] on a realized menu.
pub fn choice_prob_in(b: usize, hm: &HouseholdMenu, mp: &ModelParams, integration: &Integration) -> f64 {
    let mut total = 0.0;
    for ptype in PreferenceType::ALL {
        let w = mp.preferences.weight(ptype);
        if w > 0.0 {
            total += w * type_choice_prob(b, ptype, hm, mp, integration);
        }
    }
    total
}

/// Probabilities of every bundle for a household.
pub fn choice_probs(hh: &Household, mp: &ModelParams, integration: &Integration) -> Result<Vec<f64>> {
    let hm = HouseholdMenu::for_household(&mp.menu, hh)?;
    Ok(choice_probs_in(&hm, mp, integration))
}

/// [`choice_probs`] on a realized menu.
pub fn choice_probs_in(hm: &HouseholdMenu, mp: &ModelParams, integration: &Integration) -> Vec<f64> {
    let mut out = vec![0.0; hm.n_bundles()];
    for ptype in PreferenceType::ALL {
        let w = mp.preferences.weight(ptype);
        if w > 0.0 {
            for (o, p) in out.iter_mut().zip(type_choice_probs(ptype, hm, mp, integration)) {
                *o += w * p;
            }
        }
    }
    out
}

/// Central finite-difference derivative of a choice probability in the base
/// price of one context; `step` is in dollars.
pub fn choice_prob_derivative(
    b: Bundle,
    hh: &Household,
    mp: &ModelParams,
    integration: &Integration,
    wrt: Context,
    step: f64,
) -> Result<f64> {
    let shifted = |delta: f64| {
        let mut h = hh.clone();
        match wrt {
            Context::Collision => h.base_price_collision += delta,
            Context::Comprehensive => h.base_price_comprehensive += delta,
        }
        choice_prob(b, &h, mp, integration)
    };
    Ok((shifted(step)? - shifted(-step)?) / (2.0 * step))
}

/// Bundle probabilities under narrow consideration given a ranking, best
/// first, by enumeration over the alternative subsets of each context.
pub fn narrow_probs_from_ranking(order: &[usize], n_comprehensive: usize, subsets: &[Vec<(u64, f64)>; 2]) -> Vec<f64> {
    let mut probs = vec![0.0; order.len()];
    for &(m1, p1) in &subsets[0] {
        for &(m2, p2) in &subsets[1] {
            let winner = order
                .iter()
                .find(|&&j| m1 >> (j / n_comprehensive) & 1 == 1 && m2 >> (j % n_comprehensive) & 1 == 1);
            if let Some(&w) = winner {
                probs[w] += p1 * p2;
            }
        }
    }
    probs
}

/// Probabilities of every bundle under narrow consideration, integrated
/// exactly over both preference types.
pub fn narrow_choice_probs_in(
    hm: &HouseholdMenu,
    prefs: &PreferenceParams,
    narrow: &NarrowConsideration,
    opts: PartitionOptions,
) -> Vec<f64> {
    let subsets = [
        NarrowConsideration::subset_probs(&narrow.collision),
        NarrowConsideration::subset_probs(&narrow.comprehensive),
    ];
    let n2 = hm.n_alternatives(Context::Comprehensive);
    let mut out = vec![0.0; hm.n_bundles()];
    for ptype in PreferenceType::ALL {
        let w = prefs.weight(ptype);
        if w == 0.0 {
            continue;
        }
        let dist = prefs.distribution(ptype);
        let cuts = cutpoints(hm, ptype, None, opts);
        let mut prev = 0.0;
        for (k, order) in interval_rankings(hm, ptype, &cuts).iter().enumerate() {
            let next = if k < cuts.len() { dist.cdf(cuts[k]) } else { 1.0 };
            let mass = next - prev;
            prev = next;
            for (o, p) in out.iter_mut().zip(narrow_probs_from_ranking(order, n2, &subsets)) {
                *o += w * mass * p;
            }
        }
    }
    out
}

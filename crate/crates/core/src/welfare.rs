//! Welfare counterfactuals: the cost of limited consideration, a single
//! combined auto product replacing the two-context bundle, and excess
//! willingness to pay.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta::ScaledBeta;
use crate::choice::{arc_probs_from_ranking, ModelParams, PreferenceParams};
use crate::consideration::ConsiderationParams;
use crate::error::{Error, Result};
use crate::household::Household;
use crate::menu::{Bundle, HouseholdMenu, MenuConfig};
use crate::partition::{cutpoints, ranking_at, PartitionOptions};
use crate::preferences::{prelec_unchecked, risk_cost_eu, PreferenceType};
use crate::quadrature::QuadratureRule;
use crate::roots::illinois;

/// Reference lottery: lose this amount...
pub const WTP_LOSS: f64 = 500.0;
/// ...with this probability.
pub const WTP_PROB: f64 = 0.1;

/// Willingness to pay above expected loss to avoid losing $500 with
/// probability 10%.
pub fn excess_wtp(ptype: PreferenceType, zeta: f64) -> f64 {
    let fair = WTP_PROB * WTP_LOSS;
    let wtp = match ptype {
        PreferenceType::Eu => risk_cost_eu(zeta, WTP_LOSS, WTP_PROB),
        PreferenceType::Dt => WTP_LOSS * prelec_unchecked(WTP_PROB, zeta),
    };
    wtp - fair
}

/// How a household's realized alternatives are valued.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ValuationMode {
    /// The certainty equivalent that drives choice.
    #[default]
    ChoiceUtility,
    /// Net present value for DT households; EU households keep their choice
    /// utility.
    Npv,
}

/// Consideration of the combined product after the intervention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConsiderationScenario {
    /// Deductible `d` is considered with the probability of bundle `(d, d)`.
    Worst,
    /// Deductible `d` is considered with probability
    /// `min(1, p_I(d) + p_II(d))`.
    Middle,
    /// Every deductible is considered.
    Full,
}

impl ConsiderationScenario {
    pub const ALL: [ConsiderationScenario; 3] = [
        ConsiderationScenario::Worst,
        ConsiderationScenario::Middle,
        ConsiderationScenario::Full,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ConsiderationScenario::Worst => "worst",
            ConsiderationScenario::Middle => "middle",
            ConsiderationScenario::Full => "full",
        }
    }
}

/// Per-context marginal used by the middle scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MiddleRule {
    /// Probability that at least one bundle with deductible `d` in the
    /// context is considered.
    #[default]
    AtLeastOne,
    /// Sum of the bundle probabilities with deductible `d` in the context.
    Sum,
}

/// Status quo against which the combined product is compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Baseline {
    /// Bundles chosen under the estimated consideration probabilities.
    #[default]
    Limited,
    /// Bundles chosen under full consideration.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WelfareOptions {
    pub valuation: ValuationMode,
    pub middle_rule: MiddleRule,
    pub baseline: Baseline,
    /// Gauss-Legendre nodes inside each constant-ranking interval.
    pub nodes_per_interval: usize,
    pub partition_grid: usize,
    pub partition_depth: u32,
}

impl Default for WelfareOptions {
    fn default() -> Self {
        WelfareOptions {
            valuation: ValuationMode::ChoiceUtility,
            middle_rule: MiddleRule::AtLeastOne,
            baseline: Baseline::Limited,
            nodes_per_interval: 8,
            partition_grid: PartitionOptions::PRECISE.grid,
            partition_depth: PartitionOptions::PRECISE.max_depth,
        }
    }
}

impl WelfareOptions {
    fn partition(&self) -> PartitionOptions {
        PartitionOptions {
            grid: self.partition_grid,
            max_depth: self.partition_depth,
        }
    }

    fn rule(&self) -> Result<QuadratureRule> {
        QuadratureRule::gauss_legendre(self.nodes_per_interval)
    }
}

/// Single auto product offering the same deductible in both contexts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoProduct {
    /// Deductibles in the collision order.
    pub deductibles: Vec<f64>,
    pub premiums: Vec<f64>,
    pub mu_auto: f64,
    /// Bundle `(d, d)` matching each product alternative.
    pub bundles: Vec<Bundle>,
}

impl AutoProduct {
    /// Combined product for a household: premiums are context-wise sums and
    /// the claim probability is `mu_I + mu_II`.
    pub fn new(menu: &MenuConfig, hm: &HouseholdMenu) -> Result<Self> {
        let mu_auto = hm.mu[0] + hm.mu[1];
        if mu_auto >= 1.0 {
            return Err(Error::invalid(
                "auto product",
                format!("combined claim probability {mu_auto} is not below 1"),
            ));
        }
        let mut out = AutoProduct {
            deductibles: Vec::new(),
            premiums: Vec::new(),
            mu_auto,
            bundles: Vec::new(),
        };
        for &d in &menu.collision.deductibles {
            let b = menu.find_bundle(d, d).ok_or_else(|| {
                Error::invalid("auto product", format!("deductible {d} is not offered in both contexts"))
            })?;
            out.deductibles.push(d);
            out.premiums.push(hm.premiums[0][b.collision] + hm.premiums[1][b.comprehensive]);
            out.bundles.push(b);
        }
        if out.bundles.first() != Some(&Bundle::CHEAPEST) {
            return Err(Error::invalid("auto product", "the highest deductibles must coincide"));
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.deductibles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deductibles.is_empty()
    }

    fn risk_cost(&self, k: usize, ptype: PreferenceType, zeta: f64) -> f64 {
        let d = self.deductibles[k];
        match ptype {
            PreferenceType::Eu => risk_cost_eu(zeta, d, self.mu_auto),
            PreferenceType::Dt => prelec_unchecked(self.mu_auto, zeta) * d,
        }
    }

    /// Certainty equivalent that drives choice.
    pub fn ce(&self, k: usize, ptype: PreferenceType, zeta: f64) -> f64 {
        -self.premiums[k] - self.risk_cost(k, ptype, zeta)
    }

    pub fn value(&self, k: usize, ptype: PreferenceType, zeta: f64, mode: ValuationMode) -> f64 {
        match (mode, ptype) {
            (ValuationMode::Npv, PreferenceType::Dt) => -self.premiums[k] - self.mu_auto * self.deductibles[k],
            _ => self.ce(k, ptype, zeta),
        }
    }

    /// Alternatives ranked best first; ties go to the lower premium.
    pub fn ranking(&self, ptype: PreferenceType, zeta: f64) -> Vec<usize> {
        let ces: Vec<f64> = (0..self.len()).map(|k| self.ce(k, ptype, zeta)).collect();
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            ces[b]
                .total_cmp(&ces[a])
                .then(self.premiums[a].total_cmp(&self.premiums[b]))
                .then(a.cmp(&b))
        });
        order
    }

    /// Coefficients in `(0, upper)` where two alternatives are indifferent.
    pub fn cutpoints(&self, ptype: PreferenceType) -> Vec<f64> {
        let upper = ptype.support_upper();
        let mut cuts = Vec::new();
        for a in 0..self.len() {
            for b in a + 1..self.len() {
                let f = |z: f64| self.ce(a, ptype, z) - self.ce(b, ptype, z);
                let (f0, f1) = (f(0.0), f(upper));
                if f0 * f1 < 0.0 {
                    cuts.push(illinois(f, 0.0, upper, f0, f1));
                }
            }
        }
        cuts.retain(|&z| z > 0.0 && z < upper);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts
    }
}

/// Consideration probability of each product alternative under a scenario.
/// The highest deductible is always considered.
pub fn scenario_phi(
    cp: &ConsiderationParams,
    product: &AutoProduct,
    scenario: ConsiderationScenario,
    rule: MiddleRule,
) -> Vec<f64> {
    let mut phi: Vec<f64> = product
        .bundles
        .iter()
        .map(|&b| match scenario {
            ConsiderationScenario::Worst => cp.get(b),
            ConsiderationScenario::Full => 1.0,
            ConsiderationScenario::Middle => {
                let (p1, p2) = match rule {
                    MiddleRule::AtLeastOne => (cp.collision_marginal(b.collision), cp.comprehensive_marginal(b.comprehensive)),
                    MiddleRule::Sum => (
                        (0..cp.n_comprehensive).map(|j| cp.get(Bundle::new(b.collision, j))).sum(),
                        (0..cp.n_collision).map(|i| cp.get(Bundle::new(i, b.comprehensive))).sum(),
                    ),
                };
                (p1 + p2).min(1.0)
            }
        })
        .collect();
    phi[0] = 1.0;
    phi
}

fn bundle_value(hm: &HouseholdMenu, j: usize, ptype: PreferenceType, zeta: f64, mode: ValuationMode) -> f64 {
    let b = hm.bundle_at(j);
    match (mode, ptype) {
        (ValuationMode::Npv, PreferenceType::Dt) => {
            -hm.total_premium(j) - hm.mu[0] * hm.deductibles[0][b.collision] - hm.mu[1] * hm.deductibles[1][b.comprehensive]
        }
        _ => hm.bundle_ce(b, ptype, zeta),
    }
}

/// Integrates `f(interval, zeta)` against the coefficient distribution over
/// the intervals delimited by `cuts`. Node weights inside an interval are
/// rescaled to its exact probability mass.
fn integrate_intervals<F>(cuts: &[f64], dist: &ScaledBeta, rule: &QuadratureRule, mut f: F) -> f64
where
    F: FnMut(usize, f64) -> f64,
{
    let upper = dist.upper;
    let mut total = 0.0;
    let mut f_lo = 0.0;
    for k in 0..=cuts.len() {
        let lo = if k == 0 { 0.0 } else { cuts[k - 1] };
        let hi = if k == cuts.len() { upper } else { cuts[k] };
        let f_hi = if k == cuts.len() { 1.0 } else { dist.cdf(hi) };
        let mass = f_hi - f_lo;
        f_lo = f_hi;
        if mass <= 0.0 {
            continue;
        }
        let nodes: Vec<(f64, f64)> = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| {
                let z = lo + (hi - lo) * x;
                (z, w * dist.pdf(z))
            })
            .collect();
        let norm: f64 = nodes.iter().map(|n| n.1).sum();
        if norm > 0.0 && norm.is_finite() {
            total += mass * nodes.iter().map(|&(z, w)| w / norm * f(k, z)).sum::<f64>();
        } else {
            total += mass * f(k, 0.5 * (lo + hi));
        }
    }
    total
}

fn merge_cuts(mut a: Vec<f64>, b: Vec<f64>) -> Vec<f64> {
    a.extend(b);
    a.sort_by(f64::total_cmp);
    a.dedup();
    a
}

fn midpoint(cuts: &[f64], k: usize, upper: f64) -> f64 {
    let lo = if k == 0 { 0.0 } else { cuts[k - 1] };
    let hi = if k == cuts.len() { upper } else { cuts[k] };
    0.5 * (lo + hi)
}

/// Expected gain from full consideration: value of the first-best bundle
/// minus the expected value of the bundle chosen under limited
/// consideration, integrated over types and coefficients.
pub fn full_consideration_gain(hh: &Household, mp: &ModelParams, opts: &WelfareOptions) -> Result<f64> {
    let hm = HouseholdMenu::for_household(&mp.menu, hh)?;
    let rule = opts.rule()?;
    let mut total = 0.0;
    for ptype in PreferenceType::ALL {
        let w = mp.preferences.weight(ptype);
        if w == 0.0 {
            continue;
        }
        let dist = mp.preferences.distribution(ptype);
        let cuts = cutpoints(&hm, ptype, None, opts.partition());
        let upper = ptype.support_upper();
        let info: Vec<(usize, Vec<f64>)> = (0..=cuts.len())
            .map(|k| {
                let order = ranking_at(&hm, ptype, midpoint(&cuts, k, upper));
                (order[0], arc_probs_from_ranking(&order, &mp.consideration.phi))
            })
            .collect();
        total += w * integrate_intervals(&cuts, &dist, &rule, |k, z| {
            let (best, probs) = &info[k];
            let chosen: f64 = probs
                .iter()
                .enumerate()
                .filter(|(_, p)| **p > 0.0)
                .map(|(j, p)| p * bundle_value(&hm, j, ptype, z, opts.valuation))
                .sum();
            bundle_value(&hm, *best, ptype, z, opts.valuation) - chosen
        });
    }
    Ok(total)
}

/// Expected value change from replacing the bundle with the combined product,
/// for each requested scenario.
pub fn bundled_counterfactuals(
    hh: &Household,
    mp: &ModelParams,
    scenarios: &[ConsiderationScenario],
    opts: &WelfareOptions,
) -> Result<Vec<f64>> {
    Ok(bundled_detail(hh, mp, scenarios, opts)?.0)
}

/// Expected value change for one scenario.
pub fn bundled_counterfactual(
    hh: &Household,
    mp: &ModelParams,
    scenario: ConsiderationScenario,
    opts: &WelfareOptions,
) -> Result<f64> {
    Ok(bundled_counterfactuals(hh, mp, &[scenario], opts)?[0])
}

/// Upper bound on the EU part of the full-consideration change that comes
/// from dropping the double-claim event when forming `mu_auto`.
///
/// For each deductible, the product's risk cost is below the bundle `(d, d)`
/// risk cost by `ln(1 + a b / (1 + a + b)) / nu` with
/// `a = mu_I (e^{nu d} - 1)` and `b = mu_II (e^{nu d} - 1)`, so the best
/// product can exceed the best bundle by at most the largest such gap.
pub fn eu_bundling_bound(hh: &Household, mp: &ModelParams, opts: &WelfareOptions) -> Result<f64> {
    Ok(bundled_detail(hh, mp, &[ConsiderationScenario::Full], opts)?.1)
}

fn eu_gap(product: &AutoProduct, mu: [f64; 2], nu: f64) -> f64 {
    product
        .deductibles
        .iter()
        .map(|&d| {
            if nu.abs() < 1e-9 {
                return mu[0] * mu[1] * nu * d * d;
            }
            let e = (nu * d).exp_m1();
            let (a, b) = (mu[0] * e, mu[1] * e);
            (a * b / (1.0 + a + b)).ln_1p() / nu
        })
        .fold(0.0, f64::max)
}

fn bundled_detail(
    hh: &Household,
    mp: &ModelParams,
    scenarios: &[ConsiderationScenario],
    opts: &WelfareOptions,
) -> Result<(Vec<f64>, f64)> {
    let hm = HouseholdMenu::for_household(&mp.menu, hh)?;
    let product = AutoProduct::new(&mp.menu, &hm)?;
    let rule = opts.rule()?;
    let full_bundles = vec![1.0; hm.n_bundles()];
    let status_phi = match opts.baseline {
        Baseline::Limited => &mp.consideration.phi,
        Baseline::Full => &full_bundles,
    };
    let phis: Vec<Vec<f64>> = scenarios
        .iter()
        .map(|&s| scenario_phi(&mp.consideration, &product, s, opts.middle_rule))
        .collect();
    let mut out = vec![0.0; scenarios.len()];
    let mut bound = 0.0;
    for ptype in PreferenceType::ALL {
        let w = mp.preferences.weight(ptype);
        if w == 0.0 {
            continue;
        }
        let dist = mp.preferences.distribution(ptype);
        let upper = ptype.support_upper();
        let cuts = merge_cuts(cutpoints(&hm, ptype, None, opts.partition()), product.cutpoints(ptype));
        let info: Vec<(Vec<f64>, Vec<Vec<f64>>)> = (0..=cuts.len())
            .map(|k| {
                let z = midpoint(&cuts, k, upper);
                let status = arc_probs_from_ranking(&ranking_at(&hm, ptype, z), status_phi);
                let porder = product.ranking(ptype, z);
                (status, phis.iter().map(|phi| arc_probs_from_ranking(&porder, phi)).collect())
            })
            .collect();
        for (s, o) in out.iter_mut().enumerate() {
            *o += w * integrate_intervals(&cuts, &dist, &rule, |k, z| {
                let (status, after) = &info[k];
                let before: f64 = status
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| **p > 0.0)
                    .map(|(j, p)| p * bundle_value(&hm, j, ptype, z, opts.valuation))
                    .sum();
                let now: f64 = after[s]
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| **p > 0.0)
                    .map(|(k, p)| p * product.value(k, ptype, z, opts.valuation))
                    .sum();
                now - before
            });
        }
        if ptype == PreferenceType::Eu {
            bound = w * integrate_intervals(&cuts, &dist, &rule, |_, z| eu_gap(&product, hm.mu, z));
        }
    }
    Ok((out, bound))
}

/// Mean and quartiles of a welfare measure across households.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelfareSummary {
    pub measure: String,
    pub mean: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    /// Mean as a percentage of the average cheapest-bundle premium.
    pub pct_of_reference_price: f64,
}

/// Welfare measures for one household.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseholdWelfare {
    pub household_id: u64,
    pub full_consideration_gain: f64,
    pub bundled_worst: f64,
    pub bundled_middle: f64,
    pub bundled_full: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelfareReport {
    pub options: WelfareOptions,
    pub reference_price: f64,
    pub summaries: Vec<WelfareSummary>,
    pub households: Vec<HouseholdWelfare>,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = p * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let t = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - t) + sorted[i + 1] * t
    } else {
        sorted[i]
    }
}

fn summarize(measure: &str, values: &[f64], reference_price: f64) -> WelfareSummary {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mean = v.iter().sum::<f64>() / v.len().max(1) as f64;
    WelfareSummary {
        measure: measure.to_string(),
        mean,
        q25: quantile(&v, 0.25),
        median: quantile(&v, 0.5),
        q75: quantile(&v, 0.75),
        pct_of_reference_price: 100.0 * mean / reference_price,
    }
}

/// Both welfare exercises for every household, with summaries.
pub fn welfare_report(data: &[Household], mp: &ModelParams, opts: &WelfareOptions) -> Result<WelfareReport> {
    mp.validate()?;
    let households: Vec<HouseholdWelfare> = data
        .par_iter()
        .map(|hh| {
            let gain = full_consideration_gain(hh, mp, opts)?;
            let b = bundled_counterfactuals(hh, mp, &ConsiderationScenario::ALL, opts)?;
            Ok(HouseholdWelfare {
                household_id: hh.id,
                full_consideration_gain: gain,
                bundled_worst: b[0],
                bundled_middle: b[1],
                bundled_full: b[2],
            })
        })
        .collect::<Result<_>>()?;
    let reference_price = data
        .iter()
        .map(|h| HouseholdMenu::for_household(&mp.menu, h).map(|hm| hm.total_premium(0)))
        .sum::<Result<f64>>()?
        / data.len().max(1) as f64;
    let col = |f: fn(&HouseholdWelfare) -> f64| households.iter().map(f).collect::<Vec<_>>();
    let summaries = vec![
        summarize("full_consideration", &col(|h| h.full_consideration_gain), reference_price),
        summarize("bundled_worst", &col(|h| h.bundled_worst), reference_price),
        summarize("bundled_middle", &col(|h| h.bundled_middle), reference_price),
        summarize("bundled_full", &col(|h| h.bundled_full), reference_price),
    ];
    Ok(WelfareReport {
        options: *opts,
        reference_price,
        summaries,
        households,
    })
}

/// Excess willingness to pay: mean and quartiles by type and for the whole
/// population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WtpRow {
    pub group: String,
    pub mean: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
}

fn type_wtp_mean(prefs: &PreferenceParams, ptype: PreferenceType) -> f64 {
    let dist = prefs.distribution(ptype);
    let rule = QuadratureRule::gauss_legendre(8).expect("8 nodes");
    let panels = 64;
    let h = ptype.support_upper() / panels as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..panels {
        let lo = i as f64 * h;
        num += rule.integrate(lo, lo + h, |z| dist.pdf(z) * excess_wtp(ptype, z));
        den += rule.integrate(lo, lo + h, |z| dist.pdf(z));
    }
    num / den
}

/// Excess WTP quantile for one type. EU WTP rises with `nu`; DT WTP falls
/// with `omega` because 0.1 is below `1/e`.
fn type_wtp_quantile(prefs: &PreferenceParams, ptype: PreferenceType, p: f64) -> f64 {
    let dist = prefs.distribution(ptype);
    match ptype {
        PreferenceType::Eu => excess_wtp(ptype, dist.quantile(p)),
        PreferenceType::Dt => excess_wtp(ptype, dist.quantile(1.0 - p)),
    }
}

fn type_wtp_cdf(prefs: &PreferenceParams, ptype: PreferenceType, w: f64) -> f64 {
    let dist = prefs.distribution(ptype);
    let upper = ptype.support_upper();
    let (lo, hi) = (excess_wtp(ptype, 0.0), excess_wtp(ptype, upper));
    let (wmin, wmax) = (lo.min(hi), lo.max(hi));
    if w < wmin {
        return 0.0;
    }
    if w >= wmax {
        return 1.0;
    }
    let f = |z: f64| excess_wtp(ptype, z) - w;
    let z = illinois(f, 0.0, upper, f(0.0), f(upper));
    match ptype {
        PreferenceType::Eu => dist.cdf(z),
        PreferenceType::Dt => 1.0 - dist.cdf(z),
    }
}

/// Excess WTP table with rows EU, DT and all households.
pub fn wtp_table(prefs: &PreferenceParams) -> Vec<WtpRow> {
    let mut rows: Vec<WtpRow> = PreferenceType::ALL
        .iter()
        .map(|&t| WtpRow {
            group: t.label().to_string(),
            mean: type_wtp_mean(prefs, t),
            q25: type_wtp_quantile(prefs, t, 0.25),
            median: type_wtp_quantile(prefs, t, 0.5),
            q75: type_wtp_quantile(prefs, t, 0.75),
        })
        .collect();
    let a = prefs.alpha;
    let mixture_quantile = |p: f64| {
        let cdf = |w: f64| a * type_wtp_cdf(prefs, PreferenceType::Eu, w) + (1.0 - a) * type_wtp_cdf(prefs, PreferenceType::Dt, w);
        let (mut lo, mut hi) = (-1.0, WTP_LOSS);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    rows.push(WtpRow {
        group: "All".to_string(),
        mean: a * rows[0].mean + (1.0 - a) * rows[1].mean,
        q25: mixture_quantile(0.25),
        median: mixture_quantile(0.5),
        q75: mixture_quantile(0.75),
    });
    rows
}

/// `Omega(mu_I) + Omega(mu_II) - Omega(mu_I + mu_II)`: positive when the
/// combined product reduces overweighting.
pub fn prelec_subadditivity_gap(mu: [f64; 2], omega: f64) -> Result<f64> {
    let total = mu[0] + mu[1];
    if !(total < 1.0) {
        return Err(Error::ProbabilityDomain(total));
    }
    Ok(crate::preferences::prelec(mu[0], omega)? + crate::preferences::prelec(mu[1], omega)?
        - crate::preferences::prelec(total, omega)?)
}

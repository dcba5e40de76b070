//! Indifference cutoffs between alternatives and bundles, the indifference
//! locus of the cheapest bundle, and single-crossing checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::household::Household;
use crate::menu::{Bundle, Context, ContextMenu, HouseholdMenu, MenuConfig};
use crate::preferences::{self, PreferenceType};
use crate::roots::{expand_bracket, illinois};

/// Cutoff searches for EU stay inside `[-EU_RANGE, EU_RANGE]`.
pub const EU_RANGE: f64 = 10.0;

/// Cutoff searches for DT stay inside `[-DT_RANGE, DT_RANGE]`.
pub const DT_RANGE: f64 = 50.0;

/// Largest base price returned by locus searches.
pub const MAX_BASE_PRICE: f64 = 1e5;

/// Cells in the scan used to detect multiple crossings.
const SCAN_CELLS: usize = 2048;

fn evaluation_range(ptype: PreferenceType) -> f64 {
    match ptype {
        PreferenceType::Eu => EU_RANGE,
        PreferenceType::Dt => DT_RANGE,
    }
}

/// Sign of the slope in the coefficient of `CE(more coverage) - CE(less
/// coverage)` within a context with claim probability `mu`.
///
/// Positive for EU. For DT it follows the Prelec slope: negative when
/// `mu < 1/e`.
pub fn coverage_direction(ptype: PreferenceType, mu: f64) -> f64 {
    match ptype {
        PreferenceType::Eu => 1.0,
        PreferenceType::Dt => preferences::prelec_slope_sign(mu),
    }
}

/// Slope sign of `CE(b) - CE(a)` for two alternatives of one context.
pub(crate) fn alternative_direction(hm: &HouseholdMenu, c: usize, a: usize, b: usize, ptype: PreferenceType) -> f64 {
    if a == b {
        return 0.0;
    }
    let sign = if hm.deductibles[c][b] < hm.deductibles[c][a] {
        1.0
    } else {
        -1.0
    };
    sign * coverage_direction(ptype, hm.mu[c])
}

/// Coefficient at which alternative `k` (lower deductible) and alternative
/// `ell` (higher deductible) of one context are indifferent.
pub fn within_context_cutoff(
    menu: &MenuConfig,
    ctx: Context,
    ell: usize,
    k: usize,
    base_price: f64,
    claim_prob: f64,
    ptype: PreferenceType,
) -> Result<f64> {
    let cm = menu.context(ctx);
    context_cutoff(cm, ell, k, base_price, claim_prob, ptype)
}

pub(crate) fn context_cutoff(
    cm: &ContextMenu,
    ell: usize,
    k: usize,
    base_price: f64,
    claim_prob: f64,
    ptype: PreferenceType,
) -> Result<f64> {
    if ell >= k || k >= cm.len() {
        return Err(Error::invalid(
            "alternative pair",
            format!("need ell < k < {}, got ({ell}, {k})", cm.len()),
        ));
    }
    if !(claim_prob > 0.0 && claim_prob < 1.0) {
        return Err(Error::ProbabilityDomain(claim_prob));
    }
    let (d_ell, d_k) = (cm.deductibles[ell], cm.deductibles[k]);
    if d_ell <= d_k {
        return Err(Error::invalid("alternative pair", "deductibles must strictly decrease"));
    }
    let gap = cm.premium(k, base_price) - cm.premium(ell, base_price);
    match ptype {
        PreferenceType::Dt => {
            let r = gap / (d_ell - d_k);
            let loglog_mu = (-claim_prob.ln()).ln();
            if !(r > 0.0 && r < 1.0) || loglog_mu == 0.0 {
                return Err(Error::NoCrossing);
            }
            Ok((-r.ln()).ln() / loglog_mu)
        }
        PreferenceType::Eu => {
            let diff = |nu: f64| {
                -gap + preferences::risk_cost_eu(nu, d_ell, claim_prob)
                    - preferences::risk_cost_eu(nu, d_k, claim_prob)
            };
            let (lo, hi, flo, fhi) =
                expand_bracket(diff, 0.0, preferences::NU_MAX, EU_RANGE).ok_or(Error::NoCrossing)?;
            Ok(illinois(diff, lo, hi, flo, fhi))
        }
    }
}

/// Coefficient at which bundles `a` and `b` are indifferent for a household.
pub fn bundle_cutoff(
    menu: &MenuConfig,
    hh: &Household,
    a: Bundle,
    b: Bundle,
    ptype: PreferenceType,
) -> Result<f64> {
    let hm = HouseholdMenu::for_household(menu, hh)?;
    let (n1, n2) = menu.shape();
    for x in [a, b] {
        if x.collision >= n1 || x.comprehensive >= n2 {
            return Err(Error::invalid("bundle", format!("{x:?} outside a {n1}x{n2} grid")));
        }
    }
    bundle_cutoff_in(&hm, hm.bundle_index(a), hm.bundle_index(b), ptype)
}

/// [`bundle_cutoff`] on a realized menu with flat bundle indices.
///
/// When both context components move in the same direction the difference is
/// monotone and its unique root is bracketed outward from the support. Other
/// pairs are scanned over the support extended by 20% on each side, and
/// [`Error::MultipleCrossings`] is returned when the scan finds several roots.
pub fn bundle_cutoff_in(hm: &HouseholdMenu, a: usize, b: usize, ptype: PreferenceType) -> Result<f64> {
    if a == b {
        return Err(Error::invalid("bundle pair", "bundles must differ"));
    }
    let (ba, bb) = (hm.bundle_at(a), hm.bundle_at(b));
    let dir1 = alternative_direction(hm, 0, ba.collision, bb.collision, ptype);
    let dir2 = alternative_direction(hm, 1, ba.comprehensive, bb.comprehensive, ptype);
    let diff = |z: f64| hm.bundle_ce(bb, ptype, z) - hm.bundle_ce(ba, ptype, z);
    let upper = ptype.support_upper();
    if dir1 * dir2 >= 0.0 {
        let (lo, hi, flo, fhi) =
            expand_bracket(diff, 0.0, upper, evaluation_range(ptype)).ok_or(Error::NoCrossing)?;
        if flo == 0.0 && fhi == 0.0 {
            return Err(Error::NoCrossing);
        }
        return Ok(illinois(diff, lo, hi, flo, fhi));
    }
    let lo = -0.2 * upper;
    let step = 1.4 * upper / SCAN_CELLS as f64;
    let mut roots = Vec::new();
    let mut z0 = lo;
    let mut f0 = diff(z0);
    for i in 1..=SCAN_CELLS {
        let z1 = lo + step * i as f64;
        let f1 = diff(z1);
        if f0 == 0.0 {
            roots.push(z0);
        } else if f0 * f1 < 0.0 {
            roots.push(illinois(diff, z0, z1, f0, f1));
        }
        z0 = z1;
        f0 = f1;
    }
    match roots.len() {
        0 => Err(Error::NoCrossing),
        1 => Ok(roots[0]),
        _ => Err(Error::MultipleCrossings { roots }),
    }
}

/// Corner of the bundle grid whose indifference locus is traced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Corner {
    /// Highest deductible in both contexts.
    Cheapest,
    /// Lowest deductible in both contexts.
    Expensive,
}

impl Corner {
    /// The corner bundle and its two single-step neighbours, first the one
    /// that differs in collision, then the one that differs in comprehensive,
    /// then the diagonal neighbour.
    pub fn neighbourhood(self, n: (usize, usize)) -> [Bundle; 4] {
        match self {
            Corner::Cheapest => [
                Bundle::new(0, 0),
                Bundle::new(1, 0),
                Bundle::new(0, 1),
                Bundle::new(1, 1),
            ],
            Corner::Expensive => {
                let (i, j) = (n.0 - 1, n.1 - 1);
                [
                    Bundle::new(i, j),
                    Bundle::new(i - 1, j),
                    Bundle::new(i, j - 1),
                    Bundle::new(i - 1, j - 1),
                ]
            }
        }
    }

    /// Higher- and lower-deductible alternatives bordering the corner in a
    /// context with `m` alternatives.
    fn pair(self, m: usize) -> (usize, usize) {
        match self {
            Corner::Cheapest => (0, 1),
            Corner::Expensive => (m - 2, m - 1),
        }
    }
}

/// Base prices at which a coefficient is exactly indifferent between the
/// corner bundle and both of its single-step neighbours.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndifferenceLocusPoint {
    pub ptype: PreferenceType,
    pub zeta: f64,
    pub corner: Corner,
    pub base_prices: [f64; 2],
}

/// Locus of the cheapest bundle at coefficient `zeta`.
pub fn indifference_locus(
    zeta: f64,
    ptype: PreferenceType,
    claim_probs: [f64; 2],
    menu: &MenuConfig,
) -> Result<IndifferenceLocusPoint> {
    locus_point(menu, Corner::Cheapest, ptype, zeta, claim_probs)
}

/// Locus point for either corner. Premiums are affine in the base price, so
/// each coordinate solves `g_lo x + c_lo(zeta) = g_hi x + c_hi(zeta)`.
pub fn locus_point(
    menu: &MenuConfig,
    corner: Corner,
    ptype: PreferenceType,
    zeta: f64,
    claim_probs: [f64; 2],
) -> Result<IndifferenceLocusPoint> {
    let mut base_prices = [0.0; 2];
    for ctx in Context::ALL {
        let c = ctx.index();
        let cm = menu.context(ctx);
        if cm.len() < 2 {
            return Err(Error::invalid("menu", "locus needs two alternatives per context"));
        }
        let mu = claim_probs[c];
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::ProbabilityDomain(mu));
        }
        let (lo, hi) = corner.pair(cm.len());
        let cost = |alt: usize| match ptype {
            PreferenceType::Eu => preferences::risk_cost_eu(zeta, cm.deductibles[alt], mu),
            PreferenceType::Dt => preferences::prelec_unchecked(mu, zeta) * cm.deductibles[alt],
        };
        let x = (cost(lo) - cost(hi)) / (cm.factors[hi] - cm.factors[lo]);
        if !(x > 0.0 && x <= MAX_BASE_PRICE) {
            return Err(Error::OutOfRange(zeta));
        }
        base_prices[c] = x;
    }
    Ok(IndifferenceLocusPoint {
        ptype,
        zeta,
        corner,
        base_prices,
    })
}

/// A pair of alternatives whose certainty-equivalent difference changes sign
/// more than once along the coefficient grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScpViolation {
    pub ell: usize,
    pub k: usize,
    pub sign_changes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScpReport {
    pub pairs_checked: usize,
    pub violations: Vec<ScpViolation>,
}

impl ScpReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Counts sign changes of `CE(ell) - CE(k)` along `grid` for every pair of
/// alternatives in a context menu.
pub fn scp_verify(
    cm: &ContextMenu,
    base_price: f64,
    claim_prob: f64,
    ptype: PreferenceType,
    grid: &[f64],
) -> Result<ScpReport> {
    if grid.len() < 1000 {
        return Err(Error::invalid("grid", format!("{} points, need at least 1000", grid.len())));
    }
    if cm.deductibles.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("menu", "deductibles must strictly decrease"));
    }
    let m = cm.len();
    let lotteries = (0..m)
        .map(|l| cm.lottery(l, base_price, claim_prob))
        .collect::<Result<Vec<_>>>()?;
    let ces: Vec<Vec<f64>> = grid
        .iter()
        .map(|&z| lotteries.iter().map(|l| preferences::ce(ptype, l, z)).collect())
        .collect();
    let mut report = ScpReport {
        pairs_checked: 0,
        violations: Vec::new(),
    };
    for ell in 0..m {
        for k in ell + 1..m {
            report.pairs_checked += 1;
            let mut last = 0.0f64;
            let mut changes = 0;
            for row in &ces {
                let s = (row[ell] - row[k]).signum();
                if row[ell] == row[k] {
                    continue;
                }
                if last != 0.0 && s != last {
                    changes += 1;
                }
                last = s;
            }
            if changes > 1 {
                report.violations.push(ScpViolation {
                    ell,
                    k,
                    sign_changes: changes,
                });
            }
        }
    }
    Ok(report)
}

/// Whether each triplet `{first, k, k+1}` of a context menu has every member
/// strictly preferred by some coefficient value. Equivalent to strictly
/// ordered cutoffs against the first alternative, oriented so that more
/// coverage is bought further along the ordering.
pub fn triplet_check(
    menu: &MenuConfig,
    ctx: Context,
    base_price: f64,
    claim_prob: f64,
    ptype: PreferenceType,
) -> bool {
    let cm = menu.context(ctx);
    if cm.len() <= 2 {
        return true;
    }
    let orientation = coverage_direction(ptype, claim_prob);
    if orientation == 0.0 {
        return false;
    }
    let mut previous = f64::NEG_INFINITY;
    for k in 1..cm.len() {
        match context_cutoff(cm, 0, k, base_price, claim_prob, ptype) {
            Ok(v) => {
                let oriented = orientation * v;
                if oriented <= previous {
                    return false;
                }
                previous = oriented;
            }
            Err(_) => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn menu() -> MenuConfig {
        MenuConfig::default_menu()
    }

    /// Plain bisection on the certainty-equivalent difference.
    fn bisect_oracle(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn dt_cutoff_closed_form() {
        let v = within_context_cutoff(&menu(), Context::Collision, 0, 1, 187.0, 0.081, PreferenceType::Dt)
            .unwrap();
        assert!((v - 0.9842).abs() < 1e-4);
        let omega = preferences::prelec(0.081, v).unwrap();
        assert_relative_eq!(omega * 500.0, 42.0, epsilon = 1e-9);
    }

    #[test]
    fn eu_cutoff_matches_bisection() {
        let m = menu();
        let v = within_context_cutoff(&m, Context::Collision, 0, 1, 187.0, 0.081, PreferenceType::Eu)
            .unwrap();
        let cm = &m.collision;
        let f = |nu: f64| {
            preferences::ce_eu(&cm.lottery(1, 187.0, 0.081).unwrap(), nu)
                - preferences::ce_eu(&cm.lottery(0, 187.0, 0.081).unwrap(), nu)
        };
        assert_relative_eq!(v, bisect_oracle(f, 0.0, 0.025), epsilon = 1e-12);
        assert!(v > 0.0 && v < 0.025);
    }

    #[test]
    fn no_crossing_when_price_gap_exceeds_deductible_gap() {
        let mut m = menu();
        m.collision.factors[1] = 5.0;
        m.collision.factors[2] = 6.0;
        m.collision.factors[3] = 7.0;
        m.collision.factors[4] = 8.0;
        for ptype in PreferenceType::ALL {
            let r = within_context_cutoff(&m, Context::Collision, 0, 1, 187.0, 0.081, ptype);
            assert!(matches!(r, Err(Error::NoCrossing)), "{ptype:?}");
        }
    }

    #[test]
    fn bundle_cutoff_reduces_to_context_cutoff() {
        let m = menu();
        let hh = Household::new(0, 187.0, 117.0, 0.081, 0.023);
        for ptype in PreferenceType::ALL {
            let a = bundle_cutoff(&m, &hh, Bundle::new(0, 0), Bundle::new(1, 0), ptype).unwrap();
            let w = within_context_cutoff(&m, Context::Collision, 0, 1, 187.0, 0.081, ptype).unwrap();
            assert_relative_eq!(a, w, epsilon = 1e-10);
        }
    }

    #[test]
    fn bundle_cutoff_is_symmetric_and_indifferent() {
        let m = menu();
        let hh = Household::new(0, 187.0, 117.0, 0.081, 0.023);
        let hm = HouseholdMenu::for_household(&m, &hh).unwrap();
        for ptype in PreferenceType::ALL {
            for (a, b) in [(0usize, 7usize), (0, 29), (6, 13), (3, 8)] {
                let ab = bundle_cutoff_in(&hm, a, b, ptype);
                let ba = bundle_cutoff_in(&hm, b, a, ptype);
                match (ab, ba) {
                    (Ok(x), Ok(y)) => {
                        assert_eq!(x, y);
                        let gap = hm.bundle_ce(hm.bundle_at(a), ptype, x)
                            - hm.bundle_ce(hm.bundle_at(b), ptype, x);
                        assert!(gap.abs() < 1e-8);
                    }
                    (Err(_), Err(_)) => {}
                    other => panic!("asymmetric result {other:?}"),
                }
            }
        }
    }

    #[test]
    fn locus_reproduces_coefficient() {
        let m = menu();
        for (ptype, zeta) in [(PreferenceType::Eu, 0.003), (PreferenceType::Dt, 0.6)] {
            let p = indifference_locus(zeta, ptype, [0.081, 0.023], &m).unwrap();
            let v1 = within_context_cutoff(&m, Context::Collision, 0, 1, p.base_prices[0], 0.081, ptype).unwrap();
            let v2 = within_context_cutoff(&m, Context::Comprehensive, 0, 1, p.base_prices[1], 0.023, ptype)
                .unwrap();
            assert!((v1 - zeta).abs() < 1e-8 && (v2 - zeta).abs() < 1e-8);
        }
    }

    #[test]
    fn loci_meet_at_fair_prices() {
        let m = menu();
        let mu = [0.081, 0.023];
        let eu = indifference_locus(0.0, PreferenceType::Eu, mu, &m).unwrap();
        let dt = indifference_locus(1.0, PreferenceType::Dt, mu, &m).unwrap();
        for c in 0..2 {
            assert_relative_eq!(eu.base_prices[c], dt.base_prices[c], max_relative = 1e-12);
        }
        let fair = 0.081 * 500.0 / (m.collision.factors[1] - m.collision.factors[0]);
        assert_relative_eq!(eu.base_prices[0], fair, max_relative = 1e-12);
    }

    #[test]
    fn locus_monotonicity() {
        let m = menu();
        let mu = [0.081, 0.023];
        let mut last = [0.0; 2];
        for i in 1..20 {
            let p = indifference_locus(0.001 * i as f64, PreferenceType::Eu, mu, &m).unwrap();
            assert!(p.base_prices[0] > last[0] && p.base_prices[1] > last[1]);
            last = p.base_prices;
        }
        let mut last = [f64::INFINITY; 2];
        for i in 1..20 {
            let p = indifference_locus(0.05 * i as f64, PreferenceType::Dt, mu, &m).unwrap();
            assert!(p.base_prices[0] < last[0] && p.base_prices[1] < last[1]);
            last = p.base_prices;
        }
    }

    #[test]
    fn scp_holds_for_default_menu() {
        let m = menu();
        for ptype in PreferenceType::ALL {
            let upper = ptype.support_upper();
            let grid: Vec<f64> = (0..2000).map(|i| -0.2 * upper + 1.4 * upper * i as f64 / 1999.0).collect();
            let r = scp_verify(&m.collision, 187.0, 0.081, ptype, &grid).unwrap();
            assert!(r.holds());
            assert_eq!(r.pairs_checked, 10);
        }
        let mut bad = m.collision.clone();
        bad.deductibles[1] = bad.deductibles[0];
        let grid: Vec<f64> = (0..1000).map(|i| i as f64 * 1e-5).collect();
        assert!(scp_verify(&bad, 187.0, 0.081, PreferenceType::Eu, &grid).is_err());
        assert!(scp_verify(&m.collision, 187.0, 0.081, PreferenceType::Eu, &grid[..10]).is_err());
    }

    #[test]
    fn triplet_condition() {
        let m = menu();
        for ptype in PreferenceType::ALL {
            assert!(triplet_check(&m, Context::Collision, 187.0, 0.081, ptype));
            assert!(triplet_check(&m, Context::Comprehensive, 117.0, 0.023, ptype));
        }
        let bad = MenuConfig::with_overpriced_collision_200();
        for ptype in PreferenceType::ALL {
            assert!(!triplet_check(&bad, Context::Collision, 187.0, 0.081, ptype));
        }
        let mut two = m.clone();
        two.collision.deductibles.truncate(2);
        two.collision.factors.truncate(2);
        assert!(triplet_check(&two, Context::Collision, 187.0, 0.081, PreferenceType::Eu));
    }

    #[test]
    fn proportional_pricing_fails_triplets() {
        // Premiums proportional to expected covered loss: every cutoff
        // against the first alternative coincides.
        let mu: f64 = 0.08;
        let d = [1000.0, 500.0, 250.0];
        let cm = ContextMenu {
            deductibles: d.to_vec(),
            factors: d.iter().map(|x| 1.0 + 1.2 * mu * (1000.0 - x) / 100.0).collect(),
            fee: 1.0,
        };
        let m = MenuConfig {
            collision: cm.clone(),
            comprehensive: cm,
        };
        assert!(!triplet_check(&m, Context::Collision, 100.0, mu, PreferenceType::Dt));
    }

    proptest! {
        #[test]
        fn cutoff_is_indifference_point(x in 50.0f64..600.0, mu in 0.01f64..0.3, k in 1usize..5) {
            let m = menu();
            let cm = &m.collision;
            for ptype in PreferenceType::ALL {
                if let Ok(v) = within_context_cutoff(&m, Context::Collision, 0, k, x, mu, ptype) {
                    let a = preferences::ce(ptype, &cm.lottery(0, x, mu).unwrap(), v);
                    let b = preferences::ce(ptype, &cm.lottery(k, x, mu).unwrap(), v);
                    prop_assert!((a - b).abs() < 1e-8);
                }
            }
        }
    }
}

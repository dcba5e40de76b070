//! Deductible menus, bundles and per-household realized prices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::household::Household;
use crate::preferences::{self, Lottery, PreferenceType};

/// Largest grid supported by the 64-bit bundle sets.
pub const MAX_BUNDLES: usize = 64;

/// Insurance context. Collision is context I, comprehensive context II.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Context {
    Collision,
    Comprehensive,
}

impl Context {
    pub const ALL: [Context; 2] = [Context::Collision, Context::Comprehensive];

    pub fn index(self) -> usize {
        match self {
            Context::Collision => 0,
            Context::Comprehensive => 1,
        }
    }
}

/// Deductible menu of one context. Premium of alternative `l` at base price
/// `x` is `factors[l] * x + fee`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextMenu {
    /// Deductibles, strictly decreasing.
    pub deductibles: Vec<f64>,
    /// Pricing factors, strictly increasing.
    pub factors: Vec<f64>,
    /// Fixed fee added to every premium.
    pub fee: f64,
}

impl ContextMenu {
    pub fn len(&self) -> usize {
        self.deductibles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deductibles.is_empty()
    }

    pub fn premium(&self, alt: usize, base_price: f64) -> f64 {
        self.factors[alt] * base_price + self.fee
    }

    pub fn lottery(&self, alt: usize, base_price: f64, claim_prob: f64) -> Result<Lottery> {
        Lottery::new(self.premium(alt, base_price), self.deductibles[alt], claim_prob)
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.deductibles.len();
        if m == 0 || m > 8 {
            return Err(Error::invalid("menu", format!("{m} alternatives, expected 1 to 8")));
        }
        if self.factors.len() != m {
            return Err(Error::invalid(
                "menu",
                format!("{} factors for {m} deductibles", self.factors.len()),
            ));
        }
        if self.deductibles.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::invalid("menu", "deductibles must be positive"));
        }
        if self.factors.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::invalid("menu", "factors must be positive"));
        }
        if self.deductibles.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::invalid("menu", "deductibles must strictly decrease"));
        }
        if self.factors.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("menu", "factors must strictly increase"));
        }
        if !(self.fee.is_finite() && self.fee > 0.0) {
            return Err(Error::invalid("menu", "fee must be positive"));
        }
        Ok(())
    }
}

/// A bundle: one deductible alternative per context, indexed from the
/// highest deductible (index 0) downward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bundle {
    pub collision: usize,
    pub comprehensive: usize,
}

impl Bundle {
    pub const fn new(collision: usize, comprehensive: usize) -> Self {
        Bundle {
            collision,
            comprehensive,
        }
    }

    /// The cheapest bundle, highest deductible in both contexts.
    pub const CHEAPEST: Bundle = Bundle::new(0, 0);

    pub fn alt(&self, ctx: Context) -> usize {
        match ctx {
            Context::Collision => self.collision,
            Context::Comprehensive => self.comprehensive,
        }
    }
}

/// Menus of both contexts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MenuConfig {
    pub collision: ContextMenu,
    pub comprehensive: ContextMenu,
}

impl Default for MenuConfig {
    fn default() -> Self {
        MenuConfig::default_menu()
    }
}

impl MenuConfig {
    /// Calibrated default menu. At base prices (187, 117) moving from the
    /// $500 to the $250 deductible costs $56 and $31, and moving from $500 to
    /// $1000 saves $42 and $23.
    pub fn default_menu() -> Self {
        let c = 187.0;
        let k = 117.0;
        MenuConfig {
            collision: ContextMenu {
                deductibles: vec![1000.0, 500.0, 250.0, 200.0, 100.0],
                factors: vec![
                    1.0 - 42.0 / c,
                    1.0,
                    1.0 + 56.0 / c,
                    1.0 + 71.0 / c,
                    1.0 + 111.0 / c,
                ],
                fee: 2.0,
            },
            comprehensive: ContextMenu {
                deductibles: vec![1000.0, 500.0, 250.0, 200.0, 100.0, 50.0],
                factors: vec![
                    1.0 - 23.0 / k,
                    1.0,
                    1.0 + 31.0 / k,
                    1.0 + 39.0 / k,
                    1.0 + 59.0 / k,
                    1.0 + 72.0 / k,
                ],
                fee: 1.0,
            },
        }
    }

    /// Default menu with the $200 collision deductible overpriced: the step
    /// from $250 to $200 costs $60 and the step on to $100 only $5, so the
    /// $200 alternative is never strictly optimal under full consideration.
    pub fn with_overpriced_collision_200() -> Self {
        let mut menu = MenuConfig::default_menu();
        let c = 187.0;
        menu.collision.factors[3] = 1.0 + (56.0 + 60.0) / c;
        menu.collision.factors[4] = 1.0 + (56.0 + 65.0) / c;
        menu
    }

    pub fn context(&self, ctx: Context) -> &ContextMenu {
        match ctx {
            Context::Collision => &self.collision,
            Context::Comprehensive => &self.comprehensive,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.collision.validate()?;
        self.comprehensive.validate()?;
        if self.n_bundles() > MAX_BUNDLES {
            return Err(Error::invalid(
                "menu",
                format!("{} bundles exceed {MAX_BUNDLES}", self.n_bundles()),
            ));
        }
        Ok(())
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.collision.len(), self.comprehensive.len())
    }

    pub fn n_bundles(&self) -> usize {
        self.collision.len() * self.comprehensive.len()
    }

    /// Row-major index: rows are collision alternatives.
    pub fn bundle_index(&self, b: Bundle) -> usize {
        b.collision * self.comprehensive.len() + b.comprehensive
    }

    pub fn bundle_at(&self, index: usize) -> Bundle {
        let n2 = self.comprehensive.len();
        Bundle::new(index / n2, index % n2)
    }

    pub fn bundles(&self) -> impl Iterator<Item = Bundle> + '_ {
        (0..self.n_bundles()).map(|i| self.bundle_at(i))
    }

    /// Deductible pair of a bundle.
    pub fn deductibles(&self, b: Bundle) -> (f64, f64) {
        (
            self.collision.deductibles[b.collision],
            self.comprehensive.deductibles[b.comprehensive],
        )
    }

    /// Locates a bundle from its deductible amounts.
    pub fn find_bundle(&self, collision: f64, comprehensive: f64) -> Option<Bundle> {
        let i = self
            .collision
            .deductibles
            .iter()
            .position(|d| (d - collision).abs() < 1e-9)?;
        let j = self
            .comprehensive
            .deductibles
            .iter()
            .position(|d| (d - comprehensive).abs() < 1e-9)?;
        Some(Bundle::new(i, j))
    }
}

/// A household's realized menu: premiums, deductibles and claim
/// probabilities in both contexts.
#[derive(Debug, Clone)]
pub struct HouseholdMenu {
    pub(crate) n: [usize; 2],
    pub(crate) premiums: [Vec<f64>; 2],
    pub(crate) deductibles: [Vec<f64>; 2],
    pub(crate) factors: [Vec<f64>; 2],
    pub(crate) mu: [f64; 2],
    pub(crate) loglog_mu: [f64; 2],
    pub(crate) total_premium: Vec<f64>,
}

impl HouseholdMenu {
    pub fn new(menu: &MenuConfig, base_prices: [f64; 2], claim_probs: [f64; 2]) -> Result<Self> {
        for p in claim_probs {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::ProbabilityDomain(p));
            }
        }
        for x in base_prices {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::invalid("household", format!("base price {x} must be positive")));
            }
        }
        let ctxs = [&menu.collision, &menu.comprehensive];
        let premiums: [Vec<f64>; 2] = std::array::from_fn(|c| {
            (0..ctxs[c].len())
                .map(|l| ctxs[c].premium(l, base_prices[c]))
                .collect()
        });
        let n = [ctxs[0].len(), ctxs[1].len()];
        let mut total_premium = Vec::with_capacity(n[0] * n[1]);
        for i in 0..n[0] {
            for j in 0..n[1] {
                total_premium.push(premiums[0][i] + premiums[1][j]);
            }
        }
        Ok(HouseholdMenu {
            n,
            premiums,
            deductibles: [ctxs[0].deductibles.clone(), ctxs[1].deductibles.clone()],
            factors: [ctxs[0].factors.clone(), ctxs[1].factors.clone()],
            mu: claim_probs,
            loglog_mu: claim_probs.map(|p| (-p.ln()).ln()),
            total_premium,
        })
    }

    pub fn for_household(menu: &MenuConfig, hh: &Household) -> Result<Self> {
        HouseholdMenu::new(menu, hh.base_prices(), hh.claim_probs())
    }

    pub fn n_bundles(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn n_alternatives(&self, ctx: Context) -> usize {
        self.n[ctx.index()]
    }

    pub fn claim_prob(&self, ctx: Context) -> f64 {
        self.mu[ctx.index()]
    }

    pub fn premium(&self, ctx: Context, alt: usize) -> f64 {
        self.premiums[ctx.index()][alt]
    }

    pub fn deductible(&self, ctx: Context, alt: usize) -> f64 {
        self.deductibles[ctx.index()][alt]
    }

    pub fn factor(&self, ctx: Context, alt: usize) -> f64 {
        self.factors[ctx.index()][alt]
    }

    /// Total premium of a bundle by flat index.
    pub fn total_premium(&self, index: usize) -> f64 {
        self.total_premium[index]
    }

    pub fn bundle_at(&self, index: usize) -> Bundle {
        Bundle::new(index / self.n[1], index % self.n[1])
    }

    pub fn bundle_index(&self, b: Bundle) -> usize {
        b.collision * self.n[1] + b.comprehensive
    }

    /// Risk cost `c(zeta)` of one alternative; its certainty equivalent is
    /// `-premium - risk_cost`.
    #[inline]
    pub fn risk_cost(&self, c: usize, alt: usize, ptype: PreferenceType, zeta: f64) -> f64 {
        let d = self.deductibles[c][alt];
        match ptype {
            PreferenceType::Eu => preferences::risk_cost_eu(zeta, d, self.mu[c]),
            PreferenceType::Dt => preferences::prelec_from_loglog(self.loglog_mu[c], zeta) * d,
        }
    }

    /// Derivative of [`Self::risk_cost`] in the coefficient.
    pub fn risk_cost_dzeta(&self, c: usize, alt: usize, ptype: PreferenceType, zeta: f64) -> f64 {
        let d = self.deductibles[c][alt];
        match ptype {
            PreferenceType::Eu => preferences::risk_cost_eu_dnu(zeta, d, self.mu[c]),
            PreferenceType::Dt => {
                preferences::prelec_domega_from_loglog(self.loglog_mu[c], zeta) * d
            }
        }
    }

    /// Certainty equivalent of one alternative in one context.
    #[inline]
    pub fn context_ce(&self, ctx: Context, alt: usize, ptype: PreferenceType, zeta: f64) -> f64 {
        let c = ctx.index();
        -self.premiums[c][alt] - self.risk_cost(c, alt, ptype, zeta)
    }

    /// Certainty equivalents of every alternative in both contexts.
    pub fn context_ces(&self, ptype: PreferenceType, zeta: f64, out: &mut [Vec<f64>; 2]) {
        for c in 0..2 {
            out[c].clear();
            for alt in 0..self.n[c] {
                out[c].push(-self.premiums[c][alt] - self.risk_cost(c, alt, ptype, zeta));
            }
        }
    }

    /// Bundle certainty equivalent: sum of the context certainty equivalents.
    pub fn bundle_ce(&self, b: Bundle, ptype: PreferenceType, zeta: f64) -> f64 {
        self.context_ce(Context::Collision, b.collision, ptype, zeta)
            + self.context_ce(Context::Comprehensive, b.comprehensive, ptype, zeta)
    }

    /// Certainty equivalents of all bundles in row-major order.
    pub fn bundle_ces(&self, ptype: PreferenceType, zeta: f64, out: &mut Vec<f64>) {
        let mut ctx: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        self.context_ces(ptype, zeta, &mut ctx);
        out.clear();
        for i in 0..self.n[0] {
            for j in 0..self.n[1] {
                out.push(ctx[0][i] + ctx[1][j]);
            }
        }
    }

    /// Whether bundle `a` ranks above bundle `b` given their certainty
    /// equivalents. Exact ties go to the lower total premium, then the lower
    /// index.
    #[inline]
    pub fn ranks_above(&self, a: usize, ce_a: f64, b: usize, ce_b: f64) -> bool {
        if ce_a != ce_b {
            return ce_a > ce_b;
        }
        let (pa, pb) = (self.total_premium[a], self.total_premium[b]);
        if pa != pb {
            return pa < pb;
        }
        a < b
    }
}

/// Bundle certainty equivalent for a household, validating the bundle.
pub fn bundle_ce(
    b: Bundle,
    ptype: PreferenceType,
    zeta: f64,
    hh: &Household,
    menu: &MenuConfig,
) -> Result<f64> {
    let (n1, n2) = menu.shape();
    if b.collision >= n1 || b.comprehensive >= n2 {
        return Err(Error::invalid("bundle", format!("{b:?} outside a {n1}x{n2} grid")));
    }
    let hm = HouseholdMenu::for_household(menu, hh)?;
    Ok(hm.bundle_ce(b, ptype, zeta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preferences::{ce_dt, ce_eu};
    use approx::assert_relative_eq;

    #[test]
    fn default_menu_price_steps() {
        let m = MenuConfig::default_menu();
        m.validate().unwrap();
        let c = &m.collision;
        assert_relative_eq!(c.premium(2, 187.0) - c.premium(1, 187.0), 56.0, epsilon = 1e-9);
        assert_relative_eq!(c.premium(1, 187.0) - c.premium(0, 187.0), 42.0, epsilon = 1e-9);
        let k = &m.comprehensive;
        assert_relative_eq!(k.premium(2, 117.0) - k.premium(1, 117.0), 31.0, epsilon = 1e-9);
        assert_relative_eq!(k.premium(1, 117.0) - k.premium(0, 117.0), 23.0, epsilon = 1e-9);
        assert_eq!(m.n_bundles(), 30);
    }

    #[test]
    fn validation_rejects_bad_menus() {
        let mut m = MenuConfig::default_menu();
        m.collision.deductibles[1] = 1000.0;
        assert!(m.validate().is_err());
        let mut m = MenuConfig::default_menu();
        m.comprehensive.factors[2] = 0.5;
        assert!(m.validate().is_err());
        let mut m = MenuConfig::default_menu();
        m.collision.fee = 0.0;
        assert!(m.validate().is_err());
    }

    #[test]
    fn bundle_indexing_round_trips() {
        let m = MenuConfig::default_menu();
        for i in 0..m.n_bundles() {
            assert_eq!(m.bundle_index(m.bundle_at(i)), i);
        }
        assert_eq!(m.find_bundle(500.0, 500.0), Some(Bundle::new(1, 1)));
        assert_eq!(m.bundle_index(Bundle::CHEAPEST), 0);
    }

    #[test]
    fn bundle_ce_is_sum_of_context_ces() {
        let m = MenuConfig::default_menu();
        let hh = Household::new(1, 187.0, 117.0, 0.081, 0.023);
        let b = Bundle::new(1, 1);
        let l1 = m.collision.lottery(1, 187.0, 0.081).unwrap();
        let l2 = m.comprehensive.lottery(1, 117.0, 0.023).unwrap();
        let eu = bundle_ce(b, PreferenceType::Eu, 0.002, &hh, &m).unwrap();
        assert_relative_eq!(eu, ce_eu(&l1, 0.002) + ce_eu(&l2, 0.002), epsilon = 1e-10);
        let dt = bundle_ce(b, PreferenceType::Dt, 0.5, &hh, &m).unwrap();
        assert_relative_eq!(dt, ce_dt(&l1, 0.5) + ce_dt(&l2, 0.5), epsilon = 1e-10);
        assert!(bundle_ce(Bundle::new(5, 0), PreferenceType::Eu, 0.0, &hh, &m).is_err());
    }

    #[test]
    fn ties_break_toward_cheaper_bundle() {
        let m = MenuConfig::default_menu();
        let hm = HouseholdMenu::new(&m, [187.0, 117.0], [0.08, 0.02]).unwrap();
        assert!(hm.ranks_above(0, -10.0, 1, -10.0));
        assert!(!hm.ranks_above(1, -10.0, 0, -10.0));
        assert!(hm.ranks_above(1, -9.0, 0, -10.0));
    }
}

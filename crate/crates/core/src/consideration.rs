//! Alternative-specific random consideration over the bundle grid.
//!
//! Each bundle `j` enters the consideration set independently with
//! probability `phi_j`; the cheapest bundle is always considered.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::menu::{Bundle, HouseholdMenu, MenuConfig, MAX_BUNDLES};
use crate::preferences::PreferenceType;

/// Set of bundles stored as a bit mask over flat bundle indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BundleSet(pub u64);

impl BundleSet {
    pub const EMPTY: BundleSet = BundleSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            BundleSet(u64::MAX)
        } else {
            BundleSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        BundleSet(1u64 << i)
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        BundleSet(indices.iter().fold(0u64, |m, &i| m | (1u64 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u64 << i;
    }

    pub fn union(self, other: BundleSet) -> BundleSet {
        BundleSet(self.0 | other.0)
    }

    pub fn intersection(self, other: BundleSet) -> BundleSet {
        BundleSet(self.0 & other.0)
    }

    pub fn is_disjoint(self, other: BundleSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

/// Consideration probabilities on the bundle grid, row-major with rows
/// indexed by collision alternative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsiderationParams {
    pub n_collision: usize,
    pub n_comprehensive: usize,
    pub phi: Vec<f64>,
}

impl ConsiderationParams {
    /// Builds and validates a parameter grid.
    pub fn new(n_collision: usize, n_comprehensive: usize, phi: Vec<f64>) -> Result<Self> {
        let cp = ConsiderationParams {
            n_collision,
            n_comprehensive,
            phi,
        };
        cp.validate()?;
        Ok(cp)
    }

    /// Every bundle considered with certainty.
    pub fn full(n_collision: usize, n_comprehensive: usize) -> Self {
        ConsiderationParams {
            n_collision,
            n_comprehensive,
            phi: vec![1.0; n_collision * n_comprehensive],
        }
    }

    /// Constant probability on every bundle other than the cheapest.
    pub fn uniform(n_collision: usize, n_comprehensive: usize, value: f64) -> Self {
        let mut phi = vec![value; n_collision * n_comprehensive];
        phi[0] = 1.0;
        ConsiderationParams {
            n_collision,
            n_comprehensive,
            phi,
        }
    }

    /// Builds from rows of the grid.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n1 = rows.len();
        let n2 = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n2) {
            return Err(Error::invalid("consideration grid", "ragged rows"));
        }
        ConsiderationParams::new(n1, n2, rows.concat())
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.phi.chunks(self.n_comprehensive).map(<[f64]>::to_vec).collect()
    }

    pub fn n_bundles(&self) -> usize {
        self.phi.len()
    }

    pub fn get(&self, b: Bundle) -> f64 {
        self.phi[b.collision * self.n_comprehensive + b.comprehensive]
    }

    pub fn set(&mut self, b: Bundle, value: f64) {
        self.phi[b.collision * self.n_comprehensive + b.comprehensive] = value;
    }

    pub fn index(&self, b: Bundle) -> usize {
        b.collision * self.n_comprehensive + b.comprehensive
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_collision * self.n_comprehensive;
        if n == 0 || n > MAX_BUNDLES {
            return Err(Error::invalid("consideration grid", format!("{n} bundles")));
        }
        if self.phi.len() != n {
            return Err(Error::invalid(
                "consideration grid",
                format!("{} probabilities for {n} bundles", self.phi.len()),
            ));
        }
        if self.phi[0] != 1.0 {
            return Err(Error::invalid(
                "consideration grid",
                "the cheapest bundle must be considered with probability 1",
            ));
        }
        if let Some(p) = self.phi.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::invalid("consideration grid", format!("probability {p} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn check_menu(&self, menu: &MenuConfig) -> Result<()> {
        if menu.shape() != (self.n_collision, self.n_comprehensive) {
            return Err(Error::invalid(
                "consideration grid",
                format!(
                    "{}x{} grid for a {}x{} menu",
                    self.n_collision,
                    self.n_comprehensive,
                    menu.collision.len(),
                    menu.comprehensive.len()
                ),
            ));
        }
        Ok(())
    }

    /// Grid with `phi = 0` on every bundle whose collision deductible is
    /// strictly below its comprehensive deductible, `1` elsewhere.
    pub fn triangular(menu: &MenuConfig) -> Self {
        let mut cp = ConsiderationParams::full(menu.collision.len(), menu.comprehensive.len());
        for b in menu.bundles() {
            let (d1, d2) = menu.deductibles(b);
            if d1 < d2 {
                cp.set(b, 0.0);
            }
        }
        cp
    }

    /// Marginal probability that at least one bundle with collision
    /// alternative `i` is considered.
    pub fn collision_marginal(&self, i: usize) -> f64 {
        let row = &self.phi[i * self.n_comprehensive..(i + 1) * self.n_comprehensive];
        1.0 - row.iter().map(|p| 1.0 - p).product::<f64>()
    }

    /// Marginal probability that at least one bundle with comprehensive
    /// alternative `j` is considered.
    pub fn comprehensive_marginal(&self, j: usize) -> f64 {
        1.0 - (0..self.n_collision)
            .map(|i| 1.0 - self.phi[i * self.n_comprehensive + j])
            .product::<f64>()
    }
}

/// Context-by-context consideration: alternative `l` of context `c` is
/// considered independently with probability `psi[c][l]`, and the considered
/// bundles are all pairs of considered alternatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NarrowConsideration {
    pub collision: Vec<f64>,
    pub comprehensive: Vec<f64>,
}

impl NarrowConsideration {
    /// Per-context probabilities equal to the marginal rates implied by a
    /// bundle grid.
    pub fn from_marginals(cp: &ConsiderationParams) -> Self {
        NarrowConsideration {
            collision: (0..cp.n_collision).map(|i| cp.collision_marginal(i)).collect(),
            comprehensive: (0..cp.n_comprehensive).map(|j| cp.comprehensive_marginal(j)).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for v in [&self.collision, &self.comprehensive] {
            if v.first() != Some(&1.0) {
                return Err(Error::invalid(
                    "narrow consideration",
                    "the highest deductible must be considered with probability 1",
                ));
            }
            if v.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(Error::invalid("narrow consideration", "probabilities must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    /// Draws a bundle consideration set.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BundleSet {
        let mut draw = |psi: &[f64]| -> Vec<usize> {
            let mut out = vec![0];
            for (l, &p) in psi.iter().enumerate().skip(1) {
                let u: f64 = rng.gen();
                if u < p {
                    out.push(l);
                }
            }
            out
        };
        let s1 = draw(&self.collision);
        let s2 = draw(&self.comprehensive);
        let n2 = self.comprehensive.len();
        let mut set = BundleSet::EMPTY;
        for &i in &s1 {
            for &j in &s2 {
                set.insert(i * n2 + j);
            }
        }
        set
    }

    /// Probability of each alternative subset of a context, keyed by bit mask
    /// over alternatives.
    pub(crate) fn subset_probs(psi: &[f64]) -> Vec<(u64, f64)> {
        let m = psi.len();
        (0..1u64 << (m - 1))
            .map(|bits| bits << 1 | 1)
            .map(|mask| {
                let p: f64 = psi
                    .iter()
                    .enumerate()
                    .map(|(l, &q)| if mask >> l & 1 == 1 { q } else { 1.0 - q })
                    .product();
                (mask, p)
            })
            .filter(|(_, p)| *p > 0.0)
            .collect()
    }
}

/// Probability that the consideration set equals `set` exactly.
pub fn set_prob(set: BundleSet, cp: &ConsiderationParams) -> f64 {
    if !set.contains(0) {
        return 0.0;
    }
    cp.phi
        .iter()
        .enumerate()
        .map(|(j, &p)| if set.contains(j) { p } else { 1.0 - p })
        .product()
}

/// Probability that every bundle in `included` is considered and none in
/// `excluded` is.
pub fn inclusion_prob(included: BundleSet, excluded: BundleSet, cp: &ConsiderationParams) -> Result<f64> {
    if !included.is_disjoint(excluded) {
        return Err(Error::Overlap);
    }
    let inc: f64 = included.iter().map(|j| cp.phi[j]).product();
    let exc: f64 = excluded.iter().map(|j| 1.0 - cp.phi[j]).product();
    Ok(inc * exc)
}

/// Draws a consideration set.
pub fn sample_set<R: Rng + ?Sized>(cp: &ConsiderationParams, rng: &mut R) -> BundleSet {
    let mut set = BundleSet::singleton(0);
    for (j, &p) in cp.phi.iter().enumerate().skip(1) {
        let u: f64 = rng.gen();
        if u < p {
            set.insert(j);
        }
    }
    set
}

/// Bundles with strictly higher certainty equivalent than `b`.
pub fn dominance_set(b: usize, ptype: PreferenceType, zeta: f64, hm: &HouseholdMenu) -> BundleSet {
    let mut ces = Vec::new();
    hm.bundle_ces(ptype, zeta, &mut ces);
    let mut set = BundleSet::EMPTY;
    for (j, &c) in ces.iter().enumerate() {
        if c > ces[b] {
            set.insert(j);
        }
    }
    set
}

/// Bundles that rank above `b`, resolving exact ties by the documented
/// tie-break.
pub fn outranking_set(b: usize, ces: &[f64], hm: &HouseholdMenu) -> BundleSet {
    let mut set = BundleSet::EMPTY;
    for (j, &c) in ces.iter().enumerate() {
        if j != b && hm.ranks_above(j, c, b, ces[b]) {
            set.insert(j);
        }
    }
    set
}

/// Identification branch of a consideration grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MicBranch {
    /// The two single-step neighbours of the cheapest bundle are considered
    /// with equal, positive probability.
    Symmetric,
    /// The collision neighbour is never considered together with the
    /// cheapest bundle.
    Exclusive,
    Violated,
}

const MIC_TOL: f64 = 1e-12;

/// Classifies a grid into an identification branch using the bundles around
/// the cheapest corner.
pub fn mic_branch(cp: &ConsiderationParams) -> Result<MicBranch> {
    if cp.n_collision < 2 || cp.n_comprehensive < 2 {
        return Err(Error::invalid("consideration grid", "branch needs a 2x2 corner"));
    }
    let idx = [
        Bundle::new(0, 0),
        Bundle::new(1, 0),
        Bundle::new(0, 1),
        Bundle::new(1, 1),
    ]
    .map(|b| cp.index(b));
    mic_branch_at(cp, idx)
}

/// Branch for a corner given flat indices `[corner, collision neighbour,
/// comprehensive neighbour, diagonal neighbour]`.
pub fn mic_branch_at(cp: &ConsiderationParams, idx: [usize; 4]) -> Result<MicBranch> {
    let [c, a, b, d] = idx;
    let s = |v: &[usize]| BundleSet::from_indices(v);
    let with_a = inclusion_prob(s(&[c, d, a]), BundleSet::EMPTY, cp)?;
    let with_b = inclusion_prob(s(&[c, d, b]), BundleSet::EMPTY, cp)?;
    if (with_a - with_b).abs() <= MIC_TOL {
        return Ok(if with_a > MIC_TOL {
            MicBranch::Symmetric
        } else {
            MicBranch::Violated
        });
    }
    let pair = inclusion_prob(s(&[c, a]), BundleSet::EMPTY, cp)?;
    let isolated = inclusion_prob(s(&[c, a]), s(&[d, b]), cp)?;
    if (pair - isolated).abs() <= MIC_TOL {
        return Ok(MicBranch::Exclusive);
    }
    Ok(MicBranch::Violated)
}

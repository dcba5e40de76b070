//! Exact partition of a coefficient support into intervals on which the
//! certainty-equivalent ranking of bundles is constant.
//!
//! A bundle pair whose context components move in the same direction has a
//! monotone difference and at most one root. Pairs whose components move in
//! opposite directions are isolated with a range test: each component is
//! monotone, so endpoint values bound the difference on a cell, and cells
//! that may hold a root are bisected down to a fixed depth before the root is
//! polished.

use serde::{Deserialize, Serialize};

use crate::cutoffs::alternative_direction;
use crate::menu::HouseholdMenu;
use crate::preferences::PreferenceType;
use crate::roots::illinois;

/// Resolution of the root search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionOptions {
    /// Cells in the initial scan of non-monotone pairs.
    pub grid: usize,
    /// Maximum bisection depth of a scan cell.
    pub max_depth: u32,
}

impl PartitionOptions {
    /// Resolution used for single-household probabilities.
    pub const PRECISE: PartitionOptions = PartitionOptions {
        grid: 128,
        max_depth: 16,
    };
    /// Resolution used when precomputing likelihood data.
    pub const FAST: PartitionOptions = PartitionOptions {
        grid: 48,
        max_depth: 8,
    };
}

impl Default for PartitionOptions {
    fn default() -> Self {
        PartitionOptions::PRECISE
    }
}

struct PairScan<'a> {
    hm: &'a HouseholdMenu,
    ptype: PreferenceType,
    alts: [[usize; 2]; 2],
}

impl PairScan<'_> {
    #[inline]
    fn components(&self, z: f64) -> (f64, f64) {
        let hm = self.hm;
        let mut out = [0.0; 2];
        for (c, o) in out.iter_mut().enumerate() {
            let [a, b] = self.alts[c];
            if a != b {
                *o = (hm.premiums[c][a] + hm.risk_cost(c, a, self.ptype, z))
                    - (hm.premiums[c][b] + hm.risk_cost(c, b, self.ptype, z));
            }
        }
        (out[0], out[1])
    }

    #[inline]
    fn diff(&self, z: f64) -> f64 {
        let (x, y) = self.components(z);
        x + y
    }

    #[allow(clippy::too_many_arguments)]
    fn isolate(&self, z0: f64, z1: f64, a0: f64, a1: f64, c0: f64, c1: f64, depth: u32, max_depth: u32, out: &mut Vec<f64>) {
        let low = a0.min(a1) + c0.min(c1);
        let high = a0.max(a1) + c0.max(c1);
        if low > 0.0 || high < 0.0 {
            return;
        }
        let (d0, d1) = (a0 + c0, a1 + c1);
        if depth >= max_depth {
            if d0 * d1 < 0.0 {
                out.push(illinois(|z| self.diff(z), z0, z1, d0, d1));
            }
            return;
        }
        let zm = 0.5 * (z0 + z1);
        let (am, cm) = self.components(zm);
        self.isolate(z0, zm, a0, am, c0, cm, depth + 1, max_depth, out);
        self.isolate(zm, z1, am, a1, cm, c1, depth + 1, max_depth, out);
    }
}

/// Interior points of `[0, upper]` where the ranking of some bundle pair
/// changes. With `focus` set, only pairs involving that bundle are scanned.
pub fn cutpoints(hm: &HouseholdMenu, ptype: PreferenceType, focus: Option<usize>, opts: PartitionOptions) -> Vec<f64> {
    let n = hm.n_bundles();
    let upper = ptype.support_upper();
    let mut cuts = Vec::new();
    let mut table: Option<[Vec<Vec<f64>>; 2]> = None;
    let grid: Vec<f64> = (0..=opts.grid).map(|i| upper * i as f64 / opts.grid as f64).collect();
    let pairs: Vec<(usize, usize)> = match focus {
        Some(f) => (0..n).filter(|&j| j != f).map(|j| (f.min(j), f.max(j))).collect(),
        None => (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect(),
    };
    for (a, b) in pairs {
        let (ba, bb) = (hm.bundle_at(a), hm.bundle_at(b));
        let scan = PairScan {
            hm,
            ptype,
            alts: [[ba.collision, bb.collision], [ba.comprehensive, bb.comprehensive]],
        };
        let dir1 = alternative_direction(hm, 0, ba.collision, bb.collision, ptype);
        let dir2 = alternative_direction(hm, 1, ba.comprehensive, bb.comprehensive, ptype);
        if dir1 * dir2 >= 0.0 {
            let (f0, f1) = (scan.diff(0.0), scan.diff(upper));
            if f0 * f1 < 0.0 {
                cuts.push(illinois(|z| scan.diff(z), 0.0, upper, f0, f1));
            }
            continue;
        }
        let t = table.get_or_insert_with(|| {
            std::array::from_fn(|c| {
                (0..hm.n[c])
                    .map(|alt| {
                        grid.iter()
                            .map(|&z| hm.premiums[c][alt] + hm.risk_cost(c, alt, ptype, z))
                            .collect()
                    })
                    .collect()
            })
        });
        let [[a1, b1], [a2, b2]] = scan.alts;
        for i in 0..opts.grid {
            let ca0 = t[0][a1][i] - t[0][b1][i];
            let ca1 = t[0][a1][i + 1] - t[0][b1][i + 1];
            let cc0 = t[1][a2][i] - t[1][b2][i];
            let cc1 = t[1][a2][i + 1] - t[1][b2][i + 1];
            scan.isolate(grid[i], grid[i + 1], ca0, ca1, cc0, cc1, 0, opts.max_depth, &mut cuts);
        }
    }
    cuts.retain(|&z| z > 0.0 && z < upper);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

/// Midpoints of the intervals delimited by `cuts` on `[0, upper]`.
pub fn midpoints(cuts: &[f64], upper: f64) -> impl Iterator<Item = f64> + '_ {
    (0..=cuts.len()).map(move |k| {
        let lo = if k == 0 { 0.0 } else { cuts[k - 1] };
        let hi = if k == cuts.len() { upper } else { cuts[k] };
        0.5 * (lo + hi)
    })
}

/// Bundles ranked above `focus` on each interval, as bit masks.
pub fn focus_masks(hm: &HouseholdMenu, ptype: PreferenceType, focus: usize, cuts: &[f64]) -> Vec<u64> {
    let mut ces = Vec::with_capacity(hm.n_bundles());
    midpoints(cuts, ptype.support_upper())
        .map(|z| {
            hm.bundle_ces(ptype, z, &mut ces);
            let mut mask = 0u64;
            for (j, &c) in ces.iter().enumerate() {
                if j != focus && hm.ranks_above(j, c, focus, ces[focus]) {
                    mask |= 1u64 << j;
                }
            }
            mask
        })
        .collect()
}

/// Full bundle ranking, best first, at coefficient `zeta`.
pub fn ranking_at(hm: &HouseholdMenu, ptype: PreferenceType, zeta: f64) -> Vec<usize> {
    let mut ces = Vec::with_capacity(hm.n_bundles());
    hm.bundle_ces(ptype, zeta, &mut ces);
    let mut order: Vec<usize> = (0..ces.len()).collect();
    order.sort_by(|&a, &b| {
        if hm.ranks_above(a, ces[a], b, ces[b]) {
            std::cmp::Ordering::Less
        } else if a == b {
            std::cmp::Ordering::Equal
        } else {
            std::cmp::Ordering::Greater
        }
    });
    order
}

/// Bundle ranking on each interval delimited by `cuts`.
pub fn interval_rankings(hm: &HouseholdMenu, ptype: PreferenceType, cuts: &[f64]) -> Vec<Vec<usize>> {
    midpoints(cuts, ptype.support_upper())
        .map(|z| ranking_at(hm, ptype, z))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::menu::MenuConfig;

    fn hm() -> HouseholdMenu {
        HouseholdMenu::new(&MenuConfig::default_menu(), [187.0, 117.0], [0.081, 0.023]).unwrap()
    }

    /// Every dense-grid ranking change lies in an interval boundary cell.
    #[test]
    fn dense_scan_finds_no_missed_changes() {
        let hm = hm();
        for ptype in PreferenceType::ALL {
            let upper = ptype.support_upper();
            let cuts = cutpoints(&hm, ptype, None, PartitionOptions::PRECISE);
            let ranks = interval_rankings(&hm, ptype, &cuts);
            let m = 4000;
            for i in 0..=m {
                let z = upper * i as f64 / m as f64;
                let k = cuts.partition_point(|&c| c < z);
                let near = cuts.iter().any(|c| (c - z).abs() < 1e-12);
                if !near {
                    assert_eq!(ranking_at(&hm, ptype, z), ranks[k], "{ptype:?} at {z}");
                }
            }
        }
    }

    #[test]
    fn focus_cuts_are_subset_of_full_cuts() {
        let hm = hm();
        for ptype in PreferenceType::ALL {
            let all = cutpoints(&hm, ptype, None, PartitionOptions::PRECISE);
            for f in [0usize, 7, 29] {
                for c in cutpoints(&hm, ptype, Some(f), PartitionOptions::PRECISE) {
                    assert!(all.iter().any(|a| (a - c).abs() < 1e-14));
                }
            }
        }
    }

    #[test]
    fn focus_masks_agree_with_rankings() {
        let hm = hm();
        let ptype = PreferenceType::Eu;
        let f = 7;
        let cuts = cutpoints(&hm, ptype, Some(f), PartitionOptions::PRECISE);
        let masks = focus_masks(&hm, ptype, f, &cuts);
        for (k, z) in midpoints(&cuts, ptype.support_upper()).enumerate() {
            let order = ranking_at(&hm, ptype, z);
            let pos = order.iter().position(|&b| b == f).unwrap();
            let expect = order[..pos].iter().fold(0u64, |m, &b| m | 1 << b);
            assert_eq!(masks[k], expect);
        }
    }
}

//! Log-likelihood with precomputed ranking intervals.
//!
//! Cutoffs depend only on each household's menu and claim probabilities, so
//! the coefficient intervals on which the set of bundles ranked above the
//! chosen bundle is constant are computed once. Each evaluation then needs
//! only Beta distribution function values and consideration products.

use rayon::prelude::*;

use crate::beta::{CdfTable, ScaledBeta};
use crate::choice::PreferenceParams;
use crate::error::{Error, Result};
use crate::household::Household;
use crate::menu::{HouseholdMenu, MenuConfig};
use crate::partition::{cutpoints, focus_masks, PartitionOptions};
use crate::preferences::PreferenceType;

use super::transform::{Layout, ALPHA, NU, OMEGA};

/// Lower bound applied to each household's likelihood.
pub const LIKELIHOOD_FLOOR: f64 = 1e-12;
/// Households per reduction chunk.
const CHUNK: usize = 512;
/// Step in log-shape for the Beta shape derivatives.
const SHAPE_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Default)]
struct TypeBlock {
    start: Vec<u32>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    mask: Vec<u64>,
}

impl TypeBlock {
    #[inline]
    fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.start[i] as usize..self.start[i + 1] as usize
    }
}

/// Household intervals on the unit coefficient scale, per preference type.
#[derive(Debug, Clone)]
pub struct LikelihoodData {
    n_bundles: usize,
    choices: Vec<u8>,
    blocks: [TypeBlock; 2],
}

type Intervals = Vec<(f64, f64, u64)>;

fn household_intervals(hm: &HouseholdMenu, b: usize, ptype: PreferenceType, opts: PartitionOptions) -> Intervals {
    let upper = ptype.support_upper();
    let cuts = cutpoints(hm, ptype, Some(b), opts);
    let masks = focus_masks(hm, ptype, b, &cuts);
    let mut out: Intervals = Vec::new();
    for (k, mask) in masks.into_iter().enumerate() {
        // The cheapest bundle is always considered, so it blocks any bundle it
        // outranks.
        if mask & 1 == 1 {
            continue;
        }
        let lo = if k == 0 { 0.0 } else { cuts[k - 1] / upper };
        let hi = if k == cuts.len() { 1.0 } else { cuts[k] / upper };
        match out.last_mut() {
            Some(last) if last.2 == mask && last.1 == lo => last.1 = hi,
            _ => out.push((lo, hi, mask)),
        }
    }
    out
}

impl LikelihoodData {
    /// Precomputes intervals for every household. Each household must carry
    /// a choice.
    pub fn build(data: &[Household], menu: &MenuConfig, opts: PartitionOptions) -> Result<Self> {
        menu.validate()?;
        let per_household: Vec<(u8, [Intervals; 2])> = data
            .par_iter()
            .map(|hh| {
                let choice = hh.choice.ok_or_else(|| {
                    Error::invalid("household", format!("household {} has no observed choice", hh.id))
                })?;
                let (n1, n2) = menu.shape();
                if choice.collision >= n1 || choice.comprehensive >= n2 {
                    return Err(Error::invalid("household", format!("choice of household {} is off the menu", hh.id)));
                }
                let hm = HouseholdMenu::for_household(menu, hh)?;
                let b = hm.bundle_index(choice);
                Ok((
                    b as u8,
                    PreferenceType::ALL.map(|t| household_intervals(&hm, b, t, opts)),
                ))
            })
            .collect::<Result<_>>()?;
        let mut blocks: [TypeBlock; 2] = Default::default();
        for block in &mut blocks {
            block.start.push(0);
        }
        let mut choices = Vec::with_capacity(data.len());
        for (b, ivs) in per_household {
            choices.push(b);
            for (block, iv) in blocks.iter_mut().zip(ivs) {
                for (lo, hi, mask) in iv {
                    block.lo.push(lo);
                    block.hi.push(hi);
                    block.mask.push(mask);
                }
                block.start.push(block.lo.len() as u32);
            }
        }
        Ok(LikelihoodData {
            n_bundles: menu.n_bundles(),
            choices,
            blocks,
        })
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    pub fn n_bundles(&self) -> usize {
        self.n_bundles
    }

    /// Restriction to the households at `indices`.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut blocks: [TypeBlock; 2] = Default::default();
        for (out, block) in blocks.iter_mut().zip(&self.blocks) {
            out.start.push(0);
            for &i in indices {
                let r = block.range(i);
                out.lo.extend_from_slice(&block.lo[r.clone()]);
                out.hi.extend_from_slice(&block.hi[r.clone()]);
                out.mask.extend_from_slice(&block.mask[r]);
                out.start.push(out.lo.len() as u32);
            }
        }
        LikelihoodData {
            n_bundles: self.n_bundles,
            choices: indices.iter().map(|&i| self.choices[i]).collect(),
            blocks,
        }
    }
}

/// Consideration quantities shared by all households in one evaluation.
struct PhiTerms {
    phi: Vec<f64>,
    log_not: Vec<f64>,
}

impl PhiTerms {
    fn new(phi: Vec<f64>) -> Self {
        let log_not = phi.iter().map(|p| (-p).ln_1p()).collect();
        PhiTerms { phi, log_not }
    }

    #[inline]
    fn interval_prob(&self, b: usize, mask: u64) -> f64 {
        let mut s = 0.0;
        let mut bits = mask;
        while bits != 0 {
            s += self.log_not[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        self.phi[b] * s.exp()
    }
}

/// Probability of household `i`'s choice for one type.
#[inline]
fn type_sum(block: &TypeBlock, i: usize, b: usize, table: &CdfTable, terms: &PhiTerms) -> f64 {
    let mut total = 0.0;
    let mut prev_hi = f64::NAN;
    let mut prev_f = 0.0;
    for k in block.range(i) {
        let f_lo = if block.lo[k] == prev_hi { prev_f } else { table.cdf(block.lo[k]) };
        let f_hi = table.cdf(block.hi[k]);
        total += (f_hi - f_lo) * terms.interval_prob(b, block.mask[k]);
        prev_hi = block.hi[k];
        prev_f = f_hi;
    }
    total
}

/// Same as [`type_sum`], also accumulating `sum_k dF_k P_k` per bundle in
/// each interval's mask into `acc`, and returning the union of masks.
#[inline]
fn type_sum_with_masks(block: &TypeBlock, i: usize, b: usize, table: &CdfTable, terms: &PhiTerms, acc: &mut [f64]) -> (f64, u64) {
    let mut total = 0.0;
    let mut union = 0u64;
    let mut prev_hi = f64::NAN;
    let mut prev_f = 0.0;
    for k in block.range(i) {
        let f_lo = if block.lo[k] == prev_hi { prev_f } else { table.cdf(block.lo[k]) };
        let f_hi = table.cdf(block.hi[k]);
        let mask = block.mask[k];
        let w = (f_hi - f_lo) * terms.interval_prob(b, mask);
        total += w;
        union |= mask;
        let mut bits = mask;
        while bits != 0 {
            acc[bits.trailing_zeros() as usize] += w;
            bits &= bits - 1;
        }
        prev_hi = block.hi[k];
        prev_f = f_hi;
    }
    (total, union)
}

/// Log-likelihood value, optional gradient in unconstrained coordinates, and
/// the number of floored households.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub loglik: f64,
    pub gradient: Option<Vec<f64>>,
    pub n_floored: usize,
}

/// Evaluates the log-likelihood on precomputed data.
pub struct Likelihood<'a> {
    data: &'a LikelihoodData,
    layout: Layout,
    cdf_cells: usize,
}

fn tables(layout: &Layout, x: &[f64], cells: usize) -> [CdfTable; 2] {
    let shapes = layout.shapes(x);
    std::array::from_fn(|t| CdfTable::new(ScaledBeta::new(shapes[t], 1.0), cells))
}

impl<'a> Likelihood<'a> {
    pub fn new(data: &'a LikelihoodData) -> Self {
        Likelihood {
            data,
            layout: Layout::new(data.n_bundles),
            cdf_cells: CdfTable::DEFAULT_CELLS,
        }
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Per-household likelihoods at unconstrained coordinates, unfloored.
    pub fn contributions(&self, x: &[f64]) -> Vec<f64> {
        self.contributions_at(&self.layout.decode_preferences(x), self.layout.phi(x))
    }

    /// Per-household likelihoods at natural parameters, unfloored.
    pub fn contributions_at(&self, prefs: &PreferenceParams, phi: Vec<f64>) -> Vec<f64> {
        let alpha = prefs.alpha;
        let tabs = [prefs.nu, prefs.omega].map(|s| CdfTable::new(ScaledBeta::new(s, 1.0), self.cdf_cells));
        let terms = PhiTerms::new(phi);
        let d = self.data;
        (0..d.len())
            .into_par_iter()
            .with_min_len(CHUNK)
            .map(|i| {
                let b = d.choices[i] as usize;
                let s_eu = type_sum(&d.blocks[0], i, b, &tabs[0], &terms);
                let s_dt = type_sum(&d.blocks[1], i, b, &tabs[1], &terms);
                alpha * s_eu + (1.0 - alpha) * s_dt
            })
            .collect()
    }

    /// Log-likelihood and, when `free` is given, its gradient with respect
    /// to the free coordinates (zero elsewhere).
    pub fn evaluate(&self, x: &[f64], free: Option<&[bool]>) -> Evaluation {
        let Some(free) = free else {
            let (loglik, n_floored) = self.value_only(x);
            return Evaluation {
                loglik,
                gradient: None,
                n_floored,
            };
        };
        let d = self.data;
        let dim = self.layout.dim();
        let alpha = self.layout.alpha(x);
        let tabs = tables(&self.layout, x, self.cdf_cells);
        let terms = PhiTerms::new(self.layout.phi(x));
        let nb = d.n_bundles;

        struct ChunkOut {
            loglik: f64,
            floored: usize,
            grad: Vec<f64>,
            lik: Vec<f64>,
        }

        let chunks: Vec<ChunkOut> = (0..d.len())
            .collect::<Vec<_>>()
            .par_chunks(CHUNK)
            .map(|idx| {
                let mut out = ChunkOut {
                    loglik: 0.0,
                    floored: 0,
                    grad: vec![0.0; dim],
                    lik: Vec::with_capacity(idx.len()),
                };
                let mut acc = [vec![0.0; nb], vec![0.0; nb]];
                for &i in idx {
                    let b = d.choices[i] as usize;
                    let (s_eu, u_eu) = type_sum_with_masks(&d.blocks[0], i, b, &tabs[0], &terms, &mut acc[0]);
                    let (s_dt, u_dt) = type_sum_with_masks(&d.blocks[1], i, b, &tabs[1], &terms, &mut acc[1]);
                    let lik = alpha * s_eu + (1.0 - alpha) * s_dt;
                    let union = u_eu | u_dt;
                    if lik < LIKELIHOOD_FLOOR {
                        out.loglik += LIKELIHOOD_FLOOR.ln();
                        out.floored += 1;
                        out.lik.push(f64::NAN);
                    } else {
                        out.loglik += lik.ln();
                        out.lik.push(lik);
                        out.grad[ALPHA] += alpha * (1.0 - alpha) * (s_eu - s_dt) / lik;
                        let mut bits = union;
                        while bits != 0 {
                            let j = bits.trailing_zeros() as usize;
                            let weighted = alpha * acc[0][j] + (1.0 - alpha) * acc[1][j];
                            if let Some(c) = self.layout.phi_coord(j) {
                                out.grad[c] -= terms.phi[j] * weighted / lik;
                            }
                            bits &= bits - 1;
                        }
                        if let Some(c) = self.layout.phi_coord(b) {
                            out.grad[c] += 1.0 - terms.phi[b];
                        }
                    }
                    let mut bits = union;
                    while bits != 0 {
                        let j = bits.trailing_zeros() as usize;
                        acc[0][j] = 0.0;
                        acc[1][j] = 0.0;
                        bits &= bits - 1;
                    }
                }
                out
            })
            .collect();

        let mut loglik = 0.0;
        let mut n_floored = 0;
        let mut grad = vec![0.0; dim];
        let mut lik = Vec::with_capacity(d.len());
        for c in chunks {
            loglik += c.loglik;
            n_floored += c.floored;
            for (g, v) in grad.iter_mut().zip(&c.grad) {
                *g += v;
            }
            lik.extend(c.lik);
        }

        for (t, coords) in [NU, OMEGA].into_iter().enumerate() {
            let weight = if t == 0 { alpha } else { 1.0 - alpha };
            for k in coords {
                if !free[k] {
                    continue;
                }
                grad[k] = weight * self.shape_derivative(x, t, k, &terms, &lik);
            }
        }
        for (g, f) in grad.iter_mut().zip(free) {
            if !f {
                *g = 0.0;
            }
        }
        Evaluation {
            loglik,
            gradient: Some(grad),
            n_floored,
        }
    }

    fn value_only(&self, x: &[f64]) -> (f64, usize) {
        let contributions = self.contributions(x);
        let parts: Vec<(f64, usize)> = contributions
            .par_chunks(CHUNK)
            .map(|c| {
                c.iter().fold((0.0, 0), |(s, n), &l| {
                    if l < LIKELIHOOD_FLOOR {
                        (s + LIKELIHOOD_FLOOR.ln(), n + 1)
                    } else {
                        (s + l.ln(), n)
                    }
                })
            })
            .collect();
        parts.into_iter().fold((0.0, 0), |(s, n), (a, b)| (s + a, n + b))
    }

    /// `sum_i dS_t,i / d x_k / L_i` by central differences in log-shape.
    fn shape_derivative(&self, x: &[f64], t: usize, k: usize, terms: &PhiTerms, lik: &[f64]) -> f64 {
        let d = self.data;
        let block = &d.blocks[t];
        let shifted = |delta: f64| {
            let mut xs = x.to_vec();
            xs[k] += delta;
            tables(&self.layout, &xs, self.cdf_cells)[t].clone()
        };
        let (plus, minus) = (shifted(SHAPE_STEP), shifted(-SHAPE_STEP));
        let parts: Vec<f64> = (0..d.len())
            .collect::<Vec<_>>()
            .par_chunks(CHUNK)
            .map(|idx| {
                let mut s = 0.0;
                for &i in idx {
                    if lik[i].is_nan() {
                        continue;
                    }
                    let b = d.choices[i] as usize;
                    let up = type_sum(block, i, b, &plus, terms);
                    let down = type_sum(block, i, b, &minus, terms);
                    s += (up - down) / (2.0 * SHAPE_STEP) / lik[i];
                }
                s
            })
            .collect();
        parts.into_iter().sum()
    }
}

/// Sum that does not depend on the order of the terms.
pub(crate) fn order_free_sum(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values.iter() {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::choice::choice_prob;
    use crate::quadrature::Integration;
    use crate::simulation::{calibrated_params, gen_population, simulate_choices, ConsiderationRegime, PopulationConfig};

    fn sample(n: usize) -> (Vec<Household>, crate::choice::ModelParams) {
        let mp = calibrated_params();
        let pop = gen_population(&PopulationConfig {
            n,
            seed: 21,
            ..Default::default()
        })
        .unwrap();
        (simulate_choices(&pop, &mp, &ConsiderationRegime::Broad, 22).unwrap(), mp)
    }

    #[test]
    fn contributions_match_choice_probabilities() {
        let (data, mut mp) = sample(60);
        mp.consideration.phi[3] = 0.5;
        let cache = LikelihoodData::build(&data, &mp.menu, PartitionOptions::PRECISE).unwrap();
        let lik = Likelihood::new(&cache);
        let x = lik.layout().encode(&mp).unwrap();
        let mp = lik.layout().decode(&x, &mp);
        for (h, c) in data.iter().zip(lik.contributions(&x)) {
            let exact = choice_prob(h.choice.unwrap(), h, &mp, &Integration::default()).unwrap();
            assert!((c - exact).abs() < 1e-9, "{c} vs {exact}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let (data, mut mp) = sample(300);
        for p in mp.consideration.phi.iter_mut().skip(1) {
            *p = 0.6 * *p + 0.1;
        }
        mp.preferences.alpha = 0.4;
        let cache = LikelihoodData::build(&data, &mp.menu, PartitionOptions::FAST).unwrap();
        let lik = Likelihood::new(&cache);
        let x = lik.layout().encode(&mp).unwrap();
        let free = vec![true; x.len()];
        let g = lik.evaluate(&x, Some(&free)).gradient.unwrap();
        for k in 0..x.len() {
            let h = 1e-5;
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let fd = (lik.evaluate(&xp, None).loglik - lik.evaluate(&xm, None).loglik) / (2.0 * h);
            assert!((g[k] - fd).abs() < 1e-4 * (1.0 + fd.abs()), "coordinate {k}: {} vs {fd}", g[k]);
        }
    }

    #[test]
    fn off_grid_choice_is_floored() {
        let (mut data, mp) = sample(5);
        data[0].choice = Some(crate::menu::Bundle::new(4, 0));
        let cache = LikelihoodData::build(&data, &mp.menu, PartitionOptions::PRECISE).unwrap();
        let lik = Likelihood::new(&cache);
        let x = lik.layout().encode(&mp).unwrap();
        let e = lik.evaluate(&x, None);
        assert_eq!(e.n_floored, 1);
    }

    #[test]
    fn order_free_sum_ignores_permutation() {
        let v: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1013) as f64 * 1e-3 - 0.4).map(f64::ln_1p).collect();
        let mut a = v.clone();
        let mut b: Vec<f64> = v.into_iter().rev().collect();
        assert_eq!(order_free_sum(&mut a).to_bits(), order_free_sum(&mut b).to_bits());
    }
}

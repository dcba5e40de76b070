//! Numerical checks of the identification argument: the derivative identity
//! at the indifference locus, recovery of the type share, recovery of the
//! coefficient density through two corners, and a battery of assumption
//! checks.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::choice::{choice_prob_in, narrow_choice_probs_in, ModelParams};
use crate::consideration::{inclusion_prob, mic_branch, mic_branch_at, BundleSet, MicBranch, NarrowConsideration};
use crate::cutoffs::{bundle_cutoff_in, locus_point, scp_verify, triplet_check, Corner};
use crate::error::{Error, Result};
use crate::menu::{Context, HouseholdMenu};
use crate::partition::PartitionOptions;
use crate::preferences::PreferenceType;
use crate::quadrature::Integration;

/// Finite-difference settings. Both are relative to the locus base price:
/// `step` for the derivative in the collision price, `offset` for the shift
/// in the comprehensive price that separates the two one-sided limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteDifference {
    pub step: f64,
    pub offset: f64,
    pub partition: PartitionOptions,
}

impl Default for FiniteDifference {
    fn default() -> Self {
        FiniteDifference {
            step: 1e-4,
            offset: 1e-3,
            partition: PartitionOptions::PRECISE,
        }
    }
}

impl FiniteDifference {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step < 0.1) || !(self.offset > 0.0 && self.offset < 0.1) {
            return Err(Error::invalid("finite difference", "step and offset must lie in (0, 0.1)"));
        }
        if self.step >= self.offset {
            return Err(Error::invalid("finite difference", "step must be smaller than offset"));
        }
        Ok(())
    }

    /// Step and offset both divided by `2^k`.
    pub fn refined(&self, k: u32) -> Self {
        let s = 0.5f64.powi(k as i32);
        FiniteDifference {
            step: self.step * s,
            offset: self.offset * s,
            ..*self
        }
    }
}

/// Which consideration model generates the choice probabilities that are
/// differentiated.
#[derive(Debug, Clone, Copy)]
pub enum ChoiceSource<'a> {
    /// The model's own bundle-level consideration.
    Bundle,
    /// Context-by-context consideration.
    Narrow(&'a NarrowConsideration),
}

/// Both sides of the derivative identity at one locus point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityEvaluation {
    pub ptype: PreferenceType,
    pub corner: Corner,
    pub zeta: f64,
    pub base_prices: [f64; 2],
    pub branch: MicBranch,
    /// Collision-price derivatives of the corner probability above and
    /// below the locus in the comprehensive price.
    pub derivatives: [f64; 2],
    pub lhs: f64,
    pub rhs: f64,
    /// Consideration-weighted cutoff slope.
    pub h: f64,
    /// Cutoff slopes of the collision and diagonal neighbours.
    pub slopes: [f64; 2],
    pub density: f64,
    pub discrepancy: f64,
}

impl IdentityEvaluation {
    /// Cutoff slope whose consideration factor survives under the branch.
    pub fn key_slope(&self) -> f64 {
        match self.branch {
            MicBranch::Symmetric => self.slopes[0],
            _ => self.slopes[1],
        }
    }

    /// Left-hand side with the known cutoff slope divided out: the type
    /// weight times the density times a constant consideration factor.
    pub fn scaled_density(&self) -> f64 {
        self.lhs / self.key_slope()
    }
}

fn corner_indices(hm: &HouseholdMenu, corner: Corner) -> [usize; 4] {
    let n = (hm.n_alternatives(Context::Collision), hm.n_alternatives(Context::Comprehensive));
    corner.neighbourhood(n).map(|b| hm.bundle_index(b))
}

fn corner_probability(hm: &HouseholdMenu, c: usize, mp: &ModelParams, source: ChoiceSource, opts: PartitionOptions) -> f64 {
    match source {
        ChoiceSource::Bundle => choice_prob_in(c, hm, mp, &Integration::CutoffExact(opts)),
        ChoiceSource::Narrow(narrow) => narrow_choice_probs_in(hm, &mp.preferences, narrow, opts)[c],
    }
}

/// Probability that the corner and `j` are considered while every other
/// bundle ranked above the corner at their cutoff is not.
fn crossing_consideration(hm: &HouseholdMenu, ptype: PreferenceType, c: usize, j: usize, mp: &ModelParams) -> Result<f64> {
    let v = bundle_cutoff_in(hm, c, j, ptype)?;
    let mut ces = Vec::new();
    hm.bundle_ces(ptype, v, &mut ces);
    let mut above = BundleSet::EMPTY;
    for (k, &ce) in ces.iter().enumerate() {
        if k != c && k != j && ce > ces[c] {
            above.insert(k);
        }
    }
    inclusion_prob(BundleSet::from_indices(&[c, j]), above, &mp.consideration)
}

/// Evaluates both sides of the derivative identity for a preference type
/// at the locus of `corner` for coefficient `zeta`.
///
/// The left side is the difference between central differences of the
/// corner probability in the collision price, taken with the comprehensive
/// price shifted up and down by `offset`. The right side is the type weight
/// times the density at `zeta` times `h`, where `h` sums, over the two
/// neighbours whose cutoff moves with the collision price, the cutoff slope
/// times the change in the probability of the consideration event that makes
/// the crossing matter.
pub fn derivative_identity(
    ptype: PreferenceType,
    corner: Corner,
    zeta: f64,
    mp: &ModelParams,
    claim_probs: [f64; 2],
    fd: &FiniteDifference,
    source: ChoiceSource,
) -> Result<IdentityEvaluation> {
    fd.validate()?;
    let upper = ptype.support_upper();
    if !(zeta > 0.0 && zeta < upper) {
        return Err(Error::invalid("coefficient", format!("{zeta} is not interior to (0, {upper})")));
    }
    let locus = locus_point(&mp.menu, corner, ptype, zeta, claim_probs)?;
    let x0 = locus.base_prices;
    let hm0 = HouseholdMenu::new(&mp.menu, x0, claim_probs)?;
    let idx = corner_indices(&hm0, corner);
    let branch = mic_branch_at(&mp.consideration, idx)?;
    if branch == MicBranch::Violated {
        return Err(Error::MicViolation);
    }
    let [c, a, _, d] = idx;

    let configs = [
        [x0[0], x0[1] * (1.0 + fd.offset)],
        [x0[0], x0[1] * (1.0 - fd.offset)],
    ];
    let h_step = fd.step * x0[0];
    let mut derivatives = [0.0; 2];
    for (slot, x) in derivatives.iter_mut().zip(configs) {
        let p = |dx: f64| -> Result<f64> {
            let hm = HouseholdMenu::new(&mp.menu, [x[0] + dx, x[1]], claim_probs)?;
            Ok(corner_probability(&hm, c, mp, source, fd.partition))
        };
        *slot = (p(h_step)? - p(-h_step)?) / (2.0 * h_step);
    }
    let lhs = derivatives[0] - derivatives[1];

    let ci = Context::Collision.index();
    let slope = |j: usize| {
        let (bj, bc) = (hm0.bundle_at(j), hm0.bundle_at(c));
        let mut s = 0.0;
        for ctx in Context::ALL {
            let k = ctx.index();
            s -= hm0.risk_cost_dzeta(k, bj.alt(ctx), ptype, zeta) - hm0.risk_cost_dzeta(k, bc.alt(ctx), ptype, zeta);
        }
        (hm0.factors[ci][bj.collision] - hm0.factors[ci][bc.collision]) / s.abs()
    };
    let slopes = [slope(a), slope(d)];
    let hms = [
        HouseholdMenu::new(&mp.menu, configs[0], claim_probs)?,
        HouseholdMenu::new(&mp.menu, configs[1], claim_probs)?,
    ];
    let mut h = 0.0;
    for (&j, &tau) in [a, d].iter().zip(&slopes) {
        let above = crossing_consideration(&hms[0], ptype, c, j, mp)?;
        let below = crossing_consideration(&hms[1], ptype, c, j, mp)?;
        h += tau * (above - below);
    }
    let density = mp.preferences.distribution(ptype).pdf(zeta);
    let rhs = mp.preferences.weight(ptype) * density * h;
    let discrepancy = if rhs != 0.0 {
        (lhs - rhs).abs() / rhs.abs()
    } else {
        f64::INFINITY
    };
    Ok(IdentityEvaluation {
        ptype,
        corner,
        zeta,
        base_prices: x0,
        branch,
        derivatives,
        lhs,
        rhs,
        h,
        slopes,
        density,
        discrepancy,
    })
}

/// Relative discrepancy `|LHS - RHS| / |RHS|` of the identity for the EU
/// type at the cheapest corner.
pub fn derivative_identity_check(
    nu: f64,
    mp: &ModelParams,
    mu_collision: f64,
    mu_comprehensive: f64,
    step: f64,
    offset: f64,
) -> Result<f64> {
    let fd = FiniteDifference {
        step,
        offset,
        ..FiniteDifference::default()
    };
    let ev = derivative_identity(
        PreferenceType::Eu,
        Corner::Cheapest,
        nu,
        mp,
        [mu_collision, mu_comprehensive],
        &fd,
        ChoiceSource::Bundle,
    )?;
    Ok(ev.discrepancy)
}

/// Discrepancies of the identity at `zeta` for the base settings and
/// `refinements` successive halvings of step and offset.
pub fn identity_refinements(
    ptype: PreferenceType,
    zeta: f64,
    mp: &ModelParams,
    claim_probs: [f64; 2],
    fd: &FiniteDifference,
    refinements: u32,
) -> Result<Vec<f64>> {
    (0..=refinements)
        .map(|k| {
            derivative_identity(ptype, Corner::Cheapest, zeta, mp, claim_probs, &fd.refined(k), ChoiceSource::Bundle)
                .map(|e| e.discrepancy)
        })
        .collect()
}

/// Type-share recovery at one pair of matched coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaPoint {
    pub level: f64,
    pub nu: f64,
    pub omega: f64,
    pub alpha_hat: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaRecovery {
    pub alpha: f64,
    pub alpha_hat: f64,
    pub points: Vec<AlphaPoint>,
}

/// Recovers the EU share from the identity at matched quantiles of the two
/// coefficient distributions.
///
/// With the consideration probabilities equal across types the two
/// left-hand sides share the same consideration factor. Dividing each by its
/// known cutoff slope and by its normalized density leaves `alpha K` and
/// `(1 - alpha) K`, whose ratio gives the share. The reported estimate is the
/// mean over `levels`.
pub fn type_share_check(
    mp: &ModelParams,
    claim_probs: [f64; 2],
    levels: &[f64],
    fd: &FiniteDifference,
) -> Result<AlphaRecovery> {
    if levels.is_empty() || levels.iter().any(|&q| !(q > 0.0 && q < 1.0)) {
        return Err(Error::invalid("quantile levels", "need at least one level inside (0, 1)"));
    }
    let f = mp.preferences.distribution(PreferenceType::Eu);
    let g = mp.preferences.distribution(PreferenceType::Dt);
    let points = levels
        .par_iter()
        .map(|&level| {
            let (nu, omega) = (f.quantile(level), g.quantile(level));
            let one = derivative_identity(PreferenceType::Eu, Corner::Cheapest, nu, mp, claim_probs, fd, ChoiceSource::Bundle)?;
            let zero = derivative_identity(PreferenceType::Dt, Corner::Cheapest, omega, mp, claim_probs, fd, ChoiceSource::Bundle)?;
            let e1 = one.scaled_density() / one.density;
            let e0 = zero.scaled_density() / zero.density;
            Ok(AlphaPoint {
                level,
                nu,
                omega,
                alpha_hat: e1 / (e1 + e0),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let alpha_hat = points.iter().map(|p| p.alpha_hat).sum::<f64>() / points.len() as f64;
    Ok(AlphaRecovery {
        alpha: mp.preferences.alpha,
        alpha_hat,
        points,
    })
}

/// Density recovered up to scale through the cheapest and the most
/// expensive corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRecovery {
    pub grid: Vec<f64>,
    pub cheapest: Vec<f64>,
    pub expensive: Vec<f64>,
    pub max_gap: f64,
}

/// Recovers the EU density on `grid` through both corners, normalizes each
/// channel to unit mean on the grid and returns the largest pointwise gap.
pub fn density_recovery_cross_check(
    mp: &ModelParams,
    claim_probs: [f64; 2],
    grid: &[f64],
    fd: &FiniteDifference,
    source: ChoiceSource,
) -> Result<DensityRecovery> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "empty"));
    }
    let channel = |corner: Corner| -> Result<Vec<f64>> {
        let raw = grid
            .par_iter()
            .map(|&nu| {
                derivative_identity(PreferenceType::Eu, corner, nu, mp, claim_probs, fd, source).map(|e| e.scaled_density())
            })
            .collect::<Result<Vec<_>>>()?;
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        Ok(raw.into_iter().map(|v| v / mean).collect())
    };
    let cheapest = channel(Corner::Cheapest)?;
    let expensive = channel(Corner::Expensive)?;
    let max_gap = cheapest
        .iter()
        .zip(&expensive)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(DensityRecovery {
        grid: grid.to_vec(),
        cheapest,
        expensive,
        max_gap,
    })
}

/// Direction in which a check's measurement is compared to its tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// Passes when the measurement does not exceed the tolerance.
    AtMost,
    /// Passes when the measurement exceeds the tolerance.
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub discrepancy: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, discrepancy: f64, tolerance: f64, bound: Bound, detail: impl Into<String>) -> Self {
        let pass = match bound {
            Bound::AtMost => discrepancy <= tolerance,
            Bound::Above => discrepancy > tolerance,
        };
        Check {
            name: name.into(),
            pass,
            discrepancy,
            tolerance,
            bound,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub checks: Vec<Check>,
}

impl DiagnosticsReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Fixed-width text table, one row per check.
    pub fn to_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:<4}  {:>12}  {:>2}  {:>10}  detail", "check", "pass", "measured", "", "tolerance");
        for c in &self.checks {
            let op = match c.bound {
                Bound::AtMost => "<=",
                Bound::Above => ">",
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:<4}  {:>12.4e}  {:>2}  {:>10.2e}  {}",
                c.name,
                if c.pass { "ok" } else { "FAIL" },
                c.discrepancy,
                op,
                c.tolerance,
                c.detail
            );
        }
        out
    }
}

/// Settings for [`assumption_battery`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatteryOptions {
    /// Coefficients checked per type, placed at evenly spaced quantiles.
    pub coefficient_points: usize,
    /// Quantile range of the coefficient interval that must be covered.
    pub coverage_range: (f64, f64),
    /// Relative radius of the ball around each locus point.
    pub coverage_radius: f64,
    /// Smallest relative separation between cutoffs that counts as distinct.
    pub separation_tolerance: f64,
    /// Points in the single-crossing scan.
    pub scp_points: usize,
}

impl Default for BatteryOptions {
    fn default() -> Self {
        BatteryOptions {
            coefficient_points: 12,
            coverage_range: (0.05, 0.95),
            coverage_radius: 0.1,
            separation_tolerance: 1e-6,
            scp_points: 2000,
        }
    }
}

fn quantile_grid(mp: &ModelParams, ptype: PreferenceType, range: (f64, f64), n: usize) -> Vec<f64> {
    let dist = mp.preferences.distribution(ptype);
    (0..n)
        .map(|k| {
            let t = if n == 1 { 0.5 } else { k as f64 / (n - 1) as f64 };
            dist.quantile(range.0 + t * (range.1 - range.0))
        })
        .collect()
}

/// Smallest relative gap between cutoffs of the cheapest bundle against every
/// other bundle for `ptype` at base prices `x`. Cutoffs of the three
/// neighbours are exempt from comparison with each other when `locus_type`
/// equals `ptype`, since they coincide there by construction.
fn cutoff_separation(hm: &HouseholdMenu, ptype: PreferenceType, locus_type: PreferenceType) -> f64 {
    let n2 = hm.n_alternatives(Context::Comprehensive);
    let neighbours = [n2, 1, n2 + 1];
    let mut values: Vec<(usize, f64)> = Vec::new();
    for j in 1..hm.n_bundles() {
        match bundle_cutoff_in(hm, 0, j, ptype) {
            Ok(v) => values.push((j, v)),
            Err(Error::MultipleCrossings { roots }) => values.extend(roots.into_iter().map(|v| (j, v))),
            Err(_) => {}
        }
    }
    let mut min_gap = f64::INFINITY;
    for (i, &(ja, va)) in values.iter().enumerate() {
        for &(jb, vb) in &values[i + 1..] {
            if ptype == locus_type && neighbours.contains(&ja) && neighbours.contains(&jb) {
                continue;
            }
            let scale = va.abs().max(vb.abs()).max(1e-300);
            min_gap = min_gap.min((va - vb).abs() / scale);
        }
    }
    min_gap
}

/// Runs the assumption checks for every claim-probability pair in `mu_grid`
/// and base-price pair in `x_grid`, and classifies the consideration branch.
///
/// - `triplet`: every triplet including the highest deductible has each
///   member preferred by some coefficient, per context and type.
/// - `single-crossing`: no pair of alternatives swaps order twice.
/// - `distinct-contexts`: at each locus point of one type the cutoffs of the
///   cheapest bundle against all others are pairwise distinct for the other
///   type, and distinct apart from the three neighbours for the same type.
/// - `support-coverage`: the widest run of coefficients over the central
///   quantile range whose locus points all have an observed base-price pair
///   within the relative radius. Passes when that interval is
///   non-degenerate for every type and claim-probability pair; the interval
///   is where the density is identified.
/// - `consideration-branch`: the consideration grid satisfies one branch.
pub fn assumption_battery(
    mp: &ModelParams,
    mu_grid: &[[f64; 2]],
    x_grid: &[[f64; 2]],
    opts: &BatteryOptions,
) -> Result<DiagnosticsReport> {
    if mu_grid.is_empty() || x_grid.is_empty() {
        return Err(Error::invalid("grid", "claim-probability and base-price grids must be non-empty"));
    }
    let mut checks = Vec::new();

    let mut triplet_fail = 0usize;
    let mut triplet_total = 0usize;
    let mut scp_fail = 0usize;
    let mut scp_total = 0usize;
    for ptype in PreferenceType::ALL {
        let upper = ptype.support_upper();
        let scan: Vec<f64> = (0..opts.scp_points)
            .map(|k| upper * (k as f64 + 0.5) / opts.scp_points as f64)
            .collect();
        for mu in mu_grid {
            for x in x_grid {
                for ctx in Context::ALL {
                    let c = ctx.index();
                    triplet_total += 1;
                    if !triplet_check(&mp.menu, ctx, x[c], mu[c], ptype) {
                        triplet_fail += 1;
                    }
                    let report = scp_verify(mp.menu.context(ctx), x[c], mu[c], ptype, &scan)?;
                    scp_total += report.pairs_checked;
                    scp_fail += report.violations.len();
                }
            }
        }
    }
    checks.push(Check::new(
        "triplet",
        triplet_fail as f64,
        0.0,
        Bound::AtMost,
        format!("{triplet_fail} of {triplet_total} context menus fail"),
    ));
    checks.push(Check::new(
        "single-crossing",
        scp_fail as f64,
        0.0,
        Bound::AtMost,
        format!("{scp_fail} of {scp_total} pairs cross more than once"),
    ));

    let mut min_sep = f64::INFINITY;
    let mut loci = 0usize;
    let mut narrowest = f64::INFINITY;
    let mut ranges = Vec::new();
    let step = if opts.coefficient_points > 1 {
        (opts.coverage_range.1 - opts.coverage_range.0) / (opts.coefficient_points - 1) as f64
    } else {
        0.0
    };
    for locus_type in PreferenceType::ALL {
        let zetas = quantile_grid(mp, locus_type, opts.coverage_range, opts.coefficient_points);
        for mu in mu_grid {
            let mut run = 0usize;
            let mut best = (0usize, 0usize);
            for (k, &zeta) in zetas.iter().enumerate() {
                let covered = match locus_point(&mp.menu, Corner::Cheapest, locus_type, zeta, *mu) {
                    Ok(point) => {
                        loci += 1;
                        let x0 = point.base_prices;
                        let hm = HouseholdMenu::new(&mp.menu, x0, *mu)?;
                        for ptype in PreferenceType::ALL {
                            min_sep = min_sep.min(cutoff_separation(&hm, ptype, locus_type));
                        }
                        x_grid
                            .iter()
                            .any(|x| (0..2).all(|c| (x[c] - x0[c]).abs() <= opts.coverage_radius * x0[c]))
                    }
                    Err(_) => false,
                };
                run = if covered { run + 1 } else { 0 };
                if run > best.1 - best.0 {
                    best = (k + 1 - run, k + 1);
                }
            }
            let mass = if best.1 > best.0 { (best.1 - best.0 - 1) as f64 * step } else { 0.0 };
            narrowest = narrowest.min(mass);
            if best.1 > best.0 {
                ranges.push(format!(
                    "{} [{:.4}, {:.4}]",
                    locus_type.label(),
                    zetas[best.0],
                    zetas[best.1 - 1]
                ));
            } else {
                ranges.push(format!("{} none", locus_type.label()));
            }
        }
    }
    checks.push(Check::new(
        "distinct-contexts",
        min_sep,
        opts.separation_tolerance,
        Bound::Above,
        format!("smallest relative cutoff gap over {loci} locus points"),
    ));
    checks.push(Check::new(
        "support-coverage",
        narrowest,
        0.0,
        Bound::Above,
        format!("quantile mass of the widest covered interval; {}", ranges.join(", ")),
    ));

    let branch = crate::consideration::mic_branch(&mp.consideration)?;
    checks.push(Check::new(
        "consideration-branch",
        if branch == MicBranch::Violated { 1.0 } else { 0.0 },
        0.0,
        Bound::AtMost,
        format!("{branch:?}").to_lowercase(),
    ));
    Ok(DiagnosticsReport { checks })
}

/// Settings for [`identification_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentificationOptions {
    pub claim_probs: [f64; 2],
    pub fd: FiniteDifference,
    /// Coefficients per type at which the identity is evaluated.
    pub points: usize,
    pub identity_tolerance: f64,
    pub alpha_tolerance: f64,
    pub density_tolerance: f64,
}

impl Default for IdentificationOptions {
    fn default() -> Self {
        IdentificationOptions {
            claim_probs: [0.081, 0.023],
            fd: FiniteDifference::default(),
            points: 10,
            identity_tolerance: 1e-2,
            alpha_tolerance: 2e-2,
            density_tolerance: 5e-2,
        }
    }
}

/// Evenly spaced quantile levels `(k + 0.5) / n`.
pub fn central_levels(n: usize) -> Vec<f64> {
    (0..n).map(|k| (k as f64 + 0.5) / n as f64).collect()
}

/// Identity, type-share and density checks for a model, as report rows.
pub fn identification_report(mp: &ModelParams, opts: &IdentificationOptions) -> Result<DiagnosticsReport> {
    let levels = central_levels(opts.points);
    let mut checks = Vec::new();
    let violated = mic_branch(&mp.consideration)? == MicBranch::Violated;
    if violated {
        let detail = "consideration probabilities at the cheapest corner satisfy neither identification branch";
        for ptype in PreferenceType::ALL {
            if mp.preferences.weight(ptype) > 0.0 {
                let name = format!("identity-{}", ptype.label().to_lowercase());
                checks.push(Check::new(name, f64::INFINITY, opts.identity_tolerance, Bound::AtMost, detail));
            }
        }
        checks.push(Check::new("type-share", f64::INFINITY, opts.alpha_tolerance, Bound::AtMost, detail));
    }
    for ptype in PreferenceType::ALL {
        if mp.preferences.weight(ptype) == 0.0 || violated {
            continue;
        }
        let dist = mp.preferences.distribution(ptype);
        let worst = levels
            .par_iter()
            .map(|&q| {
                derivative_identity(ptype, Corner::Cheapest, dist.quantile(q), mp, opts.claim_probs, &opts.fd, ChoiceSource::Bundle)
                    .map(|e| e.discrepancy)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        checks.push(Check::new(
            format!("identity-{}", ptype.label().to_lowercase()),
            worst,
            opts.identity_tolerance,
            Bound::AtMost,
            format!("largest relative discrepancy over {} quantiles", levels.len()),
        ));
    }
    if !violated {
        let alpha = type_share_check(mp, opts.claim_probs, &levels, &opts.fd)?;
        checks.push(Check::new(
            "type-share",
            (alpha.alpha_hat - alpha.alpha).abs(),
            opts.alpha_tolerance,
            Bound::AtMost,
            format!("recovered {:.4} against {:.4}", alpha.alpha_hat, alpha.alpha),
        ));
    }
    if mp.preferences.alpha > 0.0 {
        let grid = quantile_grid(mp, PreferenceType::Eu, (0.05, 0.95), 20);
        match density_recovery_cross_check(mp, opts.claim_probs, &grid, &opts.fd, ChoiceSource::Bundle) {
            Ok(d) => checks.push(Check::new(
                "density-two-corners",
                d.max_gap,
                opts.density_tolerance,
                Bound::AtMost,
                "largest gap between unit-mean recovered densities",
            )),
            Err(e) => checks.push(Check::new("density-two-corners", f64::INFINITY, opts.density_tolerance, Bound::AtMost, e.to_string())),
        }
    }
    Ok(DiagnosticsReport { checks })
}

//! Maximum likelihood estimation and subsampling confidence intervals.

pub mod likelihood;
pub mod optimize;
pub mod transform;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta::BetaShape;
use crate::choice::{ModelParams, PreferenceParams};
use crate::consideration::ConsiderationParams;
use crate::error::{Error, Result};
use crate::household::Household;
use crate::menu::MenuConfig;
use crate::partition::PartitionOptions;

pub use likelihood::{Evaluation, Likelihood, LikelihoodData, LIKELIHOOD_FLOOR};
pub use optimize::{Method, StopRule};
pub use transform::{FreeParams, Layout};

/// Estimation settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationOptions {
    pub method: Method,
    pub max_iter: usize,
    pub max_evals: usize,
    /// Stationarity tolerance on the per-household log-likelihood.
    pub tol: f64,
    /// Projected gradient tolerance for the gradient method.
    pub gtol: f64,
    pub multistart: usize,
    /// Standard deviation of start perturbations in unconstrained
    /// coordinates.
    pub jitter: f64,
    pub free: FreeParams,
    /// Scan resolution for cutoffs.
    pub partition_grid: usize,
    pub partition_depth: u32,
    pub seed: u64,
}

impl Default for EstimationOptions {
    fn default() -> Self {
        EstimationOptions {
            method: Method::Lbfgs,
            max_iter: 1000,
            max_evals: 3000,
            tol: 1e-10,
            gtol: 1e-7,
            multistart: 5,
            jitter: 0.5,
            free: FreeParams::default(),
            partition_grid: PartitionOptions::PRECISE.grid,
            partition_depth: PartitionOptions::PRECISE.max_depth,
            seed: 0,
        }
    }
}

impl EstimationOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iter == 0 || self.max_evals == 0 || self.multistart == 0 {
            return Err(Error::invalid("estimation options", "budgets and start count must be positive"));
        }
        if !(self.tol > 0.0 && self.gtol > 0.0 && self.jitter >= 0.0) {
            return Err(Error::invalid("estimation options", "tolerances must be positive"));
        }
        if self.partition_grid == 0 {
            return Err(Error::invalid("estimation options", "partition grid must be positive"));
        }
        Ok(())
    }

    pub fn partition(&self) -> PartitionOptions {
        PartitionOptions {
            grid: self.partition_grid,
            max_depth: self.partition_depth,
        }
    }

    fn stop_rule(&self) -> StopRule {
        StopRule {
            max_iter: self.max_iter,
            max_evals: self.max_evals,
            ftol: self.tol,
            gtol: self.gtol,
        }
    }
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StartSummary {
    pub loglik: f64,
    pub converged: bool,
    pub n_iter: usize,
    pub n_evals: usize,
}

/// Interval for one reported parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamInterval {
    pub name: String,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Subsampling intervals with bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleIntervals {
    pub level: f64,
    pub subsample_size: usize,
    pub n_succeeded: usize,
    pub n_failed: usize,
    pub intervals: Vec<ParamInterval>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub params: ModelParams,
    pub loglik: f64,
    pub converged: bool,
    pub n_evals: usize,
    pub n_floored: usize,
    pub n_households: usize,
    pub starts: Vec<StartSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<SubsampleIntervals>,
}

/// Neutral starting values: equal type shares, moderate Beta shapes and
/// consideration probability 0.5 for every bundle except the pinned one.
pub fn default_start(menu: &MenuConfig) -> ModelParams {
    let (n1, n2) = menu.shape();
    let mut phi = vec![0.5; n1 * n2];
    phi[0] = 1.0;
    ModelParams {
        preferences: PreferenceParams {
            alpha: 0.5,
            nu: BetaShape {
                shape1: 2.0,
                shape2: 8.0,
            },
            omega: BetaShape {
                shape1: 2.0,
                shape2: 2.0,
            },
        },
        consideration: ConsiderationParams {
            n_collision: n1,
            n_comprehensive: n2,
            phi,
        },
        menu: menu.clone(),
    }
}

/// Log-likelihood of `data` at `mp`, with each household's likelihood
/// floored at [`LIKELIHOOD_FLOOR`]. Returns the value and the number of
/// floored households. The value does not depend on household order.
pub fn loglik(mp: &ModelParams, data: &[Household], partition: PartitionOptions) -> Result<(f64, usize)> {
    mp.validate()?;
    let cache = LikelihoodData::build(data, &mp.menu, partition)?;
    Ok(loglik_cached(mp, &cache))
}

/// [`loglik`] on precomputed data.
pub fn loglik_cached(mp: &ModelParams, cache: &LikelihoodData) -> (f64, usize) {
    let lik = Likelihood::new(cache);
    let contributions = lik.contributions_at(&mp.preferences, mp.consideration.phi.clone());
    let floored = contributions.iter().filter(|l| **l < LIKELIHOOD_FLOOR).count();
    let mut terms: Vec<f64> = contributions.into_iter().map(|l| l.max(LIKELIHOOD_FLOOR).ln()).collect();
    (likelihood::order_free_sum(&mut terms), floored)
}

/// Fits the model by maximum likelihood from `init`, keeping the best of
/// `opts.multistart` runs. The first run starts at `init`; the others start
/// from seeded perturbations of it.
pub fn fit(data: &[Household], init: &ModelParams, opts: &EstimationOptions) -> Result<EstimationResult> {
    init.validate().map_err(|e| Error::invalid("initial parameters", e.to_string()))?;
    opts.validate()?;
    if data.is_empty() {
        return Err(Error::invalid("data", "no households"));
    }
    let cache = LikelihoodData::build(data, &init.menu, opts.partition())?;
    fit_cached(&cache, init, opts)
}

/// [`fit`] on precomputed data.
pub fn fit_cached(cache: &LikelihoodData, init: &ModelParams, opts: &EstimationOptions) -> Result<EstimationResult> {
    let lik = Likelihood::new(cache);
    let layout = lik.layout().clone();
    let x0 = layout.encode(init)?;
    let (lo, hi) = layout.bounds();
    let free = layout.free_mask(opts.free);
    let n = cache.len() as f64;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<Vec<f64>> = (0..opts.multistart)
        .map(|s| {
            let mut x = x0.clone();
            if s > 0 {
                for k in 0..x.len() {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    if free[k] {
                        x[k] = (x[k] + opts.jitter * z).clamp(lo[k], hi[k]);
                    }
                }
            }
            x
        })
        .collect();

    let rule = opts.stop_rule();
    let runs: Vec<optimize::Minimum> = starts
        .iter()
        .map(|x| match opts.method {
            Method::Lbfgs => optimize::lbfgs(
                |x| {
                    let e = lik.evaluate(x, Some(&free));
                    let g = e.gradient.unwrap_or_default().into_iter().map(|v| -v / n).collect();
                    (-e.loglik / n, g)
                },
                x,
                &lo,
                &hi,
                &free,
                rule,
            ),
            Method::NelderMead => {
                optimize::nelder_mead(|x| -lik.evaluate(x, None).loglik / n, x, &lo, &hi, &free, rule)
            }
        })
        .collect();

    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.f.total_cmp(&b.1.f).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Estimation("no optimizer runs".into()))?;
    let mut params = layout.decode(&runs[best].x, init);
    restore_fixed(&mut params, init, opts.free);
    let (loglik, n_floored) = loglik_cached(&params, cache);
    if !loglik.is_finite() {
        return Err(Error::Estimation("non-finite log-likelihood at the optimum".into()));
    }
    Ok(EstimationResult {
        params,
        loglik,
        converged: runs[best].converged,
        n_evals: runs.iter().map(|r| r.n_evals).sum(),
        n_floored,
        n_households: cache.len(),
        starts: runs
            .iter()
            .map(|r| StartSummary {
                loglik: -r.f * n,
                converged: r.converged,
                n_iter: r.n_iter,
                n_evals: r.n_evals,
            })
            .collect(),
        intervals: None,
    })
}

/// Copies fixed parameter groups from `init`, undoing transform roundoff.
fn restore_fixed(params: &mut ModelParams, init: &ModelParams, free: FreeParams) {
    if !free.alpha {
        params.preferences.alpha = init.preferences.alpha;
    }
    if !free.nu {
        params.preferences.nu = init.preferences.nu;
    }
    if !free.omega {
        params.preferences.omega = init.preferences.omega;
    }
    if !free.consideration {
        params.consideration = init.consideration.clone();
    }
}

/// Reported scalar parameters: type share, Beta shapes, coefficient means
/// and every consideration probability.
pub fn reported_values(mp: &ModelParams) -> Vec<(String, f64)> {
    let p = &mp.preferences;
    let mut out = vec![
        ("alpha".to_string(), p.alpha),
        ("nu_shape1".to_string(), p.nu.shape1),
        ("nu_shape2".to_string(), p.nu.shape2),
        ("omega_shape1".to_string(), p.omega.shape1),
        ("omega_shape2".to_string(), p.omega.shape2),
        ("nu_mean".to_string(), p.distribution(crate::PreferenceType::Eu).mean()),
        ("omega_mean".to_string(), p.distribution(crate::PreferenceType::Dt).mean()),
    ];
    let menu = &mp.menu;
    for (j, &phi) in mp.consideration.phi.iter().enumerate() {
        let (d1, d2) = menu.deductibles(menu.bundle_at(j));
        out.push((format!("phi_{d1}_{d2}"), phi));
    }
    out
}

/// Subsampling confidence intervals at level `level`.
///
/// Each subsample of size `floor(frac * n)` is drawn without replacement and
/// refitted from `fitted.params` with a single start. With `m` the subsample
/// size, the quantiles of `theta_m - theta_n` are rescaled by `sqrt(m / n)`
/// and reflected around the full-sample estimate. Subsamples whose fit fails
/// are dropped and counted. Parameters that are not free, including the
/// pinned consideration probability, get degenerate intervals at the
/// estimate.
pub fn subsample_ci(
    data: &[Household],
    fitted: &EstimationResult,
    opts: &EstimationOptions,
    n_subsamples: usize,
    frac: f64,
    level: f64,
) -> Result<SubsampleIntervals> {
    let cache = LikelihoodData::build(data, &fitted.params.menu, opts.partition())?;
    subsample_ci_cached(&cache, fitted, opts, n_subsamples, frac, level)
}

/// [`subsample_ci`] on precomputed data.
pub fn subsample_ci_cached(
    cache: &LikelihoodData,
    fitted: &EstimationResult,
    opts: &EstimationOptions,
    n_subsamples: usize,
    frac: f64,
    level: f64,
) -> Result<SubsampleIntervals> {
    if !(frac > 0.0 && frac < 1.0) || !(level > 0.0 && level < 1.0) || n_subsamples < 2 {
        return Err(Error::invalid(
            "subsampling",
            "fraction and level must lie in (0, 1) and at least two subsamples are needed",
        ));
    }
    let n = cache.len();
    let m = (frac * n as f64).floor() as usize;
    if m < 1 {
        return Err(Error::invalid("subsampling", "subsample is empty"));
    }
    let sub_opts = EstimationOptions {
        multistart: 1,
        ..opts.clone()
    };
    let fits: Vec<Option<ModelParams>> = (0..n_subsamples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5355_4253_414d_504c);
            rng.set_stream(s as u64);
            let mut idx = sample(&mut rng, n, m).into_vec();
            idx.sort_unstable();
            let sub = cache.subset(&idx);
            fit_cached(&sub, &fitted.params, &sub_opts).ok().map(|r| r.params)
        })
        .collect();
    let succeeded: Vec<ModelParams> = fits.into_iter().flatten().collect();
    let n_failed = n_subsamples - succeeded.len();
    if succeeded.len() < 2 {
        return Err(Error::Estimation(format!("{n_failed} of {n_subsamples} subsample fits failed")));
    }
    let full = reported_values(&fitted.params);
    let scale = (m as f64 / n as f64).sqrt();
    let layout = Layout::new(fitted.params.menu.n_bundles());
    let free = layout.free_mask(opts.free);
    let is_free = |name: &str, j: Option<usize>| match (name, j) {
        ("alpha", _) => free[transform::ALPHA],
        (n, _) if n.starts_with("nu") => free[transform::NU[0]],
        (n, _) if n.starts_with("omega") => free[transform::OMEGA[0]],
        (_, Some(j)) => layout.phi_coord(j).is_some_and(|c| free[c]),
        _ => false,
    };
    let draws: Vec<Vec<(String, f64)>> = succeeded.iter().map(reported_values).collect();
    let intervals = full
        .iter()
        .enumerate()
        .map(|(k, (name, est))| {
            let phi_index = k.checked_sub(7);
            if !is_free(name, phi_index) {
                return ParamInterval {
                    name: name.clone(),
                    estimate: *est,
                    lower: *est,
                    upper: *est,
                };
            }
            let mut dev: Vec<f64> = draws.iter().map(|d| d[k].1 - est).collect();
            dev.sort_by(f64::total_cmp);
            let q = |p: f64| quantile_sorted(&dev, p);
            let tail = (1.0 - level) / 2.0;
            ParamInterval {
                name: name.clone(),
                estimate: *est,
                lower: est - scale * q(1.0 - tail),
                upper: est - scale * q(tail),
            }
        })
        .collect();
    Ok(SubsampleIntervals {
        level,
        subsample_size: m,
        n_succeeded: succeeded.len(),
        n_failed,
        intervals,
    })
}

fn quantile_sorted(v: &[f64], p: f64) -> f64 {
    let pos = p * (v.len() - 1) as f64;
    let i = pos.floor() as usize;
    let t = pos - i as f64;
    if i + 1 < v.len() {
        v[i] * (1.0 - t) + v[i + 1] * t
    } else {
        v[i]
    }
}

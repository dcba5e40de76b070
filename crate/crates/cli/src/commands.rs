use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use bundlechoice::diagnostics::{self, BatteryOptions, DiagnosticsReport, FiniteDifference, IdentificationOptions};
use bundlechoice::estimation::{self, EstimationOptions, EstimationResult, Method};
use bundlechoice::io::{self, Document};
use bundlechoice::partition::PartitionOptions;
use bundlechoice::simulation::{self, ConsiderationRegime, PopulationConfig};
use bundlechoice::welfare::{self, Baseline, MiddleRule, ValuationMode, WelfareOptions, WelfareReport, WtpRow};
use bundlechoice::consideration::NarrowConsideration;
use bundlechoice::{Household, MenuConfig, ModelParams};

use crate::{plots, Outcome, UsageError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeArg {
    /// Bundle-level consideration with the model's probabilities.
    Broad,
    /// Context-by-context consideration with the model's marginals.
    Narrow,
    /// Only bundles with collision deductible at least the comprehensive one.
    Triangular,
    /// Every bundle is considered.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Lbfgs,
    NelderMead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ValuationArg {
    ChoiceUtility,
    Npv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MiddleRuleArg {
    AtLeastOne,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BaselineArg {
    Limited,
    Full,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Number of households [default: 10000].
    #[arg(long)]
    pub n: Option<usize>,
    /// Seed for population and choice draws [default: 1].
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = RegimeArg::Broad)]
    pub regime: RegimeArg,
    /// Model parameters as JSON. Defaults to the calibrated set.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Menu as TOML, replacing the menu in the parameters.
    #[arg(long)]
    pub menu: Option<PathBuf>,
    /// Population settings as JSON. `--n` and `--seed` override its fields.
    #[arg(long)]
    pub population: Option<PathBuf>,
    /// Household CSV to write.
    #[arg(long, default_value = "households.csv")]
    pub out: PathBuf,
    /// JSON file receiving the true parameters and bundle shares.
    #[arg(long, default_value = "truth.json")]
    pub truth: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Household CSV with observed choices.
    #[arg(long)]
    pub data: PathBuf,
    /// Menu as TOML. Defaults to the embedded menu.
    #[arg(long)]
    pub menu: Option<PathBuf>,
    /// Starting parameters as JSON. Defaults to a neutral start.
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// True parameters as JSON, printed next to the estimates.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MethodArg::Lbfgs)]
    pub method: MethodArg,
    /// Optimizer runs; all but the first start from perturbed values.
    #[arg(long, default_value_t = 5)]
    pub starts: usize,
    /// Seed for start perturbations and subsampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 3000)]
    pub max_evals: usize,
    /// Stationarity tolerance on the per-household log-likelihood.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Number of subsample refits for confidence intervals. Zero skips them.
    #[arg(long, default_value_t = 0)]
    pub subsamples: usize,
    #[arg(long, default_value_t = 0.1)]
    pub subsample_frac: f64,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Output JSON.
    #[arg(long, default_value = "fit.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// Model parameters as JSON. Defaults to the calibrated set.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, default_value_t = 0.081)]
    pub mu_collision: f64,
    #[arg(long, default_value_t = 0.023)]
    pub mu_comprehensive: f64,
    /// Relative finite-difference step in the collision price.
    #[arg(long, default_value_t = 1e-4)]
    pub step: f64,
    /// Relative offset in the comprehensive price.
    #[arg(long, default_value_t = 1e-3)]
    pub offset: f64,
    /// Coefficients per type in the identity checks.
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    /// Household CSV whose base prices form the price grid. Defaults to a
    /// regular grid.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Consideration probabilities below this value are set to zero before
    /// the checks, for estimates that sit numerically at the boundary.
    #[arg(long, default_value_t = 0.0)]
    pub zero_below: f64,
    /// Output JSON.
    #[arg(long, default_value = "diagnostics.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct WelfareArgs {
    /// Model parameters as JSON. Defaults to the calibrated set.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Household CSV. Without it a population is drawn.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Households to draw when no data is given.
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = ValuationArg::ChoiceUtility)]
    pub valuation: ValuationArg,
    #[arg(long, value_enum, default_value_t = MiddleRuleArg::AtLeastOne)]
    pub middle_rule: MiddleRuleArg,
    #[arg(long, value_enum, default_value_t = BaselineArg::Limited)]
    pub baseline: BaselineArg,
    /// Gauss-Legendre nodes per constant-ranking interval.
    #[arg(long, default_value_t = 8)]
    pub nodes: usize,
    /// Output JSON.
    #[arg(long, default_value = "welfare.json")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Model parameters as JSON. Defaults to the calibrated set.
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Household CSV for observed shares. Without it choices are simulated.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Households to simulate when no data is given.
    #[arg(long, default_value_t = 5000)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Claim probabilities used for the indifference loci.
    #[arg(long, default_value_t = 0.081)]
    pub mu_collision: f64,
    #[arg(long, default_value_t = 0.023)]
    pub mu_comprehensive: f64,
    /// Grid points per curve.
    #[arg(long, default_value_t = 99)]
    pub points: usize,
    #[arg(long, default_value = "report")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DefaultsItem {
    Menu,
    Params,
    Population,
    Estimation,
    Welfare,
    Diagnostics,
    All,
}

#[derive(Debug, Args)]
pub struct PrintDefaultsArgs {
    #[arg(value_enum, default_value_t = DefaultsItem::All)]
    pub what: DefaultsItem,
}

/// Bundle share keyed by deductibles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleShare {
    pub collision_deductible: f64,
    pub comprehensive_deductible: f64,
    pub share: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub population: PopulationConfig,
    pub regime: ConsiderationRegime,
    pub choice_seed: u64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateTruth {
    pub params: ModelParams,
    pub shares: Vec<BundleShare>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsampleSettings {
    pub subsamples: usize,
    pub fraction: f64,
    pub level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub data: PathBuf,
    pub init: ModelParams,
    pub estimation: EstimationOptions,
    pub subsampling: Option<SubsampleSettings>,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum PriceGrid {
    Data { path: PathBuf, points: usize },
    Regular { collision: [f64; 3], comprehensive: [f64; 3] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseConfig {
    pub params: ModelParams,
    pub zero_below: f64,
    pub identification: IdentificationOptions,
    pub battery: BatteryOptions,
    pub price_grid: PriceGrid,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum HouseholdSource {
    Data { path: PathBuf },
    Simulated { population: PopulationConfig, choice_seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelfareConfig {
    pub params: ModelParams,
    pub households: HouseholdSource,
    pub options: WelfareOptions,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WelfareOutput {
    pub wtp: Vec<WtpRow>,
    pub report: WelfareReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub params: ModelParams,
    pub households: HouseholdSource,
    pub claim_probs: [f64; 2],
    pub points: usize,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFiles {
    pub files: Vec<String>,
}

const REGULAR_COLLISION: [f64; 3] = [50.0, 16.0, 60.0];
const REGULAR_COMPREHENSIVE: [f64; 3] = [25.0, 13.0, 60.0];

/// Reads model parameters from a bare parameter object, a document whose
/// `params` field holds them, or a document whose `result.params` does.
pub fn load_params(path: &Path) -> anyhow::Result<ModelParams> {
    let value: serde_json::Value = io::read_json(path)?;
    let node = value
        .pointer("/result/params")
        .or_else(|| value.get("params"))
        .unwrap_or(&value)
        .clone();
    let mp: ModelParams = serde_json::from_value(node)
        .map_err(bundlechoice::Error::from)
        .with_context(|| format!("{}: not a parameter file", path.display()))?;
    mp.validate().with_context(|| format!("{}", path.display()))?;
    Ok(mp)
}

fn params_or_default(path: Option<&Path>) -> anyhow::Result<ModelParams> {
    match path {
        Some(p) => load_params(p),
        None => Ok(simulation::calibrated_params()),
    }
}

fn menu_or_default(path: Option<&Path>) -> anyhow::Result<MenuConfig> {
    match path {
        Some(p) => Ok(io::read_menu(p)?),
        None => Ok(MenuConfig::default_menu()),
    }
}

fn read_data(path: &Path, menu: &MenuConfig) -> anyhow::Result<Vec<Household>> {
    let data = io::read_households_file(path, menu)?;
    if data.is_empty() {
        return Err(UsageError(format!("{}: no households", path.display())).into());
    }
    Ok(data)
}

fn write_document<C: Serialize, T: Serialize>(path: &Path, config: C, result: T) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(bundlechoice::Error::from)?;
    }
    io::write_json(path, &Document::new(config, result))?;
    Ok(())
}

fn shares_table(shares: &[f64], menu: &MenuConfig) -> Vec<BundleShare> {
    shares
        .iter()
        .enumerate()
        .map(|(j, &share)| {
            let (d1, d2) = menu.deductibles(menu.bundle_at(j));
            BundleShare {
                collision_deductible: d1,
                comprehensive_deductible: d2,
                share,
            }
        })
        .collect()
}

fn regime(arg: RegimeArg, mp: &ModelParams) -> ConsiderationRegime {
    match arg {
        RegimeArg::Broad => ConsiderationRegime::Broad,
        RegimeArg::Narrow => ConsiderationRegime::Narrow(NarrowConsideration::from_marginals(&mp.consideration)),
        RegimeArg::Triangular => ConsiderationRegime::Triangular,
        RegimeArg::Full => ConsiderationRegime::Full,
    }
}

fn simulated_households(mp: &ModelParams, n: usize, seed: u64) -> anyhow::Result<(Vec<Household>, HouseholdSource)> {
    let population = PopulationConfig {
        n,
        seed,
        ..PopulationConfig::default()
    };
    let pop = simulation::gen_population(&population)?;
    let data = simulation::simulate_choices(&pop, mp, &ConsiderationRegime::Broad, seed)?;
    Ok((
        data,
        HouseholdSource::Simulated {
            population,
            choice_seed: seed,
        },
    ))
}

pub fn simulate(args: &SimulateArgs) -> anyhow::Result<Outcome> {
    let mut mp = params_or_default(args.params.as_deref())?;
    if let Some(path) = &args.menu {
        mp.menu = io::read_menu(path)?;
        mp.validate().context("parameters do not fit the menu")?;
    }
    let mut population = match &args.population {
        Some(p) => io::read_json::<PopulationConfig>(p)?,
        None => PopulationConfig::default(),
    };
    if let Some(n) = args.n {
        population.n = n;
    }
    if let Some(seed) = args.seed {
        population.seed = seed;
    }
    let regime = regime(args.regime, &mp);
    let pop = simulation::gen_population(&population)?;
    let data = simulation::simulate_choices(&pop, &mp, &regime, population.seed)?;
    io::write_households_file(&args.out, &data, &mp.menu)?;

    let shares = shares_table(&simulation::choice_shares(&data, &mp.menu), &mp.menu);
    let config = SimulateConfig {
        choice_seed: population.seed,
        population,
        regime,
        threads: rayon::current_num_threads(),
    };
    write_document(&args.truth, config, SimulateTruth { params: mp, shares })?;
    println!("wrote {} households to {}", data.len(), args.out.display());
    Ok(Outcome::Done)
}

pub fn fit(args: &FitArgs) -> anyhow::Result<Outcome> {
    let menu = menu_or_default(args.menu.as_deref())?;
    let data = read_data(&args.data, &menu)?;
    let init = match &args.init {
        Some(p) => {
            let mut mp = load_params(p)?;
            mp.menu = menu.clone();
            mp.validate().context("starting parameters do not fit the menu")?;
            mp
        }
        None => estimation::default_start(&menu),
    };
    let opts = EstimationOptions {
        method: match args.method {
            MethodArg::Lbfgs => Method::Lbfgs,
            MethodArg::NelderMead => Method::NelderMead,
        },
        max_iter: args.max_iter,
        max_evals: args.max_evals,
        tol: args.tol,
        multistart: args.starts,
        seed: args.seed,
        ..EstimationOptions::default()
    };
    let subsampling = (args.subsamples > 0).then_some(SubsampleSettings {
        subsamples: args.subsamples,
        fraction: args.subsample_frac,
        level: args.level,
    });
    let truth = args.truth.as_deref().map(load_params).transpose()?;

    let mut result = estimation::fit(&data, &init, &opts)?;
    if let Some(s) = &subsampling {
        result.intervals = Some(estimation::subsample_ci(
            &data,
            &result,
            &opts,
            s.subsamples,
            s.fraction,
            s.level,
        )?);
    }
    print_estimates(&result, truth.as_ref());
    let converged = result.converged;
    let config = FitConfig {
        data: args.data.clone(),
        init,
        estimation: opts,
        subsampling,
        threads: rayon::current_num_threads(),
    };
    write_document(&args.out, config, &result)?;
    Ok(if converged { Outcome::Done } else { Outcome::NotConverged })
}

fn print_estimates(result: &EstimationResult, truth: Option<&ModelParams>) {
    let truth_values = truth.map(estimation::reported_values);
    let intervals = result.intervals.as_ref();
    println!(
        "log-likelihood {:.4} over {} households ({} floored), converged: {}",
        result.loglik, result.n_households, result.n_floored, result.converged
    );
    let mut header = format!("{:<16} {:>12}", "parameter", "estimate");
    if truth_values.is_some() {
        header.push_str(&format!(" {:>12}", "truth"));
    }
    if let Some(iv) = intervals {
        header.push_str(&format!("   {:.0}% interval", iv.level * 100.0));
    }
    println!("{header}");
    for (k, (name, value)) in estimation::reported_values(&result.params).iter().enumerate() {
        let mut line = format!("{name:<16} {value:>12.6}");
        if let Some(tv) = &truth_values {
            if let Some((_, t)) = tv.get(k) {
                line.push_str(&format!(" {t:>12.6}"));
            }
        }
        if let Some(p) = intervals.and_then(|iv| iv.intervals.iter().find(|p| &p.name == name)) {
            line.push_str(&format!("   [{:.6}, {:.6}]", p.lower, p.upper));
        }
        println!("{line}");
    }
}

pub fn diagnose(args: &DiagnoseArgs) -> anyhow::Result<Outcome> {
    let mut mp = params_or_default(args.params.as_deref())?;
    if !(args.zero_below >= 0.0 && args.zero_below < 1.0) {
        return Err(UsageError("--zero-below must lie in [0, 1)".into()).into());
    }
    for phi in mp.consideration.phi.iter_mut() {
        if *phi < args.zero_below {
            *phi = 0.0;
        }
    }
    let fd = FiniteDifference {
        step: args.step,
        offset: args.offset,
        partition: PartitionOptions::PRECISE,
    };
    fd.validate()?;
    let claim_probs = [args.mu_collision, args.mu_comprehensive];
    for mu in claim_probs {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(bundlechoice::Error::ProbabilityDomain(mu).into());
        }
    }
    if args.points == 0 {
        return Err(UsageError("--points must be positive".into()).into());
    }
    let identification = IdentificationOptions {
        claim_probs,
        fd,
        points: args.points,
        ..IdentificationOptions::default()
    };
    let battery = BatteryOptions::default();
    let (x_grid, price_grid) = match &args.data {
        Some(path) => {
            let data = read_data(path, &mp.menu)?;
            let grid: Vec<[f64; 2]> = data.iter().map(|h| h.base_prices()).collect();
            let points = grid.len();
            (grid, PriceGrid::Data { path: path.clone(), points })
        }
        None => (
            regular_grid(REGULAR_COLLISION, REGULAR_COMPREHENSIVE),
            PriceGrid::Regular {
                collision: REGULAR_COLLISION,
                comprehensive: REGULAR_COMPREHENSIVE,
            },
        ),
    };

    let mut report = diagnostics::identification_report(&mp, &identification)?;
    let assumptions = diagnostics::assumption_battery(&mp, &[claim_probs], &x_grid, &battery)?;
    report.checks.extend(assumptions.checks);
    print!("{}", report.to_table());
    let config = DiagnoseConfig {
        params: mp,
        zero_below: args.zero_below,
        identification,
        battery,
        price_grid,
        threads: rayon::current_num_threads(),
    };
    write_document::<_, &DiagnosticsReport>(&args.out, config, &report)?;
    Ok(Outcome::Done)
}

/// Grid `start + step * i` for `i < count` in each coordinate.
fn regular_grid(collision: [f64; 3], comprehensive: [f64; 3]) -> Vec<[f64; 2]> {
    let mut grid = Vec::new();
    for i in 0..collision[2] as usize {
        for j in 0..comprehensive[2] as usize {
            grid.push([
                collision[0] + collision[1] * i as f64,
                comprehensive[0] + comprehensive[1] * j as f64,
            ]);
        }
    }
    grid
}

pub fn welfare(args: &WelfareArgs) -> anyhow::Result<Outcome> {
    let mp = params_or_default(args.params.as_deref())?;
    let (data, households) = match &args.data {
        Some(path) => (read_data(path, &mp.menu)?, HouseholdSource::Data { path: path.clone() }),
        None => simulated_households(&mp, args.n, args.seed)?,
    };
    let options = WelfareOptions {
        valuation: match args.valuation {
            ValuationArg::ChoiceUtility => ValuationMode::ChoiceUtility,
            ValuationArg::Npv => ValuationMode::Npv,
        },
        middle_rule: match args.middle_rule {
            MiddleRuleArg::AtLeastOne => MiddleRule::AtLeastOne,
            MiddleRuleArg::Sum => MiddleRule::Sum,
        },
        baseline: match args.baseline {
            BaselineArg::Limited => Baseline::Limited,
            BaselineArg::Full => Baseline::Full,
        },
        nodes_per_interval: args.nodes,
        ..WelfareOptions::default()
    };
    let wtp = welfare::wtp_table(&mp.preferences);
    let report = welfare::welfare_report(&data, &mp, &options)?;

    println!("Excess willingness to pay for a 10% chance of losing $500");
    println!("{:<10} {:>10} {:>10} {:>10} {:>10}", "group", "mean", "q25", "median", "q75");
    for r in &wtp {
        println!(
            "{:<10} {:>10.2} {:>10.2} {:>10.2} {:>10.2}",
            r.group, r.mean, r.q25, r.median, r.q75
        );
    }
    println!();
    println!(
        "Welfare gains in dollars per household (reference premium {:.2})",
        report.reference_price
    );
    println!(
        "{:<26} {:>9} {:>9} {:>9} {:>9} {:>8}",
        "measure", "mean", "q25", "median", "q75", "% ref"
    );
    for s in &report.summaries {
        println!(
            "{:<26} {:>9.2} {:>9.2} {:>9.2} {:>9.2} {:>8.2}",
            s.measure, s.mean, s.q25, s.median, s.q75, s.pct_of_reference_price
        );
    }

    let config = WelfareConfig {
        params: mp,
        households,
        options,
        threads: rayon::current_num_threads(),
    };
    write_document(&args.out, config, WelfareOutput { wtp, report })?;
    Ok(Outcome::Done)
}

pub fn report(args: &ReportArgs) -> anyhow::Result<Outcome> {
    let mp = params_or_default(args.params.as_deref())?;
    let claim_probs = [args.mu_collision, args.mu_comprehensive];
    for mu in claim_probs {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(bundlechoice::Error::ProbabilityDomain(mu).into());
        }
    }
    if args.points < 2 {
        return Err(UsageError("--points must be at least 2".into()).into());
    }
    let (data, households) = match &args.data {
        Some(path) => (read_data(path, &mp.menu)?, HouseholdSource::Data { path: path.clone() }),
        None => simulated_households(&mp, args.n, args.seed)?,
    };
    fs::create_dir_all(&args.out_dir).map_err(bundlechoice::Error::from)?;
    let files = plots::write_all(&args.out_dir, &mp, &data, claim_probs, args.points)?;
    for f in &files {
        println!("wrote {}", args.out_dir.join(f).display());
    }
    let config = ReportConfig {
        params: mp,
        households,
        claim_probs,
        points: args.points,
        threads: rayon::current_num_threads(),
    };
    write_document(&args.out_dir.join("report.json"), config, ReportFiles { files })?;
    Ok(Outcome::Done)
}

pub fn print_defaults(args: &PrintDefaultsArgs) -> anyhow::Result<Outcome> {
    let all = args.what == DefaultsItem::All;
    let section = |title: &str| {
        if all {
            println!("# {title}");
        }
    };
    if all || args.what == DefaultsItem::Menu {
        section("menu (TOML)");
        print!("{}", io::menu_to_toml(&MenuConfig::default_menu())?);
    }
    if all || args.what == DefaultsItem::Params {
        section("params (JSON)");
        print!("{}", io::to_json(&simulation::calibrated_params())?);
    }
    if all || args.what == DefaultsItem::Population {
        section("population (JSON)");
        print!("{}", io::to_json(&PopulationConfig::default())?);
    }
    if all || args.what == DefaultsItem::Estimation {
        section("estimation (JSON)");
        print!("{}", io::to_json(&EstimationOptions::default())?);
    }
    if all || args.what == DefaultsItem::Welfare {
        section("welfare (JSON)");
        print!("{}", io::to_json(&WelfareOptions::default())?);
    }
    if all || args.what == DefaultsItem::Diagnostics {
        section("diagnostics (JSON)");
        print!("{}", io::to_json(&IdentificationOptions::default())?);
    }
    Ok(Outcome::Done)
}

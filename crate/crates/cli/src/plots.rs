//! Plot-ready CSV emission.

use std::path::Path;

use rayon::prelude::*;

use bundlechoice::cutoffs::{locus_point, Corner};
use bundlechoice::diagnostics::central_levels;
use bundlechoice::preferences::prelec;
use bundlechoice::simulation::choice_shares;
use bundlechoice::{choice_probs, Household, Integration, ModelParams, PreferenceType, Result};

const OMEGA_LEVELS: [f64; 5] = [0.10, 0.25, 0.50, 0.75, 0.90];

/// Writes every plot file into `dir` and returns the file names.
pub fn write_all(
    dir: &Path,
    mp: &ModelParams,
    data: &[Household],
    claim_probs: [f64; 2],
    points: usize,
) -> Result<Vec<String>> {
    let files = [
        ("distortion.csv", distortion(mp, points)?),
        ("nu_cdf.csv", nu_cdf(mp, points)),
        ("bundle_shares.csv", bundle_shares(mp, data)?),
        ("indifference_loci.csv", loci(mp, claim_probs, points)?),
    ];
    let mut names = Vec::new();
    for (name, rows) in files {
        let mut w = csv::Writer::from_path(dir.join(name))?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        names.push(name.to_string());
    }
    Ok(names)
}

type Rows = Vec<Vec<String>>;

fn num(x: f64) -> String {
    format!("{x}")
}

/// Probability distortion at the mean of the estimated distribution and at
/// several of its quantiles.
fn distortion(mp: &ModelParams, points: usize) -> Result<Rows> {
    let dist = mp.preferences.distribution(PreferenceType::Dt);
    let mut omegas = vec![("omega_mean".to_string(), dist.mean())];
    for q in OMEGA_LEVELS {
        omegas.push((format!("omega_q{:02}", (q * 100.0).round()), dist.quantile(q)));
    }
    let mut header = vec!["mu".to_string(), "identity".to_string()];
    header.extend(omegas.iter().map(|(n, _)| n.clone()));
    let mut rows = vec![header];
    for mu in central_levels(points) {
        let mut row = vec![num(mu), num(mu)];
        for (_, omega) in &omegas {
            row.push(num(prelec(mu, *omega)?));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Distribution function and density of the absolute risk aversion
/// coefficient.
fn nu_cdf(mp: &ModelParams, points: usize) -> Rows {
    let dist = mp.preferences.distribution(PreferenceType::Eu);
    let upper = PreferenceType::Eu.support_upper();
    let mut rows = vec![vec!["nu".to_string(), "cdf".to_string(), "pdf".to_string()]];
    for k in 0..points {
        let nu = upper * k as f64 / (points - 1) as f64;
        rows.push(vec![num(nu), num(dist.cdf(nu)), num(dist.pdf(nu))]);
    }
    rows
}

/// Predicted and observed share of each bundle.
fn bundle_shares(mp: &ModelParams, data: &[Household]) -> Result<Rows> {
    let menu = &mp.menu;
    let per_household: Vec<Vec<f64>> = data
        .par_iter()
        .map(|h| choice_probs(h, mp, &Integration::default()))
        .collect::<Result<_>>()?;
    let mut model = vec![0.0; menu.n_bundles()];
    for p in &per_household {
        for (m, v) in model.iter_mut().zip(p) {
            *m += v;
        }
    }
    let observed = choice_shares(data, menu);
    let mut rows = vec![vec![
        "collision_deductible".to_string(),
        "comprehensive_deductible".to_string(),
        "model_share".to_string(),
        "data_share".to_string(),
    ]];
    for (j, m) in model.iter().enumerate() {
        let (d1, d2) = menu.deductibles(menu.bundle_at(j));
        rows.push(vec![
            num(d1),
            num(d2),
            num(m / data.len() as f64),
            num(observed[j]),
        ]);
    }
    Ok(rows)
}

/// Base-price pairs at which each coefficient quantile is indifferent around
/// the cheapest and the most expensive corner. Quantiles whose locus falls
/// outside the price range are left out.
fn loci(mp: &ModelParams, claim_probs: [f64; 2], points: usize) -> Result<Rows> {
    let mut rows = vec![[
        "type",
        "corner",
        "quantile",
        "coefficient",
        "base_price_collision",
        "base_price_comprehensive",
    ]
    .map(String::from)
    .to_vec()];
    for ptype in PreferenceType::ALL {
        let dist = mp.preferences.distribution(ptype);
        for corner in [Corner::Cheapest, Corner::Expensive] {
            for q in central_levels(points) {
                let zeta = dist.quantile(q);
                match locus_point(&mp.menu, corner, ptype, zeta, claim_probs) {
                    Ok(p) => rows.push(vec![
                        ptype.label().to_string(),
                        format!("{corner:?}").to_lowercase(),
                        num(q),
                        num(zeta),
                        num(p.base_prices[0]),
                        num(p.base_prices[1]),
                    ]),
                    Err(bundlechoice::Error::OutOfRange(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(rows)
}

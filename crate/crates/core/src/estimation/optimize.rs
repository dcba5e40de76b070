//! Box-constrained minimizers.

use serde::{Deserialize, Serialize};

/// Optimizer choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Projected limited-memory BFGS with analytic gradients.
    Lbfgs,
    /// Nelder-Mead simplex search with restarts.
    NelderMead,
}

/// Stopping rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub max_iter: usize,
    pub max_evals: usize,
    /// Absolute change in the objective treated as stationary.
    pub ftol: f64,
    /// Projected gradient sup-norm treated as stationary.
    pub gtol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub converged: bool,
    pub n_iter: usize,
    pub n_evals: usize,
}

fn project(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for ((v, l), h) in x.iter_mut().zip(lo).zip(hi) {
        *v = v.clamp(*l, *h);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes `f` over the box `[lo, hi]`, moving only coordinates with
/// `free[k]`. `f` returns the value and gradient.
pub fn lbfgs<F>(mut f: F, x0: &[f64], lo: &[f64], hi: &[f64], free: &[bool], rule: StopRule) -> Minimum
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    const MEMORY: usize = 10;
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, lo, hi);
    let (mut fx, mut g) = f(&x);
    let mut n_evals = 1;
    let mut hist: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let mut small_steps = 0;
    let mut converged = false;
    let mut n_iter = 0;

    let active = |x: &[f64], g: &[f64], k: usize| {
        !free[k] || (x[k] <= lo[k] && g[k] > 0.0) || (x[k] >= hi[k] && g[k] < 0.0)
    };

    while n_iter < rule.max_iter && n_evals < rule.max_evals {
        n_iter += 1;
        let pg = (0..n)
            .filter(|&k| free[k])
            .map(|k| ((x[k] - g[k]).clamp(lo[k], hi[k]) - x[k]).abs())
            .fold(0.0, f64::max);
        if pg < rule.gtol {
            converged = true;
            break;
        }
        let gf: Vec<f64> = (0..n).map(|k| if active(&x, &g, k) { 0.0 } else { g[k] }).collect();
        let mut d = two_loop(&gf, &hist);
        for k in 0..n {
            if active(&x, &g, k) {
                d[k] = 0.0;
            }
        }
        if dot(&d, &gf) >= 0.0 {
            hist.clear();
            d = gf.iter().map(|v| -v).collect();
        }
        let mut t = if hist.is_empty() {
            let gmax = gf.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (0.5 / gmax.max(1e-12)).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..40 {
            let mut xt: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            project(&mut xt, lo, hi);
            for k in 0..n {
                if !free[k] {
                    xt[k] = x[k];
                }
            }
            let step: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
            if step.iter().all(|s| *s == 0.0) {
                break;
            }
            let (ft, gt) = f(&xt);
            n_evals += 1;
            if ft.is_finite() && ft <= fx + 1e-4 * dot(&g, &step) {
                accepted = Some((xt, ft, gt, step));
                break;
            }
            if n_evals >= rule.max_evals {
                break;
            }
            t *= 0.5;
        }
        let Some((xt, ft, gt, step)) = accepted else {
            if hist.is_empty() {
                converged = true;
                break;
            }
            hist.clear();
            continue;
        };
        let y: Vec<f64> = gt.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&step, &y);
        if sy > 1e-12 * dot(&step, &step).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if hist.len() == MEMORY {
                hist.remove(0);
            }
            hist.push((step, y, 1.0 / sy));
        }
        let decrease = fx - ft;
        x = xt;
        fx = ft;
        g = gt;
        if decrease < rule.ftol {
            small_steps += 1;
            if small_steps >= 3 {
                converged = true;
                break;
            }
        } else {
            small_steps = 0;
        }
    }
    Minimum {
        x,
        f: fx,
        converged,
        n_iter,
        n_evals,
    }
}

fn two_loop(g: &[f64], hist: &[(Vec<f64>, Vec<f64>, f64)]) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(hist.len());
    for (s, y, rho) in hist.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = hist.last() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in hist.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter().map(|v| -v).collect()
}

/// Nelder-Mead over the free coordinates, with adaptive coefficients and
/// restarts from the best vertex until a restart no longer improves.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], lo: &[f64], hi: &[f64], free: &[bool], rule: StopRule) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let idx: Vec<usize> = (0..x0.len()).filter(|&k| free[k]).collect();
    let m = idx.len();
    let mut base = x0.to_vec();
    project(&mut base, lo, hi);
    let embed = |base: &[f64], v: &[f64]| {
        let mut x = base.to_vec();
        for (&k, &vi) in idx.iter().zip(v) {
            x[k] = vi.clamp(lo[k], hi[k]);
        }
        x
    };
    let mut n_evals = 0;
    let mut n_iter = 0;
    let mut best_f = f(&base);
    n_evals += 1;
    if m == 0 {
        return Minimum {
            x: base,
            f: best_f,
            converged: true,
            n_iter,
            n_evals,
        };
    }
    let md = m as f64;
    let (rho, chi, gam, sig) = (1.0, 1.0 + 2.0 / md, 0.75 - 1.0 / (2.0 * md), 1.0 - 1.0 / md);
    let mut converged = false;
    loop {
        let start: Vec<f64> = idx.iter().map(|&k| base[k]).collect();
        let mut simplex = vec![(start.clone(), best_f)];
        for (i, &k) in idx.iter().enumerate() {
            let mut v = start.clone();
            let step = if v[i] + 0.5 <= hi[k] { 0.5 } else { -0.5 };
            v[i] += step;
            let fv = f(&embed(&base, &v));
            n_evals += 1;
            simplex.push((v, fv));
        }
        let restart_from = best_f;
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let spread = simplex[m].1 - simplex[0].1;
            if spread < rule.ftol || n_iter >= rule.max_iter || n_evals >= rule.max_evals {
                break;
            }
            n_iter += 1;
            let centroid: Vec<f64> = (0..m)
                .map(|i| simplex[..m].iter().map(|p| p.0[i]).sum::<f64>() / md)
                .collect();
            let towards = |c: f64| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(&simplex[m].0)
                    .map(|(ci, wi)| ci + c * (ci - wi))
                    .collect()
            };
            let xr = towards(rho);
            let fr = f(&embed(&base, &xr));
            n_evals += 1;
            if fr < simplex[0].1 {
                let xe = towards(rho * chi);
                let fe = f(&embed(&base, &xe));
                n_evals += 1;
                simplex[m] = if fe < fr { (xe, fe) } else { (xr, fr) };
            } else if fr < simplex[m - 1].1 {
                simplex[m] = (xr, fr);
            } else {
                let (xc, fc) = if fr < simplex[m].1 {
                    let xc = towards(rho * gam);
                    let fc = f(&embed(&base, &xc));
                    (xc, fc)
                } else {
                    let xc = towards(-gam);
                    let fc = f(&embed(&base, &xc));
                    (xc, fc)
                };
                n_evals += 1;
                if fc < simplex[m].1.min(fr) {
                    simplex[m] = (xc, fc);
                } else {
                    let best = simplex[0].0.clone();
                    for p in simplex.iter_mut().skip(1) {
                        p.0 = best.iter().zip(&p.0).map(|(b, v)| b + sig * (v - b)).collect();
                        p.1 = f(&embed(&base, &p.0));
                        n_evals += 1;
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        base = embed(&base, &simplex[0].0);
        best_f = simplex[0].1;
        if n_iter >= rule.max_iter || n_evals >= rule.max_evals {
            break;
        }
        if restart_from - best_f < rule.ftol {
            converged = true;
            break;
        }
    }
    Minimum {
        x: base,
        f: best_f,
        converged,
        n_iter,
        n_evals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(x: &[f64]) -> (f64, Vec<f64>) {
        let mut f = 0.0;
        let mut g = vec![0.0; x.len()];
        for i in 0..x.len() - 1 {
            let a = x[i + 1] - x[i] * x[i];
            let b = 1.0 - x[i];
            f += 100.0 * a * a + b * b;
            g[i] += -400.0 * x[i] * a - 2.0 * b;
            g[i + 1] += 200.0 * a;
        }
        (f, g)
    }

    const RULE: StopRule = StopRule {
        max_iter: 5000,
        max_evals: 20000,
        ftol: 1e-14,
        gtol: 1e-9,
    };

    #[test]
    fn lbfgs_finds_rosenbrock_minimum() {
        let lo = vec![-5.0; 4];
        let hi = vec![5.0; 4];
        let m = lbfgs(rosenbrock, &[-1.2, 1.0, -1.2, 1.0], &lo, &hi, &[true; 4], RULE);
        assert!(m.converged);
        for v in &m.x {
            assert!((v - 1.0).abs() < 1e-5, "{:?}", m.x);
        }
    }

    #[test]
    fn lbfgs_respects_bounds_and_fixed_coordinates() {
        let f = |x: &[f64]| {
            let f = (x[0] - 3.0).powi(2) + (x[1] + 2.0).powi(2) + (x[2] - 1.0).powi(2);
            (f, vec![2.0 * (x[0] - 3.0), 2.0 * (x[1] + 2.0), 2.0 * (x[2] - 1.0)])
        };
        let m = lbfgs(f, &[0.0, 0.0, 0.0], &[-1.0, -1.0, -1.0], &[1.0, 1.0, 1.0], &[true, true, false], RULE);
        assert!((m.x[0] - 1.0).abs() < 1e-12);
        assert!((m.x[1] + 1.0).abs() < 1e-12);
        assert_eq!(m.x[2], 0.0);
        assert!(m.converged);
    }

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + 4.0 * (x[1] + 0.7).powi(2) + (x[0] * x[1]);
        let m = nelder_mead(f, &[2.0, 2.0, 9.0], &[-5.0; 3], &[5.0; 3], &[true, true, false], RULE);
        // Stationary point of the quadratic.
        let det = 2.0 * 8.0 - 1.0;
        let x0 = (0.6 * 8.0 + 5.6) / det;
        let x1 = (2.0 * -5.6 - 0.6) / det;
        assert!((m.x[0] - x0).abs() < 1e-5 && (m.x[1] - x1).abs() < 1e-5, "{:?}", m.x);
        assert_eq!(m.x[2], 5.0);
    }
}

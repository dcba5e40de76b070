//! Beta distributions rescaled to a coefficient support `[0, upper]`.

use serde::{Deserialize, Serialize};
use statrs::function::beta::{beta_reg, ln_beta};

use crate::error::{Error, Result};

/// Shape parameters of a Beta distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaShape {
    pub shape1: f64,
    pub shape2: f64,
}

impl BetaShape {
    pub fn new(shape1: f64, shape2: f64) -> Result<Self> {
        let s = BetaShape { shape1, shape2 };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.shape1.is_finite() && self.shape1 > 0.0 && self.shape2.is_finite() && self.shape2 > 0.0) {
            return Err(Error::invalid(
                "beta shape",
                format!("({}, {}) must be positive", self.shape1, self.shape2),
            ));
        }
        Ok(())
    }

    /// Mean on the unit interval.
    pub fn unit_mean(&self) -> f64 {
        self.shape1 / (self.shape1 + self.shape2)
    }
}

/// Beta distribution on `[0, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledBeta {
    pub shape: BetaShape,
    pub upper: f64,
    ln_norm: f64,
}

impl ScaledBeta {
    pub fn new(shape: BetaShape, upper: f64) -> Self {
        ScaledBeta {
            shape,
            upper,
            ln_norm: ln_beta(shape.shape1, shape.shape2),
        }
    }

    pub fn mean(&self) -> f64 {
        self.upper * self.shape.unit_mean()
    }

    /// Density on the unit scale.
    pub fn unit_pdf(&self, u: f64) -> f64 {
        if !(u > 0.0 && u < 1.0) {
            let (a, b) = (self.shape.shape1, self.shape.shape2);
            return match (u, a, b) {
                (u, a, _) if u == 0.0 && a == 1.0 => (-self.ln_norm).exp(),
                (u, _, b) if u == 1.0 && b == 1.0 => (-self.ln_norm).exp(),
                (u, a, _) if u == 0.0 && a < 1.0 => f64::INFINITY,
                (u, _, b) if u == 1.0 && b < 1.0 => f64::INFINITY,
                _ => 0.0,
            };
        }
        ((self.shape.shape1 - 1.0) * u.ln() + (self.shape.shape2 - 1.0) * (-u).ln_1p() - self.ln_norm).exp()
    }

    pub fn unit_cdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            0.0
        } else if u >= 1.0 {
            1.0
        } else {
            beta_reg(self.shape.shape1, self.shape.shape2, u)
        }
    }

    /// Density of the coefficient.
    pub fn pdf(&self, zeta: f64) -> f64 {
        self.unit_pdf(zeta / self.upper) / self.upper
    }

    pub fn cdf(&self, zeta: f64) -> f64 {
        self.unit_cdf(zeta / self.upper)
    }

    /// Quantile by bisection on the distribution function.
    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return self.upper;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.unit_cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.upper * 0.5 * (lo + hi)
    }
}

/// Tabulated Beta distribution function on the unit interval.
///
/// Interior cells use cubic Hermite interpolation of the exact distribution
/// function and density at the nodes; cells near either endpoint are
/// evaluated exactly.
#[derive(Debug, Clone)]
pub struct CdfTable {
    dist: ScaledBeta,
    cells: usize,
    exact_cells: usize,
    nodes: Vec<(f64, f64)>,
}

impl CdfTable {
    pub const DEFAULT_CELLS: usize = 1024;

    pub fn new(dist: ScaledBeta, cells: usize) -> Self {
        let exact_cells = (cells / 64).max(1);
        let h = 1.0 / cells as f64;
        let nodes = (0..=cells)
            .map(|i| {
                if i < exact_cells || i > cells - exact_cells {
                    (0.0, 0.0)
                } else {
                    let u = i as f64 * h;
                    (dist.unit_cdf(u), dist.unit_pdf(u) * h)
                }
            })
            .collect();
        CdfTable {
            dist,
            cells,
            exact_cells,
            nodes,
        }
    }

    /// Distribution function at `u` in `[0, 1]`.
    #[inline]
    pub fn cdf(&self, u: f64) -> f64 {
        let pos = u * self.cells as f64;
        let i = pos as usize;
        if i < self.exact_cells || i >= self.cells - self.exact_cells {
            return self.dist.unit_cdf(u);
        }
        let t = pos - i as f64;
        let (f0, d0) = self.nodes[i];
        let (f1, d1) = self.nodes[i + 1];
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * f0 + h10 * d0 + h01 * f1 + h11 * d1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_case() {
        let d = ScaledBeta::new(BetaShape::new(1.0, 1.0).unwrap(), 0.025);
        assert_relative_eq!(d.cdf(0.01), 0.4, epsilon = 1e-14);
        assert_relative_eq!(d.pdf(0.01), 40.0, epsilon = 1e-10);
        assert_relative_eq!(d.mean(), 0.0125);
    }

    #[test]
    fn density_integrates_to_distribution() {
        let d = ScaledBeta::new(BetaShape::new(2.5, 7.0).unwrap(), 1.0);
        let n = 20000;
        let h = 0.6 / n as f64;
        let integral: f64 = (0..n).map(|i| d.pdf((i as f64 + 0.5) * h) * h).sum();
        assert_relative_eq!(integral, d.cdf(0.6), epsilon = 1e-8);
    }

    #[test]
    fn quantile_inverts_cdf() {
        let d = ScaledBeta::new(BetaShape::new(2.0, 5.0).unwrap(), 0.025);
        for p in [0.1, 0.25, 0.5, 0.9] {
            assert_relative_eq!(d.cdf(d.quantile(p)), p, epsilon = 1e-12);
        }
    }

    #[test]
    fn table_matches_exact() {
        for (a, b) in [(2.5, 22.5), (6.0, 4.0), (0.7, 1.5), (40.0, 60.0)] {
            let d = ScaledBeta::new(BetaShape::new(a, b).unwrap(), 1.0);
            let t = CdfTable::new(d, CdfTable::DEFAULT_CELLS);
            let worst = (0..=5000)
                .map(|i| i as f64 / 5000.0)
                .map(|u| (t.cdf(u) - d.unit_cdf(u)).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-8, "shape ({a}, {b}) error {worst}");
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(BetaShape::new(0.0, 1.0).is_err());
        assert!(BetaShape::new(1.0, f64::NAN).is_err());
    }
}

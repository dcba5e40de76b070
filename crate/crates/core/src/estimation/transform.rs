//! Unconstrained coordinates for the model parameters.
//!
//! Layout: `[logit alpha, ln nu1, ln nu2, ln omega1, ln omega2, logit phi_1, ...]`.
//! The consideration probability of the cheapest bundle (index 0) is pinned
//! at 1 and has no coordinate.

use serde::{Deserialize, Serialize};

use crate::beta::BetaShape;
use crate::choice::{ModelParams, PreferenceParams};
use crate::consideration::ConsiderationParams;
use crate::error::{Error, Result};

/// Clamp applied to logit coordinates.
pub const LOGIT_BOUND: f64 = 36.0;
/// Range of Beta shape parameters.
pub const SHAPE_RANGE: (f64, f64) = (0.05, 2000.0);

pub const ALPHA: usize = 0;
pub const NU: [usize; 2] = [1, 2];
pub const OMEGA: [usize; 2] = [3, 4];
pub const PHI_START: usize = 5;

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn logit(p: f64) -> f64 {
    (p.ln() - (-p).ln_1p()).clamp(-LOGIT_BOUND, LOGIT_BOUND)
}

/// Which parameter groups the optimizer may move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeParams {
    pub alpha: bool,
    pub nu: bool,
    pub omega: bool,
    pub consideration: bool,
}

impl Default for FreeParams {
    fn default() -> Self {
        FreeParams {
            alpha: true,
            nu: true,
            omega: true,
            consideration: true,
        }
    }
}

/// Maps between [`ModelParams`] and unconstrained coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub n_bundles: usize,
}

impl Layout {
    pub fn new(n_bundles: usize) -> Self {
        Layout { n_bundles }
    }

    pub fn dim(&self) -> usize {
        PHI_START + self.n_bundles - 1
    }

    /// Coordinate of bundle `j`'s consideration probability; `None` for the
    /// pinned bundle.
    pub fn phi_coord(&self, j: usize) -> Option<usize> {
        (j > 0).then(|| PHI_START + j - 1)
    }

    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let (slo, shi) = (SHAPE_RANGE.0.ln(), SHAPE_RANGE.1.ln());
        let mut lo = vec![-LOGIT_BOUND; self.dim()];
        let mut hi = vec![LOGIT_BOUND; self.dim()];
        for k in NU.into_iter().chain(OMEGA) {
            lo[k] = slo;
            hi[k] = shi;
        }
        (lo, hi)
    }

    pub fn free_mask(&self, free: FreeParams) -> Vec<bool> {
        let mut mask = vec![free.consideration; self.dim()];
        mask[ALPHA] = free.alpha;
        for k in NU {
            mask[k] = free.nu;
        }
        for k in OMEGA {
            mask[k] = free.omega;
        }
        mask
    }

    pub fn encode(&self, mp: &ModelParams) -> Result<Vec<f64>> {
        if mp.consideration.n_bundles() != self.n_bundles {
            return Err(Error::invalid("parameters", "grid size does not match the layout"));
        }
        let (lo, hi) = self.bounds();
        let p = &mp.preferences;
        let mut x = vec![0.0; self.dim()];
        x[ALPHA] = logit(p.alpha);
        x[NU[0]] = p.nu.shape1.ln();
        x[NU[1]] = p.nu.shape2.ln();
        x[OMEGA[0]] = p.omega.shape1.ln();
        x[OMEGA[1]] = p.omega.shape2.ln();
        for j in 1..self.n_bundles {
            x[PHI_START + j - 1] = logit(mp.consideration.phi[j]);
        }
        for ((v, l), h) in x.iter_mut().zip(&lo).zip(&hi) {
            *v = v.clamp(*l, *h);
        }
        Ok(x)
    }

    pub fn alpha(&self, x: &[f64]) -> f64 {
        sigmoid(x[ALPHA])
    }

    pub fn shapes(&self, x: &[f64]) -> [BetaShape; 2] {
        [
            BetaShape {
                shape1: x[NU[0]].exp(),
                shape2: x[NU[1]].exp(),
            },
            BetaShape {
                shape1: x[OMEGA[0]].exp(),
                shape2: x[OMEGA[1]].exp(),
            },
        ]
    }

    pub fn phi(&self, x: &[f64]) -> Vec<f64> {
        std::iter::once(1.0)
            .chain(x[PHI_START..].iter().map(|&t| sigmoid(t)))
            .collect()
    }

    pub fn decode_preferences(&self, x: &[f64]) -> PreferenceParams {
        let [nu, omega] = self.shapes(x);
        PreferenceParams {
            alpha: self.alpha(x),
            nu,
            omega,
        }
    }

    /// Parameters at `x`; the grid shape and menu come from `template`.
    pub fn decode(&self, x: &[f64], template: &ModelParams) -> ModelParams {
        ModelParams {
            preferences: self.decode_preferences(x),
            consideration: ConsiderationParams {
                n_collision: template.consideration.n_collision,
                n_comprehensive: template.consideration.n_comprehensive,
                phi: self.phi(x),
            },
            menu: template.menu.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulation::calibrated_params;
    use proptest::prelude::*;

    #[test]
    fn calibrated_params_survive_encoding() {
        let mp = calibrated_params();
        let layout = Layout::new(mp.menu.n_bundles());
        assert_eq!(layout.dim(), 34);
        let back = layout.decode(&layout.encode(&mp).unwrap(), &mp);
        assert!((back.preferences.alpha - 0.46).abs() < 1e-15);
        assert!((back.preferences.nu.shape2 - 22.5).abs() < 1e-12);
        for (a, b) in back.consideration.phi.iter().zip(&mp.consideration.phi) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(back.consideration.phi[0], 1.0);
    }

    #[test]
    fn free_mask_groups() {
        let layout = Layout::new(30);
        let mask = layout.free_mask(FreeParams {
            alpha: true,
            nu: false,
            omega: false,
            consideration: false,
        });
        assert_eq!(mask.iter().filter(|m| **m).count(), 1);
        assert!(mask[ALPHA]);
    }

    proptest! {
        #[test]
        fn unconstrained_round_trip(x in proptest::collection::vec(-2.9f64..5.0, 34)) {
            let mp = calibrated_params();
            let layout = Layout::new(30);
            let back = layout.encode(&layout.decode(&x, &mp)).unwrap();
            for (a, b) in x.iter().zip(&back) {
                prop_assert!((a - b).abs() < 1e-12, "{} vs {}", a, b);
            }
        }
    }
}

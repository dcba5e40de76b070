//! Integration rules over a coefficient support.

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::PartitionOptions;

/// Gauss-Legendre nodes and weights on the unit interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        let rule = GaussLegendre::new(n)
            .map_err(|_| Error::invalid("quadrature", format!("{n} nodes, need at least 2")))?;
        let mut pairs: Vec<(f64, f64)> = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(QuadratureRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of `f` over `[lo, hi]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        let h = hi - lo;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(lo + h * x))
            .sum::<f64>()
            * h
    }
}

/// How choice probabilities are integrated over the coefficient distribution.
#[derive(Debug, Clone, PartialEq)]
pub enum Integration {
    /// Exact integration over the intervals on which the ranking is constant.
    CutoffExact(PartitionOptions),
    /// Node rule on the support with density weights renormalized to one.
    Nodes(QuadratureRule),
}

impl Default for Integration {
    fn default() -> Self {
        Integration::CutoffExact(PartitionOptions::PRECISE)
    }
}

//! Household observations.

use serde::{Deserialize, Serialize};

use crate::menu::Bundle;

/// One household: base prices and claim probabilities in both contexts and,
/// once observed or simulated, its chosen bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Household {
    pub id: u64,
    pub base_price_collision: f64,
    pub base_price_comprehensive: f64,
    pub claim_prob_collision: f64,
    pub claim_prob_comprehensive: f64,
    pub choice: Option<Bundle>,
}

impl Household {
    pub fn new(id: u64, x_collision: f64, x_comprehensive: f64, mu_collision: f64, mu_comprehensive: f64) -> Self {
        Household {
            id,
            base_price_collision: x_collision,
            base_price_comprehensive: x_comprehensive,
            claim_prob_collision: mu_collision,
            claim_prob_comprehensive: mu_comprehensive,
            choice: None,
        }
    }

    pub fn with_choice(mut self, b: Bundle) -> Self {
        self.choice = Some(b);
        self
    }

    pub fn base_prices(&self) -> [f64; 2] {
        [self.base_price_collision, self.base_price_comprehensive]
    }

    pub fn claim_probs(&self) -> [f64; 2] {
        [self.claim_prob_collision, self.claim_prob_comprehensive]
    }
}

//! Three-valued outcomes of domination queries and the budgets that bound them.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub samples: usize,
    pub k_max: u64,
    pub seed: u64,
    /// Word length of sampled elements.
    pub complexity: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            samples: 200,
            k_max: 32,
            seed: 7,
            complexity: 2,
        }
    }
}

impl Budget {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }
}

/// `compare(F1, F2)` answers whether F1 ⪯ F2, i.e. whether Q2^{a^k} ⊆ Q1 for some k ≥ 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict<W> {
    /// Q2^{a^k} ⊆ Q1; `exact` when proved by a containment rule rather than by sampling.
    Dominates { k: u64, exact: bool, rule: String },
    /// `witness` lies in Q2^{a^k_max} (hence in every Q2^{a^k}, k ≤ k_max) but not in Q1.
    Refuted {
        witness: W,
        k_max: u64,
        reason: String,
    },
    Inconclusive { budget: Budget, note: String },
}

impl<W> Verdict<W> {
    pub fn dominates(&self) -> Option<u64> {
        match self {
            Verdict::Dominates { k, .. } => Some(*k),
            _ => None,
        }
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Verdict::Inconclusive { .. })
    }

    pub fn exact(k: u64, rule: impl Into<String>) -> Self {
        Verdict::Dominates {
            k,
            exact: true,
            rule: rule.into(),
        }
    }
}

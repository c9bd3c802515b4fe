use crate::data::{Alphabet, LabelSet, OrderedDataTree};
use crate::presburger::{Budget, Stats};

use super::member::DEFAULT_MEMBER_BUDGET;
use super::zonal::DEFAULT_ZONE_CAP;

/// Search limits for the emptiness procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmptinessCaps {
    pub solver: Budget,
    /// Budget of the membership re-check of a decoded witness.
    pub member_budget: u64,
    /// Largest M_P guessed for a small class P.
    pub max_class_size: u64,
    /// Largest number of distinguished zonal symbols |𝒫|.
    pub max_zones: usize,
    /// Largest constant pool |D|.
    pub max_constants: usize,
    /// Largest number of children of a node in a free zone.
    pub max_free_children: usize,
    /// Bound on the materialized zonal alphabet.
    pub zone_cap: usize,
    /// Bound on the number of guess bundles tried.
    pub max_bundles: usize,
}

impl Default for EmptinessCaps {
    fn default() -> Self {
        EmptinessCaps {
            solver: Budget::default(),
            member_budget: DEFAULT_MEMBER_BUDGET,
            max_class_size: 2,
            max_zones: 2,
            max_constants: 2,
            max_free_children: 1,
            zone_cap: DEFAULT_ZONE_CAP,
            max_bundles: 2_000,
        }
    }
}

/// Output tree and value word that make the witness accepted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub output_alphabet: Alphabet,
    pub output: Vec<usize>,
    pub run: Vec<usize>,
    pub value_word: Vec<LabelSet>,
}

impl Certificate {
    pub fn render_value_word(&self) -> String {
        let parts: Vec<String> = self.value_word.iter().map(|&s| self.output_alphabet.render_set(s)).collect();
        parts.join(" ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmptinessVerdict {
    Nonempty { witness: OrderedDataTree, certificate: Certificate },
    Empty,
    EmptyWithinCaps,
}

impl EmptinessVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            EmptinessVerdict::Nonempty { .. } => "nonempty",
            EmptinessVerdict::Empty => "empty",
            EmptinessVerdict::EmptyWithinCaps => "empty-within-caps",
        }
    }

    pub fn is_nonempty(&self) -> bool {
        matches!(self, EmptinessVerdict::Nonempty { .. })
    }

    pub fn witness(&self) -> Option<&OrderedDataTree> {
        match self {
            EmptinessVerdict::Nonempty { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

/// A verdict plus what was explored to reach it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmptinessReport {
    pub verdict: EmptinessVerdict,
    pub stats: Stats,
    /// Named quantities (formula size, K, bounds, bundles tried, ...) in
    /// the order they were recorded.
    pub notes: Vec<(String, String)>,
}

impl EmptinessReport {
    pub(crate) fn note(&mut self, k: &str, v: impl ToString) {
        self.notes.push((k.to_string(), v.to_string()));
    }

    pub fn get(&self, k: &str) -> Option<&str> {
        self.notes.iter().find(|(a, _)| a == k).map(|(_, b)| b.as_str())
    }
}

pub fn add_stats(a: &mut Stats, b: &Stats) {
    a.lp_solves += b.lp_solves;
    a.bb_nodes += b.bb_nodes;
    a.disjunction_branches += b.disjunction_branches;
    a.propagation_conflicts += b.propagation_conflicts;
}

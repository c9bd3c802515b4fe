use std::collections::{BTreeMap, BTreeSet};

use super::alphabet::{Alphabet, LabelSet};
use super::tree::{DataTree, OrderedDataTree};

/// [S]_t for every nonempty S with a nonempty class.
pub type ValueClasses<V> = BTreeMap<LabelSet, BTreeSet<V>>;

pub fn value_classes<V: Clone + Ord>(t: &DataTree<V>) -> ValueClasses<V> {
    let mut at: BTreeMap<V, LabelSet> = BTreeMap::new();
    for u in 0..t.len() {
        let e = at.entry(t.value(u).clone()).or_default();
        *e = e.with(t.label(u));
    }
    let mut out: ValueClasses<V> = BTreeMap::new();
    for (d, s) in at {
        out.entry(s).or_default().insert(d);
    }
    out
}

/// V_Γ(t): label sets of the distinct values in ascending value order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueWord {
    pub alphabet: Alphabet,
    pub symbols: Vec<LabelSet>,
}

impl ValueWord {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self.symbols.iter().map(|&s| self.alphabet.render_set(s)).collect();
        parts.join(" ")
    }
}

pub fn string_representation<V: Clone + Ord>(t: &DataTree<V>) -> ValueWord {
    let mut at: BTreeMap<V, LabelSet> = BTreeMap::new();
    for u in 0..t.len() {
        let e = at.entry(t.value(u).clone()).or_default();
        *e = e.with(t.label(u));
    }
    ValueWord { alphabet: t.alphabet().clone(), symbols: at.into_values().collect() }
}

/// Replaces each value by its rank (1-based) among the distinct values.
pub fn canonical_rank(t: &OrderedDataTree) -> OrderedDataTree {
    let distinct: Vec<u64> = t.value_set().into_iter().collect();
    let values = t
        .values()
        .iter()
        .map(|v| distinct.binary_search(v).expect("value present") as u64 + 1)
        .collect();
    t.with_values(values).expect("same domain")
}

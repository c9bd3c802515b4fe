//! Texts, marked string projections and text automata.
//!
//! Data words are trees in which every node has at most one child; node i
//! is position i + 1.

use std::collections::BTreeSet;
use std::fmt;

use crate::automata::{Nfa, TreeAutomaton, TreeTransducer};
use crate::data::{Alphabet, DataTree, LabelSet, Nested, OrderedDataTree};
use crate::error::{Error, Result};
use crate::odta::WeakOdta;

/// Relation of a position's value to the next position's value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mark {
    /// d_{i+1} + 1 = d_i
    Minus,
    /// d_i + 1 = d_{i+1}
    Plus,
    Star,
}

impl Mark {
    pub const ALL: [Mark; 3] = [Mark::Minus, Mark::Plus, Mark::Star];
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mark::Minus => "-1",
            Mark::Plus => "1",
            Mark::Star => "*",
        })
    }
}

/// Checks that `values` is a permutation of 1..=n.
pub fn check_text(values: &[u64]) -> Result<()> {
    let n = values.len() as u64;
    let mut seen = BTreeSet::new();
    for &d in values {
        if d < 1 || d > n {
            return Err(Error::NotAText(format!("value {d} outside 1..={n}")));
        }
        if !seen.insert(d) {
            return Err(Error::NotAText(format!("value {d} occurs twice")));
        }
    }
    Ok(())
}

/// Marked string projection of the text (labels, values).
pub fn msp(labels: &[usize], values: &[u64]) -> Result<Vec<(usize, Mark)>> {
    if labels.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: labels.len(), got: values.len() });
    }
    check_text(values)?;
    Ok((0..labels.len())
        .map(|i| {
            let m = match values.get(i + 1) {
                Some(&next) if next + 1 == values[i] => Mark::Minus,
                Some(&next) if values[i] + 1 == next => Mark::Plus,
                _ => Mark::Star,
            };
            (labels[i], m)
        })
        .collect())
}

/// (T₁, T₂): T₁ is a letter-to-letter word transducer from Σ × marks to Γ,
/// written as an NFA over (input, mark, output) triples; T₂ reads Γ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextAutomaton {
    pub sigma: Alphabet,
    pub gamma: Alphabet,
    pub t1: Nfa<(usize, Mark, usize)>,
    pub t2: Nfa<usize>,
}

impl TextAutomaton {
    pub fn new(sigma: Alphabet, gamma: Alphabet, t1: Nfa<(usize, Mark, usize)>, t2: Nfa<usize>) -> Result<Self> {
        if t1.alphabet().iter().any(|&(a, _, b)| a >= sigma.len() || b >= gamma.len()) || t2.alphabet().iter().any(|&b| b >= gamma.len()) {
            return Err(Error::AlphabetMismatch("text automaton symbol outside Σ or Γ".into()));
        }
        Ok(TextAutomaton { sigma, gamma, t1, t2 })
    }

    /// Every output of T₁ on `w`, up to `budget` of them.
    pub fn outputs(&self, w: &[(usize, Mark)], budget: usize) -> Vec<Vec<usize>> {
        let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut stack: Vec<(usize, Vec<usize>)> = self.t1.initial().iter().map(|&p| (p, Vec::new())).collect();
        while let Some((p, o)) = stack.pop() {
            if out.len() >= budget {
                break;
            }
            if o.len() == w.len() {
                if self.t1.is_final(p) {
                    out.insert(o);
                }
                continue;
            }
            let (a, m) = w[o.len()];
            for &((x, mk, b), q) in self.t1.out(p) {
                if x == a && mk == m {
                    let mut o2 = o.clone();
                    o2.push(b);
                    stack.push((q, o2));
                }
            }
        }
        out.into_iter().collect()
    }

    /// Acceptance of a text, by direct simulation.
    pub fn accepts_text(&self, labels: &[usize], values: &[u64]) -> Result<bool> {
        let w = msp(labels, values)?;
        let mut by_value: Vec<usize> = (0..values.len()).collect();
        by_value.sort_by_key(|&i| values[i]);
        for o in self.outputs(&w, usize::MAX) {
            let word: Vec<usize> = by_value.iter().map(|&i| o[i]).collect();
            if self.t2.member(&word)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// Some text with these labels is accepted; brute force over the n!
    /// value orders.
    pub fn accepts_some_text(&self, labels: &[usize]) -> Result<bool> {
        let n = labels.len();
        let mut perm: Vec<u64> = (1..=n as u64).collect();
        loop {
            if self.accepts_text(labels, &perm)? {
                return Ok(true);
            }
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else { return Ok(false) };
            let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).expect("successor exists");
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
    }
}

/// The data word as a chain tree.
pub fn word_tree(sigma: &Alphabet, labels: &[usize], values: &[u64]) -> Result<OrderedDataTree> {
    if labels.is_empty() || labels.len() != values.len() {
        return Err(Error::Invalid("a data word needs as many values as labels, at least one".into()));
    }
    let mut node: Option<Nested<u64>> = None;
    for i in (0..labels.len()).rev() {
        let kids = node.take().into_iter().collect();
        node = Some(Nested::new(sigma.name(labels[i]), values[i], kids));
    }
    DataTree::from_nested(&node.expect("nonempty"), Some(sigma))
}

/// Labels and values of a chain tree; `None` if some node has two children.
pub fn tree_word<V: Clone>(t: &DataTree<V>) -> Option<(Vec<usize>, Vec<V>)> {
    let mut u = 0;
    let mut labels = vec![t.label(0)];
    let mut values = vec![t.value(0).clone()];
    loop {
        match t.children(u) {
            [] => return Some((labels, values)),
            [c] => {
                u = *c;
                labels.push(t.label(u));
                values.push(t.value(u).clone());
            }
            _ => return None,
        }
    }
}

/// Weak ODTA that guesses msp(w) and runs T₁ on it, while M runs T₂ over
/// the singleton classes of the output. Γ₀ = Γ forces distinct values.
///
/// The state at position i is (p, b, γ): T₁ is in p before reading
/// position i, which gets mark b and output γ.
pub fn text_automaton_to_weak_odta(ta: &TextAutomaton) -> Result<WeakOdta> {
    let np = ta.t1.num_states();
    let ng = ta.gamma.len();
    let id = |p: usize, m: usize, g: usize| (p * 3 + m) * ng + g;
    let mut names = Vec::with_capacity(np * 3 * ng);
    for p in 0..np {
        for m in Mark::ALL {
            for g in 0..ng {
                names.push(format!("p{p}/{m}/{}", ta.gamma.name(g)));
            }
        }
    }
    let mut base = TreeAutomaton::new(names, ta.sigma.clone());
    let mut emits = Vec::new();
    for p in 0..np {
        for (mi, &m) in Mark::ALL.iter().enumerate() {
            for g in 0..ng {
                for a in 0..ta.sigma.len() {
                    let targets: Vec<usize> =
                        ta.t1.out(p).iter().filter(|&&((x, mk, b), _)| x == a && mk == m && b == g).map(|&(_, q)| q).collect();
                    if targets.is_empty() {
                        continue;
                    }
                    let mut h = Nfa::new(2);
                    h.set_initial(0);
                    h.set_final(1);
                    if m == Mark::Star && targets.iter().any(|&q| ta.t1.is_final(q)) {
                        h.set_final(0);
                    }
                    for &q in &targets {
                        for m2 in 0..3 {
                            for g2 in 0..ng {
                                h.add_transition(0, id(q, m2, g2), 1);
                            }
                        }
                    }
                    let s = id(p, mi, g);
                    base.set_horizontal(s, a, h);
                    emits.push((s, a, g));
                }
            }
        }
    }
    for &p in ta.t1.initial() {
        for m in 0..3 {
            for g in 0..ng {
                base.add_final(id(p, m, g));
            }
        }
    }
    let mut tr = TreeTransducer::new(base, ta.gamma.clone());
    for (s, a, g) in emits {
        tr.add_output(s, a, g);
    }
    let mut m = Nfa::new(ta.t2.num_states());
    ta.t2.initial().iter().for_each(|&p| m.set_initial(p));
    ta.t2.finals().iter().for_each(|&p| m.set_final(p));
    for (p, &g, q) in ta.t2.transitions() {
        m.add_transition(p, LabelSet::singleton(g), q);
    }
    // non-singleton classes are declared but never read
    ta.gamma.nonempty_subsets().for_each(|s| m.declare_symbol(s));
    WeakOdta::new(tr, m, ta.gamma.full_set())
}

//! The example automata as ready-made instances.

use crate::automata::{Nfa, TreeAutomaton, TreeTransducer};
use crate::data::profile::{profile_alphabet, split_profile_symbol};
use crate::data::{Alphabet, LabelSet, Rel};
use crate::error::Result;

use super::model::{Odta, WeakOdta};

/// A four-class tree used throughout the tests.
pub const SAMPLE_TREE: &str = "(a@2 (b@1) (c@2 (b@2 (c@1)) (b@4 (c@6)) (a@7 (b@7))) (a@4) (a@6))";

/// x*
fn star(xs: &[usize]) -> Nfa<usize> {
    let mut m = Nfa::new(1);
    m.set_initial(0);
    m.set_final(0);
    for &x in xs {
        m.add_transition(0, x, 0);
    }
    m
}

/// n* (one of `ys`) n*
fn one_of(n: usize, ys: &[usize]) -> Nfa<usize> {
    let mut m = Nfa::new(2);
    m.set_initial(0);
    m.set_final(1);
    m.add_transition(0, n, 0);
    m.add_transition(1, n, 1);
    for &y in ys {
        m.add_transition(0, y, 1);
    }
    m
}

/// Every nonempty subset of Γ.
pub fn all_symbols(gamma: &Alphabet) -> Vec<LabelSet> {
    gamma.nonempty_subsets().collect()
}

/// (2^Γ ∖ {∅})*
pub fn universal_value_automaton(gamma: &Alphabet) -> Nfa<LabelSet> {
    Nfa::universal(all_symbols(gamma))
}

/// Value automaton with no accepting state.
pub fn empty_value_automaton(gamma: &Alphabet) -> Nfa<LabelSet> {
    let mut m = Nfa::new(1);
    m.set_initial(0);
    for s in all_symbols(gamma) {
        m.add_transition(0, s, 0);
    }
    m
}

/// Identity transducer accepting every tree, M = (2^Σ ∖ {∅})*, Γ₀ = ∅.
pub fn all_accepting_weak(sigma: &Alphabet) -> WeakOdta {
    let tr = TreeTransducer::identity(TreeAutomaton::universal(sigma.clone()));
    let m = universal_value_automaton(sigma);
    WeakOdta::new(tr, m, LabelSet::EMPTY).expect("well-formed")
}

/// As [`all_accepting_weak`] with M accepting nothing.
pub fn never_accepting_weak(sigma: &Alphabet) -> WeakOdta {
    let tr = TreeTransducer::identity(TreeAutomaton::universal(sigma.clone()));
    WeakOdta::new(tr, empty_value_automaton(sigma), LabelSet::EMPTY).expect("well-formed")
}

/// M counting occurrences of symbol `s`: accepting when the count is
/// `m` (`modulo = false`) or ≡ 0 mod `m` (`modulo = true`).
pub fn counting_automaton(gamma: &Alphabet, s: LabelSet, m: usize, modulo: bool) -> Nfa<LabelSet> {
    let n = if modulo { m } else { m + 1 };
    let mut a = Nfa::new(n);
    a.set_initial(0);
    a.set_final(if modulo { 0 } else { m });
    for sym in all_symbols(gamma) {
        for i in 0..n {
            if sym != s {
                a.add_transition(i, sym, i);
            } else if modulo {
                a.add_transition(i, sym, (i + 1) % m);
            } else if i < m {
                a.add_transition(i, sym, i + 1);
            }
        }
    }
    a
}

/// |[S]_t| = m, as a weak ODTA.
pub fn class_size_weak(sigma: &Alphabet, s: &[&str], m: usize) -> Result<WeakOdta> {
    let set = sigma.set_from_names(s.iter().copied())?;
    let tr = TreeTransducer::identity(TreeAutomaton::universal(sigma.clone()));
    WeakOdta::new(tr, counting_automaton(sigma, set, m, false), LabelSet::EMPTY)
}

pub fn class_size(sigma: &Alphabet, s: &[&str], m: usize) -> Result<Odta> {
    Ok(Odta::from_weak(&class_size_weak(sigma, s, m)?))
}

/// |[S]_t| ≡ 0 mod m, as a weak ODTA.
pub fn class_size_mod_weak(sigma: &Alphabet, s: &[&str], m: usize) -> Result<WeakOdta> {
    let set = sigma.set_from_names(s.iter().copied())?;
    let tr = TreeTransducer::identity(TreeAutomaton::universal(sigma.clone()));
    WeakOdta::new(tr, counting_automaton(sigma, set, m, true), LabelSet::EMPTY)
}

pub fn class_size_mod(sigma: &Alphabet, s: &[&str], m: usize) -> Result<Odta> {
    Ok(Odta::from_weak(&class_size_mod_weak(sigma, s, m)?))
}

/// Two a-nodes u above v with v's value ≤ u's, over Σ = {a, b}.
pub fn descending_pair_weak() -> WeakOdta {
    let sigma = Alphabet::new(["a", "b"]).expect("nonempty");
    let gamma = Alphabet::new(["alpha", "beta", "gamma"]).expect("nonempty");
    // N: no mark below; Bh/Bb: β here/below; Ah/Ab: α here/below
    let (n, bh, bb, ah, ab) = (0, 1, 2, 3, 4);
    let mut ta = TreeAutomaton::new(["N", "Bh", "Bb", "Ah", "Ab"].map(String::from).to_vec(), sigma);
    ta.add_final(ah);
    ta.add_final(ab);
    for a in 0..2 {
        ta.set_horizontal(n, a, star(&[n]));
        ta.set_horizontal(bb, a, one_of(n, &[bh, bb]));
        ta.set_horizontal(ab, a, one_of(n, &[ah, ab]));
    }
    ta.set_horizontal(bh, 0, star(&[n]));
    ta.set_horizontal(ah, 0, one_of(n, &[bh, bb]));
    let mut tr = TreeTransducer::new(ta, gamma.clone());
    let (al, be, ga) = (0, 1, 2);
    for a in 0..2 {
        tr.add_output(n, a, ga);
        tr.add_output(bb, a, ga);
        tr.add_output(ab, a, ga);
    }
    tr.add_output(bh, 0, be);
    tr.add_output(ah, 0, al);
    // 0: neither seen, 1: β seen, 2: both seen
    let mut m = Nfa::new(3);
    m.set_initial(0);
    m.set_final(2);
    for s in all_symbols(&gamma) {
        let (ha, hb) = (s.contains(al), s.contains(be));
        match (ha, hb) {
            (false, false) => {
                m.add_transition(0, s, 0);
                m.add_transition(1, s, 1);
                m.add_transition(2, s, 2);
            }
            (true, true) => m.add_transition(0, s, 2),
            (false, true) => m.add_transition(0, s, 1),
            (true, false) => m.add_transition(1, s, 2),
        }
    }
    WeakOdta::new(tr, m, LabelSet::EMPTY).expect("well-formed")
}

pub fn descending_pair() -> Odta {
    Odta::from_weak(&descending_pair_weak())
}

/// Every a-node whose value differs from its parent's carries a distinct
/// value, and one of them holds the largest value. Σ = {a, b}.
pub fn distinct_with_max() -> Odta {
    let sigma = Alphabet::new(["a", "b"]).expect("nonempty");
    let gamma = Alphabet::new(["alpha", "beta"]).expect("nonempty");
    let pa = profile_alphabet(&sigma);
    let mut ta = TreeAutomaton::with_states(1, pa.clone());
    ta.add_final(0);
    for i in 0..pa.len() {
        ta.set_horizontal(0, i, star(&[0]));
    }
    let mut tr = TreeTransducer::new(ta, gamma.clone());
    for i in 0..pa.len() {
        let (a, p) = split_profile_symbol(i);
        tr.add_output(0, i, if a == 0 && p.parent == Rel::Diff { 0 } else { 1 });
    }
    let mut m = Nfa::new(2);
    m.set_initial(0);
    m.set_final(1);
    for s in all_symbols(&gamma) {
        m.add_transition(0, s, 0);
        if s.contains(0) {
            m.add_transition(0, s, 1);
        }
    }
    Odta::new(sigma, tr, m, LabelSet::singleton(0)).expect("well-formed")
}

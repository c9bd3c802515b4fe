//! Union and intersection of weak ODTA and ODTA.
//!
//! There is no complement. Let L be the trees with two a-nodes u above v
//! and v's value at most u's ([`descending_pair`](super::fixtures::descending_pair)).
//! Suppose S accepts the complement. A chain of |Γ| + 1 a-nodes with
//! increasing values lies outside L, so S accepts it with some output in
//! which two nodes share a label. Swapping the values of those two nodes
//! puts the tree in L. The profile is unchanged, since it only records
//! equalities and all values are distinct, so the transducer can emit the
//! same output. The value word is unchanged too, since the two nodes have
//! the same output label. So S also accepts the swapped tree. Below, the
//! argument is run against random ODTA:
//!
//! ```
//! use odta::data::{profile, Alphabet, DataTree};
//! use odta::gen;
//! use odta::odta::fixtures::descending_pair;
//! use odta::odta::{member_odta, Membership};
//!
//! let sigma = Alphabet::new(["a", "b"]).unwrap();
//! let two_a = descending_pair();
//! let mut accepted = 0;
//! for seed in 0..40 {
//!     let s = gen::random_odta(&mut gen::rng(seed), 2, &sigma, 2);
//!     let n = s.output().len() + 1;
//!     let text = (1..=n).rev().fold(String::new(), |inner, v| format!("(a@{v}{}{inner})", if inner.is_empty() { "" } else { " " }));
//!     let chain = odta::data::parse_tree(&text, Some(&sigma)).unwrap();
//!     assert_eq!(member_odta(&two_a, &chain, 1 << 20).unwrap(), Membership::NonMember);
//!     let Membership::Member(out) = member_odta(&s, &chain, 1 << 20).unwrap() else { continue };
//!     accepted += 1;
//!     let (i, j) = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| out[i] == out[j]).unwrap();
//!     let mut values = chain.values().to_vec();
//!     values.swap(i, j);
//!     let swapped = DataTree::new(sigma.clone(), chain.shape().clone(), chain.labels().to_vec(), values).unwrap();
//!     assert_eq!(profile(&swapped), profile(&chain));
//!     assert!(matches!(member_odta(&two_a, &swapped, 1 << 20).unwrap(), Membership::Member(_)));
//!     // S cannot tell the two apart
//!     assert!(matches!(member_odta(&s, &swapped, 1 << 20).unwrap(), Membership::Member(_)));
//! }
//! assert!(accepted > 0);
//! ```

use crate::automata::{Nfa, TreeTransducer};
use crate::data::{Alphabet, LabelSet};
use crate::error::{Error, Result};

use super::model::{Odta, WeakOdta};

/// Largest |S₁|·|S₂| for which the product value automaton enumerates the
/// subsets of S₁ × S₂.
pub const MAX_PAIR_GRID: usize = 20;

type Parts = (TreeTransducer, Nfa<LabelSet>, LabelSet);

fn map_set(s: LabelSet, f: impl Fn(usize) -> usize) -> LabelSet {
    s.iter().fold(LabelSet::EMPTY, |acc, i| acc.with(f(i)))
}

fn union_parts(a: (&TreeTransducer, &Nfa<LabelSet>, LabelSet), b: (&TreeTransducer, &Nfa<LabelSet>, LabelSet)) -> Result<Parts> {
    if a.0.input() != b.0.input() {
        return Err(Error::AlphabetMismatch("union needs the same input alphabet".into()));
    }
    let (g1, g2) = (a.0.output(), b.0.output());
    let names = g1.names().iter().map(|x| format!("l.{x}")).chain(g2.names().iter().map(|x| format!("r.{x}")));
    let gamma = Alphabet::new(names)?;
    let off_g = g1.len();
    let base = a.0.base().union(b.0.base())?;
    let off_q = a.0.base().num_states();
    let mut tr = TreeTransducer::new(base, gamma);
    for (q, x, o) in a.0.relation() {
        tr.add_output(q, x, o);
    }
    for (q, x, o) in b.0.relation() {
        tr.add_output(q + off_q, x, o + off_g);
    }
    let m1 = a.1.map_symbols(|&s| Some(s));
    let m2 = b.1.map_symbols(|&s| Some(map_set(s, |i| i + off_g)));
    let g0 = a.2.union(map_set(b.2, |i| i + off_g));
    Ok((tr, m1.union(&m2), g0))
}

fn intersect_parts(a: (&TreeTransducer, &Nfa<LabelSet>, LabelSet), b: (&TreeTransducer, &Nfa<LabelSet>, LabelSet)) -> Result<Parts> {
    if a.0.input() != b.0.input() {
        return Err(Error::AlphabetMismatch("intersection needs the same input alphabet".into()));
    }
    let (g1, g2) = (a.0.output(), b.0.output());
    let n2 = g2.len();
    let mut names = Vec::new();
    for x in g1.names() {
        for y in g2.names() {
            names.push(format!("{x}.{y}"));
        }
    }
    let gamma = Alphabet::new(names)?;
    let base = a.0.base().intersect(b.0.base())?;
    let nq2 = b.0.base().num_states();
    let mut tr = TreeTransducer::new(base, gamma);
    for (q1, x, o1) in a.0.relation() {
        for (q2, y, o2) in b.0.relation() {
            if x == y {
                tr.add_output(q1 * nq2 + q2, x, o1 * n2 + o2);
            }
        }
    }
    let (m1, m2) = (a.1, b.1);
    let ns2 = m2.num_states();
    let mut m = Nfa::new(m1.num_states() * ns2);
    for &p in m1.initial() {
        for &r in m2.initial() {
            m.set_initial(p * ns2 + r);
        }
    }
    for &p in m1.finals() {
        for &r in m2.finals() {
            m.set_final(p * ns2 + r);
        }
    }
    let (z1, z2) = (a.2, b.2);
    for (p, s1, q) in m1.transitions() {
        for (r, s2, t) in m2.transitions() {
            for s in pair_sets(*s1, *s2, n2, z1, z2)? {
                m.add_transition(p * ns2 + r, s, q * ns2 + t);
            }
        }
    }
    let mut g0 = LabelSet::EMPTY;
    for i in 0..g1.len() {
        for j in 0..n2 {
            if z1.contains(i) || z2.contains(j) {
                g0 = g0.with(i * n2 + j);
            }
        }
    }
    Ok((tr, m, g0))
}

/// Sets S of pairs with π₁(S) = s1 and π₂(S) = s2 in which no two pairs
/// share a distinctness label: two such pairs with one value would put two
/// equal-valued nodes under that label.
fn pair_sets(s1: LabelSet, s2: LabelSet, n2: usize, z1: LabelSet, z2: LabelSet) -> Result<Vec<LabelSet>> {
    let grid: Vec<(usize, usize)> = s1.iter().flat_map(|i| s2.iter().map(move |j| (i, j))).collect();
    if grid.len() > MAX_PAIR_GRID {
        return Err(Error::CapExceeded(format!("product value automaton over {} label pairs", grid.len())));
    }
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << grid.len()) {
        let pairs: Vec<(usize, usize)> = (0..grid.len()).filter(|k| mask >> k & 1 == 1).map(|k| grid[k]).collect();
        let p1 = pairs.iter().fold(LabelSet::EMPTY, |s, &(i, _)| s.with(i));
        let p2 = pairs.iter().fold(LabelSet::EMPTY, |s, &(_, j)| s.with(j));
        if p1 != s1 || p2 != s2 {
            continue;
        }
        let clash = pairs.iter().enumerate().any(|(k, &(i, j))| {
            pairs[k + 1..].iter().any(|&(i2, j2)| (i == i2 && z1.contains(i)) || (j == j2 && z2.contains(j)))
        });
        if !clash {
            out.push(pairs.iter().fold(LabelSet::EMPTY, |s, &(i, j)| s.with(i * n2 + j)));
        }
    }
    Ok(out)
}

pub fn weak_union(a: &WeakOdta, b: &WeakOdta) -> Result<WeakOdta> {
    let (tr, m, g0) = union_parts(
        (a.transducer(), a.value_automaton(), a.gamma0()),
        (b.transducer(), b.value_automaton(), b.gamma0()),
    )?;
    WeakOdta::new(tr, m, g0)
}

pub fn weak_intersect(a: &WeakOdta, b: &WeakOdta) -> Result<WeakOdta> {
    let (tr, m, g0) = intersect_parts(
        (a.transducer(), a.value_automaton(), a.gamma0()),
        (b.transducer(), b.value_automaton(), b.gamma0()),
    )?;
    WeakOdta::new(tr, m, g0)
}

pub fn odta_union(a: &Odta, b: &Odta) -> Result<Odta> {
    if a.sigma() != b.sigma() {
        return Err(Error::AlphabetMismatch("union needs the same Σ".into()));
    }
    let (tr, m, g0) = union_parts(
        (a.transducer(), a.value_automaton(), a.gamma0()),
        (b.transducer(), b.value_automaton(), b.gamma0()),
    )?;
    Odta::new(a.sigma().clone(), tr, m, g0)
}

pub fn odta_intersect(a: &Odta, b: &Odta) -> Result<Odta> {
    if a.sigma() != b.sigma() {
        return Err(Error::AlphabetMismatch("intersection needs the same Σ".into()));
    }
    let (tr, m, g0) = intersect_parts(
        (a.transducer(), a.value_automaton(), a.gamma0()),
        (b.transducer(), b.value_automaton(), b.gamma0()),
    )?;
    Odta::new(a.sigma().clone(), tr, m, g0)
}

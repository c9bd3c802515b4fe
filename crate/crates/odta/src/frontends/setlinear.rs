//! Tree automata with set and linear constraints as extended weak ODTAs.

use super::terms::{in_family, Constraint, DataTerm, IntegrityConstraint, LinVar, SetConstraint, MAX_FAMILY_SIGMA};
use crate::automata::{Nfa, TreeAutomaton, TreeTransducer};
use crate::data::{Alphabet, LabelSet};
use crate::error::{Error, Result};
use crate::odta::{class_key, empty_weak_ext, label_key, EmptinessCaps, EmptinessReport, EmptinessVerdict, ExtendedWeakOdta, WeakOdta};
use crate::presburger::{Formula, PresburgerFormula};

/// Most `τ ≠ ∅` constraints tracked by the value automaton.
pub const MAX_NONEMPTY_CONSTRAINTS: usize = 16;

/// Splits key constraints off and rewrites incl(a, b) as V(a) ∩ ¬V(b) = ∅.
fn normalize(cs: &[Constraint]) -> (LabelSet, Vec<SetConstraint>, Vec<&super::terms::LinearConstraint>) {
    let mut g0 = LabelSet::EMPTY;
    let mut sets = Vec::new();
    let mut lins = Vec::new();
    for c in cs {
        match c {
            Constraint::Integrity(IntegrityConstraint::Key(a)) => g0 = g0.with(*a),
            Constraint::Integrity(IntegrityConstraint::Inclusion(a, b)) => sets.push(SetConstraint {
                term: DataTerm::inter(DataTerm::V(*a), DataTerm::compl(DataTerm::V(*b))),
                empty: true,
            }),
            Constraint::Set(s) => sets.push(s.clone()),
            Constraint::Linear(l) => lins.push(l),
        }
    }
    (g0, sets, lins)
}

/// Value automaton for the set constraints: symbols of a `τ = ∅` family are
/// never read, and the state records which `τ ≠ ∅` families have been met.
fn set_automaton(sigma: &Alphabet, sets: &[SetConstraint]) -> Result<Nfa<LabelSet>> {
    let (empty, nonempty): (Vec<&SetConstraint>, Vec<&SetConstraint>) = sets.iter().partition(|s| s.empty);
    if nonempty.len() > MAX_NONEMPTY_CONSTRAINTS {
        return Err(Error::CapExceeded(format!("{} nonempty-set constraints > {MAX_NONEMPTY_CONSTRAINTS}", nonempty.len())));
    }
    let k = nonempty.len();
    let full = (1usize << k) - 1;
    let symbols: Vec<(LabelSet, usize)> = sigma
        .nonempty_subsets()
        .filter(|&s| !empty.iter().any(|c| in_family(&c.term, s)))
        .map(|s| (s, (0..k).filter(|&i| in_family(&nonempty[i].term, s)).fold(0, |m, i| m | 1 << i)))
        .collect();
    let mut index = vec![usize::MAX; full + 1];
    let mut order = vec![0usize];
    index[0] = 0;
    let mut trans = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mask = order[i];
        for &(s, bits) in &symbols {
            let next = mask | bits;
            if index[next] == usize::MAX {
                index[next] = order.len();
                order.push(next);
            }
            trans.push((index[mask], s, index[next]));
        }
        i += 1;
    }
    let mut m = Nfa::new(order.len());
    m.set_initial(0);
    if index[full] != usize::MAX {
        m.set_final(index[full]);
    }
    for (p, s, q) in trans {
        m.add_transition(p, s, q);
    }
    sigma.nonempty_subsets().for_each(|s| m.declare_symbol(s));
    Ok(m)
}

/// ⟨identity(a), M, Γ₀⟩ with ξ the conjunction of the linear constraints.
pub fn setlinear_to_odta(a: &TreeAutomaton, cs: &[Constraint]) -> Result<ExtendedWeakOdta> {
    let sigma = a.alphabet().clone();
    if sigma.len() > MAX_FAMILY_SIGMA {
        return Err(Error::CapExceeded(format!("2^|Σ| with |Σ| = {} > {MAX_FAMILY_SIGMA}", sigma.len())));
    }
    let (g0, sets, lins) = normalize(cs);
    let m = set_automaton(&sigma, &sets)?;
    let base = WeakOdta::new(TreeTransducer::identity(a.clone()), m, g0)?;
    let mut xi = PresburgerFormula::new();
    for l in lins {
        let terms: Vec<(usize, i64)> = l
            .terms
            .iter()
            .map(|&(v, c)| {
                let k = match v {
                    LinVar::Count(x) => label_key(&sigma, x),
                    LinVar::Class(s) => class_key(&sigma, s),
                };
                (xi.var(k), c)
            })
            .collect();
        xi.add(Formula::atom(terms, l.cmp, l.rhs));
    }
    ExtendedWeakOdta::new(base, xi)
}

/// Emptiness of the reduction; a witness is re-checked against `a` and
/// every constraint directly.
pub fn setlin_sat(a: &TreeAutomaton, cs: &[Constraint], caps: &EmptinessCaps) -> Result<EmptinessReport> {
    let s = setlinear_to_odta(a, cs)?;
    let r = empty_weak_ext(&s, caps)?;
    if let EmptinessVerdict::Nonempty { witness, .. } = &r.verdict {
        let ok = a.accepts(witness)? && cs.iter().map(|c| c.holds(witness, a.alphabet())).collect::<Result<Vec<_>>>()?.into_iter().all(|b| b);
        if !ok {
            return Err(Error::DecodeFailed("witness violates the automaton or a constraint".into()));
        }
    }
    Ok(r)
}

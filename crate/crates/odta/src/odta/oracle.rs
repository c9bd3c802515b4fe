//! Membership by enumerating every transducer output. Slow, but shares no
//! code with the class-ordered search.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use super::member::profile_labels;
use super::model::{Odta, WeakOdta, ZonalOdta};
use crate::automata::{Nfa, TreeTransducer};
use crate::data::{zones, DataTree, LabelSet, ZonalSymbol};
use crate::error::Result;

/// V_Γ and Γ₀ acceptance of one output labelling with the given values.
pub fn output_accepted<V: Ord>(m: &Nfa<LabelSet>, gamma0: LabelSet, out: &[usize], values: &[V]) -> bool {
    let mut at: BTreeMap<&V, LabelSet> = BTreeMap::new();
    let mut seen: BTreeSet<(usize, &V)> = BTreeSet::new();
    for (u, &b) in out.iter().enumerate() {
        if gamma0.contains(b) && !seen.insert((b, &values[u])) {
            return false;
        }
        let e = at.entry(&values[u]).or_default();
        *e = e.with(b);
    }
    let w: Vec<LabelSet> = at.into_values().collect();
    m.member(&w).unwrap_or(false)
}

fn exhaustive(tr: &TreeTransducer, t_shape: &crate::data::Shape, labels: &[usize], budget: usize, ok: &dyn Fn(&[usize]) -> bool) -> Option<bool> {
    let mut found = false;
    let complete = tr.for_each_output(t_shape, labels, budget, &mut |out| {
        if ok(out) {
            found = true;
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    if found {
        Some(true)
    } else if complete {
        Some(false)
    } else {
        None
    }
}

pub fn member_weak_exhaustive<V: Clone + Ord>(s: &WeakOdta, t: &DataTree<V>, budget: usize) -> Result<Option<bool>> {
    let labels = s.transducer().base().translate_labels(t)?;
    let m = s.value_automaton();
    Ok(exhaustive(s.transducer(), t.shape(), &labels, budget, &|out| output_accepted(m, s.gamma0(), out, t.values())))
}

pub fn member_odta_exhaustive<V: Clone + Ord>(s: &Odta, t: &DataTree<V>, budget: usize) -> Result<Option<bool>> {
    let labels = profile_labels(s.sigma(), t)?;
    let m = s.value_automaton();
    Ok(exhaustive(s.transducer(), t.shape(), &labels, budget, &|out| output_accepted(m, s.gamma0(), out, t.values())))
}

pub fn member_zonal_exhaustive<V: Clone + Ord>(s: &ZonalOdta, t: &DataTree<V>, budget: usize) -> Result<Option<bool>> {
    let labels = profile_labels(s.sigma(), t)?;
    let part = zones(t);
    let m = s.value_automaton();
    let g0 = s.gamma0();
    Ok(exhaustive(s.transducer(), t.shape(), &labels, budget, &|out| {
        let mut seen: BTreeSet<(usize, &V)> = BTreeSet::new();
        for (u, &b) in out.iter().enumerate() {
            if g0.contains(b) && !seen.insert((b, t.value(u))) {
                return false;
            }
        }
        let mut per: BTreeMap<&V, Vec<LabelSet>> = BTreeMap::new();
        for z in &part.zones {
            let l = z.members.iter().fold(LabelSet::EMPTY, |s, &u| s.with(out[u]));
            per.entry(&z.value).or_default().push(l);
        }
        let w: Vec<ZonalSymbol> = per.into_values().map(ZonalSymbol::new).collect();
        m.member(&w).unwrap_or(false)
    }))
}

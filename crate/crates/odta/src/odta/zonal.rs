use std::collections::BTreeMap;

use super::model::{Odta, ZonalOdta};
use crate::automata::Nfa;
use crate::data::{LabelSet, ZonalSymbol};
use crate::error::{Error, Result};

/// Default bound on the number of zonal symbols materialized.
pub const DEFAULT_ZONE_CAP: usize = 100_000;

/// Every set P of nonempty subsets of `s` with ∪P = s.
pub fn covers(s: LabelSet, cap: usize) -> Result<Vec<ZonalSymbol>> {
    let elems: Vec<usize> = s.iter().collect();
    let subsets: Vec<LabelSet> = (1u64..(1u64 << elems.len()))
        .map(|m| (0..elems.len()).filter(|k| m >> k & 1 == 1).fold(LabelSet::EMPTY, |a, k| a.with(elems[k])))
        .collect();
    if subsets.len() >= 63 {
        return Err(Error::CapExceeded(format!("covers of a {}-element set", elems.len())));
    }
    let mut out = Vec::new();
    for m in 1u64..(1u64 << subsets.len()) {
        let p: Vec<LabelSet> = (0..subsets.len()).filter(|k| m >> k & 1 == 1).map(|k| subsets[k]).collect();
        if p.iter().fold(LabelSet::EMPTY, |a, &b| a.union(b)) == s {
            if out.len() == cap {
                return Err(Error::CapExceeded(format!("more than {cap} zonal symbols")));
            }
            out.push(ZonalSymbol::new(p));
        }
    }
    Ok(out)
}

/// δ′ = {(q, P, q′) : (q, S, q′) ∈ δ, ∪P = S}.
pub fn zonal_convert(s: &Odta, cap: usize) -> Result<ZonalOdta> {
    let m = s.value_automaton();
    let mut cache: BTreeMap<LabelSet, Vec<ZonalSymbol>> = BTreeMap::new();
    let mut total = 0usize;
    for sym in m.alphabet() {
        let c = covers(*sym, cap.saturating_sub(total))?;
        total += c.len();
        cache.insert(*sym, c);
    }
    let mut z: Nfa<ZonalSymbol> = Nfa::new(m.num_states());
    for &p in m.initial() {
        z.set_initial(p);
    }
    for &p in m.finals() {
        z.set_final(p);
    }
    for c in cache.values() {
        for p in c {
            z.declare_symbol(p.clone());
        }
    }
    for (p, sym, q) in m.transitions() {
        for c in &cache[sym] {
            z.add_transition(p, c.clone(), q);
        }
    }
    ZonalOdta::new(s.sigma().clone(), s.transducer().clone(), z, s.gamma0())
}

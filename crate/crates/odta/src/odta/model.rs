use crate::automata::{Nfa, TreeAutomaton, TreeTransducer};
use crate::data::profile::{profile_alphabet, profile_symbol_index, split_profile_symbol};
use crate::data::{Alphabet, LabelSet, ProfileTriple, ZonalSymbol};
use crate::error::{Error, Result};
use crate::presburger::{Key, PresburgerFormula};

fn check_value_automaton(m: &Nfa<LabelSet>, gamma: &Alphabet, gamma0: LabelSet) -> Result<()> {
    gamma.check_set_capacity()?;
    let full = gamma.full_set();
    for s in m.alphabet() {
        if s.is_empty() || !s.is_subset(full) {
            return Err(Error::Invalid(format!("value-automaton symbol {s:?} is not a nonempty subset of the output alphabet")));
        }
    }
    if !gamma0.is_subset(full) {
        return Err(Error::Invalid("distinctness set is not a subset of the output alphabet".into()));
    }
    Ok(())
}

/// ⟨T, M, Γ₀⟩ with T reading plain labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakOdta {
    transducer: TreeTransducer,
    m: Nfa<LabelSet>,
    gamma0: LabelSet,
}

impl WeakOdta {
    pub fn new(transducer: TreeTransducer, m: Nfa<LabelSet>, gamma0: LabelSet) -> Result<Self> {
        check_value_automaton(&m, transducer.output(), gamma0)?;
        Ok(WeakOdta { transducer, m, gamma0 })
    }

    pub fn transducer(&self) -> &TreeTransducer {
        &self.transducer
    }

    pub fn value_automaton(&self) -> &Nfa<LabelSet> {
        &self.m
    }

    pub fn gamma0(&self) -> LabelSet {
        self.gamma0
    }

    pub fn input(&self) -> &Alphabet {
        self.transducer.input()
    }

    pub fn output(&self) -> &Alphabet {
        self.transducer.output()
    }
}

/// ⟨T, M, Γ₀⟩ with T reading Σ × {S,D,A}³.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Odta {
    sigma: Alphabet,
    transducer: TreeTransducer,
    m: Nfa<LabelSet>,
    gamma0: LabelSet,
}

impl Odta {
    pub fn new(sigma: Alphabet, transducer: TreeTransducer, m: Nfa<LabelSet>, gamma0: LabelSet) -> Result<Self> {
        if transducer.input() != &profile_alphabet(&sigma) {
            return Err(Error::AlphabetMismatch("transducer input must be the profile alphabet of Σ".into()));
        }
        check_value_automaton(&m, transducer.output(), gamma0)?;
        Ok(Odta { sigma, transducer, m, gamma0 })
    }

    /// The ODTA whose transducer ignores the profile component.
    pub fn from_weak(w: &WeakOdta) -> Self {
        let sigma = w.input().clone();
        let base = w.transducer().base();
        let mut ta = TreeAutomaton::new(base.state_names().to_vec(), profile_alphabet(&sigma));
        for &q in base.finals() {
            ta.add_final(q);
        }
        for (&(q, a), m) in base.horizontals() {
            for p in ProfileTriple::all() {
                ta.set_horizontal(q, profile_symbol_index(a, p), m.clone());
            }
        }
        let mut tr = TreeTransducer::new(ta, w.output().clone());
        for (q, a, b) in w.transducer().relation() {
            for p in ProfileTriple::all() {
                tr.add_output(q, profile_symbol_index(a, p), b);
            }
        }
        Odta { sigma, transducer: tr, m: w.value_automaton().clone(), gamma0: w.gamma0() }
    }

    /// Drops the profile component when T provably ignores it.
    pub fn to_weak(&self) -> Option<WeakOdta> {
        let base = self.transducer.base();
        let mut ta = TreeAutomaton::new(base.state_names().to_vec(), self.sigma.clone());
        for &q in base.finals() {
            ta.add_final(q);
        }
        for (&(q, i), m) in base.horizontals() {
            let (a, _) = split_profile_symbol(i);
            let same = ProfileTriple::all().all(|p| base.horizontal(q, profile_symbol_index(a, p)) == Some(m));
            if !same {
                return None;
            }
            ta.set_horizontal(q, a, m.clone());
        }
        let mut tr = TreeTransducer::new(ta, self.output().clone());
        for (q, i, b) in self.transducer.relation() {
            let (a, _) = split_profile_symbol(i);
            if !ProfileTriple::all().all(|p| self.transducer.emits(q, profile_symbol_index(a, p), b)) {
                return None;
            }
            tr.add_output(q, a, b);
        }
        WeakOdta::new(tr, self.m.clone(), self.gamma0).ok()
    }

    pub fn sigma(&self) -> &Alphabet {
        &self.sigma
    }

    pub fn transducer(&self) -> &TreeTransducer {
        &self.transducer
    }

    pub fn value_automaton(&self) -> &Nfa<LabelSet> {
        &self.m
    }

    pub fn gamma0(&self) -> LabelSet {
        self.gamma0
    }

    pub fn output(&self) -> &Alphabet {
        self.transducer.output()
    }
}

/// Weak ODTA with a constraint over x_α (output label counts, key family
/// `x`) and x_S (value-word symbol counts, key family `xs`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedWeakOdta {
    pub base: WeakOdta,
    pub xi: PresburgerFormula,
}

/// Count key of output label α.
pub fn label_key(gamma: &Alphabet, a: usize) -> Key {
    Key::symbol(gamma.name(a))
}

/// Count key of value-word symbol S.
pub fn class_key(gamma: &Alphabet, s: LabelSet) -> Key {
    Key::class(gamma.render_set(s))
}

/// Count key of zonal symbol P.
pub fn zonal_key(gamma: &Alphabet, p: &ZonalSymbol) -> Key {
    Key::zonal(p.render(gamma))
}

impl ExtendedWeakOdta {
    pub fn new(base: WeakOdta, xi: PresburgerFormula) -> Result<Self> {
        let gamma = base.output();
        for k in xi.free_keys().into_iter() {
            let ok = match k.family {
                crate::presburger::Family::Symbol => gamma.index(&k.name).is_some(),
                crate::presburger::Family::Class => gamma.parse_set(&k.name).is_ok_and(|s| !s.is_empty() && gamma.render_set(s) == k.name),
                _ => false,
            };
            if !ok {
                return Err(Error::Invalid(format!("constraint mentions undeclared count key {k}")));
            }
        }
        Ok(ExtendedWeakOdta { base, xi })
    }
}

/// ⟨T, M′, Γ₀⟩ with M′ over zonal symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZonalOdta {
    sigma: Alphabet,
    transducer: TreeTransducer,
    m: Nfa<ZonalSymbol>,
    gamma0: LabelSet,
}

impl ZonalOdta {
    pub fn new(sigma: Alphabet, transducer: TreeTransducer, m: Nfa<ZonalSymbol>, gamma0: LabelSet) -> Result<Self> {
        if transducer.input() != &profile_alphabet(&sigma) {
            return Err(Error::AlphabetMismatch("transducer input must be the profile alphabet of Σ".into()));
        }
        transducer.output().check_set_capacity()?;
        let full = transducer.output().full_set();
        for p in m.alphabet() {
            if p.is_empty() || p.sets().iter().any(|s| s.is_empty() || !s.is_subset(full)) {
                return Err(Error::Invalid("zonal symbol must be a nonempty set of nonempty label sets".into()));
            }
        }
        Ok(ZonalOdta { sigma, transducer, m, gamma0 })
    }

    pub fn sigma(&self) -> &Alphabet {
        &self.sigma
    }

    pub fn transducer(&self) -> &TreeTransducer {
        &self.transducer
    }

    pub fn value_automaton(&self) -> &Nfa<ZonalSymbol> {
        &self.m
    }

    pub fn gamma0(&self) -> LabelSet {
        self.gamma0
    }

    pub fn output(&self) -> &Alphabet {
        self.transducer.output()
    }
}

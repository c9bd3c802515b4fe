use std::collections::BTreeMap;

use super::model::{class_key, label_key, ExtendedWeakOdta, Odta, WeakOdta, ZonalOdta};
use crate::automata::{BitSet, Nfa, TreeTransducer};
use crate::data::profile::profile_symbol_index;
use crate::data::{profile, zones, DataTree, LabelSet, Shape, ZonalSymbol};
use crate::error::{Error, Result};
use crate::presburger::{solve, Assignment, Budget, PresburgerFormula, Verdict};

/// Node assignments tried before the search gives up.
pub const DEFAULT_MEMBER_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    /// Output labels (preorder) of an accepting transducer output.
    Member(Vec<usize>),
    NonMember,
    Unknown,
}

impl Membership {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Membership::Member(_) => Some(true),
            Membership::NonMember => Some(false),
            Membership::Unknown => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Membership::Member(_) => "member",
            Membership::NonMember => "non-member",
            Membership::Unknown => "unknown",
        }
    }
}

enum Leaf {
    Accept,
    Reject,
    Unknown,
}

/// How the value-word automaton reads one data-value class.
trait ClassReader {
    fn init(&self) -> BitSet;
    fn step(&self, from: &BitSet, class: usize, out: &[Option<usize>]) -> BitSet;
    fn accepts(&self, at: &BitSet) -> bool;
}

struct SetReader<'a> {
    m: &'a Nfa<LabelSet>,
    classes: &'a [Vec<usize>],
}

impl ClassReader for SetReader<'_> {
    fn init(&self) -> BitSet {
        self.m.initial_set()
    }

    fn step(&self, from: &BitSet, class: usize, out: &[Option<usize>]) -> BitSet {
        let s = self.classes[class].iter().fold(LabelSet::EMPTY, |s, &u| s.with(out[u].expect("class assigned")));
        self.m.step(from, &s)
    }

    fn accepts(&self, at: &BitSet) -> bool {
        self.m.accepts_set(at)
    }
}

struct ZonalReader<'a> {
    m: &'a Nfa<ZonalSymbol>,
    /// zones (as node lists) per value class
    zones: Vec<Vec<Vec<usize>>>,
}

impl ClassReader for ZonalReader<'_> {
    fn init(&self) -> BitSet {
        self.m.initial_set()
    }

    fn step(&self, from: &BitSet, class: usize, out: &[Option<usize>]) -> BitSet {
        let p = ZonalSymbol::new(
            self.zones[class]
                .iter()
                .map(|z| z.iter().fold(LabelSet::EMPTY, |s, &u| s.with(out[u].expect("class assigned")))),
        );
        self.m.step(from, &p)
    }

    fn accepts(&self, at: &BitSet) -> bool {
        self.m.accepts_set(at)
    }
}

/// Nodes grouped by value, classes in ascending value order.
pub(crate) fn classes_of<V: Clone + Ord>(t: &DataTree<V>) -> Vec<Vec<usize>> {
    let mut by: BTreeMap<&V, Vec<usize>> = BTreeMap::new();
    for u in 0..t.len() {
        by.entry(t.value(u)).or_default().push(u);
    }
    by.into_values().collect()
}

struct Search<'a> {
    tr: &'a TreeTransducer,
    shape: &'a Shape,
    labels: &'a [usize],
    classes: &'a [Vec<usize>],
    cands: Vec<Vec<usize>>,
    gamma0: LabelSet,
    reader: &'a dyn ClassReader,
    leaf: &'a mut dyn FnMut(&[usize]) -> Result<Leaf>,
    fixed: Vec<Option<usize>>,
    steps: u64,
    budget: u64,
    saw_unknown: bool,
}

enum Flow {
    Found,
    Continue,
    OutOfBudget,
}

impl Search<'_> {
    fn class(&mut self, ci: usize, at: BitSet) -> Result<Flow> {
        if ci == self.classes.len() {
            if !self.reader.accepts(&at) {
                return Ok(Flow::Continue);
            }
            let out: Vec<usize> = self.fixed.iter().map(|b| b.expect("all assigned")).collect();
            return Ok(match (self.leaf)(&out)? {
                Leaf::Accept => Flow::Found,
                Leaf::Reject => Flow::Continue,
                Leaf::Unknown => {
                    self.saw_unknown = true;
                    Flow::Continue
                }
            });
        }
        self.node(ci, 0, LabelSet::EMPTY, &at)
    }

    /// Assigns the `pi`-th node of class `ci`; `used0` holds the Γ₀ labels
    /// already present in this class.
    fn node(&mut self, ci: usize, pi: usize, used0: LabelSet, at: &BitSet) -> Result<Flow> {
        let class = &self.classes[ci];
        if pi == class.len() {
            let next = self.reader.step(at, ci, &self.fixed);
            if next.is_empty() {
                return Ok(Flow::Continue);
            }
            return self.class(ci + 1, next);
        }
        let u = class[pi];
        for k in 0..self.cands[u].len() {
            let b = self.cands[u][k];
            if self.gamma0.contains(b) && used0.contains(b) {
                continue;
            }
            self.steps += 1;
            if self.steps > self.budget {
                return Ok(Flow::OutOfBudget);
            }
            self.fixed[u] = Some(b);
            if self.tr.feasible(self.shape, self.labels, &self.fixed) {
                let used = if self.gamma0.contains(b) { used0.with(b) } else { used0 };
                match self.node(ci, pi + 1, used, at)? {
                    Flow::Continue => {}
                    f => {
                        if matches!(f, Flow::OutOfBudget) {
                            self.fixed[u] = None;
                        }
                        return Ok(f);
                    }
                }
            }
        }
        self.fixed[u] = None;
        Ok(Flow::Continue)
    }
}

fn run_search(
    tr: &TreeTransducer,
    shape: &Shape,
    labels: &[usize],
    classes: &[Vec<usize>],
    gamma0: LabelSet,
    reader: &dyn ClassReader,
    leaf: &mut dyn FnMut(&[usize]) -> Result<Leaf>,
    budget: u64,
) -> Result<Membership> {
    let n = shape.len();
    let free = vec![None; n];
    let poss = tr.feasible_states(shape, labels, &free);
    if !poss[0].iter().any(|q| tr.base().is_final(q)) {
        return Ok(Membership::NonMember);
    }
    let cands = (0..n)
        .map(|u| {
            let mut c: Vec<usize> = poss[u].iter().flat_map(|q| tr.outputs(q, labels[u]).iter().copied()).collect();
            c.sort_unstable();
            c.dedup();
            c
        })
        .collect();
    let mut s = Search {
        tr,
        shape,
        labels,
        classes,
        cands,
        gamma0,
        reader,
        leaf,
        fixed: free,
        steps: 0,
        budget,
        saw_unknown: false,
    };
    let init = reader.init();
    Ok(match s.class(0, init)? {
        Flow::Found => Membership::Member(s.fixed.iter().map(|b| b.expect("all assigned")).collect()),
        Flow::OutOfBudget => Membership::Unknown,
        Flow::Continue if s.saw_unknown => Membership::Unknown,
        Flow::Continue => Membership::NonMember,
    })
}

/// Labels of `t` as indices of the profile alphabet over `sigma`.
pub(crate) fn profile_labels<V: Clone + PartialEq>(sigma: &crate::data::Alphabet, t: &DataTree<V>) -> Result<Vec<usize>> {
    let p = profile(t);
    (0..t.len())
        .map(|u| {
            let a = sigma.index(t.label_name(u)).ok_or_else(|| Error::UnknownSymbol(t.label_name(u).to_string()))?;
            Ok(profile_symbol_index(a, p.triples[u]))
        })
        .collect()
}

pub fn member_weak<V: Clone + Ord>(s: &WeakOdta, t: &DataTree<V>, budget: u64) -> Result<Membership> {
    let labels = s.transducer().base().translate_labels(t)?;
    let classes = classes_of(t);
    let reader = SetReader { m: s.value_automaton(), classes: &classes };
    run_search(s.transducer(), t.shape(), &labels, &classes, s.gamma0(), &reader, &mut |_| Ok(Leaf::Accept), budget)
}

pub fn member_odta<V: Clone + Ord>(s: &Odta, t: &DataTree<V>, budget: u64) -> Result<Membership> {
    let labels = profile_labels(s.sigma(), t)?;
    let classes = classes_of(t);
    let reader = SetReader { m: s.value_automaton(), classes: &classes };
    run_search(s.transducer(), t.shape(), &labels, &classes, s.gamma0(), &reader, &mut |_| Ok(Leaf::Accept), budget)
}

pub fn member_zonal<V: Clone + Ord>(s: &ZonalOdta, t: &DataTree<V>, budget: u64) -> Result<Membership> {
    let labels = profile_labels(s.sigma(), t)?;
    let classes = classes_of(t);
    let part = zones(t);
    let mut per_class: Vec<Vec<Vec<usize>>> = vec![Vec::new(); classes.len()];
    let index: BTreeMap<&V, usize> = classes.iter().enumerate().map(|(i, c)| (t.value(c[0]), i)).collect();
    for z in &part.zones {
        per_class[index[&z.value]].push(z.members.clone());
    }
    let reader = ZonalReader { m: s.value_automaton(), zones: per_class };
    run_search(s.transducer(), t.shape(), &labels, &classes, s.gamma0(), &reader, &mut |_| Ok(Leaf::Accept), budget)
}

/// x_α and x_S counts of an output labelling, over the free keys of ξ.
pub fn count_assignment(
    xi: &PresburgerFormula,
    gamma: &crate::data::Alphabet,
    out: &[usize],
    classes: &[Vec<usize>],
) -> Assignment {
    let mut counts: BTreeMap<crate::presburger::Key, u64> = BTreeMap::new();
    for &b in out {
        *counts.entry(label_key(gamma, b)).or_default() += 1;
    }
    for c in classes {
        let s = c.iter().fold(LabelSet::EMPTY, |s, &u| s.with(out[u]));
        *counts.entry(class_key(gamma, s)).or_default() += 1;
    }
    xi.free_keys().into_iter().map(|k| (k.clone(), counts.get(k).copied().unwrap_or(0))).collect()
}

/// Whether ξ holds on the given counts; quantified variables are solved for.
pub fn xi_holds(xi: &PresburgerFormula, counts: &Assignment, solver: Budget) -> Result<Option<bool>> {
    let mut f = xi.clone();
    f.pin(counts);
    Ok(match solve(&f, solver)?.verdict {
        Verdict::Sat(_) => Some(true),
        Verdict::Unsat => Some(false),
        Verdict::Unknown => None,
    })
}

pub fn member_weak_ext<V: Clone + Ord>(s: &ExtendedWeakOdta, t: &DataTree<V>, budget: u64, solver: Budget) -> Result<Membership> {
    let w = &s.base;
    let labels = w.transducer().base().translate_labels(t)?;
    let classes = classes_of(t);
    let reader = SetReader { m: w.value_automaton(), classes: &classes };
    let gamma = w.output().clone();
    let mut leaf = |out: &[usize]| -> Result<Leaf> {
        let a = count_assignment(&s.xi, &gamma, out, &classes);
        Ok(match xi_holds(&s.xi, &a, solver)? {
            Some(true) => Leaf::Accept,
            Some(false) => Leaf::Reject,
            None => Leaf::Unknown,
        })
    };
    run_search(w.transducer(), t.shape(), &labels, &classes, w.gamma0(), &reader, &mut leaf, budget)
}

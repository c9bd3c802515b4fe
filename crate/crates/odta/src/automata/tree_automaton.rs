use std::collections::{BTreeMap, BTreeSet};

use super::bitset::BitSet;
use super::nfa::Nfa;
use crate::data::{Alphabet, DataTree, Shape};
use crate::error::{Error, Result};

/// Unranked tree automaton; δ(q, a) is an NFA over states read left to
/// right along the children. A missing δ(q, a) is the empty language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeAutomaton {
    states: Vec<String>,
    alphabet: Alphabet,
    delta: BTreeMap<(usize, usize), Nfa<usize>>,
    finals: BTreeSet<usize>,
}

impl TreeAutomaton {
    pub fn new(states: Vec<String>, alphabet: Alphabet) -> Self {
        TreeAutomaton { states, alphabet, delta: BTreeMap::new(), finals: BTreeSet::new() }
    }

    pub fn with_states(n: usize, alphabet: Alphabet) -> Self {
        TreeAutomaton::new((0..n).map(|i| format!("q{i}")).collect(), alphabet)
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn set_horizontal(&mut self, q: usize, a: usize, m: Nfa<usize>) {
        assert!(q < self.num_states() && a < self.alphabet.len());
        assert!(m.alphabet().iter().all(|&x| x < self.num_states()), "horizontal NFA over undeclared states");
        self.delta.insert((q, a), m);
    }

    pub fn horizontal(&self, q: usize, a: usize) -> Option<&Nfa<usize>> {
        self.delta.get(&(q, a))
    }

    pub fn horizontals(&self) -> impl Iterator<Item = (&(usize, usize), &Nfa<usize>)> {
        self.delta.iter()
    }

    pub fn add_final(&mut self, q: usize) {
        self.finals.insert(q);
    }

    pub fn finals(&self) -> &BTreeSet<usize> {
        &self.finals
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals.contains(&q)
    }

    /// Automaton over `alphabet` accepting every tree; one state, all final.
    pub fn universal(alphabet: Alphabet) -> Self {
        let mut a = TreeAutomaton::with_states(1, alphabet.clone());
        a.add_final(0);
        for s in 0..alphabet.len() {
            a.set_horizontal(0, s, Nfa::universal([0usize]));
        }
        a
    }

    /// Automaton with no final state.
    pub fn empty(alphabet: Alphabet) -> Self {
        TreeAutomaton::with_states(1, alphabet)
    }

    fn horizontal_accepts(&self, q: usize, a: usize, kids: &[usize], poss: &[BitSet]) -> bool {
        let Some(m) = self.delta.get(&(q, a)) else { return false };
        let mut cur = m.initial_set();
        for &c in kids {
            cur = m.step_where(&cur, |x| poss[c].contains(*x));
            if cur.is_empty() {
                return false;
            }
        }
        m.accepts_set(&cur)
    }

    /// States each node may take in some run of its subtree, restricted to
    /// pairs (node, state) admitted by `allowed`.
    pub fn possible_states(&self, shape: &Shape, labels: &[usize], allowed: &dyn Fn(usize, usize) -> bool) -> Vec<BitSet> {
        let n = shape.len();
        let mut poss = vec![BitSet::new(self.num_states()); n];
        for u in (0..n).rev() {
            for q in 0..self.num_states() {
                if allowed(u, q) && self.horizontal_accepts(q, labels[u], shape.children(u), &poss) {
                    poss[u].insert(q);
                }
            }
        }
        poss
    }

    /// Top-down extraction of a run from possible-state sets; the root state
    /// must be final. Deterministic: smallest choices first.
    pub fn extract_run(&self, shape: &Shape, labels: &[usize], poss: &[BitSet]) -> Option<Vec<usize>> {
        let root = poss[0].iter().find(|q| self.finals.contains(q))?;
        let mut run = vec![usize::MAX; shape.len()];
        run[0] = root;
        for u in 0..shape.len() {
            let q = run[u];
            let kids = shape.children(u);
            let m = self.delta.get(&(q, labels[u]))?;
            let mut fwd = vec![m.initial_set()];
            for &c in kids {
                let next = m.step_where(fwd.last().expect("nonempty"), |x| poss[c].contains(*x));
                fwd.push(next);
            }
            let mut cur = fwd[kids.len()].iter().find(|p| m.is_final(*p))?;
            for i in (0..kids.len()).rev() {
                let c = kids[i];
                let (p, x) = fwd[i]
                    .iter()
                    .flat_map(|p| m.out(p).iter().map(move |&(x, r)| (p, x, r)))
                    .find(|&(_, x, r)| r == cur && poss[c].contains(x))
                    .map(|(p, x, _)| (p, x))?;
                run[c] = x;
                cur = p;
            }
        }
        Some(run)
    }

    pub fn run_labels(&self, shape: &Shape, labels: &[usize]) -> Option<Vec<usize>> {
        let poss = self.possible_states(shape, labels, &|_, _| true);
        self.extract_run(shape, labels, &poss)
    }

    /// Maps tree labels to this automaton's alphabet by name.
    pub fn translate_labels<V: Clone>(&self, t: &DataTree<V>) -> Result<Vec<usize>> {
        (0..t.len())
            .map(|u| self.alphabet.index(t.label_name(u)).ok_or_else(|| Error::UnknownSymbol(t.label_name(u).to_string())))
            .collect()
    }

    /// An accepting run on `t`, if one exists.
    pub fn run<V: Clone>(&self, t: &DataTree<V>) -> Result<Option<Vec<usize>>> {
        let labels = self.translate_labels(t)?;
        Ok(self.run_labels(t.shape(), &labels))
    }

    pub fn accepts<V: Clone>(&self, t: &DataTree<V>) -> Result<bool> {
        Ok(self.run(t)?.is_some())
    }

    /// Independent check of the run conditions.
    pub fn check_run(&self, shape: &Shape, labels: &[usize], run: &[usize]) -> bool {
        if run.len() != shape.len() || !self.finals.contains(&run[0]) {
            return false;
        }
        (0..shape.len()).all(|u| {
            let word: Vec<usize> = shape.children(u).iter().map(|&c| run[c]).collect();
            self.delta.get(&(run[u], labels[u])).is_some_and(|m| m.member(&word).unwrap_or(false))
        })
    }

    fn aligned(&self, o: &TreeAutomaton) -> Result<TreeAutomaton> {
        if self.alphabet == o.alphabet {
            return Ok(o.clone());
        }
        let mine: BTreeSet<&String> = self.alphabet.names().iter().collect();
        let theirs: BTreeSet<&String> = o.alphabet.names().iter().collect();
        if mine != theirs {
            return Err(Error::AlphabetMismatch(format!("{:?} vs {:?}", self.alphabet, o.alphabet)));
        }
        let mut out = TreeAutomaton::new(o.states.clone(), self.alphabet.clone());
        out.finals = o.finals.clone();
        for (&(q, a), m) in &o.delta {
            let b = self.alphabet.lookup(o.alphabet.name(a))?;
            out.delta.insert((q, b), m.clone());
        }
        Ok(out)
    }

    /// L(self) ∪ L(o) by disjoint union of the state sets.
    pub fn union(&self, o: &TreeAutomaton) -> Result<TreeAutomaton> {
        let o = self.aligned(o)?;
        let off = self.num_states();
        let mut names: Vec<String> = self.states.iter().map(|s| format!("l.{s}")).collect();
        names.extend(o.states.iter().map(|s| format!("r.{s}")));
        let mut out = TreeAutomaton::new(names, self.alphabet.clone());
        for (&(q, a), m) in &self.delta {
            out.delta.insert((q, a), m.clone());
        }
        for (&(q, a), m) in &o.delta {
            out.delta.insert((q + off, a), m.map_symbols(|&x| Some(x + off)));
        }
        out.finals = self.finals.iter().copied().chain(o.finals.iter().map(|q| q + off)).collect();
        Ok(out)
    }

    /// L(self) ∩ L(o) by the pair construction.
    pub fn intersect(&self, o: &TreeAutomaton) -> Result<TreeAutomaton> {
        let o = self.aligned(o)?;
        let n2 = o.num_states();
        let mut names = Vec::new();
        for a in &self.states {
            for b in &o.states {
                names.push(format!("({a},{b})"));
            }
        }
        let mut out = TreeAutomaton::new(names, self.alphabet.clone());
        for (&(q1, a), m1) in &self.delta {
            for q2 in 0..n2 {
                let Some(m2) = o.delta.get(&(q2, a)) else { continue };
                let k2 = m2.num_states();
                let mut m = Nfa::new(m1.num_states() * k2);
                for &i in m1.initial() {
                    for &j in m2.initial() {
                        m.set_initial(i * k2 + j);
                    }
                }
                for &i in m1.finals() {
                    for &j in m2.finals() {
                        m.set_final(i * k2 + j);
                    }
                }
                for (p1, &x1, r1) in m1.transitions() {
                    for (p2, &x2, r2) in m2.transitions() {
                        m.add_transition(p1 * k2 + p2, x1 * n2 + x2, r1 * k2 + r2);
                    }
                }
                out.delta.insert((q1 * n2 + q2, a), m.trim());
            }
        }
        for &f1 in &self.finals {
            for &f2 in &o.finals {
                out.finals.insert(f1 * n2 + f2);
            }
        }
        Ok(out)
    }

    /// States that occur in some accepted tree's run neighbourhood: bottom-up
    /// productive states.
    pub fn productive(&self) -> BitSet {
        let n = self.num_states();
        let mut prod = BitSet::new(n);
        loop {
            let mut changed = false;
            for (&(q, _), m) in &self.delta {
                if prod.contains(q) {
                    continue;
                }
                let restricted = m.map_symbols(|&x| prod.contains(x).then_some(x));
                if !restricted.is_empty() {
                    prod.insert(q);
                    changed = true;
                }
            }
            if !changed {
                return prod;
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        let p = self.productive();
        !self.finals.iter().any(|&q| p.contains(q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DataTree, Nested};

    fn parity_nfa(accept: usize) -> Nfa<usize> {
        let mut m = Nfa::new(2);
        m.set_initial(0);
        m.set_final(accept);
        for p in 0..2 {
            for x in 0..2 {
                m.add_transition(p, x, p ^ x);
            }
        }
        m
    }

    fn parity() -> TreeAutomaton {
        // state = parity of the number of a-nodes in the subtree; "b" is 1
        let al = Alphabet::new(["a", "b"]).unwrap();
        let mut ta = TreeAutomaton::new(vec!["even".into(), "odd".into()], al);
        for q in 0..2 {
            ta.set_horizontal(q, 0, parity_nfa(1 - q));
            ta.set_horizontal(q, 1, parity_nfa(q));
        }
        ta.add_final(0);
        ta
    }

    #[test]
    fn parity_run() {
        let ta = parity();
        let t3 = DataTree::from_nested(&Nested::new("a", (), vec![Nested::leaf("a", ()), Nested::leaf("a", ())]), None).unwrap();
        assert_eq!(ta.run(&t3).unwrap(), None);
        let t2 = DataTree::from_nested(&Nested::new("b", (), vec![Nested::leaf("a", ()), Nested::leaf("a", ())]), None).unwrap();
        let run = ta.run(&t2).unwrap().unwrap();
        let labels = ta.translate_labels(&t2).unwrap();
        assert!(ta.check_run(t2.shape(), &labels, &run));
    }

    #[test]
    fn single_leaf() {
        let al = Alphabet::new(["a"]).unwrap();
        let mut ta = TreeAutomaton::with_states(1, al);
        ta.set_horizontal(0, 0, Nfa::epsilon());
        ta.add_final(0);
        let t = DataTree::from_nested(&Nested::leaf("a", ()), None).unwrap();
        assert_eq!(ta.run(&t).unwrap(), Some(vec![0]));
        let bad = DataTree::from_nested(&Nested::leaf("z", ()), None).unwrap();
        assert!(ta.run(&bad).is_err());
    }

    #[test]
    fn products_behave() {
        let ta = parity();
        let all = TreeAutomaton::universal(ta.alphabet().clone());
        let t = DataTree::from_nested(&Nested::new("b", (), vec![Nested::leaf("a", ())]), None).unwrap();
        assert_eq!(ta.intersect(&all).unwrap().accepts(&t).unwrap(), ta.accepts(&t).unwrap());
        assert!(ta.union(&all).unwrap().accepts(&t).unwrap());
        assert!(!ta.union(&TreeAutomaton::empty(ta.alphabet().clone())).unwrap().accepts(&t).unwrap());
        assert!(TreeAutomaton::empty(ta.alphabet().clone()).is_empty());
        assert!(!ta.is_empty());
    }
}

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Debug;

use super::bitset::BitSet;
use crate::error::{Error, Result};

/// Word automaton without epsilon moves over an arbitrary ordered symbol type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa<S: Ord + Clone> {
    alphabet: BTreeSet<S>,
    initial: BTreeSet<usize>,
    finals: BTreeSet<usize>,
    out: Vec<Vec<(S, usize)>>,
}

impl<S: Ord + Clone + Debug> Nfa<S> {
    pub fn new(states: usize) -> Self {
        Nfa { alphabet: BTreeSet::new(), initial: BTreeSet::new(), finals: BTreeSet::new(), out: vec![Vec::new(); states] }
    }

    /// Language {ε}.
    pub fn epsilon() -> Self {
        let mut m = Nfa::new(1);
        m.set_initial(0);
        m.set_final(0);
        m
    }

    /// Language Σ* over `symbols`.
    pub fn universal<I: IntoIterator<Item = S>>(symbols: I) -> Self {
        let mut m = Nfa::epsilon();
        for s in symbols {
            m.add_transition(0, s, 0);
        }
        m
    }

    pub fn num_states(&self) -> usize {
        self.out.len()
    }

    pub fn add_state(&mut self) -> usize {
        self.out.push(Vec::new());
        self.out.len() - 1
    }

    pub fn declare_symbol(&mut self, s: S) {
        self.alphabet.insert(s);
    }

    pub fn alphabet(&self) -> &BTreeSet<S> {
        &self.alphabet
    }

    pub fn add_transition(&mut self, p: usize, s: S, q: usize) {
        assert!(p < self.out.len() && q < self.out.len(), "transition references undeclared state");
        self.alphabet.insert(s.clone());
        let e = (s, q);
        if let Err(i) = self.out[p].binary_search(&e) {
            self.out[p].insert(i, e);
        }
    }

    pub fn set_initial(&mut self, p: usize) {
        self.initial.insert(p);
    }

    pub fn set_final(&mut self, p: usize) {
        self.finals.insert(p);
    }

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn finals(&self) -> &BTreeSet<usize> {
        &self.finals
    }

    pub fn is_final(&self, p: usize) -> bool {
        self.finals.contains(&p)
    }

    pub fn out(&self, p: usize) -> &[(S, usize)] {
        &self.out[p]
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, &S, usize)> + '_ {
        self.out.iter().enumerate().flat_map(|(p, v)| v.iter().map(move |(s, q)| (p, s, *q)))
    }

    pub fn num_transitions(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    pub fn initial_set(&self) -> BitSet {
        self.initial.iter().copied().collect()
    }

    pub fn step(&self, from: &BitSet, s: &S) -> BitSet {
        let mut to = BitSet::new(self.num_states());
        for p in from.iter() {
            for (t, q) in &self.out[p] {
                if t == s {
                    to.insert(*q);
                }
            }
        }
        to
    }

    /// One step on a set of admissible symbols.
    pub fn step_where(&self, from: &BitSet, ok: impl Fn(&S) -> bool) -> BitSet {
        let mut to = BitSet::new(self.num_states());
        for p in from.iter() {
            for (t, q) in &self.out[p] {
                if ok(t) {
                    to.insert(*q);
                }
            }
        }
        to
    }

    pub fn accepts_set(&self, set: &BitSet) -> bool {
        set.iter().any(|p| self.finals.contains(&p))
    }

    pub fn member(&self, w: &[S]) -> Result<bool> {
        if let Some(s) = w.iter().find(|s| !self.alphabet.contains(s)) {
            return Err(Error::UnknownSymbol(format!("{s:?}")));
        }
        let mut cur = self.initial_set();
        for s in w {
            cur = self.step(&cur, s);
            if cur.is_empty() {
                return Ok(false);
            }
        }
        Ok(self.accepts_set(&cur))
    }

    pub fn accepts_epsilon(&self) -> bool {
        self.initial.iter().any(|p| self.finals.contains(p))
    }

    pub fn reachable(&self) -> BitSet {
        let mut seen = self.initial_set();
        let mut q: VecDeque<usize> = self.initial.iter().copied().collect();
        while let Some(p) = q.pop_front() {
            for (_, r) in &self.out[p] {
                if seen.insert(*r) {
                    q.push_back(*r);
                }
            }
        }
        seen
    }

    pub fn coreachable(&self) -> BitSet {
        let n = self.num_states();
        let mut back = vec![Vec::new(); n];
        for (p, _, q) in self.transitions() {
            back[q].push(p);
        }
        let mut seen: BitSet = self.finals.iter().copied().collect();
        let mut q: VecDeque<usize> = self.finals.iter().copied().collect();
        while let Some(p) = q.pop_front() {
            for &r in &back[p] {
                if seen.insert(r) {
                    q.push_back(r);
                }
            }
        }
        seen
    }

    pub fn is_empty(&self) -> bool {
        !self.reachable().iter().any(|p| self.finals.contains(&p))
    }

    /// Keeps only states that are both reachable and co-reachable.
    pub fn trim(&self) -> Nfa<S> {
        let r = self.reachable();
        let c = self.coreachable();
        let keep: Vec<usize> = (0..self.num_states()).filter(|&p| r.contains(p) && c.contains(p)).collect();
        let mut idx = vec![usize::MAX; self.num_states()];
        for (i, &p) in keep.iter().enumerate() {
            idx[p] = i;
        }
        let mut m = Nfa::new(keep.len());
        m.alphabet = self.alphabet.clone();
        for &p in &keep {
            if self.initial.contains(&p) {
                m.set_initial(idx[p]);
            }
            if self.finals.contains(&p) {
                m.set_final(idx[p]);
            }
            for (s, q) in &self.out[p] {
                if idx[*q] != usize::MAX {
                    m.add_transition(idx[p], s.clone(), idx[*q]);
                }
            }
        }
        m
    }

    /// Applies `f` to every symbol; symbols mapped to `None` lose their transitions.
    pub fn map_symbols<T: Ord + Clone + Debug>(&self, f: impl Fn(&S) -> Option<T>) -> Nfa<T> {
        let mut m = Nfa::new(self.num_states());
        m.initial = self.initial.clone();
        m.finals = self.finals.clone();
        for s in &self.alphabet {
            if let Some(t) = f(s) {
                m.alphabet.insert(t);
            }
        }
        for (p, s, q) in self.transitions() {
            if let Some(t) = f(s) {
                m.add_transition(p, t, q);
            }
        }
        m
    }

    /// Replaces every transition on `s` by transitions on each of `g(s)`.
    pub fn expand_symbols<T: Ord + Clone + Debug>(&self, g: impl Fn(&S) -> Vec<T>) -> Nfa<T> {
        let mut m = Nfa::new(self.num_states());
        m.initial = self.initial.clone();
        m.finals = self.finals.clone();
        for (p, s, q) in self.transitions() {
            for t in g(s) {
                m.add_transition(p, t, q);
            }
        }
        m
    }

    /// Product automaton accepting the intersection.
    pub fn intersect(&self, o: &Nfa<S>) -> Nfa<S> {
        let n2 = o.num_states();
        let mut m = Nfa::new(self.num_states() * n2);
        m.alphabet = self.alphabet.intersection(&o.alphabet).cloned().collect();
        for &a in &self.initial {
            for &b in &o.initial {
                m.set_initial(a * n2 + b);
            }
        }
        for &a in &self.finals {
            for &b in &o.finals {
                m.set_final(a * n2 + b);
            }
        }
        for (p1, s, q1) in self.transitions() {
            for (p2, s2, q2) in o.transitions() {
                if s2 == s {
                    m.add_transition(p1 * n2 + p2, s.clone(), q1 * n2 + q2);
                }
            }
        }
        m
    }

    /// Disjoint union accepting L(self) ∪ L(o).
    pub fn union(&self, o: &Nfa<S>) -> Nfa<S> {
        let off = self.num_states();
        let mut m = self.clone();
        for _ in 0..o.num_states() {
            m.add_state();
        }
        for s in &o.alphabet {
            m.alphabet.insert(s.clone());
        }
        for &p in &o.initial {
            m.set_initial(p + off);
        }
        for &p in &o.finals {
            m.set_final(p + off);
        }
        for (p, s, q) in o.transitions() {
            m.add_transition(p + off, s.clone(), q + off);
        }
        m
    }

    /// A shortest accepted word, if any.
    pub fn shortest_word(&self) -> Option<Vec<S>> {
        let n = self.num_states();
        let mut prev: Vec<Option<(usize, S)>> = vec![None; n];
        let mut seen = BitSet::new(n);
        let mut q = VecDeque::new();
        for &p in &self.initial {
            seen.insert(p);
            q.push_back(p);
        }
        while let Some(p) = q.pop_front() {
            if self.finals.contains(&p) {
                let mut w = Vec::new();
                let mut cur = p;
                while let Some((from, s)) = prev[cur].clone() {
                    w.push(s);
                    cur = from;
                }
                w.reverse();
                return Some(w);
            }
            for (s, r) in &self.out[p] {
                if seen.insert(*r) {
                    prev[*r] = Some((p, s.clone()));
                    q.push_back(*r);
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn astar_b() -> Nfa<char> {
        let mut m = Nfa::new(2);
        m.set_initial(0);
        m.set_final(1);
        m.add_transition(0, 'a', 0);
        m.add_transition(0, 'b', 1);
        m
    }

    #[test]
    fn membership() {
        let m = astar_b();
        assert!(m.member(&['a', 'a', 'b']).unwrap());
        assert!(!m.member(&[]).unwrap());
        assert!(!m.member(&['b', 'a']).unwrap());
        assert!(matches!(m.member(&['c']), Err(Error::UnknownSymbol(_))));
    }

    #[test]
    fn emptiness() {
        let mut m: Nfa<char> = Nfa::new(2);
        m.set_initial(0);
        m.add_transition(0, 'a', 1);
        assert!(m.is_empty());
        assert!(!astar_b().is_empty());
        assert_eq!(astar_b().shortest_word(), Some(vec!['b']));
    }

    #[test]
    fn products() {
        let m = astar_b();
        let e = Nfa::epsilon();
        let u = m.union(&e);
        assert!(u.member(&[]).unwrap());
        assert!(u.member(&['b']).unwrap());
        let i = m.intersect(&Nfa::universal(['a', 'b']));
        assert!(i.member(&['a', 'b']).unwrap());
        assert!(!i.member(&['a']).unwrap());
        assert_eq!(m.trim().num_states(), 2);
    }
}

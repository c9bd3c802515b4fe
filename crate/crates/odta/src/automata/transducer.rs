use std::collections::BTreeMap;
use std::ops::ControlFlow;

use super::tree_automaton::TreeAutomaton;
use crate::data::{Alphabet, DataTree, Shape};
use crate::error::{Error, Result};

pub const DEFAULT_OUTPUT_BUDGET: usize = 10_000;

/// Letter-to-letter tree transducer: a tree automaton plus an output
/// relation μ ⊆ Q × Σ × Γ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeTransducer {
    base: TreeAutomaton,
    output: Alphabet,
    mu: BTreeMap<(usize, usize), Vec<usize>>,
}

/// Result of enumerating transducer outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outputs<V> {
    pub trees: Vec<DataTree<V>>,
    /// False when the budget stopped the enumeration early.
    pub complete: bool,
}

impl TreeTransducer {
    pub fn new(base: TreeAutomaton, output: Alphabet) -> Self {
        TreeTransducer { base, output, mu: BTreeMap::new() }
    }

    /// Outputs the input label unchanged.
    pub fn identity(base: TreeAutomaton) -> Self {
        let out = base.alphabet().clone();
        let mut t = TreeTransducer::new(base, out);
        for q in 0..t.base.num_states() {
            for a in 0..t.output.len() {
                t.add_output(q, a, a);
            }
        }
        t
    }

    pub fn add_output(&mut self, q: usize, a: usize, b: usize) {
        assert!(q < self.base.num_states() && a < self.base.alphabet().len() && b < self.output.len());
        let v = self.mu.entry((q, a)).or_default();
        if let Err(i) = v.binary_search(&b) {
            v.insert(i, b);
        }
    }

    pub fn base(&self) -> &TreeAutomaton {
        &self.base
    }

    pub fn base_mut(&mut self) -> &mut TreeAutomaton {
        &mut self.base
    }

    pub fn input(&self) -> &Alphabet {
        self.base.alphabet()
    }

    pub fn output(&self) -> &Alphabet {
        &self.output
    }

    pub fn outputs(&self, q: usize, a: usize) -> &[usize] {
        self.mu.get(&(q, a)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn relation(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.mu.iter().flat_map(|(&(q, a), bs)| bs.iter().map(move |&b| (q, a, b)))
    }

    pub fn emits(&self, q: usize, a: usize, b: usize) -> bool {
        self.outputs(q, a).binary_search(&b).is_ok()
    }

    /// Possible base states per node when node u is constrained by `fixed[u]`
    /// (an output symbol) or, if unconstrained, only needs some output.
    pub fn feasible_states(&self, shape: &Shape, labels: &[usize], fixed: &[Option<usize>]) -> Vec<super::BitSet> {
        self.base.possible_states(shape, labels, &|u, q| match fixed[u] {
            Some(b) => self.emits(q, labels[u], b),
            None => !self.outputs(q, labels[u]).is_empty(),
        })
    }

    pub fn feasible(&self, shape: &Shape, labels: &[usize], fixed: &[Option<usize>]) -> bool {
        let poss = self.feasible_states(shape, labels, fixed);
        let ok = poss[0].iter().any(|q| self.base.is_final(q));
        ok
    }

    /// Accepting run witnessing `out` as an output, if any.
    pub fn run_for_output(&self, shape: &Shape, labels: &[usize], out: &[usize]) -> Option<Vec<usize>> {
        let fixed: Vec<Option<usize>> = out.iter().map(|&b| Some(b)).collect();
        let poss = self.feasible_states(shape, labels, &fixed);
        self.base.extract_run(shape, labels, &poss)
    }

    /// Depth-first enumeration of output labelings in preorder, smallest
    /// output symbol first. `f` may stop the enumeration. Returns false if
    /// `budget` outputs were produced before the search space was exhausted.
    pub fn for_each_output(
        &self,
        shape: &Shape,
        labels: &[usize],
        budget: usize,
        f: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) -> bool {
        let n = shape.len();
        let mut fixed: Vec<Option<usize>> = vec![None; n];
        if !self.feasible(shape, labels, &fixed) {
            return true;
        }
        let candidates: Vec<Vec<usize>> = (0..n)
            .map(|u| {
                let mut c: Vec<usize> =
                    (0..self.base.num_states()).flat_map(|q| self.outputs(q, labels[u]).iter().copied()).collect();
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        let mut produced = 0usize;
        let mut stopped = false;
        self.dfs(shape, labels, &candidates, 0, &mut fixed, &mut produced, budget, &mut stopped, f);
        !(stopped && produced >= budget)
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        shape: &Shape,
        labels: &[usize],
        cands: &[Vec<usize>],
        u: usize,
        fixed: &mut Vec<Option<usize>>,
        produced: &mut usize,
        budget: usize,
        stopped: &mut bool,
        f: &mut dyn FnMut(&[usize]) -> ControlFlow<()>,
    ) {
        if *stopped {
            return;
        }
        if u == shape.len() {
            if *produced >= budget {
                *stopped = true;
                return;
            }
            *produced += 1;
            let out: Vec<usize> = fixed.iter().map(|b| b.expect("all fixed")).collect();
            if f(&out).is_break() {
                *stopped = true;
                // a caller-requested stop is not a budget overrun
                *produced = 0;
            }
            return;
        }
        for &b in &cands[u] {
            fixed[u] = Some(b);
            if self.feasible(shape, labels, fixed) {
                self.dfs(shape, labels, cands, u + 1, fixed, produced, budget, stopped, f);
                if *stopped {
                    fixed[u] = None;
                    return;
                }
            }
        }
        fixed[u] = None;
    }

    /// All outputs on `t`, up to `budget` of them.
    pub fn apply<V: Clone>(&self, t: &DataTree<V>, budget: usize) -> Result<Outputs<V>> {
        let labels = self.base.translate_labels(t)?;
        let mut trees = Vec::new();
        let complete = self.for_each_output(t.shape(), &labels, budget, &mut |out| {
            trees.push(out.to_vec());
            ControlFlow::Continue(())
        });
        let trees = trees
            .into_iter()
            .map(|l| t.relabel(self.output.clone(), l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Outputs { trees, complete })
    }

    /// Union by disjoint states; both transducers need the same input and output alphabets.
    pub fn union(&self, o: &TreeTransducer) -> Result<TreeTransducer> {
        self.check_alphabets(o)?;
        let base = self.base.union(&o.base)?;
        let off = self.base.num_states();
        let mut t = TreeTransducer::new(base, self.output.clone());
        for (q, a, b) in self.relation() {
            t.add_output(q, a, b);
        }
        for (q, a, b) in o.relation() {
            t.add_output(q + off, a, b);
        }
        Ok(t)
    }

    /// Pair construction: both components must accept and agree on outputs.
    pub fn intersect(&self, o: &TreeTransducer) -> Result<TreeTransducer> {
        self.check_alphabets(o)?;
        let base = self.base.intersect(&o.base)?;
        let n2 = o.base.num_states();
        let mut t = TreeTransducer::new(base, self.output.clone());
        for (q1, a, b) in self.relation() {
            for q2 in 0..n2 {
                if o.emits(q2, a, b) {
                    t.add_output(q1 * n2 + q2, a, b);
                }
            }
        }
        Ok(t)
    }

    fn check_alphabets(&self, o: &TreeTransducer) -> Result<()> {
        if self.input() != o.input() || self.output != o.output {
            return Err(Error::AlphabetMismatch("transducers differ in input or output alphabet".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Nfa;
    use crate::data::Nested;

    #[test]
    fn identity_has_one_output() {
        let al = Alphabet::new(["a", "b"]).unwrap();
        let tr = TreeTransducer::identity(TreeAutomaton::universal(al));
        let t = DataTree::from_nested(&Nested::new("a", 1u64, vec![Nested::leaf("b", 2)]), None).unwrap();
        let out = tr.apply(&t, 100).unwrap();
        assert!(out.complete);
        assert_eq!(out.trees.len(), 1);
        assert_eq!(out.trees[0].labels(), t.labels());
    }

    #[test]
    fn two_choices_per_node() {
        let al = Alphabet::new(["a"]).unwrap();
        let g = Alphabet::new(["x", "y"]).unwrap();
        let mut tr = TreeTransducer::new(TreeAutomaton::universal(al), g);
        tr.add_output(0, 0, 0);
        tr.add_output(0, 0, 1);
        let t = DataTree::from_nested(&Nested::new("a", 1u64, vec![Nested::leaf("a", 2)]), None).unwrap();
        let out = tr.apply(&t, 100).unwrap();
        assert_eq!(out.trees.len(), 4);
        let limited = tr.apply(&t, 3).unwrap();
        assert_eq!(limited.trees.len(), 3);
        assert!(!limited.complete);
        let exact = tr.apply(&t, 4).unwrap();
        assert!(exact.complete);
    }

    #[test]
    fn rejecting_base_gives_nothing() {
        let al = Alphabet::new(["a"]).unwrap();
        let mut base = TreeAutomaton::with_states(1, al);
        base.set_horizontal(0, 0, Nfa::epsilon());
        base.add_final(0);
        let tr = TreeTransducer::identity(base);
        let t = DataTree::from_nested(&Nested::new("a", 1u64, vec![Nested::leaf("a", 2)]), None).unwrap();
        let out = tr.apply(&t, 100).unwrap();
        assert!(out.trees.is_empty() && out.complete);
    }
}

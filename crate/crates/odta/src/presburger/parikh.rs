use std::collections::{BTreeMap, VecDeque};
use std::fmt::Debug;

use super::formula::{Assignment, Formula, PresburgerFormula};
use super::key::Key;
use super::solver::{solve, Budget, Verdict};
use crate::automata::{Nfa, PeriodicLanguageUnion, TreeAutomaton};
use crate::data::Shape;
use crate::error::{Error, Result};

/// A production N → N₁⋯N_k whose use increments each tag once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    pub lhs: usize,
    pub rhs: Vec<usize>,
    pub tags: Vec<Key>,
}

/// Context-free grammar without terminals; the Parikh image of interest
/// is the tag count of derivations from `start`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    pub nonterminals: usize,
    pub start: usize,
    pub productions: Vec<Production>,
}

/// Derivation tree: node 0 is the start occurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub production: Vec<usize>,
    pub children: Vec<Vec<usize>>,
}

impl Grammar {
    /// Indices of productions usable in some finite derivation from start.
    pub fn useful(&self) -> Vec<bool> {
        let mut productive = vec![false; self.nonterminals];
        loop {
            let mut changed = false;
            for p in &self.productions {
                if !productive[p.lhs] && p.rhs.iter().all(|&n| productive[n]) {
                    productive[p.lhs] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let ok: Vec<bool> =
            self.productions.iter().map(|p| productive[p.lhs] && p.rhs.iter().all(|&n| productive[n])).collect();
        let mut reach = vec![false; self.nonterminals];
        reach[self.start] = true;
        let mut queue = VecDeque::from([self.start]);
        while let Some(n) = queue.pop_front() {
            for (i, p) in self.productions.iter().enumerate() {
                if ok[i] && p.lhs == n {
                    for &m in &p.rhs {
                        if !reach[m] {
                            reach[m] = true;
                            queue.push_back(m);
                        }
                    }
                }
            }
        }
        self.productions.iter().zip(ok).map(|(p, o)| o && reach[p.lhs]).collect()
    }

    fn y_key(ns: &str, i: usize) -> Key {
        Key::aux(format!("{ns}.y{i}"))
    }

    fn d_key(ns: &str, n: usize) -> Key {
        Key::aux(format!("{ns}.d{n}"))
    }

    /// Adds the flow encoding to `f`: every key in `count_keys` (and every
    /// tag) equals the number of tagged production uses, productions are
    /// balanced, and every used nonterminal has a strictly shallower user.
    pub fn encode(&self, ns: &str, count_keys: &[Key], f: &mut PresburgerFormula) {
        let useful = self.useful();
        let y: Vec<Option<usize>> = (0..self.productions.len())
            .map(|i| useful[i].then(|| f.exists(Self::y_key(ns, i))))
            .collect();
        let mut tagged: BTreeMap<Key, Vec<usize>> = count_keys.iter().map(|k| (k.clone(), Vec::new())).collect();
        for (i, p) in self.productions.iter().enumerate() {
            for t in &p.tags {
                let e = tagged.entry(t.clone()).or_default();
                if let Some(v) = y[i] {
                    e.push(v);
                }
            }
        }
        for (k, ys) in tagged {
            let x = f.var(k);
            f.add(Formula::eq(std::iter::once((x, 1)).chain(ys.into_iter().map(|v| (v, -1))), 0));
        }
        let nt = self.nonterminals;
        let d: Vec<usize> = (0..nt).map(|n| f.exists(Self::d_key(ns, n))).collect();
        for n in 0..nt {
            let mut terms = Vec::new();
            for (i, p) in self.productions.iter().enumerate() {
                let Some(v) = y[i] else { continue };
                let c = i64::from(p.lhs == n) - p.rhs.iter().filter(|&&m| m == n).count() as i64;
                terms.push((v, c));
            }
            f.add(Formula::eq(terms, i64::from(n == self.start)));
            f.add(Formula::le([(d[n], 1)], nt as i64));
            if n == self.start {
                continue;
            }
            let used: Vec<(usize, i64)> = self
                .productions
                .iter()
                .enumerate()
                .filter_map(|(i, p)| (p.lhs == n).then_some(y[i]).flatten().map(|v| (v, 1)))
                .collect();
            if used.is_empty() {
                continue;
            }
            let mut alts: Vec<Formula> = Vec::new();
            for (i, p) in self.productions.iter().enumerate() {
                let Some(v) = y[i] else { continue };
                if p.lhs != n && p.rhs.contains(&n) {
                    alts.push(Formula::And(vec![
                        Formula::ge([(v, 1)], 1),
                        Formula::ge([(d[n], 1), (d[p.lhs], -1)], 1),
                    ]));
                }
            }
            alts.push(Formula::eq(used, 0));
            f.add(Formula::Or(alts));
        }
    }

    /// Production counts of an encoded solution.
    pub fn counts(&self, ns: &str, f: &PresburgerFormula, a: &Assignment) -> Vec<u64> {
        (0..self.productions.len())
            .map(|i| f.lookup(&Self::y_key(ns, i)).map(|_| a.get(&Self::y_key(ns, i)).copied().unwrap_or(0)).unwrap_or(0))
            .collect()
    }

    fn connected(&self, remaining: &[u64], open: &[u64]) -> bool {
        let mut reach: Vec<bool> = open.iter().map(|&c| c > 0).collect();
        let mut queue: VecDeque<usize> = (0..self.nonterminals).filter(|&n| reach[n]).collect();
        while let Some(n) = queue.pop_front() {
            for (i, p) in self.productions.iter().enumerate() {
                if remaining[i] > 0 && p.lhs == n {
                    for &m in &p.rhs {
                        if !reach[m] {
                            reach[m] = true;
                            queue.push_back(m);
                        }
                    }
                }
            }
        }
        self.productions.iter().enumerate().all(|(i, p)| remaining[i] == 0 || reach[p.lhs])
    }

    /// Builds a derivation using every production exactly `counts[i]` times,
    /// expanding leftmost open occurrences first.
    pub fn derive(&self, counts: &[u64]) -> Result<Derivation> {
        let fail = |m: &str| Error::DecodeFailed(m.to_string());
        let mut remaining = counts.to_vec();
        let mut open = vec![0u64; self.nonterminals];
        open[self.start] = 1;
        let mut nt = vec![self.start];
        let mut production = vec![usize::MAX];
        let mut children: Vec<Vec<usize>> = vec![Vec::new()];
        let mut stack = vec![0usize];
        if !self.connected(&remaining, &open) {
            return Err(fail("production counts are not connected to the start symbol"));
        }
        while let Some(o) = stack.pop() {
            let k = nt[o];
            let mut chosen = None;
            for (i, p) in self.productions.iter().enumerate() {
                if p.lhs != k || remaining[i] == 0 {
                    continue;
                }
                remaining[i] -= 1;
                open[k] -= 1;
                for &m in &p.rhs {
                    open[m] += 1;
                }
                if self.connected(&remaining, &open) {
                    chosen = Some(i);
                    break;
                }
                remaining[i] += 1;
                open[k] += 1;
                for &m in &p.rhs {
                    open[m] -= 1;
                }
            }
            let i = chosen.ok_or_else(|| fail("no production keeps the remainder derivable"))?;
            production[o] = i;
            let mut kids = Vec::new();
            for &m in &self.productions[i].rhs {
                kids.push(nt.len());
                nt.push(m);
                production.push(usize::MAX);
                children.push(Vec::new());
            }
            stack.extend(kids.iter().rev());
            children[o] = kids;
        }
        if remaining.iter().any(|&r| r > 0) {
            return Err(fail("unused productions remain"));
        }
        Ok(Derivation { production, children })
    }
}

fn solve_counts(g: &Grammar, ns: &str, f: &PresburgerFormula, v: &Assignment) -> Result<Vec<u64>> {
    let complete = g.useful().iter().enumerate().all(|(i, &u)| !u || v.contains_key(&Grammar::y_key(ns, i)));
    if complete && f.eval_assignment(v) {
        return Ok(g.counts(ns, f, v));
    }
    let mut pinned = f.clone();
    let free: Assignment = f.free_keys().into_iter().map(|k| (k.clone(), v.get(k).copied().unwrap_or(0))).collect();
    pinned.pin(&free);
    match solve(&pinned, Budget::default())?.verdict {
        Verdict::Sat(a) => Ok(g.counts(ns, f, &a)),
        Verdict::Unsat => Err(Error::DecodeFailed("assignment is not a solution".into())),
        Verdict::Unknown => Err(Error::DecodeFailed("solver budget exhausted while completing the assignment".into())),
    }
}

/// Parikh encoding of a word automaton.
#[derive(Debug, Clone)]
pub struct NfaEncoding<S: Ord + Clone> {
    pub grammar: Grammar,
    pub formula: PresburgerFormula,
    pub ns: String,
    symbol: Vec<Option<S>>,
}

impl<S: Ord + Clone + Debug> NfaEncoding<S> {
    pub fn new(m: &Nfa<S>, key: &dyn Fn(&S) -> Key, ns: &str) -> Self {
        let n = m.num_states();
        let start = n;
        let mut productions = Vec::new();
        let mut symbol = Vec::new();
        for &p in m.initial() {
            productions.push(Production { lhs: start, rhs: vec![p], tags: vec![] });
            symbol.push(None);
        }
        for (p, s, q) in m.transitions() {
            productions.push(Production { lhs: p, rhs: vec![q], tags: vec![key(s)] });
            symbol.push(Some(s.clone()));
        }
        for &q in m.finals() {
            productions.push(Production { lhs: q, rhs: vec![], tags: vec![] });
            symbol.push(None);
        }
        let grammar = Grammar { nonterminals: n + 1, start, productions };
        let mut formula = PresburgerFormula::new();
        let keys: Vec<Key> = m.alphabet().iter().map(key).collect();
        grammar.encode(ns, &keys, &mut formula);
        NfaEncoding { grammar, formula, ns: ns.to_string(), symbol }
    }

    /// A word of L(m) with the counts of `v`.
    pub fn decode(&self, v: &Assignment) -> Result<Vec<S>> {
        let counts = solve_counts(&self.grammar, &self.ns, &self.formula, v)?;
        let d = self.grammar.derive(&counts)?;
        let mut w = Vec::new();
        let mut o = 0;
        loop {
            if let Some(s) = &self.symbol[d.production[o]] {
                w.push(s.clone());
            }
            match d.children[o].first() {
                Some(&c) => o = c,
                None => break,
            }
        }
        Ok(w)
    }
}

/// Symbol-count key of a word automaton over string names.
pub fn symbol_key<S: ToString>(s: &S) -> Key {
    Key::symbol(s.to_string())
}

pub fn parikh_formula_nfa<S: Ord + Clone + Debug>(m: &Nfa<S>, key: &dyn Fn(&S) -> Key) -> PresburgerFormula {
    NfaEncoding::new(m, key, "w").formula
}

pub fn decode_word<S: Ord + Clone + Debug>(m: &Nfa<S>, key: &dyn Fn(&S) -> Key, v: &Assignment) -> Result<Vec<S>> {
    NfaEncoding::new(m, key, "w").decode(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TreeProd {
    Root,
    Node { q: usize, a: usize, variant: usize },
    Child,
    End,
}

/// A labeled tree with an accepting run, as decoded from a solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedTree {
    pub shape: Shape,
    pub labels: Vec<usize>,
    pub run: Vec<usize>,
    /// Index of the node variant chosen at each node.
    pub variant: Vec<usize>,
}

/// Parikh encoding of an unranked tree automaton. Each (state, label) pair
/// may come in several variants, each with its own count tags.
#[derive(Debug, Clone)]
pub struct TreeEncoding {
    pub grammar: Grammar,
    pub formula: PresburgerFormula,
    pub ns: String,
    kind: Vec<TreeProd>,
}

/// x_a for the label and n_(q,a) for the pair.
pub fn default_node_tags(a: &TreeAutomaton, q: usize, l: usize) -> Vec<Vec<Key>> {
    vec![vec![Key::symbol(a.alphabet().name(l)), state_label_key(a, q, l)]]
}

pub fn state_label_key(a: &TreeAutomaton, q: usize, l: usize) -> Key {
    Key::state_label(format!("{},{}", a.state_names()[q], a.alphabet().name(l)))
}

impl TreeEncoding {
    pub fn new(a: &TreeAutomaton, variants: &dyn Fn(usize, usize) -> Vec<Vec<Key>>, count_keys: &[Key], ns: &str) -> Self {
        let nq = a.num_states();
        let start = nq;
        let mut next = nq + 1;
        let mut productions = Vec::new();
        let mut kind = Vec::new();
        for &q in a.finals() {
            productions.push(Production { lhs: start, rhs: vec![q], tags: vec![] });
            kind.push(TreeProd::Root);
        }
        for (&(q, l), m) in a.horizontals() {
            let base = next;
            next += m.num_states();
            for (vi, tags) in variants(q, l).into_iter().enumerate() {
                for &s in m.initial() {
                    productions.push(Production { lhs: q, rhs: vec![base + s], tags: tags.clone() });
                    kind.push(TreeProd::Node { q, a: l, variant: vi });
                }
            }
            for (s, &p, s2) in m.transitions() {
                if p < nq {
                    productions.push(Production { lhs: base + s, rhs: vec![p, base + s2], tags: vec![] });
                    kind.push(TreeProd::Child);
                }
            }
            for &s in m.finals() {
                productions.push(Production { lhs: base + s, rhs: vec![], tags: vec![] });
                kind.push(TreeProd::End);
            }
        }
        let grammar = Grammar { nonterminals: next, start, productions };
        let mut formula = PresburgerFormula::new();
        grammar.encode(ns, count_keys, &mut formula);
        TreeEncoding { grammar, formula, ns: ns.to_string(), kind }
    }

    /// Label and state-label counts for every symbol and state.
    pub fn standard(a: &TreeAutomaton, ns: &str) -> Self {
        let mut keys: Vec<Key> = a.alphabet().names().iter().map(Key::symbol).collect();
        for q in 0..a.num_states() {
            for l in 0..a.alphabet().len() {
                keys.push(state_label_key(a, q, l));
            }
        }
        TreeEncoding::new(a, &|q, l| default_node_tags(a, q, l), &keys, ns)
    }

    pub fn decode(&self, v: &Assignment) -> Result<DecodedTree> {
        let counts = solve_counts(&self.grammar, &self.ns, &self.formula, v)?;
        self.decode_counts(&counts)
    }

    pub fn decode_counts(&self, counts: &[u64]) -> Result<DecodedTree> {
        let d = self.grammar.derive(counts)?;
        let (mut arity, mut labels, mut run, mut variant) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        // Derivation node 0 is Start → X_q; walk X occurrences in preorder.
        let mut stack = vec![d.children[0][0]];
        while let Some(x) = stack.pop() {
            let TreeProd::Node { q, a, variant: vi } = self.kind[d.production[x]] else {
                return Err(Error::DecodeFailed("expected a node production".into()));
            };
            let mut kids = Vec::new();
            let mut y = d.children[x][0];
            loop {
                match self.kind[d.production[y]] {
                    TreeProd::Child => {
                        kids.push(d.children[y][0]);
                        y = d.children[y][1];
                    }
                    TreeProd::End => break,
                    _ => return Err(Error::DecodeFailed("malformed child list".into())),
                }
            }
            arity.push(kids.len());
            labels.push(a);
            run.push(q);
            variant.push(vi);
            stack.extend(kids.into_iter().rev());
        }
        let shape = Shape::from_preorder_arity(&arity)?;
        Ok(DecodedTree { shape, labels, run, variant })
    }
}

pub fn parikh_formula_ta(a: &TreeAutomaton) -> PresburgerFormula {
    TreeEncoding::standard(a, "t").formula
}

pub fn decode_tree(a: &TreeAutomaton, v: &Assignment) -> Result<DecodedTree> {
    TreeEncoding::standard(a, "t").decode(v)
}

/// Solutions are ∪ over tuples of {ū + Σ h_i·v̄_i}; `keys[i]` names coordinate i.
pub fn periodic_to_formula(p: &PeriodicLanguageUnion, keys: &[Key]) -> Result<PresburgerFormula> {
    if keys.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: keys.len() });
    }
    let mut f = PresburgerFormula::new();
    let xs: Vec<usize> = keys.iter().map(|k| f.var(k.clone())).collect();
    let mut alts = Vec::new();
    for (t, tuple) in p.tuples().iter().enumerate() {
        let mut conj = Vec::new();
        for i in 0..p.dim() {
            let u = i64::try_from(tuple.base[i]).map_err(|_| Error::Overflow("periodic base"))?;
            let per = i64::try_from(tuple.periods[i]).map_err(|_| Error::Overflow("periodic period"))?;
            let h = f.exists(Key::aux(format!("p.h{t}.{i}")));
            conj.push(Formula::eq([(xs[i], 1), (h, -per)], u));
        }
        alts.push(Formula::And(conj));
    }
    f.add(Formula::Or(alts));
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Alphabet;

    fn astar_b() -> Nfa<String> {
        let mut m = Nfa::new(2);
        m.set_initial(0);
        m.set_final(1);
        m.add_transition(0, "a".to_string(), 0);
        m.add_transition(0, "b".to_string(), 1);
        m
    }

    fn sat(f: &PresburgerFormula, pins: &[(&str, u64)]) -> Option<Assignment> {
        let mut g = f.clone();
        g.pin(&pins.iter().map(|&(k, v)| (Key::symbol(k), v)).collect());
        match solve(&g, Budget::default()).unwrap().verdict {
            Verdict::Sat(a) => Some(a),
            Verdict::Unsat => None,
            Verdict::Unknown => panic!("budget"),
        }
    }

    #[test]
    fn astar_b_image() {
        let m = astar_b();
        let f = parikh_formula_nfa(&m, &symbol_key);
        for xa in 0..=5 {
            for xb in 0..=3 {
                assert_eq!(sat(&f, &[("a", xa), ("b", xb)]).is_some(), xb == 1, "{xa} {xb}");
            }
        }
        let a = sat(&f, &[("a", 2), ("b", 1)]).unwrap();
        assert_eq!(decode_word(&m, &symbol_key, &a).unwrap(), vec!["a", "a", "b"]);
    }

    #[test]
    fn decode_from_projection() {
        let m = astar_b();
        let v: Assignment = [(Key::symbol("a"), 3), (Key::symbol("b"), 1)].into();
        assert_eq!(decode_word(&m, &symbol_key, &v).unwrap().len(), 4);
    }

    #[test]
    fn epsilon_and_no_final() {
        let e: Nfa<String> = Nfa::epsilon();
        let f = parikh_formula_nfa(&e, &symbol_key);
        let Verdict::Sat(a) = solve(&f, Budget::default()).unwrap().verdict else { panic!() };
        assert!(decode_word(&e, &symbol_key, &a).unwrap().is_empty());
        let mut m = astar_b();
        m = {
            let mut n = Nfa::new(2);
            n.set_initial(0);
            for (p, s, q) in m.transitions() {
                n.add_transition(p, s.clone(), q);
            }
            n
        };
        let f = parikh_formula_nfa(&m, &symbol_key);
        assert_eq!(solve(&f, Budget::default()).unwrap().verdict, Verdict::Unsat);
    }

    #[test]
    fn disconnected_cycle_rejected() {
        // 0 -a-> 1 final, and an unreachable-from-use loop 2 -b-> 2.
        let mut m = Nfa::new(3);
        m.set_initial(0);
        m.set_final(1);
        m.add_transition(0, "a".to_string(), 1);
        m.add_transition(2, "b".to_string(), 2);
        m.add_transition(1, "c".to_string(), 2);
        let f = parikh_formula_nfa(&m, &symbol_key);
        assert!(sat(&f, &[("a", 1), ("b", 2), ("c", 0)]).is_none());
        assert!(sat(&f, &[("a", 1), ("b", 0), ("c", 0)]).is_some());
    }

    #[test]
    fn single_node_tree() {
        let al = Alphabet::new(["a", "b"]).unwrap();
        let mut t = TreeAutomaton::with_states(1, al);
        t.set_horizontal(0, 0, Nfa::epsilon());
        t.add_final(0);
        let f = parikh_formula_ta(&t);
        let Verdict::Sat(a) = solve(&f, Budget::default()).unwrap().verdict else { panic!() };
        assert_eq!(a[&Key::symbol("a")], 1);
        assert_eq!(a[&Key::symbol("b")], 0);
        let d = decode_tree(&t, &a).unwrap();
        assert_eq!(d.shape.len(), 1);
    }

    #[test]
    fn periodic_formula() {
        let mut p = PeriodicLanguageUnion::new(2);
        p.add(vec![1, 0], vec![vec![2, 0], vec![0, 3]]).unwrap();
        let keys = [Key::symbol("u"), Key::symbol("v")];
        let f = periodic_to_formula(&p, &keys).unwrap();
        for (u, v) in [(5, 3), (1, 0), (2, 3), (5, 4)] {
            let mut g = f.clone();
            g.pin(&[(keys[0].clone(), u), (keys[1].clone(), v)].into());
            let s = solve(&g, Budget::default()).unwrap().verdict.is_sat();
            assert_eq!(s, p.contains(&[u, v]).unwrap());
        }
    }
}

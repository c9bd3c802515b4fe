//! DTDs with key and inclusion constraints.
//!
//! ```text
//! root: r
//! r -> a b*
//! a -> (b | c)?
//! ```
//!
//! Symbols without a rule only occur as leaves; `symbols:` declares them
//! and fixes the order of Σ. The root defaults to the left-hand side of the
//! first rule.

use std::collections::BTreeSet;

use super::regex::{parse_regex, Regex};
use super::terms::{Constraint, IntegrityConstraint};
use crate::automata::{Nfa, TreeAutomaton, TreeTransducer};
use crate::data::{Alphabet, DataTree, LabelSet, OrderedDataTree};
use crate::error::{Error, Result};
use crate::odta::{empty_weak, EmptinessCaps, EmptinessVerdict, WeakOdta};
use crate::presburger::Stats;

/// Largest Σ for which the 2^Σ value alphabet is materialized.
pub const MAX_DTD_SIGMA: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dtd {
    alphabet: Alphabet,
    root: usize,
    rules: Vec<Regex>,
}

impl Dtd {
    /// `rules[a]` is the content model of a; it must only mention symbols
    /// of `alphabet`.
    pub fn new(alphabet: Alphabet, root: usize, rules: Vec<Regex>) -> Result<Self> {
        if root >= alphabet.len() || rules.len() != alphabet.len() {
            return Err(Error::Invalid("DTD needs a root in Σ and one rule per symbol".into()));
        }
        fn syms(r: &Regex, out: &mut BTreeSet<usize>) {
            match r {
                Regex::Epsilon => {}
                Regex::Sym(a) => {
                    out.insert(*a);
                }
                Regex::Cat(v) | Regex::Alt(v) => v.iter().for_each(|x| syms(x, out)),
                Regex::Star(x) | Regex::Plus(x) | Regex::Opt(x) => syms(x, out),
            }
        }
        let mut used = BTreeSet::new();
        rules.iter().for_each(|r| syms(r, &mut used));
        if used.iter().any(|&a| a >= alphabet.len()) {
            return Err(Error::Invalid("content model mentions an undeclared symbol".into()));
        }
        Ok(Dtd { alphabet, root, rules })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn rule(&self, a: usize) -> &Regex {
        &self.rules[a]
    }

    /// Conformance checked directly against the content models.
    pub fn conforms<V: Clone>(&self, t: &DataTree<V>) -> bool {
        let Ok(labels) = (0..t.len()).map(|u| self.alphabet.lookup(t.label_name(u))).collect::<Result<Vec<_>>>() else {
            return false;
        };
        labels[0] == self.root
            && (0..t.len()).all(|u| {
                let w: Vec<usize> = t.children(u).iter().map(|&c| labels[c]).collect();
                self.rules[labels[u]].matches(&w)
            })
    }

    /// The tree automaton with one state per symbol: state a reads a-nodes
    /// whose children word fits a's content model.
    pub fn to_tree_automaton(&self) -> TreeAutomaton {
        let mut ta = TreeAutomaton::new(self.alphabet.names().to_vec(), self.alphabet.clone());
        ta.add_final(self.root);
        for (a, r) in self.rules.iter().enumerate() {
            ta.set_horizontal(a, a, r.to_nfa());
        }
        ta
    }

    pub fn render(&self) -> String {
        let mut s = format!("symbols: {}\nroot: {}\n", self.alphabet.names().join(" "), self.alphabet.name(self.root));
        let names = |i: usize| self.alphabet.name(i).to_string();
        for (a, r) in self.rules.iter().enumerate() {
            if *r != Regex::Epsilon {
                s.push_str(&format!("{} -> {}\n", self.alphabet.name(a), r.render(&names)));
            }
        }
        s
    }
}

fn ident_ok(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':'))
}

fn intern(n: &str, names: &mut Vec<String>) -> usize {
    names.iter().position(|x| x == n).unwrap_or_else(|| {
        names.push(n.to_string());
        names.len() - 1
    })
}

/// Parses `symbols:`, `root:` and `symbol -> expression` lines; `#` starts
/// a comment. Σ is every symbol mentioned, in order of first mention.
pub fn parse_dtd(text: &str) -> Result<Dtd> {
    let mut names: Vec<String> = Vec::new();
    let mut rules: Vec<(usize, Regex)> = Vec::new();
    let mut root: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let sym = |s: &str, names: &mut Vec<String>| -> Result<usize> {
            if ident_ok(s) {
                Ok(intern(s, names))
            } else {
                Err(Error::parse(n, format!("bad symbol `{s}`")))
            }
        };
        if let Some(r) = l.strip_prefix("root:") {
            if root.is_some() {
                return Err(Error::parse(n, "duplicate root line"));
            }
            root = Some(sym(r.trim(), &mut names)?);
        } else if let Some(r) = l.strip_prefix("symbols:") {
            for s in r.split_whitespace() {
                sym(s, &mut names)?;
            }
        } else if let Some((lhs, rhs)) = l.split_once("->") {
            let a = sym(lhs.trim(), &mut names)?;
            if rules.iter().any(|r| r.0 == a) {
                return Err(Error::parse(n, format!("second rule for `{}`", lhs.trim())));
            }
            let r = parse_regex(rhs, n, &mut |s| Ok(intern(s, &mut names)))?;
            rules.push((a, r));
        } else {
            return Err(Error::parse(n, "expected `symbol -> expression`"));
        }
    }
    let root = match (root, rules.first()) {
        (Some(r), _) => r,
        (None, Some(r)) => r.0,
        (None, None) => return Err(Error::parse(0, "empty DTD")),
    };
    let alphabet = Alphabet::new(names).map_err(|e| Error::parse(0, e.to_string()))?;
    let mut table = vec![Regex::Epsilon; alphabet.len()];
    for (a, r) in rules {
        table[a] = r;
    }
    Dtd::new(alphabet, root, table)
}

fn integrity(cs: &[Constraint]) -> Result<Vec<IntegrityConstraint>> {
    cs.iter()
        .map(|c| match c {
            Constraint::Integrity(i) => Ok(*i),
            _ => Err(Error::Invalid("DTD constraints are key(a) and incl(a, b) only".into())),
        })
        .collect()
}

fn keys(cs: &[IntegrityConstraint]) -> LabelSet {
    cs.iter().fold(LabelSet::EMPTY, |g, c| match *c {
        IntegrityConstraint::Key(a) => g.with(a),
        _ => g,
    })
}

/// Whether a value carrying exactly the labels in S is compatible with
/// every inclusion constraint.
pub fn admissible(s: LabelSet, cs: &[IntegrityConstraint]) -> bool {
    cs.iter().all(|c| match *c {
        IntegrityConstraint::Inclusion(a, b) => !s.contains(a) || s.contains(b),
        _ => true,
    })
}

fn check_symbols(d: &Dtd, cs: &[IntegrityConstraint]) -> Result<()> {
    let n = d.alphabet.len();
    let ok = cs.iter().all(|c| match *c {
        IntegrityConstraint::Key(a) => a < n,
        IntegrityConstraint::Inclusion(a, b) => a < n && b < n,
    });
    if ok {
        Ok(())
    } else {
        Err(Error::Invalid("constraint mentions a symbol outside the DTD".into()))
    }
}

/// Weak ODTA accepting exactly the trees that conform to `d` and satisfy
/// every constraint.
pub fn dtd_to_weak_odta(d: &Dtd, cs: &[Constraint]) -> Result<WeakOdta> {
    let cs = integrity(cs)?;
    check_symbols(d, &cs)?;
    if d.alphabet.len() > MAX_DTD_SIGMA {
        return Err(Error::CapExceeded(format!(
            "value alphabet 2^|Σ| with |Σ| = {} > {MAX_DTD_SIGMA}; use `admissible` for a symbolic test",
            d.alphabet.len()
        )));
    }
    let tr = TreeTransducer::identity(d.to_tree_automaton());
    let p: Vec<LabelSet> = d.alphabet.nonempty_subsets().filter(|&s| admissible(s, &cs)).collect();
    let mut m = Nfa::universal(p);
    // keep every nonempty subset in the alphabet so words over 2^Σ are well-typed
    d.alphabet.nonempty_subsets().for_each(|s| m.declare_symbol(s));
    WeakOdta::new(tr, m, keys(&cs))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatVerdict {
    Sat { witness: OrderedDataTree, chain: Vec<LabelSet> },
    Unsat,
    Unknown,
}

impl SatVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            SatVerdict::Sat { .. } => "sat",
            SatVerdict::Unsat => "unsat",
            SatVerdict::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatReport {
    pub verdict: SatVerdict,
    /// Chains (H₁,…,H_k) tried.
    pub chains_tried: usize,
    pub chains_total: usize,
    pub stats: Stats,
}

/// Strongly connected components of the inclusion graph, in order of
/// their smallest symbol.
fn inclusion_components(n: usize, cs: &[IntegrityConstraint]) -> (Vec<usize>, usize) {
    let mut reach = vec![vec![false; n]; n];
    for (a, row) in reach.iter_mut().enumerate() {
        row[a] = true;
    }
    for c in cs {
        if let IntegrityConstraint::Inclusion(a, b) = *c {
            reach[a][b] = true;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut k = 0;
    for a in 0..n {
        if comp[a] == usize::MAX {
            for b in a..n {
                if reach[a][b] && reach[b][a] {
                    comp[b] = k;
                }
            }
            k += 1;
        }
    }
    (comp, k)
}

/// Every sequence (H₁,…,H_k) of nonempty disjoint sets covering Σ such that
/// V(a) ⊆ V(b) puts a no later than b. Mutually included symbols share a set.
pub fn inclusion_chains(sigma_len: usize, cs: &[IntegrityConstraint], limit: usize) -> (Vec<Vec<LabelSet>>, bool) {
    let (comp, k) = inclusion_components(sigma_len, cs);
    let mut members = vec![LabelSet::EMPTY; k];
    for (a, &c) in comp.iter().enumerate() {
        members[c] = members[c].with(a);
    }
    // pred[c]: components that must come no later than c
    let mut pred = vec![0u64; k];
    for c in cs {
        if let IntegrityConstraint::Inclusion(a, b) = *c {
            if comp[a] != comp[b] {
                pred[comp[b]] |= 1 << comp[a];
            }
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    fn go(placed: u64, full: u64, pred: &[u64], members: &[LabelSet], cur: &mut Vec<LabelSet>, out: &mut Vec<Vec<LabelSet>>, limit: usize) -> bool {
        if placed == full {
            out.push(cur.clone());
            return out.len() < limit;
        }
        let rest = full & !placed;
        let mut x = rest;
        // nonempty subsets of the remaining components, in increasing order
        let mut subs = Vec::new();
        while x != 0 {
            subs.push(x);
            x = (x - 1) & rest;
        }
        subs.reverse();
        for h in subs {
            let closed = (0..pred.len()).filter(|&c| h >> c & 1 == 1).all(|c| pred[c] & !(placed | h) == 0);
            if !closed {
                continue;
            }
            let set = (0..members.len()).filter(|&c| h >> c & 1 == 1).fold(LabelSet::EMPTY, |s, c| s.union(members[c]));
            cur.push(set);
            let more = go(placed | h, full, pred, members, cur, out, limit);
            cur.pop();
            if !more {
                return false;
            }
        }
        true
    }
    let complete = go(0, full, &pred, &members, &mut cur, &mut out, limit);
    (out, complete)
}

/// The chain automaton over S_i = Σ ∖ (H₁ ∪ ⋯ ∪ H_{i−1}): all states initial
/// and final, q_i reads S_j into q_j for i ≤ j.
pub fn chain_automaton(sigma: &Alphabet, chain: &[LabelSet]) -> Nfa<LabelSet> {
    let k = chain.len();
    let mut s = Vec::with_capacity(k);
    let mut rest = sigma.full_set();
    for h in chain {
        s.push(rest);
        rest = LabelSet(rest.0 & !h.0);
    }
    let mut m = Nfa::new(k);
    for i in 0..k {
        m.set_initial(i);
        m.set_final(i);
        for j in i..k {
            m.add_transition(i, s[j], j);
        }
    }
    m
}

/// Upper bound on the chains tried by [`dtd_sat`].
pub const DEFAULT_MAX_CHAINS: usize = 5_000;

/// Satisfiability by one small weak ODTA per inclusion-respecting chain.
pub fn dtd_sat(d: &Dtd, cs: &[Constraint], caps: &EmptinessCaps, max_chains: usize) -> Result<SatReport> {
    let ics = integrity(cs)?;
    check_symbols(d, &ics)?;
    let tr = TreeTransducer::identity(d.to_tree_automaton());
    let (chains, complete) = inclusion_chains(d.alphabet.len(), &ics, max_chains.max(1));
    let mut report = SatReport { verdict: SatVerdict::Unsat, chains_tried: 0, chains_total: chains.len(), stats: Stats::default() };
    if tr.base().is_empty() {
        return Ok(report);
    }
    let mut unknown = !complete;
    for chain in chains {
        report.chains_tried += 1;
        let s = WeakOdta::new(tr.clone(), chain_automaton(&d.alphabet, &chain), keys(&ics))?;
        let r = empty_weak(&s, caps)?;
        crate::odta::verdict::add_stats(&mut report.stats, &r.stats);
        match r.verdict {
            EmptinessVerdict::Nonempty { witness, .. } => {
                if !d.conforms(&witness) || !ics.iter().all(|c| c.holds(&witness, &d.alphabet)) {
                    return Err(Error::DecodeFailed("chain witness violates the DTD or a constraint".into()));
                }
                report.verdict = SatVerdict::Sat { witness, chain };
                return Ok(report);
            }
            EmptinessVerdict::Empty => {}
            EmptinessVerdict::EmptyWithinCaps => unknown = true,
        }
    }
    if unknown {
        report.verdict = SatVerdict::Unknown;
    }
    Ok(report)
}

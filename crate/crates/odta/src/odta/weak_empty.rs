use std::sync::Arc;

use super::member::{classes_of, count_assignment, member_weak, member_weak_ext, xi_holds, Membership};
use super::model::{class_key, label_key, ExtendedWeakOdta, WeakOdta};
use super::oracle::output_accepted;
use super::verdict::{Certificate, EmptinessCaps, EmptinessReport, EmptinessVerdict};
use crate::automata::{TreeAutomaton, TreeTransducer};
use crate::data::{Alphabet, DataTree, LabelSet, OrderedDataTree};
use crate::error::{Error, Result};
use crate::presburger::{solve, Formula, Key, NfaEncoding, PresburgerFormula, TreeEncoding, Verdict};

/// Automaton over Σ × Q × Γ accepting the extended trees of `tr`: a node
/// labelled (a, q, α) takes state q, needs α ∈ μ(q, a) and reads δ(q, a).
/// Returns the automaton and the triple behind each of its labels.
pub fn extended_automaton(tr: &TreeTransducer) -> Result<(TreeAutomaton, Vec<(usize, usize, usize)>)> {
    let base = tr.base();
    let triples: Vec<(usize, usize, usize)> = tr
        .relation()
        .filter(|&(q, a, _)| base.horizontal(q, a).is_some())
        .map(|(q, a, b)| (a, q, b))
        .collect();
    if triples.is_empty() {
        return Ok((TreeAutomaton::empty(Alphabet::new(["()"])?), Vec::new()));
    }
    let names = triples.iter().map(|&(a, q, b)| {
        format!("({},{},{})", tr.input().name(a), base.state_names()[q], tr.output().name(b))
    });
    let mut ext = TreeAutomaton::new(base.state_names().to_vec(), Alphabet::new(names)?);
    for &q in base.finals() {
        ext.add_final(q);
    }
    for (l, &(a, q, _)) in triples.iter().enumerate() {
        let m = base.horizontal(q, a).expect("filtered above");
        ext.set_horizontal(q, l, m.clone());
    }
    Ok((ext, triples))
}

/// φ conjoined with the Parikh formula of the extended-tree automaton.
pub struct WeakEncoding {
    pub formula: PresburgerFormula,
    pub tree: TreeEncoding,
    pub word: NfaEncoding<LabelSet>,
    pub extended: TreeAutomaton,
    pub triples: Vec<(usize, usize, usize)>,
}

pub fn encode_weak(s: &WeakOdta) -> Result<WeakEncoding> {
    let tr = s.transducer();
    let gamma = tr.output();
    let (extended, triples) = extended_automaton(tr)?;
    let ext_keys: Vec<Key> = extended.alphabet().names().iter().map(Key::extended).collect();
    let tree = if triples.is_empty() {
        TreeEncoding::new(&extended, &|_, _| vec![], &[], "t")
    } else {
        TreeEncoding::new(&extended, &|_, l| vec![vec![Key::extended(extended.alphabet().name(l))]], &ext_keys, "t")
    };
    let m = s.value_automaton();
    let word = NfaEncoding::new(m, &|x: &LabelSet| class_key(gamma, *x), "m");
    let mut f = tree.formula.and(&word.formula);
    let symbols: Vec<LabelSet> = m.alphabet().iter().copied().collect();
    for b in 0..gamma.len() {
        let xa = f.var(label_key(gamma, b));
        let mut sum = vec![(xa, 1)];
        for (l, &(_, _, o)) in triples.iter().enumerate() {
            if o == b {
                sum.push((f.var(ext_keys[l].clone()), -1));
            }
        }
        // x_α = Σ x_(a,q,α)
        f.add(Formula::eq(sum, 0));
        let classes: Vec<usize> = symbols.iter().filter(|s| s.contains(b)).map(|&s| f.var(class_key(gamma, s))).collect();
        let mut ge = vec![(xa, 1)];
        ge.extend(classes.iter().map(|&v| (v, -1)));
        if s.gamma0().contains(b) {
            f.add(Formula::eq(ge, 0));
        } else {
            f.add(Formula::ge(ge, 0));
        }
        // α-nodes need some value, so some position of the word holds α
        f.add(Formula::Or(vec![
            Formula::eq([(xa, 1)], 0),
            Formula::ge(classes.iter().map(|&v| (v, 1)), 1),
        ]));
    }
    Ok(WeakEncoding { formula: f, tree, word, extended, triples })
}

/// Values realizing `w` on the output labelling `out` (nodes in preorder):
/// position j of w becomes value j + 1. For each α the first α-nodes take
/// the positions containing α in order, the rest repeat the first one.
pub fn assign_values(out: &[usize], w: &[LabelSet], gamma_len: usize) -> Result<Vec<u64>> {
    let mut values = vec![0u64; out.len()];
    for b in 0..gamma_len {
        let nodes: Vec<usize> = (0..out.len()).filter(|&u| out[u] == b).collect();
        let pos: Vec<u64> = (0..w.len()).filter(|&j| w[j].contains(b)).map(|j| j as u64 + 1).collect();
        if nodes.len() < pos.len() || (pos.is_empty() && !nodes.is_empty()) {
            return Err(Error::DecodeFailed(format!("{} nodes cannot realize {} positions of one label", nodes.len(), pos.len())));
        }
        for (i, &u) in nodes.iter().enumerate() {
            values[u] = if i < pos.len() { pos[i] } else { pos[0] };
        }
    }
    Ok(values)
}

/// Direct check of a certificate against the weak ODTA's definition.
pub fn check_weak_certificate(s: &WeakOdta, t: &OrderedDataTree, c: &Certificate) -> bool {
    let tr = s.transducer();
    let Ok(labels) = tr.base().translate_labels(t) else { return false };
    if c.output.len() != t.len() || !tr.base().check_run(t.shape(), &labels, &c.run) {
        return false;
    }
    if (0..t.len()).any(|u| !tr.emits(c.run[u], labels[u], c.output[u])) {
        return false;
    }
    let w: Vec<LabelSet> = classes_of(t).iter().map(|cl| cl.iter().fold(LabelSet::EMPTY, |a, &u| a.with(c.output[u]))).collect();
    w == c.value_word && output_accepted(s.value_automaton(), s.gamma0(), &c.output, t.values())
}

fn decode(s: &WeakOdta, enc: &WeakEncoding, a: &crate::presburger::Assignment) -> Result<(OrderedDataTree, Certificate)> {
    let d = enc.tree.decode(a)?;
    let w = enc.word.decode(a)?;
    let out: Vec<usize> = d.labels.iter().map(|&l| enc.triples[l].2).collect();
    let input: Vec<usize> = d.labels.iter().map(|&l| enc.triples[l].0).collect();
    let values = assign_values(&out, &w, s.output().len())?;
    let t = DataTree::new(s.input().clone(), Arc::new(d.shape), input, values)?;
    let cert = Certificate { output_alphabet: s.output().clone(), output: out, run: d.run, value_word: w };
    Ok((t, cert))
}

fn run(s: &WeakOdta, xi: Option<&PresburgerFormula>, caps: &EmptinessCaps) -> Result<EmptinessReport> {
    let enc = encode_weak(s)?;
    let mut f = enc.formula.clone();
    if let Some(xi) = xi {
        f = f.and(xi);
        // class counts ξ mentions that M cannot produce are zero
        for k in xi.free_keys() {
            if enc.formula.lookup(k).is_none() {
                let v = f.var(k.clone());
                f.add(Formula::eq([(v, 1)], 0));
            }
        }
    }
    let mut rep = EmptinessReport { verdict: EmptinessVerdict::EmptyWithinCaps, stats: Default::default(), notes: Vec::new() };
    rep.note("variables", f.num_vars());
    rep.note("atoms", f.num_atoms());
    rep.note("extended-labels", enc.triples.len());
    let sol = solve(&f, caps.solver)?;
    rep.stats = sol.stats;
    rep.verdict = match sol.verdict {
        Verdict::Unsat => EmptinessVerdict::Empty,
        Verdict::Unknown => {
            rep.note("reason", "solver budget exhausted");
            EmptinessVerdict::EmptyWithinCaps
        }
        Verdict::Sat(a) => {
            let (t, cert) = decode(s, &enc, &a)?;
            if !check_weak_certificate(s, &t, &cert) {
                return Err(Error::Invalid("decoded witness violates its certificate".into()));
            }
            let recheck = match xi {
                None => member_weak(s, &t, caps.member_budget)?,
                Some(xi) => {
                    let counts = count_assignment(xi, s.output(), &cert.output, &classes_of(&t));
                    if xi_holds(xi, &counts, caps.solver)? == Some(false) {
                        return Err(Error::Invalid("decoded witness violates the constraint".into()));
                    }
                    member_weak_ext(&ExtendedWeakOdta { base: s.clone(), xi: xi.clone() }, &t, caps.member_budget, caps.solver)?
                }
            };
            if recheck == Membership::NonMember {
                return Err(Error::Invalid("decoded witness rejected by membership".into()));
            }
            rep.note("membership-recheck", recheck.name());
            EmptinessVerdict::Nonempty { witness: t, certificate: cert }
        }
    };
    Ok(rep)
}

pub fn empty_weak(s: &WeakOdta, caps: &EmptinessCaps) -> Result<EmptinessReport> {
    run(s, None, caps)
}

pub fn empty_weak_ext(s: &ExtendedWeakOdta, caps: &EmptinessCaps) -> Result<EmptinessReport> {
    run(&s.base, Some(&s.xi), caps)
}

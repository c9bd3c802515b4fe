//! Seeded random instance generators used by the CLI and the test suites.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{Alphabet, DataTree, Nested, OrderedDataTree};

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random unranked tree with exactly `n` nodes: node i picks its parent
/// uniformly among the earlier nodes.
pub fn random_tree(rng: &mut Rand, alphabet: &Alphabet, n: usize, max_value: u64) -> OrderedDataTree {
    assert!(n >= 1);
    let mut kids: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 1..n {
        let p = rng.gen_range(0..i);
        kids[p].push(i);
    }
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..alphabet.len())).collect();
    let values: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=max_value.max(1))).collect();
    fn build(u: usize, k: &[Vec<usize>], l: &[usize], v: &[u64], a: &Alphabet) -> Nested<u64> {
        Nested::new(a.name(l[u]), v[u], k[u].iter().map(|&c| build(c, k, l, v, a)).collect())
    }
    let nested = build(0, &kids, &labels, &values, alphabet);
    DataTree::from_nested(&nested, Some(alphabet)).expect("generated tree is well-formed")
}

pub fn symbols(prefix: &str, n: usize) -> Alphabet {
    Alphabet::new((0..n).map(|i| format!("{prefix}{i}"))).expect("nonempty")
}

/// Random data graph with degree ≤ `max_deg` over `labels` labels, where every
/// label carries enough distinct values for recoloring.
pub fn random_recolorable_graph(rng: &mut Rand, labels: usize, max_deg: usize) -> crate::data::DataGraph {
    let bound = max_deg * labels + max_deg + 1;
    let mut lab = Vec::new();
    let mut val = Vec::new();
    for a in 0..labels {
        let offset = rng.gen_range(0..5u64);
        let extra = rng.gen_range(0..6);
        for i in 0..bound + extra {
            lab.push(a);
            let d = if i < bound { i as u64 + 1 } else { rng.gen_range(1..=bound as u64) };
            val.push(offset + d);
        }
    }
    let n = lab.len();
    let mut g = crate::data::DataGraph::new(labels, lab, val).expect("well-formed");
    let mut deg = vec![0usize; n];
    for _ in 0..n * 2 {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && deg[u] < max_deg && deg[v] < max_deg && !g.neighbours(u).contains(&v) {
            g.add_edge(u, v).expect("valid edge");
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    g
}

/// Random NFA over `symbols` with roughly `density` transitions per state.
pub fn random_nfa<S: Ord + Clone + std::fmt::Debug>(rng: &mut Rand, states: usize, symbols: &[S], density: f64) -> crate::automata::Nfa<S> {
    let mut m = crate::automata::Nfa::new(states);
    for s in symbols {
        m.declare_symbol(s.clone());
    }
    m.set_initial(0);
    for q in 0..states {
        if rng.gen_bool(0.5) {
            m.set_final(q);
        }
    }
    let p = (density / symbols.len().max(1) as f64 / states as f64).min(1.0);
    for q in 0..states {
        for s in symbols {
            for r in 0..states {
                if rng.gen_bool(p) {
                    m.add_transition(q, s.clone(), r);
                }
            }
        }
    }
    m
}

/// Random unranked tree automaton; each δ(q, a) is present with probability
/// 3/4 and is a random NFA over states with at most two states.
pub fn random_tree_automaton(rng: &mut Rand, states: usize, alphabet: &Alphabet) -> crate::automata::TreeAutomaton {
    let mut t = crate::automata::TreeAutomaton::with_states(states, alphabet.clone());
    let qs: Vec<usize> = (0..states).collect();
    for q in 0..states {
        for a in 0..alphabet.len() {
            if rng.gen_bool(0.75) {
                let k = rng.gen_range(1..=2);
                t.set_horizontal(q, a, random_nfa(rng, k, &qs, 1.5));
            }
        }
    }
    t.add_final(rng.gen_range(0..states));
    if states > 1 && rng.gen_bool(0.3) {
        t.add_final(rng.gen_range(0..states));
    }
    t
}

/// Preorder arity sequences of every ordered tree with exactly `n` nodes.
pub fn all_shapes(n: usize) -> Vec<Vec<usize>> {
    // Forests of `n` nodes as arity sequences, built from first-tree size.
    fn forests(n: usize, memo: &mut Vec<Option<Vec<Vec<usize>>>>) -> Vec<Vec<usize>> {
        if let Some(v) = &memo[n] {
            return v.clone();
        }
        let mut out = Vec::new();
        if n == 0 {
            out.push(Vec::new());
        }
        for first in 1..=n {
            let inner = forests(first - 1, memo);
            let rest = forests(n - first, memo);
            for i in &inner {
                for r in &rest {
                    let mut s = vec![count_roots(i)];
                    s.extend(i);
                    s.extend(r);
                    out.push(s);
                }
            }
        }
        memo[n] = Some(out.clone());
        out
    }
    fn count_roots(seq: &[usize]) -> usize {
        let (mut roots, mut need) = (0, 0usize);
        for &a in seq {
            if need == 0 {
                roots += 1;
            } else {
                need -= 1;
            }
            need += a;
        }
        roots
    }
    if n == 0 {
        return Vec::new();
    }
    let mut memo = vec![None; n + 1];
    forests(n - 1, &mut memo)
        .into_iter()
        .map(|f| {
            let mut s = vec![count_roots(&f)];
            s.extend(f);
            s
        })
        .collect()
}

/// Random letter-to-letter transducer over `input` with `gamma` output
/// symbols named g0, g1, …; each (q, a) with a transition emits a random
/// nonempty set of outputs.
pub fn random_transducer(rng: &mut Rand, states: usize, input: &Alphabet, gamma: usize) -> crate::automata::TreeTransducer {
    let base = random_tree_automaton(rng, states, input);
    let keys: Vec<(usize, usize)> = base.horizontals().map(|(&k, _)| k).collect();
    let mut t = crate::automata::TreeTransducer::new(base, symbols("g", gamma));
    for (q, a) in keys {
        let first = rng.gen_range(0..gamma);
        t.add_output(q, a, first);
        for b in 0..gamma {
            if rng.gen_bool(0.3) {
                t.add_output(q, a, b);
            }
        }
    }
    t
}

fn random_value_parts(rng: &mut Rand, gamma: &Alphabet) -> (crate::automata::Nfa<crate::data::LabelSet>, crate::data::LabelSet) {
    let syms: Vec<crate::data::LabelSet> = gamma.nonempty_subsets().collect();
    let k = rng.gen_range(1..=3);
    let m = random_nfa(rng, k, &syms, 0.6 * syms.len() as f64);
    let mut g0 = crate::data::LabelSet::EMPTY;
    for b in 0..gamma.len() {
        if rng.gen_bool(0.3) {
            g0 = g0.with(b);
        }
    }
    (m, g0)
}

pub fn random_weak_odta(rng: &mut Rand, states: usize, sigma: &Alphabet, gamma: usize) -> crate::odta::WeakOdta {
    let tr = random_transducer(rng, states, sigma, gamma);
    let (m, g0) = random_value_parts(rng, tr.output());
    crate::odta::WeakOdta::new(tr, m, g0).expect("generated weak ODTA is well-formed")
}

/// Random ODTA: a random transducer on Σ whose transitions and outputs are
/// then thinned per profile triple.
pub fn random_odta(rng: &mut Rand, states: usize, sigma: &Alphabet, gamma: usize) -> crate::odta::Odta {
    use crate::data::profile::{profile_alphabet, profile_symbol_index};
    use crate::data::ProfileTriple;
    let w = random_transducer(rng, states, sigma, gamma);
    let pa = profile_alphabet(sigma);
    let mut ta = crate::automata::TreeAutomaton::new(w.base().state_names().to_vec(), pa);
    for &q in w.base().finals() {
        ta.add_final(q);
    }
    let mut kept = Vec::new();
    for (&(q, a), m) in w.base().horizontals() {
        for p in ProfileTriple::all() {
            if rng.gen_bool(0.85) {
                ta.set_horizontal(q, profile_symbol_index(a, p), m.clone());
                kept.push((q, a, p));
            }
        }
    }
    let mut tr = crate::automata::TreeTransducer::new(ta, w.output().clone());
    for (q, a, p) in kept {
        let outs = w.outputs(q, a);
        let pick = outs[rng.gen_range(0..outs.len())];
        tr.add_output(q, profile_symbol_index(a, p), pick);
        for &b in outs {
            if rng.gen_bool(0.5) {
                tr.add_output(q, profile_symbol_index(a, p), b);
            }
        }
    }
    let (m, g0) = random_value_parts(rng, tr.output());
    crate::odta::Odta::new(sigma.clone(), tr, m, g0).expect("generated ODTA is well-formed")
}

/// Random member of L(ta) with at most `max_nodes` nodes, by a top-down
/// random walk through productive states. Gives up after `tries` attempts.
pub fn sample_accepted(
    rng: &mut Rand,
    ta: &crate::automata::TreeAutomaton,
    max_nodes: usize,
    max_value: u64,
    tries: usize,
) -> Option<OrderedDataTree> {
    use crate::automata::Nfa;
    let prod = ta.productive();
    let mut options: Vec<Vec<(usize, Nfa<usize>)>> = vec![Vec::new(); ta.num_states()];
    for (&(q, a), m) in ta.horizontals() {
        let r = m.map_symbols(|&x| prod.contains(x).then_some(x)).trim();
        if !r.is_empty() {
            options[q].push((a, r));
        }
    }
    let finals: Vec<usize> = ta.finals().iter().copied().filter(|&q| prod.contains(q)).collect();
    if finals.is_empty() {
        return None;
    }
    fn grow(rng: &mut Rand, q: usize, opts: &[Vec<(usize, Nfa<usize>)>], budget: &mut usize, al: &Alphabet, mv: u64) -> Option<Nested<u64>> {
        if *budget == 0 {
            return None;
        }
        *budget -= 1;
        let (a, m) = &opts[q][rng.gen_range(0..opts[q].len())];
        let inits: Vec<usize> = m.initial().iter().copied().collect();
        let mut p = inits[rng.gen_range(0..inits.len())];
        let mut word = Vec::new();
        loop {
            let out = m.out(p);
            if m.is_final(p) && (out.is_empty() || rng.gen_bool(0.45)) {
                break;
            }
            if out.is_empty() || word.len() > *budget {
                return None;
            }
            let (x, r) = out[rng.gen_range(0..out.len())];
            word.push(x);
            p = r;
        }
        let kids = word.into_iter().map(|x| grow(rng, x, opts, budget, al, mv)).collect::<Option<Vec<_>>>()?;
        Some(Nested::new(al.name(*a), rng.gen_range(1..=mv.max(1)), kids))
    }
    for _ in 0..tries {
        let q = finals[rng.gen_range(0..finals.len())];
        let mut budget = max_nodes;
        if let Some(n) = grow(rng, q, &options, &mut budget, ta.alphabet(), max_value) {
            return Some(DataTree::from_nested(&n, Some(ta.alphabet())).expect("sampled tree is well-formed"));
        }
    }
    None
}

/// Random content model over `n` symbols, nested at most `depth` deep.
pub fn random_regex(rng: &mut Rand, n: usize, depth: usize) -> crate::frontends::Regex {
    use crate::frontends::Regex;
    let leaf = |rng: &mut Rand| if rng.gen_bool(0.15) { Regex::Epsilon } else { Regex::Sym(rng.gen_range(0..n)) };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..6) {
        0 | 1 => leaf(rng),
        2 => Regex::Cat((0..rng.gen_range(2..=3)).map(|_| random_regex(rng, n, depth - 1)).collect()),
        3 => Regex::Alt((0..2).map(|_| random_regex(rng, n, depth - 1)).collect()),
        4 => Regex::Star(Box::new(random_regex(rng, n, depth - 1))),
        _ => {
            let r = Box::new(random_regex(rng, n, depth - 1));
            if rng.gen_bool(0.5) {
                Regex::Opt(r)
            } else {
                Regex::Plus(r)
            }
        }
    }
}

/// Random DTD over symbols s0…; about a third of the symbols are leaves.
pub fn random_dtd(rng: &mut Rand, n: usize) -> crate::frontends::Dtd {
    use crate::frontends::Regex;
    let sigma = symbols("s", n);
    let rules = (0..n).map(|a| if a > 0 && rng.gen_bool(0.35) { Regex::Epsilon } else { random_regex(rng, n, 2) }).collect();
    crate::frontends::Dtd::new(sigma, 0, rules).expect("generated DTD is well-formed")
}

/// Random key and inclusion constraints over `n` symbols.
pub fn random_integrity(rng: &mut Rand, n: usize) -> Vec<crate::frontends::Constraint> {
    use crate::frontends::{Constraint, IntegrityConstraint};
    let mut out = Vec::new();
    for _ in 0..rng.gen_range(0..=3) {
        let a = rng.gen_range(0..n);
        out.push(Constraint::Integrity(if rng.gen_bool(0.4) {
            IntegrityConstraint::Key(a)
        } else {
            IntegrityConstraint::Inclusion(a, rng.gen_range(0..n))
        }));
    }
    out
}

/// Random data term over `n` symbols.
pub fn random_term(rng: &mut Rand, n: usize, depth: usize) -> crate::frontends::DataTerm {
    use crate::frontends::DataTerm;
    if depth == 0 || rng.gen_bool(0.3) {
        return DataTerm::V(rng.gen_range(0..n));
    }
    match rng.gen_range(0..3) {
        0 => DataTerm::union(random_term(rng, n, depth - 1), random_term(rng, n, depth - 1)),
        1 => DataTerm::inter(random_term(rng, n, depth - 1), random_term(rng, n, depth - 1)),
        _ => DataTerm::compl(random_term(rng, n, depth - 1)),
    }
}

/// Random set constraints, plus a linear constraint with probability 1/2.
pub fn random_setlin(rng: &mut Rand, n: usize) -> Vec<crate::frontends::Constraint> {
    use crate::frontends::{Constraint, LinVar, LinearConstraint, SetConstraint};
    use crate::presburger::Cmp;
    let mut out = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        out.push(Constraint::Set(SetConstraint { term: random_term(rng, n, 2), empty: rng.gen_bool(0.5) }));
    }
    if rng.gen_bool(0.5) {
        let s = crate::data::LabelSet::singleton(rng.gen_range(0..n));
        let terms = vec![(LinVar::Count(rng.gen_range(0..n)), 1), (LinVar::Class(s), -rng.gen_range(1..=2))];
        let cmp = [Cmp::Eq, Cmp::Le, Cmp::Ge][rng.gen_range(0..3)];
        out.push(Constraint::Linear(LinearConstraint { terms, cmp, rhs: rng.gen_range(-1..=1) }));
    }
    out
}

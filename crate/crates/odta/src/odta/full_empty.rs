//! Emptiness of full ODTA. Each guess bundle fixes a pool of constants;
//! nodes are coloured by the constant their zone carries (or left free),
//! the profile is read off the colouring, and the counts of the coloured
//! extended tree and of the zonal value word are tied together by ξ.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::member::{classes_of, member_odta, Membership};
use super::model::{zonal_key, Odta};
use super::verdict::{add_stats, Certificate, EmptinessCaps, EmptinessReport, EmptinessVerdict};
use super::zonal::zonal_convert;
use crate::automata::{Nfa, TreeTransducer};
use crate::data::profile::split_profile_symbol;
use crate::data::{profile, recolor_data_graph, Alphabet, DataGraph, DataTree, LabelSet, OrderedDataTree, ProfileTriple, Rel, Shape, ZonalSymbol};
use crate::error::{Error, Result};
use crate::presburger::{solve, Assignment, Formula, Grammar, Key, NfaEncoding, PresburgerFormula, Production, Verdict};

/// One guess: small zonal symbols P with their exact number of positions
/// M_P (one constant of C_P per position), the pool D given by P_d per
/// constant, and whether free zones may occur.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuessBundle {
    pub small: Vec<(ZonalSymbol, u64)>,
    pub d: Vec<ZonalSymbol>,
    pub free: bool,
}

impl GuessBundle {
    pub fn size(&self) -> u64 {
        self.small.len() as u64 + self.small.iter().map(|x| x.1).sum::<u64>() + self.d.len() as u64 + u64::from(self.free)
    }

    /// Symbol of each constant: C_P for the small symbols in order, then D.
    pub fn constants(&self) -> Vec<ZonalSymbol> {
        let mut out = Vec::new();
        for (p, m) in &self.small {
            for _ in 0..*m {
                out.push(p.clone());
            }
        }
        out.extend(self.d.iter().cloned());
        out
    }

    pub fn is_small(&self, p: &ZonalSymbol) -> bool {
        self.small.iter().any(|(q, _)| q == p)
    }

    pub fn render(&self, gamma: &Alphabet) -> String {
        let small: Vec<String> = self.small.iter().map(|(p, m)| format!("{}x{m}", p.render(gamma))).collect();
        let d: Vec<String> = self.d.iter().map(|p| p.render(gamma)).collect();
        format!("small=[{}] d=[{}] free={}", small.join(" "), d.join(" "), self.free)
    }
}

/// K = 27·|Σ|·|Q|·|Γ|.
pub fn k_param(s: &Odta) -> u64 {
    27 * s.sigma().len() as u64 * s.transducer().base().num_states() as u64 * s.output().len() as u64
}

/// The published bound on the count of a large zonal symbol, unevaluated.
pub fn published_threshold(k: u64) -> String {
    format!("2*{k}^({k}^3)*2^{k} + 2*{k}^({k}^3) + 1")
}

/// Decimal digits of K^(K³), the dominant term of the published bound.
pub fn published_threshold_digits(k: u64) -> f64 {
    (k as f64).powi(3) * (k as f64).log10()
}

/// Count every large symbol must reach so that recolouring
/// applies to free zones: their degree is at most `children + 3`.
pub fn free_threshold(gamma_len: usize, children: usize) -> u64 {
    let deg = children as u64 + 3;
    deg * gamma_len as u64 + deg + 1
}

fn bit(r: Rel) -> u8 {
    match r {
        Rel::Same => 1,
        Rel::Diff => 2,
        Rel::Absent => 4,
    }
}

const ABSENT: u8 = 4;

/// Profile labels (a, triple) that behave alike in state q.
struct Class {
    q: usize,
    nfa: usize,
    outputs: Vec<usize>,
    members: Vec<(usize, ProfileTriple)>,
}

impl Class {
    /// Right relations allowed once the left and parent relations are known.
    fn rset(&self, l: Rel, p: Rel) -> u8 {
        self.members.iter().filter(|(_, t)| t.left == l && t.parent == p).fold(0, |acc, (_, t)| acc | bit(t.right))
    }

    fn symbol_for(&self, t: ProfileTriple) -> Option<usize> {
        self.members.iter().find(|(_, m)| *m == t).map(|&(a, _)| a)
    }
}

struct Classes {
    nfas: Vec<Nfa<usize>>,
    classes: Vec<Class>,
    per_q: Vec<Vec<usize>>,
}

fn profile_classes(tr: &TreeTransducer) -> Classes {
    let base = tr.base();
    let mut nfas: Vec<Nfa<usize>> = Vec::new();
    let mut classes: Vec<Class> = Vec::new();
    let mut by_key: BTreeMap<(usize, usize, Vec<usize>), usize> = BTreeMap::new();
    for (&(q, i), m) in base.horizontals() {
        let outputs = tr.outputs(q, i).to_vec();
        if outputs.is_empty() {
            continue;
        }
        let h = match nfas.iter().position(|x| x == m) {
            Some(h) => h,
            None => {
                nfas.push(m.clone());
                nfas.len() - 1
            }
        };
        let g = *by_key.entry((q, h, outputs.clone())).or_insert_with(|| {
            classes.push(Class { q, nfa: h, outputs, members: Vec::new() });
            classes.len() - 1
        });
        classes[g].members.push(split_profile_symbol(i));
    }
    let mut per_q = vec![Vec::new(); base.num_states()];
    for (g, c) in classes.iter().enumerate() {
        per_q[c.q].push(g);
    }
    Classes { nfas, classes, per_q }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Nt {
    Start,
    Node { q: usize, c: usize, g: usize },
    /// Reading the children of a node of colour `pc` with horizontal `h`;
    /// `prev` is the colour and allowed right relations of the last child.
    Hor { h: usize, s: usize, pc: usize, prev: Option<(usize, u8)>, n: usize },
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Root,
    Node { q: usize, c: usize, g: usize, alpha: usize },
    Child,
    End,
}

/// Grammar of coloured extended trees. Colours 0..k are constants; colour
/// k stands for free zones of a single node when `free` holds.
struct Tracker {
    grammar: Grammar,
    kinds: Vec<Kind>,
    k: usize,
    keys: Vec<Key>,
}

fn count_key(gamma: &Alphabet, c: Option<usize>, b: usize) -> Key {
    match c {
        Some(i) => Key::aux(format!("k{i}/{}", gamma.name(b))),
        None => Key::aux(format!("free/{}", gamma.name(b))),
    }
}

struct Builder {
    ids: HashMap<Nt, usize>,
    nts: Vec<Nt>,
    todo: Vec<usize>,
}

impl Builder {
    fn id(&mut self, nt: Nt) -> usize {
        if let Some(&i) = self.ids.get(&nt) {
            return i;
        }
        let i = self.nts.len();
        self.ids.insert(nt, i);
        self.nts.push(nt);
        self.todo.push(i);
        i
    }
}

fn build_tracker(cl: &Classes, finals: &[usize], gamma: &Alphabet, k: usize, free: bool, max_children: usize) -> Tracker {
    let colours = k + usize::from(free);
    let same = |a: usize, b: usize| a == b && a < k;
    let key_of = |c: usize, b: usize| count_key(gamma, (c < k).then_some(c), b);
    let mut b = Builder { ids: HashMap::new(), nts: Vec::new(), todo: Vec::new() };
    let mut productions = Vec::new();
    let mut kinds = Vec::new();
    b.id(Nt::Start);
    while let Some(x) = b.todo.pop() {
        match b.nts[x] {
            Nt::Start => {
                for &q in finals {
                    for c in 0..colours {
                        for &g in &cl.per_q[q] {
                            if cl.classes[g].rset(Rel::Absent, Rel::Absent) & ABSENT != 0 {
                                let y = b.id(Nt::Node { q, c, g });
                                productions.push(Production { lhs: x, rhs: vec![y], tags: vec![] });
                                kinds.push(Kind::Root);
                            }
                        }
                    }
                }
            }
            Nt::Node { q, c, g } => {
                let class = &cl.classes[g];
                for &alpha in &class.outputs {
                    for &s in cl.nfas[class.nfa].initial() {
                        let y = b.id(Nt::Hor { h: class.nfa, s, pc: c, prev: None, n: 0 });
                        productions.push(Production { lhs: x, rhs: vec![y], tags: vec![key_of(c, alpha)] });
                        kinds.push(Kind::Node { q, c, g, alpha });
                    }
                }
            }
            Nt::Hor { h, s, pc, prev, n } => {
                let m = &cl.nfas[h];
                if m.is_final(s) && prev.is_none_or(|(_, r)| r & ABSENT != 0) {
                    productions.push(Production { lhs: x, rhs: vec![], tags: vec![] });
                    kinds.push(Kind::End);
                }
                let is_free = free && pc == k;
                if is_free && n >= max_children {
                    continue;
                }
                for &(q2, s2) in m.out(s) {
                    for c2 in 0..colours {
                        let p = if same(c2, pc) { Rel::Same } else { Rel::Diff };
                        let l = match prev {
                            None => Rel::Absent,
                            Some((cp, r)) => {
                                let l = if same(cp, c2) { Rel::Same } else { Rel::Diff };
                                if r & bit(l) == 0 {
                                    continue;
                                }
                                l
                            }
                        };
                        for &g2 in &cl.per_q[q2] {
                            let r = cl.classes[g2].rset(l, p);
                            if r == 0 {
                                continue;
                            }
                            let node = b.id(Nt::Node { q: q2, c: c2, g: g2 });
                            let rest = b.id(Nt::Hor { h, s: s2, pc, prev: Some((c2, r)), n: if is_free { n + 1 } else { 0 } });
                            productions.push(Production { lhs: x, rhs: vec![node, rest], tags: vec![] });
                            kinds.push(Kind::Child);
                        }
                    }
                }
            }
        }
    }
    let mut keys = Vec::new();
    for c in 0..colours {
        for a in 0..gamma.len() {
            keys.push(key_of(c, a));
        }
    }
    let grammar = Grammar { nonterminals: b.nts.len(), start: 0, productions };
    Tracker { grammar, kinds, k, keys }
}

fn derivable(g: &Grammar) -> bool {
    g.useful().iter().zip(&g.productions).any(|(&u, p)| u && p.lhs == g.start)
}

/// Decoded coloured tree.
struct Coloured {
    shape: Shape,
    run: Vec<usize>,
    colour: Vec<usize>,
    class: Vec<usize>,
    output: Vec<usize>,
}

fn decode_coloured(tk: &Tracker, f: &PresburgerFormula, a: &Assignment) -> Result<Coloured> {
    let counts = tk.grammar.counts("t", f, a);
    let d = tk.grammar.derive(&counts)?;
    let (mut arity, mut run, mut colour, mut class, mut output) = (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut stack = vec![d.children[0][0]];
    while let Some(x) = stack.pop() {
        let Kind::Node { q, c, g, alpha } = tk.kinds[d.production[x]] else {
            return Err(Error::DecodeFailed("expected a node production".into()));
        };
        let mut kids = Vec::new();
        let mut y = d.children[x][0];
        loop {
            match tk.kinds[d.production[y]] {
                Kind::Child => {
                    kids.push(d.children[y][0]);
                    y = d.children[y][1];
                }
                Kind::End => break,
                _ => return Err(Error::DecodeFailed("malformed child list".into())),
            }
        }
        arity.push(kids.len());
        run.push(q);
        colour.push(c);
        class.push(g);
        output.push(alpha);
        stack.extend(kids.into_iter().rev());
    }
    Ok(Coloured { shape: Shape::from_preorder_arity(&arity)?, run, colour, class, output })
}

/// Zonal symbols used for the value word: {S} for constant positions and
/// {{β} : β ∈ S} for positions of free single-node zones. M′ accepts a
/// symbol exactly when M accepts its union, so no other cover is needed.
fn word_symbols(s: &Odta) -> (Vec<ZonalSymbol>, Vec<ZonalSymbol>) {
    let syms: Vec<LabelSet> = s.value_automaton().alphabet().iter().copied().collect();
    let ct = syms.iter().map(|&x| ZonalSymbol::new([x])).collect();
    let ft = syms.iter().map(|&x| ZonalSymbol::new(x.iter().map(LabelSet::singleton))).collect();
    (ct, ft)
}

fn is_free_type(p: &ZonalSymbol) -> bool {
    p.sets().iter().all(|x| x.len() == 1)
}

fn combinations(n: usize, r: usize, with_repeats: bool) -> Vec<Vec<usize>> {
    fn go(n: usize, r: usize, from: usize, rep: bool, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in from..n {
            cur.push(i);
            go(n, r, if rep { i } else { i + 1 }, rep, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, r, 0, with_repeats, &mut Vec::new(), &mut out);
    out
}

/// Bundles within the caps, by total size, then |P|, Σ M_P and |D|.
pub fn guess_bundles(s: &Odta, caps: &EmptinessCaps) -> Vec<GuessBundle> {
    let (ct, ft) = word_symbols(s);
    let mut smalls: Vec<Vec<(ZonalSymbol, u64)>> = Vec::new();
    for r in 0..=caps.max_zones.min(ct.len()) {
        for pick in combinations(ct.len(), r, false) {
            let mut acc: Vec<Vec<(ZonalSymbol, u64)>> = vec![Vec::new()];
            for &i in &pick {
                acc = acc
                    .into_iter()
                    .flat_map(|v| {
                        let sym = ct[i].clone();
                        (1..=caps.max_class_size).map(move |m| {
                            let mut w = v.clone();
                            w.push((sym.clone(), m));
                            w
                        })
                    })
                    .collect();
            }
            smalls.extend(acc);
        }
    }
    let mut ds: Vec<Vec<ZonalSymbol>> = Vec::new();
    for r in 0..=caps.max_constants {
        for pick in combinations(ft.len(), r, true) {
            ds.push(pick.into_iter().map(|i| ft[i].clone()).collect());
        }
    }
    let mut out = Vec::new();
    for small in smalls {
        if !small.is_empty() {
            out.push(GuessBundle { small: small.clone(), d: Vec::new(), free: false });
        }
        for d in &ds {
            let b = GuessBundle { small: small.clone(), d: d.clone(), free: true };
            if !b.d.iter().any(|p| b.is_small(p)) {
                out.push(b);
            }
        }
    }
    out.sort_by_key(|b| (b.size(), b.small.len(), b.small.iter().map(|x| x.1).sum::<u64>(), b.d.len(), b.free));
    out.truncate(caps.max_bundles);
    out
}

/// The APC of one bundle: tree and word encodings plus ξ.
fn bundle_formula(base: &PresburgerFormula, b: &GuessBundle, s: &Odta, symbols: &[ZonalSymbol], threshold: u64) -> PresburgerFormula {
    let gamma = s.output();
    let mut f = base.clone();
    let consts = b.constants();
    for (c, p) in consts.iter().enumerate() {
        let u = p.union();
        for x in 0..gamma.len() {
            let v = f.var(count_key(gamma, Some(c), x));
            if u.contains(x) {
                f.add(Formula::ge([(v, 1)], 1));
            } else {
                f.add(Formula::eq([(v, 1)], 0));
            }
            if s.gamma0().contains(x) {
                f.add(Formula::le([(v, 1)], 1));
            }
        }
    }
    let d_count = |p: &ZonalSymbol| b.d.iter().filter(|q| *q == p).count() as i64;
    let mut large: Vec<(usize, i64, &ZonalSymbol)> = Vec::new();
    for p in symbols {
        let z = f.var(zonal_key(gamma, p));
        if let Some((_, m)) = b.small.iter().find(|(q, _)| q == p) {
            f.add(Formula::eq([(z, 1)], *m as i64));
        } else if b.free && is_free_type(p) {
            let dp = d_count(p);
            let big = Formula::ge([(z, 1)], threshold as i64 + dp);
            if dp == 0 {
                f.add(Formula::Or(vec![Formula::eq([(z, 1)], 0), big]));
            } else {
                f.add(big);
            }
            large.push((z, dp, p));
        } else {
            f.add(Formula::eq([(z, 1)], 0));
        }
    }
    if b.free {
        for x in 0..gamma.len() {
            let xf = f.var(count_key(gamma, None, x));
            let with: Vec<&(usize, i64, &ZonalSymbol)> = large.iter().filter(|(_, _, p)| p.contains(LabelSet::singleton(x))).collect();
            let dsum: i64 = with.iter().map(|t| t.1).sum();
            // free positions holding {β}: Σ (z_P − |D_P|)
            let mut ge = vec![(xf, 1)];
            ge.extend(with.iter().map(|t| (t.0, -1)));
            if s.gamma0().contains(x) {
                f.add(Formula::eq(ge, -dsum));
            } else {
                f.add(Formula::ge(ge, -dsum));
            }
            f.add(Formula::Or(vec![Formula::eq([(xf, 1)], 0), Formula::ge(with.iter().map(|t| (t.0, 1)), 1 + dsum)]));
        }
    }
    f
}

/// Case 1–3 value assignment on a decoded coloured tree and value word.
fn assign_values(s: &Odta, b: &GuessBundle, t: &Coloured, w: &[ZonalSymbol]) -> Result<Vec<u64>> {
    let consts = b.constants();
    let k = consts.len();
    let mut used = vec![false; w.len()];
    let mut pos = vec![0usize; k];
    // Case 1 (C_P onto the positions of P) and Case 2 (D into positions of P_d)
    for (c, p) in consts.iter().enumerate() {
        let j = (0..w.len()).find(|&j| !used[j] && w[j] == *p).ok_or_else(|| Error::DecodeFailed("no position left for a constant".into()))?;
        used[j] = true;
        pos[c] = j;
    }
    let n = t.colour.len();
    let mut values = vec![0u64; n];
    for u in 0..n {
        if t.colour[u] < k {
            values[u] = pos[t.colour[u]] as u64 + 1;
        }
    }
    // Case 3: free positions spread over the free nodes, then recoloured
    let free_nodes: Vec<usize> = (0..n).filter(|&u| t.colour[u] >= k).collect();
    let free_pos: Vec<usize> = (0..w.len()).filter(|&j| !used[j]).collect();
    if free_nodes.is_empty() {
        if !free_pos.is_empty() {
            return Err(Error::DecodeFailed("free positions without free nodes".into()));
        }
        return Ok(values);
    }
    let gamma_len = s.output().len();
    let mut init = vec![0u64; free_nodes.len()];
    for x in 0..gamma_len {
        let nodes: Vec<usize> = (0..free_nodes.len()).filter(|&i| t.output[free_nodes[i]] == x).collect();
        let val: Vec<usize> = free_pos.iter().copied().filter(|&j| w[j].contains(LabelSet::singleton(x))).collect();
        if nodes.is_empty() {
            if !val.is_empty() {
                return Err(Error::DecodeFailed("a free position lacks its label".into()));
            }
            continue;
        }
        if val.is_empty() || nodes.len() < val.len() {
            return Err(Error::DecodeFailed("free nodes cannot realize their positions".into()));
        }
        for (i, &v) in nodes.iter().enumerate() {
            init[v] = val[if i < val.len() { i } else { 0 }] as u64;
        }
    }
    let labels: Vec<usize> = free_nodes.iter().map(|&u| t.output[u]).collect();
    let mut g = DataGraph::new(gamma_len, labels, init)?;
    let local: BTreeMap<usize, usize> = free_nodes.iter().enumerate().map(|(i, &u)| (u, i)).collect();
    for (u, v) in t.shape.edges() {
        if let (Some(&a), Some(&b2)) = (local.get(&u), local.get(&v)) {
            g.add_edge(a, b2)?;
        }
    }
    let g = recolor_data_graph(&g)?;
    for (i, &u) in free_nodes.iter().enumerate() {
        values[u] = g.values[i] + 1;
    }
    Ok(values)
}

fn triples_of(t: &Coloured, k: usize) -> Vec<ProfileTriple> {
    let sh = &t.shape;
    let rel = |u: usize, v: Option<usize>| match v {
        None => Rel::Absent,
        Some(v) if t.colour[u] == t.colour[v] && t.colour[u] < k => Rel::Same,
        Some(_) => Rel::Diff,
    };
    (0..sh.len()).map(|u| ProfileTriple::new(rel(u, sh.left(u)), rel(u, sh.parent(u)), rel(u, sh.right(u)))).collect()
}

fn decode(s: &Odta, cl: &Classes, tk: &Tracker, word: &NfaEncoding<ZonalSymbol>, b: &GuessBundle, f: &PresburgerFormula, a: &Assignment) -> Result<(OrderedDataTree, Certificate)> {
    let t = decode_coloured(tk, f, a)?;
    let w = word.decode(a)?;
    let triples = triples_of(&t, tk.k);
    let mut labels = Vec::with_capacity(t.run.len());
    for u in 0..t.run.len() {
        let a = cl.classes[t.class[u]].symbol_for(triples[u]).ok_or_else(|| Error::DecodeFailed("no label fits the profile".into()))?;
        labels.push(a);
    }
    let values = assign_values(s, b, &t, &w)?;
    let tree = DataTree::new(s.sigma().clone(), Arc::new(t.shape.clone()), labels, values)?;
    if profile(&tree).triples != triples {
        return Err(Error::DecodeFailed("assigned values change the profile".into()));
    }
    let value_word = classes_of(&tree).iter().map(|cl| cl.iter().fold(LabelSet::EMPTY, |acc, &u| acc.with(t.output[u]))).collect();
    let cert = Certificate { output_alphabet: s.output().clone(), output: t.output, run: t.run, value_word };
    Ok((tree, cert))
}

pub fn empty_odta(s: &Odta, caps: &EmptinessCaps) -> Result<EmptinessReport> {
    let mut rep = EmptinessReport { verdict: EmptinessVerdict::EmptyWithinCaps, stats: Default::default(), notes: Vec::new() };
    let gamma = s.output();
    let k = k_param(s);
    let threshold = free_threshold(gamma.len(), caps.max_free_children);
    rep.note("K", k);
    rep.note("threshold-published", published_threshold(k));
    rep.note("threshold-published-digits", format!("{:.0}", published_threshold_digits(k)));
    rep.note("threshold-used", threshold);
    if s.value_automaton().is_empty() {
        rep.note("reason", "value automaton accepts no word");
        rep.verdict = EmptinessVerdict::Empty;
        return Ok(rep);
    }
    let tr = s.transducer();
    let cl = profile_classes(tr);
    let finals: Vec<usize> = tr.base().finals().iter().copied().collect();
    // consistent profiles are exactly those of trees with three values
    let probe = build_tracker(&cl, &finals, gamma, 3, false, 0);
    if !derivable(&probe.grammar) {
        rep.note("reason", "transducer has no run on a consistent profile");
        rep.verdict = EmptinessVerdict::Empty;
        return Ok(rep);
    }
    let zonal = match zonal_convert(s, caps.zone_cap) {
        Ok(z) => z,
        Err(Error::CapExceeded(m)) => {
            rep.note("reason", format!("zonal conversion: {m}"));
            return Ok(rep);
        }
        Err(e) => return Err(e),
    };
    rep.note("zonal-symbols", zonal.value_automaton().alphabet().len());
    let (ct, ft) = word_symbols(s);
    let bundles = guess_bundles(s, caps);
    rep.note("bundles-available", bundles.len());
    let mut trackers: BTreeMap<(usize, bool), (Tracker, PresburgerFormula, NfaEncoding<ZonalSymbol>, Vec<ZonalSymbol>)> = BTreeMap::new();
    let (mut tried, mut unknown, mut failed, mut largest) = (0usize, 0usize, 0usize, 0u64);
    for b in &bundles {
        tried += 1;
        largest = largest.max(b.size());
        let key = (b.constants().len(), b.free);
        trackers.entry(key).or_insert_with(|| {
            let tk = build_tracker(&cl, &finals, gamma, key.0, key.1, caps.max_free_children);
            let mut symbols: Vec<ZonalSymbol> = ct.clone();
            if key.1 {
                symbols.extend(ft.iter().cloned());
            }
            symbols.sort();
            symbols.dedup();
            let keep = symbols.clone();
            let m = zonal.value_automaton().map_symbols(|p| keep.contains(p).then(|| p.clone()));
            let word = NfaEncoding::new(&m, &|p: &ZonalSymbol| zonal_key(gamma, p), "m");
            let mut f = PresburgerFormula::new();
            tk.grammar.encode("t", &tk.keys, &mut f);
            let f = f.and(&word.formula);
            (tk, f, word, symbols)
        });
        let (tk, base, word, symbols) = &trackers[&key];
        if !derivable(&tk.grammar) {
            continue;
        }
        let f = bundle_formula(base, b, s, symbols, threshold);
        let sol = solve(&f, caps.solver)?;
        add_stats(&mut rep.stats, &sol.stats);
        match sol.verdict {
            Verdict::Unsat => {}
            Verdict::Unknown => unknown += 1,
            Verdict::Sat(a) => {
                let (t, cert) = match decode(s, &cl, tk, word, b, &f, &a) {
                    Ok(x) => x,
                    Err(Error::DecodeFailed(_)) | Err(Error::PreconditionViolated { .. }) => {
                        failed += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let tree_run_ok = {
                    let labels = crate::odta::member::profile_labels(s.sigma(), &t)?;
                    tr.base().check_run(t.shape(), &labels, &cert.run)
                        && (0..t.len()).all(|u| tr.emits(cert.run[u], labels[u], cert.output[u]))
                };
                if !tree_run_ok {
                    return Err(Error::Invalid("decoded run does not match the witness".into()));
                }
                let recheck = member_odta(s, &t, caps.member_budget)?;
                if recheck == Membership::NonMember {
                    return Err(Error::Invalid("decoded witness rejected by membership".into()));
                }
                rep.note("bundle", b.render(gamma));
                rep.note("membership-recheck", recheck.name());
                rep.note("bundles-tried", tried);
                rep.verdict = EmptinessVerdict::Nonempty { witness: t, certificate: cert };
                return Ok(rep);
            }
        }
    }
    rep.note("bundles-tried", tried);
    rep.note("largest-bundle", largest);
    rep.note("unknown-bundles", unknown);
    rep.note("decode-failures", failed);
    rep.note("reason", "no witness within the explored bundles; caps are below the published bound");
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(4, 2, false).len(), 6);
        assert_eq!(combinations(3, 2, true).len(), 6);
        assert_eq!(combinations(3, 0, false).len(), 1);
    }

    #[test]
    fn threshold_matches_recolor_bound() {
        // degree 4 over two labels
        assert_eq!(free_threshold(2, 1), 4 * 2 + 4 + 1);
    }
}

//! Bundle files: an automaton plus its value automaton, Γ₀ and, for
//! extended weak ODTAs, a counting constraint.
//!
//! ```text
//! [kind]
//! odta
//! [sigma]
//! a b
//! [states]
//! q
//! [output-alphabet]
//! alpha beta
//! [final]
//! q
//! [horiz q a/___]
//! states: 1
//! init: 0
//! final: 0
//! 0 -> q -> 0
//! [output]
//! q a/_D_ -> alpha
//! [gamma0]
//! alpha
//! [value-automaton]
//! states: 1
//! init: 0
//! final: 0
//! 0 -> {alpha} -> 0
//! ```
//!
//! `kind` is `weak`, `extended` or `odta`. An ODTA has no `[alphabet]`
//! section: its input symbols are `a/LPR` over `[sigma]`, and `_` in a
//! triple position stands for each of S, D, A. Extended bundles carry a
//! `[presburger]` block of linear constraints, one per line, preceded by an
//! optional `keys:` line fixing the variable order.

use std::fmt::Write;

use crate::automata::format::{
    check_known, one, parse_nfa_body, required, sections, transducer_from_sections, write_nfa_body,
    write_transducer_sections, Section,
};
use crate::automata::{Nfa, TreeTransducer};
use crate::data::profile::{profile_alphabet, profile_symbol_index, profile_symbol_name};
use crate::data::{Alphabet, LabelSet, ProfileTriple, Rel};
use crate::error::{Error, Result};
use crate::presburger::{Formula, Key, PresburgerFormula};

use super::model::{ExtendedWeakOdta, Odta, WeakOdta};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Bundle {
    Weak(WeakOdta),
    Extended(ExtendedWeakOdta),
    Odta(Odta),
}

impl Bundle {
    pub fn kind(&self) -> &'static str {
        match self {
            Bundle::Weak(_) => "weak",
            Bundle::Extended(_) => "extended",
            Bundle::Odta(_) => "odta",
        }
    }

    /// The bundle as an ODTA; extended bundles have none.
    pub fn to_odta(&self) -> Option<Odta> {
        match self {
            Bundle::Weak(w) => Some(Odta::from_weak(w)),
            Bundle::Extended(_) => None,
            Bundle::Odta(o) => Some(o.clone()),
        }
    }

    pub fn output(&self) -> &Alphabet {
        match self {
            Bundle::Weak(w) => w.output(),
            Bundle::Extended(e) => e.base.output(),
            Bundle::Odta(o) => o.output(),
        }
    }
}

const BUNDLE_SECTIONS: [&str; 5] = ["kind", "sigma", "gamma0", "value-automaton", "presburger"];

/// Triples matched by a pattern such as `S_A`.
fn expand_pattern(pat: &str) -> Option<Vec<ProfileTriple>> {
    let cs: Vec<char> = pat.chars().collect();
    if cs.len() != 3 {
        return None;
    }
    let opts = |c: char| -> Option<Vec<Rel>> {
        if c == '_' {
            Some(Rel::ALL.to_vec())
        } else {
            Rel::from_code(c).map(|r| vec![r])
        }
    };
    let (l, p, r) = (opts(cs[0])?, opts(cs[1])?, opts(cs[2])?);
    let mut out = Vec::new();
    for &a in &l {
        for &b in &p {
            for &c in &r {
                out.push(ProfileTriple::new(a, b, c));
            }
        }
    }
    Some(out)
}

/// Concrete profile-symbol names for `a/pattern`.
fn expand_symbol(sigma: &Alphabet, tok: &str, line: usize) -> Result<Vec<String>> {
    let bad = || Error::parse(line, format!("`{tok}` is not a symbol a/LPR"));
    let (a, pat) = tok.rsplit_once('/').ok_or_else(bad)?;
    sigma.index(a).ok_or_else(|| Error::parse(line, format!("unknown symbol `{a}`")))?;
    Ok(expand_pattern(pat).ok_or_else(bad)?.into_iter().map(|p| profile_symbol_name(a, p)).collect())
}

/// Rewrites pattern symbols into concrete sections over the profile alphabet.
fn expand_odta_sections(secs: &[Section], sigma: &Alphabet) -> Result<Vec<Section>> {
    let mut out = vec![Section {
        line: 0,
        header: vec!["alphabet".into()],
        body: vec![(0, profile_alphabet(sigma).names().join(" "))],
    }];
    for s in secs {
        match s.name() {
            "alphabet" => return Err(Error::parse(s.line, "an odta bundle takes [sigma], not [alphabet]")),
            "horiz" if s.header.len() == 3 => {
                for name in expand_symbol(sigma, &s.header[2], s.line)? {
                    let mut c = s.clone();
                    c.header[2] = name;
                    out.push(c);
                }
            }
            "output" => {
                let mut c = s.clone();
                c.body.clear();
                for (n, l) in &s.body {
                    let (lhs, rhs) = l.split_once("->").ok_or_else(|| Error::parse(*n, "expected `q a -> b`"))?;
                    let qa: Vec<&str> = lhs.split_whitespace().collect();
                    let [q, a] = qa[..] else { return Err(Error::parse(*n, "expected `q a -> b`")) };
                    for name in expand_symbol(sigma, a, *n)? {
                        c.body.push((*n, format!("{q} {name} -> {rhs}")));
                    }
                }
                out.push(c);
            }
            _ => out.push(s.clone()),
        }
    }
    Ok(out)
}

fn parse_gamma0(secs: &[Section], gamma: &Alphabet) -> Result<LabelSet> {
    let mut g = LabelSet::EMPTY;
    if let Some(s) = one(secs, "gamma0")? {
        for (n, l) in &s.body {
            for t in l.split_whitespace() {
                g = g.with(gamma.index(t).ok_or_else(|| Error::parse(*n, format!("unknown output symbol `{t}`")))?);
            }
        }
    }
    Ok(g)
}

fn parse_value_automaton(secs: &[Section], gamma: &Alphabet) -> Result<Nfa<LabelSet>> {
    let s = required(secs, "value-automaton")?;
    gamma.check_set_capacity()?;
    parse_nfa_body(&s.body, &|t, n| {
        let set = gamma.parse_set(t).map_err(|e| Error::parse(n, e.to_string()))?;
        if set.is_empty() {
            return Err(Error::parse(n, "value-automaton symbols are nonempty sets"));
        }
        Ok(set)
    })
}

fn parse_presburger(s: &Section) -> Result<PresburgerFormula> {
    let mut f = PresburgerFormula::new();
    for (n, l) in &s.body {
        if let Some(r) = l.strip_prefix("keys:") {
            for t in r.split_whitespace() {
                f.var(Key::parse(t).ok_or_else(|| Error::parse(*n, format!("bad variable key `{t}`")))?);
            }
        } else {
            let a = f.parse_linear(l, *n)?;
            f.add(Formula::Atom(a));
        }
    }
    Ok(f)
}

pub fn parse_bundle(text: &str) -> Result<Bundle> {
    let secs = sections(text)?;
    check_known(&secs, &BUNDLE_SECTIONS)?;
    let sigma_sec = one(&secs, "sigma")?;
    let kind = match one(&secs, "kind")? {
        Some(s) => {
            let t = s.tokens();
            match t.as_slice() {
                [k] => k.clone(),
                _ => return Err(Error::parse(s.line, "expected one of weak, extended, odta")),
            }
        }
        None if sigma_sec.is_some() => "odta".into(),
        None if one(&secs, "presburger")?.is_some() => "extended".into(),
        None => "weak".into(),
    };
    let presburger = one(&secs, "presburger")?;
    match kind.as_str() {
        "weak" | "extended" => {
            if let Some(s) = sigma_sec {
                return Err(Error::parse(s.line, "[sigma] belongs to odta bundles"));
            }
            let tr = transducer_from_sections(&secs)?;
            let gamma = tr.output().clone();
            let m = parse_value_automaton(&secs, &gamma)?;
            let g0 = parse_gamma0(&secs, &gamma)?;
            let w = WeakOdta::new(tr, m, g0)?;
            match (kind.as_str(), presburger) {
                ("weak", None) => Ok(Bundle::Weak(w)),
                ("weak", Some(s)) => Err(Error::parse(s.line, "[presburger] needs kind extended")),
                (_, p) => {
                    let xi = match p {
                        Some(s) => parse_presburger(s)?,
                        None => PresburgerFormula::new(),
                    };
                    Ok(Bundle::Extended(ExtendedWeakOdta::new(w, xi)?))
                }
            }
        }
        "odta" => {
            if let Some(s) = presburger {
                return Err(Error::parse(s.line, "[presburger] needs kind extended"));
            }
            let s = sigma_sec.ok_or_else(|| Error::parse(0, "missing [sigma] section"))?;
            let sigma = Alphabet::new(s.tokens()).map_err(|e| Error::parse(s.line, e.to_string()))?;
            let expanded = expand_odta_sections(&secs, &sigma)?;
            let tr = transducer_from_sections(&expanded)?;
            let gamma = tr.output().clone();
            let m = parse_value_automaton(&secs, &gamma)?;
            let g0 = parse_gamma0(&secs, &gamma)?;
            Ok(Bundle::Odta(Odta::new(sigma, tr, m, g0)?))
        }
        k => Err(Error::parse(0, format!("unknown bundle kind `{k}`"))),
    }
}

/// All 64 patterns, most general first.
fn patterns() -> Vec<String> {
    let codes = ['_', 'S', 'D', 'A'];
    let mut v: Vec<String> = Vec::new();
    for a in codes {
        for b in codes {
            for c in codes {
                v.push([a, b, c].iter().collect());
            }
        }
    }
    v.sort_by_key(|p| std::cmp::Reverse(p.chars().filter(|&c| c == '_').count()));
    v
}

/// Greedy cover of the triples where `val` is defined by patterns on which
/// `val` is constant.
fn cover<T: PartialEq>(val: &dyn Fn(ProfileTriple) -> Option<T>) -> Vec<(String, ProfileTriple)> {
    let mut covered = [false; ProfileTriple::COUNT];
    let mut out = Vec::new();
    for pat in patterns() {
        let ts = expand_pattern(&pat).expect("valid pattern");
        if ts.iter().any(|t| covered[t.index()]) {
            continue;
        }
        let Some(first) = val(ts[0]) else { continue };
        if ts.iter().all(|&t| val(t).as_ref() == Some(&first)) {
            ts.iter().for_each(|t| covered[t.index()] = true);
            out.push((pat, ts[0]));
        }
    }
    out
}

fn write_odta_transducer(sigma: &Alphabet, tr: &TreeTransducer, out: &mut String) {
    let t = tr.base();
    let names = t.state_names();
    let _ = writeln!(out, "[sigma]\n{}", sigma.names().join(" "));
    let _ = writeln!(out, "[states]\n{}", names.join(" "));
    let _ = writeln!(out, "[output-alphabet]\n{}", tr.output().names().join(" "));
    let fin: Vec<&str> = t.finals().iter().map(|&q| names[q].as_str()).collect();
    let _ = writeln!(out, "[final]\n{}", fin.join(" "));
    for q in 0..t.num_states() {
        for a in 0..sigma.len() {
            for (pat, p) in cover(&|p| t.horizontal(q, profile_symbol_index(a, p))) {
                let _ = writeln!(out, "[horiz {} {}/{pat}]", names[q], sigma.name(a));
                let m = t.horizontal(q, profile_symbol_index(a, p)).expect("covered");
                write_nfa_body(m, &|&s| names[s].clone(), out);
            }
        }
    }
    out.push_str("[output]\n");
    for q in 0..t.num_states() {
        for a in 0..sigma.len() {
            let outs = |p| {
                let o = tr.outputs(q, profile_symbol_index(a, p));
                (!o.is_empty()).then_some(o)
            };
            for (pat, p) in cover(&outs) {
                let bs: Vec<&str> = outs(p).expect("covered").iter().map(|&b| tr.output().name(b)).collect();
                let _ = writeln!(out, "{} {}/{pat} -> {}", names[q], sigma.name(a), bs.join(" "));
            }
        }
    }
}

fn write_tail(gamma: &Alphabet, m: &Nfa<LabelSet>, g0: LabelSet, out: &mut String) {
    let g: Vec<&str> = g0.iter().map(|i| gamma.name(i)).collect();
    let _ = writeln!(out, "[gamma0]\n{}", g.join(" "));
    out.push_str("[value-automaton]\n");
    write_nfa_body(m, &|&s| gamma.render_set(s), out);
}

/// Canonical text of a bundle; `parse_bundle` inverts it. Extended bundles
/// with quantified variables or non-linear structure in ξ are rejected.
pub fn write_bundle(b: &Bundle) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "[kind]\n{}", b.kind());
    match b {
        Bundle::Weak(w) => {
            write_transducer_sections(w.transducer(), &mut out);
            write_tail(w.output(), w.value_automaton(), w.gamma0(), &mut out);
        }
        Bundle::Extended(e) => {
            let xi = &e.xi;
            if (0..xi.num_vars()).any(|v| xi.is_quantified(v)) {
                return Err(Error::Invalid("bundle constraints cannot hold quantified variables".into()));
            }
            if xi.body().iter().any(|f| !matches!(f, Formula::Atom(_))) {
                return Err(Error::Invalid("bundle constraints must be a conjunction of linear atoms".into()));
            }
            let w = &e.base;
            write_transducer_sections(w.transducer(), &mut out);
            write_tail(w.output(), w.value_automaton(), w.gamma0(), &mut out);
            out.push_str("[presburger]\n");
            if xi.num_vars() > 0 {
                let ks: Vec<String> = xi.keys().iter().map(Key::render).collect();
                let _ = writeln!(out, "keys: {}", ks.join(" "));
            }
            out.push_str(&xi.render());
        }
        Bundle::Odta(o) => {
            write_odta_transducer(o.sigma(), o.transducer(), &mut out);
            write_tail(o.output(), o.value_automaton(), o.gamma0(), &mut out);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odta::fixtures;

    fn roundtrip(b: &Bundle) {
        let s = write_bundle(b).unwrap();
        let p = parse_bundle(&s).unwrap();
        assert_eq!(&p, b, "{s}");
        assert_eq!(write_bundle(&p).unwrap(), s);
    }

    #[test]
    fn fixtures_roundtrip() {
        let sigma = Alphabet::new(["a", "b"]).unwrap();
        roundtrip(&Bundle::Weak(fixtures::descending_pair_weak()));
        roundtrip(&Bundle::Odta(fixtures::descending_pair()));
        roundtrip(&Bundle::Odta(fixtures::class_size(&sigma, &["a", "b"], 2).unwrap()));
        roundtrip(&Bundle::Odta(fixtures::distinct_with_max()));
    }

    #[test]
    fn distinct_with_max_is_compact() {
        let s = write_bundle(&Bundle::Odta(fixtures::distinct_with_max())).unwrap();
        assert!(s.contains("[horiz q0 a/___]"), "{s}");
        assert!(s.contains("a/_D_ -> alpha"), "{s}");
        assert_eq!(s.matches("[horiz").count(), 2);
    }

    #[test]
    fn extended_roundtrip() {
        let w = fixtures::descending_pair_weak();
        let mut xi = PresburgerFormula::new();
        let names: Vec<String> = w.output().names().to_vec();
        let y = xi.var(Key::symbol(names[0].clone()));
        let z = xi.var(Key::class(w.output().render_set(LabelSet::singleton(0))));
        xi.add(Formula::ge([(z, 1), (y, -2)], -1));
        xi.add(Formula::le([(y, 1)], 4));
        roundtrip(&Bundle::Extended(ExtendedWeakOdta::new(w, xi).unwrap()));
    }

    #[test]
    fn rejects_malformed() {
        let good = write_bundle(&Bundle::Odta(fixtures::distinct_with_max())).unwrap();
        assert!(parse_bundle(&good.replace("[sigma]", "[alphabet]")).is_err());
        assert!(parse_bundle(&good.replace("/_D_", "/_X_")).is_err());
        assert!(parse_bundle(&good.replace("[kind]\nodta", "[kind]\nfancy")).is_err());
        assert!(parse_bundle(&format!("{good}[presburger]\nx:a >= 1\n")).is_err());
        assert!(parse_bundle(&good.replace("{alpha}", "{gamma}")).is_err());
        // overlapping patterns define the same block twice
        let dup = good.replacen("[output]", "[horiz q0 a/SSS]\nstates: 1\ninit: 0\nfinal: 0\n[output]", 1);
        assert!(parse_bundle(&dup).is_err());
    }
}

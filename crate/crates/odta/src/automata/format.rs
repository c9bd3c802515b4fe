//! Sectioned text format for word automata, tree automata and transducers.
//!
//! ```text
//! [states]
//! q0 q1
//! [alphabet]
//! a b
//! [output-alphabet]
//! x y
//! [final]
//! q0
//! [horiz q0 a]
//! states: 2
//! init: 0
//! final: 1
//! 0 -> q1 -> 1
//! [output]
//! q0 a -> x
//! ```
//!
//! `#` starts a comment. NFA states are numbered from 0; `states:` may be
//! omitted when every state occurs in a transition or marker line. An
//! `alphabet:` line declares symbols that occur in no transition.

use std::collections::BTreeSet;
use std::fmt::{Debug, Write};

use super::nfa::Nfa;
use super::transducer::TreeTransducer;
use super::tree_automaton::TreeAutomaton;
use crate::data::Alphabet;
use crate::error::{Error, Result};

/// One `[header args]` block with its numbered body lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub line: usize,
    pub header: Vec<String>,
    pub body: Vec<(usize, String)>,
}

impl Section {
    pub fn name(&self) -> &str {
        &self.header[0]
    }

    /// All whitespace-separated tokens of the body.
    pub fn tokens(&self) -> Vec<String> {
        self.body.iter().flat_map(|(_, l)| l.split_whitespace().map(str::to_string)).collect()
    }
}

pub fn sections(text: &str) -> Result<Vec<Section>> {
    let mut out: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        if let Some(h) = l.strip_prefix('[') {
            let h = h.strip_suffix(']').ok_or_else(|| Error::parse(n, "unterminated section header"))?;
            let header: Vec<String> = h.split_whitespace().map(str::to_string).collect();
            if header.is_empty() {
                return Err(Error::parse(n, "empty section header"));
            }
            out.push(Section { line: n, header, body: Vec::new() });
        } else {
            let s = out.last_mut().ok_or_else(|| Error::parse(n, "content before the first section"))?;
            s.body.push((n, l.to_string()));
        }
    }
    Ok(out)
}

fn state_num(tok: &str, line: usize) -> Result<usize> {
    tok.parse().map_err(|_| Error::parse(line, format!("expected an NFA state number, got `{tok}`")))
}

/// Parses an NFA body; `sym` maps a token to a symbol.
pub fn parse_nfa_body<S: Ord + Clone + Debug>(
    body: &[(usize, String)],
    sym: &dyn Fn(&str, usize) -> Result<S>,
) -> Result<Nfa<S>> {
    let mut declared: Option<usize> = None;
    let mut init = Vec::new();
    let mut fin = Vec::new();
    let mut trans = Vec::new();
    let mut alpha = Vec::new();
    for (n, l) in body {
        let n = *n;
        if let Some(r) = l.strip_prefix("states:") {
            declared = Some(r.trim().parse().map_err(|_| Error::parse(n, "bad state count"))?);
        } else if let Some(r) = l.strip_prefix("init:") {
            for t in r.split_whitespace() {
                init.push(state_num(t, n)?);
            }
        } else if let Some(r) = l.strip_prefix("final:") {
            for t in r.split_whitespace() {
                fin.push(state_num(t, n)?);
            }
        } else if let Some(r) = l.strip_prefix("alphabet:") {
            for t in r.split_whitespace() {
                alpha.push(sym(t, n)?);
            }
        } else {
            let parts: Vec<&str> = l.split("->").map(str::trim).collect();
            let [p, s, q] = parts[..] else {
                return Err(Error::parse(n, format!("expected `p -> sym -> p'`, got `{l}`")));
            };
            trans.push((state_num(p, n)?, sym(s, n)?, state_num(q, n)?, n));
        }
    }
    let used = init.iter().chain(&fin).copied().chain(trans.iter().flat_map(|t| [t.0, t.2])).max().map_or(0, |m| m + 1);
    let count = match declared {
        Some(d) if d < used => return Err(Error::parse(body.first().map_or(0, |b| b.0), "state number out of range")),
        Some(d) => d,
        None => used,
    };
    let mut m = Nfa::new(count);
    init.into_iter().for_each(|p| m.set_initial(p));
    fin.into_iter().for_each(|p| m.set_final(p));
    alpha.into_iter().for_each(|s| m.declare_symbol(s));
    for (p, s, q, _) in trans {
        m.add_transition(p, s, q);
    }
    Ok(m)
}

fn join(xs: impl IntoIterator<Item = String>) -> String {
    xs.into_iter().collect::<Vec<_>>().join(" ")
}

pub fn write_nfa_body<S: Ord + Clone + Debug>(m: &Nfa<S>, sym: &dyn Fn(&S) -> String, out: &mut String) {
    write_body(m, sym, true, out)
}

fn write_body<S: Ord + Clone + Debug>(m: &Nfa<S>, sym: &dyn Fn(&S) -> String, extra_line: bool, out: &mut String) {
    let _ = writeln!(out, "states: {}", m.num_states());
    let _ = writeln!(out, "init: {}", join(m.initial().iter().map(|p| p.to_string())));
    let _ = writeln!(out, "final: {}", join(m.finals().iter().map(|p| p.to_string())));
    let used: BTreeSet<&S> = m.transitions().map(|(_, s, _)| s).collect();
    let extra: Vec<String> = m.alphabet().iter().filter(|s| !used.contains(s)).map(sym).collect();
    if extra_line && !extra.is_empty() {
        let _ = writeln!(out, "alphabet: {}", extra.join(" "));
    }
    for (p, s, q) in m.transitions() {
        let _ = writeln!(out, "{p} -> {} -> {q}", sym(s));
    }
}

pub(crate) fn one<'a>(secs: &'a [Section], name: &str) -> Result<Option<&'a Section>> {
    let mut it = secs.iter().filter(|s| s.name() == name);
    let first = it.next();
    if let Some(dup) = it.next() {
        return Err(Error::parse(dup.line, format!("duplicate [{name}] section")));
    }
    Ok(first)
}

pub(crate) fn required<'a>(secs: &'a [Section], name: &str) -> Result<&'a Section> {
    one(secs, name)?.ok_or_else(|| Error::parse(0, format!("missing [{name}] section")))
}

/// Section names handled by [`tree_automaton_from_sections`] and
/// [`transducer_from_sections`].
pub const AUTOMATON_SECTIONS: [&str; 6] = ["states", "alphabet", "output-alphabet", "final", "horiz", "output"];

pub fn tree_automaton_from_sections(secs: &[Section]) -> Result<TreeAutomaton> {
    let st = required(secs, "states")?;
    let states = st.tokens();
    if states.is_empty() {
        return Err(Error::parse(st.line, "no states declared"));
    }
    let alphabet = Alphabet::new(required(secs, "alphabet")?.tokens()).map_err(|e| match e {
        Error::Invalid(m) => Error::parse(0, m),
        e => e,
    })?;
    let mut t = TreeAutomaton::new(states.clone(), alphabet.clone());
    if states.iter().collect::<BTreeSet<_>>().len() != states.len() {
        return Err(Error::parse(st.line, "duplicate state name"));
    }
    let state = |s: &str, n: usize| -> Result<usize> {
        t.state_index(s).ok_or_else(|| Error::parse(n, format!("unknown state `{s}`")))
    };
    let mut finals = Vec::new();
    if let Some(f) = one(secs, "final")? {
        for (n, l) in &f.body {
            for tok in l.split_whitespace() {
                finals.push(state(tok, *n)?);
            }
        }
    }
    let mut horiz = Vec::new();
    for s in secs.iter().filter(|s| s.name() == "horiz") {
        if s.header.len() != 3 {
            return Err(Error::parse(s.line, "expected [horiz q a]"));
        }
        let q = state(&s.header[1], s.line)?;
        let a = alphabet.index(&s.header[2]).ok_or_else(|| Error::parse(s.line, format!("unknown symbol `{}`", s.header[2])))?;
        let m = parse_nfa_body(&s.body, &|tok, n| state(tok, n))?;
        horiz.push((q, a, m, s.line));
    }
    for q in finals {
        t.add_final(q);
    }
    for (q, a, m, line) in horiz {
        if t.horizontal(q, a).is_some() {
            return Err(Error::parse(line, "duplicate horizontal block"));
        }
        t.set_horizontal(q, a, m);
    }
    Ok(t)
}

pub fn transducer_from_sections(secs: &[Section]) -> Result<TreeTransducer> {
    let base = tree_automaton_from_sections(secs)?;
    let output = match one(secs, "output-alphabet")? {
        Some(s) => Alphabet::new(s.tokens()).map_err(|e| Error::parse(s.line, e.to_string()))?,
        None => base.alphabet().clone(),
    };
    let mut tr = TreeTransducer::new(base.clone(), output.clone());
    if let Some(s) = one(secs, "output")? {
        for (n, l) in &s.body {
            let (lhs, rhs) = l.split_once("->").ok_or_else(|| Error::parse(*n, "expected `q a -> b`"))?;
            let qa: Vec<&str> = lhs.split_whitespace().collect();
            let [q, a] = qa[..] else { return Err(Error::parse(*n, "expected `q a -> b`")) };
            let q = base.state_index(q).ok_or_else(|| Error::parse(*n, format!("unknown state `{q}`")))?;
            let a = base.alphabet().index(a).ok_or_else(|| Error::parse(*n, format!("unknown symbol `{a}`")))?;
            for b in rhs.split_whitespace() {
                let b = output.index(b).ok_or_else(|| Error::parse(*n, format!("unknown output symbol `{b}`")))?;
                tr.add_output(q, a, b);
            }
        }
    }
    Ok(tr)
}

pub(crate) fn check_known(secs: &[Section], extra: &[&str]) -> Result<()> {
    for s in secs {
        if !AUTOMATON_SECTIONS.contains(&s.name()) && !extra.contains(&s.name()) {
            return Err(Error::parse(s.line, format!("unknown section [{}]", s.name())));
        }
    }
    Ok(())
}

pub fn parse_tree_automaton(text: &str) -> Result<TreeAutomaton> {
    let secs = sections(text)?;
    check_known(&secs, &[])?;
    tree_automaton_from_sections(&secs)
}

pub fn parse_transducer(text: &str) -> Result<TreeTransducer> {
    let secs = sections(text)?;
    check_known(&secs, &[])?;
    transducer_from_sections(&secs)
}

/// Parses a standalone word automaton: an `[alphabet]` section (optional)
/// and an `[nfa]` section holding the NFA body.
pub fn parse_nfa(text: &str) -> Result<Nfa<String>> {
    let secs = sections(text)?;
    let body = required(&secs, "nfa")?;
    let allowed: Option<BTreeSet<String>> = one(&secs, "alphabet")?.map(|s| s.tokens().into_iter().collect());
    let mut m = parse_nfa_body(&body.body, &|t, n| {
        if allowed.as_ref().is_some_and(|a| !a.contains(t)) {
            return Err(Error::parse(n, format!("unknown symbol `{t}`")));
        }
        Ok(t.to_string())
    })?;
    if let Some(a) = allowed {
        a.into_iter().for_each(|s| m.declare_symbol(s));
    }
    Ok(m)
}

pub fn write_nfa(m: &Nfa<String>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "[alphabet]\n{}", join(m.alphabet().iter().cloned()));
    s.push_str("[nfa]\n");
    write_body(m, &|x| x.clone(), false, &mut s);
    s
}

pub fn write_tree_automaton_sections(t: &TreeAutomaton, out: &mut String) {
    let _ = writeln!(out, "[states]\n{}", t.state_names().join(" "));
    let _ = writeln!(out, "[alphabet]\n{}", t.alphabet().names().join(" "));
    let _ = writeln!(out, "[final]\n{}", join(t.finals().iter().map(|&q| t.state_names()[q].clone())));
    for (&(q, a), m) in t.horizontals() {
        let _ = writeln!(out, "[horiz {} {}]", t.state_names()[q], t.alphabet().name(a));
        write_nfa_body(m, &|&p| t.state_names()[p].clone(), out);
    }
}

pub fn write_tree_automaton(t: &TreeAutomaton) -> String {
    let mut s = String::new();
    write_tree_automaton_sections(t, &mut s);
    s
}

pub fn write_transducer_sections(tr: &TreeTransducer, out: &mut String) {
    let t = tr.base();
    let _ = writeln!(out, "[states]\n{}", t.state_names().join(" "));
    let _ = writeln!(out, "[alphabet]\n{}", t.alphabet().names().join(" "));
    let _ = writeln!(out, "[output-alphabet]\n{}", tr.output().names().join(" "));
    let _ = writeln!(out, "[final]\n{}", join(t.finals().iter().map(|&q| t.state_names()[q].clone())));
    for (&(q, a), m) in t.horizontals() {
        let _ = writeln!(out, "[horiz {} {}]", t.state_names()[q], t.alphabet().name(a));
        write_nfa_body(m, &|&p| t.state_names()[p].clone(), out);
    }
    out.push_str("[output]\n");
    let mut last: Option<(usize, usize)> = None;
    for (q, a, b) in tr.relation() {
        if last == Some((q, a)) {
            let _ = write!(out, " {}", tr.output().name(b));
        } else {
            if last.is_some() {
                out.push('\n');
            }
            let _ = write!(out, "{} {} -> {}", t.state_names()[q], t.alphabet().name(a), tr.output().name(b));
        }
        last = Some((q, a));
    }
    if last.is_some() {
        out.push('\n');
    }
}

pub fn write_transducer(tr: &TreeTransducer) -> String {
    let mut s = String::new();
    write_transducer_sections(tr, &mut s);
    s
}

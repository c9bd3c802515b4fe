//! Data terms, set and linear constraints, and the constraints file.
//!
//! ```text
//! key(a)
//! incl(a, b)
//! set: V(a) & !V(b) = empty
//! set: V(a) | V(c) != empty
//! lin: x:a - xs:{a} = 0
//! ```
//!
//! `x:a` counts a-nodes and `xs:{a,b}` counts the values whose label set is
//! exactly {a,b}.

use std::collections::BTreeSet;

use crate::data::{value_classes, Alphabet, DataTree, LabelSet};
use crate::error::{Error, Result};
use crate::presburger::{Cmp, Family, PresburgerFormula};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataTerm {
    V(usize),
    Union(Box<DataTerm>, Box<DataTerm>),
    Inter(Box<DataTerm>, Box<DataTerm>),
    Compl(Box<DataTerm>),
}

impl DataTerm {
    pub fn union(a: DataTerm, b: DataTerm) -> Self {
        DataTerm::Union(Box::new(a), Box::new(b))
    }

    pub fn inter(a: DataTerm, b: DataTerm) -> Self {
        DataTerm::Inter(Box::new(a), Box::new(b))
    }

    pub fn compl(a: DataTerm) -> Self {
        DataTerm::Compl(Box::new(a))
    }

    /// ⟦τ⟧_t computed directly from the tree.
    pub fn eval<V: Clone + Ord>(&self, t: &DataTree<V>, sigma: &Alphabet) -> Result<BTreeSet<V>> {
        Ok(match self {
            DataTerm::V(a) => match t.alphabet().index(sigma.name(*a)) {
                Some(i) => t.values_of(i),
                None => BTreeSet::new(),
            },
            DataTerm::Union(x, y) => x.eval(t, sigma)?.union(&y.eval(t, sigma)?).cloned().collect(),
            DataTerm::Inter(x, y) => x.eval(t, sigma)?.intersection(&y.eval(t, sigma)?).cloned().collect(),
            DataTerm::Compl(x) => t.value_set().difference(&x.eval(t, sigma)?).cloned().collect(),
        })
    }

    pub fn render(&self, sigma: &Alphabet) -> String {
        match self {
            DataTerm::V(a) => format!("V({})", sigma.name(*a)),
            DataTerm::Union(x, y) => format!("({} | {})", x.render(sigma), y.render(sigma)),
            DataTerm::Inter(x, y) => format!("({} & {})", x.render(sigma), y.render(sigma)),
            DataTerm::Compl(x) => format!("!{}", x.render(sigma)),
        }
    }

    fn check(&self, sigma: &Alphabet) -> Result<()> {
        match self {
            DataTerm::V(a) if *a < sigma.len() => Ok(()),
            DataTerm::V(a) => Err(Error::Invalid(format!("term symbol {a} outside the alphabet"))),
            DataTerm::Union(x, y) | DataTerm::Inter(x, y) => x.check(sigma).and(y.check(sigma)),
            DataTerm::Compl(x) => x.check(sigma),
        }
    }
}

/// Largest alphabet for which subset families are materialized.
pub const MAX_FAMILY_SIGMA: usize = 16;

/// 𝕊(τ): the nonempty S ⊆ Σ with [S]_t ⊆ ⟦τ⟧_t for every t. The empty set
/// is left out since [∅]_t is always empty.
pub fn sterm_family(tau: &DataTerm, sigma: &Alphabet) -> Result<BTreeSet<LabelSet>> {
    tau.check(sigma)?;
    if sigma.len() > MAX_FAMILY_SIGMA {
        return Err(Error::CapExceeded(format!("2^|Σ| with |Σ| = {} > {MAX_FAMILY_SIGMA}", sigma.len())));
    }
    Ok(sigma.nonempty_subsets().filter(|&s| in_family(tau, s)).collect())
}

/// Membership of S in 𝕊(τ), without materializing the family.
pub fn in_family(tau: &DataTerm, s: LabelSet) -> bool {
    match tau {
        DataTerm::V(a) => s.contains(*a),
        DataTerm::Union(x, y) => in_family(x, s) || in_family(y, s),
        DataTerm::Inter(x, y) => in_family(x, s) && in_family(y, s),
        DataTerm::Compl(x) => !in_family(x, s),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrityConstraint {
    Key(usize),
    Inclusion(usize, usize),
}

impl IntegrityConstraint {
    pub fn holds<V: Clone + Ord>(&self, t: &DataTree<V>, sigma: &Alphabet) -> bool {
        let idx = |a: usize| t.alphabet().index(sigma.name(a));
        match *self {
            IntegrityConstraint::Key(a) => match idx(a) {
                Some(i) => t.values_of(i).len() == t.count_label(i),
                None => true,
            },
            IntegrityConstraint::Inclusion(a, b) => {
                let va = idx(a).map(|i| t.values_of(i)).unwrap_or_default();
                let vb = idx(b).map(|i| t.values_of(i)).unwrap_or_default();
                va.is_subset(&vb)
            }
        }
    }
}

/// τ = ∅ when `empty`, τ ≠ ∅ otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SetConstraint {
    pub term: DataTerm,
    pub empty: bool,
}

impl SetConstraint {
    pub fn holds<V: Clone + Ord>(&self, t: &DataTree<V>, sigma: &Alphabet) -> Result<bool> {
        Ok(self.term.eval(t, sigma)?.is_empty() == self.empty)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LinVar {
    /// x_a: number of a-nodes.
    Count(usize),
    /// z_S: |[S]_t|.
    Class(LabelSet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub terms: Vec<(LinVar, i64)>,
    pub cmp: Cmp,
    pub rhs: i64,
}

impl LinearConstraint {
    pub fn holds<V: Clone + Ord>(&self, t: &DataTree<V>, sigma: &Alphabet) -> bool {
        let classes = value_classes(t);
        let mut acc: i128 = 0;
        for &(v, c) in &self.terms {
            let n = match v {
                LinVar::Count(a) => t.alphabet().index(sigma.name(a)).map_or(0, |i| t.count_label(i)),
                LinVar::Class(s) => {
                    // class sets are over t's alphabet
                    let names: Vec<&str> = s.iter().map(|i| sigma.name(i)).collect();
                    match t.alphabet().set_from_names(names) {
                        Ok(ts) => classes.get(&ts).map_or(0, BTreeSet::len),
                        Err(_) => 0,
                    }
                }
            };
            acc += c as i128 * n as i128;
        }
        let r = self.rhs as i128;
        match self.cmp {
            Cmp::Eq => acc == r,
            Cmp::Le => acc <= r,
            Cmp::Ge => acc >= r,
        }
    }

    pub fn render(&self, sigma: &Alphabet) -> String {
        let mut s = String::new();
        if self.terms.is_empty() {
            s.push('0');
        }
        for (i, &(v, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                s.push_str(if c < 0 { " - " } else { " + " });
            } else if c < 0 {
                s.push('-');
            }
            if c.unsigned_abs() != 1 {
                s.push_str(&format!("{}*", c.unsigned_abs()));
            }
            match v {
                LinVar::Count(a) => s.push_str(&format!("x:{}", sigma.name(a))),
                LinVar::Class(set) => s.push_str(&format!("xs:{}", sigma.render_set(set))),
            }
        }
        format!("{s} {} {}", self.cmp.symbol(), self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    Integrity(IntegrityConstraint),
    Set(SetConstraint),
    Linear(LinearConstraint),
}

impl Constraint {
    pub fn holds<V: Clone + Ord>(&self, t: &DataTree<V>, sigma: &Alphabet) -> Result<bool> {
        match self {
            Constraint::Integrity(c) => Ok(c.holds(t, sigma)),
            Constraint::Set(c) => c.holds(t, sigma),
            Constraint::Linear(c) => Ok(c.holds(t, sigma)),
        }
    }

    pub fn render(&self, sigma: &Alphabet) -> String {
        match self {
            Constraint::Integrity(IntegrityConstraint::Key(a)) => format!("key({})", sigma.name(*a)),
            Constraint::Integrity(IntegrityConstraint::Inclusion(a, b)) => {
                format!("incl({}, {})", sigma.name(*a), sigma.name(*b))
            }
            Constraint::Set(c) => format!("set: {} {} empty", c.term.render(sigma), if c.empty { "=" } else { "!=" }),
            Constraint::Linear(c) => format!("lin: {}", c.render(sigma)),
        }
    }
}

struct TermParser<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
    sigma: &'a Alphabet,
}

impl TermParser<'_> {
    fn skip(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::parse(self.line, format!("{msg} at column {}", self.pos + 1))
    }

    fn union(&mut self) -> Result<DataTerm> {
        let mut t = self.inter()?;
        while self.eat(b'|') {
            t = DataTerm::union(t, self.inter()?);
        }
        Ok(t)
    }

    fn inter(&mut self) -> Result<DataTerm> {
        let mut t = self.unary()?;
        while self.eat(b'&') {
            t = DataTerm::inter(t, self.unary()?);
        }
        Ok(t)
    }

    fn unary(&mut self) -> Result<DataTerm> {
        if self.eat(b'!') {
            return Ok(DataTerm::compl(self.unary()?));
        }
        if self.eat(b'(') {
            let t = self.union()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(t);
        }
        if self.eat(b'V') {
            if !self.eat(b'(') {
                return Err(self.err("expected `(` after V"));
            }
            self.skip();
            let start = self.pos;
            while self.pos < self.s.len() && !matches!(self.s[self.pos], b')' | b' ' | b'\t') {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.s[start..self.pos]).map_err(|_| self.err("bad symbol"))?;
            let a = self.sigma.index(name).ok_or_else(|| Error::parse(self.line, format!("unknown symbol `{name}`")))?;
            if !self.eat(b')') {
                return Err(self.err("expected `)`"));
            }
            return Ok(DataTerm::V(a));
        }
        Err(self.err("expected V(a), `!` or `(`"))
    }
}

pub fn parse_term(text: &str, sigma: &Alphabet, line: usize) -> Result<DataTerm> {
    let mut p = TermParser { s: text.as_bytes(), pos: 0, line, sigma };
    let t = p.union()?;
    p.skip();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(t)
}

fn parse_linear(text: &str, sigma: &Alphabet, line: usize) -> Result<LinearConstraint> {
    let mut f = PresburgerFormula::new();
    let l = f.parse_linear(text, line)?;
    let mut terms = Vec::new();
    for &(v, c) in &l.terms {
        let k = &f.keys()[v];
        let var = match k.family {
            Family::Symbol => LinVar::Count(sigma.index(&k.name).ok_or_else(|| Error::parse(line, format!("unknown symbol `{}`", k.name)))?),
            Family::Class => {
                let s = sigma.parse_set(&k.name).map_err(|e| Error::parse(line, e.to_string()))?;
                if s.is_empty() {
                    return Err(Error::parse(line, "xs:{} is not a class"));
                }
                LinVar::Class(s)
            }
            _ => return Err(Error::parse(line, format!("`{k}` is neither x:a nor xs:{{..}}"))),
        };
        terms.push((var, c));
    }
    terms.sort();
    Ok(LinearConstraint { terms, cmp: l.cmp, rhs: l.rhs })
}

fn two_args(inner: &str, line: usize) -> Result<(&str, &str)> {
    let (a, b) = inner.split_once(',').ok_or_else(|| Error::parse(line, "expected two arguments"))?;
    Ok((a.trim(), b.trim()))
}

/// Parses a constraints file over `sigma`; `#` starts a comment.
pub fn parse_constraints(text: &str, sigma: &Alphabet) -> Result<Vec<Constraint>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let sym = |s: &str| sigma.index(s).ok_or_else(|| Error::parse(n, format!("unknown symbol `{s}`")));
        let call = |name: &str| -> Option<&str> { l.strip_prefix(name)?.trim_start().strip_prefix('(')?.strip_suffix(')') };
        if let Some(inner) = call("key") {
            out.push(Constraint::Integrity(IntegrityConstraint::Key(sym(inner.trim())?)));
        } else if let Some(inner) = call("incl") {
            let (a, b) = two_args(inner, n)?;
            out.push(Constraint::Integrity(IntegrityConstraint::Inclusion(sym(a)?, sym(b)?)));
        } else if let Some(r) = l.strip_prefix("set:") {
            let (lhs, empty) = if let Some(x) = r.trim().strip_suffix("empty") {
                let x = x.trim_end();
                if let Some(y) = x.strip_suffix("!=") {
                    (y, false)
                } else if let Some(y) = x.strip_suffix('=') {
                    (y, true)
                } else {
                    return Err(Error::parse(n, "expected `= empty` or `!= empty`"));
                }
            } else {
                return Err(Error::parse(n, "expected `= empty` or `!= empty`"));
            };
            out.push(Constraint::Set(SetConstraint { term: parse_term(lhs, sigma, n)?, empty }));
        } else if let Some(r) = l.strip_prefix("lin:") {
            out.push(Constraint::Linear(parse_linear(r, sigma, n)?));
        } else {
            return Err(Error::parse(n, format!("unrecognized constraint `{l}`")));
        }
    }
    Ok(out)
}

pub fn write_constraints(cs: &[Constraint], sigma: &Alphabet) -> String {
    cs.iter().map(|c| c.render(sigma) + "\n").collect()
}

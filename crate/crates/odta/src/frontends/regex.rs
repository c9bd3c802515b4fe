//! Regular expressions over named symbols, compiled to ε-free NFAs by the
//! position (Glushkov) construction.
//!
//! Surface syntax: symbol names, `|`, postfix `*` `+` `?`, parentheses and
//! concatenation by juxtaposition. Commas and whitespace separate names.
//! An empty expression or `()` denotes the empty word.

use crate::automata::Nfa;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regex {
    Epsilon,
    Sym(usize),
    Cat(Vec<Regex>),
    Alt(Vec<Regex>),
    Star(Box<Regex>),
    Plus(Box<Regex>),
    Opt(Box<Regex>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Name(String),
    Bar,
    Star,
    Plus,
    Quest,
    Open,
    Close,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':')
}

fn lex(s: &str, line: usize) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut it = s.chars().peekable();
    while let Some(&c) = it.peek() {
        match c {
            c if c.is_whitespace() || c == ',' => {
                it.next();
            }
            '|' => {
                it.next();
                out.push(Tok::Bar);
            }
            '*' => {
                it.next();
                out.push(Tok::Star);
            }
            '+' => {
                it.next();
                out.push(Tok::Plus);
            }
            '?' => {
                it.next();
                out.push(Tok::Quest);
            }
            '(' => {
                it.next();
                out.push(Tok::Open);
            }
            ')' => {
                it.next();
                out.push(Tok::Close);
            }
            c if is_name_char(c) => {
                let mut n = String::new();
                while let Some(&c) = it.peek() {
                    if !is_name_char(c) {
                        break;
                    }
                    n.push(c);
                    it.next();
                }
                out.push(Tok::Name(n));
            }
            c => return Err(Error::parse(line, format!("unexpected character `{c}` in expression"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    line: usize,
    sym: &'a mut dyn FnMut(&str) -> Result<usize>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn alt(&mut self) -> Result<Regex> {
        let mut parts = vec![self.cat()?];
        while self.peek() == Some(&Tok::Bar) {
            self.pos += 1;
            parts.push(self.cat()?);
        }
        Ok(if parts.len() == 1 { parts.pop().expect("one") } else { Regex::Alt(parts) })
    }

    fn cat(&mut self) -> Result<Regex> {
        let mut parts = Vec::new();
        while matches!(self.peek(), Some(Tok::Name(_) | Tok::Open)) {
            parts.push(self.post()?);
        }
        Ok(match parts.len() {
            0 => Regex::Epsilon,
            1 => parts.pop().expect("one"),
            _ => Regex::Cat(parts),
        })
    }

    fn post(&mut self) -> Result<Regex> {
        let mut r = self.atom()?;
        loop {
            r = match self.peek() {
                Some(Tok::Star) => Regex::Star(Box::new(r)),
                Some(Tok::Plus) => Regex::Plus(Box::new(r)),
                Some(Tok::Quest) => Regex::Opt(Box::new(r)),
                _ => return Ok(r),
            };
            self.pos += 1;
        }
    }

    fn atom(&mut self) -> Result<Regex> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Name(n)) => {
                self.pos += 1;
                Ok(Regex::Sym((self.sym)(&n)?))
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let r = self.alt()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(Error::parse(self.line, "missing `)`"));
                }
                self.pos += 1;
                Ok(r)
            }
            _ => Err(Error::parse(self.line, "expected a symbol or `(`")),
        }
    }
}

/// Parses `text`; `sym` resolves (or declares) symbol names.
pub fn parse_regex(text: &str, line: usize, sym: &mut dyn FnMut(&str) -> Result<usize>) -> Result<Regex> {
    let toks = lex(text, line)?;
    let mut p = Parser { toks, pos: 0, line, sym };
    let r = p.alt()?;
    if p.pos != p.toks.len() {
        return Err(Error::parse(line, "unbalanced `)` or stray operator"));
    }
    Ok(r)
}

struct Glushkov {
    syms: Vec<usize>,
    follow: Vec<Vec<usize>>,
}

/// (nullable, first, last) of `r`, numbering positions into `g`.
fn positions(re: &Regex, g: &mut Glushkov) -> (bool, Vec<usize>, Vec<usize>) {
    match re {
        Regex::Epsilon => (true, vec![], vec![]),
        Regex::Sym(a) => {
            let p = g.syms.len();
            g.syms.push(*a);
            g.follow.push(Vec::new());
            (false, vec![p], vec![p])
        }
        Regex::Cat(parts) => {
            let (mut null, mut first, mut last): (bool, Vec<usize>, Vec<usize>) = (true, Vec::new(), Vec::new());
            for part in parts {
                let (n2, f2, l2) = positions(part, g);
                for &l in &last {
                    g.follow[l].extend(&f2);
                }
                if null {
                    first.extend(&f2);
                }
                if n2 {
                    last.extend(l2);
                } else {
                    last = l2;
                }
                null &= n2;
            }
            (null, first, last)
        }
        Regex::Alt(parts) => {
            let (mut null, mut first, mut last) = (false, Vec::new(), Vec::new());
            for part in parts {
                let (n2, f2, l2) = positions(part, g);
                null |= n2;
                first.extend(f2);
                last.extend(l2);
            }
            (null, first, last)
        }
        Regex::Star(r) | Regex::Plus(r) => {
            let (n, f, l) = positions(r, g);
            for &x in &l {
                g.follow[x].extend(&f);
            }
            (n || matches!(re, Regex::Star(_)), f, l)
        }
        Regex::Opt(r) => {
            let (_, f, l) = positions(r, g);
            (true, f, l)
        }
    }
}

impl Regex {
    pub fn nullable(&self) -> bool {
        match self {
            Regex::Epsilon | Regex::Star(_) | Regex::Opt(_) => true,
            Regex::Sym(_) => false,
            Regex::Cat(v) => v.iter().all(Regex::nullable),
            Regex::Alt(v) => v.iter().any(Regex::nullable),
            Regex::Plus(r) => r.nullable(),
        }
    }

    /// ε-free NFA over symbol indices; state 0 is initial, state i+1
    /// stands for position i.
    pub fn to_nfa(&self) -> Nfa<usize> {
        let mut g = Glushkov { syms: Vec::new(), follow: Vec::new() };
        let (_, first, last) = positions(self, &mut g);
        let mut m = Nfa::new(g.syms.len() + 1);
        m.set_initial(0);
        if self.nullable() {
            m.set_final(0);
        }
        for &p in &last {
            m.set_final(p + 1);
        }
        for &p in &first {
            m.add_transition(0, g.syms[p], p + 1);
        }
        for (p, fs) in g.follow.iter().enumerate() {
            for &q in fs {
                m.add_transition(p + 1, g.syms[q], q + 1);
            }
        }
        m
    }

    /// Direct membership test, used as an oracle for the compiled NFA.
    pub fn matches(&self, w: &[usize]) -> bool {
        fn ends(r: &Regex, w: &[usize], i: usize) -> Vec<usize> {
            let mut out = match r {
                Regex::Epsilon => vec![i],
                Regex::Sym(a) => {
                    if w.get(i) == Some(a) {
                        vec![i + 1]
                    } else {
                        vec![]
                    }
                }
                Regex::Cat(v) => {
                    let mut cur = vec![i];
                    for part in v {
                        let mut next: Vec<usize> = cur.iter().flat_map(|&j| ends(part, w, j)).collect();
                        next.sort_unstable();
                        next.dedup();
                        cur = next;
                    }
                    cur
                }
                Regex::Alt(v) => v.iter().flat_map(|part| ends(part, w, i)).collect(),
                Regex::Opt(r) => {
                    let mut v = ends(r, w, i);
                    v.push(i);
                    v
                }
                Regex::Star(r) | Regex::Plus(r) => {
                    let mut seen = vec![false; w.len() + 1];
                    let mut stack = ends(r, w, i);
                    let mut v = Vec::new();
                    while let Some(j) = stack.pop() {
                        if !seen[j] {
                            seen[j] = true;
                            v.push(j);
                            stack.extend(ends(r, w, j));
                        }
                    }
                    v
                }
            };
            if let Regex::Star(_) = r {
                out.push(i);
            }
            out.sort_unstable();
            out.dedup();
            out
        }
        ends(self, w, 0).contains(&w.len())
    }
}

impl Regex {
    /// Text form accepted by [`parse_regex`].
    pub fn render(&self, names: &dyn Fn(usize) -> String) -> String {
        fn go(r: &Regex, names: &dyn Fn(usize) -> String, prec: u8, out: &mut String) {
            // prec: 0 alternation, 1 concatenation, 2 postfix operand
            match r {
                Regex::Epsilon => out.push_str("()"),
                Regex::Sym(a) => out.push_str(&names(*a)),
                Regex::Cat(v) | Regex::Alt(v) => {
                    let (mine, sep) = if matches!(r, Regex::Alt(_)) { (0, " | ") } else { (1, " ") };
                    if prec > mine {
                        out.push('(');
                    }
                    for (i, x) in v.iter().enumerate() {
                        if i > 0 {
                            out.push_str(sep);
                        }
                        go(x, names, mine + 1, out);
                    }
                    if prec > mine {
                        out.push(')');
                    }
                }
                Regex::Star(x) | Regex::Plus(x) | Regex::Opt(x) => {
                    go(x, names, 2, out);
                    out.push(match r {
                        Regex::Star(_) => '*',
                        Regex::Plus(_) => '+',
                        _ => '?',
                    });
                }
            }
        }
        let mut s = String::new();
        go(self, names, 0, &mut s);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Regex {
        let names = ["a", "b", "c"];
        parse_regex(s, 1, &mut |n| names.iter().position(|&x| x == n).ok_or(Error::UnknownSymbol(n.into()))).unwrap()
    }

    #[test]
    fn compiled_nfa_agrees_with_matcher() {
        let words: Vec<Vec<usize>> = (0..=4usize)
            .flat_map(|n| {
                (0..3usize.pow(n as u32)).map(move |mut k| {
                    (0..n)
                        .map(|_| {
                            let d = k % 3;
                            k /= 3;
                            d
                        })
                        .collect()
                })
            })
            .collect();
        for e in ["a b*", "(a|b)+ c?", "", "()", "a* b a*", "(a b | c)* a", "((a?)*)+", "a, b, c", "(a|)(b|)"] {
            let r = parse(e);
            let mut m = r.to_nfa();
            (0..3).for_each(|a| m.declare_symbol(a));
            for w in &words {
                assert_eq!(m.member(w).unwrap(), r.matches(w), "{e} on {w:?}");
            }
            let back = parse(&r.render(&|i| ["a", "b", "c"][i].to_string()));
            assert_eq!(back.matches(&[0, 1]), r.matches(&[0, 1]));
            assert_eq!(back.nullable(), r.nullable());
        }
    }

    #[test]
    fn malformed() {
        let mut f = |n: &str| if n == "a" { Ok(0) } else { Err(Error::UnknownSymbol(n.into())) };
        for e in ["(a", "a)", "*", "a | | (", "z", "a $"] {
            assert!(parse_regex(e, 1, &mut f).is_err(), "{e}");
        }
    }
}

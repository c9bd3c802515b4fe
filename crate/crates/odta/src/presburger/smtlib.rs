//! SMT-LIB v2 export of formulas and import of models, with a key map
//! sidecar so that variable keys survive the round trip.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::formula::{Assignment, Cmp, Formula, Linear, PresburgerFormula};
use super::key::Key;
use crate::error::{Error, Result};

fn sanitize(k: &Key, i: usize) -> String {
    let body: String = k.render().chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    format!("k{i}_{body}")
}

fn num(v: i64) -> String {
    if v < 0 {
        format!("(- {})", v.unsigned_abs())
    } else {
        v.to_string()
    }
}

fn write_formula(f: &Formula, names: &[String], out: &mut String) {
    match f {
        Formula::Atom(l) => {
            let op = match l.cmp {
                Cmp::Eq => "=",
                Cmp::Le => "<=",
                Cmp::Ge => ">=",
            };
            let sum = match l.terms.len() {
                0 => "0".to_string(),
                _ => {
                    let ts: Vec<String> = l.terms.iter().map(|&(v, c)| format!("(* {} {})", num(c), names[v])).collect();
                    if ts.len() == 1 {
                        ts[0].clone()
                    } else {
                        format!("(+ {})", ts.join(" "))
                    }
                }
            };
            let _ = write!(out, "({op} {sum} {})", num(l.rhs));
        }
        Formula::And(v) | Formula::Or(v) => {
            let and = matches!(f, Formula::And(_));
            if v.is_empty() {
                out.push_str(if and { "true" } else { "false" });
                return;
            }
            out.push_str(if and { "(and" } else { "(or" });
            for g in v {
                out.push(' ');
                write_formula(g, names, out);
            }
            out.push(')');
        }
    }
}

/// SMT-LIB script and key map (one `name<TAB>key<TAB>free|exists` per line).
pub fn export(f: &PresburgerFormula) -> (String, String) {
    let names: Vec<String> = f.keys().iter().enumerate().map(|(i, k)| sanitize(k, i)).collect();
    let mut s = String::from("(set-logic QF_LIA)\n");
    let mut map = String::new();
    for (i, n) in names.iter().enumerate() {
        let _ = writeln!(s, "(declare-const {n} Int)");
        let _ = writeln!(map, "{n}\t{}\t{}", f.keys()[i].render(), if f.is_quantified(i) { "exists" } else { "free" });
    }
    for n in &names {
        let _ = writeln!(s, "(assert (>= {n} 0))");
    }
    for g in f.body() {
        s.push_str("(assert ");
        write_formula(g, &names, &mut s);
        s.push_str(")\n");
    }
    s.push_str("(check-sat)\n(get-model)\n");
    (s, map)
}

#[derive(Debug, Clone, PartialEq)]
enum Sx {
    Atom(String),
    List(Vec<Sx>),
}

fn parse_sx(text: &str) -> Result<Vec<Sx>> {
    let mut stack: Vec<Vec<Sx>> = vec![Vec::new()];
    let mut line = 1;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '\n' => line += 1,
            ';' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            '(' => stack.push(Vec::new()),
            ')' => {
                let done = stack.pop().ok_or_else(|| Error::parse(line, "unbalanced `)`"))?;
                stack.last_mut().ok_or_else(|| Error::parse(line, "unbalanced `)`"))?.push(Sx::List(done));
            }
            c if c.is_whitespace() => {}
            c => {
                let mut tok = String::from(c);
                while chars.peek().is_some_and(|&c| !c.is_whitespace() && c != '(' && c != ')') {
                    tok.push(chars.next().expect("peeked"));
                }
                stack.last_mut().expect("nonempty").push(Sx::Atom(tok));
            }
        }
    }
    if stack.len() != 1 {
        return Err(Error::parse(line, "unbalanced `(`"));
    }
    Ok(stack.pop().expect("one"))
}

/// Parses a key map produced by [`export`].
pub fn parse_key_map(map: &str) -> Result<Vec<(String, Key, bool)>> {
    let mut out = Vec::new();
    for (i, l) in map.lines().enumerate() {
        if l.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = l.split('\t').collect();
        let [n, k, q] = parts[..] else { return Err(Error::parse(i + 1, "expected three tab-separated fields")) };
        let key = Key::parse(k).ok_or_else(|| Error::parse(i + 1, format!("bad key `{k}`")))?;
        let quantified = match q {
            "exists" => true,
            "free" => false,
            _ => return Err(Error::parse(i + 1, format!("bad binder `{q}`"))),
        };
        out.push((n.to_string(), key, quantified));
    }
    Ok(out)
}

fn int(s: &Sx) -> Result<i64> {
    match s {
        Sx::Atom(a) => a.parse().map_err(|_| Error::parse(0, format!("bad integer `{a}`"))),
        Sx::List(v) if v.len() == 2 && v[0] == Sx::Atom("-".into()) => Ok(-int(&v[1])?),
        _ => Err(Error::parse(0, "expected an integer")),
    }
}

fn term(s: &Sx, idx: &BTreeMap<String, usize>, out: &mut Vec<(usize, i64)>) -> Result<()> {
    let var = |a: &str| idx.get(a).copied().ok_or_else(|| Error::UnknownSymbol(a.to_string()));
    match s {
        Sx::Atom(a) if a == "0" => Ok(()),
        Sx::Atom(a) => {
            out.push((var(a)?, 1));
            Ok(())
        }
        Sx::List(v) => match v.first() {
            Some(Sx::Atom(op)) if op == "+" => v[1..].iter().try_for_each(|t| term(t, idx, out)),
            Some(Sx::Atom(op)) if op == "*" && v.len() == 3 => {
                let Sx::Atom(n) = &v[2] else { return Err(Error::parse(0, "expected a variable")) };
                out.push((var(n)?, int(&v[1])?));
                Ok(())
            }
            _ => Err(Error::parse(0, "unsupported term")),
        },
    }
}

fn formula(s: &Sx, idx: &BTreeMap<String, usize>) -> Result<Formula> {
    match s {
        Sx::Atom(a) if a == "true" => Ok(Formula::truth()),
        Sx::Atom(a) if a == "false" => Ok(Formula::falsity()),
        Sx::List(v) => {
            let Some(Sx::Atom(op)) = v.first() else { return Err(Error::parse(0, "expected an operator")) };
            match op.as_str() {
                "and" => Ok(Formula::And(v[1..].iter().map(|g| formula(g, idx)).collect::<Result<_>>()?)),
                "or" => Ok(Formula::Or(v[1..].iter().map(|g| formula(g, idx)).collect::<Result<_>>()?)),
                "=" | "<=" | ">=" if v.len() == 3 => {
                    let cmp = match op.as_str() {
                        "=" => Cmp::Eq,
                        "<=" => Cmp::Le,
                        _ => Cmp::Ge,
                    };
                    let mut terms = Vec::new();
                    term(&v[1], idx, &mut terms)?;
                    Ok(Formula::Atom(Linear::new(terms, cmp, int(&v[2])?)))
                }
                _ => Err(Error::parse(0, format!("unsupported operator `{op}`"))),
            }
        }
        Sx::Atom(a) => Err(Error::parse(0, format!("unexpected `{a}`"))),
    }
}

/// Reads back a script produced by [`export`].
pub fn import(script: &str, key_map: &str) -> Result<PresburgerFormula> {
    let map = parse_key_map(key_map)?;
    let mut f = PresburgerFormula::new();
    let mut idx = BTreeMap::new();
    for (n, k, q) in &map {
        let v = if *q { f.exists(k.clone()) } else { f.var(k.clone()) };
        idx.insert(n.clone(), v);
    }
    for s in parse_sx(script)? {
        let Sx::List(v) = &s else { continue };
        if v.first() != Some(&Sx::Atom("assert".into())) || v.len() != 2 {
            continue;
        }
        // Non-negativity guards are implicit.
        if let Sx::List(g) = &v[1] {
            if g.len() == 3 && g[0] == Sx::Atom(">=".into()) && g[2] == Sx::Atom("0".into()) {
                if let Sx::Atom(n) = &g[1] {
                    if idx.contains_key(n) {
                        continue;
                    }
                }
            }
        }
        f.add(formula(&v[1], &idx)?);
    }
    Ok(f)
}

/// Reads a `(get-model)` response into an assignment.
pub fn import_model(model: &str, key_map: &str) -> Result<Assignment> {
    let map = parse_key_map(key_map)?;
    let keys: BTreeMap<&str, &Key> = map.iter().map(|(n, k, _)| (n.as_str(), k)).collect();
    let mut out = Assignment::new();
    fn walk(s: &Sx, keys: &BTreeMap<&str, &Key>, out: &mut Assignment) -> Result<()> {
        if let Sx::List(v) = s {
            if v.len() == 5 && v[0] == Sx::Atom("define-fun".into()) {
                if let Sx::Atom(n) = &v[1] {
                    let k = keys.get(n.as_str()).ok_or_else(|| Error::UnknownSymbol(n.clone()))?;
                    let x = int(&v[4])?;
                    let x = u64::try_from(x).map_err(|_| Error::Invalid(format!("negative value for {n}")))?;
                    out.insert((*k).clone(), x);
                }
                return Ok(());
            }
            for c in v {
                walk(c, keys, out)?;
            }
        }
        Ok(())
    }
    for s in parse_sx(model)? {
        walk(&s, &keys, &mut out)?;
    }
    Ok(out)
}

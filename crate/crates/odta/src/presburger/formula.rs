use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;

use super::key::{Family, Key};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cmp {
    Eq,
    Le,
    Ge,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Eq => "=",
            Cmp::Le => "<=",
            Cmp::Ge => ">=",
        }
    }

    fn holds<T: Ord>(self, l: T, r: T) -> bool {
        match self {
            Cmp::Eq => l == r,
            Cmp::Le => l <= r,
            Cmp::Ge => l >= r,
        }
    }
}

/// Σ c_i·v_i ⋈ rhs over variable indices of the owning formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Linear {
    pub terms: Vec<(usize, i64)>,
    pub cmp: Cmp,
    pub rhs: i64,
}

impl Linear {
    /// Merges repeated variables and drops zero coefficients.
    pub fn new(terms: impl IntoIterator<Item = (usize, i64)>, cmp: Cmp, rhs: i64) -> Self {
        let mut m: BTreeMap<usize, i64> = BTreeMap::new();
        for (v, c) in terms {
            *m.entry(v).or_default() += c;
        }
        Linear { terms: m.into_iter().filter(|&(_, c)| c != 0).collect(), cmp, rhs }
    }

    pub fn eval(&self, values: &[u64]) -> bool {
        let mut acc: i128 = 0;
        for &(v, c) in &self.terms {
            match (c as i128).checked_mul(values[v] as i128).and_then(|x| acc.checked_add(x)) {
                Some(s) => acc = s,
                None => return self.eval_big(values),
            }
        }
        self.cmp.holds(acc, self.rhs as i128)
    }

    fn eval_big(&self, values: &[u64]) -> bool {
        let mut acc = BigInt::from(0);
        for &(v, c) in &self.terms {
            acc += BigInt::from(c) * BigInt::from(values[v]);
        }
        self.cmp.holds(acc, BigInt::from(self.rhs))
    }
}

/// Positive ∧/∨ combination of linear atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Linear),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    pub fn truth() -> Self {
        Formula::And(Vec::new())
    }

    pub fn falsity() -> Self {
        Formula::Or(Vec::new())
    }

    pub fn atom(terms: impl IntoIterator<Item = (usize, i64)>, cmp: Cmp, rhs: i64) -> Self {
        Formula::Atom(Linear::new(terms, cmp, rhs))
    }

    pub fn eq(terms: impl IntoIterator<Item = (usize, i64)>, rhs: i64) -> Self {
        Formula::atom(terms, Cmp::Eq, rhs)
    }

    pub fn le(terms: impl IntoIterator<Item = (usize, i64)>, rhs: i64) -> Self {
        Formula::atom(terms, Cmp::Le, rhs)
    }

    pub fn ge(terms: impl IntoIterator<Item = (usize, i64)>, rhs: i64) -> Self {
        Formula::atom(terms, Cmp::Ge, rhs)
    }

    pub fn eval(&self, values: &[u64]) -> bool {
        match self {
            Formula::Atom(l) => l.eval(values),
            Formula::And(v) => v.iter().all(|f| f.eval(values)),
            Formula::Or(v) => v.iter().any(|f| f.eval(values)),
        }
    }

    pub fn atoms(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::And(v) | Formula::Or(v) => v.iter().map(Formula::atoms).sum(),
        }
    }

    fn vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Formula::Atom(l) => out.extend(l.terms.iter().map(|&(v, _)| v)),
            Formula::And(v) | Formula::Or(v) => v.iter().for_each(|f| f.vars(out)),
        }
    }

    pub fn map_vars(&self, f: &dyn Fn(usize) -> usize) -> Formula {
        match self {
            Formula::Atom(l) => Formula::Atom(Linear::new(l.terms.iter().map(|&(v, c)| (f(v), c)), l.cmp, l.rhs)),
            Formula::And(v) => Formula::And(v.iter().map(|g| g.map_vars(f)).collect()),
            Formula::Or(v) => Formula::Or(v.iter().map(|g| g.map_vars(f)).collect()),
        }
    }
}

/// Values of variables by key.
pub type Assignment = BTreeMap<Key, u64>;

/// ∃(quantified) body, all variables ranging over ℕ.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PresburgerFormula {
    keys: Vec<Key>,
    index: HashMap<Key, usize>,
    quantified: BTreeSet<usize>,
    body: Vec<Formula>,
}

impl PresburgerFormula {
    pub fn new() -> Self {
        Self::default()
    }

    /// Index of `key`, declaring it free if new.
    pub fn var(&mut self, key: Key) -> usize {
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        self.index.insert(key.clone(), self.keys.len());
        self.keys.push(key);
        self.keys.len() - 1
    }

    /// Declares an existentially quantified variable.
    pub fn exists(&mut self, key: Key) -> usize {
        let v = self.var(key);
        self.quantified.insert(v);
        v
    }

    pub fn lookup(&self, key: &Key) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn keys(&self) -> &[Key] {
        &self.keys
    }

    pub fn num_vars(&self) -> usize {
        self.keys.len()
    }

    pub fn is_quantified(&self, v: usize) -> bool {
        self.quantified.contains(&v)
    }

    pub fn free_keys(&self) -> Vec<&Key> {
        (0..self.keys.len()).filter(|v| !self.quantified.contains(v)).map(|v| &self.keys[v]).collect()
    }

    pub fn add(&mut self, f: Formula) {
        match f {
            Formula::And(v) => v.into_iter().for_each(|g| self.add(g)),
            g => self.body.push(g),
        }
    }

    pub fn body(&self) -> &[Formula] {
        &self.body
    }

    pub fn num_atoms(&self) -> usize {
        self.body.iter().map(Formula::atoms).sum()
    }

    pub fn eval(&self, values: &[u64]) -> bool {
        self.body.iter().all(|f| f.eval(values))
    }

    /// Evaluates under an assignment, reading missing variables as zero.
    pub fn eval_assignment(&self, a: &Assignment) -> bool {
        let values: Vec<u64> = self.keys.iter().map(|k| a.get(k).copied().unwrap_or(0)).collect();
        self.eval(&values)
    }

    /// Conjunction; free keys are shared, quantified keys of `other` are
    /// renamed when they clash with keys already present.
    pub fn and(&self, other: &PresburgerFormula) -> PresburgerFormula {
        let mut out = self.clone();
        let mut map = vec![0usize; other.keys.len()];
        for (i, k) in other.keys.iter().enumerate() {
            if other.quantified.contains(&i) {
                let mut key = k.clone();
                let mut n = 0;
                while out.index.contains_key(&key) {
                    n += 1;
                    key = Key::new(k.family, format!("{}'{n}", k.name));
                }
                map[i] = out.exists(key);
            } else {
                map[i] = out.var(k.clone());
            }
        }
        for f in &other.body {
            out.body.push(f.map_vars(&|v| map[v]));
        }
        out
    }

    /// Adds `key = value` constraints.
    pub fn pin(&mut self, values: &Assignment) {
        for (k, &v) in values {
            let i = self.var(k.clone());
            let rhs = i64::try_from(v).unwrap_or(i64::MAX);
            self.add(Formula::eq([(i, 1)], rhs));
        }
    }

    /// Variables occurring in the body.
    pub fn used_vars(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for f in &self.body {
            f.vars(&mut s);
        }
        s
    }

    pub fn to_assignment(&self, values: &[u64]) -> Assignment {
        self.keys.iter().cloned().zip(values.iter().copied()).collect()
    }

    pub fn check_keys(&self) -> Result<()> {
        for v in self.used_vars() {
            if v >= self.keys.len() {
                return Err(Error::Invalid(format!("variable {v} undeclared")));
            }
        }
        Ok(())
    }

    /// Human-readable rendering, one conjunct per line.
    pub fn render(&self) -> String {
        fn go(f: &Formula, keys: &[Key], out: &mut String) {
            match f {
                Formula::Atom(l) => {
                    if l.terms.is_empty() {
                        out.push('0');
                    }
                    for (i, &(v, c)) in l.terms.iter().enumerate() {
                        if i > 0 {
                            out.push_str(if c < 0 { " - " } else { " + " });
                        } else if c < 0 {
                            out.push('-');
                        }
                        let a = c.unsigned_abs();
                        if a != 1 {
                            out.push_str(&format!("{a}*"));
                        }
                        out.push_str(&keys[v].render());
                    }
                    out.push_str(&format!(" {} {}", l.cmp.symbol(), l.rhs));
                }
                Formula::And(v) | Formula::Or(v) => {
                    let op = if matches!(f, Formula::And(_)) { " & " } else { " | " };
                    if v.is_empty() {
                        out.push_str(if matches!(f, Formula::And(_)) { "true" } else { "false" });
                        return;
                    }
                    out.push('(');
                    for (i, g) in v.iter().enumerate() {
                        if i > 0 {
                            out.push_str(op);
                        }
                        go(g, keys, out);
                    }
                    out.push(')');
                }
            }
        }
        let mut s = String::new();
        for f in &self.body {
            go(f, &self.keys, &mut s);
            s.push('\n');
        }
        s
    }

    /// Parses one linear constraint as written by [`PresburgerFormula::render`],
    /// e.g. `2*x:a - xs:{a,b} >= 3`, declaring new keys as free variables.
    pub fn parse_linear(&mut self, text: &str, line: usize) -> Result<Linear> {
        let toks: Vec<&str> = text.split_whitespace().collect();
        let pos = toks
            .iter()
            .position(|t| matches!(*t, "=" | "<=" | ">="))
            .ok_or_else(|| Error::parse(line, "expected one of =, <=, >="))?;
        let cmp = match toks[pos] {
            "=" => Cmp::Eq,
            "<=" => Cmp::Le,
            _ => Cmp::Ge,
        };
        let [rhs] = toks[pos + 1..] else { return Err(Error::parse(line, "expected a single integer right-hand side")) };
        let rhs: i64 = rhs.parse().map_err(|_| Error::parse(line, format!("bad right-hand side `{rhs}`")))?;
        let mut terms = Vec::new();
        let mut sign = 1i64;
        let mut expect_term = true;
        for &t in &toks[..pos] {
            if !expect_term {
                sign = match t {
                    "+" => 1,
                    "-" => -1,
                    _ => return Err(Error::parse(line, format!("expected + or -, got `{t}`"))),
                };
                expect_term = true;
                continue;
            }
            let (neg, t) = match t.strip_prefix('-') {
                Some(r) => (-1, r),
                None => (1, t),
            };
            if t == "0" && toks[..pos].len() == 1 {
                expect_term = false;
                continue;
            }
            let (c, k) = match t.split_once('*') {
                Some((c, k)) => (c.parse::<i64>().map_err(|_| Error::parse(line, format!("bad coefficient `{c}`")))?, k),
                None => (1, t),
            };
            let key = Key::parse(k).ok_or_else(|| Error::parse(line, format!("bad variable key `{k}`")))?;
            let v = self.var(key);
            terms.push((v, sign * neg * c));
            expect_term = false;
        }
        if expect_term {
            return Err(Error::parse(line, "missing term"));
        }
        Ok(Linear::new(terms, cmp, rhs))
    }

    /// Keys of one family.
    pub fn keys_of(&self, family: Family) -> Vec<&Key> {
        self.keys.iter().filter(|k| k.family == family).collect()
    }
}

impl fmt::Display for PresburgerFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_merge() {
        let mut f = PresburgerFormula::new();
        let x = f.var(Key::symbol("x"));
        let y = f.exists(Key::aux("y"));
        f.add(Formula::eq([(x, 1), (y, -2)], 1));
        f.add(Formula::le([(x, 1)], 5));
        assert!(f.eval(&[3, 1]));
        assert!(!f.eval(&[2, 1]));
        let mut g = PresburgerFormula::new();
        let y2 = g.exists(Key::aux("y"));
        let x2 = g.var(Key::symbol("x"));
        g.add(Formula::ge([(x2, 1), (y2, 1)], 4));
        let h = f.and(&g);
        assert_eq!(h.num_vars(), 3);
        assert_eq!(h.free_keys(), vec![&Key::symbol("x")]);
    }

    #[test]
    fn linear_merges_terms() {
        let l = Linear::new([(0, 2), (1, 3), (0, -2)], Cmp::Eq, 3);
        assert_eq!(l.terms, vec![(1, 3)]);
    }

    #[test]
    fn linear_line_roundtrip() {
        let mut f = PresburgerFormula::new();
        for l in ["2*x:a - xs:{a,b} >= 3", "-x:a + x:b = 0", "0 <= 4", "-3*z:{{a}} <= -1"] {
            let a = f.parse_linear(l, 1).unwrap();
            f.add(Formula::Atom(a));
        }
        assert_eq!(f.render(), "2*x:a - xs:{a,b} >= 3\n-x:a + x:b = 0\n0 <= 4\n-3*z:{{a}} <= -1\n");
        for bad in ["x:a", "x:a >=", "x:a x:b = 1", "q:a = 1", "x:a + = 1", "2*x:a >= y"] {
            assert!(f.parse_linear(bad, 7).is_err(), "{bad}");
        }
    }

    #[test]
    fn empty_or_is_false() {
        assert!(!Formula::falsity().eval(&[]));
        assert!(Formula::truth().eval(&[]));
    }
}

use super::alphabet::Alphabet;
use super::strtree::{BitString, StringDataTree};
use super::tree::{DataTree, Nested, OrderedDataTree};
use crate::error::{Error, Result};

struct Scanner<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Scanner<'a> {
    fn new(s: &'a str) -> Self {
        Scanner { src: s.as_bytes(), pos: 0, line: 1 }
    }

    fn skip_ws(&mut self) {
        while let Some(&c) = self.src.get(self.pos) {
            if c == b'\n' {
                self.line += 1;
            }
            if !c.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(Error::parse(self.line, format!("expected `{}`, found `{}`", c as char, x as char))),
            None => Err(Error::parse(self.line, format!("expected `{}`, found end of input", c as char))),
        }
    }

    fn label(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while let Some(&c) = self.src.get(self.pos) {
            let ok = c == b'_' || c.is_ascii_alphabetic() || (self.pos > start && c.is_ascii_digit());
            if !ok {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(self.line, "expected a label"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn natural(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(self.line, "expected a decimal value"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        s.parse::<u64>().map_err(|_| Error::parse(self.line, format!("value {s} does not fit in 64 bits")))
    }

    fn bits(&mut self) -> Result<BitString> {
        self.expect(b'"')?;
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|&c| c != b'"') {
            self.pos += 1;
        }
        let s = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
        self.expect(b'"')?;
        BitString::new(&s).map_err(|e| Error::parse(self.line, e.to_string()))
    }

    fn node<V>(&mut self, value: &mut dyn FnMut(&mut Self) -> Result<V>) -> Result<Nested<V>> {
        self.expect(b'(')?;
        let label = self.label()?;
        self.expect(b'@')?;
        let v = value(self)?;
        let mut children = Vec::new();
        while self.peek() == Some(b'(') {
            children.push(self.node(value)?);
        }
        self.expect(b')')?;
        Ok(Nested { label, value: v, children })
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(Error::parse(self.line, format!("trailing input starting at `{}`", c as char))),
        }
    }
}

fn parse_nested<V>(text: &str, mut value: impl FnMut(&mut Scanner) -> Result<V>) -> Result<Nested<V>> {
    let mut sc = Scanner::new(text);
    if sc.peek().is_none() {
        return Err(Error::parse(1, "empty tree"));
    }
    let n = sc.node(&mut value)?;
    sc.finish()?;
    Ok(n)
}

/// Parses `(a@2 (b@1) ...)`. With no alphabet given, one is inferred in
/// order of first appearance.
pub fn parse_tree(text: &str, alphabet: Option<&Alphabet>) -> Result<OrderedDataTree> {
    let n = parse_nested(text, |s| s.natural())?;
    DataTree::from_nested(&n, alphabet)
}

/// Parses a tree whose values are quoted bit-strings, `(a@"01" ...)`.
pub fn parse_string_tree(text: &str, alphabet: Option<&Alphabet>) -> Result<StringDataTree> {
    let n = parse_nested(text, |s| s.bits())?;
    DataTree::from_nested(&n, alphabet)
}

fn write<V>(t: &DataTree<V>, show: &dyn Fn(&V) -> String) -> String
where
    V: Clone,
{
    fn go<V: Clone>(t: &DataTree<V>, u: usize, show: &dyn Fn(&V) -> String, out: &mut String) {
        out.push('(');
        out.push_str(t.label_name(u));
        out.push('@');
        out.push_str(&show(t.value(u)));
        for &c in t.children(u) {
            out.push(' ');
            go(t, c, show, out);
        }
        out.push(')');
    }
    let mut s = String::new();
    go(t, 0, show, &mut s);
    s
}

pub fn write_tree(t: &OrderedDataTree) -> String {
    write(t, &|v| v.to_string())
}

pub fn write_string_tree(t: &StringDataTree) -> String {
    write(t, &|v| format!("\"{v}\""))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let s = "(a@2 (b@1) (c@2 (b@2 (c@1))))";
        let t = parse_tree(s, None).unwrap();
        assert_eq!(t.len(), 5);
        assert_eq!(write_tree(&t), s);
        let t2 = parse_tree("  ( a @ 2(b@1)\n(c@2(b@2(c@1))) ) ", None).unwrap();
        assert_eq!(t, t2);
    }

    #[test]
    fn errors() {
        assert!(parse_tree("", None).is_err());
        assert!(parse_tree("(a@)", None).is_err());
        assert!(parse_tree("(a@1) (b@2)", None).is_err());
        assert!(parse_tree("(1a@1)", None).is_err());
        assert!(matches!(parse_tree("(a@99999999999999999999)", None), Err(Error::Parse { .. })));
    }

    #[test]
    fn string_values() {
        let s = "(a@\"01\" (b@\"0100\"))";
        let t = parse_string_tree(s, None).unwrap();
        assert_eq!(write_string_tree(&t), s);
        assert!(parse_string_tree("(a@\"2\")", None).is_err());
    }
}

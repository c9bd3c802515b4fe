use std::collections::BTreeMap;
use std::fmt;

use super::alphabet::{Alphabet, LabelSet};
use super::tree::DataTree;
use crate::error::{Error, Result};

/// Nonempty finite bit-string value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString(String);

impl BitString {
    pub fn new(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Invalid("bit-string values must be nonempty".into()));
        }
        if !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::Invalid(format!("`{s}` is not a bit-string")));
        }
        Ok(BitString(s.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Prefix order: `self` is a prefix of `o` (reflexive).
    pub fn is_prefix_of(&self, o: &BitString) -> bool {
        o.0.starts_with(&self.0)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self.0)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type StringDataTree = DataTree<BitString>;

/// Tree of the data values under the prefix order. Node 0 is the root
/// (the empty string, labelled ROOT); every other node is a value of the
/// source tree labelled with its class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixTree {
    pub alphabet: Alphabet,
    pub keys: Vec<String>,
    pub labels: Vec<Option<LabelSet>>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
}

impl PrefixTree {
    pub fn find(&self, key: &str) -> Option<usize> {
        self.keys.iter().position(|k| k == key)
    }

    pub fn render(&self) -> String {
        fn go(p: &PrefixTree, u: usize, out: &mut String) {
            out.push('(');
            match p.labels[u] {
                None => out.push_str("ROOT"),
                Some(s) => {
                    out.push_str(&p.keys[u]);
                    out.push(':');
                    out.push_str(&p.alphabet.render_set(s));
                }
            }
            for &c in &p.children[u] {
                out.push(' ');
                go(p, c, out);
            }
            out.push(')');
        }
        let mut s = String::new();
        go(self, 0, &mut s);
        s
    }
}

pub fn prefix_tree_representation(t: &StringDataTree) -> PrefixTree {
    let mut classes: BTreeMap<BitString, LabelSet> = BTreeMap::new();
    for u in 0..t.len() {
        let e = classes.entry(t.value(u).clone()).or_default();
        *e = e.with(t.label(u));
    }
    let mut keys = vec![String::new()];
    let mut labels = vec![None];
    for (k, s) in &classes {
        keys.push(k.0.clone());
        labels.push(Some(*s));
    }
    let n = keys.len();
    let mut parent = vec![None; n];
    let mut children = vec![Vec::new(); n];
    // BTreeMap order is lexicographic, so every proper prefix precedes its
    // extensions; the nearest present prefix is found on a stack.
    let mut stack: Vec<usize> = vec![0];
    for u in 1..n {
        while let Some(&top) = stack.last() {
            if top == 0 || keys[u].starts_with(&keys[top]) {
                break;
            }
            stack.pop();
        }
        let p = *stack.last().expect("root stays on the stack");
        parent[u] = Some(p);
        children[p].push(u);
        stack.push(u);
    }
    PrefixTree { alphabet: t.alphabet().clone(), keys, labels, parent, children }
}

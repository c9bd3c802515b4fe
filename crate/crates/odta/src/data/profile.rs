use std::fmt;
use std::sync::Arc;

use super::alphabet::Alphabet;
use super::tree::{DataTree, Shape};
use crate::error::{Error, Result};

/// Relation of a node's value to one neighbour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Same,
    Diff,
    Absent,
}

impl Rel {
    pub const ALL: [Rel; 3] = [Rel::Same, Rel::Diff, Rel::Absent];

    pub fn code(self) -> char {
        match self {
            Rel::Same => 'S',
            Rel::Diff => 'D',
            Rel::Absent => 'A',
        }
    }

    pub fn from_code(c: char) -> Option<Rel> {
        match c {
            'S' => Some(Rel::Same),
            'D' => Some(Rel::Diff),
            'A' => Some(Rel::Absent),
            _ => None,
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    fn of<V: PartialEq>(a: &V, b: Option<&V>) -> Rel {
        match b {
            None => Rel::Absent,
            Some(b) if b == a => Rel::Same,
            Some(_) => Rel::Diff,
        }
    }
}

/// (left, parent, right) relations of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProfileTriple {
    pub left: Rel,
    pub parent: Rel,
    pub right: Rel,
}

impl ProfileTriple {
    pub const COUNT: usize = 27;

    pub fn new(left: Rel, parent: Rel, right: Rel) -> Self {
        ProfileTriple { left, parent, right }
    }

    pub fn index(self) -> usize {
        self.left.index() * 9 + self.parent.index() * 3 + self.right.index()
    }

    pub fn from_index(i: usize) -> Self {
        ProfileTriple { left: Rel::ALL[i / 9], parent: Rel::ALL[i / 3 % 3], right: Rel::ALL[i % 3] }
    }

    pub fn all() -> impl Iterator<Item = ProfileTriple> {
        (0..Self::COUNT).map(Self::from_index)
    }

    pub fn code(self) -> String {
        [self.left.code(), self.parent.code(), self.right.code()].iter().collect()
    }

    pub fn from_code(s: &str) -> Option<Self> {
        let c: Vec<char> = s.chars().collect();
        if c.len() != 3 {
            return None;
        }
        Some(ProfileTriple::new(Rel::from_code(c[0])?, Rel::from_code(c[1])?, Rel::from_code(c[2])?))
    }
}

impl fmt::Display for ProfileTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.code())
    }
}

/// Profile(t): the source domain annotated with profile triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileTree {
    pub alphabet: Alphabet,
    pub shape: Arc<Shape>,
    pub labels: Vec<usize>,
    pub triples: Vec<ProfileTriple>,
}

pub fn profile<V: Clone + PartialEq>(t: &DataTree<V>) -> ProfileTree {
    let s = t.shape();
    let triples = (0..t.len())
        .map(|u| {
            let v = t.value(u);
            ProfileTriple::new(
                Rel::of(v, s.left(u).map(|x| t.value(x))),
                Rel::of(v, s.parent(u).map(|x| t.value(x))),
                Rel::of(v, s.right(u).map(|x| t.value(x))),
            )
        })
        .collect();
    ProfileTree { alphabet: t.alphabet().clone(), shape: s.clone(), labels: t.labels().to_vec(), triples }
}

/// Name of the profile-extended symbol (a, triple), e.g. `a/SDA`.
pub fn profile_symbol_name(a: &str, p: ProfileTriple) -> String {
    format!("{a}/{}", p.code())
}

/// Σ × {S,D,A}³ in the order (symbol, triple index).
pub fn profile_alphabet(sigma: &Alphabet) -> Alphabet {
    let mut names = Vec::with_capacity(sigma.len() * ProfileTriple::COUNT);
    for a in sigma.names() {
        for p in ProfileTriple::all() {
            names.push(profile_symbol_name(a, p));
        }
    }
    Alphabet::new(names).expect("profile alphabet is well-formed")
}

pub fn profile_symbol_index(a: usize, p: ProfileTriple) -> usize {
    a * ProfileTriple::COUNT + p.index()
}

pub fn split_profile_symbol(i: usize) -> (usize, ProfileTriple) {
    (i / ProfileTriple::COUNT, ProfileTriple::from_index(i % ProfileTriple::COUNT))
}

impl ProfileTree {
    /// Labels over `profile_alphabet(self.alphabet)`.
    pub fn extended_labels(&self) -> Vec<usize> {
        self.labels.iter().zip(&self.triples).map(|(&a, &p)| profile_symbol_index(a, p)).collect()
    }

    /// The profile tree as a plain labelled tree over Σ × {S,D,A}³.
    pub fn as_tree(&self) -> DataTree<()> {
        DataTree::new(profile_alphabet(&self.alphabet), self.shape.clone(), self.extended_labels(), vec![(); self.labels.len()])
            .expect("profile tree matches its domain")
    }

    /// Equality of values on every edge (parent-child and sibling-sibling)
    /// read back from the triples alone. Fails if the triples disagree.
    pub fn edge_equalities(&self) -> Result<Vec<((usize, usize), bool)>> {
        let mut out = Vec::new();
        for (u, v) in self.shape.edges() {
            let same = if self.shape.parent(v) == Some(u) {
                self.triples[v].parent == Rel::Same
            } else {
                let a = self.triples[u].right == Rel::Same;
                if a != (self.triples[v].left == Rel::Same) {
                    return Err(Error::Invalid(format!("sibling triples of {u} and {v} disagree")));
                }
                a
            };
            out.push(((u, v), same));
        }
        Ok(out)
    }

    /// Whether these triples can come from some data tree on this domain.
    pub fn is_consistent(&self) -> bool {
        let s = &self.shape;
        for u in 0..s.len() {
            let t = self.triples[u];
            if (t.parent == Rel::Absent) != s.parent(u).is_none()
                || (t.left == Rel::Absent) != s.left(u).is_none()
                || (t.right == Rel::Absent) != s.right(u).is_none()
            {
                return false;
            }
            if let Some(r) = s.right(u) {
                let tr = self.triples[r];
                if (t.right == Rel::Same) != (tr.left == Rel::Same) {
                    return false;
                }
                let ps = t.parent == Rel::Same;
                let qs = tr.parent == Rel::Same;
                if ps && qs && t.right != Rel::Same {
                    return false;
                }
                if ps != qs && t.right == Rel::Same {
                    return false;
                }
            }
        }
        true
    }
}

use std::collections::BTreeSet;
use std::sync::Arc;

use super::alphabet::{Alphabet, LabelSet};
use crate::error::{Error, Result};

/// Tree domain shared between a tree and its derived views. Node 0 is the
/// root and nodes are numbered in preorder.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    children: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    position: Vec<usize>,
}

impl Shape {
    /// Builds a shape from child counts listed in preorder.
    pub fn from_preorder_arity(arity: &[usize]) -> Result<Self> {
        if arity.is_empty() {
            return Err(Error::Invalid("empty tree".into()));
        }
        let n = arity.len();
        let mut children = vec![Vec::new(); n];
        let mut parent = vec![None; n];
        let mut position = vec![0; n];
        let mut stack: Vec<(usize, usize)> = vec![(0, arity[0])];
        for (u, &k) in arity.iter().enumerate().skip(1) {
            while let Some(&(_, 0)) = stack.last() {
                stack.pop();
            }
            let Some(top) = stack.last_mut() else {
                return Err(Error::Invalid("arity sequence describes a forest".into()));
            };
            let p = top.0;
            top.1 -= 1;
            position[u] = children[p].len();
            children[p].push(u);
            parent[u] = Some(p);
            stack.push((u, k));
        }
        if stack.iter().any(|&(_, r)| r > 0) {
            return Err(Error::Invalid("arity sequence is incomplete".into()));
        }
        Ok(Shape { children, parent, position })
    }

    pub fn single() -> Self {
        Shape { children: vec![vec![]], parent: vec![None], position: vec![0] }
    }

    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn children(&self, u: usize) -> &[usize] {
        &self.children[u]
    }

    pub fn parent(&self, u: usize) -> Option<usize> {
        self.parent[u]
    }

    pub fn position(&self, u: usize) -> usize {
        self.position[u]
    }

    pub fn left(&self, u: usize) -> Option<usize> {
        let p = self.parent[u]?;
        let i = self.position[u];
        (i > 0).then(|| self.children[p][i - 1])
    }

    pub fn right(&self, u: usize) -> Option<usize> {
        let p = self.parent[u]?;
        self.children[p].get(self.position[u] + 1).copied()
    }

    /// Path address of `u` as child indices from the root.
    pub fn address(&self, mut u: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some(p) = self.parent[u] {
            out.push(self.position[u]);
            u = p;
        }
        out.reverse();
        out
    }

    pub fn arity_preorder(&self) -> Vec<usize> {
        self.children.iter().map(Vec::len).collect()
    }

    /// Undirected edges: parent to child and each sibling to the next one.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, ch) in self.children.iter().enumerate() {
            for (i, &c) in ch.iter().enumerate() {
                out.push((u, c));
                if i + 1 < ch.len() {
                    out.push((c, ch[i + 1]));
                }
            }
        }
        out
    }
}

/// Unranked tree with an alphabet label and a data value on every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataTree<V> {
    alphabet: Alphabet,
    shape: Arc<Shape>,
    labels: Vec<usize>,
    values: Vec<V>,
}

pub type OrderedDataTree = DataTree<u64>;

/// Nested construction helper.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nested<V> {
    pub label: String,
    pub value: V,
    pub children: Vec<Nested<V>>,
}

impl<V> Nested<V> {
    pub fn new(label: impl Into<String>, value: V, children: Vec<Nested<V>>) -> Self {
        Nested { label: label.into(), value, children }
    }

    pub fn leaf(label: impl Into<String>, value: V) -> Self {
        Nested::new(label, value, Vec::new())
    }
}

impl<V: Clone> DataTree<V> {
    pub fn new(alphabet: Alphabet, shape: Arc<Shape>, labels: Vec<usize>, values: Vec<V>) -> Result<Self> {
        if labels.len() != shape.len() || values.len() != shape.len() {
            return Err(Error::Invalid("labels/values do not match the tree domain".into()));
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= alphabet.len()) {
            return Err(Error::Invalid(format!("label index {l} outside alphabet")));
        }
        Ok(DataTree { alphabet, shape, labels, values })
    }

    /// Builds from a nested description; the alphabet is inferred in order of
    /// first appearance unless one is supplied.
    pub fn from_nested(spec: &Nested<V>, alphabet: Option<&Alphabet>) -> Result<Self> {
        let mut arity = Vec::new();
        let mut names = Vec::new();
        let mut values = Vec::new();
        fn walk<V: Clone>(n: &Nested<V>, a: &mut Vec<usize>, l: &mut Vec<String>, v: &mut Vec<V>) {
            a.push(n.children.len());
            l.push(n.label.clone());
            v.push(n.value.clone());
            for c in &n.children {
                walk(c, a, l, v);
            }
        }
        walk(spec, &mut arity, &mut names, &mut values);
        let alphabet = match alphabet {
            Some(a) => a.clone(),
            None => {
                let mut seen = Vec::new();
                for n in &names {
                    if !seen.contains(n) {
                        seen.push(n.clone());
                    }
                }
                Alphabet::new(seen)?
            }
        };
        let labels = names.iter().map(|n| alphabet.lookup(n)).collect::<Result<Vec<_>>>()?;
        let shape = Arc::new(Shape::from_preorder_arity(&arity)?);
        DataTree::new(alphabet, shape, labels, values)
    }

    pub fn to_nested(&self) -> Nested<V> {
        fn go<V: Clone>(t: &DataTree<V>, u: usize) -> Nested<V> {
            Nested {
                label: t.label_name(u).to_string(),
                value: t.values[u].clone(),
                children: t.shape.children(u).iter().map(|&c| go(t, c)).collect(),
            }
        }
        go(self, 0)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn shape(&self) -> &Arc<Shape> {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, u: usize) -> usize {
        self.labels[u]
    }

    pub fn label_name(&self, u: usize) -> &str {
        self.alphabet.name(self.labels[u])
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn value(&self, u: usize) -> &V {
        &self.values[u]
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn children(&self, u: usize) -> &[usize] {
        self.shape.children(u)
    }

    pub fn parent(&self, u: usize) -> Option<usize> {
        self.shape.parent(u)
    }

    /// Same domain and values, new labels over another alphabet.
    pub fn relabel(&self, alphabet: Alphabet, labels: Vec<usize>) -> Result<Self> {
        DataTree::new(alphabet, self.shape.clone(), labels, self.values.clone())
    }

    /// Same domain and labels, new values.
    pub fn with_values<W: Clone>(&self, values: Vec<W>) -> Result<DataTree<W>> {
        DataTree::new(self.alphabet.clone(), self.shape.clone(), self.labels.clone(), values)
    }

    /// Reinterprets the labels against another alphabet by name.
    pub fn rebase(&self, alphabet: &Alphabet) -> Result<Self> {
        let labels = (0..self.len()).map(|u| alphabet.lookup(self.label_name(u))).collect::<Result<_>>()?;
        self.relabel(alphabet.clone(), labels)
    }

    pub fn count_label(&self, a: usize) -> usize {
        self.labels.iter().filter(|&&l| l == a).count()
    }
}

impl<V: Clone + Ord> DataTree<V> {
    /// V_t: the set of values carried by the tree.
    pub fn value_set(&self) -> BTreeSet<V> {
        self.values.iter().cloned().collect()
    }

    /// V_t(a): values at a-nodes.
    pub fn values_of(&self, a: usize) -> BTreeSet<V> {
        (0..self.len()).filter(|&u| self.labels[u] == a).map(|u| self.values[u].clone()).collect()
    }

    /// Labels carried by nodes whose value is `d`.
    pub fn labels_at_value(&self, d: &V) -> LabelSet {
        let mut s = LabelSet::EMPTY;
        for u in 0..self.len() {
            if &self.values[u] == d {
                s = s.with(self.labels[u]);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_roundtrip() {
        let s = Shape::from_preorder_arity(&[2, 1, 0, 0]).unwrap();
        assert_eq!(s.children(0), &[1, 3]);
        assert_eq!(s.children(1), &[2]);
        assert_eq!(s.address(2), vec![0, 0]);
        assert_eq!(s.address(3), vec![1]);
        assert_eq!(s.left(3), Some(1));
        assert_eq!(s.right(1), Some(3));
        assert_eq!(s.arity_preorder(), vec![2, 1, 0, 0]);
    }

    #[test]
    fn bad_arity() {
        assert!(Shape::from_preorder_arity(&[]).is_err());
        assert!(Shape::from_preorder_arity(&[0, 0]).is_err());
        assert!(Shape::from_preorder_arity(&[2, 0]).is_err());
    }

    #[test]
    fn nested_roundtrip() {
        let n = Nested::new("a", 2u64, vec![Nested::leaf("b", 1), Nested::new("c", 2, vec![Nested::leaf("b", 2)])]);
        let t = DataTree::from_nested(&n, None).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.alphabet().names(), &["a", "b", "c"]);
        assert_eq!(t.to_nested(), n);
        assert_eq!(t.values_of(1), [1, 2].into_iter().collect());
    }
}

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::alphabet::{Alphabet, LabelSet};
use super::tree::DataTree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Zone<V> {
    pub members: Vec<usize>,
    pub value: V,
    pub labels: LabelSet,
    pub outdegree: usize,
}

/// Partition of Dom(t) into zones. Zone ids follow the preorder position of
/// each zone's first node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZonePartition<V> {
    pub zone_of: Vec<usize>,
    pub zones: Vec<Zone<V>>,
}

impl<V> ZonePartition<V> {
    /// Pairs of distinct adjacent zones, each pair once with the smaller id first.
    pub fn adjacency(&self, edges: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for &(u, v) in edges {
            let (a, b) = (self.zone_of[u], self.zone_of[v]);
            if a != b {
                out.insert((a.min(b), a.max(b)));
            }
        }
        out
    }
}

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

pub fn zones<V: Clone + PartialEq>(t: &DataTree<V>) -> ZonePartition<V> {
    let n = t.len();
    let edges = t.shape().edges();
    let mut parent: Vec<usize> = (0..n).collect();
    for &(u, v) in &edges {
        if t.value(u) == t.value(v) {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut id_of_root = vec![usize::MAX; n];
    let mut zone_of = vec![0; n];
    let mut zones: Vec<Zone<V>> = Vec::new();
    for u in 0..n {
        let r = find(&mut parent, u);
        if id_of_root[r] == usize::MAX {
            id_of_root[r] = zones.len();
            zones.push(Zone { members: Vec::new(), value: t.value(u).clone(), labels: LabelSet::EMPTY, outdegree: 0 });
        }
        let z = id_of_root[r];
        zone_of[u] = z;
        zones[z].members.push(u);
        zones[z].labels = zones[z].labels.with(t.label(u));
    }
    let part = ZonePartition { zone_of, zones };
    let adj = part.adjacency(&edges);
    let mut zones = part.zones;
    for &(a, b) in &adj {
        zones[a].outdegree += 1;
        zones[b].outdegree += 1;
    }
    ZonePartition { zone_of: part.zone_of, zones }
}

/// Element of 2^(2^Γ): a set of label sets, kept sorted.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ZonalSymbol(Vec<LabelSet>);

impl ZonalSymbol {
    pub fn new<I: IntoIterator<Item = LabelSet>>(sets: I) -> Self {
        let b: BTreeSet<LabelSet> = sets.into_iter().collect();
        ZonalSymbol(b.into_iter().collect())
    }

    pub fn sets(&self) -> &[LabelSet] {
        &self.0
    }

    pub fn contains(&self, s: LabelSet) -> bool {
        self.0.binary_search(&s).is_ok()
    }

    pub fn union(&self) -> LabelSet {
        self.0.iter().fold(LabelSet::EMPTY, |a, &b| a.union(b))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        let parts: Vec<String> = self.0.iter().map(|&s| alphabet.render_set(s)).collect();
        format!("{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for ZonalSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZonalValueWord {
    pub alphabet: Alphabet,
    pub symbols: Vec<ZonalSymbol>,
}

impl ZonalValueWord {
    pub fn render(&self) -> String {
        let parts: Vec<String> = self.symbols.iter().map(|s| s.render(&self.alphabet)).collect();
        parts.join(" ")
    }
}

pub fn zonal_string_representation<V: Clone + Ord>(t: &DataTree<V>) -> ZonalValueWord {
    let part = zones(t);
    let mut per_value: BTreeMap<V, BTreeSet<LabelSet>> = BTreeMap::new();
    for z in &part.zones {
        per_value.entry(z.value.clone()).or_default().insert(z.labels);
    }
    ZonalValueWord {
        alphabet: t.alphabet().clone(),
        symbols: per_value.into_values().map(ZonalSymbol::new).collect(),
    }
}

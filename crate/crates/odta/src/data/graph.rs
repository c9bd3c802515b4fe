use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Undirected simple graph whose nodes carry a label in 0..num_labels and a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataGraph {
    pub num_labels: usize,
    pub labels: Vec<usize>,
    pub values: Vec<u64>,
    adj: Vec<BTreeSet<usize>>,
}

impl DataGraph {
    pub fn new(num_labels: usize, labels: Vec<usize>, values: Vec<u64>) -> Result<Self> {
        if labels.len() != values.len() {
            return Err(Error::Invalid("labels and values differ in length".into()));
        }
        if labels.iter().any(|&l| l >= num_labels) {
            return Err(Error::Invalid("label outside the graph alphabet".into()));
        }
        let n = labels.len();
        Ok(DataGraph { num_labels, labels, values, adj: vec![BTreeSet::new(); n] })
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(Error::Invalid("self-loop".into()));
        }
        if u >= self.len() || v >= self.len() {
            return Err(Error::Invalid("edge endpoint out of range".into()));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn neighbours(&self, u: usize) -> &BTreeSet<usize> {
        &self.adj[u]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, a) in self.adj.iter().enumerate() {
            out.extend(a.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// Val_G(a) per label.
    pub fn value_sets(&self) -> BTreeMap<usize, BTreeSet<u64>> {
        let mut out: BTreeMap<usize, BTreeSet<u64>> = BTreeMap::new();
        for u in 0..self.len() {
            out.entry(self.labels[u]).or_default().insert(self.values[u]);
        }
        out
    }

    pub fn has_conflict(&self) -> bool {
        self.edges().iter().any(|&(u, v)| self.values[u] == self.values[v])
    }

    /// Smallest value each label must carry for recoloring to be guaranteed.
    pub fn recolor_bound(&self) -> usize {
        let k = self.degree();
        k * self.num_labels + k + 1
    }
}

/// Reassigns values so that adjacent nodes differ while every label keeps
/// its value set. Labels without nodes impose nothing.
pub fn recolor_data_graph(g: &DataGraph) -> Result<DataGraph> {
    let bound = g.recolor_bound();
    let val = g.value_sets();
    for (&a, vs) in &val {
        if vs.len() < bound {
            return Err(Error::PreconditionViolated { label: format!("#{a}"), bound, have: vs.len() });
        }
    }
    let n = g.len();
    let mut assigned: Vec<Option<u64>> = vec![None; n];
    let mut nodes_of: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for u in 0..n {
        nodes_of.entry(g.labels[u]).or_default().push(u);
    }
    for (a, vs) in &val {
        for (&u, &d) in nodes_of[a].iter().zip(vs.iter()) {
            assigned[u] = Some(d);
        }
    }
    let conflict = |asg: &[Option<u64>]| {
        g.edges().into_iter().find(|&(u, v)| asg[u].is_some() && asg[u] == asg[v])
    };
    let mut rounds = 0usize;
    while let Some((x, y)) = conflict(&assigned) {
        rounds += 1;
        if rounds > n * n + 1 {
            return Err(Error::Invalid("recoloring did not converge".into()));
        }
        let u = x.max(y);
        let d = assigned[u].expect("conflict endpoints are assigned");
        let around_u: BTreeSet<u64> = g.adj[u].iter().filter_map(|&w| assigned[w]).collect();
        let pick = nodes_of[&g.labels[u]].iter().copied().find(|&w| {
            w != u
                && assigned[w].is_some()
                && !g.adj[w].iter().any(|&x| assigned[x] == Some(d))
                && !around_u.contains(&assigned[w].expect("checked"))
        });
        let Some(w) = pick else {
            return Err(Error::Invalid("no swap candidate; precondition arithmetic failed".into()));
        };
        assigned.swap(u, w);
    }
    for u in 0..n {
        if assigned[u].is_none() {
            let around: BTreeSet<u64> = g.adj[u].iter().filter_map(|&w| assigned[w]).collect();
            let d = val[&g.labels[u]].iter().copied().find(|d| !around.contains(d)).ok_or_else(|| {
                Error::Invalid("no free value for an unassigned node".into())
            })?;
            assigned[u] = Some(d);
        }
    }
    let mut out = g.clone();
    out.values = assigned.into_iter().map(|d| d.expect("all assigned")).collect();
    Ok(out)
}

//! Brute-force satisfiability oracles for the frontends. They enumerate
//! small trees and evaluate constraints directly, without going through
//! any automaton construction.

use std::sync::Arc;

use super::dtd::Dtd;
use super::terms::{Constraint, IntegrityConstraint};
use crate::automata::TreeAutomaton;
use crate::data::{DataTree, OrderedDataTree, Shape};
use crate::gen::all_shapes;
use crate::odta::rank_vectors;

/// Integrity constraints through per-label value bitmasks.
fn integrity_holds(cs: &[IntegrityConstraint], labels: &[usize], values: &[u64], nsym: usize) -> bool {
    let mut mask = vec![0u64; nsym];
    let mut count = vec![0u32; nsym];
    for (&a, &v) in labels.iter().zip(values) {
        mask[a] |= 1 << v;
        count[a] += 1;
    }
    cs.iter().all(|c| match *c {
        IntegrityConstraint::Key(a) => mask[a].count_ones() == count[a],
        IntegrityConstraint::Inclusion(a, b) => mask[a] & !mask[b] == 0,
    })
}

fn label_vectors(n: usize, k: usize, first: Option<usize>) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for i in 0..n {
        let opts: Vec<usize> = match (i, first) {
            (0, Some(r)) => vec![r],
            _ => (0..k).collect(),
        };
        out = out.into_iter().flat_map(|v| opts.iter().map(move |&a| [v.clone(), vec![a]].concat())).collect();
    }
    out
}

/// Smallest conforming tree satisfying `cs`, with at most `max_nodes` nodes
/// and values in 1..=max_values.
pub fn brute_force_dtd(d: &Dtd, cs: &[IntegrityConstraint], max_nodes: usize, max_values: usize) -> Option<OrderedDataTree> {
    let k = d.alphabet().len();
    for n in 1..=max_nodes {
        let ranks = rank_vectors(n, max_values);
        for arity in all_shapes(n) {
            let shape = Arc::new(Shape::from_preorder_arity(&arity).expect("valid shape"));
            for labels in label_vectors(n, k, Some(d.root())) {
                let fits = (0..n).all(|u| {
                    let w: Vec<usize> = shape.children(u).iter().map(|&c| labels[c]).collect();
                    d.rule(labels[u]).matches(&w)
                });
                if !fits {
                    continue;
                }
                if let Some(v) = ranks.iter().find(|v| integrity_holds(cs, &labels, v, k)) {
                    return Some(DataTree::new(d.alphabet().clone(), shape, labels, v.clone()).expect("well-formed"));
                }
            }
        }
    }
    None
}

/// Smallest tree of L(a) satisfying every constraint, by the same
/// enumeration with constraints evaluated on the tree itself.
pub fn brute_force_setlin(a: &TreeAutomaton, cs: &[Constraint], max_nodes: usize, max_values: usize) -> Option<OrderedDataTree> {
    let k = a.alphabet().len();
    for n in 1..=max_nodes {
        let ranks = rank_vectors(n, max_values);
        for arity in all_shapes(n) {
            let shape = Arc::new(Shape::from_preorder_arity(&arity).expect("valid shape"));
            for labels in label_vectors(n, k, None) {
                if a.run_labels(&shape, &labels).is_none() {
                    continue;
                }
                for v in &ranks {
                    let t = DataTree::new(a.alphabet().clone(), shape.clone(), labels.clone(), v.clone()).expect("well-formed");
                    if cs.iter().all(|c| c.holds(&t, a.alphabet()).unwrap_or(false)) {
                        return Some(t);
                    }
                }
            }
        }
    }
    None
}

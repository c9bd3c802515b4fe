use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use super::member::profile_labels;
use super::model::{Odta, WeakOdta};
use super::oracle::output_accepted;
use crate::automata::TreeTransducer;
use crate::data::{Alphabet, DataTree, OrderedDataTree, Shape};
use crate::gen::all_shapes;

/// Every value vector of length n whose distinct values are exactly 1..=k
/// for some k ≤ max_values.
pub fn rank_vectors(n: usize, max_values: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![1u64; n];
    let k = max_values.min(n).max(1) as u64;
    loop {
        let mut seen = vec![false; n + 1];
        for &v in &cur {
            seen[v as usize] = true;
        }
        let top = *cur.iter().max().unwrap_or(&0) as usize;
        if (1..=top).all(|i| seen[i]) {
            out.push(cur.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < k {
                cur[i] += 1;
                break;
            }
            cur[i] = 1;
        }
    }
}

/// Labelled domains with at most `max_nodes` nodes, smallest first.
fn for_each_labelled(sigma: &Alphabet, max_nodes: usize, f: &mut dyn FnMut(&Arc<Shape>, &[usize]) -> ControlFlow<()>) {
    for n in 1..=max_nodes {
        for ar in all_shapes(n) {
            let shape = Arc::new(Shape::from_preorder_arity(&ar).expect("valid arity sequence"));
            let mut lab = vec![0usize; n];
            loop {
                if f(&shape, &lab).is_break() {
                    return;
                }
                let mut i = n;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    lab[i] += 1;
                    if lab[i] < sigma.len() {
                        break;
                    }
                    lab[i] = 0;
                }
                if lab.iter().all(|&x| x == 0) {
                    break;
                }
            }
        }
    }
}

/// Smallest weak ODTA member with ≤ max_nodes nodes and values in
/// 1..=max_values. Acceptance of an output depends only on the multiset of
/// (output label, value) pairs, so the value search is cached per multiset
/// of output labels.
pub fn brute_force_weak(s: &WeakOdta, max_nodes: usize, max_values: usize) -> Option<OrderedDataTree> {
    let sigma = s.input().clone();
    let tr: &TreeTransducer = s.transducer();
    let mut by_sizes: BTreeMap<usize, Vec<Vec<u64>>> = BTreeMap::new();
    // sorted output labels -> accepted rank vector over that sorted order
    let mut cache: BTreeMap<Vec<usize>, Option<Vec<u64>>> = BTreeMap::new();
    let mut found = None;
    for_each_labelled(&sigma, max_nodes, &mut |shape, lab| {
        let n = lab.len();
        let ranks = by_sizes.entry(n).or_insert_with(|| rank_vectors(n, max_values));
        tr.for_each_output(shape, lab, usize::MAX, &mut |out| {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&u| out[u]);
            let sorted: Vec<usize> = order.iter().map(|&u| out[u]).collect();
            let hit = cache
                .entry(sorted.clone())
                .or_insert_with(|| ranks.iter().find(|r| output_accepted(s.value_automaton(), s.gamma0(), &sorted, r)).cloned());
            if let Some(r) = hit {
                let mut values = vec![0u64; n];
                for (i, &u) in order.iter().enumerate() {
                    values[u] = r[i];
                }
                found = Some(DataTree::new(sigma.clone(), shape.clone(), lab.to_vec(), values).expect("well-formed"));
                return ControlFlow::Break(());
            }
            ControlFlow::Continue(())
        });
        if found.is_some() {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    found
}

/// Smallest ODTA member with ≤ max_nodes nodes and values in 1..=max_values.
pub fn brute_force_odta(s: &Odta, max_nodes: usize, max_values: usize) -> Option<OrderedDataTree> {
    let sigma = s.sigma().clone();
    let mut by_sizes: BTreeMap<usize, Vec<Vec<u64>>> = BTreeMap::new();
    let mut found = None;
    for_each_labelled(&sigma, max_nodes, &mut |shape, lab| {
        let n = lab.len();
        let ranks = by_sizes.entry(n).or_insert_with(|| rank_vectors(n, max_values));
        for r in ranks.iter() {
            let t = DataTree::new(sigma.clone(), shape.clone(), lab.to_vec(), r.clone()).expect("well-formed");
            let pl = profile_labels(&sigma, &t).expect("labels from Σ");
            let mut ok = false;
            s.transducer().for_each_output(shape, &pl, usize::MAX, &mut |out| {
                if output_accepted(s.value_automaton(), s.gamma0(), out, r) {
                    ok = true;
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            });
            if ok {
                found = Some(t);
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    found
}

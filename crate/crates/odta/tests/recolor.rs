use odta::data::{recolor_data_graph, DataGraph};
use odta::gen;
use proptest::prelude::*;

fn check(g: &DataGraph, h: &DataGraph) -> Result<(), String> {
    if g.labels != h.labels || g.edges() != h.edges() {
        return Err("structure changed".into());
    }
    if g.value_sets() != h.value_sets() {
        return Err("value sets changed".into());
    }
    for (u, v) in h.edges() {
        if h.values[u] == h.values[v] {
            return Err(format!("edge {u}-{v} keeps value {}", h.values[u]));
        }
    }
    Ok(())
}

proptest! {
    #[test]
    fn recoloring_postconditions(seed in any::<u64>()) {
        let mut r = gen::rng(seed);
        let labels = 1 + (seed % 3) as usize;
        let g = gen::random_recolorable_graph(&mut r, labels, 3);
        let h = recolor_data_graph(&g).unwrap();
        prop_assert_eq!(check(&g, &h), Ok(()));
    }
}

#[test]
fn conflicting_start_is_resolved() {
    // both labels start with values 1..5 and every edge joins equal values
    let mut g = DataGraph::new(2, (0..10).map(|i| i / 5).collect(), (0..10u64).map(|i| i % 5 + 1).collect()).unwrap();
    for i in 0..5 {
        g.add_edge(i, i + 5).unwrap();
    }
    assert!(g.has_conflict());
    let h = recolor_data_graph(&g).unwrap();
    assert_eq!(check(&g, &h), Ok(()));
}

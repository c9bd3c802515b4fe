use odta::data::{parse_tree, Alphabet, OrderedDataTree};
use odta::gen;
use odta::odta::fixtures::*;
use odta::odta::*;

fn tree(s: &str, names: &[&str]) -> OrderedDataTree {
    parse_tree(s, Some(&Alphabet::new(names.iter().copied()).unwrap())).unwrap()
}

const B: u64 = DEFAULT_MEMBER_BUDGET;

#[test]
fn counting_classes_on_sample() {
    let t = tree(SAMPLE_TREE, &["a", "b", "c"]);
    let sigma = t.alphabet().clone();
    let two = class_size_weak(&sigma, &["a", "b"], 2).unwrap();
    let three = class_size_weak(&sigma, &["a", "b"], 3).unwrap();
    assert_eq!(member_weak(&two, &t, B).unwrap().as_bool(), Some(true));
    assert_eq!(member_weak(&three, &t, B).unwrap().as_bool(), Some(false));
    assert_eq!(member_odta(&class_size(&sigma, &["a", "b"], 2).unwrap(), &t, B).unwrap().as_bool(), Some(true));
    assert_eq!(member_weak(&all_accepting_weak(&sigma), &t, B).unwrap().as_bool(), Some(true));
    assert_eq!(member_weak(&never_accepting_weak(&sigma), &t, B).unwrap().as_bool(), Some(false));
}

#[test]
fn two_comparable_a_nodes() {
    let s = descending_pair();
    let ab = ["a", "b"];
    assert_eq!(member_odta(&s, &tree("(a@5 (a@5))", &ab), B).unwrap().as_bool(), Some(true));
    assert_eq!(member_odta(&s, &tree("(a@1 (a@2))", &ab), B).unwrap().as_bool(), Some(false));
    assert_eq!(member_odta(&s, &tree("(a@3 (b@1 (a@2)))", &ab), B).unwrap().as_bool(), Some(true));
    assert_eq!(member_odta(&s, &tree("(b@3 (a@1) (a@2))", &ab), B).unwrap().as_bool(), Some(false));
}

#[test]
fn marked_maximum() {
    let s = distinct_with_max();
    let ab = ["a", "b"];
    assert_eq!(member_odta(&s, &tree("(a@9)", &ab), B).unwrap().as_bool(), Some(false));
    assert_eq!(member_odta(&s, &tree("(b@1 (a@2))", &ab), B).unwrap().as_bool(), Some(true));
    // marked a-nodes must carry distinct values
    assert_eq!(member_odta(&s, &tree("(b@1 (a@2) (a@2))", &ab), B).unwrap().as_bool(), Some(false));
    // the maximum sits in an unmarked node
    assert_eq!(member_odta(&s, &tree("(b@1 (a@2) (b@3))", &ab), B).unwrap().as_bool(), Some(false));
}

#[test]
fn search_agrees_with_output_enumeration() {
    let mut rng = gen::rng(7);
    let sigma = gen::symbols("s", 2);
    for i in 0..60 {
        let s = gen::random_weak_odta(&mut rng, 3, &sigma, 2);
        let t = gen::random_tree(&mut rng, &sigma, 1 + i % 7, 4);
        let a = member_weak(&s, &t, B).unwrap().as_bool();
        let b = member_weak_exhaustive(&s, &t, 1 << 20).unwrap();
        assert_eq!(a, b, "instance {i}");
    }
}

#[test]
fn budget_exhaustion_is_unknown() {
    let t = tree(SAMPLE_TREE, &["a", "b", "c"]);
    let three = class_size_weak(t.alphabet(), &["a", "b"], 3).unwrap();
    assert_eq!(member_weak(&three, &t, 3).unwrap(), Membership::Unknown);
}

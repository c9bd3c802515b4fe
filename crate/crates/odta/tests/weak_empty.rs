use odta::automata::{Nfa, TreeAutomaton, TreeTransducer};
use odta::data::{Alphabet, LabelSet};
use odta::gen;
use odta::odta::fixtures::*;
use odta::odta::*;
use odta::presburger::{Formula, Key, PresburgerFormula};

fn caps() -> EmptinessCaps {
    EmptinessCaps::default()
}

fn single_a() -> (Alphabet, TreeTransducer) {
    let sigma = Alphabet::new(["a"]).unwrap();
    (sigma.clone(), TreeTransducer::identity(TreeAutomaton::universal(sigma)))
}

#[test]
fn one_distinct_value() {
    let (_, tr) = single_a();
    let mut m = Nfa::new(2);
    m.set_initial(0);
    m.set_final(1);
    m.add_transition(0, LabelSet(1), 1);
    let s = WeakOdta::new(tr.clone(), m, LabelSet(1)).unwrap();
    let r = empty_weak(&s, &caps()).unwrap();
    let t = r.verdict.witness().expect("nonempty");
    assert_eq!(t.len(), 1);
    let never = WeakOdta::new(tr, empty_value_automaton(&Alphabet::new(["a"]).unwrap()), LabelSet(1)).unwrap();
    assert_eq!(empty_weak(&never, &caps()).unwrap().verdict, EmptinessVerdict::Empty);
}

#[test]
fn single_node_transducer_needs_two_values() {
    let sigma = Alphabet::new(["a"]).unwrap();
    let mut ta = TreeAutomaton::with_states(1, sigma);
    ta.set_horizontal(0, 0, Nfa::epsilon());
    ta.add_final(0);
    let tr = TreeTransducer::identity(ta);
    let mut m = Nfa::new(3);
    m.set_initial(0);
    m.set_final(2);
    m.add_transition(0, LabelSet(1), 1);
    m.add_transition(1, LabelSet(1), 2);
    m.add_transition(2, LabelSet(1), 2);
    let s = WeakOdta::new(tr, m, LabelSet::EMPTY).unwrap();
    assert_eq!(empty_weak(&s, &caps()).unwrap().verdict, EmptinessVerdict::Empty);
    assert!(brute_force_weak(&s, 1, 1).is_none());
}

#[test]
fn fixtures_are_nonempty() {
    let sigma = Alphabet::new(["a", "b"]).unwrap();
    for s in [
        all_accepting_weak(&sigma),
        descending_pair_weak(),
        class_size_weak(&sigma, &["a", "b"], 2).unwrap(),
        class_size_mod_weak(&sigma, &["a"], 3).unwrap(),
    ] {
        let r = empty_weak(&s, &caps()).unwrap();
        let t = r.verdict.witness().expect("nonempty").clone();
        assert_eq!(member_weak(&s, &t, DEFAULT_MEMBER_BUDGET).unwrap().as_bool(), Some(true));
    }
}

fn xi_ge(key: Key, n: i64) -> PresburgerFormula {
    let mut f = PresburgerFormula::new();
    let x = f.var(key);
    f.add(Formula::ge([(x, 1)], n));
    f
}

#[test]
fn constraint_forces_three_a_nodes() {
    let sigma = Alphabet::new(["a", "b"]).unwrap();
    let s = ExtendedWeakOdta::new(all_accepting_weak(&sigma), xi_ge(Key::symbol("a"), 3)).unwrap();
    let r = empty_weak_ext(&s, &caps()).unwrap();
    let t = r.verdict.witness().expect("nonempty");
    assert!(t.count_label(0) >= 3);
    let trivial = ExtendedWeakOdta::new(all_accepting_weak(&sigma), PresburgerFormula::new()).unwrap();
    assert!(empty_weak_ext(&trivial, &caps()).unwrap().verdict.is_nonempty());
}

#[test]
fn constraint_against_distinctness_is_empty() {
    // every a-node distinct, yet fewer a-classes than a-nodes
    let (sigma, tr) = single_a();
    let s = WeakOdta::new(tr, universal_value_automaton(&sigma), LabelSet(1)).unwrap();
    let mut xi = PresburgerFormula::new();
    let xa = xi.var(Key::symbol("a"));
    let xs = xi.var(class_key(&sigma, LabelSet(1)));
    xi.add(Formula::ge([(xa, 1), (xs, -1)], 1));
    let e = ExtendedWeakOdta::new(s.clone(), xi).unwrap();
    assert_eq!(empty_weak_ext(&e, &caps()).unwrap().verdict, EmptinessVerdict::Empty);
    // bounded brute force agrees: no member of ≤ 4 nodes satisfies it
    for n in 1..=4 {
        for t in (0..20).filter_map(|i| Some(gen::random_tree(&mut gen::rng(i), &sigma, n, 4))) {
            let m = member_weak_ext(&e, &t, DEFAULT_MEMBER_BUDGET, odta::presburger::Budget::default()).unwrap();
            assert_eq!(m.as_bool(), Some(false));
        }
    }
}

#[test]
fn agrees_with_brute_force() {
    let sigma = gen::symbols("s", 2);
    let (mut ne, mut e) = (0, 0);
    for seed in 0..60 {
        let mut rng = gen::rng(seed);
        let s = gen::random_weak_odta(&mut rng, 2, &sigma, 2);
        let r = empty_weak(&s, &caps()).unwrap();
        let b = brute_force_weak(&s, 4, 4);
        match &r.verdict {
            EmptinessVerdict::Nonempty { witness, .. } => {
                ne += 1;
                assert_eq!(member_weak_exhaustive(&s, witness, 1 << 20).unwrap(), Some(true), "seed {seed}");
            }
            EmptinessVerdict::Empty => {
                e += 1;
                assert!(b.is_none(), "seed {seed}: brute force found {:?}", b);
            }
            EmptinessVerdict::EmptyWithinCaps => panic!("seed {seed}: solver gave up"),
        }
        if b.is_some() {
            assert!(r.verdict.is_nonempty(), "seed {seed}");
        }
    }
    assert!(ne > 5 && e > 5, "nonempty {ne}, empty {e}");
}

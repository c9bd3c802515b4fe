use odta::data::{Alphabet, LabelSet, OrderedDataTree};
use odta::odta::fixtures::{empty_value_automaton, descending_pair, class_size, class_size_mod, distinct_with_max};
use odta::odta::{empty_odta, member_odta, EmptinessCaps, EmptinessVerdict, Odta};

fn witness_of(s: &Odta) -> OrderedDataTree {
    let rep = empty_odta(s, &EmptinessCaps::default()).unwrap();
    let EmptinessVerdict::Nonempty { witness, .. } = rep.verdict else { panic!("expected a witness: {:?}", rep.notes) };
    assert_eq!(member_odta(s, &witness, 1_000_000).unwrap().as_bool(), Some(true));
    witness
}

#[test]
fn descending_pair_nonempty() {
    witness_of(&descending_pair());
}

#[test]
fn class_size_nonempty() {
    let sigma = Alphabet::new(["a", "b"]).unwrap();
    let t = witness_of(&class_size(&sigma, &["a", "b"], 2).unwrap());
    let n = odta::data::value_classes(&t).get(&LabelSet::full(2)).map_or(0, |v| v.len());
    assert_eq!(n, 2);
}

#[test]
fn class_size_mod_nonempty() {
    let sigma = Alphabet::new(["a", "b"]).unwrap();
    let t = witness_of(&class_size_mod(&sigma, &["a"], 2).unwrap());
    let n = odta::data::value_classes(&t).get(&LabelSet::singleton(0)).map_or(0, |v| v.len());
    assert_eq!(n % 2, 0);
}

#[test]
fn distinct_with_max_nonempty() {
    witness_of(&distinct_with_max());
}

#[test]
fn empty_value_automaton_is_empty() {
    let s = descending_pair();
    let m = empty_value_automaton(s.output());
    let e = Odta::new(s.sigma().clone(), s.transducer().clone(), m, LabelSet::EMPTY).unwrap();
    let rep = empty_odta(&e, &EmptinessCaps::default()).unwrap();
    assert_eq!(rep.verdict, EmptinessVerdict::Empty);
}

#[test]
fn random_odta_against_brute_force() {
    let (mut both, mut only_brute, mut only_apc) = (0, 0, 0);
    for seed in 0..60u64 {
        let mut r = odta::gen::rng(seed);
        let sigma = odta::gen::symbols("s", 1 + (seed % 2) as usize);
        let s = odta::gen::random_odta(&mut r, 1 + (seed % 3) as usize, &sigma, 1 + (seed % 2) as usize);
        let rep = empty_odta(&s, &EmptinessCaps::default()).unwrap();
        let brute = odta::odta::brute_force_odta(&s, 4, 4);
        if let Some(w) = rep.verdict.witness() {
            assert_eq!(member_odta(&s, w, 1_000_000).unwrap().as_bool(), Some(true));
        }
        if brute.is_some() {
            assert_ne!(rep.verdict, EmptinessVerdict::Empty, "seed {seed}");
        }
        match (brute.is_some(), rep.verdict.is_nonempty()) {
            (true, true) => both += 1,
            (true, false) => only_brute += 1,
            (false, true) => only_apc += 1,
            _ => {}
        }
    }
    assert_eq!(only_brute, 0);
    assert!(both > 0, "{only_apc} witnesses beyond the brute-force bound");
}

use std::collections::BTreeSet;

use odta::automata::{Nfa, TreeAutomaton};
use odta::data::{string_representation, value_classes, Alphabet, DataTree, LabelSet, Nested};
use odta::frontends::oracle::{brute_force_dtd, brute_force_setlin};
use odta::frontends::text::{tree_word, word_tree};
use odta::frontends::*;
use odta::gen;
use odta::odta::{empty_weak, member_weak, member_weak_ext, EmptinessCaps, EmptinessVerdict};
use odta::presburger::Budget;
use proptest::prelude::*;
use rand::Rng;

fn integrity_only(cs: &[Constraint]) -> Vec<IntegrityConstraint> {
    cs.iter()
        .filter_map(|c| match c {
            Constraint::Integrity(i) => Some(*i),
            _ => None,
        })
        .collect()
}

/// Trees over the DTD alphabet: sampled from the DTD's automaton when
/// possible, else uniformly random.
fn trees_for(rng: &mut gen::Rand, d: &Dtd, count: usize) -> Vec<odta::data::OrderedDataTree> {
    let ta = d.to_tree_automaton();
    (0..count)
        .map(|i| {
            let sampled = if i % 2 == 0 { gen::sample_accepted(rng, &ta, 8, 3, 20) } else { None };
            sampled.unwrap_or_else(|| {
                let n = rng.gen_range(1..=8);
                gen::random_tree(rng, d.alphabet(), n, 3)
            })
        })
        .collect()
}

#[test]
fn dtd_membership_matches_direct_evaluation() {
    let mut seen = [0usize; 2];
    for seed in 0..40u64 {
        let mut rng = gen::rng(seed);
        let d = gen::random_dtd(&mut rng, 2 + (seed % 2) as usize);
        let cs = gen::random_integrity(&mut rng, d.alphabet().len());
        let s = dtd_to_weak_odta(&d, &cs).unwrap();
        for t in trees_for(&mut rng, &d, 12) {
            let direct = d.conforms(&t) && cs.iter().all(|c| c.holds(&t, d.alphabet()).unwrap());
            let got = member_weak(&s, &t, 100_000).unwrap().as_bool();
            assert_eq!(got, Some(direct), "seed {seed}: {}", d.render());
            seen[direct as usize] += 1;
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

#[test]
fn dtd_sat_matches_brute_force() {
    let caps = EmptinessCaps::default();
    let mut tally = [0usize; 3];
    for seed in 0..40u64 {
        let mut rng = gen::rng(1000 + seed);
        let d = gen::random_dtd(&mut rng, 2 + (seed % 2) as usize);
        let cs = gen::random_integrity(&mut rng, d.alphabet().len());
        let ics = integrity_only(&cs);
        let brute = brute_force_dtd(&d, &ics, 5, 5);
        let r = dtd_sat(&d, &cs, &caps, dtd::DEFAULT_MAX_CHAINS).unwrap();
        match &r.verdict {
            SatVerdict::Sat { witness, .. } => {
                assert!(d.conforms(witness));
                assert!(ics.iter().all(|c| c.holds(witness, d.alphabet())));
                let small = witness.len() <= 5 && witness.value_set().len() <= 5;
                assert!(brute.is_some() || !small, "seed {seed}: brute force missed a small witness");
                tally[0] += 1;
            }
            SatVerdict::Unsat => {
                assert!(brute.is_none(), "seed {seed}: UNSAT but brute force found one");
                tally[1] += 1;
            }
            SatVerdict::Unknown => tally[2] += 1,
        }
        if brute.is_some() {
            assert_eq!(r.verdict.name(), "sat", "seed {seed}");
        }
    }
    assert!(tally[0] > 0 && tally[1] > 0, "{tally:?}");
    assert_eq!(tally[2], 0);
}

#[test]
fn dtd_sat_mutual_inclusion_chain() {
    // V(a) = V(b) by two inclusions, and b needs a value a lacks: no tree
    let d = parse_dtd("symbols: r a b c\nr -> a b c").unwrap();
    let cs = parse_constraints("incl(a, b)\nincl(b, a)\nincl(c, a)\nkey(b)", d.alphabet()).unwrap();
    let r = dtd_sat(&d, &cs, &EmptinessCaps::default(), dtd::DEFAULT_MAX_CHAINS).unwrap();
    assert_eq!(r.verdict.name(), "sat");
    let d2 = parse_dtd("r -> a b b").unwrap();
    let cs2 = parse_constraints("incl(a, b)\nincl(b, a)\nkey(b)", d2.alphabet()).unwrap();
    let r2 = dtd_sat(&d2, &cs2, &EmptinessCaps::default(), dtd::DEFAULT_MAX_CHAINS).unwrap();
    assert_eq!(r2.verdict, SatVerdict::Unsat);
    assert!(brute_force_dtd(&d2, &integrity_only(&cs2), 4, 4).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn term_is_union_of_its_classes(seed in any::<u64>(), k in 1usize..4, n in 1usize..7) {
        let mut rng = gen::rng(seed);
        let sigma = gen::symbols("s", k);
        let tau = gen::random_term(&mut rng, k, 3);
        let t = gen::random_tree(&mut rng, &sigma, n, 4);
        let fam = sterm_family(&tau, &sigma).unwrap();
        let classes = value_classes(&t);
        let via: BTreeSet<u64> = fam.iter().flat_map(|s| classes.get(s).cloned().unwrap_or_default()).collect();
        prop_assert_eq!(tau.eval(&t, &sigma).unwrap(), via);
    }

    #[test]
    fn set_constraint_matches_word_condition(seed in any::<u64>(), k in 1usize..4, n in 1usize..7) {
        let mut rng = gen::rng(seed);
        let sigma = gen::symbols("s", k);
        let c = SetConstraint { term: gen::random_term(&mut rng, k, 3), empty: rng.gen_bool(0.5) };
        let t = gen::random_tree(&mut rng, &sigma, n, 4);
        let s = setlinear_to_odta(&TreeAutomaton::universal(sigma.clone()), &[Constraint::Set(c.clone())]).unwrap();
        let fam = sterm_family(&c.term, &sigma).unwrap();
        let word = string_representation(&t).symbols;
        let hit = word.iter().any(|x| fam.contains(x));
        prop_assert_eq!(c.holds(&t, &sigma).unwrap(), hit != c.empty);
        prop_assert_eq!(s.base.value_automaton().member(&word).unwrap(), hit != c.empty);
    }

    #[test]
    fn msp_preserves_length_and_labels(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = gen::rng(seed);
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
        let mut values: Vec<u64> = (1..=n as u64).collect();
        for i in (1..n).rev() {
            values.swap(i, rng.gen_range(0..=i));
        }
        let w = msp(&labels, &values).unwrap();
        prop_assert_eq!(w.len(), n);
        prop_assert_eq!(w.iter().map(|p| p.0).collect::<Vec<_>>(), labels);
        prop_assert_eq!(w[n - 1].1, Mark::Star);
    }
}

#[test]
fn setlin_sat_matches_brute_force() {
    let caps = EmptinessCaps::default();
    let mut tally = [0usize; 3];
    for seed in 0..30u64 {
        let mut rng = gen::rng(5000 + seed);
        let sigma = gen::symbols("s", 1 + (seed % 2) as usize);
        let a = gen::random_tree_automaton(&mut rng, 1 + (seed % 2) as usize, &sigma);
        let cs = gen::random_setlin(&mut rng, sigma.len());
        let brute = brute_force_setlin(&a, &cs, 4, 4);
        let r = setlin_sat(&a, &cs, &caps).unwrap();
        match &r.verdict {
            EmptinessVerdict::Nonempty { witness, .. } => {
                let small = witness.len() <= 4 && witness.value_set().len() <= 4;
                assert!(brute.is_some() || !small, "seed {seed}");
                tally[0] += 1;
            }
            EmptinessVerdict::Empty => {
                assert!(brute.is_none(), "seed {seed}");
                tally[1] += 1;
            }
            EmptinessVerdict::EmptyWithinCaps => tally[2] += 1,
        }
        if brute.is_some() {
            assert!(r.verdict.is_nonempty(), "seed {seed}");
        }
    }
    assert!(tally[0] > 0 && tally[1] > 0, "{tally:?}");
}

#[test]
fn setlin_membership_matches_direct_evaluation() {
    for seed in 0..30u64 {
        let mut rng = gen::rng(7000 + seed);
        let sigma = gen::symbols("s", 2);
        let a = gen::random_tree_automaton(&mut rng, 2, &sigma);
        let cs = gen::random_setlin(&mut rng, 2);
        let s = setlinear_to_odta(&a, &cs).unwrap();
        for _ in 0..10 {
            let n = rng.gen_range(1..=6);
            let t = gen::random_tree(&mut rng, &sigma, n, 3);
            let direct = a.accepts(&t).unwrap() && cs.iter().all(|c| c.holds(&t, &sigma).unwrap());
            assert_eq!(member_weak_ext(&s, &t, 100_000, Budget::default()).unwrap().as_bool(), Some(direct), "seed {seed}");
        }
    }
}

#[test]
fn fresh_value_constraint_is_key() {
    let sigma = Alphabet::new(["a", "b"]).unwrap();
    let a = TreeAutomaton::universal(sigma.clone());
    let lin = setlinear_to_odta(&a, &parse_constraints("lin: x:a - xs:{a} = 0", &sigma).unwrap()).unwrap();
    let key = IntegrityConstraint::Key(0);
    let mut rng = gen::rng(3);
    let mut differ = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let t = gen::random_tree(&mut rng, &sigma, n, 4);
        let got = member_weak_ext(&lin, &t, 100_000, Budget::default()).unwrap().as_bool().unwrap();
        // x_a = z_{a} says every a-value is fresh and unshared, which is key(a)
        // plus "no a-value at a b-node"
        let shared = t.values_of(0).intersection(&t.values_of(1)).next().is_some();
        assert_eq!(got, key.holds(&t, &sigma) && !shared);
        differ += (key.holds(&t, &sigma) != got) as usize;
    }
    assert!(differ > 0);
}

fn text_automaton(sigma: &Alphabet, gamma: &Alphabet, t1: &[(usize, (usize, Mark, usize), usize)], t1_states: usize, t1_final: &[usize], t2: Nfa<usize>) -> TextAutomaton {
    let mut m = Nfa::new(t1_states);
    m.set_initial(0);
    t1_final.iter().for_each(|&p| m.set_final(p));
    for &(p, s, q) in t1 {
        m.add_transition(p, s, q);
    }
    TextAutomaton::new(sigma.clone(), gamma.clone(), m, t2).unwrap()
}

/// T₁ copies a ↦ α, b ↦ β whatever the mark.
fn copying_t1(sigma: &Alphabet) -> Vec<(usize, (usize, Mark, usize), usize)> {
    (0..sigma.len()).flat_map(|a| Mark::ALL.map(|m| (0, (a, m, a), 0))).collect()
}

fn random_text(rng: &mut gen::Rand, n: usize, k: usize) -> (Vec<usize>, Vec<u64>) {
    let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
    let mut values: Vec<u64> = (1..=n as u64).collect();
    for i in (1..n).rev() {
        values.swap(i, rng.gen_range(0..=i));
    }
    (labels, values)
}

#[test]
fn all_texts_automaton() {
    let sigma = Alphabet::new(["a", "b"]).unwrap();
    let gamma = Alphabet::new(["alpha", "beta"]).unwrap();
    let ta = text_automaton(&sigma, &gamma, &copying_t1(&sigma), 1, &[0], Nfa::universal([0, 1]));
    let s = text_automaton_to_weak_odta(&ta).unwrap();
    let mut rng = gen::rng(9);
    for _ in 0..60 {
        let n = rng.gen_range(1..=6);
        let (labels, _) = random_text(&mut rng, n, 2);
        // distinct but not necessarily 1..n
        let values: Vec<u64> = (0..n as u64).map(|i| 10 + 3 * i).collect();
        let t = word_tree(&sigma, &labels, &values).unwrap();
        assert_eq!(member_weak(&s, &t, 100_000).unwrap().as_bool(), Some(true));
        let mut dup = values.clone();
        if n > 1 {
            dup[1] = dup[0];
            let t2 = word_tree(&sigma, &labels, &dup).unwrap();
            assert_eq!(member_weak(&s, &t2, 100_000).unwrap().as_bool(), Some(false));
        }
    }
    // branching trees are not words
    let fork = DataTree::from_nested(&Nested::new("a", 1u64, vec![Nested::leaf("a", 2), Nested::leaf("b", 3)]), Some(&sigma)).unwrap();
    assert_eq!(member_weak(&s, &fork, 100_000).unwrap().as_bool(), Some(false));
}

#[test]
fn smallest_value_is_alpha() {
    let sigma = Alphabet::new(["a", "b"]).unwrap();
    let gamma = Alphabet::new(["alpha", "beta"]).unwrap();
    // T₂: α first, then anything
    let mut t2 = Nfa::new(2);
    t2.set_initial(0);
    t2.set_final(1);
    t2.add_transition(0, 0, 1);
    t2.add_transition(1, 0, 1);
    t2.add_transition(1, 1, 1);
    // T₁: only b-positions may output α, and the word must contain an a
    let mut t1 = Vec::new();
    for m in Mark::ALL {
        t1.push((0, (1, m, 0), 0));
        t1.push((0, (1, m, 1), 0));
        t1.push((0, (0, m, 1), 1));
        t1.push((1, (1, m, 0), 1));
        t1.push((1, (1, m, 1), 1));
        t1.push((1, (0, m, 1), 1));
    }
    let ta = text_automaton(&sigma, &gamma, &t1, 2, &[1], t2);
    let s = text_automaton_to_weak_odta(&ta).unwrap();
    let r = empty_weak(&s, &EmptinessCaps::default()).unwrap();
    let EmptinessVerdict::Nonempty { witness, certificate } = &r.verdict else { panic!("{:?}", r.verdict) };
    let (labels, values) = tree_word(witness).expect("a word");
    let min = (0..values.len()).min_by_key(|&i| values[i]).unwrap();
    assert_eq!(certificate.output[min], 0);
    assert_eq!(labels[min], 1);
    // the certificate output is a T₁ output on some marking, and T₂ accepts it by value
    let marked: Vec<Vec<(usize, Mark)>> = (0..3usize.pow(labels.len() as u32))
        .map(|mut k| labels.iter().map(|&a| { let m = Mark::ALL[k % 3]; k /= 3; (a, m) }).collect())
        .collect();
    assert!(marked.iter().any(|w| ta.outputs(w, 10_000).contains(&certificate.output)));
    assert!(ta.accepts_some_text(&labels).unwrap());
}

#[test]
fn empty_t2_means_empty() {
    let sigma = Alphabet::new(["a"]).unwrap();
    let gamma = Alphabet::new(["alpha"]).unwrap();
    let mut t2 = Nfa::new(1);
    t2.set_initial(0);
    t2.add_transition(0, 0, 0);
    let ta = text_automaton(&sigma, &gamma, &copying_t1(&sigma), 1, &[0], t2);
    let s = text_automaton_to_weak_odta(&ta).unwrap();
    assert_eq!(empty_weak(&s, &EmptinessCaps::default()).unwrap().verdict, EmptinessVerdict::Empty);
}

fn random_text_automaton(rng: &mut gen::Rand, mark_blind: bool) -> TextAutomaton {
    let sigma = gen::symbols("s", 2);
    let gamma = gen::symbols("g", 2);
    let states = rng.gen_range(1..=2);
    let mut t1 = Nfa::new(states);
    t1.set_initial(0);
    t1.set_final(rng.gen_range(0..states));
    for p in 0..states {
        for a in 0..2 {
            for g in 0..2 {
                for q in 0..states {
                    if mark_blind {
                        if rng.gen_bool(0.4) {
                            Mark::ALL.iter().for_each(|&m| t1.add_transition(p, (a, m, g), q));
                        }
                    } else {
                        for m in Mark::ALL {
                            if rng.gen_bool(0.3) {
                                t1.add_transition(p, (a, m, g), q);
                            }
                        }
                    }
                }
            }
        }
    }
    let t2 = gen::random_nfa(rng, 2, &[0usize, 1], 2.0);
    TextAutomaton::new(sigma, gamma, t1, t2).unwrap()
}

#[test]
fn accepted_texts_are_members() {
    let mut hits = 0;
    for seed in 0..60u64 {
        let mut rng = gen::rng(seed);
        let ta = random_text_automaton(&mut rng, seed % 2 == 0);
        let s = text_automaton_to_weak_odta(&ta).unwrap();
        for _ in 0..10 {
            let n = rng.gen_range(1..=5);
            let (labels, values) = random_text(&mut rng, n, 2);
            if ta.accepts_text(&labels, &values).unwrap() {
                hits += 1;
                let t = word_tree(&ta.sigma, &labels, &values).unwrap();
                assert_eq!(member_weak(&s, &t, 100_000).unwrap().as_bool(), Some(true), "seed {seed}");
            }
        }
    }
    assert!(hits > 20, "{hits}");
}

#[test]
fn members_share_projection_with_a_text_when_marks_are_ignored() {
    let mut members = 0;
    for seed in 0..60u64 {
        let mut rng = gen::rng(100 + seed);
        let ta = random_text_automaton(&mut rng, true);
        let s = text_automaton_to_weak_odta(&ta).unwrap();
        for _ in 0..10 {
            let n = rng.gen_range(1..=5);
            let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            let values: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=9)).collect();
            let t = word_tree(&ta.sigma, &labels, &values).unwrap();
            if member_weak(&s, &t, 100_000).unwrap().as_bool() == Some(true) {
                members += 1;
                assert!(ta.accepts_some_text(&labels).unwrap(), "seed {seed}");
            }
        }
    }
    assert!(members > 10, "{members}");
}

/// Marks are guessed, not checked against the values. T₁ below only reads
/// the marking (1, −1, ∗), which no text of length 3 has, yet the weak
/// ODTA accepts words of that shape.
#[test]
fn mark_guesses_are_not_checked() {
    let sigma = Alphabet::new(["a"]).unwrap();
    let gamma = Alphabet::new(["alpha"]).unwrap();
    let t1 = [(0, (0, Mark::Plus, 0), 1), (1, (0, Mark::Minus, 0), 2), (2, (0, Mark::Star, 0), 3)];
    let ta = text_automaton(&sigma, &gamma, &t1, 4, &[3], Nfa::universal([0]));
    assert!(!ta.accepts_some_text(&[0, 0, 0]).unwrap());
    let s = text_automaton_to_weak_odta(&ta).unwrap();
    let t = word_tree(&sigma, &[0, 0, 0], &[1, 2, 3]).unwrap();
    assert_eq!(member_weak(&s, &t, 100_000).unwrap().as_bool(), Some(true));
    let _ = LabelSet::EMPTY;
}

use odta::presburger::solver::solve_exhaustive;
use odta::presburger::{solve, Budget, Cmp, Formula, Key, PresburgerFormula, Verdict};
use proptest::prelude::*;

fn atom_strategy(k: usize) -> impl Strategy<Value = (Vec<i64>, u8, i64)> {
    (proptest::collection::vec(-3i64..=3, k), 0u8..3, -6i64..=12)
}

fn build(k: usize, atoms: &[(Vec<i64>, u8, i64)], ors: &[((Vec<i64>, u8, i64), (Vec<i64>, u8, i64))]) -> PresburgerFormula {
    let mut f = PresburgerFormula::new();
    let vars: Vec<usize> = (0..k).map(|i| f.var(Key::symbol(format!("v{i}")))).collect();
    let mk = |(cs, c, r): &(Vec<i64>, u8, i64)| {
        let cmp = [Cmp::Eq, Cmp::Le, Cmp::Ge][*c as usize];
        Formula::atom(vars.iter().copied().zip(cs.iter().copied()), cmp, *r)
    };
    for &v in &vars {
        f.add(Formula::le([(v, 1)], 8));
    }
    for a in atoms {
        f.add(mk(a));
    }
    for (a, b) in ors {
        f.add(Formula::Or(vec![mk(a), mk(b)]));
    }
    f
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn agrees_with_exhaustive_search(
        k in 1usize..=3,
        seed_atoms in proptest::collection::vec(atom_strategy(3), 0..4),
        seed_ors in proptest::collection::vec((atom_strategy(3), atom_strategy(3)), 0..3),
    ) {
        let cut = |(cs, c, r): &(Vec<i64>, u8, i64)| (cs[..k].to_vec(), *c, *r);
        let atoms: Vec<_> = seed_atoms.iter().map(cut).collect();
        let ors: Vec<_> = seed_ors.iter().map(|(a, b)| (cut(a), cut(b))).collect();
        let f = build(k, &atoms, &ors);
        let oracle = solve_exhaustive(&f, 8);
        let s = solve(&f, Budget::default()).unwrap();
        match s.verdict {
            Verdict::Sat(a) => {
                prop_assert!(oracle.is_some());
                prop_assert!(f.eval_assignment(&a));
            }
            Verdict::Unsat => prop_assert!(oracle.is_none()),
            Verdict::Unknown => prop_assert!(false, "unknown on a tiny instance"),
        }
    }

    #[test]
    fn deterministic(
        atoms in proptest::collection::vec(atom_strategy(3), 1..4),
    ) {
        let f = build(3, &atoms, &[]);
        let a = solve(&f, Budget::default()).unwrap();
        let b = solve(&f, Budget::default()).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn unbounded_system_terminates() {
    // 3x + 5y = 7 + 15z has solutions only with large z-dependent values.
    let mut f = PresburgerFormula::new();
    let x = f.var(Key::symbol("x"));
    let y = f.var(Key::symbol("y"));
    let z = f.var(Key::symbol("z"));
    f.add(Formula::eq([(x, 3), (y, 5), (z, -15)], 7));
    f.add(Formula::ge([(z, 1)], 2));
    let Verdict::Sat(a) = solve(&f, Budget::default()).unwrap().verdict else { panic!() };
    assert!(f.eval_assignment(&a));
}

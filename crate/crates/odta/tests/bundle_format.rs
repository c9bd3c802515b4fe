use odta::gen;
use odta::odta::{parse_bundle, write_bundle, Bundle, ExtendedWeakOdta};
use odta::presburger::{Formula, Key, PresburgerFormula};
use proptest::prelude::*;

fn check(b: &Bundle) {
    let s = write_bundle(b).unwrap();
    let p = parse_bundle(&s).unwrap();
    assert_eq!(&p, b);
    assert_eq!(write_bundle(&p).unwrap(), s);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_odta_roundtrips(seed in any::<u64>(), q in 1usize..4, sg in 1usize..3, g in 1usize..4) {
        let mut rng = gen::rng(seed);
        let s = gen::random_odta(&mut rng, q, &gen::symbols("s", sg), g);
        check(&Bundle::Odta(s));
    }

    #[test]
    fn random_weak_roundtrips(seed in any::<u64>(), q in 1usize..4, sg in 1usize..4, g in 1usize..4) {
        let mut rng = gen::rng(seed);
        let s = gen::random_weak_odta(&mut rng, q, &gen::symbols("s", sg), g);
        check(&Bundle::Weak(s));
    }

    #[test]
    fn random_extended_roundtrips(seed in any::<u64>(), cs in proptest::collection::vec((-3i64..4, -3i64..4, 0u8..3, -5i64..6), 0..4)) {
        let mut rng = gen::rng(seed);
        let w = gen::random_weak_odta(&mut rng, 2, &gen::symbols("s", 2), 2);
        let mut xi = PresburgerFormula::new();
        let names = w.output().names().to_vec();
        for (a, b, c, r) in cs {
            let x = xi.var(Key::symbol(names[1].clone()));
            let y = xi.var(Key::class(format!("{{{}}}", names[0])));
            let t = [(x, a), (y, b)];
            xi.add(match c { 0 => Formula::eq(t, r), 1 => Formula::le(t, r), _ => Formula::ge(t, r) });
        }
        check(&Bundle::Extended(ExtendedWeakOdta::new(w, xi).unwrap()));
    }
}

#[test]
fn odta_without_kind_is_inferred() {
    let s = write_bundle(&Bundle::Odta(odta::odta::fixtures::distinct_with_max())).unwrap();
    let stripped = s.replacen("[kind]\nodta\n", "", 1);
    assert_eq!(parse_bundle(&stripped).unwrap().kind(), "odta");
}

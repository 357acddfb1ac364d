use proptest::prelude::*;
use shifteq_core::{
    build_product_relation, canonicalize, certificate, components, compose, extract_cocycle, group_classes,
    invariant, is_canonical, isomorphic, shift_equivalent, triples_equal, PowerSequence, Relation,
};

fn relation_on(n: usize) -> impl Strategy<Value = Relation> {
    proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
        let mut r = Relation::empty(n);
        for (k, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            r.insert(k / n, k % n);
        }
        r
    })
}

fn relation(max_n: usize) -> impl Strategy<Value = Relation> {
    (0..=max_n).prop_flat_map(relation_on)
}

fn relation_and_permutation(max_n: usize) -> impl Strategy<Value = (Relation, Vec<usize>)> {
    relation(max_n).prop_flat_map(|r| {
        let n = r.size();
        (Just(r), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn powers_add(r in relation(6), m in 0usize..8, n in 0usize..8) {
        prop_assert_eq!(compose(&r.power(n), &r.power(m)).unwrap(), r.power(m + n));
    }

    #[test]
    fn composition_is_associative((r, s, t) in (0usize..=5).prop_flat_map(|n| (relation_on(n), relation_on(n), relation_on(n)))) {
        let left = compose(&t, &compose(&s, &r).unwrap()).unwrap();
        let right = compose(&compose(&t, &s).unwrap(), &r).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn memoised_powers_match_direct_powers(r in relation(6), m in 0usize..40) {
        let seq = PowerSequence::new(&r);
        prop_assert_eq!(seq.power(m), &r.power(m));
    }

    #[test]
    fn canonical_form_is_canonical_and_idempotent(r in relation(7)) {
        let c = canonicalize(&r).canonical.into_relation();
        prop_assert!(is_canonical(&c));
        let again = canonicalize(&c).canonical.into_relation();
        prop_assert!(isomorphic(&c, &again).is_some());
    }

    #[test]
    fn relation_is_equivalent_to_its_canonical_form(r in relation(6)) {
        let c = canonicalize(&r).canonical.into_relation();
        prop_assert!(shift_equivalent(&r, &c).unwrap().is_some());
    }

    #[test]
    fn isomorphism_witness_is_valid((r, perm) in relation_and_permutation(7)) {
        let s = r.permute(&perm).unwrap();
        let g = isomorphic(&r, &s).expect("relabelled relation is isomorphic");
        prop_assert_eq!(r.permute(&g).unwrap(), s);
    }

    #[test]
    fn match_witness_is_valid((r, perm) in relation_and_permutation(6)) {
        let t1 = invariant(&r).unwrap().triple;
        let t2 = invariant(&r.permute(&perm).unwrap()).unwrap().triple;
        let m = triples_equal(&t1, &t2).expect("conjugate relations match");
        let pulled = t2.cocycle().pull_back(&m.phi).unwrap();
        let delta = shifteq_core::coboundary(t1.order(), t1.period(), &m.theta).unwrap();
        prop_assert_eq!(t1.cocycle().add(&delta).unwrap(), pulled);
    }

    #[test]
    fn certificates_decide_equality(r in relation(4), s in relation(4)) {
        let (t1, t2) = (invariant(&r).unwrap().triple, invariant(&s).unwrap().triple);
        let same = certificate(&t1, 1 << 20).unwrap() == certificate(&t2, 1 << 20).unwrap();
        prop_assert_eq!(same, triples_equal(&t1, &t2).is_some());
    }

    #[test]
    fn power_profile_is_minimal(r in relation(6)) {
        let prof = PowerSequence::new(&r).profile();
        let (i, j) = (prof.first_repeat, prof.loop_length);
        prop_assert_eq!(r.power(i), r.power(i + j));
        for a in 1..i + j {
            for b in a + 1..i + j {
                prop_assert_ne!(r.power(a), r.power(b));
            }
        }
        prop_assert_eq!(prof.period, j);
        prop_assert!(prof.eventual_period >= i && prof.eventual_period.is_multiple_of(j));
        prop_assert!(prof.eventual_period < i + j);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn grouping_agrees_with_pairwise_decisions(rs in proptest::collection::vec(relation(4), 1..8)) {
        let classes = group_classes(&rs).unwrap();
        let mut class_of = vec![0; rs.len()];
        for (k, c) in classes.iter().enumerate() {
            for &i in c {
                class_of[i] = k;
            }
        }
        for i in 0..rs.len() {
            for j in 0..rs.len() {
                let eq = shift_equivalent(&rs[i], &rs[j]).unwrap().is_some();
                prop_assert_eq!(eq, class_of[i] == class_of[j]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reverse_distributes_over_composition((r, s) in (0usize..=6).prop_flat_map(|n| (relation_on(n), relation_on(n)))) {
        prop_assert_eq!(compose(&s, &r).unwrap().reverse(), compose(&r.reverse(), &s.reverse()).unwrap());
    }

    #[test]
    fn idempotent_powers_coincide(r in relation(6)) {
        let prof = PowerSequence::new(&r).profile();
        let rq = r.power(prof.eventual_period);
        for m in 1..=2 * (prof.first_repeat + prof.loop_length) {
            let rm = r.power(m);
            if compose(&rm, &rm).unwrap() == rm {
                prop_assert_eq!(&rm, &rq);
            }
        }
    }

    #[test]
    fn canonical_components_are_cycles_of_their_period(r in relation(7)) {
        let c = canonicalize(&r).canonical;
        let poset = c.poset();
        let rel = c.relation();
        let q = PowerSequence::new(rel).profile().eventual_period;
        for a in 0..poset.component_count() {
            let pa = poset.component_period(a);
            let (sub, _) = rel.restrict(poset.members(a)).unwrap();
            prop_assert_eq!(sub.power(pa), Relation::identity(sub.size()));
            for &x in poset.members(a) {
                let first = (1..).find(|&n| rel.power(q + n).contains(x, x)).unwrap();
                prop_assert_eq!(first, pa);
            }
        }
    }

    #[test]
    fn extracted_cocycles_have_subgroup_diagonals(r in relation(7)) {
        let powers = PowerSequence::new(&r);
        let c = extract_cocycle(&powers, &components(&powers)).unwrap();
        for a in 0..c.component_count() {
            prop_assert!(c.diagonal(a).is_subgroup());
        }
        for ((a, b), v) in c.values() {
            prop_assert_eq!(&c.diagonal(a).add(v).unwrap(), v);
            prop_assert_eq!(&v.add(c.diagonal(b)).unwrap(), v);
        }
    }

    #[test]
    fn product_relation_is_periodic_and_recurrent(r in relation(6)) {
        let powers = PowerSequence::new(&r);
        let c = extract_cocycle(&powers, &components(&powers)).unwrap();
        let p = c.modulus();
        let bar = build_product_relation(&c);
        for i in 1..=2 * p {
            for j in 1..=2 * p - i {
                prop_assert_eq!(compose(&bar.power(j), &bar.power(i)).unwrap(), bar.power(i + j));
            }
            prop_assert_eq!(bar.power(p + i), bar.power(i));
        }
        let bq = bar.power(p);
        prop_assert!((0..bar.size()).all(|x| bq.contains(x, x)));
    }
}

//! The classes of all 512 relations on three points, checked against the
//! brute-force decision.

use shifteq_core::{brute_force_shift_equivalent, group_classes, OracleBudget, Relation};

fn oracle(r: &Relation, s: &Relation) -> bool {
    brute_force_shift_equivalent(r, s, OracleBudget::default())
        .unwrap()
        .is_some()
}

#[test]
fn three_point_partition_matches_oracle() {
    let all: Vec<Relation> = (0..512).map(|b| Relation::from_bits(3, b)).collect();
    let classes = group_classes(&all).unwrap();
    let mut covered = vec![false; all.len()];
    for class in &classes {
        for &i in class {
            assert!(!covered[i]);
            covered[i] = true;
            assert!(
                oracle(&all[class[0]], &all[i]),
                "{i} not equivalent to {}",
                class[0]
            );
        }
    }
    assert!(covered.iter().all(|&c| c));
    // Membership in a class is transitive, so distinct representatives
    // being inequivalent settles every cross-class pair.
    for (k, a) in classes.iter().enumerate() {
        for b in &classes[k + 1..] {
            assert!(
                !oracle(&all[a[0]], &all[b[0]]),
                "{} and {} are equivalent",
                a[0],
                b[0]
            );
        }
    }
}

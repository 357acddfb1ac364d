//! Inputs shared by the benchmarks.

use shifteq_core::{random_relations, Relation};

/// `count` relations on `n` points at density 0.3.
pub fn corpus(n: usize, count: usize, seed: u64) -> Vec<Relation> {
    random_relations(n, 0.3, seed, count).expect("density in range")
}

/// A relation on `n` points whose recurrent part is a few long cycles, so
/// periods and components are nontrivial.
pub fn cycles(n: usize) -> Relation {
    let mut r = Relation::empty(n);
    let lengths = [n / 2, n / 3, n - n / 2 - n / 3];
    let mut start = 0;
    for &l in lengths.iter().filter(|&&l| l > 0) {
        for t in 0..l {
            r.insert(start + t, start + (t + 1) % l);
        }
        if start + l < n {
            r.insert(start, start + l);
        }
        start += l;
    }
    r
}

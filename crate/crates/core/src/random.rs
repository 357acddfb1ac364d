//! Reproducible pseudo-random relations.
//!
//! The generator is SplitMix64 (state seeded directly with the 64-bit seed).
//! Unit draws are `(next_u64() >> 11) · 2^-53`. A relation on `n` points
//! consumes `n²` draws in row-major order and includes pair `(x, y)` iff its
//! draw is `< density`. For a batch of `count` relations, relation `k` is
//! generated from a fresh SplitMix64 seeded with the `k`-th output of a
//! master SplitMix64 seeded with the batch seed.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::Error;
use crate::relation::Relation;

/// Thin wrapper pinning the draw rules used across the crate.
pub struct Rng(SplitMix64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// `next_u64() mod bound`; `bound` must be positive.
    pub fn below(&mut self, bound: usize) -> usize {
        (self.next_u64() % bound as u64) as usize
    }

    /// Fisher–Yates: for `i` from `n-1` down to 1, swap `i` with
    /// `below(i + 1)`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.below(i + 1);
            perm.swap(i, j);
        }
        perm
    }

    pub fn relation(&mut self, n: usize, density: f64) -> Relation {
        let mut r = Relation::empty(n);
        for x in 0..n {
            for y in 0..n {
                if self.unit() < density {
                    r.insert(x, y);
                }
            }
        }
        r
    }
}

fn check_density(density: f64) -> Result<(), Error> {
    if (0.0..=1.0).contains(&density) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "density {density} outside [0, 1]"
        )))
    }
}

pub fn random_relation(n: usize, density: f64, seed: u64) -> Result<Relation, Error> {
    check_density(density)?;
    Ok(Rng::new(seed).relation(n, density))
}

pub fn random_relations(n: usize, density: f64, seed: u64, count: usize) -> Result<Vec<Relation>, Error> {
    check_density(density)?;
    let mut master = Rng::new(seed);
    Ok((0..count)
        .map(|_| Rng::new(master.next_u64()).relation(n, density))
        .collect())
}

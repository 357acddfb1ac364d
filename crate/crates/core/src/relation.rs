//! Finite relations on `{0, ..., n-1}` and the eventually periodic structure
//! of their power sequence.
//!
//! Convention: entry `(x, y)` means `y ∈ R(x)`, so row `x` is the image of
//! `x`. Composition `S∘R` applies `R` first; in matrix terms it is the
//! Boolean product `M_R · M_S`.

use std::collections::HashMap;
use std::fmt;

use crate::error::Error;
use crate::matrix::BoolMatrix;

/// A relation on an `n`-point set.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    matrix: BoolMatrix,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Self {
            matrix: BoolMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: BoolMatrix::identity(n),
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            matrix: BoolMatrix::full(n, n),
        }
    }

    /// The cyclic permutation `x ↦ x + 1 (mod n)`.
    pub fn cycle(n: usize) -> Self {
        let mut matrix = BoolMatrix::zeros(n, n);
        for x in 0..n {
            matrix.set(x, (x + 1) % n, true);
        }
        Self { matrix }
    }

    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Ok(Self {
            matrix: BoolMatrix::from_pairs(n, n, pairs)?,
        })
    }

    /// Row-major bit pattern over `n * n <= 64` entries; see
    /// [`BoolMatrix::from_bits`].
    pub fn from_bits(n: usize, pattern: u64) -> Self {
        Self {
            matrix: BoolMatrix::from_bits(n, n, pattern),
        }
    }

    pub fn from_matrix(matrix: BoolMatrix) -> Result<Self, Error> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::DimensionMismatch {
                left: matrix.rows(),
                right: matrix.cols(),
            });
        }
        Ok(Self { matrix })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    #[inline]
    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.matrix.get(x, y)
    }

    pub fn insert(&mut self, x: usize, y: usize) {
        self.matrix.set(x, y, true);
    }

    /// `R(x)`, ascending.
    pub fn image(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        self.matrix.row(x)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.matrix.pairs()
    }

    pub fn out_degree(&self, x: usize) -> usize {
        self.matrix.row_count(x)
    }

    pub fn in_degree(&self, y: usize) -> usize {
        self.matrix.col_count(y)
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.is_empty()
    }

    pub fn matrix(&self) -> &BoolMatrix {
        &self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut BoolMatrix {
        &mut self.matrix
    }

    pub fn into_matrix(self) -> BoolMatrix {
        self.matrix
    }

    /// `R^{-1}`.
    pub fn reverse(&self) -> Relation {
        Self {
            matrix: self.matrix.transpose(),
        }
    }

    pub fn union(&self, other: &Relation) -> Result<Relation, Error> {
        Ok(Self {
            matrix: self.matrix.union(&other.matrix)?,
        })
    }

    pub fn intersection(&self, other: &Relation) -> Result<Relation, Error> {
        Ok(Self {
            matrix: self.matrix.intersection(&other.matrix)?,
        })
    }

    /// `R^n` by repeated squaring.
    pub fn power(&self, mut n: usize) -> Relation {
        let mut acc = Relation::identity(self.size());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = compose(&base, &acc).expect("equal sizes");
            }
            n >>= 1;
            if n > 0 {
                base = compose(&base, &base).expect("equal sizes");
            }
        }
        acc
    }

    /// Restriction to `subset × subset`, relabeled by the order-preserving
    /// bijection onto `0..k`. Also returns that bijection as the list of
    /// original indices (new index `i` is original point `remap[i]`).
    pub fn restrict(&self, subset: &[usize]) -> Result<(Relation, Vec<usize>), Error> {
        let mut remap = subset.to_vec();
        remap.sort_unstable();
        remap.dedup();
        if let Some(&bad) = remap.iter().find(|&&x| x >= self.size()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                size: self.size(),
            });
        }
        let matrix = self.matrix.submatrix(&remap, &remap);
        Ok((Self { matrix }, remap))
    }

    /// Conjugate `P∘R∘P^{-1}` by the permutation `perm` (point `x` becomes
    /// `perm[x]`).
    pub fn permute(&self, perm: &[usize]) -> Result<Relation, Error> {
        if perm.len() != self.size() {
            return Err(Error::DimensionMismatch {
                left: perm.len(),
                right: self.size(),
            });
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::IndexOutOfRange {
                    index: p,
                    size: perm.len(),
                });
            }
        }
        Relation::from_pairs(self.size(), self.pairs().map(|(x, y)| (perm[x], perm[y])))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation({}; ", self.size())?;
        f.debug_set().entries(self.pairs()).finish()?;
        f.write_str(")")
    }
}

/// `S∘R`: `(x, z)` is present iff some `y` has `(x, y) ∈ r` and `(y, z) ∈ s`.
pub fn compose(s: &Relation, r: &Relation) -> Result<Relation, Error> {
    if s.size() != r.size() {
        return Err(Error::DimensionMismatch {
            left: s.size(),
            right: r.size(),
        });
    }
    Ok(Relation {
        matrix: r.matrix.mul(&s.matrix)?,
    })
}

/// Where the power sequence `R^1, R^2, ...` first repeats and what periods
/// that implies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PowerProfile {
    /// `i`: the exponent of the first power that recurs.
    pub first_repeat: usize,
    /// `j`: `R^i = R^{i+j}` with no earlier duplicate.
    pub loop_length: usize,
    /// `q`: the smallest multiple of `j` with `q >= i`; `R^q ∘ R^q = R^q`.
    pub eventual_period: usize,
    /// `p`: the least `p >= 1` with `R^{q+p} = R^q`.
    pub period: usize,
}

impl fmt::Display for PowerProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "i={} j={} q={} p={}",
            self.first_repeat, self.loop_length, self.eventual_period, self.period
        )
    }
}

/// The memoized distinct powers `R^1, ..., R^{i+j-1}` of a relation.
///
/// Any `R^m` is served from the memo since `R^m = R^{i + (m - i) mod j}` for
/// `m >= i`. The empty relation on zero points gets the profile
/// `(1, 1, 1, 1)`.
#[derive(Clone, Debug)]
pub struct PowerSequence {
    identity: Relation,
    powers: Vec<Relation>,
    profile: PowerProfile,
}

impl PowerSequence {
    pub fn new(r: &Relation) -> Self {
        let mut seen: HashMap<Relation, usize> = HashMap::new();
        let mut powers = Vec::new();
        let mut current = r.clone();
        let mut exponent = 1;
        let (first_repeat, loop_length) = loop {
            if let Some(&i) = seen.get(&current) {
                break (i, exponent - i);
            }
            seen.insert(current.clone(), exponent);
            let next = compose(r, &current).expect("equal sizes");
            powers.push(std::mem::replace(&mut current, next));
            exponent += 1;
        };
        let eventual_period = first_repeat.div_ceil(loop_length) * loop_length;
        let mut seq = Self {
            identity: Relation::identity(r.size()),
            powers,
            profile: PowerProfile {
                first_repeat,
                loop_length,
                eventual_period,
                period: 0,
            },
        };
        let base = seq.power(eventual_period);
        let period = (1..=loop_length)
            .find(|&d| seq.power(eventual_period + d) == base)
            .expect("j itself always returns to R^q");
        seq.profile.period = period;
        seq
    }

    pub fn profile(&self) -> PowerProfile {
        self.profile
    }

    pub fn base(&self) -> &Relation {
        &self.powers[0]
    }

    pub fn size(&self) -> usize {
        self.identity.size()
    }

    /// `R^m` for any `m >= 0`.
    pub fn power(&self, m: usize) -> &Relation {
        if m == 0 {
            return &self.identity;
        }
        let i = self.profile.first_repeat;
        let j = self.profile.loop_length;
        let k = if m < i + j { m } else { i + (m - i) % j };
        &self.powers[k - 1]
    }

    /// `R^q`.
    pub fn eventual(&self) -> &Relation {
        self.power(self.profile.eventual_period)
    }

    /// `R̄ = R^{q+1}`.
    pub fn periodic_part(&self) -> &Relation {
        self.power(self.profile.eventual_period + 1)
    }
}

pub fn power_profile(r: &Relation) -> PowerProfile {
    PowerSequence::new(r).profile()
}

//! Cocycles on the component order with values in `L_p`, the monoid of
//! nonempty subsets of `Z/pZ` under Minkowski sum.
//!
//! Covers extraction from a relation and section, irreducibility and the
//! irreducible quotient, coboundaries and the cohomologous decision, and the
//! reconstruction of a canonical relation from a cocycle.

use std::collections::VecDeque;
use std::fmt;

use crate::error::Error;
use crate::relation::{PowerSequence, Relation};
use crate::structure::{CanonicalRelation, ComponentPoset};

/// A nonempty subset of `Z/pZ`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResidueSet {
    modulus: usize,
    bits: Vec<u64>,
}

/// Order and index of a subgroup of `Z/pZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubgroupData {
    pub order: usize,
    pub index: usize,
}

impl ResidueSet {
    pub fn new<I>(modulus: usize, members: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = usize>,
    {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        let mut set = Self::blank(modulus);
        for r in members {
            if r >= modulus {
                return Err(Error::ResidueOutOfRange { residue: r, modulus });
            }
            set.insert(r);
        }
        if set.is_blank() {
            return Err(Error::EmptyResidueSet);
        }
        Ok(set)
    }

    /// `{0}`, the monoid identity.
    pub fn zero(modulus: usize) -> Self {
        Self::singleton(modulus, 0)
    }

    /// `{r mod p}`.
    pub fn singleton(modulus: usize, r: usize) -> Self {
        assert!(modulus > 0, "modulus must be positive");
        let mut set = Self::blank(modulus);
        set.insert(r % modulus);
        set
    }

    pub fn all(modulus: usize) -> Self {
        Self::new(modulus, 0..modulus).expect("positive modulus")
    }

    fn blank(modulus: usize) -> Self {
        Self {
            modulus,
            bits: vec![0; modulus.div_ceil(64)],
        }
    }

    fn is_blank(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    fn insert(&mut self, r: usize) {
        self.bits[r / 64] |= 1 << (r % 64);
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn contains(&self, r: usize) -> bool {
        r < self.modulus && self.bits[r / 64] >> (r % 64) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.modulus).filter(|&r| self.contains(r))
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Always false; kept for the `len`/`is_empty` convention.
    pub fn is_empty(&self) -> bool {
        false
    }

    fn check_modulus(&self, other: &ResidueSet) -> Result<(), Error> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(())
    }

    /// `F + G = { f + g : f ∈ F, g ∈ G }`.
    pub fn add(&self, other: &ResidueSet) -> Result<ResidueSet, Error> {
        self.check_modulus(other)?;
        let mut out = Self::blank(self.modulus);
        for f in self.iter() {
            for g in other.iter() {
                out.insert((f + g) % self.modulus);
            }
        }
        Ok(out)
    }

    /// `F + {d}`.
    pub fn shift(&self, d: usize) -> ResidueSet {
        let p = self.modulus;
        let mut out = Self::blank(p);
        for f in self.iter() {
            out.insert((f + d % p) % p);
        }
        out
    }

    pub fn is_subset(&self, other: &ResidueSet) -> bool {
        self.modulus == other.modulus && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    /// `None` when the intersection is empty.
    pub fn intersection(&self, other: &ResidueSet) -> Result<Option<ResidueSet>, Error> {
        self.check_modulus(other)?;
        let out = Self {
            modulus: self.modulus,
            bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a & b).collect(),
        };
        Ok((!out.is_blank()).then_some(out))
    }

    /// A nonempty `F` is a subgroup iff `F + F ⊆ F`.
    pub fn is_subgroup(&self) -> bool {
        self.add(self).expect("same modulus").is_subset(self)
    }

    pub fn subgroup_data(&self) -> Option<SubgroupData> {
        self.is_subgroup().then(|| SubgroupData {
            order: self.len(),
            index: self.modulus / self.len(),
        })
    }

    /// Image under `Z/pZ → Z/dZ` for a divisor `d` of `p`.
    pub fn reduce(&self, divisor: usize) -> Result<ResidueSet, Error> {
        if divisor == 0 || !self.modulus.is_multiple_of(divisor) {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: divisor,
            });
        }
        ResidueSet::new(divisor, self.iter().map(|r| r % divisor))
    }

    /// Preimage under `Z/pZ → Z/dZ` where `d` is this set's modulus and `p`
    /// a multiple of it.
    pub fn pull_back(&self, modulus: usize) -> Result<ResidueSet, Error> {
        if modulus == 0 || !modulus.is_multiple_of(self.modulus) {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: modulus,
            });
        }
        ResidueSet::new(modulus, (0..modulus).filter(|r| self.contains(r % self.modulus)))
    }
}

impl fmt::Debug for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ResidueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, r) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "}} mod {}", self.modulus)
    }
}

/// Checks that `order` is reflexive, antisymmetric and transitive.
pub fn check_partial_order(order: &Relation) -> Result<(), Error> {
    let m = order.size();
    for a in 0..m {
        if !order.contains(a, a) {
            return Err(Error::NotPartialOrder("not reflexive"));
        }
        for b in order.image(a) {
            if a != b && order.contains(b, a) {
                return Err(Error::NotPartialOrder("not antisymmetric"));
            }
            if order.image(b).any(|c| !order.contains(a, c)) {
                return Err(Error::NotPartialOrder("not transitive"));
            }
        }
    }
    Ok(())
}

/// A cocycle `ξ : R_≥ → L_p`, defined on every pair of the order including
/// the diagonal, with `ξ(a,b) + ξ(b,c) ⊆ ξ(a,c)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cocycle {
    modulus: usize,
    order: Relation,
    values: Vec<Option<ResidueSet>>,
}

impl Cocycle {
    /// Validates the order, that `values` covers exactly the order's pairs
    /// with the right modulus, and the cocycle condition.
    pub fn new<I>(modulus: usize, order: Relation, values: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = ((usize, usize), ResidueSet)>,
    {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        check_partial_order(&order)?;
        let m = order.size();
        let mut table = vec![None; m * m];
        for ((a, b), v) in values {
            if a >= m || b >= m {
                return Err(Error::IndexOutOfRange {
                    index: a.max(b),
                    size: m,
                });
            }
            if !order.contains(a, b) {
                return Err(Error::InvalidCocycle(format!(
                    "value given for incomparable pair ({a}, {b})"
                )));
            }
            if v.modulus() != modulus {
                return Err(Error::ModulusMismatch {
                    left: modulus,
                    right: v.modulus(),
                });
            }
            table[a * m + b] = Some(v);
        }
        let c = Self {
            modulus,
            order,
            values: table,
        };
        c.check_condition()?;
        Ok(c)
    }

    pub fn from_fn<F>(modulus: usize, order: Relation, mut f: F) -> Result<Self, Error>
    where
        F: FnMut(usize, usize) -> ResidueSet,
    {
        let pairs: Vec<_> = order.pairs().collect();
        Self::new(modulus, order, pairs.into_iter().map(|(a, b)| ((a, b), f(a, b))))
    }

    fn check_condition(&self) -> Result<(), Error> {
        let m = self.component_count();
        for (a, b) in self.order.pairs() {
            if self.values[a * m + b].is_none() {
                return Err(Error::InvalidCocycle(format!(
                    "missing value for pair ({a}, {b})"
                )));
            }
        }
        for (a, b) in self.order.pairs() {
            let ab = self.value(a, b).expect("checked");
            for c in self.order.image(b) {
                let sum = ab.add(self.value(b, c).expect("checked"))?;
                if !sum.is_subset(self.value(a, c).expect("transitive order")) {
                    return Err(Error::InvalidCocycle(format!(
                        "ξ({a},{b}) + ξ({b},{c}) ⊄ ξ({a},{c})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn component_count(&self) -> usize {
        self.order.size()
    }

    pub fn order(&self) -> &Relation {
        &self.order
    }

    /// `ξ(a,b)`, or `None` when `a` and `b` are not comparable as `a ≥ b`.
    pub fn value(&self, a: usize, b: usize) -> Option<&ResidueSet> {
        let m = self.component_count();
        if a >= m || b >= m {
            return None;
        }
        self.values[a * m + b].as_ref()
    }

    pub fn diagonal(&self, a: usize) -> &ResidueSet {
        self.value(a, a).expect("order is reflexive")
    }

    /// All `((a, b), ξ(a,b))`, lexicographic in `(a, b)`.
    pub fn values(&self) -> impl Iterator<Item = ((usize, usize), &ResidueSet)> + '_ {
        self.order
            .pairs()
            .map(move |(a, b)| ((a, b), self.value(a, b).expect("validated")))
    }

    /// The index `p_a` of each diagonal subgroup.
    pub fn component_periods(&self) -> Vec<usize> {
        (0..self.component_count())
            .map(|a| self.modulus / self.diagonal(a).len())
            .collect()
    }

    /// `ζ = ⋂_a ξ(a,a)`; all of `Z/pZ` when there are no components.
    pub fn diagonal_intersection(&self) -> ResidueSet {
        (0..self.component_count()).fold(ResidueSet::all(self.modulus), |acc, a| {
            acc.intersection(self.diagonal(a))
                .expect("same modulus")
                .expect("subgroups share 0")
        })
    }

    pub fn is_irreducible(&self) -> bool {
        self.diagonal_intersection().len() == 1
    }

    /// Pointwise sum `ξ + ξ'`.
    pub fn add(&self, other: &Cocycle) -> Result<Cocycle, Error> {
        self.check_compatible(other)?;
        let pairs: Vec<_> = self.order.pairs().collect();
        let mut values = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            values.push(((a, b), self.value(a, b).unwrap().add(other.value(a, b).unwrap())?));
        }
        Cocycle::new(self.modulus, self.order.clone(), values)
    }

    fn check_compatible(&self, other: &Cocycle) -> Result<(), Error> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        if self.order != other.order {
            return Err(Error::PosetMismatch);
        }
        Ok(())
    }

    /// `ξ ∘ (φ × φ)`: the cocycle whose value at `(a, b)` is
    /// `ξ(φ[a], φ[b])`. `φ` must be an order isomorphism onto this
    /// cocycle's order.
    pub fn pull_back(&self, phi: &[usize]) -> Result<Cocycle, Error> {
        let m = self.component_count();
        if phi.len() != m {
            return Err(Error::DimensionMismatch {
                left: phi.len(),
                right: m,
            });
        }
        if let Some(&bad) = phi.iter().find(|&&b| b >= m) {
            return Err(Error::IndexOutOfRange { index: bad, size: m });
        }
        let order = Relation::from_pairs(
            m,
            (0..m)
                .flat_map(|a| (0..m).map(move |b| (a, b)))
                .filter(|&(a, b)| self.order.contains(phi[a], phi[b])),
        )?;
        // Cocycle::new re-validates that the pulled-back order is a partial
        // order, which fails if φ is not injective.
        Cocycle::from_fn(self.modulus, order, |a, b| {
            self.value(phi[a], phi[b]).unwrap().clone()
        })
    }
}

impl fmt::Debug for Cocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cocycle(p={}", self.modulus)?;
        for ((a, b), v) in self.values() {
            write!(f, ", ξ({a},{b})={{")?;
            for (i, r) in v.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{r}")?;
            }
            f.write_str("}")?;
        }
        f.write_str(")")
    }
}

pub fn residue_add(f: &ResidueSet, g: &ResidueSet) -> Result<ResidueSet, Error> {
    f.add(g)
}

pub fn subgroup_data(f: &ResidueSet) -> Option<SubgroupData> {
    f.subgroup_data()
}

pub fn is_irreducible(c: &Cocycle) -> bool {
    c.is_irreducible()
}

/// `ξ(a,b) = { i : [σ(b)] ∩ R^{q+i}(σ(b)) ∩ R^q(σ(a)) ≠ ∅ }` for
/// `i ∈ Z/pZ`, over every pair of the poset's order.
pub fn extract_cocycle(powers: &PowerSequence, poset: &ComponentPoset) -> Result<Cocycle, Error> {
    let profile = powers.profile();
    let (q, p) = (profile.eventual_period, profile.period);
    let eventual = powers.eventual();
    let sigma = poset.section();
    let pairs: Vec<_> = poset.order().pairs().collect();
    let mut values = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        let (sa, sb) = (sigma[a], sigma[b]);
        let hits = (0..p).filter(|&i| {
            let shifted = powers.power(q + i);
            poset
                .members(b)
                .iter()
                .any(|&w| shifted.contains(sb, w) && eventual.contains(sa, w))
        });
        let value = ResidueSet::new(p, hits)
            .map_err(|_| Error::Internal(format!("empty cocycle value for comparable pair ({a}, {b})")))?;
        values.push(((a, b), value));
    }
    let c = Cocycle::new(p, poset.order().clone(), values)
        .map_err(|e| Error::Internal(format!("extracted values violate the cocycle condition: {e}")))?;
    if !c.is_irreducible() {
        return Err(Error::Internal("extracted cocycle is reducible".into()));
    }
    Ok(c)
}

/// The cocycle `ξ*` over `Z/p_*Z`, `p_*` the index of `ζ = ⋂ ξ(a,a)`.
pub fn irreducible_quotient(c: &Cocycle) -> Cocycle {
    let reduced = c.modulus / c.diagonal_intersection().len();
    Cocycle::from_fn(reduced, c.order.clone(), |a, b| {
        c.value(a, b).unwrap().reduce(reduced).expect("p_* divides p")
    })
    .expect("image of a cocycle is a cocycle")
}

/// `η(a,b) = {θ(b) − θ(a)}`.
pub fn coboundary(order: &Relation, modulus: usize, theta: &[usize]) -> Result<Cocycle, Error> {
    if theta.len() != order.size() {
        return Err(Error::DimensionMismatch {
            left: theta.len(),
            right: order.size(),
        });
    }
    if modulus == 0 {
        return Err(Error::ZeroModulus);
    }
    Cocycle::from_fn(modulus, order.clone(), |a, b| {
        ResidueSet::singleton(modulus, theta[b] % modulus + modulus - theta[a] % modulus)
    })
}

/// Finds `θ` with `c2(a,b) = c1(a,b) + {θ(b) − θ(a)}` for every pair, or
/// `None`. Both cocycles must share modulus and order.
///
/// `θ` is pinned to 0 at one root per connected component of the
/// comparability graph; the remaining values are found by backtracking with
/// forward propagation of the allowed differences.
pub fn cohomologous(c1: &Cocycle, c2: &Cocycle) -> Result<Option<Vec<usize>>, Error> {
    c1.check_compatible(c2)?;
    let m = c1.component_count();
    let p = c1.modulus;
    if (0..m).any(|a| c1.diagonal(a) != c2.diagonal(a)) {
        return Ok(None);
    }

    // allowed[a * m + b]: the d with c1(a,b) + {d} = c2(a,b), for a > b.
    let mut allowed: Vec<Option<Vec<bool>>> = vec![None; m * m];
    let mut neighbours = vec![Vec::new(); m];
    for (a, b) in c1.order.pairs().filter(|(a, b)| a != b) {
        let (v1, v2) = (c1.value(a, b).unwrap(), c2.value(a, b).unwrap());
        let ds: Vec<bool> = (0..p).map(|d| v1.shift(d) == *v2).collect();
        if !ds.iter().any(|&ok| ok) {
            return Ok(None);
        }
        allowed[a * m + b] = Some(ds);
        neighbours[a].push(b);
        neighbours[b].push(a);
    }

    let mut visit = Vec::with_capacity(m);
    let mut is_root = vec![false; m];
    let mut seen = vec![false; m];
    for root in 0..m {
        if seen[root] {
            continue;
        }
        is_root[root] = true;
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            visit.push(v);
            for &u in &neighbours[v] {
                if !std::mem::replace(&mut seen[u], true) {
                    queue.push_back(u);
                }
            }
        }
    }

    let domains: Vec<Vec<bool>> = (0..m)
        .map(|a| (0..p).map(|t| !is_root[a] || t == 0).collect())
        .collect();
    let mut solver = ThetaSearch {
        m,
        p,
        allowed: &allowed,
        neighbours: &neighbours,
        visit: &visit,
        theta: vec![usize::MAX; m],
    };
    Ok(solver.solve(0, domains).then_some(solver.theta))
}

struct ThetaSearch<'a> {
    m: usize,
    p: usize,
    allowed: &'a [Option<Vec<bool>>],
    neighbours: &'a [Vec<usize>],
    visit: &'a [usize],
    theta: Vec<usize>,
}

impl ThetaSearch<'_> {
    fn solve(&mut self, depth: usize, domains: Vec<Vec<bool>>) -> bool {
        let Some(&v) = self.visit.get(depth) else {
            return true;
        };
        'values: for t in (0..self.p).filter(|&t| domains[v][t]) {
            let mut next = domains.clone();
            for &u in &self.neighbours[v] {
                if self.theta[u] != usize::MAX {
                    continue;
                }
                // θ(u) ∈ t + D(v,u) when v > u, θ(u) ∈ t − D(u,v) when u > v.
                let (ds, sign_up) = match &self.allowed[v * self.m + u] {
                    Some(ds) => (ds, true),
                    None => (self.allowed[u * self.m + v].as_ref().expect("comparable"), false),
                };
                let mut any = false;
                for (s, slot) in next[u].iter_mut().enumerate() {
                    let d = if sign_up {
                        (s + self.p - t) % self.p
                    } else {
                        (t + self.p - s) % self.p
                    };
                    *slot &= ds[d];
                    any |= *slot;
                }
                if !any {
                    continue 'values;
                }
            }
            self.theta[v] = t;
            if self.solve(depth + 1, next) {
                return true;
            }
            self.theta[v] = usize::MAX;
        }
        false
    }
}

/// `R̄_ξ` on `X̄ × Z/pZ`: `(a,t) → (b,s)` iff `a ≥ b` and
/// `s − t − 1 ∈ ξ(a,b)`. Point `(a,t)` is index `a·p + t`.
pub fn build_product_relation(c: &Cocycle) -> Relation {
    let p = c.modulus;
    let mut r = Relation::empty(c.component_count() * p);
    for ((a, b), v) in c.values() {
        for t in 0..p {
            for d in v.iter() {
                let s = (t + 1 + d) % p;
                r.insert(a * p + t, b * p + s);
            }
        }
    }
    r
}

/// The canonical relation `ρ ∘ R̄_ξ ∘ ρ^{-1}` on `X̄_ξ = ⊔_a {a} × Z/p_aZ`,
/// with the point enumeration that produced it.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub canonical: CanonicalRelation,
    offsets: Vec<usize>,
    periods: Vec<usize>,
}

impl Reconstruction {
    /// Index of the point `(a, t mod p_a)`.
    pub fn point(&self, a: usize, t: usize) -> usize {
        self.offsets[a] + t % self.periods[a]
    }

    /// Inverse of [`Reconstruction::point`].
    pub fn label(&self, x: usize) -> (usize, usize) {
        let a = self.offsets.partition_point(|&o| o <= x) - 1;
        (a, x - self.offsets[a])
    }

    pub fn component_periods(&self) -> &[usize] {
        &self.periods
    }

    pub fn relation(&self) -> &Relation {
        self.canonical.relation()
    }
}

/// Reconstructs the canonical relation of a cocycle. A reducible cocycle is
/// replaced by its irreducible quotient first, giving period `p_*`.
pub fn reconstruct(c: &Cocycle) -> Result<Reconstruction, Error> {
    let quotient;
    let c = if c.is_irreducible() {
        c
    } else {
        quotient = irreducible_quotient(c);
        &quotient
    };
    let p = c.modulus;
    let periods = c.component_periods();
    let mut offsets = Vec::with_capacity(periods.len());
    let mut total = 0;
    for &pa in &periods {
        offsets.push(total);
        total += pa;
    }
    let mut relation = Relation::empty(total);
    for ((a, b), v) in c.values() {
        for t in 0..p {
            for d in v.iter() {
                let s = (t + 1 + d) % p;
                relation.insert(offsets[a] + t % periods[a], offsets[b] + s % periods[b]);
            }
        }
    }
    let canonical = CanonicalRelation::new(relation)
        .map_err(|e| Error::Internal(format!("reconstruction is not canonical: {e}")))?;
    if canonical.period() != p {
        return Err(Error::Internal(format!(
            "reconstruction has period {} instead of {p}",
            canonical.period()
        )));
    }
    Ok(Reconstruction {
        canonical,
        offsets,
        periods,
    })
}

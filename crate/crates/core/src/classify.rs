//! The invariant pipeline and the shift-equivalence decision.
//!
//! `invariant` runs: power profile, recurrent set, components and section,
//! cocycle extraction. Two invariants are equal when the periods match and an
//! order isomorphism of the component posets carries one cocycle to a
//! cohomologous copy of the other.

use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;

use crate::cocycle::{coboundary, cohomologous, reconstruct, Cocycle, ResidueSet};
use crate::error::Error;
use crate::relation::{PowerProfile, PowerSequence, Relation};
use crate::structure::{canonicalize_with, components, isomorphic, CanonicalRelation, ComponentPoset};

/// The complete invariant `(R_≥, p, [ξ])`, holding one irreducible
/// representative `ξ` of the class. Carries no point-level data.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvariantTriple {
    component_periods: Vec<usize>,
    cocycle: Cocycle,
}

impl InvariantTriple {
    pub fn new(cocycle: Cocycle) -> Result<Self, Error> {
        if !cocycle.is_irreducible() {
            return Err(Error::InvalidCocycle(
                "invariant cocycle must be irreducible".into(),
            ));
        }
        Ok(Self {
            component_periods: cocycle.component_periods(),
            cocycle,
        })
    }

    /// Like [`InvariantTriple::new`], also checking stated period and
    /// component periods against the cocycle.
    pub fn from_parts(period: usize, component_periods: Vec<usize>, cocycle: Cocycle) -> Result<Self, Error> {
        if cocycle.modulus() != period {
            return Err(Error::ModulusMismatch {
                left: period,
                right: cocycle.modulus(),
            });
        }
        let t = Self::new(cocycle)?;
        if t.component_periods != component_periods {
            return Err(Error::InvalidCocycle(format!(
                "component periods {component_periods:?} differ from diagonal indices {:?}",
                t.component_periods
            )));
        }
        Ok(t)
    }

    /// The invariant of a relation with no recurrent points.
    pub fn empty() -> Self {
        Self::new(Cocycle::new(1, Relation::empty(0), []).expect("empty cocycle")).expect("irreducible")
    }

    pub fn period(&self) -> usize {
        self.cocycle.modulus()
    }

    pub fn component_count(&self) -> usize {
        self.component_periods.len()
    }

    pub fn component_periods(&self) -> &[usize] {
        &self.component_periods
    }

    pub fn order(&self) -> &Relation {
        self.cocycle.order()
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    /// Isomorphism-invariant summary used to bucket triples before search:
    /// period, then sorted `(p_a, |up-set|, |down-set|)`.
    pub fn pre_key(&self) -> (usize, Vec<(usize, usize, usize)>) {
        let mut feats: Vec<_> = (0..self.component_count()).map(|a| self.features(a)).collect();
        feats.sort_unstable();
        (self.period(), feats)
    }

    fn features(&self, a: usize) -> (usize, usize, usize) {
        let order = self.order();
        (self.component_periods[a], order.in_degree(a), order.out_degree(a))
    }
}

/// Everything `invariant` computes along the way.
#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub triple: InvariantTriple,
    pub canonical: CanonicalRelation,
    pub profile: PowerProfile,
    /// Components of the input relation with the section used.
    pub poset: ComponentPoset,
    /// For each input point, its point in `canonical`, or `None` if
    /// transient.
    pub provenance: Vec<Option<usize>>,
}

pub fn invariant(r: &Relation) -> Result<ClassificationReport, Error> {
    invariant_with(r, |poset| poset.section().to_vec())
}

/// Runs the pipeline with a custom section chosen from the default poset.
pub fn invariant_with<F>(r: &Relation, choose_section: F) -> Result<ClassificationReport, Error>
where
    F: FnOnce(&ComponentPoset) -> Vec<usize>,
{
    let powers = PowerSequence::new(r);
    let default = components(&powers);
    let section = choose_section(&default);
    let poset = default.with_section(section)?;
    let cocycle = crate::cocycle::extract_cocycle(&powers, &poset)?;
    let triple = InvariantTriple::new(cocycle)?;
    let canon = canonicalize_with(&powers);

    let rebuilt = reconstruct(triple.cocycle())?;
    if isomorphic(rebuilt.relation(), canon.canonical.relation()).is_none() {
        return Err(Error::Internal(
            "reconstruction from the cocycle is not isomorphic to the canonical form".into(),
        ));
    }

    Ok(ClassificationReport {
        triple,
        canonical: canon.canonical,
        profile: powers.profile(),
        poset,
        provenance: canon.provenance,
    })
}

/// Witness that two triples are equal: `phi[a]` is the component of the
/// second triple matched to component `a` of the first, and
/// `ξ₂(φa, φb) = ξ₁(a,b) + {θ(b) − θ(a)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleMatch {
    pub phi: Vec<usize>,
    pub theta: Vec<usize>,
}

pub fn triples_equal(t1: &InvariantTriple, t2: &InvariantTriple) -> Option<TripleMatch> {
    if t1.period() != t2.period() || t1.pre_key() != t2.pre_key() {
        return None;
    }
    let m = t1.component_count();
    let feats2: Vec<_> = (0..m).map(|b| t2.features(b)).collect();
    let candidates: Vec<Vec<usize>> = (0..m)
        .map(|a| {
            let f = t1.features(a);
            (0..m).filter(|&b| feats2[b] == f).collect()
        })
        .collect();
    // Most constrained components first.
    let mut visit: Vec<usize> = (0..m).collect();
    visit.sort_by_key(|&a| candidates[a].len());

    let mut search = PosetMatch {
        t1,
        t2,
        candidates: &candidates,
        visit: &visit,
        phi: vec![usize::MAX; m],
        used: vec![false; m],
        found: None,
    };
    search.extend(0);
    search.found
}

struct PosetMatch<'a> {
    t1: &'a InvariantTriple,
    t2: &'a InvariantTriple,
    candidates: &'a [Vec<usize>],
    visit: &'a [usize],
    phi: Vec<usize>,
    used: Vec<bool>,
    found: Option<TripleMatch>,
}

impl PosetMatch<'_> {
    fn extend(&mut self, depth: usize) -> bool {
        let Some(&a) = self.visit.get(depth) else {
            let pulled = self
                .t2
                .cocycle()
                .pull_back(&self.phi)
                .expect("phi is an order isomorphism");
            return match cohomologous(self.t1.cocycle(), &pulled) {
                Ok(Some(theta)) => {
                    self.found = Some(TripleMatch {
                        phi: self.phi.clone(),
                        theta,
                    });
                    true
                }
                _ => false,
            };
        };
        let (o1, o2) = (self.t1.order(), self.t2.order());
        for &b in &self.candidates[a] {
            if self.used[b] {
                continue;
            }
            let consistent = self.visit[..depth].iter().all(|&c| {
                let d = self.phi[c];
                o1.contains(a, c) == o2.contains(b, d) && o1.contains(c, a) == o2.contains(d, b)
            });
            if !consistent {
                continue;
            }
            self.phi[a] = b;
            self.used[b] = true;
            if self.extend(depth + 1) {
                return true;
            }
            self.used[b] = false;
            self.phi[a] = usize::MAX;
        }
        false
    }
}

#[derive(Clone, Debug)]
pub struct EquivalenceWitness {
    pub matching: TripleMatch,
    pub left: CanonicalRelation,
    pub right: CanonicalRelation,
}

pub fn shift_equivalent(r: &Relation, s: &Relation) -> Result<Option<EquivalenceWitness>, Error> {
    let (ir, is) = (invariant(r)?, invariant(s)?);
    Ok(
        triples_equal(&ir.triple, &is.triple).map(|matching| EquivalenceWitness {
            matching,
            left: ir.canonical,
            right: is.canonical,
        }),
    )
}

/// Partitions indices of `rs` into shift-equivalence classes. Each class is
/// sorted; classes are ordered by smallest member.
pub fn group_classes(rs: &[Relation]) -> Result<Vec<Vec<usize>>, Error> {
    let triples: Vec<InvariantTriple> = rs
        .par_iter()
        .map(|r| invariant(r).map(|rep| rep.triple))
        .collect::<Result<_, _>>()?;
    Ok(group_triples(&triples))
}

/// [`group_classes`] over precomputed invariants.
pub fn group_triples(triples: &[InvariantTriple]) -> Vec<Vec<usize>> {
    let mut buckets: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    for (i, t) in triples.iter().enumerate() {
        buckets.entry(t.pre_key()).or_default().push(i);
    }
    let mut uf = UnionFind::<usize>::new(triples.len());
    for members in buckets.values() {
        let mut reps: Vec<usize> = Vec::new();
        for &i in members {
            match reps
                .iter()
                .find(|&&j| triples_equal(&triples[j], &triples[i]).is_some())
            {
                Some(&j) => {
                    uf.union(j, i);
                }
                None => reps.push(i),
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..triples.len() {
        classes.entry(uf.find(i)).or_default().push(i);
    }
    let mut out: Vec<Vec<usize>> = classes.into_values().collect();
    out.sort_unstable_by_key(|c| c[0]);
    out
}

/// Lexicographically least encoding of a triple over all relabelings of the
/// components and all coboundary shifts. Equal certificates iff
/// [`triples_equal`] succeeds. Refuses when the search space
/// (`m! · p^(m - roots)`) exceeds `limit`.
pub fn certificate(t: &InvariantTriple, limit: u128) -> Result<String, Error> {
    let m = t.component_count();
    let p = t.period();
    let order = t.order();

    // θ is free except one pinned root per comparability component.
    let mut root_of = vec![usize::MAX; m];
    for a in 0..m {
        if root_of[a] != usize::MAX {
            continue;
        }
        let mut stack = vec![a];
        root_of[a] = a;
        while let Some(v) = stack.pop() {
            for (u, root) in root_of.iter_mut().enumerate() {
                if *root == usize::MAX && (order.contains(v, u) || order.contains(u, v)) {
                    *root = a;
                    stack.push(u);
                }
            }
        }
    }
    let free: Vec<usize> = (0..m).filter(|&a| root_of[a] != a).collect();

    let size = (1..=m as u128)
        .try_fold(1u128, |acc, k| acc.checked_mul(k))
        .and_then(|f| {
            (p as u128)
                .checked_pow(free.len() as u32)
                .and_then(|s| f.checked_mul(s))
        });
    match size {
        Some(s) if s <= limit => {}
        Some(s) => return Err(Error::SearchTooLarge(s)),
        None => return Err(Error::SearchTooLarge(u128::MAX)),
    }

    let mut best: Option<Vec<usize>> = None;
    let mut theta = vec![0usize; m];
    loop {
        let shifted = t
            .cocycle()
            .add(&coboundary(order, p, &theta)?)
            .expect("coboundary shares order and modulus");
        for_each_permutation(m, &mut |perm| {
            let key = encode(&shifted, perm);
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        });
        // Odometer over the free θ coordinates.
        let mut k = 0;
        loop {
            if k == free.len() {
                return Ok(render(&best.expect("at least one labeling")));
            }
            theta[free[k]] += 1;
            if theta[free[k]] < p {
                break;
            }
            theta[free[k]] = 0;
            k += 1;
        }
    }
}

/// `perm[i]` is the original component placed at new label `i`.
fn encode(c: &Cocycle, perm: &[usize]) -> Vec<usize> {
    let m = perm.len();
    let mut key = vec![c.modulus(), m];
    key.extend(perm.iter().map(|&a| c.modulus() / c.diagonal(a).len()));
    for i in 0..m {
        for j in 0..m {
            match c.value(perm[i], perm[j]) {
                Some(v) => {
                    key.push(1 + v.len());
                    key.extend(v.iter());
                }
                None => key.push(0),
            }
        }
    }
    key
}

fn render(key: &[usize]) -> String {
    let (p, m) = (key[0], key[1]);
    let periods: Vec<String> = key[2..2 + m].iter().map(|x| x.to_string()).collect();
    let mut out = format!("p={p};pa={}", periods.join(","));
    let mut pos = 2 + m;
    let mut cells = Vec::new();
    for i in 0..m {
        for j in 0..m {
            let tag = key[pos];
            pos += 1;
            if tag > 0 {
                let vals: Vec<String> = key[pos..pos + tag - 1].iter().map(|x| x.to_string()).collect();
                pos += tag - 1;
                cells.push(format!("{i}.{j}:{}", vals.join(",")));
            }
        }
    }
    out.push_str(";xi=");
    out.push_str(&cells.join("|"));
    out
}

fn for_each_permutation(m: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(k: usize, perm: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if k == perm.len() {
            f(perm);
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            rec(k + 1, perm, f);
            perm.swap(k, i);
        }
    }
    let mut perm: Vec<usize> = (0..m).collect();
    rec(0, &mut perm, f);
}

/// Residue sets of a cocycle in triple order, used in tests and formats.
pub fn cocycle_value_lists(c: &Cocycle) -> Vec<((usize, usize), Vec<usize>)> {
    c.values().map(|(ab, v)| (ab, v.iter().collect())).collect()
}

/// Builds a triple from explicit order pairs (diagonal implied) and values.
pub fn triple_from_values(
    period: usize,
    component_count: usize,
    values: &[((usize, usize), &[usize])],
) -> Result<InvariantTriple, Error> {
    let order = Relation::from_pairs(component_count, values.iter().map(|&(ab, _)| ab))?;
    let mut sets = Vec::with_capacity(values.len());
    for &(ab, v) in values {
        sets.push((ab, ResidueSet::new(period, v.iter().copied())?));
    }
    InvariantTriple::new(Cocycle::new(period, order, sets)?)
}

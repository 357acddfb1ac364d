//! Recurrence, strongly connected components, the `≡_R` quotient and the
//! canonical form.

use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::error::Error;
use crate::relation::{PowerSequence, Relation};

/// `⋃_{n≥1} R^n` by Warshall's algorithm over row bitsets.
pub fn transitive_reach(r: &Relation) -> Relation {
    let n = r.size();
    let mut closure = r.clone();
    for k in 0..n {
        for x in 0..n {
            if closure.contains(x, k) {
                closure.matrix_mut().or_row_into(k, x);
            }
        }
    }
    closure
}

/// Points `x` with `x ∈ R^q(x)`, ascending.
pub fn recurrent_set(powers: &PowerSequence) -> Vec<usize> {
    let eventual = powers.eventual();
    (0..powers.size()).filter(|&x| eventual.contains(x, x)).collect()
}

/// Strongly connected components of `r` as point lists, each sorted, and the
/// list sorted by smallest member.
pub(crate) fn strong_components(r: &Relation) -> Vec<Vec<usize>> {
    let mut graph = DiGraph::<(), ()>::with_capacity(r.size(), 0);
    let nodes: Vec<_> = (0..r.size()).map(|_| graph.add_node(())).collect();
    for (x, y) in r.pairs() {
        graph.add_edge(nodes[x], nodes[y], ());
    }
    let mut comps: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|v| v.index()).collect();
            c.sort_unstable();
            c
        })
        .collect();
    comps.sort_unstable_by_key(|c| c[0]);
    comps
}

/// The strongly connected components of the recurrent points with a chosen
/// representative for each, the per-component periods `p_a` and the induced
/// partial order `R_≥`.
///
/// Component ids are assigned in order of smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentPoset {
    member_of: Vec<Option<usize>>,
    members: Vec<Vec<usize>>,
    section: Vec<usize>,
    component_period: Vec<usize>,
    order: Relation,
}

impl ComponentPoset {
    pub fn component_count(&self) -> usize {
        self.members.len()
    }

    /// Number of points of the underlying relation.
    pub fn point_count(&self) -> usize {
        self.member_of.len()
    }

    /// Component of `x`, or `None` for transient points.
    pub fn member_of(&self, x: usize) -> Option<usize> {
        self.member_of[x]
    }

    pub fn members(&self, a: usize) -> &[usize] {
        &self.members[a]
    }

    pub fn section(&self) -> &[usize] {
        &self.section
    }

    pub fn representative(&self, a: usize) -> usize {
        self.section[a]
    }

    pub fn component_period(&self, a: usize) -> usize {
        self.component_period[a]
    }

    pub fn component_periods(&self) -> &[usize] {
        &self.component_period
    }

    /// `R_≥` on component ids: `(a, b)` present iff `a ≥ b`.
    pub fn order(&self) -> &Relation {
        &self.order
    }

    /// The same poset with another choice of representatives.
    pub fn with_section(&self, section: Vec<usize>) -> Result<Self, Error> {
        if section.len() != self.component_count() {
            return Err(Error::DimensionMismatch {
                left: section.len(),
                right: self.component_count(),
            });
        }
        for (a, &x) in section.iter().enumerate() {
            if x >= self.point_count() || self.member_of[x] != Some(a) {
                return Err(Error::InvalidSection {
                    component: a,
                    point: x,
                });
            }
        }
        Ok(Self {
            section,
            ..self.clone()
        })
    }
}

/// Builds the component poset with the smallest-index section.
pub fn components(powers: &PowerSequence) -> ComponentPoset {
    let r = powers.base();
    let recurrent = recurrent_set(powers);
    let (restricted, remap) = r.restrict(&recurrent).expect("recurrent points are in range");
    let members: Vec<Vec<usize>> = strong_components(&restricted)
        .into_iter()
        .map(|c| c.into_iter().map(|i| remap[i]).collect())
        .collect();

    let mut member_of = vec![None; r.size()];
    for (a, c) in members.iter().enumerate() {
        for &x in c {
            member_of[x] = Some(a);
        }
    }
    let section: Vec<usize> = members.iter().map(|c| c[0]).collect();

    let reach = transitive_reach(r);
    let m = members.len();
    let mut order = Relation::empty(m);
    for a in 0..m {
        for b in 0..m {
            if reach.contains(section[a], section[b]) {
                order.insert(a, b);
            }
        }
    }

    let profile = powers.profile();
    let component_period = section
        .iter()
        .map(|&x| {
            (1..=profile.period)
                .find(|&n| powers.power(profile.eventual_period + n).contains(x, x))
                .expect("a recurrent point returns within one period")
        })
        .collect();

    ComponentPoset {
        member_of,
        members,
        section,
        component_period,
        order,
    }
}

/// The `≡_R = R^q ∩ (R^q)^{-1}` classes of the recurrent points, each sorted,
/// listed by smallest member.
pub fn equiv_classes(powers: &PowerSequence) -> Vec<Vec<usize>> {
    let eventual = powers.eventual();
    let recurrent = recurrent_set(powers);
    let mut assigned = vec![false; powers.size()];
    let mut classes = Vec::new();
    for &x in &recurrent {
        if assigned[x] {
            continue;
        }
        let class: Vec<usize> = recurrent
            .iter()
            .copied()
            .filter(|&y| eventual.contains(x, y) && eventual.contains(y, x))
            .collect();
        for &y in &class {
            assigned[y] = true;
        }
        classes.push(class);
    }
    classes
}

/// Why a relation fails to be in canonical form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NotCanonical {
    /// Some point is not recurrent.
    TransientPoint { point: usize },
    /// The restriction to a component is not a single cycle.
    NotCyclicOnComponent { component: Vec<usize>, point: usize },
    /// `R^{p+1} ≠ R`.
    NotPeriodic { period: usize },
}

impl fmt::Display for NotCanonical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotCanonical::TransientPoint { point } => write!(f, "point {point} is not recurrent"),
            NotCanonical::NotCyclicOnComponent { component, point } => write!(
                f,
                "restriction to component {component:?} is not a cycle at point {point}"
            ),
            NotCanonical::NotPeriodic { period } => {
                write!(f, "R^(p+1) differs from R for period p = {period}")
            }
        }
    }
}

impl std::error::Error for NotCanonical {}

/// Checks the three canonical-form conditions in order.
pub fn check_canonical(r: &Relation) -> Result<(), NotCanonical> {
    let powers = PowerSequence::new(r);
    if let Some(point) = (0..r.size()).find(|&x| !powers.eventual().contains(x, x)) {
        return Err(NotCanonical::TransientPoint { point });
    }
    for comp in strong_components(r) {
        let (sub, _) = r.restrict(&comp).expect("in range");
        // A strongly connected permutation is a single cycle.
        if let Some(i) = (0..sub.size()).find(|&i| sub.out_degree(i) != 1 || sub.in_degree(i) != 1) {
            return Err(NotCanonical::NotCyclicOnComponent {
                point: comp[i],
                component: comp,
            });
        }
    }
    let period = powers.profile().period;
    if powers.power(period + 1) != r {
        return Err(NotCanonical::NotPeriodic { period });
    }
    Ok(())
}

pub fn is_canonical(r: &Relation) -> bool {
    check_canonical(r).is_ok()
}

/// A relation in canonical form together with its component poset and
/// period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalRelation {
    relation: Relation,
    poset: ComponentPoset,
    period: usize,
}

impl CanonicalRelation {
    pub fn new(relation: Relation) -> Result<Self, NotCanonical> {
        check_canonical(&relation)?;
        let powers = PowerSequence::new(&relation);
        Ok(Self {
            poset: components(&powers),
            period: powers.profile().period,
            relation,
        })
    }

    pub fn relation(&self) -> &Relation {
        &self.relation
    }

    pub fn poset(&self) -> &ComponentPoset {
        &self.poset
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn into_relation(self) -> Relation {
        self.relation
    }
}

/// Result of [`canonicalize`].
#[derive(Clone, Debug)]
pub struct Canonicalization {
    pub canonical: CanonicalRelation,
    /// For each original point, the canonical point its `≡_R` class became;
    /// `None` for transient points.
    pub provenance: Vec<Option<usize>>,
}

/// The relation induced by `R̄ = R^{q+1}` on the `≡_R` classes of `X_R`.
pub fn canonicalize(r: &Relation) -> Canonicalization {
    let powers = PowerSequence::new(r);
    canonicalize_with(&powers)
}

pub(crate) fn canonicalize_with(powers: &PowerSequence) -> Canonicalization {
    let classes = equiv_classes(powers);
    let mut provenance = vec![None; powers.size()];
    for (c, class) in classes.iter().enumerate() {
        for &x in class {
            provenance[x] = Some(c);
        }
    }
    let bar = powers.periodic_part();
    let mut quotient = Relation::empty(classes.len());
    for (x, y) in bar.pairs() {
        if let (Some(a), Some(b)) = (provenance[x], provenance[y]) {
            quotient.insert(a, b);
        }
    }
    let canonical = CanonicalRelation::new(quotient)
        .unwrap_or_else(|e| panic!("quotient of R^(q+1) must be canonical: {e}"));
    debug_assert_eq!(canonical.period, powers.profile().period);
    Canonicalization {
        canonical,
        provenance,
    }
}

/// Per-point data preserved by any isomorphism, used to prune the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct PointSignature {
    out_degree: usize,
    in_degree: usize,
    self_loop: bool,
    component_size: usize,
    recurrent: bool,
    // p'(x), or 0 for transient points.
    point_period: usize,
}

fn signatures(r: &Relation) -> (Vec<PointSignature>, Vec<Vec<usize>>) {
    let powers = PowerSequence::new(r);
    let profile = powers.profile();
    let comps = strong_components(r);
    let mut comp_size = vec![0; r.size()];
    for c in &comps {
        for &x in c {
            comp_size[x] = c.len();
        }
    }
    let sigs = (0..r.size())
        .map(|x| {
            let recurrent = powers.eventual().contains(x, x);
            let point_period = if recurrent {
                (1..=profile.period)
                    .find(|&n| powers.power(profile.eventual_period + n).contains(x, x))
                    .unwrap_or(0)
            } else {
                0
            };
            PointSignature {
                out_degree: r.out_degree(x),
                in_degree: r.in_degree(x),
                self_loop: r.contains(x, x),
                component_size: comp_size[x],
                recurrent,
                point_period,
            }
        })
        .collect();
    (sigs, comps)
}

/// A bijection `h` with `(x, y) ∈ r ⇔ (h(x), h(y)) ∈ s`, if one exists.
/// `h[x]` is the image of point `x`.
///
/// Backtracking over points, components in decreasing size, with candidates
/// filtered by [`PointSignature`].
pub fn isomorphic(r: &Relation, s: &Relation) -> Option<Vec<usize>> {
    let n = r.size();
    if n != s.size() || r.matrix().count_ones() != s.matrix().count_ones() {
        return None;
    }
    let (sig_r, mut comps) = signatures(r);
    let (sig_s, _) = signatures(s);
    let mut sorted_r = sig_r.clone();
    let mut sorted_s = sig_s.clone();
    sorted_r.sort_unstable();
    sorted_s.sort_unstable();
    if sorted_r != sorted_s {
        return None;
    }

    comps.sort_by_key(|c| std::cmp::Reverse(c.len()));
    let order: Vec<usize> = comps.into_iter().flatten().collect();

    let mut search = IsoSearch {
        r,
        s,
        sig_r: &sig_r,
        sig_s: &sig_s,
        order: &order,
        forward: vec![usize::MAX; n],
        used: vec![false; n],
    };
    if search.extend(0) {
        Some(search.forward)
    } else {
        None
    }
}

struct IsoSearch<'a> {
    r: &'a Relation,
    s: &'a Relation,
    sig_r: &'a [PointSignature],
    sig_s: &'a [PointSignature],
    order: &'a [usize],
    forward: Vec<usize>,
    used: Vec<bool>,
}

impl IsoSearch<'_> {
    fn consistent(&self, x: usize, u: usize, depth: usize) -> bool {
        if self.r.contains(x, x) != self.s.contains(u, u) {
            return false;
        }
        self.order[..depth].iter().all(|&y| {
            let v = self.forward[y];
            self.r.contains(x, y) == self.s.contains(u, v) && self.r.contains(y, x) == self.s.contains(v, u)
        })
    }

    fn extend(&mut self, depth: usize) -> bool {
        let Some(&x) = self.order.get(depth) else {
            return true;
        };
        for u in 0..self.s.size() {
            if self.used[u] || self.sig_r[x] != self.sig_s[u] || !self.consistent(x, u, depth) {
                continue;
            }
            self.forward[x] = u;
            self.used[u] = true;
            if self.extend(depth + 1) {
                return true;
            }
            self.used[u] = false;
        }
        self.forward[x] = usize::MAX;
        false
    }
}

//! Shift equivalence of finite relations (Boolean matrices).
//!
//! A relation is reduced to its complete invariant: the partial order on
//! recurrent strongly connected components, the period, and the cohomology
//! class of a cocycle with values in nonempty subsets of `Z/pZ`. Two
//! relations are shift equivalent iff their invariants match up to poset
//! isomorphism and coboundary.
//!
//! ```
//! use shifteq_core::{invariant, shift_equivalent, Relation};
//!
//! let r = Relation::from_pairs(3, [(0, 1), (0, 2), (1, 0), (2, 2)])?;
//! let s = r.power(3);
//! assert!(shift_equivalent(&r, &s)?.is_some());
//!
//! let report = invariant(&r)?;
//! assert_eq!(report.triple.period(), 2);
//! # Ok::<(), shifteq_core::Error>(())
//! ```

pub mod classify;
pub mod cocycle;
pub mod error;
pub mod matrix;
pub mod oracle;
pub mod random;
pub mod relation;
pub mod structure;

pub use classify::{
    certificate, group_classes, group_triples, invariant, invariant_with, shift_equivalent,
    triple_from_values, triples_equal, ClassificationReport, EquivalenceWitness, InvariantTriple,
    TripleMatch,
};
pub use cocycle::{
    build_product_relation, coboundary, cohomologous, extract_cocycle, irreducible_quotient, reconstruct,
    Cocycle, ResidueSet,
};
pub use error::Error;
pub use matrix::BoolMatrix;
pub use oracle::{
    brute_force_shift_equivalent, intertwiners, oracle_agreement_sweep, OracleBudget, OracleWitness,
    SweepReport,
};
pub use random::{random_relation, random_relations, Rng};
pub use relation::{compose, power_profile, PowerProfile, PowerSequence, Relation};
pub use structure::{
    canonicalize, check_canonical, components, equiv_classes, is_canonical, isomorphic, recurrent_set,
    transitive_reach, CanonicalRelation, Canonicalization, ComponentPoset, NotCanonical,
};

//! Brute-force shift equivalence by enumerating intertwiners.
//!
//! `R` on `X` and `S` on `X'` are shift equivalent iff there are relations
//! `A ⊆ X × X'` and `B ⊆ X' × X` with `S∘A = A∘R`, `R∘B = B∘S`,
//! `B∘A = R^ℓ` and `A∘B = S^ℓ` for some `ℓ ≥ 1`. This module checks that
//! definition directly, independent of the invariant pipeline.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::classify::shift_equivalent;
use crate::error::Error;
use crate::matrix::BoolMatrix;
use crate::relation::{PowerSequence, Relation};

/// Limits on the exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    /// Largest `n · n'` accepted; there are `2^{n·n'}` candidates per side.
    pub max_bits: usize,
    /// Largest lag `ℓ` tried. `None` uses `max(q, q') + lcm(p, p')`, which
    /// covers every value the pair `(R^ℓ, S^ℓ)` takes.
    pub ell_max: Option<usize>,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self {
            max_bits: 16,
            ell_max: None,
        }
    }
}

/// Matrices here use the row convention: row `x` of `forward` is `A(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleWitness {
    pub forward: BoolMatrix,
    pub backward: BoolMatrix,
    pub lag: usize,
}

impl OracleWitness {
    /// Recomputes all four defining identities.
    pub fn verify(&self, r: &Relation, s: &Relation) -> bool {
        let (a, b) = (&self.forward, &self.backward);
        let (rm, sm) = (r.matrix(), s.matrix());
        let rl = r.power(self.lag);
        let sl = s.power(self.lag);
        let mul = |x: &BoolMatrix, y: &BoolMatrix| x.mul(y).ok();
        mul(a, sm) == mul(rm, a)
            && mul(b, rm) == mul(sm, b)
            && mul(a, b).as_ref() == Some(rl.matrix())
            && mul(b, a).as_ref() == Some(sl.matrix())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// All `A ⊆ X × X'` (as `n × n'` matrices) with `S∘A = A∘R`, i.e.
/// `M_A · M_S = M_R · M_A`.
pub fn intertwiners(r: &Relation, s: &Relation) -> Vec<BoolMatrix> {
    let (n, m) = (r.size(), s.size());
    let bits = n * m;
    assert!(bits < 64, "intertwiner enumeration over {bits} bits");
    (0..1u64 << bits)
        .into_par_iter()
        .filter_map(|pattern| {
            let a = BoolMatrix::from_bits(n, m, pattern);
            let left = a.mul(s.matrix()).expect("shapes agree");
            let right = r.matrix().mul(&a).expect("shapes agree");
            (left == right).then_some(a)
        })
        .collect()
}

pub fn brute_force_shift_equivalent(
    r: &Relation,
    s: &Relation,
    budget: OracleBudget,
) -> Result<Option<OracleWitness>, Error> {
    let needed = r.size() * s.size();
    if needed > budget.max_bits || needed >= 64 {
        return Err(Error::BudgetExceeded {
            needed,
            allowed: budget.max_bits.min(63),
        });
    }
    let (pr, ps) = (PowerSequence::new(r), PowerSequence::new(s));
    let ell_max = budget.ell_max.unwrap_or_else(|| {
        let (a, b) = (pr.profile(), ps.profile());
        let lcm = a.period / gcd(a.period, b.period) * b.period;
        a.eventual_period.max(b.eventual_period) + lcm
    });

    // R^ℓ as matrix -> lags, ascending.
    let mut lags: HashMap<&BoolMatrix, Vec<usize>> = HashMap::new();
    for ell in 1..=ell_max {
        lags.entry(pr.power(ell).matrix()).or_default().push(ell);
    }

    let forward = intertwiners(r, s);
    let backward = intertwiners(s, r);
    let found = forward.par_iter().find_map_first(|a| {
        backward.iter().find_map(|b| {
            let ba = a.mul(b).expect("n x n");
            let candidates = lags.get(&ba)?;
            let ab = b.mul(a).expect("n' x n'");
            candidates
                .iter()
                .find(|&&ell| &ab == ps.power(ell).matrix())
                .map(|&lag| OracleWitness {
                    forward: a.clone(),
                    backward: b.clone(),
                    lag,
                })
        })
    });
    Ok(found)
}

/// One pair on which the invariant and the brute force disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Disagreement {
    pub index: usize,
    pub invariant_says: bool,
    pub oracle_says: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub checked: usize,
    pub equivalent: usize,
    /// Pairs skipped because they exceed the budget.
    pub refused: Vec<usize>,
    pub disagreements: Vec<Disagreement>,
}

impl SweepReport {
    pub fn agrees(&self) -> bool {
        self.disagreements.is_empty()
    }
}

enum PairOutcome {
    Refused,
    Checked { invariant: bool, oracle: bool },
}

/// Compares the invariant decision with the brute force on every pair.
pub fn oracle_agreement_sweep(
    pairs: &[(Relation, Relation)],
    budget: OracleBudget,
) -> Result<SweepReport, Error> {
    let outcomes: Vec<PairOutcome> = pairs
        .par_iter()
        .map(|(r, s)| {
            let oracle = match brute_force_shift_equivalent(r, s, budget) {
                Ok(w) => w.is_some(),
                Err(Error::BudgetExceeded { .. }) => return Ok(PairOutcome::Refused),
                Err(e) => return Err(e),
            };
            let invariant = shift_equivalent(r, s)?.is_some();
            Ok(PairOutcome::Checked { invariant, oracle })
        })
        .collect::<Result<_, Error>>()?;

    let mut report = SweepReport::default();
    for (index, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            PairOutcome::Refused => report.refused.push(index),
            PairOutcome::Checked { invariant, oracle } => {
                report.checked += 1;
                report.equivalent += usize::from(oracle);
                if invariant != oracle {
                    report.disagreements.push(Disagreement {
                        index,
                        invariant_says: invariant,
                        oracle_says: oracle,
                    });
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Relation {
        Relation::from_pairs(3, [(0, 1), (0, 2), (1, 0), (2, 2)]).unwrap()
    }

    #[test]
    fn relation_is_equivalent_to_itself_with_r_as_witness() {
        let r = e1();
        let w = brute_force_shift_equivalent(&r, &r, OracleBudget::default())
            .unwrap()
            .unwrap();
        assert!(w.verify(&r, &r));
        // A = B = R with ℓ = 2 is always a witness.
        let fixed = OracleWitness {
            forward: r.matrix().clone(),
            backward: r.matrix().clone(),
            lag: 2,
        };
        assert!(fixed.verify(&r, &r));
    }

    #[test]
    fn e1_matches_its_cube() {
        let r = e1();
        let s = r.power(3);
        let w = brute_force_shift_equivalent(&r, &s, OracleBudget::default())
            .unwrap()
            .expect("shift equivalent");
        assert!(w.verify(&r, &s));
    }

    #[test]
    fn different_cycle_lengths_are_not_equivalent() {
        let w =
            brute_force_shift_equivalent(&Relation::cycle(3), &Relation::cycle(2), OracleBudget::default())
                .unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn budget_refusal() {
        let r = Relation::empty(5);
        assert_eq!(
            brute_force_shift_equivalent(&r, &r, OracleBudget::default()),
            Err(Error::BudgetExceeded {
                needed: 25,
                allowed: 16
            })
        );
    }

    #[test]
    fn zero_point_relations() {
        let empty0 = Relation::empty(0);
        let nil = Relation::from_pairs(2, [(0, 1)]).unwrap();
        assert!(
            brute_force_shift_equivalent(&empty0, &nil, OracleBudget::default())
                .unwrap()
                .is_some()
        );
        assert!(
            brute_force_shift_equivalent(&empty0, &Relation::identity(1), OracleBudget::default())
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn intertwiners_satisfy_the_morphism_condition() {
        let r = e1();
        let s = Relation::cycle(2);
        for a in intertwiners(&r, &s) {
            assert_eq!(a.mul(s.matrix()).unwrap(), r.matrix().mul(&a).unwrap());
        }
        // The empty relation always intertwines.
        assert!(intertwiners(&r, &s).iter().any(|a| a.is_empty()));
    }

    #[test]
    fn sweep_reports_identical_and_relabelled_pairs_equivalent() {
        let pairs = vec![
            (e1(), e1()),
            (e1(), e1().permute(&[2, 0, 1]).unwrap()),
            (
                Relation::cycle(3),
                Relation::cycle(3).permute(&[1, 2, 0]).unwrap(),
            ),
        ];
        let report = oracle_agreement_sweep(&pairs, OracleBudget::default()).unwrap();
        assert!(report.agrees());
        assert_eq!(report.checked, 3);
        assert_eq!(report.equivalent, 3);
    }
}

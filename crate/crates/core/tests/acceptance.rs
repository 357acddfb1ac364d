//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use shifteq_core::{
    canonicalize, coboundary, cohomologous, components, equiv_classes, extract_cocycle, invariant,
    invariant_with, isomorphic, oracle_agreement_sweep, reconstruct, recurrent_set, triple_from_values,
    triples_equal, Cocycle, OracleBudget, PowerSequence, Relation, Rng,
};

const DENSITIES: [f64; 5] = [0.15, 0.25, 0.35, 0.5, 0.7];

/// Corpus of `count` relations with `1 ≤ n ≤ max_n`, reproducible from `seed`.
fn corpus(seed: u64, count: usize, max_n: usize) -> Vec<Relation> {
    let mut master = Rng::new(seed);
    (0..count)
        .map(|_| {
            let n = 1 + master.below(max_n);
            let density = DENSITIES[master.below(DENSITIES.len())];
            Rng::new(master.next_u64()).relation(n, density)
        })
        .collect()
}

/// Disjoint cycles of length 1 to 3 with random edges from earlier cycles to
/// later ones, so the recurrent components are the cycles themselves.
fn block_cycles(rng: &mut Rng) -> Relation {
    let lengths: Vec<usize> = (0..1 + rng.below(3)).map(|_| 1 + rng.below(3)).collect();
    let mut start = vec![0];
    for l in &lengths {
        start.push(start.last().unwrap() + l);
    }
    let n = *start.last().unwrap();
    let mut r = Relation::empty(n);
    for (k, &l) in lengths.iter().enumerate() {
        for t in 0..l {
            r.insert(start[k] + t, start[k] + (t + 1) % l);
        }
        for x in start[k]..start[k + 1] {
            for y in start[k + 1]..n {
                if rng.unit() < 0.3 {
                    r.insert(x, y);
                }
            }
        }
    }
    r
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

type Check = Result<String, String>;

fn oracle_agreement() -> Check {
    let two: Vec<Relation> = (0..16).map(|b| Relation::from_bits(2, b)).collect();
    let mut pairs: Vec<(Relation, Relation)> = Vec::new();
    for r in &two {
        for s in &two {
            pairs.push((r.clone(), s.clone()));
        }
    }
    let exhaustive = pairs.len();
    let mut master = Rng::new(0x5eed_0001);
    for k in 0..2000 {
        let density = DENSITIES[k % DENSITIES.len()];
        let r = Rng::new(master.next_u64()).relation(3, density);
        let s = Rng::new(master.next_u64()).relation(3, density);
        pairs.push((r, s));
    }
    let report = oracle_agreement_sweep(&pairs, OracleBudget::default()).map_err(|e| e.to_string())?;
    if !report.refused.is_empty() {
        return Err(format!(
            "{} pairs refused by the oracle budget",
            report.refused.len()
        ));
    }
    if !report.agrees() {
        return Err(format!(
            "{} disagreements, first at pair {}",
            report.disagreements.len(),
            report.disagreements[0].index
        ));
    }
    Ok(format!(
        "{} pairs ({exhaustive} exhaustive on 2 points), {} equivalent, 0 disagreements",
        report.checked, report.equivalent
    ))
}

fn chain_triple(p: usize, aa: &[usize], ab: &[usize], bb: &[usize]) -> Cocycle {
    triple_from_values(p, 2, &[((0, 0), aa), ((0, 1), ab), ((1, 1), bb)])
        .expect("valid triple")
        .cocycle()
        .clone()
}

fn worked_examples() -> Check {
    // Two components a ≥ b with p = 2; ξ′ differs from ξ on (a,b).
    let xi = chain_triple(2, &[0], &[0], &[0]);
    let xi_prime = chain_triple(2, &[0], &[1], &[0]);
    let r1 = reconstruct(&xi).map_err(|e| e.to_string())?;
    let r2 = reconstruct(&xi_prime).map_err(|e| e.to_string())?;
    let mut swap: Vec<usize> = (0..r1.relation().size()).collect();
    swap.swap(r1.point(1, 0), r1.point(1, 1));
    let moved = r1.relation().permute(&swap).map_err(|e| e.to_string())?;
    if &moved != r2.relation() {
        return Err("swapping (b,0) and (b,1) does not carry one reconstruction to the other".into());
    }
    if moved == *r1.relation() {
        return Err("the two reconstructions are already equal".into());
    }

    // p = 6, ξ′(a,a) = {0,2,4}, ξ′(b,b) = {0}, ξ′(a,b) = {1,3,5}.
    let c = chain_triple(6, &[0, 2, 4], &[1, 3, 5], &[0]);
    let rec = reconstruct(&c).map_err(|e| e.to_string())?;
    if rec.component_periods() != [2, 6] || rec.relation().size() != 8 {
        return Err(format!("point set has periods {:?}", rec.component_periods()));
    }
    let image = |t: usize| -> Vec<usize> { rec.relation().image(rec.point(0, t)).collect() };
    let mut want0 = vec![rec.point(0, 1), rec.point(1, 0), rec.point(1, 2), rec.point(1, 4)];
    let mut want1 = vec![rec.point(0, 0), rec.point(1, 1), rec.point(1, 3), rec.point(1, 5)];
    want0.sort_unstable();
    want1.sort_unstable();
    if image(0) != want0 || image(1) != want1 {
        return Err(format!("images {:?} and {:?}", image(0), image(1)));
    }

    let theta = cohomologous(&xi, &xi_prime)
        .map_err(|e| e.to_string())?
        .ok_or("ξ and ξ′ not found cohomologous")?;
    let shifted = xi
        .add(&coboundary(xi.order(), 2, &theta).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    if shifted != xi_prime {
        return Err(format!("θ = {theta:?} does not satisfy ξ′ = ξ + δθ"));
    }
    Ok(format!("swap isomorphism, p=6 images exact, θ = {theta:?}"))
}

fn canon_round_trip(seen: &mut Vec<Cocycle>) -> Check {
    let rs = corpus(0x5eed_0003, 500, 6);
    for (k, r) in rs.iter().enumerate() {
        let canon = canonicalize(r).canonical;
        let powers = PowerSequence::new(canon.relation());
        let c = extract_cocycle(&powers, &components(&powers)).map_err(|e| format!("relation {k}: {e}"))?;
        let rec = reconstruct(&c).map_err(|e| format!("relation {k}: {e}"))?;
        if isomorphic(rec.relation(), canon.relation()).is_none() {
            return Err(format!("relation {k}: reconstruction not isomorphic to {r:?}"));
        }
        seen.push(c);
    }
    Ok(format!("{} relations", rs.len()))
}

fn section_independence(seen: &mut Vec<Cocycle>) -> Check {
    let mut rng = Rng::new(0x5eed_0004);
    let mut done = 0;
    let mut nontrivial = 0;
    while done < 200 {
        let canon = canonicalize(&block_cycles(&mut rng)).canonical.into_relation();
        let base = invariant(&canon).map_err(|e| e.to_string())?;
        let mut chosen = Vec::new();
        let other = invariant_with(&canon, |poset| {
            chosen = (0..poset.component_count())
                .map(|a| poset.members(a)[rng.below(poset.members(a).len())])
                .collect();
            chosen.clone()
        })
        .map_err(|e| e.to_string())?;
        nontrivial += usize::from(chosen != base.poset.section());
        let (c1, c2) = (base.triple.cocycle(), other.triple.cocycle());
        let theta = cohomologous(c1, c2)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("sections {:?} and {chosen:?} of {canon:?}", base.poset.section()))?;
        let delta = coboundary(c1.order(), c1.modulus(), &theta).map_err(|e| e.to_string())?;
        if c1.add(&delta).map_err(|e| e.to_string())? != *c2 {
            return Err(format!("θ = {theta:?} fails substitution for {canon:?}"));
        }
        seen.push(c1.clone());
        seen.push(c2.clone());
        done += 1;
    }
    Ok(format!(
        "{done} canonical relations, {nontrivial} with a non-default section"
    ))
}

fn periodicity() -> Check {
    for (k, r) in corpus(0x5eed_0005, 500, 6).iter().enumerate() {
        let prof = PowerSequence::new(r).profile();
        let (q, p) = (prof.eventual_period, prof.period);
        let rq = r.power(q);
        if r.power(2 * q) != rq {
            return Err(format!("relation {k}: R^(2q) ≠ R^q"));
        }
        if r.power(q + p) != rq {
            return Err(format!("relation {k}: R^(q+p) ≠ R^q"));
        }
        if let Some(d) = (1..p).find(|&d| r.power(q + d) == rq) {
            return Err(format!("relation {k}: R^(q+{d}) = R^q with p = {p}"));
        }
        let bar = r.power(q + 1);
        for n in 1..=3 {
            if bar.power(n * p) != rq {
                return Err(format!("relation {k}: R̄^({n}p) ≠ R^q"));
            }
            if bar.power(n) != r.power(q + n) {
                return Err(format!("relation {k}: R̄^{n} ≠ R^(q+{n})"));
            }
        }
    }
    Ok("500 relations".into())
}

fn restriction_and_quotient() -> Check {
    for (k, r) in corpus(0x5eed_0005, 500, 6).iter().enumerate() {
        let powers = PowerSequence::new(r);
        let prof = powers.profile();
        let bar = r.power(prof.eventual_period + 1);
        let recurrent = recurrent_set(&powers);
        let (bar_restricted, _) = bar.restrict(&recurrent).map_err(|e| e.to_string())?;
        let canon = canonicalize(r);
        let hat = canon.canonical.relation();
        let classes = equiv_classes(&powers);
        for n in 1..=2 * prof.period {
            let (power_then_restrict, _) = bar.power(n).restrict(&recurrent).map_err(|e| e.to_string())?;
            if power_then_restrict != bar_restricted.power(n) {
                return Err(format!(
                    "relation {k}: restriction and power do not commute at n = {n}"
                ));
            }
            let hat_n = hat.power(n);
            let bar_n = bar.power(n);
            for &x in &recurrent {
                for &y in &recurrent {
                    let (px, py) = (canon.provenance[x].unwrap(), canon.provenance[y].unwrap());
                    if hat_n.contains(px, py) != bar_n.contains(x, y) {
                        return Err(format!("relation {k}: quotient mismatch at ({x},{y}), n = {n}"));
                    }
                }
            }
        }
        if classes.len() != hat.size() {
            return Err(format!(
                "relation {k}: {} classes for {} quotient points",
                classes.len(),
                hat.size()
            ));
        }
    }
    Ok("500 relations".into())
}

fn invariance(seen: &mut Vec<Cocycle>) -> Check {
    let mut rng = Rng::new(0x5eed_0007);
    for (k, r) in corpus(0x5eed_0107, 200, 6).iter().enumerate() {
        let base = invariant(r).map_err(|e| e.to_string())?.triple;
        let perm = rng.permutation(r.size());
        let conj = invariant(&r.permute(&perm).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .triple;
        if triples_equal(&base, &conj).is_none() {
            return Err(format!(
                "relation {k}: conjugation by {perm:?} changes the invariant"
            ));
        }
        let q = PowerSequence::new(r).profile().eventual_period;
        let shifted = invariant(&r.power(q + 1)).map_err(|e| e.to_string())?.triple;
        if triples_equal(&base, &shifted).is_none() {
            return Err(format!("relation {k}: R^(q+1) has a different invariant"));
        }
        seen.extend([base, conj, shifted].map(|t| t.cocycle().clone()));
    }
    Ok("200 relations".into())
}

fn irreducibility(seen: &[Cocycle]) -> Check {
    for (k, c) in seen.iter().enumerate() {
        if !c.is_irreducible() {
            return Err(format!("cocycle {k} is reducible: {c:?}"));
        }
        let lcm = c
            .component_periods()
            .into_iter()
            .fold(1, |l, pa| l / gcd(l, pa) * pa);
        let orders = (0..c.component_count()).fold(0, |g, a| gcd(g, c.diagonal(a).len()));
        if c.component_count() > 0 && orders != 1 {
            return Err(format!("cocycle {k}: gcd of diagonal orders is {orders}"));
        }
        if lcm != c.modulus() {
            return Err(format!(
                "cocycle {k}: lcm of component periods {lcm} ≠ p = {}",
                c.modulus()
            ));
        }
    }
    Ok(format!("{} extracted cocycles", seen.len()))
}

fn main() -> ExitCode {
    let mut seen = Vec::new();
    let mut failed = 0;
    let mut report = |n: usize, name: &str, check: &mut dyn FnMut() -> Check| {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n} PASS {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n} FAIL {name}: {detail} ({secs:.1}s)");
            }
        }
    };
    report(1, "oracle agreement", &mut oracle_agreement);
    report(2, "worked examples", &mut worked_examples);
    report(3, "canonical round trip", &mut || canon_round_trip(&mut seen));
    report(4, "section independence", &mut || section_independence(&mut seen));
    report(5, "periodicity identities", &mut periodicity);
    report(
        6,
        "restriction and quotient identities",
        &mut restriction_and_quotient,
    );
    report(7, "invariance", &mut || invariance(&mut seen));
    report(8, "irreducibility", &mut || irreducibility(&seen));
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

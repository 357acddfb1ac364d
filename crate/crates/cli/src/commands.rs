//! Verb implementations. Each writes its report to `out` and returns the
//! process exit status.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use shifteq_core::{
    brute_force_shift_equivalent, certificate, group_triples, invariant, invariant_with,
    oracle_agreement_sweep, power_profile, random_relation, random_relations, triples_equal, Error,
    InvariantTriple, OracleBudget, Relation, Rng,
};

use crate::format::{orient, parse_relation, poset_dot, write_relation, ParseError, TripleDocument};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INEQUIVALENT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_REFUSED: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::BudgetExceeded { .. } | Error::SearchTooLarge(_)) => EXIT_REFUSED,
            _ => EXIT_USAGE,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(source: io::Error) -> Self {
        CliError::Io {
            path: "<output>".into(),
            source,
        }
    }
}

pub type Outcome = Result<u8, CliError>;

pub fn load_relation(path: &Path, transposed: bool) -> Result<Relation, CliError> {
    let shown = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: shown.clone(),
        source,
    })?;
    let r = parse_relation(&text).map_err(|source| CliError::Parse { path: shown, source })?;
    Ok(orient(r, transposed))
}

fn save(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn profile(out: &mut dyn Write, file: &Path, transposed: bool) -> Outcome {
    let p = power_profile(&load_relation(file, transposed)?);
    writeln!(out, "i={}", p.first_repeat)?;
    writeln!(out, "j={}", p.loop_length)?;
    writeln!(out, "q={}", p.eventual_period)?;
    writeln!(out, "p={}", p.period)?;
    Ok(EXIT_OK)
}

/// Canonical form as a relation file, followed by `#` lines mapping each
/// canonical point to the input points it stands for.
pub fn canon(out: &mut dyn Write, file: &Path, output: Option<&Path>, transposed: bool) -> Outcome {
    let r = load_relation(file, transposed)?;
    let c = shifteq_core::canonicalize(&r);
    let mut text = write_relation(&orient(c.canonical.relation().clone(), transposed));
    let poset = c.canonical.poset();
    for a in 0..poset.component_count() {
        let members: Vec<String> = poset.members(a).iter().map(|x| x.to_string()).collect();
        text.push_str(&format!(
            "# component {a} period {} points {}\n",
            poset.component_period(a),
            members.join(" ")
        ));
    }
    for k in 0..c.canonical.relation().size() {
        let sources: Vec<String> = (0..r.size())
            .filter(|&x| c.provenance[x] == Some(k))
            .map(|x| x.to_string())
            .collect();
        text.push_str(&format!("# point {k} from {}\n", sources.join(" ")));
    }
    let transient: Vec<String> = (0..r.size())
        .filter(|&x| c.provenance[x].is_none())
        .map(|x| x.to_string())
        .collect();
    if !transient.is_empty() {
        text.push_str(&format!("# transient {}\n", transient.join(" ")));
    }
    match output {
        Some(path) => save(path, &text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionChoice {
    Default,
    Random(u64),
}

impl std::str::FromStr for SectionChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "default" {
            return Ok(SectionChoice::Default);
        }
        match s.strip_prefix("random:").map(str::parse) {
            Some(Ok(seed)) => Ok(SectionChoice::Random(seed)),
            _ => Err(format!("expected `default` or `random:SEED`, found {s:?}")),
        }
    }
}

/// Largest search accepted by `--certify`.
pub const CERTIFICATE_LIMIT: u128 = 50_000_000;

pub fn invariant_cmd(
    out: &mut dyn Write,
    file: &Path,
    section: SectionChoice,
    certify: bool,
    dot: Option<&Path>,
    transposed: bool,
) -> Outcome {
    let r = load_relation(file, transposed)?;
    let report = match section {
        SectionChoice::Default => invariant(&r)?,
        SectionChoice::Random(seed) => {
            let mut rng = Rng::new(seed);
            invariant_with(&r, |poset| {
                (0..poset.component_count())
                    .map(|a| {
                        let members = poset.members(a);
                        members[rng.below(members.len())]
                    })
                    .collect()
            })?
        }
    };
    let mut doc = TripleDocument::new(report.triple);
    if certify {
        doc.certificate = Some(certificate(&doc.triple, CERTIFICATE_LIMIT)?);
    }
    if let Some(path) = dot {
        save(path, &poset_dot(&doc.triple))?;
    }
    write!(out, "{doc}")?;
    Ok(EXIT_OK)
}

fn list(xs: &[usize]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn equiv(
    out: &mut dyn Write,
    left: &Path,
    right: &Path,
    oracle: Option<OracleBudget>,
    transposed: bool,
) -> Outcome {
    let r = load_relation(left, transposed)?;
    let s = load_relation(right, transposed)?;
    let (tr, ts) = (invariant(&r)?.triple, invariant(&s)?.triple);
    let matching = triples_equal(&tr, &ts);
    match &matching {
        Some(m) => {
            writeln!(out, "equivalent")?;
            writeln!(out, "phi {}", list(&m.phi))?;
            writeln!(out, "theta {}", list(&m.theta))?;
        }
        None => writeln!(out, "inequivalent")?,
    }
    let code = if matching.is_some() {
        EXIT_OK
    } else {
        EXIT_INEQUIVALENT
    };
    let Some(budget) = oracle else {
        return Ok(code);
    };
    match brute_force_shift_equivalent(&r, &s, budget) {
        Ok(w) => {
            match &w {
                Some(w) => writeln!(out, "oracle equivalent lag {}", w.lag)?,
                None => writeln!(out, "oracle inequivalent")?,
            }
            let agrees = w.is_some() == matching.is_some();
            writeln!(out, "oracle {}", if agrees { "agrees" } else { "disagrees" })?;
            Ok(code)
        }
        Err(Error::BudgetExceeded { needed, allowed }) => {
            writeln!(out, "oracle refused: {needed} bits exceed budget {allowed}")?;
            Ok(EXIT_REFUSED)
        }
        Err(e) => Err(e.into()),
    }
}

pub fn random(
    out: &mut dyn Write,
    n: usize,
    density: f64,
    seed: u64,
    count: usize,
    out_dir: Option<&Path>,
    transposed: bool,
) -> Outcome {
    match out_dir {
        None if count != 1 => Err(CliError::Usage("--count other than 1 requires --out-dir".into())),
        None => {
            let r = orient(random_relation(n, density, seed)?, transposed);
            out.write_all(write_relation(&r).as_bytes())?;
            Ok(EXIT_OK)
        }
        Some(dir) => {
            let rs = random_relations(n, density, seed, count)?;
            fs::create_dir_all(dir).map_err(|source| CliError::Io {
                path: dir.display().to_string(),
                source,
            })?;
            let width = count.saturating_sub(1).to_string().len().max(4);
            for (k, r) in rs.into_iter().enumerate() {
                let path = dir.join(format!("rel_{k:0width$}.txt"));
                save(&path, &write_relation(&orient(r, transposed)))?;
                writeln!(out, "{}", path.display())?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn list_dir(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry?;
        if entry.file_type()?.is_file() {
            paths.push(entry.path());
        }
    }
    paths.sort();
    Ok(paths)
}

/// Loads every file in `dir`, reporting and skipping the ones that fail.
fn load_dir(dir: &Path, transposed: bool, err: &mut dyn Write) -> Result<Vec<(String, Relation)>, CliError> {
    let mut loaded = Vec::new();
    for path in list_dir(dir)? {
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        match load_relation(&path, transposed) {
            Ok(r) => loaded.push((name, r)),
            Err(e) => writeln!(err, "skipping {e}")?,
        }
    }
    Ok(loaded)
}

pub fn batch(out: &mut dyn Write, err: &mut dyn Write, dir: &Path, transposed: bool) -> Outcome {
    let loaded = load_dir(dir, transposed, err)?;
    let triples: Vec<InvariantTriple> = loaded
        .par_iter()
        .map(|(_, r)| invariant(r).map(|rep| rep.triple))
        .collect::<Result<_, _>>()?;
    let classes = group_triples(&triples);
    writeln!(out, "files {}", loaded.len())?;
    writeln!(out, "classes {}", classes.len())?;
    for (k, class) in classes.iter().enumerate() {
        let rep = class[0];
        writeln!(
            out,
            "class {k} size {} representative {}",
            class.len(),
            loaded[rep].0
        )?;
        for &i in class {
            writeln!(out, "  member {}", loaded[i].0)?;
        }
        for line in TripleDocument::new(triples[rep].clone()).to_string().lines() {
            writeln!(out, "  {line}")?;
        }
    }
    Ok(EXIT_OK)
}

pub enum SweepSource<'a> {
    /// All unordered pairs (including each file with itself) from a directory.
    Dir(&'a Path),
    /// All ordered pairs of relations on `n` points.
    Exhaustive(usize),
    /// `pairs` seeded-random pairs on `n` points.
    Random {
        n: usize,
        pairs: usize,
        density: f64,
        seed: u64,
    },
}

/// Ordered pairs and unordered pairs with repetition agree for this question,
/// so the directory mode halves its work.
pub fn oracle_sweep(
    out: &mut dyn Write,
    err: &mut dyn Write,
    source: SweepSource<'_>,
    budget: OracleBudget,
    transposed: bool,
) -> Outcome {
    let (names, pairs): (Vec<String>, Vec<(Relation, Relation)>) = match source {
        SweepSource::Dir(dir) => {
            let loaded = load_dir(dir, transposed, err)?;
            let mut names = Vec::new();
            let mut pairs = Vec::new();
            for i in 0..loaded.len() {
                for j in i..loaded.len() {
                    names.push(format!("{} {}", loaded[i].0, loaded[j].0));
                    pairs.push((loaded[i].1.clone(), loaded[j].1.clone()));
                }
            }
            (names, pairs)
        }
        SweepSource::Exhaustive(n) => {
            if n > 2 {
                return Err(CliError::Usage(format!(
                    "exhaustive sweep over {n} points is too large"
                )));
            }
            let bits = n * n;
            let all: Vec<Relation> = (0..1u64 << bits).map(|b| Relation::from_bits(n, b)).collect();
            let mut names = Vec::new();
            let mut pairs = Vec::new();
            for (i, r) in all.iter().enumerate() {
                for (j, s) in all.iter().enumerate() {
                    names.push(format!("{i} {j}"));
                    pairs.push((r.clone(), s.clone()));
                }
            }
            (names, pairs)
        }
        SweepSource::Random {
            n,
            pairs,
            density,
            seed,
        } => {
            let rs = random_relations(n, density, seed, 2 * pairs)?;
            let names = (0..pairs).map(|k| format!("pair {k}")).collect();
            let pairs = rs.chunks_exact(2).map(|c| (c[0].clone(), c[1].clone())).collect();
            (names, pairs)
        }
    };
    let report = oracle_agreement_sweep(&pairs, budget)?;
    writeln!(out, "pairs {}", pairs.len())?;
    writeln!(out, "checked {}", report.checked)?;
    writeln!(out, "equivalent {}", report.equivalent)?;
    writeln!(out, "refused {}", report.refused.len())?;
    writeln!(out, "disagreements {}", report.disagreements.len())?;
    for d in &report.disagreements {
        writeln!(
            out,
            "disagree {}: invariant {} oracle {}",
            names[d.index], d.invariant_says, d.oracle_says
        )?;
    }
    Ok(if !report.agrees() {
        EXIT_INEQUIVALENT
    } else if !report.refused.is_empty() {
        EXIT_REFUSED
    } else {
        EXIT_OK
    })
}

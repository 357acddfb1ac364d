//! Text formats.
//!
//! A relation file is a line `n` followed by `n` lines of `n` characters
//! from `{0,1}`; row `x`, column `y` is `1` iff `y ∈ R(x)`. Lines starting
//! with `#` may follow the matrix and are ignored.
//!
//! A triple document lists, one record per line:
//!
//! ```text
//! period 2
//! components 2
//! component 0 2
//! component 1 1
//! xi 0 0 0
//! xi 0 1 0 1
//! xi 1 1 0 1
//! ```
//!
//! `component a p_a` lines come in ascending order of `a`. Each `xi a b r…`
//! line gives a pair `a ≥ b` of the component order and the sorted residues
//! of `ξ(a,b)`; pairs are in lexicographic order and the diagonal is listed.
//! An optional final `certificate …` line carries the canonical certificate.

use std::fmt::{self, Write as _};

use shifteq_core::{triple_from_values, InvariantTriple, Relation};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

/// Splits into lines, allowing a missing final newline but no `\r`.
fn lines(text: &str) -> Vec<&str> {
    let body = text.strip_suffix('\n').unwrap_or(text);
    if body.is_empty() {
        return Vec::new();
    }
    body.split('\n').collect()
}

fn parse_number(line: usize, s: &str, what: &str) -> Result<usize, ParseError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return fail(line, format!("expected {what}, found {s:?}"));
    }
    s.parse()
        .or_else(|_| fail(line, format!("{what} {s:?} is too large")))
}

pub fn parse_relation(text: &str) -> Result<Relation, ParseError> {
    let lines = lines(text);
    let Some(first) = lines.first() else {
        return fail(1, "empty file");
    };
    let n = parse_number(1, first, "point count")?;
    let mut r = Relation::empty(n);
    for x in 0..n {
        let lineno = x + 2;
        let Some(row) = lines.get(x + 1) else {
            return fail(lineno, format!("expected {n} matrix rows, found {x}"));
        };
        if row.len() != n {
            return fail(lineno, format!("row has length {}, expected {n}", row.len()));
        }
        for (y, c) in row.bytes().enumerate() {
            match c {
                b'1' => r.insert(x, y),
                b'0' => {}
                _ => {
                    return fail(
                        lineno,
                        format!("unexpected character {:?} in column {y}", c as char),
                    )
                }
            }
        }
    }
    for (k, extra) in lines.iter().enumerate().skip(n + 1) {
        if !extra.starts_with('#') {
            return fail(k + 1, "unexpected line after matrix");
        }
    }
    Ok(r)
}

pub fn write_relation(r: &Relation) -> String {
    let n = r.size();
    let mut out = String::with_capacity((n + 1) * (n + 1) + 4);
    let _ = writeln!(out, "{n}");
    for x in 0..n {
        for y in 0..n {
            out.push(if r.contains(x, y) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

/// Applies the optional transpose used by `--paper-convention`.
pub fn orient(r: Relation, transposed: bool) -> Relation {
    if transposed {
        r.reverse()
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleDocument {
    pub triple: InvariantTriple,
    pub certificate: Option<String>,
}

impl TripleDocument {
    pub fn new(triple: InvariantTriple) -> Self {
        Self {
            triple,
            certificate: None,
        }
    }
}

impl fmt::Display for TripleDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.triple;
        writeln!(f, "period {}", t.period())?;
        writeln!(f, "components {}", t.component_count())?;
        for (a, pa) in t.component_periods().iter().enumerate() {
            writeln!(f, "component {a} {pa}")?;
        }
        for ((a, b), v) in t.cocycle().values() {
            write!(f, "xi {a} {b}")?;
            for r in v.iter() {
                write!(f, " {r}")?;
            }
            writeln!(f)?;
        }
        if let Some(c) = &self.certificate {
            writeln!(f, "certificate {c}")?;
        }
        Ok(())
    }
}

fn expect_keyword<'a>(lines: &[&'a str], k: usize, key: &str) -> Result<Vec<&'a str>, ParseError> {
    let Some(line) = lines.get(k) else {
        return fail(k + 1, format!("expected `{key}` record, found end of file"));
    };
    let mut fields = line.split(' ');
    if fields.next() != Some(key) {
        return fail(k + 1, format!("expected `{key}` record"));
    }
    Ok(fields.collect())
}

pub fn parse_triple(text: &str) -> Result<TripleDocument, ParseError> {
    let lines = lines(text);
    let period = match expect_keyword(&lines, 0, "period")?[..] {
        [p] => parse_number(1, p, "period")?,
        _ => return fail(1, "`period` takes one value"),
    };
    if period == 0 {
        return fail(1, "period must be positive");
    }
    let m = match expect_keyword(&lines, 1, "components")?[..] {
        [m] => parse_number(2, m, "component count")?,
        _ => return fail(2, "`components` takes one value"),
    };
    let mut periods = Vec::with_capacity(m);
    for a in 0..m {
        let k = 2 + a;
        let fields = expect_keyword(&lines, k, "component")?;
        let [id, pa] = fields[..] else {
            return fail(k + 1, "`component` takes an id and a period");
        };
        if parse_number(k + 1, id, "component id")? != a {
            return fail(k + 1, format!("expected component {a}"));
        }
        periods.push(parse_number(k + 1, pa, "component period")?);
    }

    let mut k = 2 + m;
    let mut values: Vec<((usize, usize), Vec<usize>)> = Vec::new();
    while let Some(line) = lines.get(k) {
        if !line.starts_with("xi ") {
            break;
        }
        let fields: Vec<&str> = line.split(' ').skip(1).collect();
        if fields.len() < 3 {
            return fail(k + 1, "`xi` takes two components and at least one residue");
        }
        let a = parse_number(k + 1, fields[0], "component")?;
        let b = parse_number(k + 1, fields[1], "component")?;
        if a >= m || b >= m {
            return fail(k + 1, format!("component out of range for {m} components"));
        }
        if values.last().is_some_and(|&(prev, _)| prev >= (a, b)) {
            return fail(k + 1, "pairs must be strictly increasing");
        }
        let mut residues = Vec::with_capacity(fields.len() - 2);
        for f in &fields[2..] {
            let r = parse_number(k + 1, f, "residue")?;
            if r >= period {
                return fail(k + 1, format!("residue {r} not below period {period}"));
            }
            if residues.last().is_some_and(|&prev| prev >= r) {
                return fail(k + 1, "residues must be strictly increasing");
            }
            residues.push(r);
        }
        values.push(((a, b), residues));
        k += 1;
    }
    let after_values = k;

    let certificate = match lines.get(k) {
        Some(line) => match line.strip_prefix("certificate ") {
            Some(c) if !c.is_empty() => {
                k += 1;
                Some(c.to_string())
            }
            _ => return fail(k + 1, "unexpected record"),
        },
        None => None,
    };
    if k < lines.len() {
        return fail(k + 1, "unexpected trailing record");
    }

    let borrowed: Vec<((usize, usize), &[usize])> =
        values.iter().map(|(ab, v)| (*ab, v.as_slice())).collect();
    let triple = triple_from_values(period, m, &borrowed).map_err(|e| ParseError {
        line: after_values.max(1),
        message: e.to_string(),
    })?;
    if triple.component_periods() != periods {
        return fail(
            3,
            format!(
                "component periods {periods:?} disagree with the cocycle diagonal {:?}",
                triple.component_periods()
            ),
        );
    }
    if triple.cocycle().values().count() != values.len() {
        return fail(after_values.max(1), "order pairs must include the diagonal");
    }
    Ok(TripleDocument { triple, certificate })
}

/// Hasse diagram of the component order in DOT syntax; an edge `a -> b`
/// means `a` covers `b`.
pub fn poset_dot(t: &InvariantTriple) -> String {
    let order = t.order();
    let m = t.component_count();
    let mut out = String::from("digraph components {\n");
    for (a, pa) in t.component_periods().iter().enumerate() {
        let _ = writeln!(out, "  c{a} [label=\"{a} (p={pa})\"];");
    }
    for a in 0..m {
        for b in 0..m {
            if a == b || !order.contains(a, b) {
                continue;
            }
            let covered = (0..m).all(|c| c == a || c == b || !(order.contains(a, c) && order.contains(c, b)));
            if covered {
                let _ = writeln!(out, "  c{a} -> c{b};");
            }
        }
    }
    out.push_str("}\n");
    out
}

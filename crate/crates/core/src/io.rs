//! Text formats for graphs, lift assignments, spectra and reports.
//!
//! Readers accept CRLF line endings; writers always emit LF.

use std::fs;
use std::path::Path;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::RegularGraph;
use crate::lift::{shift_to_assignment, LiftAssignment, ShiftAssignment};
use crate::spectral::Spectrum;

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
}

fn parse_fields<const N: usize>(line: usize, s: &str) -> Result<[usize; N]> {
    let fields: Vec<&str> = s.split_whitespace().collect();
    if fields.len() != N {
        return Err(Error::parse(line, format!("expected {N} integers, found {:?}", s)));
    }
    let mut out = [0; N];
    for (o, f) in out.iter_mut().zip(fields) {
        *o = f
            .parse()
            .map_err(|_| Error::parse(line, format!("{f:?} is not a nonnegative integer")))?;
    }
    Ok(out)
}

/// Body lines with the trailing empty line (after the final newline)
/// removed. Any other blank line is an error.
fn body(text: &str) -> Result<Vec<(usize, &str)>> {
    let mut all: Vec<(usize, &str)> = lines(text).collect();
    if all.last().is_some_and(|(_, l)| l.is_empty()) {
        all.pop();
    }
    if all.is_empty() {
        return Err(Error::parse(1, "empty input"));
    }
    if let Some((n, _)) = all.iter().find(|(_, l)| l.trim().is_empty()) {
        return Err(Error::parse(*n, "blank line"));
    }
    Ok(all)
}

/// Parses `n d` followed by one `u v` line per edge.
pub fn parse_graph(text: &str) -> Result<RegularGraph> {
    let all = body(text)?;
    let [n, d] = parse_fields::<2>(all[0].0, all[0].1)?;
    let mut edges = Vec::with_capacity(all.len() - 1);
    for &(line, s) in &all[1..] {
        let [u, v] = parse_fields::<2>(line, s)?;
        edges.push((u, v));
    }
    RegularGraph::new(n, d, edges).map_err(|e| Error::Validation(e.to_string()))
}

pub fn graph_to_string(g: &RegularGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.d());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<RegularGraph> {
    parse_graph(&fs::read_to_string(path)?)
}

pub fn write_graph(path: impl AsRef<Path>, g: &RegularGraph) -> Result<()> {
    Ok(fs::write(path, graph_to_string(g))?)
}

/// A lift assignment as stored on disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assignment {
    Shift(ShiftAssignment),
    Perm(LiftAssignment),
}

impl Assignment {
    pub fn k(&self) -> usize {
        match self {
            Assignment::Shift(s) => s.k(),
            Assignment::Perm(p) => p.k(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Assignment::Shift(s) => s.len(),
            Assignment::Perm(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_permutations(&self) -> LiftAssignment {
        match self {
            Assignment::Shift(s) => shift_to_assignment(s),
            Assignment::Perm(p) => p.clone(),
        }
    }
}

/// Parses `k m` followed by `m` lines of `shift s` or `perm i0 .. i{k-1}`.
/// A file made only of shift lines yields [`Assignment::Shift`]; any perm
/// line makes the whole file a permutation assignment.
pub fn parse_assignment(text: &str) -> Result<Assignment> {
    let all = body(text)?;
    let [k, m] = parse_fields::<2>(all[0].0, all[0].1)?;
    if all.len() - 1 != m {
        return Err(Error::parse(
            all[0].0,
            format!("header declares {m} edges but {} follow", all.len() - 1),
        ));
    }
    let mut shifts: Vec<Option<usize>> = Vec::with_capacity(m);
    let mut perms = Vec::with_capacity(m);
    for &(line, s) in &all[1..] {
        let mut fields = s.split_whitespace();
        let parse = |f: &str| {
            f.parse::<usize>()
                .map_err(|_| Error::parse(line, format!("{f:?} is not a nonnegative integer")))
        };
        match fields.next() {
            Some("shift") => {
                let rest: Vec<&str> = fields.collect();
                if rest.len() != 1 {
                    return Err(Error::parse(line, "shift takes exactly one value"));
                }
                let s = parse(rest[0])?;
                if s >= k {
                    return Err(Error::parse(line, format!("shift {s} is not below k = {k}")));
                }
                shifts.push(Some(s));
                perms.push((0..k).map(|i| (i + s) % k).collect::<Vec<_>>());
            }
            Some("perm") => {
                let p = fields.map(parse).collect::<Result<Vec<_>>>()?;
                if p.len() != k {
                    return Err(Error::parse(
                        line,
                        format!("perm has {} entries, expected {k}", p.len()),
                    ));
                }
                let mut seen = vec![false; k];
                for &x in &p {
                    if x >= k || std::mem::replace(&mut seen[x], true) {
                        return Err(Error::parse(line, "perm is not a permutation of 0..k"));
                    }
                }
                shifts.push(None);
                perms.push(p);
            }
            _ => return Err(Error::parse(line, "expected `shift s` or `perm ...`")),
        }
    }
    let invalid = |e: Error| Error::Validation(e.to_string());
    match shifts.into_iter().collect::<Option<Vec<_>>>() {
        Some(s) => Ok(Assignment::Shift(ShiftAssignment::new(k, s).map_err(invalid)?)),
        None => Ok(Assignment::Perm(LiftAssignment::new(k, perms).map_err(invalid)?)),
    }
}

pub fn assignment_to_string(a: &Assignment) -> String {
    let mut out = format!("{} {}\n", a.k(), a.len());
    match a {
        Assignment::Shift(s) => {
            for x in s.shifts() {
                out.push_str(&format!("shift {x}\n"));
            }
        }
        Assignment::Perm(p) => {
            for perm in p.perms() {
                let body: Vec<String> = perm.iter().map(|x| x.to_string()).collect();
                out.push_str(&format!("perm {}\n", body.join(" ")));
            }
        }
    }
    out
}

pub fn read_assignment(path: impl AsRef<Path>) -> Result<Assignment> {
    parse_assignment(&fs::read_to_string(path)?)
}

pub fn write_assignment(path: impl AsRef<Path>, a: &Assignment) -> Result<()> {
    Ok(fs::write(path, assignment_to_string(a))?)
}

/// Scientific notation with 15 significant digits; `-0` prints as `0`.
pub fn format_value(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.14e}")
}

/// One eigenvalue per line, descending.
pub fn spectrum_to_string(s: &Spectrum) -> String {
    s.values().iter().map(|&x| format_value(x) + "\n").collect()
}

pub fn parse_spectrum(text: &str) -> Result<Spectrum> {
    let values = body(text)?
        .into_iter()
        .map(|(line, s)| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(line, format!("{s:?} is not a number")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum::new(values, 0.0))
}

/// TOML integers are signed, so full-range seeds are written as decimal
/// strings.
pub(crate) fn u64_as_string<S: Serializer>(v: &u64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Serializes a report struct as a TOML document.
pub fn report_to_string<T: Serialize>(report: &T) -> Result<String> {
    toml::to_string(report).map_err(|e| Error::InvalidInput(format!("report serialization: {e}")))
}

pub fn write_report<T: Serialize>(path: impl AsRef<Path>, report: &T) -> Result<()> {
    Ok(fs::write(path, report_to_string(report)?)?)
}

/// CSV with a header row taken from the record's field names.
pub fn records_to_csv<T: Serialize>(records: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for r in records {
        w.serialize(r).map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidInput(format!("csv: {e}")))
}

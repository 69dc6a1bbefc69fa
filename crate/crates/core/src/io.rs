//! Facet files and simplex labels.
//!
//! A facet file lists one facet per line as whitespace-separated vertex ids.
//! `#` starts a comment; blank lines are ignored; LF and CRLF both work.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::complex::{OrientedSimplex, Sign, Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::matrix::Label;

pub fn parse_facets(text: &str) -> Result<SimplicialComplex> {
    let mut facets = Vec::new();
    let mut lines = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let facet = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| Error::Parse { line: k + 1, message: format!("`{tok}` is not a vertex id") })
            })
            .collect::<Result<Vec<usize>>>()?;
        facets.push(facet);
        lines.push(k + 1);
    }
    if facets.is_empty() {
        return Err(Error::EmptyFacetList);
    }
    SimplicialComplex::from_facets(&facets).map_err(|e| match e {
        Error::DuplicateVertex { index, vertex } => {
            Error::Parse { line: lines[index], message: format!("duplicate vertex {vertex}") }
        }
        Error::InvalidArgument(message) => Error::Parse { line: 0, message },
        other => other,
    })
}

pub fn load(path: impl AsRef<Path>) -> Result<SimplicialComplex> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_facets(&text)
}

/// Facets, one per line, lowest dimension first.
pub fn facet_text(complex: &SimplicialComplex) -> String {
    let mut out = String::new();
    for f in complex.facets() {
        let ids: Vec<String> = f.vertices().iter().map(usize::to_string).collect();
        let _ = writeln!(out, "{}", ids.join(" "));
    }
    out
}

pub fn save(complex: &SimplicialComplex, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, facet_text(complex)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Parses `[0,1,2]`, `+[0,1]`, `-[1,2]`, `0,1` or `0 1`; `death` names the death state.
pub fn parse_label(text: &str) -> Result<Label> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("death") {
        return Ok(Label::Death);
    }
    let (sign, rest) = match t.strip_prefix('-') {
        Some(r) => (Some(Sign::Minus), r),
        None => match t.strip_prefix('+') {
            Some(r) => (Some(Sign::Plus), r),
            None => (None, t),
        },
    };
    let body = rest.trim().trim_start_matches('[').trim_end_matches(']');
    let bad = || Error::InvalidArgument(format!("cannot read `{text}` as a simplex"));
    let ids = body
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| bad()))
        .collect::<Result<Vec<usize>>>()?;
    if ids.is_empty() {
        return Err(bad());
    }
    let simplex = Simplex::new(ids).map_err(|_| bad())?;
    Ok(match sign {
        None => Label::Simplex(simplex),
        Some(sign) => Label::Oriented(OrientedSimplex::new(simplex, sign)?),
    })
}

/// The oriented simplex named by a label; plain simplexes get the canonical orientation.
pub fn oriented_from_label(label: &Label) -> Result<OrientedSimplex> {
    match label {
        Label::Simplex(s) => Ok(OrientedSimplex::positive(s.clone())),
        Label::Oriented(o) => Ok(o.clone()),
        Label::Death => Err(Error::InvalidArgument("the death state is not a simplex".into())),
    }
}

//! Small complexes shipped with the crate.

use crate::complex::SimplicialComplex;
use crate::io::parse_facets;

const FILES: &[(&str, &str)] = &[
    ("hollow-triangle", include_str!("../data/hollow-triangle.fct")),
    ("filled-triangle", include_str!("../data/filled-triangle.fct")),
    ("sphere", include_str!("../data/sphere.fct")),
    ("torus", include_str!("../data/torus.fct")),
    ("mobius", include_str!("../data/mobius.fct")),
    ("rp2", include_str!("../data/rp2.fct")),
    ("two-triangles", include_str!("../data/two-triangles.fct")),
    ("path", include_str!("../data/path.fct")),
    ("odd-cycle", include_str!("../data/odd-cycle.fct")),
    ("annulus", include_str!("../data/annulus.fct")),
];

/// Names of the nine reference complexes, excluding extras such as `annulus`.
pub const CORPUS: [&str; 9] =
    ["hollow-triangle", "filled-triangle", "sphere", "torus", "mobius", "rp2", "two-triangles", "path", "odd-cycle"];

/// Every bundled name, including extras.
pub fn names() -> impl Iterator<Item = &'static str> {
    FILES.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".fct").unwrap_or(name);
    FILES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn named(name: &str) -> Option<SimplicialComplex> {
    source(name).map(|t| parse_facets(t).expect("bundled complexes parse"))
}

/// The nine reference complexes with their names.
pub fn all() -> Vec<(&'static str, SimplicialComplex)> {
    CORPUS.iter().map(|&n| (n, named(n).expect("bundled"))).collect()
}

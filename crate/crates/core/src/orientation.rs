//! Orientability and disorientability of the top dimension, and closing free faces.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chain::check_range;
use crate::complex::{boundary_sign, OrientedSimplex, Sign, Simplex, SimplicialComplex};
use crate::error::Result;
use crate::signed_graph::{down_signed_graph, is_antibalanced, is_balanced, BalanceCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrientationKind {
    /// Adjacent top simplexes induce opposite orientations on their shared face.
    Compatible,
    /// Adjacent top simplexes induce the same orientation on their shared face.
    Disorienting,
}

/// One sign per top simplex, relative to its canonical representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientationAssignment {
    pub signs: BTreeMap<Simplex, Sign>,
    pub kind: OrientationKind,
}

impl OrientationAssignment {
    pub fn oriented(&self) -> Vec<OrientedSimplex> {
        self.signs.iter().map(|(s, &sign)| OrientedSimplex { simplex: s.clone(), sign }).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientationVerdict {
    pub holds: bool,
    pub assignment: Option<OrientationAssignment>,
    /// Top simplexes along a cycle that cannot be consistently signed.
    pub obstruction: Option<Vec<Simplex>>,
    /// Number of down-connected components of top simplexes.
    pub components: usize,
}

/// Orientable iff the down signed graph at the top dimension is balanced.
/// Each down-connected component is switched independently, so the verdict is
/// the conjunction over components.
pub fn is_orientable(complex: &SimplicialComplex) -> Result<OrientationVerdict> {
    decide(complex, OrientationKind::Compatible)
}

/// Disorientable iff the down signed graph at the top dimension is antibalanced.
pub fn is_disorientable(complex: &SimplicialComplex) -> Result<OrientationVerdict> {
    decide(complex, OrientationKind::Disorienting)
}

fn decide(complex: &SimplicialComplex, kind: OrientationKind) -> Result<OrientationVerdict> {
    let n = complex.dim();
    check_range("orientability", n, 1, usize::MAX)?;
    let g = down_signed_graph(complex, n, None)?;
    let verdict = match kind {
        OrientationKind::Compatible => is_balanced(&g),
        OrientationKind::Disorienting => is_antibalanced(&g),
    };
    let components = complex.connected_components(n, crate::complex::Direction::Down)?.len();
    let top = complex.simplices(n);
    Ok(match verdict.certificate {
        BalanceCertificate::Switching(sw) => {
            let signs = top
                .iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), if sw.flipped.contains(&i) { Sign::Minus } else { Sign::Plus }))
                .collect();
            OrientationVerdict {
                holds: true,
                assignment: Some(OrientationAssignment { signs, kind }),
                obstruction: None,
                components,
            }
        }
        BalanceCertificate::NegativeCycle(cycle) => OrientationVerdict {
            holds: false,
            assignment: None,
            obstruction: Some(cycle.into_iter().map(|i| top[i].clone()).collect()),
            components,
        },
    })
}

/// Adjacent pairs `(σ, σ', ρ)` whose induced orientations on `ρ` break the assignment,
/// checked directly from boundary signs.
pub fn assignment_violations(
    complex: &SimplicialComplex,
    assignment: &OrientationAssignment,
) -> Result<Vec<(Simplex, Simplex, Simplex)>> {
    let n = complex.dim();
    check_range("orientation check", n, 1, usize::MAX)?;
    let oriented = |s: &Simplex| -> Result<OrientedSimplex> {
        let sign = *assignment.signs.get(s).ok_or_else(|| crate::error::Error::SimplexNotFound(s.clone()))?;
        Ok(OrientedSimplex { simplex: s.clone(), sign })
    };
    let mut bad = Vec::new();
    for (r, rho) in complex.simplices(n - 1).iter().enumerate() {
        let rho_plus = OrientedSimplex::positive(rho.clone());
        let cofaces = complex.cofaces_of(n - 1, r);
        for (a, &i) in cofaces.iter().enumerate() {
            for &j in &cofaces[a + 1..] {
                let (s, t) = (complex.simplex(n, i), complex.simplex(n, j));
                let same = boundary_sign(&rho_plus, &oriented(s)?)? == boundary_sign(&rho_plus, &oriented(t)?)?;
                let ok = match assignment.kind {
                    OrientationKind::Compatible => !same,
                    OrientationKind::Disorienting => same,
                };
                if !ok {
                    bad.push((s.clone(), t.clone(), rho.clone()));
                }
            }
        }
    }
    Ok(bad)
}

/// `(N-1)`-simplexes with exactly one coface.
pub fn free_faces(complex: &SimplicialComplex) -> Vec<Simplex> {
    let n = complex.dim();
    if n == 0 {
        return Vec::new();
    }
    (0..complex.count(n - 1))
        .filter(|&r| complex.coface_count(n - 1, r) == 1)
        .map(|r| complex.simplex(n - 1, r).clone())
        .collect()
}

/// Cones every free face off its own fresh vertex. The `k`-th free face in
/// canonical order gets vertex `max_vertex + 1 + k`.
pub fn extend_closing_boundary(complex: &SimplicialComplex) -> Result<SimplicialComplex> {
    let free = free_faces(complex);
    if free.is_empty() {
        return Ok(complex.clone());
    }
    let base = complex.max_vertex() + 1;
    let mut facets: Vec<Vec<usize>> = complex.facets().iter().map(|s| s.vertices().to_vec()).collect();
    for (k, rho) in free.iter().enumerate() {
        let mut v = rho.vertices().to_vec();
        v.push(base + k);
        facets.push(v);
    }
    SimplicialComplex::from_facets(facets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> SimplicialComplex {
        SimplicialComplex::from_facets([[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]).unwrap()
    }
    fn mobius() -> SimplicialComplex {
        SimplicialComplex::from_facets([[0, 1, 2], [1, 2, 3], [2, 3, 4], [3, 4, 0], [4, 0, 1]]).unwrap()
    }
    fn rp2() -> SimplicialComplex {
        SimplicialComplex::from_facets([
            [0, 1, 2],
            [0, 2, 3],
            [0, 3, 4],
            [0, 4, 5],
            [0, 5, 1],
            [1, 2, 4],
            [2, 3, 5],
            [3, 4, 1],
            [4, 5, 2],
            [5, 1, 3],
        ])
        .unwrap()
    }

    #[test]
    fn sphere_is_orientable() {
        let k = sphere();
        let v = is_orientable(&k).unwrap();
        assert!(v.holds);
        let a = v.assignment.unwrap();
        assert!(assignment_violations(&k, &a).unwrap().is_empty());
        // alternating signs: [0,1,2]+, [0,1,3]-, [0,2,3]+, [1,2,3]- up to a global flip
        let signs: Vec<Sign> = a.signs.values().copied().collect();
        assert!(signs == [Sign::Plus, Sign::Minus, Sign::Plus, Sign::Minus] || signs == [Sign::Minus, Sign::Plus, Sign::Minus, Sign::Plus]);
        assert!(!is_disorientable(&k).unwrap().holds);
    }

    #[test]
    fn nonorientable_surfaces() {
        for k in [mobius(), rp2()] {
            let v = is_orientable(&k).unwrap();
            assert!(!v.holds);
            assert!(v.obstruction.unwrap().len() >= 3);
        }
    }

    #[test]
    fn graphs_disorientable_iff_bipartite() {
        let path = SimplicialComplex::from_facets([[0, 1], [1, 2]]).unwrap();
        let v = is_disorientable(&path).unwrap();
        assert!(v.holds);
        assert!(assignment_violations(&path, &v.assignment.unwrap()).unwrap().is_empty());
        let c5 = SimplicialComplex::from_facets((0..5).map(|i| [i, (i + 1) % 5])).unwrap();
        assert!(!is_disorientable(&c5).unwrap().holds);
        let c4 = SimplicialComplex::from_facets((0..4).map(|i| [i, (i + 1) % 4])).unwrap();
        assert!(is_disorientable(&c4).unwrap().holds);
    }

    #[test]
    fn face_of_degree_three_blocks_orientation() {
        let book = SimplicialComplex::from_facets([[0, 1, 2], [0, 1, 3], [0, 1, 4]]).unwrap();
        assert!(!is_orientable(&book).unwrap().holds);
    }

    #[test]
    fn per_component_conjunction() {
        let k = SimplicialComplex::from_facets([[0, 1, 2], [3, 4, 5]]).unwrap();
        let v = is_orientable(&k).unwrap();
        assert!(v.holds);
        assert_eq!(v.components, 2);
        let mixed = SimplicialComplex::from_facets([
            vec![0, 1, 2],
            vec![1, 2, 3],
            vec![2, 3, 4],
            vec![3, 4, 0],
            vec![4, 0, 1],
            vec![10, 11, 12],
        ])
        .unwrap();
        assert!(!is_orientable(&mixed).unwrap().holds);
    }

    #[test]
    fn bad_assignment_is_caught() {
        let k = sphere();
        let mut a = is_orientable(&k).unwrap().assignment.unwrap();
        let first = a.signs.keys().next().unwrap().clone();
        let s = a.signs[&first];
        a.signs.insert(first, -s);
        assert_eq!(assignment_violations(&k, &a).unwrap().len(), 3);
    }

    #[test]
    fn vertex_complex_is_out_of_range() {
        let k = SimplicialComplex::from_facets([[0], [1]]).unwrap();
        assert!(is_orientable(&k).is_err());
        assert!(free_faces(&k).is_empty());
    }

    #[test]
    fn free_faces_enumeration() {
        assert!(free_faces(&sphere()).is_empty());
        assert_eq!(free_faces(&mobius()).len(), 5);
        let filled = SimplicialComplex::from_facets([[0, 1, 2]]).unwrap();
        assert_eq!(free_faces(&filled).len(), 3);
    }

    #[test]
    fn closing_boundary() {
        assert_eq!(extend_closing_boundary(&sphere()).unwrap(), sphere());
        let filled = SimplicialComplex::from_facets([[0, 1, 2]]).unwrap();
        let e = extend_closing_boundary(&filled).unwrap();
        assert_eq!(e.count(2), 4);
        assert_eq!(e.count(0), 6);
        for s in filled.simplices(1) {
            assert_eq!(e.coface_count(1, e.index_of(s).unwrap()), 2);
        }
        let m = extend_closing_boundary(&mobius()).unwrap();
        assert_eq!(m.count(2), 10);
        assert_eq!(m.count(0), 10);
        for d in 0..=2 {
            assert!(mobius().simplices(d).iter().all(|s| m.contains(s)));
        }
    }
}

//! Finite abstract simplicial complexes with orientation bookkeeping.
//!
//! Simplexes are stored in canonical form (strictly increasing vertex ids) and
//! sorted lexicographically inside each dimension. That order fixes the row and
//! column order of every operator built on top of a complex.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simplex as its strictly increasing vertex list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    /// Builds the canonical simplex on `vertices`, in any order.
    pub fn new(vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = vertices.into_iter().collect();
        if v.is_empty() {
            return Err(Error::EmptyFacet { index: 0 });
        }
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateVertex { index: 0, vertex: w[0] });
        }
        Ok(Simplex(v))
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// The face obtained by deleting the vertex at position `j`.
    pub fn face(&self, j: usize) -> Simplex {
        let mut v = self.0.clone();
        v.remove(j);
        Simplex(v)
    }

    /// Position of the vertex whose removal turns `self` into `face`.
    pub fn removed_position(&self, face: &Simplex) -> Option<usize> {
        if face.0.len() + 1 != self.0.len() {
            return None;
        }
        let j = self.0.iter().zip(face.0.iter()).take_while(|(a, b)| a == b).count();
        (self.0[..j] == face.0[..j] && self.0[j + 1..] == face.0[j..]).then_some(j)
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.0.binary_search(v).is_ok())
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

/// Orientation relative to the increasing-order representative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^k`.
    pub fn parity(k: usize) -> Sign {
        if k.is_multiple_of(2) {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: f64) -> Sign {
        if v < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A simplex together with one of its two orientations.
///
/// Vertices carry no orientation: a 0-simplex always has sign `+`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrientedSimplex {
    pub simplex: Simplex,
    pub sign: Sign,
}

impl OrientedSimplex {
    pub fn new(simplex: Simplex, sign: Sign) -> Result<Self> {
        if simplex.dim() == 0 && sign == Sign::Minus {
            return Err(Error::InvalidArgument(format!("vertex {simplex} cannot carry a negative orientation")));
        }
        Ok(OrientedSimplex { simplex, sign })
    }

    pub fn positive(simplex: Simplex) -> Self {
        OrientedSimplex { simplex, sign: Sign::Plus }
    }

    /// The opposite orientation. Vertices are returned unchanged.
    pub fn reversed(&self) -> Self {
        let sign = if self.simplex.dim() == 0 { Sign::Plus } else { -self.sign };
        OrientedSimplex { simplex: self.simplex.clone(), sign }
    }
}

impl fmt::Display for OrientedSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.sign, self.simplex)
    }
}

/// Adjacency direction for connectivity queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// Through shared cofaces.
    Up,
    /// Through shared codimension-1 faces.
    Down,
}

/// An immutable, inclusion-closed family of simplexes.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
    // faces[d][i][j] = index (in d-1) of the face of simplex i with vertex j removed
    faces: Vec<Vec<Vec<usize>>>,
    // cofaces[d][i] = sorted indices (in d+1) of the cofaces of simplex i
    cofaces: Vec<Vec<Vec<usize>>>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.simplices == other.simplices
    }
}

impl SimplicialComplex {
    /// Inclusion closure of a list of facets.
    pub fn from_facets<I, F>(facets: I) -> Result<Self>
    where
        I: IntoIterator<Item = F>,
        F: AsRef<[usize]>,
    {
        let mut by_dim: Vec<BTreeSet<Simplex>> = Vec::new();
        let mut any = false;
        for (index, facet) in facets.into_iter().enumerate() {
            any = true;
            let facet = facet.as_ref();
            if facet.is_empty() {
                return Err(Error::EmptyFacet { index });
            }
            let mut v = facet.to_vec();
            v.sort_unstable();
            if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateVertex { index, vertex: w[0] });
            }
            if v.len() > 24 {
                return Err(Error::InvalidArgument(format!("facet {index} has {} vertices; closure too large", v.len())));
            }
            if by_dim.len() < v.len() {
                by_dim.resize_with(v.len(), BTreeSet::new);
            }
            // every nonempty subset, in increasing order
            for mask in 1u32..(1u32 << v.len()) {
                let sub: Vec<usize> =
                    v.iter().enumerate().filter(|(k, _)| mask & (1 << k) != 0).map(|(_, &x)| x).collect();
                let d = sub.len() - 1;
                by_dim[d].insert(Simplex(sub));
            }
        }
        if !any {
            return Err(Error::EmptyFacetList);
        }
        Ok(Self::from_levels(by_dim.into_iter().map(|s| s.into_iter().collect()).collect()))
    }

    fn from_levels(simplices: Vec<Vec<Simplex>>) -> Self {
        let index: Vec<HashMap<Simplex, usize>> = simplices
            .iter()
            .map(|level| level.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        let mut faces = vec![Vec::new(); simplices.len()];
        let mut cofaces: Vec<Vec<Vec<usize>>> = simplices.iter().map(|l| vec![Vec::new(); l.len()]).collect();
        for d in 1..simplices.len() {
            faces[d] = simplices[d]
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    (0..=d)
                        .map(|j| {
                            let f = index[d - 1][&s.face(j)];
                            cofaces[d - 1][f].push(i);
                            f
                        })
                        .collect()
                })
                .collect();
        }
        for level in &mut cofaces {
            for c in level.iter_mut() {
                c.sort_unstable();
            }
        }
        let complex = SimplicialComplex { simplices, index, faces, cofaces };
        debug_assert!(complex.is_closed());
        complex
    }

    fn is_closed(&self) -> bool {
        (1..self.simplices.len()).all(|d| {
            self.simplices[d].iter().all(|s| (0..=d).all(|j| self.index[d - 1].contains_key(&s.face(j))))
        })
    }

    /// Top dimension `N`.
    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices.get(d).map_or(0, Vec::len)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    /// Canonical `d`-simplexes in lexicographic order (empty above `N`).
    pub fn simplices(&self, d: usize) -> &[Simplex] {
        self.simplices.get(d).map_or(&[], Vec::as_slice)
    }

    pub fn simplex(&self, d: usize, i: usize) -> &Simplex {
        &self.simplices[d][i]
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s.dim())?.get(s).copied()
    }

    pub(crate) fn require(&self, s: &Simplex) -> Result<usize> {
        self.index_of(s).ok_or_else(|| Error::SimplexNotFound(s.clone()))
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    /// Indices of the faces of simplex `i` of dimension `d`, by removed position.
    pub fn faces_of(&self, d: usize, i: usize) -> &[usize] {
        if d == 0 {
            &[]
        } else {
            &self.faces[d][i]
        }
    }

    /// Indices of the cofaces of simplex `i` of dimension `d`.
    pub fn cofaces_of(&self, d: usize, i: usize) -> &[usize] {
        &self.cofaces[d][i]
    }

    /// Number of cofaces (constant-one degree).
    pub fn coface_count(&self, d: usize, i: usize) -> usize {
        self.cofaces[d][i].len()
    }

    /// Inclusion-maximal simplexes, lowest dimension first.
    pub fn facets(&self) -> Vec<Simplex> {
        (0..=self.dim())
            .flat_map(|d| {
                self.simplices[d].iter().enumerate().filter(move |(i, _)| self.cofaces[d][*i].is_empty()).map(|(_, s)| s.clone())
            })
            .collect()
    }

    /// All facets have dimension `N`.
    pub fn is_pure(&self) -> bool {
        (0..self.dim()).all(|d| self.cofaces[d].iter().all(|c| !c.is_empty()))
    }

    pub fn max_vertex(&self) -> usize {
        self.simplices[0].last().map_or(0, |s| s.0[0])
    }

    /// The `k`-skeleton (simplexes of dimension at most `k`).
    pub fn skeleton(&self, k: usize) -> SimplicialComplex {
        if k >= self.dim() {
            return self.clone();
        }
        Self::from_levels(self.simplices[..=k].to_vec())
    }

    /// Sign of face `f` (index in `d-1`) in the boundary of simplex `i` of dimension `d`,
    /// both canonically oriented. `None` when `f` is not a face.
    pub fn incidence(&self, d: usize, i: usize, f: usize) -> Option<Sign> {
        self.faces_of(d, i).iter().position(|&x| x == f).map(Sign::parity)
    }

    /// Up-neighbours of simplex `i` of dimension `d` as sorted `(neighbour, shared coface)` indices.
    pub fn up_neighbors(&self, d: usize, i: usize) -> Vec<(usize, usize)> {
        if d >= self.dim() {
            return Vec::new();
        }
        self.cofaces[d][i]
            .iter()
            .flat_map(|&t| self.faces[d + 1][t].iter().filter(move |&&j| j != i).map(move |&j| (j, t)))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Down-neighbours of simplex `i` of dimension `d` as sorted `(neighbour, shared face)` indices.
    pub fn down_neighbors(&self, d: usize, i: usize) -> Vec<(usize, usize)> {
        if d == 0 {
            return Vec::new();
        }
        self.faces[d][i]
            .iter()
            .flat_map(|&r| self.cofaces[d - 1][r].iter().filter(move |&&j| j != i).map(move |&j| (j, r)))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Simplexes of the same dimension sharing a coface with `s`, paired with that coface.
    pub fn up_adjacent(&self, s: &Simplex) -> Result<Vec<(Simplex, Simplex)>> {
        let d = s.dim();
        let i = self.require(s)?;
        Ok(self
            .up_neighbors(d, i)
            .into_iter()
            .map(|(j, t)| (self.simplices[d][j].clone(), self.simplices[d + 1][t].clone()))
            .collect())
    }

    /// Simplexes of the same dimension sharing a codimension-1 face with `s`, paired with that face.
    pub fn down_adjacent(&self, s: &Simplex) -> Result<Vec<(Simplex, Simplex)>> {
        let d = s.dim();
        let i = self.require(s)?;
        if d == 0 {
            return Err(Error::DimensionOutOfRange { what: "down adjacency", dim: 0, min: 1, max: self.dim() });
        }
        Ok(self
            .down_neighbors(d, i)
            .into_iter()
            .map(|(j, r)| (self.simplices[d][j].clone(), self.simplices[d - 1][r].clone()))
            .collect())
    }

    /// Equivalence classes of `d`-simplexes under chains of up or down adjacency,
    /// as sorted index lists ordered by their smallest member.
    pub fn connected_components(&self, d: usize, direction: Direction) -> Result<Vec<Vec<usize>>> {
        let n = self.dim();
        match direction {
            Direction::Up if n == 0 || d > n - 1 => {
                return Err(Error::DimensionOutOfRange { what: "up connectivity", dim: d, min: 0, max: n.saturating_sub(1) })
            }
            Direction::Down if d == 0 || d > n => {
                return Err(Error::DimensionOutOfRange { what: "down connectivity", dim: d, min: 1, max: n })
            }
            _ => {}
        }
        let count = self.count(d);
        let mut label = vec![usize::MAX; count];
        let mut classes = Vec::new();
        for start in 0..count {
            if label[start] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let mut members = vec![start];
            label[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                let neighbors = match direction {
                    Direction::Up => self.up_neighbors(d, i),
                    Direction::Down => self.down_neighbors(d, i),
                };
                for (j, _) in neighbors {
                    if label[j] == usize::MAX {
                        label[j] = id;
                        members.push(j);
                        queue.push_back(j);
                    }
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
        Ok(classes)
    }

    /// Sum of the weights of the cofaces of `s`; zero for a facet.
    pub fn degree(&self, s: &Simplex, w: &WeightFunction) -> Result<f64> {
        let d = s.dim();
        let i = self.require(s)?;
        if d == self.dim() {
            return Ok(0.0);
        }
        let weights = w.resolve(self)?;
        Ok(self.cofaces[d][i].iter().map(|&t| weights.at(d + 1)[t]).sum())
    }
}

/// `+1` when the orientation of `rho` agrees with the one induced on it by the boundary of `sigma`.
pub fn boundary_sign(rho: &OrientedSimplex, sigma: &OrientedSimplex) -> Result<Sign> {
    let j = sigma
        .simplex
        .removed_position(&rho.simplex)
        .ok_or_else(|| Error::NotAFace { face: rho.simplex.clone(), simplex: sigma.simplex.clone() })?;
    Ok(Sign::parity(j) * rho.sign * sigma.sign)
}

/// How simplex weights are chosen for inner products and Laplacians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum WeightFunction {
    /// Every simplex weighs 1 (combinatorial Laplacians).
    ConstantOne,
    /// Facets weigh 1 and every other simplex weighs its degree.
    Normalized,
    /// `1/deg` on `d`-simplexes that have cofaces, 1 everywhere else.
    ReciprocalDegree(usize),
    /// Explicit positive weights for every simplex.
    Explicit(BTreeMap<Simplex, f64>),
}

/// Weights resolved on a particular complex, indexed like its simplex lists.
#[derive(Clone, Debug, PartialEq)]
pub struct Weights {
    by_dim: Vec<Vec<f64>>,
}

impl Weights {
    pub fn at(&self, d: usize) -> &[f64] {
        self.by_dim.get(d).map_or(&[], Vec::as_slice)
    }

    pub fn ones(complex: &SimplicialComplex) -> Self {
        Weights { by_dim: complex.counts().into_iter().map(|n| vec![1.0; n]).collect() }
    }
}

impl WeightFunction {
    pub fn resolve(&self, complex: &SimplicialComplex) -> Result<Weights> {
        let n = complex.dim();
        let by_dim = match self {
            WeightFunction::ConstantOne => return Ok(Weights::ones(complex)),
            WeightFunction::Normalized => {
                let mut by_dim: Vec<Vec<f64>> = complex.counts().into_iter().map(|c| vec![1.0; c]).collect();
                for d in (0..n).rev() {
                    for i in 0..complex.count(d) {
                        let deg: f64 = complex.cofaces_of(d, i).iter().map(|&t| by_dim[d + 1][t]).sum();
                        if deg > 0.0 {
                            by_dim[d][i] = deg;
                        }
                    }
                }
                by_dim
            }
            WeightFunction::ReciprocalDegree(k) => {
                let mut by_dim: Vec<Vec<f64>> = complex.counts().into_iter().map(|c| vec![1.0; c]).collect();
                if *k < n {
                    for (i, w) in by_dim[*k].iter_mut().enumerate() {
                        let deg = complex.coface_count(*k, i);
                        if deg > 0 {
                            *w = 1.0 / deg as f64;
                        }
                    }
                }
                by_dim
            }
            WeightFunction::Explicit(table) => {
                let mut by_dim = Vec::with_capacity(n + 1);
                for d in 0..=n {
                    let level = complex
                        .simplices(d)
                        .iter()
                        .map(|s| table.get(s).copied().ok_or_else(|| Error::MissingWeight(s.clone())))
                        .collect::<Result<Vec<f64>>>()?;
                    by_dim.push(level);
                }
                by_dim
            }
        };
        for (d, level) in by_dim.iter().enumerate() {
            if let Some((i, &v)) = level.iter().enumerate().find(|(_, &v)| !(v > 0.0 && v.is_finite())) {
                return Err(Error::NonPositiveWeight { simplex: complex.simplex(d, i).clone(), value: v });
            }
        }
        Ok(Weights { by_dim })
    }
}

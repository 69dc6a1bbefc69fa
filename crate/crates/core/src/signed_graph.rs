//! Up and down signed graphs of an oriented complex, switching and balance.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::chain::check_range;
use crate::complex::{OrientedSimplex, Sign, SimplicialComplex, WeightFunction};
use crate::error::{Error, Result};
use crate::hodge::{down_dense, spectrum, up_dense, SpectralDecomposition};
use crate::matrix::{max_abs_diff, Label, OperatorMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedEdge {
    pub i: usize,
    pub j: usize,
    pub sign: Sign,
}

/// Vertices are the `d`-simplexes with a fixed orientation each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedGraph {
    pub vertices: Vec<OrientedSimplex>,
    /// Sorted by `(i, j)` with `i < j`.
    pub edges: Vec<SignedEdge>,
    pub degrees: Vec<usize>,
}

impl SignedGraph {
    fn from_edges(vertices: Vec<OrientedSimplex>, mut edges: Vec<SignedEdge>) -> Self {
        edges.sort_by_key(|e| (e.i, e.j));
        let mut degrees = vec![0; vertices.len()];
        for e in &edges {
            degrees[e.i] += 1;
            degrees[e.j] += 1;
        }
        SignedGraph { vertices, edges, degrees }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    fn adjacency(&self) -> Vec<Vec<(usize, Sign)>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.i].push((e.j, e.sign));
            adj[e.j].push((e.i, e.sign));
        }
        adj
    }

    pub fn edge_sign(&self, a: usize, b: usize) -> Option<Sign> {
        let (i, j) = if a < b { (a, b) } else { (b, a) };
        self.edges.binary_search_by_key(&(i, j), |e| (e.i, e.j)).ok().map(|k| self.edges[k].sign)
    }

    /// Every edge sign flipped.
    pub fn negated(&self) -> SignedGraph {
        SignedGraph {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|e| SignedEdge { sign: -e.sign, ..*e }).collect(),
            degrees: self.degrees.clone(),
        }
    }

    /// One edge per line: `i j +1` or `i j -1`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}1", e.i, e.j, e.sign);
        }
        out
    }
}

/// A set of vertices whose incident edge signs get flipped.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Switching {
    pub flipped: BTreeSet<usize>,
}

impl Switching {
    pub fn new(flipped: impl IntoIterator<Item = usize>) -> Self {
        Switching { flipped: flipped.into_iter().collect() }
    }

    /// Switches the graph. The orientation of each flipped simplex is reversed too,
    /// so the result is the signed graph of the reoriented complex.
    pub fn apply(&self, g: &SignedGraph) -> SignedGraph {
        let vertices = g
            .vertices
            .iter()
            .enumerate()
            .map(|(k, v)| if self.flipped.contains(&k) { v.reversed() } else { v.clone() })
            .collect();
        let edges = g
            .edges
            .iter()
            .map(|e| {
                let flips = self.flipped.contains(&e.i) != self.flipped.contains(&e.j);
                SignedEdge { sign: if flips { -e.sign } else { e.sign }, ..*e }
            })
            .collect();
        SignedGraph { vertices, edges, degrees: g.degrees.clone() }
    }
}

fn orientation_signs(complex: &SimplicialComplex, d: usize, orientation: Option<&[Sign]>) -> Result<Vec<Sign>> {
    match orientation {
        None => Ok(vec![Sign::Plus; complex.count(d)]),
        Some(o) if o.len() != complex.count(d) => {
            Err(Error::DimensionMismatch { expected: complex.count(d), found: o.len() })
        }
        Some(o) if d == 0 && o.contains(&Sign::Minus) => {
            Err(Error::InvalidArgument("vertices cannot be reoriented".into()))
        }
        Some(o) => Ok(o.to_vec()),
    }
}

fn oriented_vertices(complex: &SimplicialComplex, d: usize, signs: &[Sign]) -> Vec<OrientedSimplex> {
    complex.simplices(d).iter().zip(signs).map(|(s, &sign)| OrientedSimplex { simplex: s.clone(), sign }).collect()
}

/// Edge between two `d`-simplexes sharing a coface `τ`, signed `-sgn([σ],∂[τ]) sgn([σ'],∂[τ])`.
/// `orientation` gives one sign per `d`-simplex; `None` means all canonical.
pub fn up_signed_graph(complex: &SimplicialComplex, d: usize, orientation: Option<&[Sign]>) -> Result<SignedGraph> {
    check_range("up signed graph", d, 0, complex.dim().wrapping_sub(1))?;
    let o = orientation_signs(complex, d, orientation)?;
    let mut edges = Vec::new();
    for t in 0..complex.count(d + 1) {
        let faces = complex.faces_of(d + 1, t);
        for (a, &i) in faces.iter().enumerate() {
            for (b, &j) in faces.iter().enumerate().skip(a + 1) {
                let sign = -(o[i] * Sign::parity(a)) * (o[j] * Sign::parity(b));
                let (i, j) = if i < j { (i, j) } else { (j, i) };
                edges.push(SignedEdge { i, j, sign });
            }
        }
    }
    Ok(SignedGraph::from_edges(oriented_vertices(complex, d, &o), edges))
}

/// Edge between two `d`-simplexes sharing a face `ρ`, signed `-sgn([ρ],∂[σ]) sgn([ρ],∂[σ'])`.
pub fn down_signed_graph(complex: &SimplicialComplex, d: usize, orientation: Option<&[Sign]>) -> Result<SignedGraph> {
    check_range("down signed graph", d, 1, complex.dim())?;
    let o = orientation_signs(complex, d, orientation)?;
    let mut edges = Vec::new();
    for r in 0..complex.count(d - 1) {
        let cofaces = complex.cofaces_of(d - 1, r);
        for (a, &i) in cofaces.iter().enumerate() {
            for &j in &cofaces[a + 1..] {
                let si = o[i] * complex.incidence(d, i, r).expect("coface relation");
                let sj = o[j] * complex.incidence(d, j, r).expect("coface relation");
                edges.push(SignedEdge { i, j, sign: -(si * sj) });
            }
        }
    }
    Ok(SignedGraph::from_edges(oriented_vertices(complex, d, &o), edges))
}

/// `L^s f(v) = f(v) - (1/deg v) Σ s(vv') f(v')`.
pub fn signed_laplacian(g: &SignedGraph) -> Result<OperatorMatrix> {
    if let Some(k) = g.degrees.iter().position(|&d| d == 0) {
        return Err(Error::IsolatedVertex(g.vertices[k].to_string()));
    }
    let n = g.vertex_count();
    let mut m = DMatrix::identity(n, n);
    for e in &g.edges {
        m[(e.i, e.j)] -= e.sign.value() / g.degrees[e.i] as f64;
        m[(e.j, e.i)] -= e.sign.value() / g.degrees[e.j] as f64;
    }
    let labels: Vec<Label> = g.vertices.iter().cloned().map(Label::Oriented).collect();
    Ok(OperatorMatrix::new(labels.clone(), labels, m))
}

/// Spectrum of `L^s`, self-adjoint for the degree-weighted inner product.
pub fn signed_laplacian_spectrum(g: &SignedGraph) -> Result<SpectralDecomposition> {
    let l = signed_laplacian(g)?;
    let weights: Vec<f64> = g.degrees.iter().map(|&d| d as f64).collect();
    spectrum(&l.data, &weights)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BalanceCertificate {
    /// Switching this set makes every edge positive.
    Switching(Switching),
    /// A closed vertex walk whose edge signs multiply to `-1`.
    NegativeCycle(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceVerdict {
    pub balanced: bool,
    pub certificate: BalanceCertificate,
}

/// Balance by sign-propagating BFS, one potential in `{±1}` per vertex.
pub fn is_balanced(g: &SignedGraph) -> BalanceVerdict {
    let adj = g.adjacency();
    let n = g.vertex_count();
    let mut potential: Vec<Option<Sign>> = vec![None; n];
    let mut parent = vec![usize::MAX; n];
    for root in 0..n {
        if potential[root].is_some() {
            continue;
        }
        potential[root] = Some(Sign::Plus);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let pu = potential[u].expect("visited");
            for &(v, s) in &adj[u] {
                match potential[v] {
                    None => {
                        potential[v] = Some(pu * s);
                        parent[v] = u;
                        queue.push_back(v);
                    }
                    Some(pv) if pv != pu * s => {
                        return BalanceVerdict {
                            balanced: false,
                            certificate: BalanceCertificate::NegativeCycle(tree_cycle(&parent, u, v)),
                        };
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let flipped = potential.iter().enumerate().filter(|(_, p)| **p == Some(Sign::Minus)).map(|(k, _)| k);
    BalanceVerdict { balanced: true, certificate: BalanceCertificate::Switching(Switching::new(flipped)) }
}

// Closes the non-tree edge (u, v) through the BFS tree: u → lca → v.
fn tree_cycle(parent: &[usize], u: usize, v: usize) -> Vec<usize> {
    let path = |mut x: usize| {
        let mut p = vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            p.push(x);
        }
        p
    };
    let (pu, pv) = (path(u), path(v));
    let depth: HashMap<usize, usize> = pv.iter().enumerate().map(|(k, &x)| (x, k)).collect();
    let (cut_u, lca) = pu.iter().enumerate().find(|(_, x)| depth.contains_key(x)).map(|(k, &x)| (k, x)).expect("same tree");
    let mut cycle: Vec<usize> = pu[..=cut_u].to_vec();
    cycle.extend(pv[..depth[&lca]].iter().rev());
    cycle
}

/// Antibalance: balance of the sign-negated graph.
pub fn is_antibalanced(g: &SignedGraph) -> BalanceVerdict {
    is_balanced(&g.negated())
}

/// Product of edge signs around a closed vertex sequence.
pub fn cycle_sign(g: &SignedGraph, cycle: &[usize]) -> Option<Sign> {
    let mut acc = Sign::Plus;
    for k in 0..cycle.len() {
        acc = acc * g.edge_sign(cycle[k], cycle[(k + 1) % cycle.len()])?;
    }
    Some(acc)
}

/// Max entrywise deviation of `Δ_d^up` from `(d+1) L^s - d I` on the `(d+1)`-skeleton
/// with normalized weights.
pub fn verify_up_relation(complex: &SimplicialComplex, d: usize) -> Result<f64> {
    check_range("up relation", d, 0, complex.dim().wrapping_sub(1))?;
    let skeleton = complex.skeleton(d + 1);
    if let Some(i) = (0..skeleton.count(d)).find(|&i| skeleton.coface_count(d, i) == 0) {
        return Err(Error::NotPure(skeleton.simplex(d, i).clone()));
    }
    let weights = WeightFunction::Normalized.resolve(&skeleton)?;
    let delta = up_dense(&skeleton, d, &weights);
    let ls = signed_laplacian(&up_signed_graph(&skeleton, d, None)?)?.data;
    let n = ls.nrows();
    let rhs = ls * (d as f64 + 1.0) - DMatrix::identity(n, n) * d as f64;
    Ok(max_abs_diff(&delta, &rhs))
}

/// Max entrywise deviation of `Δ_N^down` from `((N+1)/2) L^s`; needs every `(N-1)`-face of degree 2.
pub fn verify_down_relation(complex: &SimplicialComplex) -> Result<f64> {
    let n = complex.dim();
    check_range("down relation", n, 1, usize::MAX)?;
    let offenders: Vec<_> = (0..complex.count(n - 1))
        .filter(|&r| complex.coface_count(n - 1, r) != 2)
        .map(|r| complex.simplex(n - 1, r).clone())
        .collect();
    if !offenders.is_empty() {
        return Err(Error::FaceDegree { expected: 2, offenders });
    }
    let weights = WeightFunction::Normalized.resolve(complex)?;
    let delta = down_dense(complex, n, &weights);
    let ls = signed_laplacian(&down_signed_graph(complex, n, None)?)?.data;
    Ok(max_abs_diff(&delta, &(ls * ((n as f64 + 1.0) / 2.0))))
}

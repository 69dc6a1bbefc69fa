//! Command-line front end: argument types and report assembly for each command.

use std::fmt::Display;
use std::path::Path;

use clap::{Parser, ValueEnum};
use nalgebra::DMatrix;
use serde_json::{json, Value};

use crate::chain::boundary_int;
use crate::complex::{Direction, OrientedSimplex, SimplicialComplex, WeightFunction};
use crate::corpus;
use crate::error::{Error, Result};
use crate::hodge::{
    essential_gap, exact_betti, hodge_decompose, laplacian_spectrum, spectral_gap, spectrum, LaplacianKind,
    KERNEL_TOLERANCE,
};
use crate::io::{load, oriented_from_label, parse_label};
use crate::matrix::Label;
use crate::orientation::{
    assignment_violations, extend_closing_boundary, free_faces, is_disorientable, is_orientable, OrientationKind,
};
use crate::report::{checked, measured, Report, Table};
use crate::signed_graph::{
    down_signed_graph, is_antibalanced, is_balanced, signed_laplacian_spectrum, up_signed_graph, verify_down_relation,
    verify_up_relation, BalanceCertificate, BalanceVerdict, SignedGraph,
};
use crate::walks::{
    down_convergence_rate, down_homology_rank, down_propagation_matrix, down_walk_matrix, expectation_process_down,
    expectation_process_up, graph_type_convergence_rate, graph_type_down_walk, graph_type_identity_residual,
    graph_walk_convergence_rate, graph_walk_identity_residual, graph_walk_matrix, intertwining_residual, monte_carlo,
    stationary_distribution, up_convergence_rate, up_homology_rank, up_transition_operator, up_walk_matrix,
    BoundaryPolicy, ConvergenceFit, MonteCarloConfig, Walk, RANK_TOLERANCE, RATE_TOLERANCE, STOCHASTIC_TOLERANCE,
};

/// Entrywise tolerance for closed-form operator identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;
/// Entrywise tolerance for the intertwining relation.
pub const INTERTWINING_TOLERANCE: f64 = 1e-10;
/// Agreement between independently computed limits.
pub const LIMIT_TOLERANCE: f64 = 1e-8;
/// Slack on spectral containments.
pub const SPECTRAL_SLACK: f64 = 1e-10;
const INTERTWINING_STEPS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Summary,
    Betti,
    Spectrum,
    Gaps,
    Signed,
    Orientable,
    Disorientable,
    WalkUp,
    WalkDown,
    WalkGraph,
    Converge,
    Montecarlo,
    VerifyIdentities,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightsArg {
    One,
    Normalized,
    #[value(name = "recip-deg")]
    RecipDeg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Up,
    Down,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WalkArg {
    /// Lazy walk on vertices.
    Vertex,
    /// Up walk on oriented (N-1)-simplexes.
    Up,
    /// Dirichlet down walk on oriented d-simplexes.
    Down,
    /// Graph-type walk on oriented top simplexes.
    Graph,
}

#[derive(Parser, Clone, Debug)]
#[command(name = "swalk", version, about = "Hodge Laplacians, signed graphs and random walks on simplicial complexes")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Facet file, or the name of a bundled complex (e.g. `sphere`, `torus`).
    #[arg(long)]
    pub complex: String,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(short = 'p', long = "laziness", default_value_t = 0.5)]
    pub laziness: f64,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub chains: usize,
    #[arg(long, value_enum, default_value_t = WeightsArg::Normalized)]
    pub weights: WeightsArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Starting simplex, e.g. `[0,1]`, `+[0,1]` or `-[0,1]`.
    #[arg(long)]
    pub start: Option<String>,
    /// Laplacian for `spectrum`.
    #[arg(long, value_enum, default_value_t = KindArg::Full)]
    pub kind: KindArg,
    /// Walk for `converge` and `montecarlo`.
    #[arg(long, value_enum, default_value_t = WalkArg::Graph)]
    pub walk: WalkArg,
}

pub struct Outcome {
    pub report: Report,
    pub success: bool,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.report.to_json() + "\n",
            Format::Csv => self.report.to_csv(),
            Format::Text => self.report.to_text(),
        }
    }
}

/// A facet file path, or a bundled complex name when no such file exists.
pub fn load_complex(spec: &str) -> Result<SimplicialComplex> {
    if Path::new(spec).exists() {
        return load(spec);
    }
    corpus::named(spec).ok_or_else(|| Error::Io(format!("{spec}: no such file or bundled complex")))
}

pub fn run(cli: &Cli) -> Outcome {
    let mut report = Report::default();
    let result = load_complex(&cli.complex).and_then(|k| {
        report.complex = summary(&k)?;
        dispatch(cli, &k, &mut report)
    });
    match result {
        Ok(success) => Outcome { report, success },
        Err(e) => {
            if let Error::NotOrientable { cycle } = &e {
                report.orientable = json!({ "kind": "compatible", "holds": false, "obstruction": names(cycle) });
            }
            report.warnings.push(format!("error: {e}"));
            Outcome { report, success: false }
        }
    }
}

fn dispatch(cli: &Cli, k: &SimplicialComplex, report: &mut Report) -> Result<bool> {
    match cli.command {
        Command::Summary => Ok(true),
        Command::Betti => betti(cli, k, report),
        Command::Spectrum => spectra(cli, k, report),
        Command::Gaps => gaps(cli, k, report),
        Command::Signed => signed(cli, k, report),
        Command::Orientable => orientation(k, report, OrientationKind::Compatible),
        Command::Disorientable => orientation(k, report, OrientationKind::Disorienting),
        Command::WalkUp => walk_up(cli, k, report),
        Command::WalkDown => walk_down(cli, k, report),
        Command::WalkGraph if cli.dim == Some(0) => walk_vertex(cli, k, report),
        Command::WalkGraph => walk_graph(cli, k, report),
        Command::Converge => converge(cli, k, report),
        Command::Montecarlo => montecarlo(cli, k, report),
        Command::VerifyIdentities => verify_identities(cli, k, report),
    }
}

fn names<T: Display>(items: impl IntoIterator<Item = T>) -> Vec<String> {
    items.into_iter().map(|x| x.to_string()).collect()
}

fn summary(k: &SimplicialComplex) -> Result<Value> {
    let n = k.dim();
    let vertex_components =
        if n >= 1 { k.connected_components(0, Direction::Up)?.len() } else { k.count(0) };
    let top_components = if n >= 1 { Some(k.connected_components(n, Direction::Down)?.len()) } else { None };
    Ok(json!({
        "dim": n,
        "counts": k.counts(),
        "pure": k.is_pure(),
        "facets": k.facets().len(),
        "max_vertex": k.max_vertex(),
        "vertex_components": vertex_components,
        "top_components": top_components,
        "free_faces": names(free_faces(k)),
    }))
}

fn weight_function(arg: WeightsArg, k: &SimplicialComplex, d: usize) -> WeightFunction {
    match arg {
        WeightsArg::One => WeightFunction::ConstantOne,
        WeightsArg::Normalized => WeightFunction::Normalized,
        WeightsArg::RecipDeg => WeightFunction::ReciprocalDegree(d.min(k.dim().saturating_sub(1))),
    }
}

fn weights_name(arg: WeightsArg) -> &'static str {
    match arg {
        WeightsArg::One => "one",
        WeightsArg::Normalized => "normalized",
        WeightsArg::RecipDeg => "recip-deg",
    }
}

fn betti(cli: &Cli, k: &SimplicialComplex, report: &mut Report) -> Result<bool> {
    let (mut exact, mut spectral, mut tolerances) = (Vec::new(), Vec::new(), Vec::new());
    for d in 0..=k.dim() {
        exact.push(exact_betti(k, d)?);
        let s = laplacian_spectrum(k, LaplacianKind::Full, d, &weight_function(cli.weights, k, d))?;
        spectral.push(s.kernel_dim);
        tolerances.push(s.kernel_tolerance);
    }
    let agree = exact == spectral;
    report.betti = json!({
        "values": exact,
        "method": "exact integer rank",
        "spectral": { "weights": weights_name(cli.weights), "values": spectral, "kernel_tolerance": tolerances },
        "agree": agree,
    });
    if !agree {
        report.warnings.push("spectral kernel dimensions disagree with exact ranks".into());
    }
    Ok(agree)
}

fn dims(cli: &Cli, k: &SimplicialComplex) -> Result<Vec<usize>> {
    match cli.dim {
        Some(d) if d > k.dim() => {
            Err(Error::DimensionOutOfRange { what: "--dim", dim: d, min: 0, max: k.dim() })
        }
        Some(d) => Ok(vec![d]),
        None => Ok((0..=k.dim()).collect()),
    }
}

fn spectra(cli: &Cli, k: &SimplicialComplex, report: &mut Report) -> Result<bool> {
    let kind = match cli.kind {
        KindArg::Up => LaplacianKind::Up,
        KindArg::Down => LaplacianKind::Down,
        KindArg::Full => LaplacianKind::Full,
    };
    let mut entries = Vec::new();
    let mut table = Table::new(&["dim", "index", "eigenvalue"]);
    for d in dims(cli, k)? {
        let s = laplacian_spectrum(k, kind, d, &weight_function(cli.weights, k, d))?;
        for (i, x) in s.eigenvalues.iter().enumerate() {
            table.push(vec![d.to_string(), i.to_string(), x.to_string()]);
        }
        let mut entry = json!({
            "dim": d,
            "kind": kind,
            "weights": weights_name(cli.weights),
            "eigenvalues": s.eigenvalues,
            "kernel_dim": s.kernel_dim,
            "kernel_tolerance": s.kernel_tolerance,
        });
        if kind == LaplacianKind::Up && cli.weights == WeightsArg::Normalized {
            let top = s.eigenvalues.last().copied().unwrap_or(0.0);
            entry["upper_bound"] = json!({ "bound": d + 2, "max": top, "slack": SPECTRAL_SLACK,
                "pass": top <= (d + 2) as f64 + SPECTRAL_SLACK });
        }
        entries.push(entry);
    }
    report.spectra = Value::Array(entries);
    report.table = Some(table);
    Ok(true)
}

fn gaps(cli: &Cli, k: &SimplicialComplex, report: &mut Report) -> Result<bool> {
    let n = k.dim();
    let w = weight_function(cli.weights, k, n.saturating_sub(1));
    let gap = spectral_gap(k, &w)?;
    let essential = essential_gap(k, &w)?;
    report.spectra = json!({
        "dim": n - 1,
        "weights": weights_name(cli.weights),
        "spectral_gap": gap.map(|g| measured(g, KERNEL_TOLERANCE)),
        "essential_gap": essential.map(|g| measured(g, KERNEL_TOLERANCE)),
    });
    Ok(true)
}

fn verdict_json(v: &BalanceVerdict, g: &SignedGraph) -> Value {
    let label = |i: usize| g.vertices[i].to_string();
    match &v.certificate {
        BalanceCertificate::Switching(sw) => {
            json!({ "holds": true, "switching": sw.flipped.iter().map(|&i| label(i)).collect::<Vec<_>>() })
        }
        BalanceCertificate::NegativeCycle(c) => {
            json!({ "holds": false, "negative_cycle": c.iter().map(|&i| label(i)).collect::<Vec<_>>() })
        }
    }
}

fn graph_entry(g: &SignedGraph, direction: &str, d: usize, relation: Value) -> Value {
    let balanced = is_balanced(g);
    let antibalanced = is_antibalanced(g);
    let spectrum = match signed_laplacian_spectrum(g) {
        Ok(s) => {
            let (lo, hi) = (s.eigenvalues[0], *s.eigenvalues.last().expect("nonempty"));
            json!({
                "eigenvalues": s.eigenvalues,
                "within_0_2": lo >= -SPECTRAL_SLACK && hi <= 2.0 + SPECTRAL_SLACK,
                "slack": SPECTRAL_SLACK,
                "balance_agrees": (lo < KERNEL_TOLERANCE) == balanced.balanced,
                "antibalance_agrees": (hi > 2.0 - KERNEL_TOLERANCE) == antibalanced.balanced,
                "tolerance": KERNEL_TOLERANCE,
            })
        }
        Err(e) => json!({ "skipped": e.to_string() }),
    };
    json!({
        "direction": direction,
        "dim": d,
        "vertices": names(&g.vertices),
        "edges": g.edges.iter().map(|e| json!([e.i, e.j, e.sign.as_i64()])).collect::<Vec<_>>(),
        "balanced": verdict_json(&balanced, g),
        "antibalanced": verdict_json(&antibalanced, g),
        "spectrum": spectrum,
        "relation": relation,
    })
}

fn residual_or_skip(r: Result<f64>, tolerance: f64) -> Value {
    match r {
        Ok(x) => checked(x, tolerance),
        Err(e) => json!({ "skipped": e.to_string() }),
    }
}

fn signed(cli: &Cli, k: &SimplicialComplex, report: &mut Report) -> Result<bool> {
    let n = k.dim();
    let (up, down) = match cli.dim {
        Some(d) => ((n >= 1 && d < n).then_some(d), (d >= 1 && d <= n).then_some(d)),
        None => (n.checked_sub(1), (n >= 1).then_some(n)),
    };
    if up.is_none() && down.is_none() {
        return Err(Error::DimensionOutOfRange { what: "signed graphs", dim: cli.dim.unwrap_or(0), min: 0, max: n });
    }
    let mut graphs = Vec::new();
    if let Some(d) = up {
        let g = up_signed_graph(k, d, None)?;
        graphs.push(graph_entry(&g, "up", d, residual_or_skip(verify_up_relation(k, d), IDENTITY_TOLERANCE)));
    }
    if let Some(d) = down {
        let g = down_signed_graph(k, d, None)?;
        let relation = if d == n {
            residual_or_skip(verify_down_relation(k), IDENTITY_TOLERANCE)
        } else {
            json!({ "skipped": "relation holds at the top dimension only" })
        };
        graphs.push(graph_entry(&g, "down", d, relation));
    }
    report.signed = Value::Array(graphs);
    Ok(true)
}

fn orientation(k: &SimplicialComplex, report: &mut Report, kind: OrientationKind) -> Result<bool> {
    let v = match kind {
        OrientationKind::Compatible => is_orientable(k)?,
        OrientationKind::Disorienting => is_disorientable(k)?,
    };
    let violations = v.assignment.as_ref().map(|a| assignment_violations(k, a)).transpose()?.map(|x| x.len());
    let g = down_signed_graph(k, k.dim(), None)?;
    let spectral = match signed_laplacian_spectrum(&g) {
        Ok(s) => {
            let value = match kind {
                OrientationKind::Compatible => s.eigenvalues[0],
                OrientationKind::Disorienting => 2.0 - s.eigenvalues.last().expect("nonempty"),
            };
            json!({ "distance_to_extreme": value, "tolerance": KERNEL_TOLERANCE,
                "agrees": (value < KERNEL_TOLERANCE) == v.holds })
        }
        Err(e) => json!({ "skipped": e.to_string() }),
    };
    report.orientable = json!({
        "kind": kind,
        "holds": v.holds,
        "components": v.components,
        "assignment": v.assignment.as_ref().map(|a| {
            a.signs.iter().map(|(s, sign)| (s.to_string(), json!(sign.to_string()))).collect::<serde_json::Map<_, _>>()
        }),
        "obstruction": v.obstruction.as_ref().map(names),
        "pairwise_violations": violations,
        "spectral_check": spectral,
    });
    Ok(true)
}

fn start_simplex(cli: &Cli, k: &SimplicialComplex, d: usize) -> Result<OrientedSimplex> {
    let Some(text) = &cli.start else {
        let first = k.simplices(d).first().ok_or(Error::DimensionOutOfRange {
            what: "start simplex",
            dim: d,
            min: 0,
            max: k.dim(),
        })?;
        return Ok(OrientedSimplex::positive(first.clone()));
    };
    let o = oriented_from_label(&parse_label(text)?)?;
    if o.simplex.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: o.simplex.dim() });
    }
    if !k.contains(&o.simplex) {
        return Err(Error::SimplexNotFound(o.simplex));
    }
    Ok(o)
}

fn homology_json(rank: usize, betti: usize) -> Value {
    json!({ "rank": rank, "betti": betti, "rank_tolerance": RANK_TOLERANCE, "agree": rank == betti })
}

fn process_json(values: &[crate::chain::Cochain], limit: &crate::chain::Cochain) -> Value {
    json!({
        "final": values.last().map(|c| c.values.iter().copied().collect::<Vec<_>>()),
        "limit": limit.values.iter().copied().collect::<Vec<_>>(),
    })
}

fn walk_up(cli: &Cli, k: &SimplicialComplex, report: &mut Report) -> Result<bool> {
    let (n, p) = (k.dim(), cli.laziness);
    let walk = up_walk_matrix(k, p)?;
    let start = start_simplex(cli, k, n - 1)?;
    let op = up_transition_operator(k, p)?;
    let e = expectation_process_up(k, &start, p, cli.steps)?;
    let probe = up_homology_rank(k, p)?;
    let harmonic = hodge_decompose(k, &e.limit, &WeightFunction::Normalized)?.harmonic.values.amax();
    let rows = walk.row_sum_defect();
    report.walks = json!({
        "walk": "up",
        "dim": n - 1,
        "laziness": p,
        "states": walk.len(),
        "start": start.to_string(),
        "steps": cli.steps,
        "simplices": names(k.simplices(n - 1)),
        "row_sum_defect": checked(rows, STOCHASTIC_TOLERANCE),
        "identity_residual": checked(op.residual, IDENTITY_TOLERANCE),
        "scale": e.scale,
        "process": process_json(&e.values, &e.limit),
        "limit_agreement": checked(e.final_distance, LIMIT_TOLERANCE),
        "limit_harmonic_part": checked(harmonic, LIMIT_TOLERANCE),
        "homology": homology_json(probe.rank, exact_betti(k, n - 1)?),
    });
    report.warnings.extend(e.warnings);
    Ok(rows <= STOCHASTIC_TOLERANCE && op.residual <= IDENTITY_TOLERANCE)
}

fn down_dim(cli: &Cli, k: &SimplicialComplex) -> usize {
    cli.dim.unwrap_or(1.min(k.dim()))
}

fn walk_down(cli: &Cli, k: &SimplicialComplex, report: &mut Report) -> Result<bool> {
    let (d, p) = (down_dim(cli, k), cli.laziness);
    let walk = down_walk_matrix(k, d, p)?;
    let start = start_simplex(cli, k, d)?;
    let b = down_propagation_matrix(k, d, p)?;
    let tpt = intertwining_residual(k, d, p, INTERTWINING_STEPS)?;
    let e = expectation_process_down(k, d, &start, p, cli.steps)?;
    let probe = down_homology_rank(k, d, p)?;
    let start_state = walk.find_state(&Label::Oriented(start.clone()))?;
    let death = walk.evolve(&walk.point_mass(start_state), cli.steps)[walk.len() - 1];
    let rows = walk.row_sum_defect();
    report.walks = json!({
        "walk": "down",
        "dim": d,
        "laziness": p,
        "states": walk.len(),
        "start": start.to_string(),
        "steps": cli.steps,
        "simplices": names(k.simplices(d)),
        "row_sum_defect": checked(rows, STOCHASTIC_TOLERANCE),
        "identity_residual": checked(b.residual, IDENTITY_TOLERANCE),
        "intertwining_residual": checked(tpt, INTERTWINING_TOLERANCE),
        "intertwining_steps": INTERTWINING_STEPS,
        "death_mass": death,
        "scale": e.scale,
        "process": process_json(&e.values, &e.limit),
        "limit_agreement": checked(e.final_distance, LIMIT_TOLERANCE),
        "homology": homology_json(probe.rank, exact_betti(k, d)?),
    });
    report.warnings.extend(e.warnings);
    Ok(rows <= STOCHASTIC_TOLERANCE && b.residual <= IDENTITY_TOLERANCE && tpt <= INTERTWINING_TOLERANCE)
}

fn vertex_index(cli: &Cli, k: &SimplicialComplex) -> Result<usize> {
    let s = start_simplex(cli, k, 0)?;
    k.index_of(&s.simplex).ok_or(Error::SimplexNotFound(s.simplex))
}

fn start_independence(walk: &Walk) -> Result<f64> {
    let limits: Vec<Vec<f64>> =
        (0..walk.len()).map(|i| stationary_distribution(walk, &walk.point_mass(i)).map(|s| s.spectral)).collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for a in &limits {
        for b in &limits {
            worst = worst.max(a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max));
        }
    }
    Ok(worst)
}

fn walk_vertex(cli: &Cli, k: &SimplicialComplex, report: &mut Report) -> Result<bool> {
    let p = cli.laziness;
    let walk = graph_walk_matrix(k, p)?;
    let residual = graph_walk_identity_residual(k, p)?;
    let start = vertex_index(cli, k)?;
    let st = stationary_distribution(&walk, &walk.point_mass(start))?;
    report.walks = json!({
        "walk": "vertex",
        "laziness": p,
        "states": names(walk.states()),
        "start": walk.states()[start].to_string(),
        "row_sum_defect": checked(walk.row_sum_defect(), STOCHASTIC_TOLERANCE),
        "identity_residual": checked(residual, IDENTITY_TOLERANCE),
        "marginal_at_steps": walk.evolve(&walk.point_mass(start), cli.steps).iter().copied().collect::<Vec<_>>(),
        "stationary": st.spectral,
        "power_agreement": checked(st.agreement, LIMIT_TOLERANCE),
        "start_independence": checked(start_independence(&walk)?, LIMIT_TOLERANCE),
    });
    report.warnings.extend(st.warnings);
    Ok(residual <= IDENTITY_TOLERANCE)
}

/// The complex itself when it has no free faces, else its boundary-closing extension.
/// The extension's cones carry free faces of their own, so it is walked with the open policy.
fn closed_complex(k: &SimplicialComplex, report: &mut Report) -> Result<(SimplicialComplex, BoundaryPolicy)> {
    if free_faces(k).is_empty() {
        return Ok((k.clone(), BoundaryPolicy::Closed));
    }
    report.warnings.push("free faces closed by coning each one off a new vertex".into());
    Ok((extend_closing_boundary(k)?, BoundaryPolicy::Open))
}

fn top_state(cli: &Cli, walk: &Walk, k: &SimplicialComplex) -> Result<usize> {
    let s = start_simplex(cli, k, k.dim())?;
    walk.states()
        .iter()
        .position(|l| matches!(l, Label::Oriented(o) if o.simplex == s.simplex))
        .ok_or(Error::SimplexNotFound(s.simplex))
}

fn walk_graph(cli: &Cli, k: &SimplicialComplex, report: &mut Report) -> Result<bool> {
    let p = cli.laziness;
    let (work, policy) = closed_complex(k, report)?;
    let extended = policy == BoundaryPolicy::Open;
    let walk = graph_type_down_walk(&work, p, policy)?;
    let residual = graph_type_identity_residual(&work, p);
    let theta = walk.reversing_measure.clone().expect("graph-type walks are reversible");
    let size = walk.len();
    let eig = spectrum(&(DMatrix::identity(size, size) - &walk.matrix.data), &theta)?;
    let min_m = 1.0 - eig.eigenvalues.last().copied().unwrap_or(0.0);
    let start = top_state(cli, &walk, k)?;
    let st = stationary_distribution(&walk, &walk.point_mass(start))?;
    let n = k.dim();
    let restricted = extended.then(|| {
        let keep: Vec<usize> = (0..size)
            .filter(|&i| matches!(&walk.states()[i], Label::Oriented(o) if k.contains(&o.simplex)))
            .collect();
        let mass: f64 = keep.iter().map(|&i| st.spectral[i]).sum();
        json!({
            "states": keep.iter().map(|&i| walk.states()[i].to_string()).collect::<Vec<_>>(),
            "distribution": keep.iter().map(|&i| st.spectral[i] / mass).collect::<Vec<_>>(),
            "mass": mass,
        })
    });
    report.walks = json!({
        "walk": "graph-type",
        "laziness": p,
        "extended": extended,
        "added_top_simplices": work.count(n) - k.count(n),
        "states": names(walk.states()),
        "start": walk.states()[start].to_string(),
        "row_sum_defect": checked(walk.row_sum_defect(), STOCHASTIC_TOLERANCE),
        "identity_residual": residual_or_skip(residual.clone(), IDENTITY_TOLERANCE),
        "spectrum": { "min": min_m, "lower_bound": 2.0 * p - 1.0, "slack": SPECTRAL_SLACK,
            "pass": min_m >= 2.0 * p - 1.0 - SPECTRAL_SLACK },
        "marginal_at_steps": walk.evolve(&walk.point_mass(start), cli.steps).iter().copied().collect::<Vec<_>>(),
        "stationary": {
            "unrestricted": st.spectral,
            "restricted": restricted,
            "power": st.power,
            "power_iterations": st.iterations,
            "agreement": checked(st.agreement, LIMIT_TOLERANCE),
            "eigenspace_dim": st.eigenspace_dim,
            "top_betti": exact_betti(&work, n)?,
        },
        "start_independence": checked(start_independence(&walk)?, LIMIT_TOLERANCE),
    });
    report.warnings.extend(st.warnings);
    Ok(residual.map_or(extended, |r| r <= IDENTITY_TOLERANCE))
}

fn fit_json(fit: &ConvergenceFit) -> Value {
    json!({
        "fitted_ratio": fit.fitted_ratio,
        "bound": fit.bound,
        "tolerance": RATE_TOLERANCE,
        "within_bound": fit.within_bound,
        "operator_norm_residual": fit.operator_norm_residual.map(|r| checked(r, LIMIT_TOLERANCE)),
        "distances": fit.distances,
        "total_variation": fit.total_variation,
    })
}

fn walk_name(w: WalkArg) -> &'static str {
    match w {
        WalkArg::Vertex => "vertex",
        WalkArg::Up => "up",
        WalkArg::Down => "down",
        WalkArg::Graph => "graph-type",
    }
}

fn converge(cli: &Cli, k: &SimplicialComplex, report: &mut Report) -> Result<bool> {
    let p = cli.laziness;
    let fit = match cli.walk {
        WalkArg::Vertex => graph_walk_convergence_rate(k, p, vertex_index(cli, k)?, cli.steps)?,
        WalkArg::Up => up_convergence_rate(k, &start_simplex(cli, k, k.dim().saturating_sub(1))?, p, cli.steps)?,
        WalkArg::Down => {
            let d = down_dim(cli, k);
            down_convergence_rate(k, d, &start_simplex(cli, k, d)?, p, cli.steps)?
        }
        WalkArg::Graph => {
            let (work, policy) = closed_complex(k, report)?;
            let walk = graph_type_down_walk(&work, p, policy)?;
            let start = top_state(cli, &walk, k)?;
            graph_type_convergence_rate(&work, p, policy, start, cli.steps)?
        }
    };
    let mut table = Table::new(&["t", "distance", "bound"]);
    for (t, d, b) in fit.rows() {
        table.push(vec![t.to_string(), d.to_string(), b.to_string()]);
    }
    report.walks = json!({ "walk": walk_name(cli.walk), "laziness": p, "steps": cli.steps, "fit": fit_json(&fit) });
    report.table = Some(table);
    if !fit.within_bound {
        report.warnings.push(format!("fitted ratio {} exceeds bound {}", fit.fitted_ratio, fit.bound));
    }
    report.warnings.extend(fit.warnings);
    Ok(true)
}

fn montecarlo(cli: &Cli, k: &SimplicialComplex, report: &mut Report) -> Result<bool> {
    let p = cli.laziness;
    let (walk, start) = match cli.walk {
        WalkArg::Vertex => (graph_walk_matrix(k, p)?, vertex_index(cli, k)?),
        WalkArg::Up => {
            let w = up_walk_matrix(k, p)?;
            let s = w.find_state(&Label::Oriented(start_simplex(cli, k, k.dim() - 1)?))?;
            (w, s)
        }
        WalkArg::Down => {
            let d = down_dim(cli, k);
            let w = down_walk_matrix(k, d, p)?;
            let s = w.find_state(&Label::Oriented(start_simplex(cli, k, d)?))?;
            (w, s)
        }
        WalkArg::Graph => {
            let (work, policy) = closed_complex(k, report)?;
            let w = graph_type_down_walk(&work, p, policy)?;
            let s = top_state(cli, &w, k)?;
            (w, s)
        }
    };
    let config = MonteCarloConfig { steps: cli.steps, chains: cli.chains, seed: cli.seed };
    let r = monte_carlo(&walk, start, config)?;
    let mut table = Table::new(&["state", "count", "empirical", "exact"]);
    for (i, l) in walk.states().iter().enumerate() {
        table.push(vec![l.to_string(), r.counts[i].to_string(), r.empirical[i].to_string(), r.exact[i].to_string()]);
    }
    report.walks = json!({
        "walk": walk_name(cli.walk),
        "laziness": p,
        "steps": cli.steps,
        "chains": cli.chains,
        "seed": cli.seed,
        "start": walk.states()[start].to_string(),
        "states": names(walk.states()),
        "counts": r.counts,
        "empirical": r.empirical,
        "exact": r.exact,
        "max_deviation": checked(r.max_deviation, r.tolerance),
        "antisymmetrized": r.antisymmetrized.as_ref().map(|(e, x)| json!({ "empirical": e, "exact": x })),
    });
    report.table = Some(table);
    if !r.within_tolerance() {
        report.warnings.push("Monte Carlo deviation exceeds four standard errors".into());
    }
    Ok(true)
}

fn verify_identities(cli: &Cli, k: &SimplicialComplex, report: &mut Report) -> Result<bool> {
    let n = k.dim();
    let p = cli.laziness;
    let mut items = Vec::new();
    let mut push = |name: String, r: Result<f64>, tol: f64| items.push((name, residual_or_skip(r, tol)));
    for d in 1..n {
        let zero = (boundary_int(k, d) * boundary_int(k, d + 1)).iter().map(|x| x.abs()).max().unwrap_or(0);
        push(format!("boundary_squared_{d}"), Ok(zero as f64), 0.0);
    }
    for d in 0..n {
        push(format!("up_signed_relation_{d}"), verify_up_relation(k, d), IDENTITY_TOLERANCE);
    }
    if n >= 1 {
        push("down_signed_relation".into(), verify_down_relation(k), IDENTITY_TOLERANCE);
        push("vertex_walk".into(), graph_walk_identity_residual(k, p), IDENTITY_TOLERANCE);
        push("graph_type_walk".into(), graph_type_identity_residual(k, p), IDENTITY_TOLERANCE);
    }
    push("up_walk_operator".into(), up_transition_operator(k, p).map(|o| o.residual), IDENTITY_TOLERANCE);
    for d in 1..=n {
        push(format!("down_walk_operator_{d}"), down_propagation_matrix(k, d, p).map(|o| o.residual), IDENTITY_TOLERANCE);
        push(format!("intertwining_{d}"), intertwining_residual(k, d, p, INTERTWINING_STEPS), INTERTWINING_TOLERANCE);
    }
    let ok = items.iter().all(|(_, v)| v.get("pass").is_none_or(|x| x == &json!(true)));
    let checked_count = items.iter().filter(|(_, v)| v.get("pass").is_some()).count();
    report.walks = json!({
        "laziness": p,
        "identities": items.into_iter().map(|(name, v)| json!({ "name": name, "result": v })).collect::<Vec<_>>(),
        "checked": checked_count,
        "all_pass": ok,
    });
    Ok(ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("swalk").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn parses_flags() {
        let c = cli(&["walk-graph", "--complex", "sphere", "-p", "0.25", "--weights", "recip-deg", "--format", "csv"]);
        assert_eq!(c.command, Command::WalkGraph);
        assert_eq!(c.laziness, 0.25);
        assert_eq!(c.weights, WeightsArg::RecipDeg);
        assert!(Cli::try_parse_from(["swalk", "frobnicate", "--complex", "sphere"]).is_err());
    }

    #[test]
    fn sphere_betti() {
        let out = run(&cli(&["betti", "--complex", "sphere"]));
        assert!(out.success);
        assert_eq!(out.report.betti["values"], json!([1, 0, 1]));
    }

    #[test]
    fn mobius_not_orientable() {
        let out = run(&cli(&["orientable", "--complex", "mobius"]));
        assert!(out.success);
        assert_eq!(out.report.orientable["holds"], json!(false));
        assert!(out.report.orientable["obstruction"].as_array().unwrap().len() >= 3);
        let out = run(&cli(&["walk-graph", "--complex", "mobius"]));
        assert!(!out.success);
        assert!(out.report.orientable["obstruction"].is_array());
    }

    #[test]
    fn sphere_graph_walk() {
        let out = run(&cli(&["walk-graph", "--complex", "sphere", "-p", "0.5", "--steps", "100"]));
        assert!(out.success);
        let st = out.report.walks["stationary"]["unrestricted"].as_array().unwrap().clone();
        assert!(st.iter().all(|x| (x.as_f64().unwrap() - 0.25).abs() < 1e-10));
        assert_eq!(out.report.walks["identity_residual"]["pass"], json!(true));
    }

    #[test]
    fn filled_triangle_walk_is_extended() {
        let out = run(&cli(&["walk-graph", "--complex", "filled-triangle"]));
        assert!(out.success, "{:?}", out.report.warnings);
        assert_eq!(out.report.walks["extended"], json!(true));
        assert_eq!(out.report.walks["added_top_simplices"], json!(3));
        assert!(out.report.walks["stationary"]["restricted"]["distribution"].is_array());
    }

    #[test]
    fn converge_csv() {
        let c = cli(&["converge", "--complex", "sphere", "--steps", "5", "--format", "csv"]);
        let out = run(&c);
        let csv = out.render(Format::Csv);
        assert!(csv.starts_with("t,distance,bound\n"));
        assert_eq!(csv.lines().count(), 7);
    }

    #[test]
    fn missing_complex_fails() {
        let out = run(&cli(&["summary", "--complex", "/nonexistent/file.fct"]));
        assert!(!out.success);
        assert!(out.report.warnings[0].starts_with("error: io"));
    }

    #[test]
    fn identities_on_sphere() {
        let out = run(&cli(&["verify-identities", "--complex", "sphere"]));
        assert!(out.success, "{}", out.report.to_json());
        assert!(out.report.walks["checked"].as_u64().unwrap() >= 8);
    }
}

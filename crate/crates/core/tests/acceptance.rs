//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line; the test fails if any fails.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use simplex_walks::chain::{boundary_matrix, coboundary_matrix};
use simplex_walks::corpus;
use simplex_walks::hodge::{betti, exact_betti, laplacian_spectrum, spectrum, LaplacianKind};
use simplex_walks::orientation::{extend_closing_boundary, free_faces, is_disorientable, is_orientable};
use simplex_walks::signed_graph::{
    cycle_sign, down_signed_graph, is_balanced, signed_laplacian_spectrum, up_signed_graph, verify_down_relation,
    verify_up_relation, BalanceCertificate, SignedGraph,
};
use simplex_walks::walks::{
    down_convergence_rate, down_homology_rank, down_propagation_matrix, down_walk_matrix, graph_type_convergence_rate,
    graph_type_down_walk, graph_type_identity_residual, graph_walk_identity_residual, graph_walk_matrix,
    intertwining_residual, monte_carlo, stationary_distribution, up_convergence_rate, up_homology_rank,
    up_transition_operator, up_walk_matrix, BoundaryPolicy, MonteCarloConfig, Walk,
};
use simplex_walks::{Error, OrientedSimplex, Sign, SimplicialComplex, WeightFunction};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn named(name: &str) -> SimplicialComplex {
    corpus::named(name).expect("bundled complex")
}

const LAZINESS: [f64; 3] = [0.25, 0.5, 0.9];

fn chain_exactness() -> Check {
    let mut checked = 0;
    for (name, k) in corpus::all() {
        for d in 1..k.dim() {
            let dd = &boundary_matrix(&k, d).unwrap().data * &boundary_matrix(&k, d + 1).unwrap().data;
            ensure(dd.iter().all(|&x| x == 0), || format!("{name}: boundary squared nonzero at {d}"))?;
            let cc = &coboundary_matrix(&k, d).unwrap().data * &coboundary_matrix(&k, d - 1).unwrap().data;
            ensure(cc.iter().all(|&x| x == 0), || format!("{name}: coboundary squared nonzero at {d}"))?;
            checked += 2;
        }
    }
    Ok(format!("{checked} integer compositions vanish"))
}

fn betti_agreement() -> Check {
    let reference: [(&str, &[usize]); 5] = [
        ("hollow-triangle", &[1, 1]),
        ("sphere", &[1, 0, 1]),
        ("torus", &[1, 2, 1]),
        ("rp2", &[1, 0, 0]),
        ("mobius", &[1, 1]),
    ];
    let mut exact_all = Vec::new();
    for (name, k) in corpus::all() {
        let exact: Vec<usize> = (0..=k.dim()).map(|d| exact_betti(&k, d).unwrap()).collect();
        for w in [WeightFunction::ConstantOne, WeightFunction::Normalized] {
            for (d, &e) in exact.iter().enumerate() {
                let s = betti(&k, d, &w).unwrap();
                ensure(s == e, || format!("{name} d={d} {w:?}: spectral {s}, exact {e}"))?;
            }
        }
        exact_all.push((name, exact));
    }
    for (name, want) in reference {
        let got = &exact_all.iter().find(|(n, _)| *n == name).unwrap().1;
        ensure(got.starts_with(want), || format!("{name}: exact {got:?}, expected {want:?}"))?;
    }
    Ok(format!("{} complexes, two weightings", exact_all.len()))
}

fn operator_identities() -> Check {
    let tol = 1e-12;
    let (mut checked, mut worst) = (0usize, 0.0f64);
    let mut record = |label: String, r: Result<f64, Error>| -> Result<(), String> {
        match r {
            Ok(x) => {
                checked += 1;
                worst = worst.max(x);
                ensure(x <= tol, || format!("{label}: residual {x:e}"))
            }
            Err(_) => Ok(()),
        }
    };
    for (name, k) in corpus::all() {
        let n = k.dim();
        for &p in &LAZINESS {
            record(format!("{name} A p={p}"), up_transition_operator(&k, p).map(|o| o.residual))?;
            for d in 1..=n.min(2) {
                record(format!("{name} B d={d} p={p}"), down_propagation_matrix(&k, d, p).map(|o| o.residual))?;
            }
            record(format!("{name} M p={p}"), graph_type_identity_residual(&k, p))?;
            record(format!("{name} vertex walk p={p}"), graph_walk_identity_residual(&k, p))?;
        }
        if k.is_pure() {
            for d in 0..n {
                record(format!("{name} up relation d={d}"), verify_up_relation(&k, d))?;
            }
        }
        record(format!("{name} down relation"), verify_down_relation(&k))?;
    }
    // every family must have been exercised somewhere
    for (label, r) in [
        ("A on sphere", up_transition_operator(&named("sphere"), 0.5).map(|o| o.residual)),
        ("B d=2 on sphere", down_propagation_matrix(&named("sphere"), 2, 0.5).map(|o| o.residual)),
        ("M on torus", graph_type_identity_residual(&named("torus"), 0.5)),
        ("down relation on torus", verify_down_relation(&named("torus"))),
        ("up relation on torus", verify_up_relation(&named("torus"), 1)),
    ] {
        let x = r.map_err(|e| format!("{label}: {e}"))?;
        ensure(x <= tol, || format!("{label}: residual {x:e}"))?;
    }
    Ok(format!("{checked} identities, worst residual {worst:.2e}"))
}

fn intertwining() -> Check {
    let mut worst = 0.0f64;
    for name in ["hollow-triangle", "mobius"] {
        for p in [0.25, 0.5, 0.9] {
            let r = intertwining_residual(&named(name), 1, p, 10).map_err(|e| format!("{name}: {e}"))?;
            ensure(r <= 1e-10, || format!("{name} p={p}: residual {r:e}"))?;
            worst = worst.max(r);
        }
    }
    Ok(format!("worst residual {worst:.2e} for t <= 10"))
}

fn walk_spectrum_min(walk: &Walk) -> f64 {
    let theta = walk.reversing_measure.clone().expect("reversible");
    let n = walk.len();
    let s = spectrum(&(DMatrix::identity(n, n) - &walk.matrix.data), &theta).unwrap();
    1.0 - s.eigenvalues.last().copied().unwrap()
}

fn within(values: &[f64], lo: f64, hi: f64) -> bool {
    let slack = 1e-10;
    values.iter().all(|&x| x >= lo - slack && x <= hi + slack)
}

fn signed_graphs(k: &SimplicialComplex) -> Vec<SignedGraph> {
    let n = k.dim();
    let mut out = Vec::new();
    for d in 0..n {
        out.push(up_signed_graph(k, d, None).unwrap());
    }
    for d in 1..=n {
        out.push(down_signed_graph(k, d, None).unwrap());
    }
    out
}

fn spectral_containment() -> Check {
    let mut counts = [0usize; 3];
    for (name, k) in corpus::all() {
        for g in signed_graphs(&k) {
            if let Ok(s) = signed_laplacian_spectrum(&g) {
                ensure(within(&s.eigenvalues, 0.0, 2.0), || format!("{name}: signed spectrum {:?}", s.eigenvalues))?;
                counts[0] += 1;
            }
        }
        for d in 0..k.dim() {
            let s = laplacian_spectrum(&k, LaplacianKind::Up, d, &WeightFunction::Normalized).unwrap();
            let top = (d + 2) as f64;
            ensure(within(&s.eigenvalues, 0.0, top), || format!("{name} d={d}: up spectrum {:?}", s.eigenvalues))?;
            counts[1] += 1;
        }
        let (work, policy) = if free_faces(&k).is_empty() {
            (k.clone(), BoundaryPolicy::Closed)
        } else {
            (extend_closing_boundary(&k).unwrap(), BoundaryPolicy::Open)
        };
        for &p in &LAZINESS {
            let Ok(walk) = graph_type_down_walk(&work, p, policy) else { continue };
            let lo = walk_spectrum_min(&walk);
            ensure(lo >= 2.0 * p - 1.0 - 1e-10, || format!("{name} p={p}: min eigenvalue {lo}"))?;
            counts[2] += 1;
        }
    }
    ensure(counts.iter().all(|&c| c > 0), || format!("some family unchecked: {counts:?}"))?;
    Ok(format!("{} signed, {} up-Laplacian, {} walk spectra", counts[0], counts[1], counts[2]))
}

fn random_signs(rng: &mut ChaCha8Rng, n: usize) -> Vec<Sign> {
    (0..n).map(|_| if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus }).collect()
}

fn certificate_valid(g: &SignedGraph, c: &BalanceCertificate) -> bool {
    match c {
        BalanceCertificate::Switching(sw) => sw.apply(g).edges.iter().all(|e| e.sign == Sign::Plus),
        BalanceCertificate::NegativeCycle(cycle) => cycle_sign(g, cycle) == Some(Sign::Minus),
    }
}

fn balance_orientability() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (name, expect) in [("sphere", true), ("torus", true), ("mobius", false), ("rp2", false)] {
        let k = named(name);
        let n = k.dim();
        let orientable = is_orientable(&k).unwrap().holds;
        ensure(orientable == expect, || format!("{name}: orientable = {orientable}"))?;
        for trial in 0..20 {
            let g = down_signed_graph(&k, n, Some(&random_signs(&mut rng, k.count(n)))).unwrap();
            let v = is_balanced(&g);
            ensure(v.balanced == expect, || format!("{name} trial {trial}: balanced = {}", v.balanced))?;
            ensure(certificate_valid(&g, &v.certificate), || format!("{name} trial {trial}: bad certificate"))?;
        }
    }
    Ok("4 complexes x 20 random orientations, certificates verified".into())
}

fn up_graph_never_balanced() -> Check {
    let mut searched = 0usize;
    for name in ["sphere", "filled-triangle"] {
        let k = named(name);
        let m = k.count(1);
        for mask in 0u32..(1 << m) {
            let signs: Vec<Sign> = (0..m).map(|i| if mask >> i & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect();
            let g = up_signed_graph(&k, 1, Some(&signs)).unwrap();
            let v = is_balanced(&g);
            ensure(!v.balanced, || format!("{name}: orientation {mask:b} balanced"))?;
            ensure(certificate_valid(&g, &v.certificate), || format!("{name}: bad certificate"))?;
            searched += 1;
        }
    }
    Ok(format!("{searched} orientation choices, none balanced"))
}

fn irreducible_stationary() -> Check {
    for name in ["sphere", "torus"] {
        let k = named(name);
        for &p in &LAZINESS {
            let walk = graph_type_down_walk(&k, p, BoundaryPolicy::Closed).map_err(|e| e.to_string())?;
            let mut limits: Vec<Vec<f64>> = Vec::new();
            for i in 0..walk.len() {
                let st = stationary_distribution(&walk, &walk.point_mass(i)).map_err(|e| e.to_string())?;
                ensure(st.agreement <= 1e-8, || format!("{name} p={p}: power vs projection {:e}", st.agreement))?;
                limits.push(st.spectral);
            }
            for a in &limits {
                for b in &limits {
                    let gap = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                    ensure(gap <= 1e-8, || format!("{name} p={p}: starts disagree by {gap:e}"))?;
                }
            }
            if name == "sphere" {
                let off = limits[0].iter().map(|x| (x - 0.25).abs()).fold(0.0, f64::max);
                ensure(off <= 1e-10, || format!("sphere p={p}: distance from uniform {off:e}"))?;
            }
        }
    }
    Ok("all point-mass starts agree; sphere limit uniform".into())
}

fn rate_bounds() -> Check {
    let steps = 60;
    let (mut fits, mut worst_gap) = (0usize, f64::NEG_INFINITY);
    let mut note = |label: String, fit: simplex_walks::walks::ConvergenceFit| -> Result<(), String> {
        fits += 1;
        worst_gap = worst_gap.max(fit.fitted_ratio - fit.bound);
        ensure(fit.within_bound, || format!("{label}: ratio {} > bound {}", fit.fitted_ratio, fit.bound))
    };
    for (name, k) in corpus::all() {
        let n = k.dim();
        for p in [0.5, 0.75] {
            if up_walk_matrix(&k, p).is_ok() {
                for s in k.simplices(n - 1) {
                    let fit = up_convergence_rate(&k, &OrientedSimplex::positive(s.clone()), p, steps).unwrap();
                    note(format!("{name} up p={p} from {s}"), fit)?;
                }
            }
            for d in 1..=n {
                if down_walk_matrix(&k, d, p).is_err() {
                    continue;
                }
                for s in k.simplices(d) {
                    let fit = down_convergence_rate(&k, d, &OrientedSimplex::positive(s.clone()), p, steps).unwrap();
                    note(format!("{name} down d={d} p={p} from {s}"), fit)?;
                }
            }
            if let Ok(walk) = graph_type_down_walk(&k, p, BoundaryPolicy::Closed) {
                for i in 0..walk.len() {
                    let fit = graph_type_convergence_rate(&k, p, BoundaryPolicy::Closed, i, steps).unwrap();
                    note(format!("{name} graph-type p={p} from {i}"), fit)?;
                }
            }
        }
    }
    for p in [0.5, 0.75] {
        let fit = graph_type_convergence_rate(&named("sphere"), p, BoundaryPolicy::Closed, 0, steps).unwrap();
        let r = fit.operator_norm_residual.ok_or("operator norm not checked on sphere")?;
        ensure(r <= 1e-8, || format!("sphere p={p}: operator-norm residual {r:e}"))?;
    }
    Ok(format!("{fits} fits, worst ratio - bound = {worst_gap:.2e}"))
}

fn homology_detection() -> Check {
    let reference = [("hollow-triangle", 1usize, 1usize), ("filled-triangle", 1, 0)];
    for (name, d, b) in reference {
        let e = exact_betti(&named(name), d).unwrap();
        ensure(e == b, || format!("{name}: exact betti_{d} = {e}, expected {b}"))?;
    }
    let mut probes = 0;
    for name in ["hollow-triangle", "filled-triangle", "sphere", "torus"] {
        let k = named(name);
        let n = k.dim();
        if n >= 2 {
            let r = up_homology_rank(&k, 0.5).map_err(|e| format!("{name}: {e}"))?.rank;
            let b = exact_betti(&k, n - 1).unwrap();
            ensure(r == b, || format!("{name} up: rank {r}, betti {b}"))?;
            probes += 1;
        }
        for d in 1..=n {
            let Ok(probe) = down_homology_rank(&k, d, 0.5) else { continue };
            let b = exact_betti(&k, d).unwrap();
            ensure(probe.rank == b, || format!("{name} down d={d}: rank {}, betti {b}", probe.rank))?;
            probes += 1;
        }
    }
    ensure(probes >= 8, || format!("only {probes} probes ran"))?;
    Ok(format!("{probes} walk-based ranks match exact betti numbers"))
}

fn monte_carlo_consistency() -> Check {
    let config = MonteCarloConfig { steps: 50, chains: 100_000, seed: 2024 };
    let cases: Vec<(&str, Walk)> = vec![
        ("up walk on sphere", up_walk_matrix(&named("sphere"), 0.5).unwrap()),
        ("down walk on hollow triangle", down_walk_matrix(&named("hollow-triangle"), 1, 0.5).unwrap()),
        ("graph-type walk on torus", graph_type_down_walk(&named("torus"), 0.5, BoundaryPolicy::Closed).unwrap()),
        ("vertex walk on odd cycle", graph_walk_matrix(&named("odd-cycle"), 0.5).unwrap()),
    ];
    let mut worst = 0.0f64;
    for (label, walk) in &cases {
        let r = monte_carlo(walk, 0, config).map_err(|e| e.to_string())?;
        ensure(r.within_tolerance(), || format!("{label}: deviation {} > {}", r.max_deviation, r.tolerance))?;
        worst = worst.max(r.max_deviation);
        let again = monte_carlo(walk, 0, config).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let sequential = pool.install(|| monte_carlo(walk, 0, config).unwrap());
        ensure(again.counts == r.counts && sequential.counts == r.counts, || format!("{label}: not deterministic"))?;
    }
    Ok(format!("worst deviation {worst:.4} within 4 sigma = {:.4}", 4.0 * (0.25f64 / 1e5).sqrt()))
}

/// Two-colouring by breadth-first search on the 1-skeleton.
fn bipartite(k: &SimplicialComplex) -> bool {
    let n = k.count(0);
    let mut colour = vec![None; n];
    for s in 0..n {
        if colour[s].is_some() {
            continue;
        }
        colour[s] = Some(0);
        let mut queue = vec![s];
        while let Some(v) = queue.pop() {
            for (u, _) in k.up_neighbors(0, v) {
                match colour[u] {
                    None => {
                        colour[u] = Some(1 - colour[v].unwrap());
                        queue.push(u);
                    }
                    Some(c) if c == colour[v].unwrap() => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

fn bipartiteness() -> Check {
    for (name, expect) in [("path", true), ("odd-cycle", false), ("hollow-triangle", false)] {
        let k = named(name);
        let dis = is_disorientable(&k).unwrap().holds;
        let bip = bipartite(&k);
        ensure(bip == expect, || format!("{name}: bipartite oracle gave {bip}"))?;
        ensure(dis == bip, || format!("{name}: disorientable {dis}, bipartite {bip}"))?;
    }
    let even = SimplicialComplex::from_facets([[0, 1], [1, 2], [2, 3], [3, 0]]).unwrap();
    ensure(is_disorientable(&even).unwrap().holds && bipartite(&even), || "4-cycle".into())?;
    Ok("path and even cycle disorientable; odd cycles not".into())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("chain-complex exactness", chain_exactness),
        ("betti agreement", betti_agreement),
        ("operator identities", operator_identities),
        ("intertwining", intertwining),
        ("spectral containments", spectral_containment),
        ("balance iff orientability", balance_orientability),
        ("up-signed graph never balanced", up_graph_never_balanced),
        ("irreducible graph-type walk", irreducible_stationary),
        ("convergence-rate bounds", rate_bounds),
        ("homology detection via walks", homology_detection),
        ("Monte Carlo consistency", monte_carlo_consistency),
        ("bipartiteness", bipartiteness),
    ];
    let mut failures = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {:2} FAIL  {name}: {why}", i + 1);
                failures.push(i + 1);
            }
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}

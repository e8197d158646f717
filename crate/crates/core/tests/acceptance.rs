//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

use std::collections::VecDeque;
use std::time::Instant;

use cplanar::construct::mutation;
use cplanar::decide::ComponentStatus;
use cplanar::generate::{cycle, disjoint_union, generate, planted, GenMode, GenParams, PlantedParams};
use cplanar::normalize::{normalize, split_components, NormalizeOutcome};
use cplanar::oracle::{oracle, OracleLimits, OracleVerdict};
use cplanar::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MIN_CORPUS: usize = 500;
const SMALL: usize = 12;
const ORACLE_BUDGET_SECS: f64 = 600.0;
const MIN_WINDING_CHECKS: usize = 10_000;
/// Subdivision vertices per input vertex allowed by the linear bound.
const SUBDIVISION_RATIO: f64 = 4.0;
const SCALING_SIZES: [usize; 4] = [1000, 2000, 4000, 8000];
const SCALING_REPS: usize = 3;
const MAX_SLOPE: f64 = 2.3;
const MAX_SECS_8K: f64 = 10.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn line(n: usize, name: &str, o: &Outcome) {
    println!("{} {n} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
}

fn oracle_limits() -> OracleLimits {
    OracleLimits { max_vertices: SMALL, max_nodes: 50_000_000 }
}

/// Seeded instances with at most `SMALL` vertices: grown paths in both
/// generator modes, small planted drawings and two-component unions.
fn small_corpus() -> Vec<(String, CGraph)> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < 560 {
        let c = 3 + (seed % 3) as usize;
        let n = c + (seed as usize * 7) % (SMALL + 1 - c);
        let mut p = GenParams::new(c, n, seed);
        p.extra_chords = (seed % 4) as usize;
        p.mode = if seed % 2 == 0 { GenMode::Preserve } else { GenMode::Free };
        let g = generate(&p);
        if g.map.vertex_count() <= SMALL {
            out.push((format!("gen:{seed}"), g));
        }
        seed += 1;
    }
    for seed in 0..200u64 {
        let c = 3 + (seed % 2) as usize;
        let p = if seed % 2 == 0 {
            PlantedParams::fragmented(c, 4 + (seed % 9) as usize, seed)
        } else {
            PlantedParams::with_size(c, 4 + (seed % 9) as usize, seed)
        };
        let g = planted(&p);
        if g.map.vertex_count() <= SMALL {
            out.push((format!("planted:{seed}"), g));
        }
    }
    for seed in 0..60u64 {
        let a = generate(&GenParams::new(3, 3 + (seed % 4) as usize, seed));
        let b = generate(&GenParams::new(3, 3 + (seed % 3) as usize, seed + 1000));
        let g = disjoint_union(&[a, b]);
        if g.map.vertex_count() <= SMALL {
            out.push((format!("union:{seed}"), g));
        }
    }
    out
}

/// Every cycle of length 3..=9 over three clusters that satisfies the
/// cyclic edge condition.
fn cycle_family() -> Vec<(String, CGraph)> {
    let mut out = Vec::new();
    for len in 3..=9u32 {
        for code in 0..3usize.pow(len) {
            let labels: Vec<usize> = (0..len).map(|i| code / 3usize.pow(i) % 3).collect();
            let g = cycle(3, &labels);
            if g.validate_cyclic().is_ok() {
                out.push((format!("cycle:{labels:?}"), g));
            }
        }
    }
    out
}

/// Larger accepted-and-rejected instances for the certificate and invariant
/// checks, beyond the reach of the oracle.
fn medium_corpus() -> Vec<(String, CGraph)> {
    let mut out = Vec::new();
    for seed in 0..60u64 {
        let c = 3 + (seed % 4) as usize;
        let n = 40 + 15 * seed as usize;
        let p = if seed % 2 == 0 {
            PlantedParams::fragmented(c, n, seed)
        } else {
            PlantedParams::with_size(c, n, seed)
        };
        out.push((format!("planted:{seed}"), planted(&p)));
        let mut q = GenParams::new(c, 20 + seed as usize, seed);
        q.extra_chords = 3;
        out.push((format!("gen:{seed}"), generate(&q)));
    }
    out
}

fn same_class(v: &Verdict, o: &OracleVerdict) -> bool {
    matches!(
        (v, o),
        (Verdict::CPlanar(_), OracleVerdict::CPlanar(_)) | (Verdict::NotCPlanar(_), OracleVerdict::NotCPlanar)
    )
}

fn oracle_equivalence(corpus: &[(String, CGraph)], cycles: &[(String, CGraph)]) -> Outcome {
    let t = Instant::now();
    let (mut compared, mut unsupported, mut limit, mut yes, mut no) = (0, 0, 0, 0, 0);
    let mut bad = Vec::new();
    for (name, g) in corpus.iter().chain(cycles) {
        let v = match decide(g) {
            Ok(v) => v,
            Err(e) => {
                bad.push(format!("{name}: decide failed: {e}"));
                continue;
            }
        };
        if matches!(v, Verdict::Unsupported(_)) {
            unsupported += 1;
            continue;
        }
        match oracle(g, &oracle_limits()) {
            Ok(OracleVerdict::LimitExceeded) => limit += 1,
            Ok(o) => {
                compared += 1;
                if same_class(&v, &o) {
                    if matches!(o, OracleVerdict::CPlanar(_)) {
                        yes += 1;
                    } else {
                        no += 1;
                    }
                } else {
                    bad.push(format!("{name}: decide {} oracle {}", v.name(), o.name()));
                }
            }
            Err(e) => bad.push(format!("{name}: oracle failed: {e}")),
        }
    }
    let secs = t.elapsed().as_secs_f64();
    let pass = bad.is_empty() && limit == 0 && corpus.len() >= MIN_CORPUS && secs < ORACLE_BUDGET_SECS;
    let mut detail = format!(
        "{} corpus + {} cycles; compared {compared} ({yes} c-planar, {no} not), {} disagreements, \
         {unsupported} unsupported skipped, {limit} over oracle limit, {secs:.1}s (limit {ORACLE_BUDGET_SECS}s)",
        corpus.len(),
        cycles.len(),
        bad.len()
    );
    if let Some(b) = bad.first() {
        detail += &format!("; first: {b}");
    }
    Outcome { pass, detail }
}

fn certificate_soundness(all: &[(String, CGraph)]) -> Outcome {
    let (mut accepted, mut verified, mut mutants, mut caught) = (0, 0, 0, 0);
    let mut bad = Vec::new();
    for (name, g) in all {
        let Ok(Verdict::CPlanar(cert)) = decide(g) else { continue };
        accepted += 1;
        match verify_certificate(g, &cert) {
            Ok(()) => verified += 1,
            Err(p) => bad.push(format!("{name}: {}", p.join("; "))),
        }
        if cert.edges.len() > cert.input_edges {
            mutants += 1;
            if verify_certificate(g, &mutation::delete_added_edge(&cert, cert.input_edges)).is_err() {
                caught += 1;
            } else {
                bad.push(format!("{name}: deleting an added edge went unnoticed"));
            }
        }
        if let Some(m) = (0..cert.rotation.len()).find_map(|v| mutation::swap_input_darts(&cert, v)) {
            mutants += 1;
            if verify_certificate(g, &m).is_err() {
                caught += 1;
            } else {
                bad.push(format!("{name}: swapped rotation went unnoticed"));
            }
        }
    }
    let pass = bad.is_empty() && accepted > 0 && mutants > 0;
    let mut detail = format!("{verified}/{accepted} certificates verified, {caught}/{mutants} mutants rejected");
    if let Some(b) = bad.first() {
        detail += &format!("; first: {b}");
    }
    Outcome { pass, detail }
}

fn invariant_checks(all: &[(String, CGraph)]) -> Outcome {
    let mut certified = 0;
    let mut stats = Stats::default();
    let mut bad = Vec::new();
    for (name, g) in all {
        match decide_with_report(g) {
            Ok(r) => {
                certified += r.components.iter().filter(|c| c.status == ComponentStatus::CPlanar).count();
                stats.add(&r.stats);
            }
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    let counts = [stats.no_sink_source_checks, stats.acyclic_checks, stats.tree_checks];
    let pass = bad.is_empty() && counts[0] > 0 && counts.iter().all(|&k| k == counts[0]);
    let mut detail = format!(
        "{} runs, {certified} accepted components; checks passed: no sink/source and one nonzero inner face {}, \
         acyclic clusters {}, spanning trees {}; {} violations",
        all.len(),
        counts[0],
        counts[1],
        counts[2],
        bad.len()
    );
    if let Some(b) = bad.first() {
        detail += &format!("; first: {b}");
    }
    Outcome { pass, detail }
}

/// Random closed walk: a random walk away from `start` and a shortest way back.
fn closed_walk(g: &CGraph, start: usize, len: usize, rng: &mut ChaCha8Rng) -> Vec<Dart> {
    let mut walk = Vec::new();
    let mut v = start;
    for _ in 0..len {
        let rot = g.map.rotation(v);
        if rot.is_empty() {
            break;
        }
        let d = rot[rng.gen_range(0..rot.len())];
        walk.push(d);
        v = g.map.head(d);
    }
    let mut back: Vec<Option<Dart>> = vec![None; g.map.vertex_capacity()];
    let mut seen = vec![false; g.map.vertex_capacity()];
    let mut queue = VecDeque::from([v]);
    seen[v] = true;
    while let Some(x) = queue.pop_front() {
        for d in g.map.rotation(x) {
            let y = g.map.head(d);
            if !seen[y] {
                seen[y] = true;
                back[y] = Some(d);
                queue.push_back(y);
            }
        }
    }
    let mut path = Vec::new();
    let mut x = start;
    while x != v {
        let d = back[x].expect("the walk stays in one component");
        path.push(d);
        x = g.map.tail(d);
    }
    walk.extend(path.into_iter().rev());
    walk
}

fn winding_calculus(all: &[(String, CGraph)]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut checks, mut failures) = (0usize, Vec::new());
    let c_of = |g: &CGraph| g.c as i64;
    for round in 0.. {
        if checks >= MIN_WINDING_CHECKS && round >= 1 {
            break;
        }
        for (name, g) in all {
            let (faces, heights) = g.face_heights();
            checks += 1;
            if heights.iter().sum::<i64>() != 0 {
                failures.push(format!("{name}: face heights sum to {}", heights.iter().sum::<i64>()));
            }
            let verts: Vec<usize> = g.map.vertices().collect();
            let start = verts[rng.gen_range(0..verts.len())];
            let w = closed_walk(g, start, rng.gen_range(0..3 * verts.len() + 1), &mut rng);
            if w.is_empty() {
                continue;
            }
            let h = g.height_of_walk(&w).expect("closed walk");
            checks += 1;
            if h.rem_euclid(c_of(g)) != 0 {
                failures.push(format!("{name}: closed walk of height {h}"));
            }
            // Splitting a closed walk at a vertex it revisits gives two
            // closed walks whose heights add up.
            let k = rng.gen_range(0..w.len());
            let at = g.map.tail(w[k]);
            if let Some(j) = (k + 1..w.len()).find(|&j| g.map.tail(w[j]) == at) {
                let inner = &w[k..j];
                let outer: Vec<Dart> = w[..k].iter().chain(&w[j..]).copied().collect();
                let hi = g.height_of_walk(inner).expect("closed");
                let ho = if outer.is_empty() { 0 } else { g.height_of_walk(&outer).expect("closed") };
                checks += 1;
                if hi + ho != h {
                    failures.push(format!("{name}: {hi} + {ho} != {h}"));
                }
            }
            // Contracting one intra-cluster edge leaves every face height alone.
            let intra: Vec<usize> = g.map.edges().filter(|&e| g.is_intra(e) && !g.map.is_loop(e)).collect();
            if !intra.is_empty() {
                let e = intra[rng.gen_range(0..intra.len())];
                let mut h2 = g.clone();
                h2.map.contract_edge(e).expect("contractible");
                for (f, &fh) in faces.iter().zip(&heights) {
                    let Some(&d) = f.darts.iter().find(|d| d.edge() != e) else { continue };
                    checks += 1;
                    let after = h2.face_height(&h2.map.face_walk(d));
                    if after != fh {
                        failures.push(format!("{name}: face height {fh} became {after}"));
                    }
                }
            }
        }
    }
    let pass = failures.is_empty() && checks >= MIN_WINDING_CHECKS;
    let mut detail = format!("{checks} checks (minimum {MIN_WINDING_CHECKS}), {} failures", failures.len());
    if let Some(b) = failures.first() {
        detail += &format!("; first: {b}");
    }
    Outcome { pass, detail }
}

fn compact(g: &CGraph) -> CGraph {
    let (map, verts, _) = g.map.compacted();
    let gamma = verts.iter().map(|&v| g.gamma[v]).collect();
    CGraph::new(map, g.c, gamma).expect("labels in range")
}

fn normalization(corpus: &[(String, CGraph)], medium: &[(String, CGraph)]) -> Outcome {
    let wide = OracleLimits { max_vertices: 40, max_nodes: 20_000_000 };
    let (mut normalized, mut rejected, mut compared, mut limit) = (0, 0, 0, 0);
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for (name, g) in corpus.iter().chain(medium) {
        for comp in split_components(g) {
            let PoleSelection::Poles(p) = comp.cg.select_poles() else { continue };
            let n = comp.cg.map.vertex_count();
            let small = n <= SMALL;
            let before = if small { oracle(&comp.cg, &oracle_limits()).ok() } else { None };
            match normalize(comp.cg.clone(), p) {
                Err(e) => bad.push(format!("{name}: {e}")),
                Ok(NormalizeOutcome::Rejected(_)) => {
                    rejected += 1;
                    if let Some(o) = &before {
                        if !matches!(o, OracleVerdict::NotCPlanar | OracleVerdict::LimitExceeded) {
                            bad.push(format!("{name}: normalization rejected, oracle {}", o.name()));
                        }
                    }
                }
                Ok(NormalizeOutcome::Normalized(ncg)) => {
                    normalized += 1;
                    let added: usize = ncg.provenance.subdivisions.iter().map(|s| s.vertices.len()).sum();
                    worst = worst.max(added as f64 / n as f64);
                    let Some(o) = before else { continue };
                    match oracle(&compact(&ncg.cg), &wide) {
                        Ok(OracleVerdict::LimitExceeded) => limit += 1,
                        Ok(after) => {
                            compared += 1;
                            if std::mem::discriminant(&after) != std::mem::discriminant(&o) {
                                bad.push(format!("{name}: oracle {} before, {} after", o.name(), after.name()));
                            }
                        }
                        Err(e) => bad.push(format!("{name}: {e}")),
                    }
                }
            }
        }
    }
    let pass = bad.is_empty() && worst <= SUBDIVISION_RATIO && compared > 0;
    let mut detail = format!(
        "{normalized} normalized, {rejected} rejected early, all faces conforming and poles simple; \
         subdivision vertices per input vertex at most {worst:.2} (bound {SUBDIVISION_RATIO}); \
         oracle unchanged on {compared} ({limit} over limit); {} problems",
        bad.len()
    );
    if let Some(b) = bad.first() {
        detail += &format!("; first: {b}");
    }
    Outcome { pass, detail }
}

fn named_instances() -> Outcome {
    let cases = [
        ("T3", cycle(3, &[0, 1, 2]), "c-planar"),
        ("double hexagon", cycle(3, &[0, 1, 2, 0, 1, 2]), "not-c-planar"),
        ("all-zero hexagon", cycle(3, &[0, 1, 2, 0, 2, 1]), "unsupported"),
    ];
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, g, want) in cases {
        let got = decide(&g).map(|v| v.name()).unwrap_or("error");
        let o = oracle(&g, &oracle_limits()).map(|o| o.name()).unwrap_or("error");
        pass &= got == want;
        parts.push(format!("{name} {got} (oracle {o})"));
    }
    Outcome { pass, detail: parts.join(", ") }
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|p| (p.0.ln(), p.1.ln())).unzip();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

fn scaling() -> Outcome {
    let mut points = Vec::new();
    let mut parts = Vec::new();
    let mut all_accepted = true;
    for &n in &SCALING_SIZES {
        let mut times = Vec::new();
        let mut size = 0;
        for r in 0..SCALING_REPS {
            let g = planted(&PlantedParams::fragmented(3, n, 100 + r as u64));
            size = g.map.vertex_count();
            let t = Instant::now();
            let v = decide(&g);
            times.push(t.elapsed().as_secs_f64());
            all_accepted &= matches!(v, Ok(Verdict::CPlanar(_)));
        }
        times.sort_by(f64::total_cmp);
        let med = times[times.len() / 2];
        parts.push(format!("{size}v {:.1}ms", med * 1e3));
        points.push((size as f64, med.max(1e-9)));
    }
    let s = slope(&points);
    let last = points.last().map_or(0.0, |p| p.1);
    let pass = all_accepted && s <= MAX_SLOPE && last < MAX_SECS_8K;
    Outcome {
        pass,
        detail: format!(
            "{}; slope {s:.2} (limit {MAX_SLOPE}), largest {last:.3}s (limit {MAX_SECS_8K}s)",
            parts.join(", ")
        ),
    }
}

/// How often the stricter pole-face rule, which asks a pole face to touch
/// both a sink and a source, changes the verdict on the small corpus.
fn conjunctive_rule_report(corpus: &[(String, CGraph)]) {
    let strict = DecideOptions { pole_rule: PoleRule::Conjunctive };
    let mut differ = 0;
    for (_, g) in corpus {
        let (Ok(a), Ok(b)) = (decide_with_report(g), decide_with_options(g, strict)) else { continue };
        if a.verdict.name() != b.verdict.name() {
            differ += 1;
        }
    }
    println!("INFO stricter pole-face rule changes {differ} of {} small verdicts", corpus.len());
}

fn main() {
    let corpus = small_corpus();
    let cycles = cycle_family();
    let medium = medium_corpus();
    let everything: Vec<(String, CGraph)> = corpus.iter().chain(&cycles).chain(&medium).cloned().collect();
    let outcomes = [
        ("oracle equivalence", oracle_equivalence(&corpus, &cycles)),
        ("certificate soundness", certificate_soundness(&everything)),
        ("invariant checks", invariant_checks(&everything)),
        ("winding calculus", winding_calculus(&everything)),
        ("normalization postconditions", normalization(&corpus, &medium)),
        ("named instances", named_instances()),
        ("scaling", scaling()),
    ];
    for (i, (name, o)) in outcomes.iter().enumerate() {
        line(i + 1, name, o);
    }
    conjunctive_rule_report(&corpus);
    if outcomes.iter().any(|(_, o)| !o.pass) {
        std::process::exit(1);
    }
}

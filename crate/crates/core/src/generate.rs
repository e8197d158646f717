//! Random embedded cyclic clustered graphs, grown from a cycle that winds
//! once around the cluster order by inserting paths and pendant paths
//! inside faces.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cmodel::CGraph;
use crate::combmap::{CombMap, Dart};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenMode {
    /// Every inserted path keeps the face heights at one `+c` face, one
    /// `-c` face and zeros elsewhere.
    Preserve,
    /// Path heights are only constrained by the labels of their ends, so
    /// winding obstructions appear.
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub c: usize,
    /// Stop growing once this many vertices exist.
    pub vertices: usize,
    /// Extra edges (paths without internal vertices) added afterwards.
    pub extra_chords: usize,
    pub mode: GenMode,
    /// Chance that a growth step attaches a pendant path instead of a path
    /// between two face occurrences.
    pub pendant_prob: f64,
    /// Longest inserted path, in internal vertices.
    pub max_path: usize,
    /// Relative weight of intra-cluster edges in path step choices.
    pub intra_weight: f64,
    pub seed: u64,
}

impl GenParams {
    pub fn new(c: usize, vertices: usize, seed: u64) -> GenParams {
        GenParams {
            c,
            vertices,
            extra_chords: 0,
            mode: GenMode::Preserve,
            pendant_prob: 0.3,
            max_path: 4,
            intra_weight: 0.3,
            seed,
        }
    }
}

/// A cycle through vertices `0, 1, ..., n-1` in that order, vertex `i` in
/// cluster `labels[i]`. The face traced from dart 0 visits the vertices in
/// increasing order.
pub fn cycle(c: usize, labels: &[usize]) -> CGraph {
    let n = labels.len();
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let rotation: Vec<Vec<Dart>> = (0..n)
        .map(|i| vec![Dart::of_edge(i, 0), Dart::of_edge((i + n - 1) % n, 1)])
        .collect();
    let map = CombMap::new(n, &edges, &rotation).expect("a cycle is planar");
    CGraph::new(map, c, labels.to_vec()).expect("labels are in range")
}

/// The cycle `0, 1, ..., c-1` with vertex `i` in cluster `i`.
pub fn winding_cycle(c: usize) -> CGraph {
    cycle(c, &(0..c).collect::<Vec<_>>())
}

/// Steps in {-1, 0, 1} of the given count and sum, or `None` if impossible.
fn random_steps(rng: &mut ChaCha8Rng, count: usize, sum: i64, intra_weight: f64) -> Option<Vec<i64>> {
    let m = count as i64;
    if sum.abs() > m {
        return None;
    }
    // Number of zero steps: same parity as m - |sum|.
    let options: Vec<i64> = (0..=m - sum.abs()).filter(|z| (m - sum.abs() - z) % 2 == 0).collect();
    let weights: Vec<f64> = options.iter().map(|&z| intra_weight.powi(z as i32).max(1e-9)).collect();
    let total: f64 = weights.iter().sum();
    let mut r = rng.gen::<f64>() * total;
    let mut z = options[options.len() - 1];
    for (o, w) in options.iter().zip(&weights) {
        if r < *w {
            z = *o;
            break;
        }
        r -= w;
    }
    let pairs = (m - z - sum.abs()) / 2;
    let (up, down) = if sum >= 0 { (pairs + sum, pairs) } else { (pairs, pairs - sum) };
    let mut steps: Vec<i64> = std::iter::repeat_n(1, up as usize)
        .chain(std::iter::repeat_n(-1, down as usize))
        .chain(std::iter::repeat_n(0, z as usize))
        .collect();
    steps.shuffle(rng);
    Some(steps)
}

fn label_after(c: usize, start: usize, step: i64) -> usize {
    (start as i64 + step).rem_euclid(c as i64) as usize
}

/// Inserts a path with the given steps from the wedge of `da` to the wedge
/// of `db` (both on one face).
fn insert_path(cg: &mut CGraph, da: Dart, db: Dart, steps: &[i64]) {
    let e = cg.map.insert_chord_at(da, db).expect("wedges share a face");
    let (verts, _) = cg.map.subdivide_chain(e, steps.len() - 1);
    let mut label = cg.gamma[cg.map.tail(da)];
    for (w, s) in verts.into_iter().zip(steps) {
        label = label_after(cg.c, label, *s);
        cg.gamma.push(label);
        debug_assert_eq!(cg.gamma.len(), w + 1);
    }
}

fn insert_pendant(cg: &mut CGraph, da: Dart, steps: &[i64]) {
    let mut anchor = Some(da);
    let mut at = cg.map.tail(da);
    for s in steps {
        let w = cg.map.add_vertex();
        cg.gamma.push(label_after(cg.c, cg.gamma[at], *s));
        let e = cg.map.add_edge_raw(at, anchor, w, None);
        anchor = Some(Dart::of_edge(e, 1));
        at = w;
    }
}

/// One path insertion in a random face. Returns false when the random
/// choices admit no legal path.
fn grow_once(cg: &mut CGraph, rng: &mut ChaCha8Rng, p: &GenParams, k: usize, pendant: bool) -> bool {
    let darts: Vec<Dart> = cg.map.darts().collect();
    let start = *darts.choose(rng).expect("map has edges");
    let walk = cg.map.face_walk(start);
    let n = walk.len();
    let steps_of_face: Vec<i64> = walk.darts.iter().map(|&d| cg.step(d)).collect();
    let face_h: i64 = steps_of_face.iter().sum();
    let a = rng.gen_range(0..n);
    if pendant {
        let steps: Vec<i64> = (0..k.max(1))
            .map(|_| if rng.gen_bool(p.intra_weight / (1.0 + p.intra_weight)) { 0 } else if rng.gen() { 1 } else { -1 })
            .collect();
        insert_pendant(cg, walk.darts[a], &steps);
        return true;
    }
    let b = rng.gen_range(0..n);
    if a == b {
        return false;
    }
    let mut seg = 0;
    let mut i = a;
    while i != b {
        seg += steps_of_face[i];
        i = (i + 1) % n;
    }
    let (x, y) = (walk.vertices[a], walk.vertices[b]);
    let count = k + 1;
    let h = match p.mode {
        GenMode::Preserve => {
            if face_h != 0 && rng.gen() {
                seg - face_h
            } else {
                seg
            }
        }
        GenMode::Free => {
            let want = (cg.gamma[y] as i64 - cg.gamma[x] as i64).rem_euclid(p.c as i64);
            let opts: Vec<i64> = (-(count as i64)..=count as i64)
                .filter(|h| h.rem_euclid(p.c as i64) == want)
                .collect();
            match opts.choose(rng) {
                Some(&h) => h,
                None => return false,
            }
        }
    };
    if k == 0 && x == y {
        return false;
    }
    let Some(steps) = random_steps(rng, count, h, p.intra_weight) else {
        return false;
    };
    insert_path(cg, walk.darts[a], walk.darts[b], &steps);
    true
}

/// Generates an instance; the same parameters always give the same graph.
pub fn generate(p: &GenParams) -> CGraph {
    assert!(p.c >= 3, "generation needs at least three clusters");
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut cg = winding_cycle(p.c);
    let mut guard = 0usize;
    while cg.map.vertex_count() < p.vertices && guard < 100 * p.vertices + 100 {
        guard += 1;
        let room = p.vertices - cg.map.vertex_count();
        let k = rng.gen_range(1..=p.max_path.max(1)).min(room);
        let pendant = rng.gen_bool(p.pendant_prob);
        grow_once(&mut cg, &mut rng, p, k, pendant);
    }
    let mut added = 0;
    let mut guard = 0usize;
    while added < p.extra_chords && guard < 100 * p.extra_chords + 100 {
        guard += 1;
        if grow_once(&mut cg, &mut rng, p, 0, false) {
            added += 1;
        }
    }
    cg
}

/// Disjoint union of instances with the same cluster count.
pub fn disjoint_union(parts: &[CGraph]) -> CGraph {
    let c = parts[0].c;
    let mut edges = Vec::new();
    let mut rotation = Vec::new();
    let mut gamma = Vec::new();
    for g in parts {
        assert_eq!(g.c, c);
        let (cm, old_v, _) = g.map.compacted();
        let (_, es, rot) = cm.to_parts();
        let (vb, eb) = (gamma.len(), edges.len());
        edges.extend(es.iter().map(|&(a, b)| (a + vb, b + vb)));
        rotation.extend(rot.into_iter().map(|r| r.into_iter().map(|d| Dart(d.0 + 2 * eb)).collect::<Vec<_>>()));
        gamma.extend(old_v.iter().map(|&v| g.gamma[v]));
    }
    let map = CombMap::new(gamma.len(), &edges, &rotation).expect("parts are planar");
    CGraph::new(map, c, gamma).expect("labels are in range")
}

/// Parameters of the planted family: concentric rings drawn in the fan
/// model, so every instance is c-planar by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedParams {
    pub c: usize,
    pub rings: usize,
    /// Vertices of each cluster on each ring.
    pub per_cluster: usize,
    /// Chance that a quad between two rings gets a diagonal.
    pub diagonal_prob: f64,
    /// Chance that a quad gets a pendant vertex.
    pub pendant_prob: f64,
    /// Chance that an edge outside the protected spanning tree and the
    /// innermost ring is deleted.
    pub delete_prob: f64,
    /// Keep radial edges only in the sector of cluster 0, so the other
    /// clusters fall apart into one arc per ring.
    pub fragment: bool,
    pub seed: u64,
}

impl PlantedParams {
    /// Roughly `n` vertices, with rings about as long as they are many.
    pub fn with_size(c: usize, n: usize, seed: u64) -> PlantedParams {
        let per_cluster = (((n as f64).sqrt() / c as f64).round() as usize).max(1);
        let rings = (n / (c * per_cluster) * 4 / 5).max(1);
        PlantedParams { c, rings, per_cluster, diagonal_prob: 0.4, pendant_prob: 0.25, delete_prob: 0.35, fragment: false, seed }
    }

    /// Roughly `n` vertices on thin rings with one slot per cluster and
    /// radial edges only in cluster 0. Contraction leaves most of the graph
    /// in place, so subdivision, matching and chord selection all get work.
    pub fn fragmented(c: usize, n: usize, seed: u64) -> PlantedParams {
        let rings = (n * 4 / 5 / c).max(1);
        PlantedParams {
            c,
            rings,
            per_cluster: 1,
            diagonal_prob: 0.4,
            pendant_prob: 0.5,
            delete_prob: 0.35,
            fragment: true,
            seed,
        }
    }
}

/// Builds a planted instance. Vertex `(r, k)` sits on ring `r` at angular
/// slot `k`, in cluster `k / per_cluster`; edges are straight segments and
/// rotations are read off the angles.
pub fn planted(p: &PlantedParams) -> CGraph {
    assert!(p.c >= 3, "generation needs at least three clusters");
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let m = p.per_cluster.max(1);
    let slots = p.c * m;
    let tau = std::f64::consts::TAU;
    let mut pos: Vec<(f64, f64)> = Vec::new();
    let mut gamma = Vec::new();
    for r in 0..p.rings.max(1) {
        for k in 0..slots {
            let a = tau * (k as f64 + 0.5) / slots as f64;
            let rad = 1.0 + r as f64;
            pos.push((rad * a.cos(), rad * a.sin()));
            gamma.push(k / m);
        }
    }
    let id = |r: usize, k: usize| r * slots + k % slots;
    // (edge, protected)
    let mut edges: Vec<((usize, usize), bool)> = Vec::new();
    for r in 0..p.rings.max(1) {
        for k in 0..slots {
            edges.push(((id(r, k), id(r, k + 1)), r == 0));
            if r + 1 < p.rings && (!p.fragment || k < m) {
                edges.push(((id(r, k), id(r + 1, k)), false));
            }
        }
    }
    let mut pendants = Vec::new();
    for r in 0..p.rings.saturating_sub(1) {
        for k in 0..slots {
            let quad = [id(r, k), id(r, k + 1), id(r + 1, k + 1), id(r + 1, k)];
            if rng.gen_bool(p.diagonal_prob) {
                let e = if rng.gen() { (quad[0], quad[2]) } else { (quad[1], quad[3]) };
                edges.push((e, false));
            } else if rng.gen_bool(p.pendant_prob) {
                pendants.push(quad);
            }
        }
    }
    // Random spanning tree, with the innermost ring kept whole, protects
    // connectivity and the winding cycle from deletions.
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.shuffle(&mut rng);
    let mut uf = petgraph::unionfind::UnionFind::<usize>::new(pos.len());
    for &(e, prot) in &edges {
        if prot {
            uf.union(e.0, e.1);
        }
    }
    for &i in &order {
        let (e, _) = edges[i];
        if uf.union(e.0, e.1) {
            edges[i].1 = true;
        }
    }
    let mut kept: Vec<(usize, usize)> =
        edges.iter().filter(|(_, prot)| *prot || !rng.gen_bool(p.delete_prob)).map(|(e, _)| *e).collect();
    // A pendant hangs from one quad corner toward the quad's centre and
    // takes the cluster of the sector it ends in.
    for quad in pendants {
        let corner = quad[rng.gen_range(0..4)];
        let centre = quad.iter().fold((0.0, 0.0), |acc, &v| (acc.0 + pos[v].0 / 4.0, acc.1 + pos[v].1 / 4.0));
        let at = (
            pos[corner].0 + 0.6 * (centre.0 - pos[corner].0),
            pos[corner].1 + 0.6 * (centre.1 - pos[corner].1),
        );
        let slot = (at.1.atan2(at.0).rem_euclid(tau) / tau * slots as f64) as usize % slots;
        let w = pos.len();
        pos.push(at);
        gamma.push(slot / m);
        kept.push((corner, w));
    }
    let n = pos.len();
    let mut around: Vec<Vec<(f64, Dart)>> = vec![Vec::new(); n];
    for (e, &(a, b)) in kept.iter().enumerate() {
        let ang = |from: usize, to: usize| (pos[to].1 - pos[from].1).atan2(pos[to].0 - pos[from].0);
        around[a].push((ang(a, b), Dart::of_edge(e, 0)));
        around[b].push((ang(b, a), Dart::of_edge(e, 1)));
    }
    let rotation: Vec<Vec<Dart>> = around
        .into_iter()
        .map(|mut v| {
            v.sort_by(|x, y| x.0.total_cmp(&y.0));
            v.into_iter().map(|(_, d)| d).collect()
        })
        .collect();
    let map = CombMap::new(n, &kept, &rotation).expect("a straight-line drawing is planar");
    CGraph::new(map, p.c, gamma).expect("labels are in range")
}

//! Turns a normalized instance and a perfect matching into a certificate:
//! the input map plus intra-cluster edges, inserted without crossings, after
//! which every cluster of every component induces a tree-spanned connected
//! subgraph. Also holds the certificate checker, which shares no code with
//! the construction beyond the data types.

use std::collections::VecDeque;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::cmodel::{classify, extremes, lifts_from, CGraph, FaceClass, Poles};
use crate::combmap::{CombMap, Dart};
use crate::decide::{ExtremeKind, IncidenceGraph, Matching, Stats};
use crate::normalize::{Component, NormalizedCGraph};
use crate::CplanarError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddedEdge {
    pub edge: usize,
    pub cluster: usize,
    pub endpoints: (usize, usize),
    /// Index, in input face order (faces sorted by smallest dart), of the
    /// input face the edge was drawn in.
    pub input_face: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterTree {
    pub cluster: usize,
    /// Smallest vertex of the connected component the tree lives in.
    pub component: usize,
    pub edges: Vec<usize>,
}

/// The input graph augmented by intra-cluster edges. Edges `0..input_edges`
/// are the input edges with their input ids; the rest are added.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub c: usize,
    pub gamma: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub rotation: Vec<Vec<Dart>>,
    pub input_edges: usize,
    pub added: Vec<AddedEdge>,
    pub cluster_trees: Vec<ClusterTree>,
}

/// An edge added to remove a sink or source, pointing from `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectedChord {
    pub edge: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone)]
pub struct Eliminated {
    pub cg: CGraph,
    pub poles: Poles,
    pub chords: Vec<DirectedChord>,
}

/// A same-cluster chord inside a simple face, given by the wedges (leaving
/// darts) of its two occurrences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub level: i64,
    pub a: Dart,
    pub b: Dart,
    pub u: usize,
    pub v: usize,
}

fn internal<T>(msg: String) -> Result<T, CplanarError> {
    Err(CplanarError::Internal(msg))
}

/// Step sequences of the two faces created by a chord from occurrence `a`
/// to occurrence `b`: first the face holding the chord's dart at `a`, then
/// the one holding its dart at `b`.
fn split_steps(steps: &[i64], a: usize, b: usize) -> (Vec<i64>, Vec<i64>) {
    let n = steps.len();
    let seg = |from: usize, to: usize| {
        let mut out = vec![0];
        let mut k = from;
        while k != to {
            out.push(steps[k]);
            k = (k + 1) % n;
        }
        out
    };
    (seg(b, a), seg(a, b))
}

fn is_simple(steps: &[i64]) -> bool {
    let lifts = lifts_from(0, steps);
    let (mi, ma) = extremes(steps, &lifts);
    let h: i64 = steps.iter().sum();
    classify(h, &mi, &ma) == FaceClass::Simple
}

/// Adds one directed chord per matched sink or source: sources first, then
/// sinks, each in increasing vertex order.
pub fn eliminate_extremes(
    ncg: NormalizedCGraph,
    inc: &IncidenceGraph,
    m: &Matching,
) -> Result<Eliminated, CplanarError> {
    let NormalizedCGraph { mut cg, mut poles, .. } = ncg;
    let mut order: Vec<(usize, ExtremeKind, usize)> = m
        .pairs
        .iter()
        .map(|&(si, fi)| (inc.s[si].0, inc.s[si].1, fi))
        .collect();
    order.sort_by_key(|&(v, kind, _)| (kind != ExtremeKind::Source, v));
    let mut chords = Vec::new();
    for (u, kind, fi) in order {
        let node = inc.f[fi];
        let walk = cg.map.face_walk(node.handle);
        let info = cg.classify_face(&walk);
        let n = walk.len();
        let occ_u: Vec<usize> = (0..n).filter(|&k| walk.vertices[k] == u).collect();
        let (ku, kother) = if !node.pole {
            let blocks = if kind == ExtremeKind::Source { &info.minima } else { &info.maxima };
            if blocks.len() != 2 || blocks.iter().any(|b| b.occurrences.len() != 1) {
                return internal(format!("matched face of vertex {u} is not semi-simple"));
            }
            let (o0, o1) = (blocks[0].occurrences[0], blocks[1].occurrences[0]);
            let (ku, kother) = if walk.vertices[o0] == u { (o0, o1) } else { (o1, o0) };
            if walk.vertices[ku] != u {
                return internal(format!("vertex {u} is not an extreme of its matched face"));
            }
            if walk.vertices[kother] == u {
                return internal(format!(
                    "both extremes of the matched face are vertex {u}; the chord would be a loop"
                ));
            }
            (ku, kother)
        } else {
            if occ_u.len() != 1 {
                return internal(format!("vertex {u} occurs {} times on its pole face", occ_u.len()));
            }
            let ku = occ_u[0];
            let mut found = Vec::new();
            for k in 0..n {
                let w = walk.vertices[k];
                if k == ku || w == u || cg.gamma[w] != cg.gamma[u] {
                    continue;
                }
                let (a, b) = if kind == ExtremeKind::Source { (k, ku) } else { (ku, k) };
                let (sa, sb) = split_steps(&info.steps, a, b);
                let (ha, hb): (i64, i64) = (sa.iter().sum(), sb.iter().sum());
                let heights_ok = (ha == 0 && hb == info.height) || (hb == 0 && ha == info.height);
                if heights_ok && is_simple(&sa) && is_simple(&sb) {
                    found.push(k);
                }
            }
            if found.len() != 1 {
                return internal(format!(
                    "pole face of vertex {u} has {} valid partners instead of one",
                    found.len()
                ));
            }
            (ku, found[0])
        };
        let (a, b) = if kind == ExtremeKind::Source { (kother, ku) } else { (ku, kother) };
        let e = cg.map.insert_chord_at(walk.darts[a], walk.darts[b])?;
        let (from, to) = (walk.vertices[a], walk.vertices[b]);
        chords.push(DirectedChord { edge: e, from, to });
        if node.pole {
            let side_a = Dart::of_edge(e, 0);
            let side_b = Dart::of_edge(e, 1);
            let keep = if cg.face_height(&cg.map.face_walk(side_a)) != 0 { side_a } else { side_b };
            if walk.darts.contains(&poles.outer) {
                poles.outer = keep;
            } else {
                poles.inner = keep;
            }
        }
    }
    Ok(Eliminated { cg, poles, chords })
}

/// After elimination every vertex has an incoming and an outgoing edge
/// (chords count in their recorded direction), and the poles are still the
/// only faces of nonzero height.
pub fn check_no_sinks_or_sources(el: &Eliminated) -> Result<(), CplanarError> {
    let cg = &el.cg;
    let n = cg.map.vertex_capacity();
    let (mut ins, mut outs) = (vec![0usize; n], vec![0usize; n]);
    for e in cg.map.edges() {
        if cg.is_intra(e) {
            continue;
        }
        let (a, b) = cg.map.endpoints(e);
        let (t, h) = if cg.step(Dart::of_edge(e, 0)) > 0 { (a, b) } else { (b, a) };
        outs[t] += 1;
        ins[h] += 1;
    }
    for ch in &el.chords {
        outs[ch.from] += 1;
        ins[ch.to] += 1;
    }
    if let Some(v) = cg.map.vertices().find(|&v| ins[v] == 0 || outs[v] == 0) {
        return internal(format!("vertex {v} is still a sink or source after elimination"));
    }
    let c = cg.c as i64;
    for f in cg.map.trace_faces() {
        let h = cg.face_height(&f);
        let expected = if f.darts.contains(&el.poles.outer) {
            c
        } else if f.darts.contains(&el.poles.inner) {
            -c
        } else {
            0
        };
        if h != expected {
            return internal(format!("face of height {h} where {expected} was expected after elimination"));
        }
    }
    Ok(())
}

/// Union-find over the intra-cluster edges; fails on a cycle.
fn intra_forest(cg: &CGraph) -> Result<UnionFind<usize>, CplanarError> {
    let mut uf = UnionFind::new(cg.map.vertex_capacity());
    for e in cg.map.edges() {
        if cg.is_intra(e) {
            let (a, b) = cg.map.endpoints(e);
            if !uf.union(a, b) {
                return internal(format!("edge {e} closes a cycle inside cluster {}", cg.gamma[a]));
            }
        }
    }
    Ok(uf)
}

pub fn check_clusters_acyclic(cg: &CGraph) -> Result<(), CplanarError> {
    intra_forest(cg).map(|_| ())
}

/// Per interior level, the chord joining the ascending and the descending
/// side of each zero-height face other than the poles.
pub fn chord_candidates(cg: &CGraph, poles: &Poles) -> Result<Vec<Candidate>, CplanarError> {
    let mut out = Vec::new();
    for walk in cg.map.trace_faces() {
        if walk.darts.contains(&poles.outer) || walk.darts.contains(&poles.inner) {
            continue;
        }
        let info = cg.classify_face(&walk);
        if info.height != 0 || info.class != FaceClass::Simple {
            return internal(format!(
                "inner face with height {} and class {:?} after elimination",
                info.height, info.class
            ));
        }
        let (Some(lo), Some(hi)) = (info.minima.first(), info.maxima.first()) else {
            continue;
        };
        let n = walk.len();
        let side = |from: usize, to: usize| {
            let mut occ = Vec::new();
            let mut k = from;
            while k != to {
                occ.push(k);
                k = (k + 1) % n;
            }
            occ
        };
        let up = side(*lo.occurrences.last().unwrap(), hi.occurrences[0]);
        let down = side(*hi.occurrences.last().unwrap(), lo.occurrences[0]);
        for level in lo.level + 1..hi.level {
            let at = |occ: &[usize]| -> Result<usize, CplanarError> {
                let hits: Vec<usize> = occ.iter().copied().filter(|&k| info.lifts[k] == level).collect();
                if hits.len() != 1 {
                    return internal(format!("level {level} occurs {} times on one side of a face", hits.len()));
                }
                Ok(hits[0])
            };
            let (ka, kb) = (at(&up)?, at(&down)?);
            let (u, v) = (walk.vertices[ka], walk.vertices[kb]);
            if u == v {
                continue;
            }
            out.push(Candidate { level, a: walk.darts[ka], b: walk.darts[kb], u, v });
        }
    }
    Ok(out)
}

/// Greedy choice of candidates that join different pieces of a cluster.
pub fn maximal_forest(cg: &CGraph, cands: &[Candidate]) -> Result<Vec<bool>, CplanarError> {
    let mut uf = intra_forest(cg)?;
    Ok(cands.iter().map(|c| uf.union(c.u, c.v)).collect())
}

/// Every cluster's intra-cluster edges form a spanning tree of its vertices.
pub fn check_cluster_trees(cg: &CGraph) -> Result<(), CplanarError> {
    let mut uf = intra_forest(cg)?;
    let mut root = vec![usize::MAX; cg.c];
    for v in cg.map.vertices() {
        let r = uf.find_mut(v);
        let g = cg.gamma[v];
        if root[g] == usize::MAX {
            root[g] = r;
        } else if root[g] != r {
            return internal(format!("cluster {g} is not connected after adding chords"));
        }
    }
    Ok(())
}

/// Runs elimination, chord selection and the lift back to the input for
/// one component. Returns the augmented component map: input vertices and
/// edges keep their ids, added edges follow.
pub fn certify_component(
    input: &CGraph,
    ncg: NormalizedCGraph,
    inc: &IncidenceGraph,
    m: &Matching,
    stats: &mut Stats,
) -> Result<CombMap, CplanarError> {
    let el = eliminate_extremes(ncg, inc, m)?;
    stats.elimination_chords = el.chords.len();
    check_no_sinks_or_sources(&el)?;
    stats.no_sink_source_checks += 1;
    check_clusters_acyclic(&el.cg)?;
    stats.acyclic_checks += 1;
    let mut cg = el.cg;
    let cands = chord_candidates(&cg, &el.poles)?;
    let keep = maximal_forest(&cg, &cands)?;
    stats.candidate_chords = cands.len();
    for (cand, _) in cands.iter().zip(&keep).filter(|(_, &k)| k) {
        cg.map.insert_chord_at(cand.a, cand.b)?;
        stats.forest_chords += 1;
    }
    check_cluster_trees(&cg)?;
    stats.tree_checks += 1;
    lift(input, &cg)
}

/// Maps the final working graph back onto the input vertices. Input
/// vertices get their input rotations back, with each added dart placed
/// right after the input dart that precedes it in the working rotation.
/// Vertices created by subdivisions are then contracted into neighbours of
/// their own cluster, and added edges that became loops or join two
/// clusters are dropped.
pub fn lift(input: &CGraph, w: &CGraph) -> Result<CombMap, CplanarError> {
    let v0 = input.map.vertex_capacity();
    let e0 = input.map.edge_capacity();
    let aux: Vec<usize> = w.map.vertices().filter(|&v| v >= v0).collect();
    let mut lid = vec![usize::MAX; w.map.vertex_capacity()];
    for (i, &a) in aux.iter().enumerate() {
        lid[a] = v0 + i;
    }
    let added: Vec<usize> = w.map.edges().filter(|&e| e >= e0).collect();
    let mut leid = vec![usize::MAX; w.map.edge_capacity()];
    for (i, &e) in added.iter().enumerate() {
        leid[e] = e0 + i;
    }
    let ldart = |d: Dart| Dart::of_edge(leid[d.edge()], d.end());
    let total = e0 + added.len();
    let mut ltail = vec![usize::MAX; 2 * total];
    let mut after: Vec<Vec<Dart>> = vec![Vec::new(); 2 * e0];
    for r in w.map.vertices() {
        let rot = w.map.rotation(r);
        if r >= v0 {
            for d in rot {
                ltail[ldart(d).0] = lid[r];
            }
            continue;
        }
        let Some(start) = rot.iter().position(|d| d.edge() < e0) else {
            return internal(format!("vertex {r} kept no input edge"));
        };
        let mut cur = rot[start];
        for i in 1..rot.len() {
            let d = rot[(start + i) % rot.len()];
            if d.edge() < e0 {
                cur = d;
            } else {
                let x = ldart(d);
                ltail[x.0] = input.map.tail(cur);
                after[cur.0].push(x);
            }
        }
    }
    let mut edges: Vec<(usize, usize)> = (0..e0).map(|e| input.map.endpoints(e)).collect();
    for i in 0..added.len() {
        edges.push((ltail[2 * (e0 + i)], ltail[2 * (e0 + i) + 1]));
    }
    let mut rotation: Vec<Vec<Dart>> = Vec::with_capacity(v0 + aux.len());
    for v in 0..v0 {
        let mut rot = Vec::new();
        for p in input.map.rotation(v) {
            rot.push(p);
            rot.extend_from_slice(&after[p.0]);
        }
        rotation.push(rot);
    }
    for &a in &aux {
        rotation.push(w.map.rotation(a).into_iter().map(ldart).collect());
    }
    let map = CombMap::new(v0 + aux.len(), &edges, &rotation)
        .or_else(|e| internal(format!("lifted map is invalid: {e}")))?;
    let mut gamma = input.gamma.clone();
    gamma.extend(aux.iter().map(|&a| w.gamma[a]));
    let mut l = CGraph { map, c: input.c, gamma };

    // Contract subdivision vertices toward the input vertices of their
    // cluster, deepest first.
    let n = l.map.vertex_capacity();
    let mut depth = vec![usize::MAX; n];
    let mut parent_edge = vec![usize::MAX; n];
    let mut queue: VecDeque<usize> = (0..v0).collect();
    for v in 0..v0 {
        depth[v] = 0;
    }
    while let Some(x) = queue.pop_front() {
        for d in l.map.rotation(x) {
            let y = l.map.head(d);
            if l.gamma[y] == l.gamma[x] && depth[y] == usize::MAX {
                depth[y] = depth[x] + 1;
                parent_edge[y] = d.edge();
                queue.push_back(y);
            }
        }
    }
    let mut order: Vec<usize> = (v0..n).collect();
    if let Some(&a) = order.iter().find(|&&a| depth[a] == usize::MAX) {
        return internal(format!("subdivision vertex {a} is cut off from its cluster"));
    }
    order.sort_by_key(|&a| std::cmp::Reverse(depth[a]));
    for a in order {
        let e = parent_edge[a];
        let (x, y) = l.map.endpoints(e);
        let parent = if x == a { y } else { x };
        l.map.contract_edge_into(e, parent)?;
    }
    for e in e0..l.map.edge_capacity() {
        if l.map.is_edge_alive(e) && (l.map.is_loop(e) || !l.is_intra(e)) {
            l.map.delete_edge(e)?;
        }
    }
    let (compact, verts, _) = l.map.compacted();
    debug_assert_eq!(verts, (0..v0).collect::<Vec<_>>());
    Ok(compact)
}

/// Puts the augmented component maps together on the input's vertex ids.
/// Input edges keep their ids; added edges are numbered after them, in
/// component order.
pub fn assemble(input: &CGraph, comps: &[Component], maps: &[CombMap]) -> CombMap {
    let n = input.map.vertex_capacity();
    let mut edges: Vec<(usize, usize)> = (0..input.map.edge_capacity()).map(|e| input.map.endpoints(e)).collect();
    let mut rotation = vec![Vec::new(); n];
    for (comp, m) in comps.iter().zip(maps) {
        let e0 = comp.edges.len();
        let base = edges.len();
        for e in e0..m.edge_capacity() {
            let (a, b) = m.endpoints(e);
            edges.push((comp.vertices[a], comp.vertices[b]));
        }
        let gdart = |d: Dart| {
            let e = d.edge();
            let ge = if e < e0 { comp.edges[e] } else { base + e - e0 };
            Dart::of_edge(ge, d.end())
        };
        for (l, &g) in comp.vertices.iter().enumerate() {
            rotation[g] = m.rotation(l).into_iter().map(gdart).collect();
        }
    }
    CombMap::from_parts(n, &edges, &rotation).expect("component maps assemble into a valid map")
}

/// Packages an augmentation of the input as a certificate: added edges
/// that are loops or join two clusters are dropped, one spanning tree per
/// cluster and component is chosen (input edges first) and added edges
/// outside the trees are dropped.
pub fn finalize_augmentation(input: &CGraph, aug: &CombMap) -> Result<Certificate, CplanarError> {
    let e_in = input.map.edge_capacity();
    let n = input.map.vertex_capacity();
    let gamma = &input.gamma;
    let mut m = aug.clone();
    for e in e_in..m.edge_capacity() {
        if m.is_edge_alive(e) {
            let (a, b) = m.endpoints(e);
            if a == b || gamma[a] != gamma[b] {
                m.delete_edge(e)?;
            }
        }
    }
    let comps = input.map.components();
    let mut comp_of = vec![0usize; n];
    for comp in &comps {
        for &v in comp {
            comp_of[v] = comp[0];
        }
    }
    let mut uf = UnionFind::new(n);
    let mut in_tree = vec![false; m.edge_capacity()];
    for e in 0..m.edge_capacity() {
        if !m.is_edge_alive(e) {
            continue;
        }
        let (a, b) = m.endpoints(e);
        if gamma[a] != gamma[b] {
            continue;
        }
        if comp_of[a] != comp_of[b] {
            return internal(format!("added edge {e} joins two components"));
        }
        if uf.union(a, b) {
            in_tree[e] = true;
        } else if e >= e_in {
            m.delete_edge(e)?;
        }
    }
    let mut class_root = std::collections::HashMap::new();
    for v in 0..n {
        let r = uf.find_mut(v);
        if *class_root.entry((comp_of[v], gamma[v])).or_insert(r) != r {
            return internal(format!(
                "cluster {} is disconnected in the component of vertex {}",
                gamma[v], comp_of[v]
            ));
        }
    }
    let (cm, verts, old_edges) = m.compacted();
    debug_assert_eq!(verts.len(), n);
    let faces = input.map.trace_faces();
    let fidx = input.map.face_index(&faces);
    let mut added = Vec::new();
    for e in e_in..cm.edge_capacity() {
        let d = Dart::of_edge(e, 0);
        let mut p = cm.pred(d);
        while p.edge() >= e_in && p != d {
            p = cm.pred(p);
        }
        if p.edge() >= e_in {
            return internal(format!("added edge {e} ends at a vertex without input edges"));
        }
        let (a, b) = cm.endpoints(e);
        added.push(AddedEdge { edge: e, cluster: gamma[a], endpoints: (a, b), input_face: fidx[p.0] });
    }
    let mut trees: std::collections::BTreeMap<(usize, usize), Vec<usize>> = std::collections::BTreeMap::new();
    for v in 0..n {
        trees.entry((comp_of[v], gamma[v])).or_default();
    }
    for (new_e, &old_e) in old_edges.iter().enumerate() {
        if in_tree[old_e] {
            let a = cm.endpoints(new_e).0;
            trees.get_mut(&(comp_of[a], gamma[a])).unwrap().push(new_e);
        }
    }
    let (vc, edges, rotation) = cm.to_parts();
    debug_assert_eq!(vc, n);
    Ok(Certificate {
        c: input.c,
        gamma: gamma.clone(),
        edges,
        rotation,
        input_edges: e_in,
        added,
        cluster_trees: trees
            .into_iter()
            .map(|((component, cluster), edges)| ClusterTree { cluster, component, edges })
            .collect(),
    })
}

/// Checks a certificate against its input without trusting the pipeline:
/// dart bookkeeping, input rotations preserved as cyclic sub-orders, genus
/// zero per component, unchanged components, intra-cluster added edges, and
/// one acyclic spanning tree per cluster and component.
pub fn verify_certificate(input: &CGraph, cert: &Certificate) -> Result<(), Vec<String>> {
    let mut problems = Vec::new();
    let n = input.map.vertex_capacity();
    let e_in = input.map.edge_capacity();
    if cert.c != input.c || cert.gamma != input.gamma {
        problems.push("cluster labels differ from the input".to_string());
    }
    if cert.rotation.len() != n {
        problems.push(format!("{} rotations for {} vertices", cert.rotation.len(), n));
    }
    if cert.input_edges != e_in || cert.edges.len() < e_in {
        problems.push(format!("certificate claims {} input edges, input has {e_in}", cert.input_edges));
    }
    if !problems.is_empty() {
        return Err(problems);
    }
    for e in 0..e_in {
        if cert.edges[e] != input.map.endpoints(e) {
            problems.push(format!("input edge {e} has different endpoints"));
        }
    }
    let total = cert.edges.len();
    if let Some(&(a, b)) = cert.edges.iter().find(|&&(a, b)| a >= n || b >= n) {
        problems.push(format!("edge ({a}, {b}) has an endpoint outside the vertex set"));
        return Err(problems);
    }
    // Dart bookkeeping.
    let tail = |d: usize| if d.is_multiple_of(2) { cert.edges[d / 2].0 } else { cert.edges[d / 2].1 };
    let mut seen = vec![false; 2 * total];
    let mut succ = vec![usize::MAX; 2 * total];
    let mut pred = vec![usize::MAX; 2 * total];
    for (v, rot) in cert.rotation.iter().enumerate() {
        for (i, d) in rot.iter().enumerate() {
            let d = d.0;
            if d >= 2 * total {
                problems.push(format!("vertex {v} lists unknown dart {d}"));
                continue;
            }
            if seen[d] {
                problems.push(format!("dart {d} listed twice"));
            }
            seen[d] = true;
            if tail(d) != v {
                problems.push(format!("dart {d} listed at vertex {v}, but it leaves vertex {}", tail(d)));
            }
            let next = rot[(i + 1) % rot.len()].0;
            if next < 2 * total {
                succ[d] = next;
                pred[next] = d;
            }
        }
    }
    if let Some(d) = seen.iter().position(|s| !s) {
        problems.push(format!("dart {d} is missing from the rotations"));
    }
    if !problems.is_empty() {
        return Err(problems);
    }
    // Input rotations survive as cyclic sub-orders.
    for v in 0..n {
        let kept: Vec<usize> = cert.rotation[v].iter().map(|d| d.0).filter(|&d| d < 2 * e_in).collect();
        let orig: Vec<usize> = input.map.rotation(v).iter().map(|d| d.0).collect();
        let same = kept.len() == orig.len()
            && (orig.is_empty() || {
                let s = kept.iter().position(|&d| d == orig[0]);
                s.is_some_and(|s| (0..orig.len()).all(|i| kept[(s + i) % kept.len()] == orig[i]))
            });
        if !same {
            problems.push(format!("rotation at vertex {v} does not preserve the input order"));
        }
    }
    // Components, before and after.
    let mut before = UnionFind::new(n);
    for e in 0..e_in {
        before.union(cert.edges[e].0, cert.edges[e].1);
    }
    let mut after = UnionFind::new(n);
    for &(a, b) in &cert.edges {
        after.union(a, b);
    }
    for e in e_in..total {
        let (a, b) = cert.edges[e];
        if !before.equiv(a, b) {
            problems.push(format!("added edge {e} joins two input components"));
        }
        if a == b {
            problems.push(format!("added edge {e} is a loop"));
        }
        if cert.gamma[a] != cert.gamma[b] {
            problems.push(format!("added edge {e} joins clusters {} and {}", cert.gamma[a], cert.gamma[b]));
        }
    }
    // Euler characteristic per component, from an independent face trace.
    let mut chi = vec![0i64; n];
    let mut has_edge = vec![false; n];
    for v in 0..n {
        chi[after.find_mut(v)] += 1;
    }
    for &(a, _) in &cert.edges {
        let r = after.find_mut(a);
        chi[r] -= 1;
        has_edge[r] = true;
    }
    let mut visited = vec![false; 2 * total];
    for start in 0..2 * total {
        if visited[start] {
            continue;
        }
        chi[after.find_mut(tail(start))] += 1;
        let mut d = start;
        while !visited[d] {
            visited[d] = true;
            d = pred[d ^ 1];
        }
    }
    for v in 0..n {
        let r = after.find_mut(v);
        if r == v && has_edge[r] && chi[r] != 2 {
            problems.push(format!("component of vertex {v} has Euler characteristic {}", chi[r]));
        }
    }
    // Added edge records.
    if cert.added.len() != total - e_in {
        problems.push(format!("{} added edges recorded, {} present", cert.added.len(), total - e_in));
    } else {
        for (i, a) in cert.added.iter().enumerate() {
            let e = e_in + i;
            if a.edge != e || a.endpoints != cert.edges[e] || a.cluster != cert.gamma[cert.edges[e].0] {
                problems.push(format!("record of added edge {e} does not match the edge"));
            }
        }
    }
    // One spanning tree per (component, cluster).
    let mut class_size = std::collections::HashMap::new();
    let mut class_min = std::collections::HashMap::new();
    for v in 0..n {
        let key = (before.find_mut(v), cert.gamma[v]);
        *class_size.entry(key).or_insert(0usize) += 1;
        class_min.entry(key).or_insert(v);
    }
    let mut covered = std::collections::HashSet::new();
    let mut tree_uf = UnionFind::new(n);
    for t in &cert.cluster_trees {
        let Some(&root) = class_min.values().find(|&&m| m == t.component) else {
            problems.push(format!("tree names vertex {} as a component, which is not a component minimum", t.component));
            continue;
        };
        let key = (before.find_mut(root), t.cluster);
        if !class_size.contains_key(&key) {
            problems.push(format!("tree for cluster {} names a component without that cluster", t.cluster));
            continue;
        }
        if !covered.insert(key) {
            problems.push(format!("two trees for cluster {} in component {}", t.cluster, t.component));
        }
        for &e in &t.edges {
            if e >= total {
                problems.push(format!("tree edge {e} does not exist"));
                continue;
            }
            let (a, b) = cert.edges[e];
            if cert.gamma[a] != t.cluster || cert.gamma[b] != t.cluster {
                problems.push(format!("tree edge {e} leaves cluster {}", t.cluster));
            } else if before.find_mut(a) != key.0 {
                problems.push(format!("tree edge {e} lies in another component"));
            } else if !tree_uf.union(a, b) {
                problems.push(format!("tree of cluster {} has a cycle through edge {e}", t.cluster));
            }
        }
        if t.edges.len() + 1 != class_size[&key] {
            problems.push(format!(
                "tree of cluster {} in component {} has {} edges for {} vertices",
                t.cluster,
                t.component,
                t.edges.len(),
                class_size[&key]
            ));
        }
    }
    for key in class_size.keys() {
        if !covered.contains(key) {
            problems.push(format!("cluster {} of component {} has no tree", key.1, class_min[key]));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems)
    }
}

/// Deliberate corruptions of a certificate, used to show that the checker
/// notices them.
pub mod mutation {
    use super::*;

    /// Removes added edge `e`, renumbering the edges after it.
    pub fn delete_added_edge(cert: &Certificate, e: usize) -> Certificate {
        assert!(e >= cert.input_edges && e < cert.edges.len());
        let fix = |d: Dart| if d.edge() > e { Dart(d.0 - 2) } else { d };
        let mut out = cert.clone();
        out.edges.remove(e);
        for rot in &mut out.rotation {
            rot.retain(|d| d.edge() != e);
            rot.iter_mut().for_each(|d| *d = fix(*d));
        }
        out.added.retain(|a| a.edge != e);
        for a in &mut out.added {
            if a.edge > e {
                a.edge -= 1;
            }
        }
        for t in &mut out.cluster_trees {
            t.edges.retain(|&x| x != e);
            t.edges.iter_mut().for_each(|x| {
                if *x > e {
                    *x -= 1
                }
            });
        }
        out
    }

    /// Swaps two input darts that are consecutive among the input darts at
    /// `v`. Changes the cyclic order when `v` has at least three input darts.
    pub fn swap_input_darts(cert: &Certificate, v: usize) -> Option<Certificate> {
        let rot = &cert.rotation[v];
        let pos: Vec<usize> = (0..rot.len()).filter(|&i| rot[i].edge() < cert.input_edges).collect();
        if pos.len() < 3 {
            return None;
        }
        let mut out = cert.clone();
        out.rotation[v].swap(pos[0], pos[1]);
        Some(out)
    }
}

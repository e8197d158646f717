//! Brings one connected component into normal form: clusters become
//! independent sets, and every face becomes simple or semi-simple with both
//! pole faces simple. May discover on the way that no clustered embedding
//! exists.

use petgraph::unionfind::UnionFind;
use thiserror::Error;

use crate::cmodel::{CGraph, FaceClass, FaceInfo, Poles};
use crate::combmap::{Dart, FacialWalk};
use crate::{CplanarError, Rejection};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("face is already simple or semi-simple")]
    FaceAlreadyConforming,
    #[error("face has an intra-cluster step at occurrence {0}")]
    IntraClusterStep(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    pub edge: usize,
    pub kept: usize,
    pub removed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubdivisionRecord {
    /// Length of the shortest monotone run that was bridged.
    pub h: usize,
    pub from: usize,
    pub to: usize,
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

/// Everything normalization did to the map, in order. Vertex and edge ids of
/// the input are never reused, so ids below the recorded input counts refer
/// to input objects.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    pub input_vertices: usize,
    pub input_edges: usize,
    pub contractions: Vec<Contraction>,
    pub deleted_loops: Vec<usize>,
    pub subdivisions: Vec<SubdivisionRecord>,
}

#[derive(Debug, Clone)]
pub struct NormalizedCGraph {
    pub cg: CGraph,
    pub poles: Poles,
    pub provenance: Provenance,
}

#[derive(Debug, Clone)]
pub enum NormalizeOutcome {
    Normalized(NormalizedCGraph),
    Rejected(Rejection),
}

/// Occurrence indices describing the bridge across the shortest monotone
/// run `P` of a face: `P` runs from `u` to `v`, `v_prime` lies `h` steps
/// after `v`, and `u_prime` lies `h` steps before `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinRun {
    pub u: usize,
    pub v: usize,
    pub v_prime: usize,
    pub u_prime: usize,
    pub h: usize,
    /// +1 when `P` ascends, -1 when it descends.
    pub sign: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdivision {
    /// A dart of the side that keeps the height of the split face.
    pub f_prime: Dart,
    /// A dart of the zero-height semi-simple side.
    pub f_dprime: Dart,
    pub record: SubdivisionRecord,
}

/// One component of the input, with the input ids of its vertices and edges.
#[derive(Debug, Clone)]
pub struct Component {
    pub cg: CGraph,
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

pub fn split_components(cg: &CGraph) -> Vec<Component> {
    cg.map
        .components()
        .into_iter()
        .map(|verts| {
            let (map, vertices, edges) = cg.map.restrict(&verts);
            let gamma = vertices.iter().map(|&v| cg.gamma[v]).collect();
            Component { cg: CGraph { map, c: cg.c, gamma }, vertices, edges }
        })
        .collect()
}

/// True when the face needs no further subdivision.
pub fn conforms(info: &FaceInfo) -> bool {
    matches!(info.class, FaceClass::Simple | FaceClass::SemiSimple)
}

/// Contracts every intra-cluster edge, then inspects each resulting loop.
/// A loop whose side away from the outer pole holds a vertex of another
/// cluster rules out a clustered embedding; other loops are deleted.
pub fn contract_clusters(
    cg: &mut CGraph,
    outer: Dart,
    prov: &mut Provenance,
) -> Result<Option<Rejection>, CplanarError> {
    for e in 0..cg.map.edge_capacity() {
        if !cg.map.is_edge_alive(e) || !cg.is_intra(e) || cg.map.is_loop(e) {
            continue;
        }
        let (a, b) = cg.map.endpoints(e);
        let kept = cg.map.contract_edge(e)?;
        let removed = if kept == a { b } else { a };
        prov.contractions.push(Contraction { edge: e, kept, removed });
    }
    if !cg.map.is_dart_alive(outer) {
        return Err(CplanarError::Internal("outer pole handle lost during contraction".into()));
    }
    let loops: Vec<usize> = cg.map.edges().filter(|&e| cg.map.is_loop(e)).collect();
    if loops.is_empty() {
        return Ok(None);
    }
    // Every loop separates the sphere, so its dual edge is a bridge. Faces
    // joined across non-loop edges form regions, and the loops link the
    // regions into a tree rooted at the outer face.
    let faces = cg.map.trace_faces();
    let fidx = cg.map.face_index(&faces);
    let mut uf: UnionFind<usize> = UnionFind::new(faces.len());
    for (f, w) in faces.iter().enumerate() {
        for &d in &w.darts {
            if !cg.map.is_loop(d.edge()) {
                uf.union(f, fidx[d.twin().0]);
            }
        }
    }
    let region: Vec<usize> = (0..faces.len()).map(|f| uf.find_mut(f)).collect();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); faces.len()];
    for &e in &loops {
        let (r0, r1) = (region[fidx[Dart::of_edge(e, 0).0]], region[fidx[Dart::of_edge(e, 1).0]]);
        if r0 == r1 {
            return Err(CplanarError::Internal(format!("loop {e} does not separate")));
        }
        adj[r0].push((r1, e));
        adj[r1].push((r0, e));
    }
    // Preorder from the outer region; `inner[e]` is the region below loop e.
    let root = region[fidx[outer.0]];
    let mut inner = vec![usize::MAX; cg.map.edge_capacity()];
    let mut parent = vec![usize::MAX; faces.len()];
    let mut order = vec![root];
    parent[root] = root;
    let mut i = 0;
    while i < order.len() {
        let r = order[i];
        i += 1;
        for &(s, e) in &adj[r] {
            if parent[s] == usize::MAX {
                parent[s] = r;
                inner[e] = s;
                order.push(s);
            }
        }
    }
    if let Some(&e) = loops.iter().find(|&&e| inner[e] == usize::MAX) {
        return Err(CplanarError::Internal(format!("loop {e} lies in another component")));
    }
    // Cluster range of the vertices in each subtree. A vertex off loop e
    // has all its faces on one side of e; the base of e has the loop's
    // own cluster, so counting it on both sides is harmless.
    let mut lo = vec![usize::MAX; faces.len()];
    let mut hi = vec![0usize; faces.len()];
    for d in cg.map.darts() {
        let v = cg.map.tail(d);
        let r = region[fidx[d.0]];
        lo[r] = lo[r].min(cg.gamma[v]);
        hi[r] = hi[r].max(cg.gamma[v]);
    }
    for &r in order.iter().skip(1).rev() {
        let p = parent[r];
        lo[p] = lo[p].min(lo[r]);
        hi[p] = hi[p].max(hi[r]);
    }
    for &e in &loops {
        let base = cg.map.endpoints(e).0;
        let g = cg.gamma[base];
        let r = inner[e];
        if lo[r] != g || hi[r] != g {
            let below: Vec<bool> = {
                let mut below = vec![false; faces.len()];
                below[r] = true;
                for &s in &order {
                    if s != root && below[parent[s]] {
                        below[s] = true;
                    }
                }
                below
            };
            let mut enclosed: Vec<usize> = (0..faces.len())
                .filter(|&f| below[region[f]])
                .flat_map(|f| faces[f].vertices.iter().copied())
                .filter(|&v| cg.gamma[v] != g)
                .collect();
            enclosed.sort_unstable();
            enclosed.dedup();
            return Ok(Some(Rejection::LoopEnclosure { cluster: g, vertex: base, enclosed }));
        }
        cg.map.delete_edge(e)?;
        prov.deleted_loops.push(e);
    }
    Ok(None)
}

/// Locates the first shortest monotone run of a non-conforming face whose
/// steps all change cluster.
pub fn find_min_run(cg: &CGraph, walk: &FacialWalk) -> Result<MinRun, NormalizeError> {
    let info = cg.classify_face(walk);
    if conforms(&info) {
        return Err(NormalizeError::FaceAlreadyConforming);
    }
    min_run_of_steps(&info.steps)
}

pub(crate) fn min_run_of_steps(steps: &[i64]) -> Result<MinRun, NormalizeError> {
    let n = steps.len();
    if let Some(k) = steps.iter().position(|&s| s == 0) {
        return Err(NormalizeError::IntraClusterStep(k));
    }
    let Some(k0) = (0..n).find(|&k| steps[(k + n - 1) % n] != steps[k]) else {
        return Err(NormalizeError::FaceAlreadyConforming);
    };
    // Runs as (start occurrence, length, sign).
    let mut runs: Vec<(usize, usize, i64)> = Vec::new();
    let mut k = k0;
    let mut covered = 0;
    while covered < n {
        let s = steps[k];
        let mut len = 0;
        while covered < n && steps[(k + len) % n] == s {
            len += 1;
            covered += 1;
        }
        runs.push((k, len, s));
        k = (k + len) % n;
    }
    runs.sort_by_key(|r| r.0);
    let &(i, h, sign) = runs
        .iter()
        .min_by_key(|r| (r.1, r.0))
        .expect("a face with a sign change has runs");
    if runs.len() < 4 {
        return Err(NormalizeError::FaceAlreadyConforming);
    }
    Ok(MinRun {
        u: i,
        v: (i + h) % n,
        v_prime: (i + 2 * h) % n,
        u_prime: (i + n * 2 - h) % n,
        h,
        sign,
    })
}

/// Splits the face by a strictly monotone path from `v_prime` to `u_prime`
/// with `h - 1` internal vertices, and checks that the split produces one
/// zero-height semi-simple face and one face of the original height.
pub fn subdivide_face(
    cg: &mut CGraph,
    walk: &FacialWalk,
    run: &MinRun,
) -> Result<Subdivision, CplanarError> {
    let height = cg.face_height(walk);
    let minima_before = cg.classify_face(walk).minima.len();
    let (from, to) = (walk.vertices[run.v_prime], walk.vertices[run.u_prime]);
    let e = cg
        .map
        .insert_chord_at(walk.darts[run.v_prime], walk.darts[run.u_prime])?;
    let (vertices, edges) = cg.map.subdivide_chain(e, run.h - 1);
    let base = cg.gamma[from] as i64;
    for (k, &w) in vertices.iter().enumerate() {
        let label = (base + run.sign * (k as i64 + 1)).rem_euclid(cg.c as i64) as usize;
        cg.gamma.push(label);
        debug_assert_eq!(cg.gamma.len(), w + 1);
    }
    let f_dprime = Dart::of_edge(e, 0);
    let f_prime = walk.darts[run.v_prime];
    let dprime = cg.classify_face(&cg.map.face_walk(f_dprime));
    let prime = cg.classify_face(&cg.map.face_walk(f_prime));
    if dprime.height != 0 || dprime.class != FaceClass::SemiSimple {
        return Err(CplanarError::Internal(format!(
            "bridged face has height {} and class {:?}",
            dprime.height, dprime.class
        )));
    }
    if prime.height != height {
        return Err(CplanarError::Internal(format!(
            "remaining face changed height from {height} to {}",
            prime.height
        )));
    }
    if prime.minima.len() >= minima_before {
        return Err(CplanarError::Internal(format!(
            "remaining face still has {} local minima",
            prime.minima.len()
        )));
    }
    Ok(Subdivision {
        f_prime,
        f_dprime,
        record: SubdivisionRecord { h: run.h, from, to, vertices, edges },
    })
}

/// Normalizes a connected cyclic component whose poles are known.
pub fn normalize(mut cg: CGraph, poles: Poles) -> Result<NormalizeOutcome, CplanarError> {
    if !cg.map.is_connected() {
        return Err(crate::combmap::MapError::DisconnectedMapRequested(cg.map.components().len()).into());
    }
    let mut prov = Provenance {
        input_vertices: cg.map.vertex_capacity(),
        input_edges: cg.map.edge_capacity(),
        ..Provenance::default()
    };
    if let Some(rej) = contract_clusters(&mut cg, poles.outer, &mut prov)? {
        return Ok(NormalizeOutcome::Rejected(rej));
    }
    let mut poles = poles;
    let faces = cg.map.trace_faces();
    for face in faces {
        let mut handle = face.darts[0];
        loop {
            let walk = cg.map.face_walk(handle);
            let info = cg.classify_face(&walk);
            if conforms(&info) {
                break;
            }
            let run = min_run_of_steps(&info.steps)
                .map_err(|e| CplanarError::Internal(format!("cannot bridge face: {e}")))?;
            let on_outer = walk.darts.contains(&poles.outer);
            let on_inner = walk.darts.contains(&poles.inner);
            let sub = subdivide_face(&mut cg, &walk, &run)?;
            handle = sub.f_prime;
            if on_outer {
                poles.outer = handle;
            }
            if on_inner {
                poles.inner = handle;
            }
            prov.subdivisions.push(sub.record);
        }
    }
    let ncg = NormalizedCGraph { cg, poles, provenance: prov };
    check_normalized(&ncg)?;
    Ok(NormalizeOutcome::Normalized(ncg))
}

/// Verifies connectivity, independent clusters, conforming faces, simple
/// poles and that the poles are the only faces of nonzero height.
pub fn check_normalized(ncg: &NormalizedCGraph) -> Result<(), CplanarError> {
    let cg = &ncg.cg;
    let bad = |m: String| Err(CplanarError::Internal(m));
    if !cg.map.is_connected() {
        return bad("normalized graph is disconnected".into());
    }
    if let Some(e) = cg.map.edges().find(|&e| cg.is_intra(e)) {
        return bad(format!("edge {e} still joins a cluster to itself"));
    }
    let c = cg.c as i64;
    let outer = cg.map.face_walk(ncg.poles.outer);
    let inner = cg.map.face_walk(ncg.poles.inner);
    for f in cg.map.trace_faces() {
        let info = cg.classify_face(&f);
        let is_outer = f.darts.contains(&ncg.poles.outer);
        let is_inner = f.darts.contains(&ncg.poles.inner);
        let expected = if is_outer { c } else if is_inner { -c } else { 0 };
        if info.height != expected {
            return bad(format!("face has height {} instead of {expected}", info.height));
        }
        let ok = if is_outer || is_inner {
            info.class == FaceClass::Simple
        } else {
            conforms(&info)
        };
        if !ok {
            return bad(format!("face of height {} is {:?}", info.height, info.class));
        }
    }
    if outer.darts.contains(&ncg.poles.inner) || inner.darts.contains(&ncg.poles.outer) {
        return bad("both poles are the same face".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmodel::tests::cycle;
    use crate::cmodel::PoleSelection;
    use crate::combmap::CombMap;

    fn steps_of(levels: &[i64]) -> Vec<i64> {
        let n = levels.len();
        (0..n).map(|k| levels[(k + 1) % n] - levels[k]).collect()
    }

    #[test]
    fn min_run_on_zigzag_face() {
        let run = min_run_of_steps(&steps_of(&[0, 1, 0, -1, 0, 1, 2, 1])).unwrap();
        assert_eq!((run.u, run.v, run.v_prime, run.u_prime, run.h), (0, 1, 2, 7, 1));
        assert_eq!(run.sign, 1);
    }

    #[test]
    fn min_run_descending() {
        let run = min_run_of_steps(&steps_of(&[0, 1, 2, 1, 2, 3, 2, 1])).unwrap();
        assert_eq!((run.u, run.v, run.v_prime, run.u_prime, run.h), (2, 3, 4, 1, 1));
        assert_eq!(run.sign, -1);
    }

    #[test]
    fn min_run_refuses_simple_face() {
        let g = cycle(3, &[0, 1, 2, 0, 2, 1]);
        let f = &g.map.trace_faces()[0];
        assert_eq!(find_min_run(&g, f), Err(NormalizeError::FaceAlreadyConforming));
    }

    /// Builds a graph with one face whose occurrence labels are `labels`
    /// (as cluster indices). The face is the inside of a cycle; the outside
    /// is padded with a winding triangle sharing vertex 0 so that the poles
    /// exist. Returns the graph and a dart of the labelled face.
    fn cycle_face(c: usize, labels: &[usize]) -> (CGraph, Dart) {
        let g = cycle(c, labels);
        let faces = g.map.trace_faces();
        let f = faces
            .iter()
            .find(|f| f.vertices == (0..labels.len()).collect::<Vec<_>>())
            .unwrap_or(&faces[0]);
        let d = f.darts[0];
        (g, d)
    }

    #[test]
    fn subdivision_of_zigzag_face() {
        // Levels 0,1,0,-1,0,1,2,1 with c = 3.
        let labels = [0usize, 1, 0, 2, 0, 1, 2, 1];
        let (mut g, d) = cycle_face(3, &labels);
        let walk = g.map.face_walk(d);
        let lifts = g.gamma_f_labels(&walk).unwrap();
        assert_eq!(g.classify_face(&walk).class, FaceClass::Other);
        let run = find_min_run(&g, &walk).unwrap();
        let sub = subdivide_face(&mut g, &walk, &run).unwrap();
        assert_eq!(sub.record.h, 1);
        assert!(sub.record.vertices.is_empty());
        let f2 = g.classify_face(&g.map.face_walk(sub.f_dprime));
        assert_eq!(f2.class, FaceClass::SemiSimple);
        assert_eq!(f2.walk.len(), 4);
        let f1 = g.classify_face(&g.map.face_walk(sub.f_prime));
        assert_eq!(f1.class, FaceClass::Simple);
        assert_eq!(f1.walk.len(), 6);
        // The shorter face carries the same level pattern up to rotation.
        let mut pattern = f2.lifts.clone();
        let m = *pattern.iter().min().unwrap();
        pattern.iter_mut().for_each(|x| *x -= m);
        assert_eq!(pattern.iter().filter(|&&x| x == 0).count(), 2);
        if lifts == vec![0, 1, 0, -1, 0, 1, 2, 1] {
            assert_eq!(walk.vertices[run.v_prime], 2);
            assert_eq!(walk.vertices[run.u_prime], 7);
        }
        g.map.check_spherical().unwrap();
    }

    #[test]
    fn long_run_gets_internal_vertices() {
        // Levels 0,1,2,3,2,1,0,1,2,3,4,5,4,3,2,1 are not all usable on a
        // plain cycle with c = 3 (the face must have height 0): levels
        // 0..3..0..5..0 reduced mod 3.
        let levels: Vec<i64> = vec![0, 1, 2, 3, 2, 1, 0, 1, 2, 3, 4, 5, 4, 3, 2, 1];
        let labels: Vec<usize> = levels.iter().map(|l| l.rem_euclid(5) as usize).collect();
        let (mut g, d) = cycle_face(5, &labels);
        let walk = g.map.face_walk(d);
        let run = find_min_run(&g, &walk).unwrap();
        assert_eq!(run.h, 3);
        let sub = subdivide_face(&mut g, &walk, &run).unwrap();
        assert_eq!(sub.record.vertices.len(), 2);
        let from = sub.record.from;
        let w = &sub.record.vertices;
        let s = run.sign;
        assert_eq!(g.gamma[w[0]] as i64, (g.gamma[from] as i64 + s).rem_euclid(5));
        assert_eq!(g.gamma[w[1]] as i64, (g.gamma[from] as i64 + 2 * s).rem_euclid(5));
        g.map.check_spherical().unwrap();
    }

    fn poles_of(g: &CGraph) -> Poles {
        match g.select_poles() {
            PoleSelection::Poles(p) => p,
            other => panic!("no poles: {other:?}"),
        }
    }

    #[test]
    fn triangle_is_already_normal() {
        let g = cycle(3, &[0, 1, 2]);
        let p = poles_of(&g);
        match normalize(g.clone(), p).unwrap() {
            NormalizeOutcome::Normalized(n) => {
                assert_eq!(n.cg.map, g.map);
                assert!(n.provenance.contractions.is_empty());
                assert!(n.provenance.subdivisions.is_empty());
            }
            NormalizeOutcome::Rejected(r) => panic!("{r:?}"),
        }
    }

    /// Triangle 0,1,2 with a pendant cluster-0 vertex hanging off vertex 0.
    #[test]
    fn pendant_intra_edge_is_contracted() {
        let map = CombMap::new(
            4,
            &[(0, 1), (1, 2), (2, 0), (0, 3)],
            &[vec![Dart(0), Dart(6), Dart(5)], vec![Dart(2), Dart(1)], vec![Dart(4), Dart(3)], vec![Dart(7)]],
        )
        .unwrap();
        let g = CGraph::new(map, 3, vec![0, 1, 2, 0]).unwrap();
        let p = poles_of(&g);
        match normalize(g, p).unwrap() {
            NormalizeOutcome::Normalized(n) => {
                assert_eq!(n.cg.map.vertex_count(), 3);
                assert_eq!(n.cg.map.edge_count(), 3);
                assert_eq!(n.provenance.contractions.len(), 1);
            }
            NormalizeOutcome::Rejected(r) => panic!("{r:?}"),
        }
    }

    /// A cluster-0 triangle (vertices 0, 3, 4) enclosing a cluster-1 vertex
    /// that hangs off vertex 3; vertex 0 is also on a winding triangle.
    #[test]
    fn enclosing_cluster_cycle_is_rejected() {
        // Edges: 0:(0,1) 1:(1,2) 2:(2,0)  winding triangle
        //        3:(0,3) 4:(3,4) 5:(4,0)  cluster-0 triangle
        //        6:(3,5)                  cluster-1 vertex inside it
        let edges = [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0), (3, 5)];
        let rot = vec![
            vec![Dart(0), Dart(5), Dart(6), Dart(11)],
            vec![Dart(2), Dart(1)],
            vec![Dart(4), Dart(3)],
            vec![Dart(8), Dart(12), Dart(7)],
            vec![Dart(10), Dart(9)],
            vec![Dart(13)],
        ];
        let inside = CombMap::new(6, &edges, &rot).unwrap();
        let rot_out = vec![
            vec![Dart(0), Dart(5), Dart(6), Dart(11)],
            vec![Dart(2), Dart(1)],
            vec![Dart(4), Dart(3)],
            vec![Dart(8), Dart(7), Dart(12)],
            vec![Dart(10), Dart(9)],
            vec![Dart(13)],
        ];
        let outside = CombMap::new(6, &edges, &rot_out).unwrap();
        let gamma = vec![0, 1, 2, 0, 0, 1];
        let mut verdicts = Vec::new();
        for map in [inside, outside] {
            let g = CGraph::new(map, 3, gamma.clone()).unwrap();
            let p = poles_of(&g);
            verdicts.push(matches!(normalize(g, p).unwrap(), NormalizeOutcome::Rejected(_)));
        }
        // Exactly one of the two placements puts vertex 5 inside the cycle
        // (the side without the winding triangle).
        assert_eq!(verdicts.iter().filter(|&&r| r).count(), 1);
    }

    /// A cluster-0 triangle hanging off the winding triangle, with nothing
    /// inside: contracting it leaves one loop, which is deleted.
    #[test]
    fn empty_cluster_cycle_is_removed() {
        let edges = [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)];
        let rot = vec![
            vec![Dart(0), Dart(5), Dart(6), Dart(11)],
            vec![Dart(2), Dart(1)],
            vec![Dart(4), Dart(3)],
            vec![Dart(8), Dart(7)],
            vec![Dart(10), Dart(9)],
        ];
        let g = CGraph::new(CombMap::new(5, &edges, &rot).unwrap(), 3, vec![0, 1, 2, 0, 0]).unwrap();
        let p = poles_of(&g);
        match normalize(g, p).unwrap() {
            NormalizeOutcome::Normalized(n) => {
                assert_eq!(n.cg.map.vertex_count(), 3);
                assert_eq!(n.cg.map.edge_count(), 3);
                assert_eq!(n.provenance.contractions.len(), 2);
                assert_eq!(n.provenance.deleted_loops.len(), 1);
            }
            NormalizeOutcome::Rejected(r) => panic!("{r:?}"),
        }
    }
}

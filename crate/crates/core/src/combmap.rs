//! Dart-based combinatorial maps (rotation systems) on the sphere.
//!
//! Edge `e` owns the darts `2e` (leaving endpoint 0) and `2e + 1` (leaving
//! endpoint 1). Each vertex stores its darts in a doubly linked cyclic list in
//! counterclockwise order. Vertex, edge and dart ids are never reused: edits
//! kill ids instead of renumbering, so ids handed out before an edit keep
//! referring to the same objects afterwards.
//!
//! Faces are traced with a single fixed rule: the dart following `d` on its
//! facial walk is the rotation predecessor of `twin(d)` at `head(d)`.

use std::collections::VecDeque;
use std::fmt;

use petgraph::unionfind::UnionFind;
use thiserror::Error;

const DEAD: usize = usize::MAX;

/// A directed half of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct Dart(pub usize);

impl Dart {
    /// The dart of `edge` leaving its endpoint `end` (0 or 1).
    #[inline]
    pub fn of_edge(edge: usize, end: usize) -> Dart {
        debug_assert!(end < 2);
        Dart(2 * edge + end)
    }

    #[inline]
    pub fn edge(self) -> usize {
        self.0 >> 1
    }

    #[inline]
    pub fn twin(self) -> Dart {
        Dart(self.0 ^ 1)
    }

    /// Which endpoint of its edge this dart leaves (0 or 1).
    #[inline]
    pub fn end(self) -> usize {
        self.0 & 1
    }
}

impl fmt::Display for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("malformed rotation: {0}")]
    MalformedRotation(String),
    #[error("map is not spherical: component containing vertex {vertex} has V - E + F = {euler}")]
    NonSpherical { vertex: usize, euler: i64 },
    #[error("operation requires a connected map but found {0} components")]
    DisconnectedMapRequested(usize),
    #[error("edge {0} is a loop and cannot be contracted")]
    LoopContraction(usize),
    #[error("edge {0} is not a loop")]
    NotALoop(usize),
    #[error("edge {0} does not exist")]
    NoSuchEdge(usize),
    #[error("vertex {0} does not exist")]
    NoSuchVertex(usize),
    #[error("occurrence is not on the face: {0}")]
    OccurrenceNotOnFace(String),
    #[error("reference face lies on both sides of loop {0}")]
    ReferenceOnBothSides(usize),
}

/// A closed boundary walk of one face.
///
/// Occurrence `k` is the vertex `tail(darts[k])`, sitting in the wedge between
/// the arriving dart `darts[k - 1]` and the leaving dart `darts[k]`. The
/// leaving dart identifies the wedge in the rotation of that vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FacialWalk {
    pub darts: Vec<Dart>,
    pub vertices: Vec<usize>,
}

impl FacialWalk {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }

    /// Position of `dart` on this walk.
    pub fn position(&self, dart: Dart) -> Option<usize> {
        self.darts.iter().position(|&d| d == dart)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombMap {
    vertex_alive: Vec<bool>,
    vertex_dart: Vec<Option<Dart>>,
    tail: Vec<usize>,
    succ: Vec<Dart>,
    pred: Vec<Dart>,
}

impl CombMap {
    /// Builds and validates a map. Every dart of every edge must appear in
    /// exactly one rotation list, the one of its tail, and each connected
    /// component must satisfy Euler's formula for the sphere.
    pub fn new(
        vertex_count: usize,
        edges: &[(usize, usize)],
        rotation: &[Vec<Dart>],
    ) -> Result<CombMap, MapError> {
        let map = Self::from_parts(vertex_count, edges, rotation)?;
        map.check_spherical()?;
        Ok(map)
    }

    /// Like [`CombMap::new`] but without the genus check.
    pub fn from_parts(
        vertex_count: usize,
        edges: &[(usize, usize)],
        rotation: &[Vec<Dart>],
    ) -> Result<CombMap, MapError> {
        if rotation.len() != vertex_count {
            return Err(MapError::MalformedRotation(format!(
                "{} rotation lists for {} vertices",
                rotation.len(),
                vertex_count
            )));
        }
        let dart_count = 2 * edges.len();
        let mut tail = vec![DEAD; dart_count];
        for (e, &(a, b)) in edges.iter().enumerate() {
            if a >= vertex_count || b >= vertex_count {
                return Err(MapError::MalformedRotation(format!(
                    "edge {e} has endpoint outside 0..{vertex_count}"
                )));
            }
            tail[2 * e] = a;
            tail[2 * e + 1] = b;
        }
        let mut seen = vec![false; dart_count];
        let mut succ = vec![Dart(DEAD); dart_count];
        let mut pred = vec![Dart(DEAD); dart_count];
        let mut vertex_dart = vec![None; vertex_count];
        for (v, rot) in rotation.iter().enumerate() {
            for &d in rot {
                if d.0 >= dart_count {
                    return Err(MapError::MalformedRotation(format!(
                        "vertex {v} lists unknown dart {}",
                        d.0
                    )));
                }
                if seen[d.0] {
                    return Err(MapError::MalformedRotation(format!(
                        "dart {} listed twice",
                        d.0
                    )));
                }
                seen[d.0] = true;
                if tail[d.0] != v {
                    return Err(MapError::MalformedRotation(format!(
                        "dart {} listed at vertex {v} but leaves vertex {}",
                        d.0, tail[d.0]
                    )));
                }
            }
            let k = rot.len();
            for i in 0..k {
                succ[rot[i].0] = rot[(i + 1) % k];
                pred[rot[(i + 1) % k].0] = rot[i];
            }
            vertex_dart[v] = rot.first().copied();
        }
        if let Some(d) = seen.iter().position(|s| !s) {
            return Err(MapError::MalformedRotation(format!(
                "dart {d} missing from rotation of vertex {}",
                tail[d]
            )));
        }
        Ok(CombMap {
            vertex_alive: vec![true; vertex_count],
            vertex_dart,
            tail,
            succ,
            pred,
        })
    }

    /// Number of vertex ids ever allocated, alive or not.
    pub fn vertex_capacity(&self) -> usize {
        self.vertex_alive.len()
    }

    /// Number of edge ids ever allocated, alive or not.
    pub fn edge_capacity(&self) -> usize {
        self.tail.len() / 2
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_alive.iter().filter(|&&a| a).count()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.edge_capacity()).filter(|&e| self.is_edge_alive(e)).count()
    }

    pub fn is_vertex_alive(&self, v: usize) -> bool {
        self.vertex_alive.get(v).copied().unwrap_or(false)
    }

    pub fn is_edge_alive(&self, e: usize) -> bool {
        2 * e < self.tail.len() && self.tail[2 * e] != DEAD
    }

    pub fn is_dart_alive(&self, d: Dart) -> bool {
        d.0 < self.tail.len() && self.tail[d.0] != DEAD
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_capacity()).filter(|&v| self.vertex_alive[v])
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edge_capacity()).filter(|&e| self.is_edge_alive(e))
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> + '_ {
        (0..self.tail.len())
            .map(Dart)
            .filter(|&d| self.is_dart_alive(d))
    }

    #[inline]
    pub fn tail(&self, d: Dart) -> usize {
        self.tail[d.0]
    }

    #[inline]
    pub fn head(&self, d: Dart) -> usize {
        self.tail[d.twin().0]
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        (self.tail[2 * e], self.tail[2 * e + 1])
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (a, b) = self.endpoints(e);
        a == b
    }

    /// Next dart counterclockwise around `tail(d)`.
    #[inline]
    pub fn succ(&self, d: Dart) -> Dart {
        self.succ[d.0]
    }

    /// Next dart clockwise around `tail(d)`.
    #[inline]
    pub fn pred(&self, d: Dart) -> Dart {
        self.pred[d.0]
    }

    /// The dart after `d` on its facial walk.
    #[inline]
    pub fn face_next(&self, d: Dart) -> Dart {
        self.pred[d.twin().0]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotation(v).len()
    }

    /// Counterclockwise rotation at `v`, starting from its stored first dart.
    pub fn rotation(&self, v: usize) -> Vec<Dart> {
        let mut out = Vec::new();
        if let Some(start) = self.vertex_dart.get(v).copied().flatten() {
            let mut d = start;
            loop {
                out.push(d);
                d = self.succ[d.0];
                if d == start {
                    break;
                }
            }
        }
        out
    }

    /// Rotation at `v` rotated so that it starts at its smallest dart.
    pub fn canonical_rotation(&self, v: usize) -> Vec<Dart> {
        let mut rot = self.rotation(v);
        if let Some(i) = rot.iter().enumerate().min_by_key(|(_, d)| **d).map(|(i, _)| i) {
            rot.rotate_left(i);
        }
        rot
    }

    /// The facial walk containing `start`, beginning at `start`.
    pub fn face_walk(&self, start: Dart) -> FacialWalk {
        let mut darts = Vec::new();
        let mut d = start;
        loop {
            darts.push(d);
            d = self.face_next(d);
            if d == start {
                break;
            }
        }
        let vertices = darts.iter().map(|&d| self.tail(d)).collect();
        FacialWalk { darts, vertices }
    }

    /// All facial walks, ordered by their smallest dart; each walk starts
    /// at its smallest dart.
    pub fn trace_faces(&self) -> Vec<FacialWalk> {
        let mut visited = vec![false; self.tail.len()];
        let mut faces = Vec::new();
        for d in self.darts() {
            if visited[d.0] {
                continue;
            }
            let walk = self.face_walk(d);
            for &x in &walk.darts {
                visited[x.0] = true;
            }
            faces.push(walk);
        }
        faces
    }

    /// For each dart id, the index of its face in `faces` (`usize::MAX` for
    /// dead darts).
    pub fn face_index(&self, faces: &[FacialWalk]) -> Vec<usize> {
        let mut idx = vec![DEAD; self.tail.len()];
        for (i, f) in faces.iter().enumerate() {
            for &d in &f.darts {
                idx[d.0] = i;
            }
        }
        idx
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.vertex_capacity());
        for e in self.edges() {
            let (a, b) = self.endpoints(e);
            uf.union(a, b);
        }
        let mut slot = vec![DEAD; self.vertex_capacity()];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for v in self.vertices() {
            let r = uf.find_mut(v);
            if slot[r] == DEAD {
                slot[r] = comps.len();
                comps.push(Vec::new());
            }
            comps[slot[r]].push(v);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Checks V - E + F = 2 for every component that has at least one edge.
    pub fn check_spherical(&self) -> Result<(), MapError> {
        let mut uf = UnionFind::new(self.vertex_capacity());
        for e in self.edges() {
            let (a, b) = self.endpoints(e);
            uf.union(a, b);
        }
        let n = self.vertex_capacity();
        let mut chi = vec![0i64; n];
        let mut has_edge = vec![false; n];
        for v in self.vertices() {
            chi[uf.find_mut(v)] += 1;
        }
        for e in self.edges() {
            let r = uf.find_mut(self.tail(Dart::of_edge(e, 0)));
            chi[r] -= 1;
            has_edge[r] = true;
        }
        for f in self.trace_faces() {
            chi[uf.find_mut(self.tail(f.darts[0]))] += 1;
        }
        for v in self.vertices() {
            let r = uf.find_mut(v);
            if r == v && has_edge[r] && chi[r] != 2 {
                return Err(MapError::NonSpherical { vertex: v, euler: chi[r] });
            }
        }
        for v in self.vertices() {
            let r = uf.find_mut(v);
            if has_edge[r] && chi[r] != 2 {
                return Err(MapError::NonSpherical { vertex: v, euler: chi[r] });
            }
        }
        Ok(())
    }

    /// Exhaustive structural self-check: twin involution, rotation membership
    /// and cyclic link consistency. Meant for tests and debugging.
    pub fn debug_validate(&self) -> Result<(), MapError> {
        let bad = |m: String| Err(MapError::MalformedRotation(m));
        let mut seen = vec![false; self.tail.len()];
        for v in 0..self.vertex_capacity() {
            if !self.vertex_alive[v] {
                if self.vertex_dart[v].is_some() {
                    return bad(format!("dead vertex {v} owns darts"));
                }
                continue;
            }
            for d in self.rotation(v) {
                if !self.is_dart_alive(d) {
                    return bad(format!("dead dart {} in rotation of {v}", d.0));
                }
                if self.tail(d) != v {
                    return bad(format!("dart {} in rotation of {v} has tail {}", d.0, self.tail(d)));
                }
                if seen[d.0] {
                    return bad(format!("dart {} appears twice", d.0));
                }
                seen[d.0] = true;
                if self.pred[self.succ[d.0].0] != d {
                    return bad(format!("broken links at dart {}", d.0));
                }
            }
        }
        for d in self.darts() {
            if d.twin().twin() != d || !self.is_dart_alive(d.twin()) {
                return bad(format!("twin of dart {} is not alive", d.0));
            }
            if !seen[d.0] {
                return bad(format!("dart {} is in no rotation", d.0));
            }
            if !self.vertex_alive[self.tail(d)] {
                return bad(format!("dart {} leaves dead vertex", d.0));
            }
        }
        Ok(())
    }

    /// Adds an isolated vertex and returns its id.
    pub fn add_vertex(&mut self) -> usize {
        self.vertex_alive.push(true);
        self.vertex_dart.push(None);
        self.vertex_alive.len() - 1
    }

    fn alloc_edge(&mut self, a: usize, b: usize) -> usize {
        let e = self.edge_capacity();
        self.tail.push(a);
        self.tail.push(b);
        self.succ.push(Dart(DEAD));
        self.succ.push(Dart(DEAD));
        self.pred.push(Dart(DEAD));
        self.pred.push(Dart(DEAD));
        e
    }

    /// Inserts `new` right after `anchor` (counterclockwise) at `tail(anchor)`.
    fn link_after(&mut self, anchor: Dart, new: Dart) {
        let next = self.succ[anchor.0];
        self.succ[anchor.0] = new;
        self.pred[new.0] = anchor;
        self.succ[new.0] = next;
        self.pred[next.0] = new;
    }

    fn link_alone(&mut self, v: usize, new: Dart) {
        self.succ[new.0] = new;
        self.pred[new.0] = new;
        self.vertex_dart[v] = Some(new);
    }

    fn unlink(&mut self, d: Dart) {
        let v = self.tail[d.0];
        let (p, s) = (self.pred[d.0], self.succ[d.0]);
        if s == d {
            self.vertex_dart[v] = None;
        } else {
            self.succ[p.0] = s;
            self.pred[s.0] = p;
            if self.vertex_dart[v] == Some(d) {
                self.vertex_dart[v] = Some(s);
            }
        }
    }

    /// Adds an edge from `a` to `b`, placing its darts right after the given
    /// anchors (or as the only dart when the vertex is isolated). The caller
    /// is responsible for the anchors lying on a common face.
    pub(crate) fn add_edge_raw(
        &mut self,
        a: usize,
        anchor_a: Option<Dart>,
        b: usize,
        anchor_b: Option<Dart>,
    ) -> usize {
        let e = self.alloc_edge(a, b);
        let (da, db) = (Dart::of_edge(e, 0), Dart::of_edge(e, 1));
        match anchor_a {
            Some(x) => self.link_after(x, da),
            None => self.link_alone(a, da),
        }
        match anchor_b {
            Some(y) => self.link_after(y, db),
            None if a == b => self.link_after(da, db),
            None => self.link_alone(b, db),
        }
        e
    }

    /// Inserts a chord whose ends sit in the wedges keyed by the leaving
    /// darts `wedge_a` and `wedge_b`. Both wedges must belong to the same face.
    /// The new edge runs from `tail(wedge_a)` (endpoint 0) to `tail(wedge_b)`.
    pub fn insert_chord_at(&mut self, wedge_a: Dart, wedge_b: Dart) -> Result<usize, MapError> {
        if !self.is_dart_alive(wedge_a) || !self.is_dart_alive(wedge_b) {
            return Err(MapError::OccurrenceNotOnFace("dead wedge dart".into()));
        }
        if wedge_a == wedge_b {
            return Err(MapError::OccurrenceNotOnFace(
                "chord endpoints are the same occurrence".into(),
            ));
        }
        let mut d = self.face_next(wedge_a);
        while d != wedge_a && d != wedge_b {
            d = self.face_next(d);
        }
        if d != wedge_b {
            return Err(MapError::OccurrenceNotOnFace(format!(
                "wedges {} and {} lie on different faces",
                wedge_a, wedge_b
            )));
        }
        Ok(self.insert_chord_unchecked(wedge_a, wedge_b))
    }

    /// [`CombMap::insert_chord_at`] without the same-face check.
    pub(crate) fn insert_chord_unchecked(&mut self, wedge_a: Dart, wedge_b: Dart) -> usize {
        let (a, b) = (self.tail(wedge_a), self.tail(wedge_b));
        self.add_edge_raw(a, Some(wedge_a), b, Some(wedge_b))
    }

    fn check_current(&self, face: &FacialWalk) -> Result<(), MapError> {
        let n = face.darts.len();
        for i in 0..n {
            let d = face.darts[i];
            if !self.is_dart_alive(d) || self.face_next(d) != face.darts[(i + 1) % n] {
                return Err(MapError::OccurrenceNotOnFace(
                    "face handle is stale (the map was edited since it was traced)".into(),
                ));
            }
        }
        Ok(())
    }

    /// Inserts a chord inside `face` between occurrences `occ_a` and `occ_b`.
    /// Splits the face in two. Returns the new edge id.
    pub fn insert_chord(
        &mut self,
        face: &FacialWalk,
        occ_a: usize,
        occ_b: usize,
    ) -> Result<usize, MapError> {
        self.check_current(face)?;
        if occ_a >= face.len() || occ_b >= face.len() {
            return Err(MapError::OccurrenceNotOnFace(format!(
                "occurrence index out of range for a face of length {}",
                face.len()
            )));
        }
        if occ_a == occ_b {
            return Err(MapError::OccurrenceNotOnFace(
                "chord endpoints are the same occurrence".into(),
            ));
        }
        Ok(self.insert_chord_unchecked(face.darts[occ_a], face.darts[occ_b]))
    }

    /// Splits edge `e` by a new degree-two vertex `w`: afterwards `e` runs
    /// from its old endpoint 0 to `w` and the returned edge from `w` to the
    /// old endpoint 1.
    pub fn subdivide_edge(&mut self, e: usize) -> Result<(usize, usize), MapError> {
        if !self.is_edge_alive(e) {
            return Err(MapError::NoSuchEdge(e));
        }
        let d1 = Dart::of_edge(e, 1);
        let b = self.tail(d1);
        let w = self.add_vertex();
        let f = self.alloc_edge(w, b);
        let (f0, f1) = (Dart::of_edge(f, 0), Dart::of_edge(f, 1));
        // f1 takes d1's place at b.
        if self.succ[d1.0] == d1 {
            self.link_alone(b, f1);
        } else {
            self.link_after(d1, f1);
            self.unlink(d1);
        }
        self.tail[d1.0] = w;
        self.link_alone(w, d1);
        self.link_after(d1, f0);
        Ok((w, f))
    }

    /// Inserts a path with `k` internal vertices inside `face`, from
    /// occurrence `occ_a` to occurrence `occ_b`. Returns the internal
    /// vertices and the path edges, both in order from `occ_a`.
    pub fn insert_path(
        &mut self,
        face: &FacialWalk,
        occ_a: usize,
        occ_b: usize,
        k: usize,
    ) -> Result<(Vec<usize>, Vec<usize>), MapError> {
        let e = self.insert_chord(face, occ_a, occ_b)?;
        Ok(self.subdivide_chain(e, k))
    }

    pub(crate) fn subdivide_chain(&mut self, e: usize, k: usize) -> (Vec<usize>, Vec<usize>) {
        let mut verts = Vec::with_capacity(k);
        let mut edges = vec![e];
        let mut last = e;
        for _ in 0..k {
            let (w, f) = self.subdivide_edge(last).expect("edge just created");
            verts.push(w);
            edges.push(f);
            last = f;
        }
        (verts, edges)
    }

    /// Contracts the non-loop edge `e`, merging its endpoints into `keep`
    /// (which must be one of them). The merged rotation is the splice of the
    /// two rotations at the removed darts.
    pub fn contract_edge_into(&mut self, e: usize, keep: usize) -> Result<(), MapError> {
        if !self.is_edge_alive(e) {
            return Err(MapError::NoSuchEdge(e));
        }
        let (a, b) = self.endpoints(e);
        if a == b {
            return Err(MapError::LoopContraction(e));
        }
        if keep != a && keep != b {
            return Err(MapError::NoSuchVertex(keep));
        }
        let (du, dv) = if keep == a {
            (Dart::of_edge(e, 0), Dart::of_edge(e, 1))
        } else {
            (Dart::of_edge(e, 1), Dart::of_edge(e, 0))
        };
        let gone = self.tail(dv);
        let (a1, ak) = (self.succ[du.0], self.pred[du.0]);
        let (b1, bm) = (self.succ[dv.0], self.pred[dv.0]);
        let moved: Vec<Dart> = if b1 == dv {
            Vec::new()
        } else {
            let mut v = Vec::new();
            let mut d = b1;
            while d != dv {
                v.push(d);
                d = self.succ[d.0];
            }
            v
        };
        match (a1 == du, b1 == dv) {
            (true, true) => self.vertex_dart[keep] = None,
            (true, false) => {
                self.succ[bm.0] = b1;
                self.pred[b1.0] = bm;
                self.vertex_dart[keep] = Some(b1);
            }
            (false, true) => {
                self.succ[ak.0] = a1;
                self.pred[a1.0] = ak;
                self.vertex_dart[keep] = Some(a1);
            }
            (false, false) => {
                self.succ[ak.0] = b1;
                self.pred[b1.0] = ak;
                self.succ[bm.0] = a1;
                self.pred[a1.0] = bm;
                self.vertex_dart[keep] = Some(a1);
            }
        }
        for d in moved {
            self.tail[d.0] = keep;
        }
        self.kill_edge(e);
        self.vertex_alive[gone] = false;
        self.vertex_dart[gone] = None;
        Ok(())
    }

    /// Contracts `e` into its endpoint of larger degree; returns the
    /// surviving vertex.
    pub fn contract_edge(&mut self, e: usize) -> Result<usize, MapError> {
        if !self.is_edge_alive(e) {
            return Err(MapError::NoSuchEdge(e));
        }
        let (a, b) = self.endpoints(e);
        if a == b {
            return Err(MapError::LoopContraction(e));
        }
        let keep = if self.degree(b) > self.degree(a) { b } else { a };
        self.contract_edge_into(e, keep)?;
        Ok(keep)
    }

    fn kill_edge(&mut self, e: usize) {
        for s in 0..2 {
            let d = Dart::of_edge(e, s);
            self.tail[d.0] = DEAD;
            self.succ[d.0] = Dart(DEAD);
            self.pred[d.0] = Dart(DEAD);
        }
    }

    pub fn delete_edge(&mut self, e: usize) -> Result<(), MapError> {
        if !self.is_edge_alive(e) {
            return Err(MapError::NoSuchEdge(e));
        }
        self.unlink(Dart::of_edge(e, 0));
        self.unlink(Dart::of_edge(e, 1));
        self.kill_edge(e);
        Ok(())
    }

    /// Splits the faces around loop `loop_edge` into its two sides and
    /// returns the faces (indices into `trace_faces()`) and vertices on the
    /// side that does not contain `reference`. The loop's base vertex is
    /// never reported.
    pub fn region_partition(
        &self,
        loop_edge: usize,
        reference: Dart,
    ) -> Result<(Vec<usize>, Vec<usize>), MapError> {
        if !self.is_edge_alive(loop_edge) {
            return Err(MapError::NoSuchEdge(loop_edge));
        }
        if !self.is_loop(loop_edge) {
            return Err(MapError::NotALoop(loop_edge));
        }
        let faces = self.trace_faces();
        let fidx = self.face_index(&faces);
        let side = |start: usize| -> Vec<bool> {
            let mut seen = vec![false; faces.len()];
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(f) = queue.pop_front() {
                for &d in &faces[f].darts {
                    if d.edge() == loop_edge {
                        continue;
                    }
                    let g = fidx[d.twin().0];
                    if !seen[g] {
                        seen[g] = true;
                        queue.push_back(g);
                    }
                }
            }
            seen
        };
        let s0 = side(fidx[Dart::of_edge(loop_edge, 0).0]);
        let s1 = side(fidx[Dart::of_edge(loop_edge, 1).0]);
        let r = fidx[reference.0];
        let inner = match (s0[r], s1[r]) {
            (true, true) => return Err(MapError::ReferenceOnBothSides(loop_edge)),
            (true, false) => s1,
            (false, true) => s0,
            (false, false) => {
                return Err(MapError::OccurrenceNotOnFace(
                    "reference face is in another component".into(),
                ))
            }
        };
        let base = self.tail(Dart::of_edge(loop_edge, 0));
        let face_list: Vec<usize> = (0..faces.len()).filter(|&f| inner[f]).collect();
        let mut verts: Vec<usize> = face_list
            .iter()
            .flat_map(|&f| faces[f].vertices.iter().copied())
            .filter(|&v| v != base)
            .collect();
        verts.sort_unstable();
        verts.dedup();
        Ok((face_list, verts))
    }

    /// Copies the sub-map induced by the sorted vertex set `keep` (which must
    /// be a union of components), renumbering vertices and edges compactly.
    /// Returns the sub-map, the old id of every new vertex and the old id of
    /// every new edge.
    pub fn restrict(&self, keep: &[usize]) -> (CombMap, Vec<usize>, Vec<usize>) {
        let mut new_vertex = vec![DEAD; self.vertex_capacity()];
        for (i, &v) in keep.iter().enumerate() {
            new_vertex[v] = i;
        }
        let edge_ids: Vec<usize> = self
            .edges()
            .filter(|&e| new_vertex[self.endpoints(e).0] != DEAD)
            .collect();
        let mut new_edge = vec![DEAD; self.edge_capacity()];
        for (i, &e) in edge_ids.iter().enumerate() {
            new_edge[e] = i;
        }
        let edges: Vec<(usize, usize)> = edge_ids
            .iter()
            .map(|&e| {
                let (a, b) = self.endpoints(e);
                (new_vertex[a], new_vertex[b])
            })
            .collect();
        let rotation: Vec<Vec<Dart>> = keep
            .iter()
            .map(|&v| {
                self.rotation(v)
                    .into_iter()
                    .map(|d| Dart::of_edge(new_edge[d.edge()], d.end()))
                    .collect()
            })
            .collect();
        let map = CombMap::from_parts(keep.len(), &edges, &rotation)
            .expect("restriction of a valid map is valid");
        (map, keep.to_vec(), edge_ids)
    }

    /// Edge endpoint list and rotation lists of a compact map (no dead ids).
    pub fn to_parts(&self) -> (usize, Vec<(usize, usize)>, Vec<Vec<Dart>>) {
        let edges = (0..self.edge_capacity()).map(|e| self.endpoints(e)).collect();
        let rot = (0..self.vertex_capacity()).map(|v| self.rotation(v)).collect();
        (self.vertex_capacity(), edges, rot)
    }

    /// Rebuilds the map with dead vertices and edges dropped. Returns the
    /// compact map together with the old id of each new vertex and edge.
    pub fn compacted(&self) -> (CombMap, Vec<usize>, Vec<usize>) {
        let keep: Vec<usize> = self.vertices().collect();
        self.restrict(&keep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(i: usize) -> Dart {
        Dart(i)
    }

    pub(crate) fn triangle() -> CombMap {
        CombMap::new(
            3,
            &[(0, 1), (1, 2), (2, 0)],
            &[vec![d(0), d(5)], vec![d(2), d(1)], vec![d(4), d(3)]],
        )
        .unwrap()
    }

    fn path3() -> CombMap {
        CombMap::new(3, &[(0, 1), (1, 2)], &[vec![d(0)], vec![d(1), d(2)], vec![d(3)]]).unwrap()
    }

    #[test]
    fn dart_twin_involution() {
        for i in 0..20 {
            assert_eq!(Dart(i).twin().twin(), Dart(i));
            assert_eq!(Dart(i).twin().edge(), Dart(i).edge());
        }
    }

    #[test]
    fn triangle_has_two_faces() {
        let m = triangle();
        let faces = m.trace_faces();
        assert_eq!(faces.len(), 2);
        assert!(faces.iter().all(|f| f.len() == 3));
        for dd in m.darts() {
            assert_eq!(m.tail(dd.twin()), m.head(dd));
        }
    }

    #[test]
    fn single_edge_has_one_face_of_length_two() {
        let m = CombMap::new(2, &[(0, 1)], &[vec![d(0)], vec![d(1)]]).unwrap();
        let faces = m.trace_faces();
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].len(), 2);
    }

    #[test]
    fn path_face_visits_middle_twice() {
        let faces = path3().trace_faces();
        assert_eq!(faces.len(), 1);
        assert_eq!(faces[0].len(), 4);
        assert_eq!(faces[0].vertices.iter().filter(|&&v| v == 1).count(), 2);
    }

    #[test]
    fn bouquet_has_two_unit_faces() {
        let m = CombMap::new(1, &[(0, 0)], &[vec![d(0), d(1)]]).unwrap();
        let faces = m.trace_faces();
        assert_eq!(faces.len(), 2);
        assert!(faces.iter().all(|f| f.len() == 1));
    }

    #[test]
    fn malformed_rotations_are_rejected() {
        let missing = CombMap::new(2, &[(0, 1)], &[vec![d(0)], vec![]]);
        assert!(matches!(missing, Err(MapError::MalformedRotation(_))));
        let misplaced = CombMap::new(2, &[(0, 1)], &[vec![d(1)], vec![d(0)]]);
        assert!(matches!(misplaced, Err(MapError::MalformedRotation(_))));
        let twice = CombMap::new(2, &[(0, 1)], &[vec![d(0), d(0)], vec![d(1)]]);
        assert!(matches!(twice, Err(MapError::MalformedRotation(_))));
    }

    /// Enumerates every rotation system of K4 and checks that exactly the
    /// ones with V - E + F = 2 are accepted.
    #[test]
    fn k4_rotation_systems_by_euler_count() {
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let mut at: Vec<Vec<Dart>> = vec![Vec::new(); 4];
        for (e, &(a, b)) in edges.iter().enumerate() {
            at[a].push(Dart::of_edge(e, 0));
            at[b].push(Dart::of_edge(e, 1));
        }
        // Each vertex has degree 3: two cyclic orders each.
        let orders = |v: &Vec<Dart>| vec![v.clone(), vec![v[0], v[2], v[1]]];
        let mut planar = 0;
        let mut rejected = 0;
        for r0 in orders(&at[0]) {
            for r1 in orders(&at[1]) {
                for r2 in orders(&at[2]) {
                    for r3 in orders(&at[3]) {
                        let rot = vec![r0.clone(), r1.clone(), r2.clone(), r3.clone()];
                        let raw = CombMap::from_parts(4, &edges, &rot).unwrap();
                        let f = raw.trace_faces().len() as i64;
                        let euler = 4 - 6 + f;
                        match CombMap::new(4, &edges, &rot) {
                            Ok(_) => {
                                assert_eq!(euler, 2);
                                planar += 1;
                            }
                            Err(MapError::NonSpherical { euler: x, .. }) => {
                                assert_eq!(x, euler);
                                assert_ne!(euler, 2);
                                rejected += 1;
                            }
                            Err(e) => panic!("unexpected {e}"),
                        }
                    }
                }
            }
        }
        // K4 has exactly two spherical embeddings (mirror images).
        assert_eq!(planar, 2);
        assert_eq!(rejected, 14);
    }

    #[test]
    fn contract_path_edge() {
        let mut m = path3();
        m.contract_edge(0).unwrap();
        assert_eq!(m.vertex_count(), 2);
        assert_eq!(m.edge_count(), 1);
        m.debug_validate().unwrap();
    }

    #[test]
    fn contract_triangle_edge_gives_digon() {
        let mut m = triangle();
        m.contract_edge(0).unwrap();
        assert_eq!(m.vertex_count(), 2);
        assert_eq!(m.edge_count(), 2);
        assert_eq!(m.trace_faces().len(), 2);
        m.check_spherical().unwrap();
        m.debug_validate().unwrap();
    }

    #[test]
    fn contracting_a_digon_edge_leaves_a_loop() {
        let mut m = CombMap::new(2, &[(0, 1), (0, 1)], &[vec![d(0), d(2)], vec![d(1), d(3)]]).unwrap();
        m.contract_edge(0).unwrap();
        assert!(m.is_loop(1));
        assert_eq!(m.trace_faces().len(), 2);
        m.check_spherical().unwrap();
    }

    #[test]
    fn loop_contraction_is_an_error() {
        let mut m = CombMap::new(1, &[(0, 0)], &[vec![d(0), d(1)]]).unwrap();
        assert_eq!(m.contract_edge(0), Err(MapError::LoopContraction(0)));
    }

    fn square() -> CombMap {
        // 4-cycle 0-1-2-3.
        CombMap::new(
            4,
            &[(0, 1), (1, 2), (2, 3), (3, 0)],
            &[vec![d(0), d(7)], vec![d(2), d(1)], vec![d(4), d(3)], vec![d(6), d(5)]],
        )
        .unwrap()
    }

    #[test]
    fn chord_splits_square_into_triangles() {
        let mut m = square();
        let face = m.trace_faces().into_iter().next().unwrap();
        assert_eq!(face.len(), 4);
        let a = 0;
        let b = 2;
        m.insert_chord(&face, a, b).unwrap();
        let mut lens: Vec<usize> = m.trace_faces().iter().map(|f| f.len()).collect();
        lens.sort();
        assert_eq!(lens, vec![3, 3, 4]);
        m.check_spherical().unwrap();
        m.debug_validate().unwrap();
    }

    #[test]
    fn second_diagonal_on_stale_face_is_rejected() {
        let mut m = square();
        let face = m.trace_faces().into_iter().next().unwrap();
        m.insert_chord(&face, 0, 2).unwrap();
        let err = m.insert_chord(&face, 1, 3).unwrap_err();
        assert!(matches!(err, MapError::OccurrenceNotOnFace(_)));
        // And the raw wedge form notices the crossing as well.
        let err = m.insert_chord_at(face.darts[1], face.darts[3]).unwrap_err();
        assert!(matches!(err, MapError::OccurrenceNotOnFace(_)));
    }

    #[test]
    fn chord_between_two_occurrences_of_one_vertex_is_a_loop() {
        let mut m = path3();
        let face = m.trace_faces().into_iter().next().unwrap();
        let occ: Vec<usize> = (0..face.len()).filter(|&k| face.vertices[k] == 1).collect();
        let e = m.insert_chord(&face, occ[0], occ[1]).unwrap();
        assert!(m.is_loop(e));
        assert_eq!(m.trace_faces().len(), 2);
        m.check_spherical().unwrap();
    }

    #[test]
    fn path_insertion_counts() {
        let mut m = triangle();
        let face = m.trace_faces().into_iter().next().unwrap();
        let (verts, edges) = m.insert_path(&face, 0, 1, 2).unwrap();
        assert_eq!(verts.len(), 2);
        assert_eq!(edges.len(), 3);
        assert_eq!(m.vertex_count(), 5);
        assert_eq!(m.edge_count(), 6);
        assert_eq!(m.trace_faces().len(), 3);
        m.check_spherical().unwrap();
        m.debug_validate().unwrap();
        for &w in &verts {
            assert_eq!(m.degree(w), 2);
        }
    }

    #[test]
    fn zero_length_path_is_a_chord() {
        let mut a = square();
        let mut b = square();
        let fa = a.trace_faces().remove(0);
        let fb = b.trace_faces().remove(0);
        a.insert_path(&fa, 0, 2, 0).unwrap();
        b.insert_chord(&fb, 0, 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn loop_path_at_one_vertex() {
        let mut m = path3();
        let face = m.trace_faces().into_iter().next().unwrap();
        let occ: Vec<usize> = (0..face.len()).filter(|&k| face.vertices[k] == 1).collect();
        let (verts, _) = m.insert_path(&face, occ[0], occ[1], 1).unwrap();
        assert_eq!(verts.len(), 1);
        assert_eq!(m.trace_faces().len(), 2);
        m.check_spherical().unwrap();
    }

    #[test]
    fn bouquet_sides_are_empty() {
        let m = CombMap::new(1, &[(0, 0)], &[vec![d(0), d(1)]]).unwrap();
        let (faces, verts) = m.region_partition(0, d(0)).unwrap();
        assert_eq!(faces.len(), 1);
        assert!(verts.is_empty());
    }

    /// A loop at vertex 0 with a pendant edge on one side and a pendant
    /// path on the other.
    #[test]
    fn loop_separates_its_two_sides() {
        let m = CombMap::new(
            4,
            &[(0, 0), (0, 1), (0, 2), (2, 3)],
            &[vec![d(0), d(2), d(1), d(4)], vec![d(3)], vec![d(5), d(6)], vec![d(7)]],
        )
        .unwrap();
        assert_eq!(m.trace_faces().len(), 2);
        let (faces, verts) = m.region_partition(0, d(3)).unwrap();
        assert_eq!(faces.len(), 1);
        assert_eq!(verts, vec![2, 3]);
        let (_, verts) = m.region_partition(0, d(7)).unwrap();
        assert_eq!(verts, vec![1]);
        assert_eq!(m.region_partition(1, d(3)), Err(MapError::NotALoop(1)));
    }

    #[test]
    fn restrict_and_compact_renumber() {
        let mut m = triangle();
        m.contract_edge_into(0, 0).unwrap();
        let (c, vs, es) = m.compacted();
        assert_eq!(vs, vec![0, 2]);
        assert_eq!(es, vec![1, 2]);
        c.check_spherical().unwrap();
        assert_eq!(c.trace_faces().len(), 2);
    }

    #[test]
    fn subdivide_keeps_edge_id_on_tail_side() {
        let mut m = triangle();
        let (w, f) = m.subdivide_edge(0).unwrap();
        assert_eq!(m.endpoints(0), (0, w));
        assert_eq!(m.endpoints(f), (w, 1));
        m.check_spherical().unwrap();
        m.debug_validate().unwrap();
    }
}

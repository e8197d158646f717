//! Exhaustive reference test for small instances: searches directly for
//! non-crossing intra-cluster edges, drawn inside faces, that make every
//! cluster of every component connected. Shares nothing with the decision
//! pipeline except the map type and the certificate packaging.

use std::collections::HashSet;

use petgraph::unionfind::UnionFind;

use crate::cmodel::CGraph;
use crate::combmap::{CombMap, Dart};
use crate::construct::{finalize_augmentation, Certificate};
use crate::CplanarError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_vertices: usize,
    /// Search nodes visited before giving up.
    pub max_nodes: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_vertices: 14, max_nodes: 2_000_000 }
    }
}

#[derive(Debug, Clone)]
pub enum OracleVerdict {
    CPlanar(Box<Certificate>),
    NotCPlanar,
    LimitExceeded,
}

impl OracleVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            OracleVerdict::CPlanar(_) => "c-planar",
            OracleVerdict::NotCPlanar => "not-c-planar",
            OracleVerdict::LimitExceeded => "limit-exceeded",
        }
    }
}

/// A chord between occurrences `a < b` of face `face`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Chord {
    face: usize,
    a: usize,
    b: usize,
}

struct Search<'a> {
    cg: &'a CGraph,
    faces: Vec<(Vec<Dart>, Vec<usize>)>,
    chords: Vec<Chord>,
    class: Vec<usize>,
    base: UnionFind<usize>,
    failed: HashSet<Vec<Chord>>,
    nodes: usize,
    max_nodes: usize,
    found: Option<Vec<Chord>>,
}

fn interleave(x: &Chord, y: &Chord) -> bool {
    x.face == y.face && ((x.a < y.a && y.a < x.b && x.b < y.b) || (y.a < x.a && x.a < y.b && y.b < x.b))
}

impl Search<'_> {
    /// `None` when the node budget runs out.
    fn run(&mut self, chosen: &mut Vec<Chord>) -> Option<bool> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return None;
        }
        let mut key = chosen.clone();
        key.sort_unstable();
        if self.failed.contains(&key) {
            return Some(false);
        }
        let mut uf = self.base.clone();
        for ch in chosen.iter() {
            let verts = &self.faces[ch.face].1;
            uf.union(verts[ch.a], verts[ch.b]);
        }
        // Smallest vertex whose class is still split.
        let n = self.class.len();
        let mut root_of_class = std::collections::HashMap::new();
        let mut split = None;
        for v in self.cg.map.vertices() {
            let r = uf.find_mut(v);
            let first = *root_of_class.entry(self.class[v]).or_insert((v, r));
            if first.1 != r {
                split = Some(first.0);
                break;
            }
        }
        let Some(v) = split else {
            self.found = Some(chosen.clone());
            return Some(true);
        };
        debug_assert!(v < n);
        let k = uf.find_mut(v);
        let cluster = self.cg.gamma[v];
        for i in 0..self.chords.len() {
            let ch = self.chords[i];
            let verts = &self.faces[ch.face].1;
            let (x, y) = (verts[ch.a], verts[ch.b]);
            if self.cg.gamma[x] != cluster || (uf.find_mut(x) == k) == (uf.find_mut(y) == k) {
                continue;
            }
            if chosen.iter().any(|c| c == &ch || interleave(c, &ch)) {
                continue;
            }
            chosen.push(ch);
            let r = self.run(chosen);
            chosen.pop();
            match r {
                None => return None,
                Some(true) => return Some(true),
                Some(false) => {}
            }
        }
        self.failed.insert(key);
        Some(false)
    }
}

/// Decides by search whether the clusters can be connected inside each
/// component, and returns a certificate built from the edges found.
pub fn oracle(cg: &CGraph, limits: &OracleLimits) -> Result<OracleVerdict, CplanarError> {
    cg.map.check_spherical()?;
    if cg.map.vertex_count() > limits.max_vertices {
        return Ok(OracleVerdict::LimitExceeded);
    }
    let n = cg.map.vertex_capacity();
    let mut comp = vec![0usize; n];
    for (i, c) in cg.map.components().iter().enumerate() {
        for &v in c {
            comp[v] = i;
        }
    }
    let class: Vec<usize> = (0..n).map(|v| comp[v] * cg.c.max(1) + cg.gamma[v]).collect();
    let mut base = UnionFind::new(n);
    for e in cg.map.edges() {
        if cg.is_intra(e) {
            let (a, b) = cg.map.endpoints(e);
            base.union(a, b);
        }
    }
    let faces: Vec<(Vec<Dart>, Vec<usize>)> =
        cg.map.trace_faces().into_iter().map(|w| (w.darts, w.vertices)).collect();
    let mut chords = Vec::new();
    for (fi, (_, verts)) in faces.iter().enumerate() {
        for a in 0..verts.len() {
            for b in a + 1..verts.len() {
                if verts[a] != verts[b] && cg.gamma[verts[a]] == cg.gamma[verts[b]] {
                    chords.push(Chord { face: fi, a, b });
                }
            }
        }
    }
    let mut s = Search {
        cg,
        faces,
        chords,
        class,
        base,
        failed: HashSet::new(),
        nodes: 0,
        max_nodes: limits.max_nodes,
        found: None,
    };
    match s.run(&mut Vec::new()) {
        None => Ok(OracleVerdict::LimitExceeded),
        Some(false) => Ok(OracleVerdict::NotCPlanar),
        Some(true) => {
            let chosen = s.found.take().unwrap_or_default();
            let map = embed_chords(&cg.map, &s.faces, &chosen)?;
            Ok(OracleVerdict::CPlanar(Box::new(finalize_augmentation(cg, &map)?)))
        }
    }
}

/// Inserts occurrence chords into a copy of `map`. Where earlier chords
/// already split a wedge, the part facing the other endpoint is used.
fn embed_chords(map: &CombMap, faces: &[(Vec<Dart>, Vec<usize>)], chosen: &[Chord]) -> Result<CombMap, CplanarError> {
    let e_in = map.edge_capacity();
    let mut m = map.clone();
    let sub_wedges = |m: &CombMap, d: Dart| {
        let mut keys = vec![d];
        let mut x = m.succ(d);
        while x.edge() >= e_in {
            keys.push(x);
            x = m.succ(x);
        }
        keys
    };
    for ch in chosen {
        let darts = &faces[ch.face].0;
        let (ka, kb) = (sub_wedges(&m, darts[ch.a]), sub_wedges(&m, darts[ch.b]));
        let mut placed = false;
        'outer: for &x in &ka {
            let walk = m.face_walk(x);
            for &y in &kb {
                if walk.darts.contains(&y) {
                    m.insert_chord_at(x, y)?;
                    placed = true;
                    break 'outer;
                }
            }
        }
        if !placed {
            return Err(CplanarError::Internal("oracle chord has no common face".into()));
        }
    }
    Ok(m)
}

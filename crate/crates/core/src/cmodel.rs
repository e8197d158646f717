//! Cluster labels on top of a combinatorial map: the step function, walk
//! heights and winding numbers, pole selection, per-face level lifts and the
//! simple / semi-simple face classes.

use thiserror::Error;

use crate::combmap::{CombMap, Dart, FacialWalk, MapError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("cluster difference {delta} is not a legal step for c = {c}")]
    IllegalDelta { c: usize, delta: i64 },
    #[error("walk is not closed at position {0}")]
    NotClosed(usize),
    #[error("walk height {height} is not divisible by c = {c}")]
    InternalNonDivisible { height: i64, c: usize },
    #[error("face has height {0}; level lifts need height 0")]
    NonZeroHeightFace(i64),
    #[error("edge {edge} joins clusters {a} and {b}, which are not cyclically consecutive")]
    NotCyclic { edge: usize, a: usize, b: usize },
    #[error("no edge joins cluster {0} and cluster {next}", next = .1)]
    MissingInterClusterEdges(usize, usize),
    #[error("cluster count {0} is below 3")]
    ClusterCountTooSmall(usize),
    #[error("vertex {vertex} has cluster {cluster}, outside 0..{c}")]
    ClusterOutOfRange { vertex: usize, cluster: usize, c: usize },
    #[error("{got} cluster labels for {expected} vertices")]
    LabelCount { expected: usize, got: usize },
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Signed level change of one step whose cluster index changes by `delta`.
pub fn g_step(c: usize, delta: i64) -> Result<i64, ModelError> {
    let ci = c as i64;
    match delta {
        0 => Ok(0),
        1 => Ok(1),
        -1 => Ok(-1),
        d if c >= 3 && d == 1 - ci => Ok(1),
        d if c >= 3 && d == ci - 1 => Ok(-1),
        d => Err(ModelError::IllegalDelta { c, delta: d }),
    }
}

/// A map whose vertices carry cluster labels `0..c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CGraph {
    pub map: CombMap,
    pub c: usize,
    /// Cluster of each vertex id (entries of dead vertices are kept).
    pub gamma: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceClass {
    Simple,
    SemiSimple,
    Other,
}

/// A maximal stretch of occurrences at one level that is a local extreme of
/// the walk. Occurrences joined by intra-cluster steps form one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extreme {
    pub occurrences: Vec<usize>,
    pub level: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceInfo {
    pub walk: FacialWalk,
    /// `steps[k]` is the level change from occurrence `k` to `k + 1`.
    pub steps: Vec<i64>,
    pub height: i64,
    pub wn: i64,
    /// Integer level of every occurrence, starting from the cluster of
    /// occurrence 0. On zero-height faces these are the γ_f labels.
    pub lifts: Vec<i64>,
    pub minima: Vec<Extreme>,
    pub maxima: Vec<Extreme>,
    pub class: FaceClass,
}

impl FaceInfo {
    /// Level labels; only defined on zero-height faces.
    pub fn gamma_f(&self) -> Option<&[i64]> {
        (self.height == 0).then_some(self.lifts.as_slice())
    }
}

/// The two faces of nonzero height, identified by one of their darts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Poles {
    /// Face of height `+c`, treated as the outer face.
    pub outer: Dart,
    /// Face of height `-c`.
    pub inner: Dart,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PoleSelection {
    Poles(Poles),
    AllZero,
    /// Face heights that rule out a clustered embedding.
    Reject { heights: Vec<i64> },
}

impl CGraph {
    pub fn new(map: CombMap, c: usize, gamma: Vec<usize>) -> Result<CGraph, ModelError> {
        if gamma.len() != map.vertex_capacity() {
            return Err(ModelError::LabelCount {
                expected: map.vertex_capacity(),
                got: gamma.len(),
            });
        }
        if let Some((v, &g)) = gamma.iter().enumerate().find(|(_, &g)| g >= c) {
            return Err(ModelError::ClusterOutOfRange { vertex: v, cluster: g, c });
        }
        Ok(CGraph { map, c, gamma })
    }

    pub fn add_vertex(&mut self, cluster: usize) -> usize {
        let v = self.map.add_vertex();
        debug_assert_eq!(v, self.gamma.len());
        self.gamma.push(cluster % self.c);
        v
    }

    pub fn is_intra(&self, e: usize) -> bool {
        let (a, b) = self.map.endpoints(e);
        self.gamma[a] == self.gamma[b]
    }

    /// Level change along dart `d`. Panics on an edge that violates the
    /// cyclic condition, so only call it on validated graphs.
    #[inline]
    pub fn step(&self, d: Dart) -> i64 {
        self.try_step(d).expect("edge violates the cyclic condition")
    }

    pub fn try_step(&self, d: Dart) -> Result<i64, ModelError> {
        let delta = self.gamma[self.map.head(d)] as i64 - self.gamma[self.map.tail(d)] as i64;
        g_step(self.c, delta)
    }

    /// Height of a closed walk given by its darts.
    pub fn height_of_walk(&self, darts: &[Dart]) -> Result<i64, ModelError> {
        let n = darts.len();
        let mut h = 0;
        for k in 0..n {
            if self.map.head(darts[k]) != self.map.tail(darts[(k + 1) % n]) {
                return Err(ModelError::NotClosed(k));
            }
            h += self.try_step(darts[k])?;
        }
        Ok(h)
    }

    pub fn winding_number(&self, darts: &[Dart]) -> Result<i64, ModelError> {
        let h = self.height_of_walk(darts)?;
        if h.rem_euclid(self.c as i64) != 0 {
            return Err(ModelError::InternalNonDivisible { height: h, c: self.c });
        }
        Ok(h / self.c as i64)
    }

    pub fn face_height(&self, walk: &FacialWalk) -> i64 {
        walk.darts.iter().map(|&d| self.step(d)).sum()
    }

    /// All faces with their heights.
    pub fn face_heights(&self) -> (Vec<FacialWalk>, Vec<i64>) {
        let faces = self.map.trace_faces();
        let heights = faces.iter().map(|f| self.face_height(f)).collect();
        (faces, heights)
    }

    /// Picks the two pole faces of a connected graph, or explains why there
    /// are none.
    pub fn select_poles(&self) -> PoleSelection {
        let (faces, heights) = self.face_heights();
        let nonzero: Vec<usize> = (0..faces.len()).filter(|&i| heights[i] != 0).collect();
        if nonzero.is_empty() {
            return PoleSelection::AllZero;
        }
        let c = self.c as i64;
        if nonzero.len() == 2 {
            let (a, b) = (nonzero[0], nonzero[1]);
            let (o, i) = if heights[a] == c { (a, b) } else { (b, a) };
            if heights[o] == c && heights[i] == -c {
                return PoleSelection::Poles(Poles {
                    outer: self.inter_cluster_dart(&faces[o]).unwrap_or(faces[o].darts[0]),
                    inner: self.inter_cluster_dart(&faces[i]).unwrap_or(faces[i].darts[0]),
                });
            }
        }
        PoleSelection::Reject { heights: nonzero.iter().map(|&i| heights[i]).collect() }
    }

    /// A dart of the walk whose edge joins two clusters. Such darts survive
    /// every contraction of intra-cluster edges.
    pub fn inter_cluster_dart(&self, walk: &FacialWalk) -> Option<Dart> {
        walk.darts.iter().copied().find(|&d| !self.is_intra(d.edge()))
    }

    /// Level labels of a zero-height face, anchored at the cluster of
    /// occurrence 0.
    pub fn gamma_f_labels(&self, walk: &FacialWalk) -> Result<Vec<i64>, ModelError> {
        let steps: Vec<i64> = walk.darts.iter().map(|&d| self.step(d)).collect();
        let h: i64 = steps.iter().sum();
        if h != 0 {
            return Err(ModelError::NonZeroHeightFace(h));
        }
        Ok(lifts_from(self.gamma[walk.vertices[0]] as i64, &steps))
    }

    pub fn classify_face(&self, walk: &FacialWalk) -> FaceInfo {
        let steps: Vec<i64> = walk.darts.iter().map(|&d| self.step(d)).collect();
        face_info(walk.clone(), steps, self.gamma[walk.vertices[0]] as i64, self.c)
    }

    /// Checks the label range, the cyclic edge condition and that every
    /// pair of consecutive clusters is joined by some edge.
    pub fn validate_cyclic(&self) -> Result<(), Vec<ModelError>> {
        let mut errs = Vec::new();
        let c = self.c;
        if c < 3 {
            return Err(vec![ModelError::ClusterCountTooSmall(c)]);
        }
        for v in self.map.vertices() {
            if self.gamma[v] >= c {
                errs.push(ModelError::ClusterOutOfRange { vertex: v, cluster: self.gamma[v], c });
            }
        }
        if !errs.is_empty() {
            return Err(errs);
        }
        let mut covered = vec![false; c];
        for e in self.map.edges() {
            let (a, b) = self.map.endpoints(e);
            let (ga, gb) = (self.gamma[a], self.gamma[b]);
            if (ga + 1) % c == gb {
                covered[ga] = true;
            } else if (gb + 1) % c == ga {
                covered[gb] = true;
            } else if ga != gb {
                errs.push(ModelError::NotCyclic { edge: e, a: ga, b: gb });
            }
        }
        for (i, &ok) in covered.iter().enumerate() {
            if !ok {
                errs.push(ModelError::MissingInterClusterEdges(i, (i + 1) % c));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(errs)
        }
    }
}

pub(crate) fn lifts_from(start: i64, steps: &[i64]) -> Vec<i64> {
    let mut out = Vec::with_capacity(steps.len());
    let mut l = start;
    for &s in steps {
        out.push(l);
        l += s;
    }
    out
}

/// Local extremes of a cyclic step sequence. Zero steps are skipped, so a
/// run of equal levels between a descent and an ascent is a single minimum.
pub fn extremes(steps: &[i64], lifts: &[i64]) -> (Vec<Extreme>, Vec<Extreme>) {
    let n = steps.len();
    let nz: Vec<usize> = (0..n).filter(|&k| steps[k] != 0).collect();
    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    for (i, &k) in nz.iter().enumerate() {
        let m = nz[(i + 1) % nz.len()];
        if steps[k] == steps[m] {
            continue;
        }
        let mut occ = Vec::new();
        let mut j = (k + 1) % n;
        loop {
            occ.push(j);
            if j == m {
                break;
            }
            j = (j + 1) % n;
        }
        let ext = Extreme { level: lifts[(k + 1) % n], occurrences: occ };
        if steps[k] < 0 {
            minima.push(ext);
        } else {
            maxima.push(ext);
        }
    }
    (minima, maxima)
}

pub fn classify(height: i64, minima: &[Extreme], maxima: &[Extreme]) -> FaceClass {
    if minima.len() <= 1 {
        FaceClass::Simple
    } else if height == 0
        && minima.len() == 2
        && maxima.len() == 2
        && minima[0].level == minima[1].level
        && maxima[0].level == maxima[1].level
    {
        FaceClass::SemiSimple
    } else {
        FaceClass::Other
    }
}

pub(crate) fn face_info(walk: FacialWalk, steps: Vec<i64>, start: i64, c: usize) -> FaceInfo {
    let height: i64 = steps.iter().sum();
    let lifts = lifts_from(start, &steps);
    let (minima, maxima) = extremes(&steps, &lifts);
    let class = classify(height, &minima, &maxima);
    FaceInfo {
        walk,
        height,
        wn: height.div_euclid(c as i64),
        steps,
        lifts,
        minima,
        maxima,
        class,
    }
}

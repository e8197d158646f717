//! The decision core on normalized instances, and the full pipeline from a
//! raw instance to a verdict.

pub mod matching;

use serde::{Deserialize, Serialize};

use crate::cmodel::{CGraph, FaceClass, PoleSelection};
use crate::combmap::{CombMap, Dart};
use crate::construct::{self, Certificate};
use crate::normalize::{self, NormalizeOutcome, NormalizedCGraph};
use crate::{CplanarError, Rejection};

/// Direction of every edge from the lower to the higher cluster in the
/// cyclic order `0 < 1 < ... < c-1 < 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orientation {
    /// `forward[e]` is true when edge `e` points from endpoint 0 to endpoint 1.
    pub forward: Vec<bool>,
    pub in_deg: Vec<usize>,
    pub out_deg: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremeKind {
    Source,
    Sink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FaceNode {
    pub handle: Dart,
    pub pole: bool,
    /// Whether a perfect matching must cover this face.
    pub required: bool,
}

/// Which pole faces join the incidence graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoleRule {
    /// Poles touching at least one sink and at least one source.
    Conjunctive,
    /// Poles touching a sink or a source.
    #[default]
    Disjunctive,
    /// Poles with any local extreme, whether or not it is a sink or source.
    Extremal,
    /// Poles touching a sink or a source, which may stay unmatched.
    Optional,
}

/// Bipartite graph between sinks/sources and the faces that must receive
/// one of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceGraph {
    pub s: Vec<(usize, ExtremeKind)>,
    pub f: Vec<FaceNode>,
    /// Face indices adjacent to each entry of `s`, without repetition.
    pub adj: Vec<Vec<usize>>,
}

impl IncidenceGraph {
    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }
}

/// Pairs `(index into s, index into f)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unsupported {
    /// Every face has height 0, so there are no poles to work from.
    AllZeroWinding,
    /// Two clusters; a different family of algorithms applies.
    TwoClusters,
}

impl std::fmt::Display for Unsupported {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Unsupported::AllZeroWinding => write!(f, "every face has winding number 0"),
            Unsupported::TwoClusters => {
                write!(f, "two clusters are outside the scope of this test (see two-cluster algorithms)")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    CPlanar(Box<Certificate>),
    NotCPlanar(Rejection),
    Unsupported(Unsupported),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::CPlanar(_) => "c-planar",
            Verdict::NotCPlanar(_) => "not-c-planar",
            Verdict::Unsupported(_) => "unsupported",
        }
    }
}

/// Counters collected while deciding; the `*_checks` fields count runtime
/// verifications of invariants that the construction guarantees.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stats {
    pub contractions: usize,
    pub deleted_loops: usize,
    pub subdivisions: usize,
    pub subdivision_vertices: usize,
    pub sources: usize,
    pub sinks: usize,
    pub incidence_faces: usize,
    pub incidence_edges: usize,
    pub elimination_chords: usize,
    pub candidate_chords: usize,
    pub forest_chords: usize,
    pub no_sink_source_checks: usize,
    pub acyclic_checks: usize,
    pub tree_checks: usize,
    pub split_checks: usize,
}

impl Stats {
    pub fn add(&mut self, o: &Stats) {
        self.contractions += o.contractions;
        self.deleted_loops += o.deleted_loops;
        self.subdivisions += o.subdivisions;
        self.subdivision_vertices += o.subdivision_vertices;
        self.sources += o.sources;
        self.sinks += o.sinks;
        self.incidence_faces += o.incidence_faces;
        self.incidence_edges += o.incidence_edges;
        self.elimination_chords += o.elimination_chords;
        self.candidate_chords += o.candidate_chords;
        self.forest_chords += o.forest_chords;
        self.no_sink_source_checks += o.no_sink_source_checks;
        self.acyclic_checks += o.acyclic_checks;
        self.tree_checks += o.tree_checks;
        self.split_checks += o.split_checks;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentStatus {
    CPlanar,
    NotCPlanar,
    Unsupported,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    /// Input ids of the component's vertices.
    pub vertices: Vec<usize>,
    pub status: ComponentStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejection: Option<Rejection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unsupported: Option<Unsupported>,
    pub stats: Stats,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub verdict: Verdict,
    pub components: Vec<ComponentReport>,
    pub stats: Stats,
}

pub fn orient(cg: &CGraph) -> Result<Orientation, CplanarError> {
    let n = cg.map.vertex_capacity();
    let mut o = Orientation {
        forward: vec![false; cg.map.edge_capacity()],
        in_deg: vec![0; n],
        out_deg: vec![0; n],
    };
    for e in cg.map.edges() {
        let s = cg.step(Dart::of_edge(e, 0));
        if s == 0 {
            return Err(CplanarError::Internal(format!("edge {e} lies inside one cluster")));
        }
        let (a, b) = cg.map.endpoints(e);
        let (t, h) = if s > 0 { (a, b) } else { (b, a) };
        o.forward[e] = s > 0;
        o.out_deg[t] += 1;
        o.in_deg[h] += 1;
    }
    Ok(o)
}

/// Sinks and sources in increasing vertex order.
pub fn sinks_sources(cg: &CGraph, o: &Orientation) -> Vec<(usize, ExtremeKind)> {
    cg.map
        .vertices()
        .filter_map(|v| {
            if o.in_deg[v] == 0 {
                Some((v, ExtremeKind::Source))
            } else if o.out_deg[v] == 0 {
                Some((v, ExtremeKind::Sink))
            } else {
                None
            }
        })
        .collect()
}

/// Incidence graph of a normalized instance, with pole faces admitted
/// according to `rule`.
pub fn build_incidence(
    ncg: &NormalizedCGraph,
    o: &Orientation,
    rule: PoleRule,
) -> Result<IncidenceGraph, CplanarError> {
    let cg = &ncg.cg;
    let s = sinks_sources(cg, o);
    let mut slot = vec![usize::MAX; cg.map.vertex_capacity()];
    for (i, &(v, _)) in s.iter().enumerate() {
        slot[v] = i;
    }
    let mut f = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); s.len()];
    for walk in cg.map.trace_faces() {
        let pole = walk.darts.contains(&ncg.poles.outer) || walk.darts.contains(&ncg.poles.inner);
        let info = cg.classify_face(&walk);
        let n = walk.len();
        let mut touched: Vec<usize> = Vec::new();
        let (mut has_sink, mut has_source) = (false, false);
        for k in 0..n {
            let v = walk.vertices[k];
            if slot[v] == usize::MAX {
                continue;
            }
            let (arrive, leave) = (info.steps[(k + n - 1) % n], info.steps[k]);
            match s[slot[v]].1 {
                ExtremeKind::Source => {
                    has_source = true;
                    if (arrive, leave) != (-1, 1) {
                        return Err(CplanarError::Internal(format!(
                            "source {v} is not a local minimum of an incident face"
                        )));
                    }
                }
                ExtremeKind::Sink => {
                    has_sink = true;
                    if (arrive, leave) != (1, -1) {
                        return Err(CplanarError::Internal(format!(
                            "sink {v} is not a local maximum of an incident face"
                        )));
                    }
                }
            }
            touched.push(slot[v]);
        }
        let member = if pole {
            match rule {
                PoleRule::Conjunctive => has_sink && has_source,
                PoleRule::Disjunctive | PoleRule::Optional => has_sink || has_source,
                PoleRule::Extremal => !info.minima.is_empty(),
            }
        } else {
            info.class == FaceClass::SemiSimple
        };
        if !member {
            continue;
        }
        let required = !(pole && rule == PoleRule::Optional);
        let fi = f.len();
        f.push(FaceNode { handle: walk.darts[0], pole, required });
        touched.sort_unstable();
        touched.dedup();
        for si in touched {
            adj[si].push(fi);
        }
    }
    Ok(IncidenceGraph { s, f, adj })
}

/// A matching covering every sink, source and required face, if one
/// exists. Faces that are not required are padded with placeholder
/// partners so that a perfect matching of the padded graph is searched.
pub fn perfect_matching(inc: &IncidenceGraph) -> Option<Matching> {
    if inc.s.len() > inc.f.len() {
        return None;
    }
    let pad = inc.f.len() - inc.s.len();
    let optional: Vec<usize> = (0..inc.f.len()).filter(|&i| !inc.f[i].required).collect();
    if pad > optional.len() {
        return None;
    }
    let mut adj = inc.adj.clone();
    adj.extend(std::iter::repeat_n(optional, pad));
    let m = matching::maximum_matching(adj.len(), inc.f.len(), &adj);
    if m.iter().any(Option::is_none) {
        return None;
    }
    let pairs = m.iter().take(inc.s.len()).enumerate().map(|(l, r)| (l, r.unwrap())).collect();
    Some(Matching { pairs })
}

fn max_matching_size(inc: &IncidenceGraph) -> usize {
    matching::maximum_matching(inc.s.len(), inc.f.len(), &inc.adj)
        .iter()
        .flatten()
        .count()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecideOptions {
    pub pole_rule: PoleRule,
}

pub fn decide(cg: &CGraph) -> Result<Verdict, CplanarError> {
    decide_with_report(cg).map(|r| r.verdict)
}

pub fn decide_with_report(cg: &CGraph) -> Result<Report, CplanarError> {
    decide_with_options(cg, DecideOptions::default())
}

enum ComponentOutcome {
    /// Augmented component map: input edges first, then added edges.
    CPlanar(CombMap),
    NotCPlanar(Rejection),
    Unsupported(Unsupported),
}

/// Runs the full pipeline and reports per-component outcomes. A disconnected
/// instance is c-planar exactly when each component is.
pub fn decide_with_options(cg: &CGraph, opts: DecideOptions) -> Result<Report, CplanarError> {
    cg.map.check_spherical()?;
    if cg.c == 2 {
        return Ok(Report {
            verdict: Verdict::Unsupported(Unsupported::TwoClusters),
            components: Vec::new(),
            stats: Stats::default(),
        });
    }
    if cg.c >= 3 {
        if let Err(errs) = cg.validate_cyclic() {
            let msg: Vec<String> = errs.iter().map(ToString::to_string).collect();
            return Err(CplanarError::Input(msg.join("; ")));
        }
    }
    let comps = normalize::split_components(cg);
    let mut reports = Vec::new();
    let mut total = Stats::default();
    let mut augmented = Vec::new();
    for comp in &comps {
        let mut stats = Stats::default();
        let outcome = decide_component(&comp.cg, opts, &mut stats)?;
        total.add(&stats);
        let (status, rejection, unsupported) = match &outcome {
            ComponentOutcome::CPlanar(_) => (ComponentStatus::CPlanar, None, None),
            ComponentOutcome::NotCPlanar(r) => (ComponentStatus::NotCPlanar, Some(r.clone()), None),
            ComponentOutcome::Unsupported(u) => (ComponentStatus::Unsupported, None, Some(*u)),
        };
        reports.push(ComponentReport {
            vertices: comp.vertices.clone(),
            status,
            rejection: rejection.map(|r| r.to_input_ids(&comp.vertices)),
            unsupported,
            stats,
        });
        augmented.push(outcome);
    }
    let verdict = if let Some(r) = reports.iter().find_map(|r| r.rejection.clone()) {
        Verdict::NotCPlanar(r)
    } else if let Some(u) = reports.iter().find_map(|r| r.unsupported) {
        Verdict::Unsupported(u)
    } else {
        let maps: Vec<CombMap> = augmented
            .into_iter()
            .map(|o| match o {
                ComponentOutcome::CPlanar(m) => m,
                _ => unreachable!("all components are c-planar"),
            })
            .collect();
        let aug = construct::assemble(cg, &comps, &maps);
        let cert = construct::finalize_augmentation(cg, &aug)?;
        if let Err(problems) = construct::verify_certificate(cg, &cert) {
            return Err(CplanarError::Internal(format!(
                "certificate failed verification: {}",
                problems.join("; ")
            )));
        }
        Verdict::CPlanar(Box::new(cert))
    };
    Ok(Report { verdict, components: reports, stats: total })
}

fn decide_component(cg: &CGraph, opts: DecideOptions, stats: &mut Stats) -> Result<ComponentOutcome, CplanarError> {
    let first = cg.gamma.first().copied();
    if cg.c == 1 || cg.gamma.iter().all(|&g| Some(g) == first) {
        return Ok(ComponentOutcome::CPlanar(cg.map.clone()));
    }
    let poles = match cg.select_poles() {
        PoleSelection::Poles(p) => p,
        PoleSelection::AllZero => return Ok(ComponentOutcome::Unsupported(Unsupported::AllZeroWinding)),
        PoleSelection::Reject { heights } => {
            return Ok(ComponentOutcome::NotCPlanar(Rejection::WindingObstruction { heights }))
        }
    };
    let ncg = match normalize::normalize(cg.clone(), poles)? {
        NormalizeOutcome::Normalized(n) => n,
        NormalizeOutcome::Rejected(r) => return Ok(ComponentOutcome::NotCPlanar(r)),
    };
    let p = &ncg.provenance;
    stats.contractions = p.contractions.len();
    stats.deleted_loops = p.deleted_loops.len();
    stats.subdivisions = p.subdivisions.len();
    stats.subdivision_vertices = p.subdivisions.iter().map(|s| s.vertices.len()).sum();
    stats.split_checks = p.subdivisions.len();
    let o = orient(&ncg.cg)?;
    let inc = build_incidence(&ncg, &o, opts.pole_rule)?;
    stats.sources = inc.s.iter().filter(|s| s.1 == ExtremeKind::Source).count();
    stats.sinks = inc.s.len() - stats.sources;
    stats.incidence_faces = inc.f.len();
    stats.incidence_edges = inc.edge_count();
    let Some(m) = perfect_matching(&inc) else {
        return Ok(ComponentOutcome::NotCPlanar(Rejection::NoPerfectMatching {
            sinks_sources: inc.s.len(),
            faces: inc.f.len(),
            matched: max_matching_size(&inc),
        }));
    };
    let lifted = construct::certify_component(cg, ncg, &inc, &m, stats)?;
    Ok(ComponentOutcome::CPlanar(lifted))
}

impl Rejection {
    /// Rewrites component-local vertex ids into input ids.
    pub(crate) fn to_input_ids(&self, vertices: &[usize]) -> Rejection {
        match self {
            Rejection::LoopEnclosure { cluster, vertex, enclosed } => Rejection::LoopEnclosure {
                cluster: *cluster,
                vertex: vertices[*vertex],
                enclosed: enclosed.iter().map(|&v| vertices[v]).collect(),
            },
            other => other.clone(),
        }
    }
}

//! JSON instance and certificate files.
//!
//! Dart `2e` is edge `e` leaving its first endpoint and `2e + 1` leaving its
//! second; rotations list darts counterclockwise.

use serde::{Deserialize, Serialize};

use crate::cmodel::CGraph;
use crate::combmap::{CombMap, Dart};
use crate::construct::Certificate;
use crate::decide::{ComponentReport, Report, Unsupported, Verdict};
use crate::{CplanarError, Rejection};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub c: usize,
    /// Cluster of each vertex.
    pub clusters: Vec<usize>,
    pub edges: Vec<[usize; 2]>,
    pub rotations: Vec<Vec<usize>>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<InstanceFile, CplanarError> {
        serde_json::from_str(text).map_err(|e| CplanarError::Input(format!("malformed instance: {e}")))
    }

    /// Builds the clustered map; checks the rotation system and genus but
    /// not the cyclic edge condition.
    pub fn to_cgraph(&self) -> Result<CGraph, CplanarError> {
        let n = self.clusters.len();
        if self.rotations.len() != n {
            return Err(CplanarError::Input(format!(
                "{} rotations for {} vertices",
                self.rotations.len(),
                n
            )));
        }
        if let Some(e) = self.edges.iter().position(|&[a, b]| a >= n || b >= n) {
            return Err(CplanarError::Input(format!("edge {e} has an endpoint outside 0..{n}")));
        }
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|&[a, b]| (a, b)).collect();
        let rotation: Vec<Vec<Dart>> =
            self.rotations.iter().map(|r| r.iter().map(|&d| Dart(d)).collect()).collect();
        let map = CombMap::new(n, &edges, &rotation)?;
        Ok(CGraph::new(map, self.c, self.clusters.clone())?)
    }

    pub fn from_cgraph(cg: &CGraph) -> InstanceFile {
        let (map, verts, _) = cg.map.compacted();
        let (_, edges, rotation) = map.to_parts();
        InstanceFile {
            c: cg.c,
            clusters: verts.iter().map(|&v| cg.gamma[v]).collect(),
            edges: edges.into_iter().map(|(a, b)| [a, b]).collect(),
            rotations: rotation.into_iter().map(|r| r.into_iter().map(|d| d.0).collect()).collect(),
        }
    }

    /// One line per edge and per rotation, so diffs stay readable.
    pub fn to_json(&self) -> String {
        let list = |items: Vec<String>| {
            if items.is_empty() {
                "[]".to_string()
            } else {
                format!("[\n    {}\n  ]", items.join(",\n    "))
            }
        };
        let nums = |xs: &[usize]| format!("[{}]", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));
        format!(
            "{{\n  \"c\": {},\n  \"clusters\": {},\n  \"edges\": {},\n  \"rotations\": {}\n}}\n",
            self.c,
            nums(&self.clusters),
            list(self.edges.iter().map(|e| nums(e)).collect()),
            list(self.rotations.iter().map(|r| nums(r)).collect()),
        )
    }
}

/// Outcome of a test run; carries the certificate on acceptance so it can
/// be reloaded and checked on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<Rejection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unsupported: Option<Unsupported>,
    #[serde(default)]
    pub components: Vec<ComponentReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

impl CertificateFile {
    pub fn from_report(report: &Report) -> CertificateFile {
        let (reason, unsupported, certificate) = match &report.verdict {
            Verdict::CPlanar(c) => (None, None, Some((**c).clone())),
            Verdict::NotCPlanar(r) => (Some(r.clone()), None, None),
            Verdict::Unsupported(u) => (None, Some(*u), None),
        };
        CertificateFile {
            verdict: report.verdict.name().to_string(),
            reason,
            unsupported,
            components: report.components.clone(),
            certificate,
        }
    }

    pub fn parse(text: &str) -> Result<CertificateFile, CplanarError> {
        serde_json::from_str(text).map_err(|e| CplanarError::Input(format!("malformed certificate: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes") + "\n"
    }
}

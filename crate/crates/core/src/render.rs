//! SVG drawings of certificates.
//!
//! Each component is refined twice by barycentric subdivision (a vertex in
//! every edge and face, joined to everything around it), which always gives
//! a simple triangulation. A barycentric (Tutte) layout of that
//! triangulation with one triangle pinned is a planar straight-line drawing,
//! so every input vertex keeps its rotation. Edges are drawn as polylines
//! through their subdivision vertices.

use std::fmt::Write as _;

use crate::combmap::{CombMap, Dart};
use crate::construct::Certificate;

#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    /// Position of each certificate vertex.
    pub vertices: Vec<(f64, f64)>,
    /// Polyline of each certificate edge, from its first to its second
    /// endpoint.
    pub edges: Vec<Vec<(f64, f64)>>,
}

/// Flag-based barycentric subdivision. Vertex `v` keeps id `v`, edge `e`
/// gets midpoint `V + e` and face `f` (in `trace_faces` order) gets centre
/// `V + E + f`. Dart `d` yields edges `3d` (tail to midpoint), `3d + 1`
/// (tail to the centre of the face of `d`) and `3d + 2` (midpoint to that
/// centre).
fn subdivide(map: &CombMap) -> CombMap {
    let (v, e) = (map.vertex_capacity(), map.edge_capacity());
    let faces = map.trace_faces();
    let fidx = map.face_index(&faces);
    let total = v + e + faces.len();
    let mut edges = vec![(0, 0); 6 * e];
    for d in 0..2 * e {
        let dart = Dart(d);
        let (t, m, f) = (map.tail(dart), v + dart.edge(), v + e + fidx[d]);
        edges[3 * d] = (t, m);
        edges[3 * d + 1] = (t, f);
        edges[3 * d + 2] = (m, f);
    }
    let mut rotation = vec![Vec::new(); total];
    for x in 0..v {
        for d in map.rotation(x) {
            rotation[x].push(Dart::of_edge(3 * d.0, 0));
            rotation[x].push(Dart::of_edge(3 * d.0 + 1, 0));
        }
    }
    for ed in 0..e {
        let (d0, d1) = (2 * ed, 2 * ed + 1);
        rotation[v + ed] = vec![
            Dart::of_edge(3 * d0, 1),
            Dart::of_edge(3 * d1 + 2, 0),
            Dart::of_edge(3 * d1, 1),
            Dart::of_edge(3 * d0 + 2, 0),
        ];
    }
    for (fi, walk) in faces.iter().enumerate() {
        for d in &walk.darts {
            rotation[v + e + fi].push(Dart::of_edge(3 * d.0 + 1, 1));
            rotation[v + e + fi].push(Dart::of_edge(3 * d.0 + 2, 1));
        }
    }
    CombMap::new(total, &edges, &rotation).expect("subdivision of a spherical map is spherical")
}

/// Barycentric layout with the three vertices of `outer` pinned.
fn tutte(map: &CombMap, outer: [usize; 3]) -> Vec<(f64, f64)> {
    let n = map.vertex_capacity();
    let nbrs: Vec<Vec<usize>> = (0..n).map(|x| map.rotation(x).into_iter().map(|d| map.head(d)).collect()).collect();
    let mut pos = vec![(0.0, 0.0); n];
    let mut fixed = vec![false; n];
    for (i, &o) in outer.iter().enumerate() {
        let a = std::f64::consts::FRAC_PI_2 + i as f64 * 2.0 * std::f64::consts::PI / 3.0;
        pos[o] = (a.cos(), a.sin());
        fixed[o] = true;
    }
    for _ in 0..200_000 {
        let mut change: f64 = 0.0;
        for x in 0..n {
            if fixed[x] || nbrs[x].is_empty() {
                continue;
            }
            let k = nbrs[x].len() as f64;
            let (sx, sy) = nbrs[x].iter().fold((0.0, 0.0), |(sx, sy), &y| (sx + pos[y].0, sy + pos[y].1));
            let p = (sx / k, sy / k);
            change = change.max((p.0 - pos[x].0).abs() + (p.1 - pos[x].1).abs());
            pos[x] = p;
        }
        if change < 1e-13 {
            break;
        }
    }
    pos
}

/// Counterclockwise rotation at every vertex, read off the drawing.
pub fn rotations_of(layout: &Layout, edge_ends: &[(usize, usize)]) -> Vec<Vec<Dart>> {
    let mut at: Vec<Vec<(f64, Dart)>> = vec![Vec::new(); layout.vertices.len()];
    for (e, line) in layout.edges.iter().enumerate() {
        let (a, b) = edge_ends[e];
        let k = line.len();
        let ang = |p: (f64, f64), q: (f64, f64)| (q.1 - p.1).atan2(q.0 - p.0);
        at[a].push((ang(line[0], line[1]), Dart::of_edge(e, 0)));
        at[b].push((ang(line[k - 1], line[k - 2]), Dart::of_edge(e, 1)));
    }
    at.into_iter()
        .map(|mut v| {
            v.sort_by(|x, y| x.0.total_cmp(&y.0));
            v.into_iter().map(|(_, d)| d).collect()
        })
        .collect()
}

fn same_cyclic(a: &[Dart], b: &[Dart]) -> bool {
    a.len() == b.len()
        && (a.is_empty() || {
            let Some(s) = b.iter().position(|d| *d == a[0]) else { return false };
            (0..a.len()).all(|i| a[i] == b[(s + i) % b.len()])
        })
}

/// Vertices whose drawn rotation differs from the certificate's.
pub fn rotation_mismatches(cert: &Certificate, layout: &Layout) -> Vec<usize> {
    let drawn = rotations_of(layout, &cert.edges);
    (0..cert.rotation.len()).filter(|&v| !same_cyclic(&drawn[v], &cert.rotation[v])).collect()
}

/// Lays out every component in its own unit-sized cell, side by side.
pub fn layout(cert: &Certificate) -> Layout {
    let n = cert.rotation.len();
    let full = CombMap::from_parts(n, &cert.edges, &cert.rotation).expect("certificate map is valid");
    let mut out = Layout { vertices: vec![(0.0, 0.0); n], edges: vec![Vec::new(); cert.edges.len()] };
    for (slot, comp) in full.components().into_iter().enumerate() {
        let (map, verts, old_edges) = full.restrict(&comp);
        let offset = slot as f64 * 2.5;
        if map.edge_capacity() == 0 {
            out.vertices[verts[0]] = (offset, 0.0);
            continue;
        }
        let v = map.vertex_capacity();
        let e = map.edge_capacity();
        let once = subdivide(&map);
        let twice = subdivide(&once);
        let first = twice.face_walk(Dart(0)).vertices;
        let mut pos = tutte(&twice, [first[0], first[1], first[2]]);
        let v1 = once.vertex_capacity();
        let path = |pos: &[(f64, f64)], ed: usize| {
            let (a, b) = map.endpoints(ed);
            let (d0, d1) = (2 * ed, 2 * ed + 1);
            vec![pos[a], pos[v1 + 3 * d0], pos[v + ed], pos[v1 + 3 * d1], pos[b]]
        };
        // Tutte layouts are unique up to reflection; keep the one that
        // matches the counterclockwise convention.
        let rot_ok = |pos: &[(f64, f64)]| {
            let lay = Layout {
                vertices: pos[..v].to_vec(),
                edges: (0..e).map(|ed| path(pos, ed)).collect(),
            };
            let ends: Vec<(usize, usize)> = (0..e).map(|ed| map.endpoints(ed)).collect();
            let drawn = rotations_of(&lay, &ends);
            (0..v).filter(|&x| same_cyclic(&drawn[x], &map.rotation(x))).count()
        };
        let mirrored: Vec<(f64, f64)> = pos.iter().map(|&(x, y)| (-x, y)).collect();
        if rot_ok(&mirrored) > rot_ok(&pos) {
            pos = mirrored;
        }
        for (i, &g) in verts.iter().enumerate() {
            out.vertices[g] = (pos[i].0 + offset, pos[i].1);
        }
        for (ed, &g) in old_edges.iter().enumerate() {
            out.edges[g] = path(&pos, ed).into_iter().map(|(x, y)| (x + offset, y)).collect();
        }
    }
    out
}

fn colour(cluster: usize, c: usize) -> String {
    format!("hsl({:.0}, 70%, 45%)", 360.0 * cluster as f64 / c.max(1) as f64)
}

/// SVG drawing: cluster trees as thick translucent bands, input edges in
/// black, added edges dashed, and `c` rays from the middle of the picture
/// marking the cluster wedges.
pub fn render_svg(cert: &Certificate) -> String {
    let lay = layout(cert);
    let pts = lay.vertices.iter().chain(lay.edges.iter().flatten());
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &(x, y) in pts {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, y0, x1, y1) = (0.0, 0.0, 1.0, 1.0);
    }
    let size = 800.0;
    let margin = 40.0;
    let scale = (size - 2.0 * margin) / (x1 - x0).max(y1 - y0).max(1e-9);
    let width = (x1 - x0) * scale + 2.0 * margin;
    let height = (y1 - y0) * scale + 2.0 * margin;
    let tx = |p: (f64, f64)| (margin + (p.0 - x0) * scale, height - margin - (p.1 - y0) * scale);
    let points = |line: &[(f64, f64)]| {
        line.iter()
            .map(|&p| {
                let (x, y) = tx(p);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (cx, cy) = (width / 2.0, height / 2.0);
    let r = width.max(height);
    s.push_str("<g id=\"rays\" stroke=\"#bbbbbb\" stroke-dasharray=\"6 6\">\n");
    for i in 0..cert.c {
        let a = 2.0 * std::f64::consts::PI * i as f64 / cert.c as f64;
        let _ = writeln!(
            s,
            r#"<line data-ray="{i}" x1="{cx:.3}" y1="{cy:.3}" x2="{:.3}" y2="{:.3}"/>"#,
            cx + r * a.cos(),
            cy - r * a.sin()
        );
    }
    s.push_str("</g>\n<g id=\"trees\" fill=\"none\" stroke-width=\"14\" stroke-linecap=\"round\" stroke-linejoin=\"round\" stroke-opacity=\"0.25\">\n");
    for t in &cert.cluster_trees {
        for &e in &t.edges {
            let _ = writeln!(
                s,
                r#"<polyline data-tree="{}" stroke="{}" points="{}"/>"#,
                t.cluster,
                colour(t.cluster, cert.c),
                points(&lay.edges[e])
            );
        }
    }
    s.push_str("</g>\n<g id=\"edges\" fill=\"none\" stroke-width=\"1.5\">\n");
    for (e, line) in lay.edges.iter().enumerate() {
        if e < cert.input_edges {
            let _ = writeln!(s, r#"<polyline data-edge="{e}" stroke="black" points="{}"/>"#, points(line));
        } else {
            let cl = cert.gamma[cert.edges[e].0];
            let _ = writeln!(
                s,
                r#"<polyline data-edge="{e}" stroke="{}" stroke-dasharray="4 3" points="{}"/>"#,
                colour(cl, cert.c),
                points(line)
            );
        }
    }
    s.push_str("</g>\n<g id=\"vertices\" stroke=\"black\">\n");
    for (v, &p) in lay.vertices.iter().enumerate() {
        let (x, y) = tx(p);
        let _ = writeln!(
            s,
            r#"<circle data-vertex="{v}" data-cluster="{}" cx="{x:.3}" cy="{y:.3}" r="5" fill="{}"/>"#,
            cert.gamma[v],
            colour(cert.gamma[v], cert.c)
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

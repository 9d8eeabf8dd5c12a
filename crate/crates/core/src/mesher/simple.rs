//! Meshes with closed-form spectra, used as oracles.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::MeshError;
use crate::geometry::hyperboloid::{distance, Lorentz};

use super::mesh::{edge_key, BoundaryLoop, HyperbolicMesh, LoopTag, Metric, Provenance};
use super::strip::stitch_cyclic;

fn polar(metric: Metric, r: f64, theta: f64) -> Lorentz {
    match metric {
        Metric::Hyperbolic => [r.cosh(), r.sinh() * theta.cos(), r.sinh() * theta.sin()],
        Metric::Euclidean => [0.0, r * theta.cos(), r * theta.sin()],
    }
}

fn metric_distance(metric: Metric, a: &Lorentz, b: &Lorentz) -> f64 {
    match metric {
        Metric::Hyperbolic => distance(a, b),
        Metric::Euclidean => (a[1] - b[1]).hypot(a[2] - b[2]),
    }
}

/// Geodesic disk of the given radius with its rim tagged Dirichlet.
/// Vertices lie on concentric circles; counts double outward as needed.
pub fn geodesic_disk(radius: f64, h: f64, metric: Metric) -> Result<HyperbolicMesh, MeshError> {
    if !(radius > 0.0) || !(h > 0.0) {
        return Err(MeshError::InvalidArgument("disk radius and h must be positive".into()));
    }
    let h_t = 0.7 * h;
    let rings = ((radius / h_t).ceil() as usize).max(2);
    let dr = radius / rings as f64;
    let circ = |r: f64| match metric {
        Metric::Hyperbolic => 2.0 * PI * r.sinh(),
        Metric::Euclidean => 2.0 * PI * r,
    };
    let mut pos: Vec<Lorentz> = vec![polar(metric, 0.0, 0.0)];
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut count = 6usize;
    for k in 1..=rings {
        let r = k as f64 * dr;
        while circ(r) / count as f64 > h_t {
            count *= 2;
        }
        let row: Vec<usize> = (0..count)
            .map(|m| {
                pos.push(polar(metric, r, 2.0 * PI * m as f64 / count as f64));
                pos.len() - 1
            })
            .collect();
        rows.push(row);
    }
    let mut triangles = Vec::new();
    let first = &rows[0];
    for m in 0..first.len() {
        triangles.push([first[m], first[(m + 1) % first.len()], 0]);
    }
    for k in 1..rows.len() {
        let d = |a: usize, b: usize| metric_distance(metric, &pos[a], &pos[b]);
        stitch_cyclic(&rows[k], &rows[k - 1], |a, b, x, y| d(a, b) <= d(x, y), &mut triangles);
    }
    let mut lengths = BTreeMap::new();
    for t in &triangles {
        for a in 0..3 {
            let (p, q) = (t[a], t[(a + 1) % 3]);
            lengths
                .entry(edge_key(p, q))
                .or_insert_with(|| metric_distance(metric, &pos[p], &pos[q]));
        }
    }
    let loops = vec![BoundaryLoop {
        vertices: rows.last().unwrap().clone(),
        tag: LoopTag::Dirichlet,
        label: "rim".into(),
    }];
    let provenance = pos
        .iter()
        .map(|x| Provenance {
            block: 0,
            copy: 0,
            chart: *x,
        })
        .collect();
    HyperbolicMesh::new(metric, pos.len(), triangles, &lengths, loops, provenance)
}

/// Unit flat torus as an `n x n` grid of squares, each cut along a diagonal.
pub fn flat_torus(n: usize) -> Result<HyperbolicMesh, MeshError> {
    if n < 3 {
        return Err(MeshError::InvalidArgument(format!("torus grid needs n >= 3, got {n}")));
    }
    let id = |i: usize, j: usize| (i % n) * n + (j % n);
    let s = 1.0 / n as f64;
    let mut triangles = Vec::with_capacity(2 * n * n);
    let mut lengths = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
            lengths.insert(edge_key(a, b), s);
            lengths.insert(edge_key(a, d), s);
            lengths.insert(edge_key(a, c), s * 2f64.sqrt());
        }
    }
    HyperbolicMesh::new(Metric::Euclidean, n * n, triangles, &lengths, Vec::new(), Vec::new())
}

//! Intrinsic triangle meshes: connectivity plus one length per edge.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::MeshError;
use crate::geometry::hyperboloid::Lorentz;

/// Model geometry the edge lengths are measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Hyperbolic,
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LoopTag {
    Dirichlet,
    Neumann,
    GlueSeam,
    CuspRim,
}

impl LoopTag {
    pub fn as_str(self) -> &'static str {
        match self {
            LoopTag::Dirichlet => "dirichlet",
            LoopTag::Neumann => "neumann",
            LoopTag::GlueSeam => "glue_seam",
            LoopTag::CuspRim => "cusp_rim",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dirichlet" => Some(LoopTag::Dirichlet),
            "neumann" => Some(LoopTag::Neumann),
            "glue_seam" => Some(LoopTag::GlueSeam),
            "cusp_rim" => Some(LoopTag::CuspRim),
            _ => None,
        }
    }
}

/// A closed boundary cycle, oriented so that the mesh lies on its left.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryLoop {
    pub vertices: Vec<usize>,
    pub tag: LoopTag,
    pub label: String,
}

/// Where a vertex came from: block instance, hexagon copy (0 or 1; 2 for
/// cusp annuli) and its position in that block's hyperboloid chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Provenance {
    pub block: usize,
    pub copy: u8,
    pub chart: Lorentz,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshQuality {
    pub h_max: f64,
    /// Smallest interior angle, in radians, measured in the mesh metric.
    pub min_angle: f64,
    pub vertex_count: usize,
    pub triangle_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicMesh {
    pub metric: Metric,
    vertex_count: usize,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    edge_lengths: Vec<f64>,
    pub boundary_loops: Vec<BoundaryLoop>,
    pub provenance: Vec<Provenance>,
}

#[inline]
pub fn edge_key(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

impl HyperbolicMesh {
    /// Builds a mesh from triangles and a length for every edge they use.
    pub fn new(
        metric: Metric,
        vertex_count: usize,
        triangles: Vec<[usize; 3]>,
        lengths: &BTreeMap<[usize; 2], f64>,
        boundary_loops: Vec<BoundaryLoop>,
        provenance: Vec<Provenance>,
    ) -> Result<Self, MeshError> {
        let mut edge_set = BTreeSet::new();
        for (ti, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= vertex_count) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(MeshError::Invalid(format!(
                    "triangle {ti} {t:?} is degenerate or out of range"
                )));
            }
            for k in 0..3 {
                edge_set.insert(edge_key(t[k], t[(k + 1) % 3]));
            }
        }
        let edges: Vec<[usize; 2]> = edge_set.into_iter().collect();
        let mut edge_lengths = Vec::with_capacity(edges.len());
        for e in &edges {
            match lengths.get(e) {
                Some(&l) if l > 0.0 && l.is_finite() => edge_lengths.push(l),
                Some(&l) => return Err(MeshError::Invalid(format!("edge {e:?} has length {l}"))),
                None => return Err(MeshError::Invalid(format!("edge {e:?} has no length"))),
            }
        }
        if !provenance.is_empty() && provenance.len() != vertex_count {
            return Err(MeshError::Invalid("provenance must cover every vertex".into()));
        }
        Ok(HyperbolicMesh {
            metric,
            vertex_count,
            triangles,
            edges,
            edge_lengths,
            boundary_loops,
            provenance,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Sorted unique edges `[a, b]` with `a < b`.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&edge_key(a, b)).ok()
    }

    pub fn length(&self, a: usize, b: usize) -> Option<f64> {
        self.edge_index(a, b).map(|i| self.edge_lengths[i])
    }

    /// Side lengths of triangle `t`, opposite to its vertices 0, 1, 2.
    pub fn triangle_sides(&self, t: usize) -> [f64; 3] {
        let [a, b, c] = self.triangles[t];
        let l = |x, y| self.length(x, y).expect("triangle edge present");
        [l(b, c), l(c, a), l(a, b)]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let s = self.triangle_sides(t);
        match self.metric {
            Metric::Hyperbolic => hyperbolic_area(s[0], s[1], s[2]),
            Metric::Euclidean => euclidean_area(s[0], s[1], s[2]),
        }
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Vertices on some boundary loop carrying `tag`.
    pub fn tagged_vertices(&self, tag: LoopTag) -> BTreeSet<usize> {
        self.boundary_loops
            .iter()
            .filter(|l| l.tag == tag)
            .flat_map(|l| l.vertices.iter().copied())
            .collect()
    }

    /// Edges used by exactly one triangle, as directed pairs in triangle order.
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let mut count: BTreeMap<[usize; 2], (usize, (usize, usize))> = BTreeMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let e = count.entry(edge_key(a, b)).or_insert((0, (a, b)));
                e.0 += 1;
            }
        }
        count.into_values().filter(|(c, _)| *c == 1).map(|(_, d)| d).collect()
    }

    pub fn quality(&self) -> MeshQuality {
        let h_max = self.edge_lengths.iter().cloned().fold(0.0, f64::max);
        let mut min_angle = f64::INFINITY;
        for t in 0..self.triangles.len() {
            let s = self.triangle_sides(t);
            let ang = match self.metric {
                Metric::Hyperbolic => hyperbolic_angles(s[0], s[1], s[2]),
                Metric::Euclidean => euclidean_angles(s[0], s[1], s[2]),
            };
            for a in ang {
                min_angle = min_angle.min(a);
            }
        }
        MeshQuality {
            h_max,
            min_angle,
            vertex_count: self.vertex_count,
            triangle_count: self.triangles.len(),
        }
    }

    /// Checks every structural and metric invariant. `expected_chi` is
    /// compared with `V - E + F` when given.
    pub fn validate(&self, expected_chi: Option<i64>) -> Result<(), MeshError> {
        let bad = |m: String| Err(MeshError::Invalid(m));
        // edge manifoldness and orientation
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let d = (t[k], t[(k + 1) % 3]);
                if let Some(other) = directed.insert(d, ti) {
                    return bad(format!(
                        "directed edge {d:?} used by triangles {other} and {ti}: inconsistent orientation or non-manifold"
                    ));
                }
            }
        }
        for e in &self.edges {
            let fwd = directed.contains_key(&(e[0], e[1]));
            let bwd = directed.contains_key(&(e[1], e[0]));
            if !fwd && !bwd {
                return bad(format!("edge {e:?} not used by any triangle"));
            }
        }
        // vertex links: each vertex star is a single fan
        let mut star: Vec<Vec<(usize, usize)>> = vec![Vec::new(); self.vertex_count];
        for t in &self.triangles {
            for k in 0..3 {
                star[t[k]].push((t[(k + 1) % 3], t[(k + 2) % 3]));
            }
        }
        for (v, s) in star.iter().enumerate() {
            if s.is_empty() {
                return bad(format!("vertex {v} is isolated"));
            }
            let next: BTreeMap<usize, usize> = s.iter().copied().collect();
            let starts: Vec<usize> = s
                .iter()
                .map(|&(a, _)| a)
                .filter(|a| !s.iter().any(|&(_, b)| b == *a))
                .collect();
            let (start, open) = match starts.len() {
                0 => (s[0].0, false),
                1 => (starts[0], true),
                _ => return bad(format!("vertex {v} has a disconnected link")),
            };
            let mut seen = 0;
            let mut cur = start;
            while let Some(&n) = next.get(&cur) {
                seen += 1;
                cur = n;
                if cur == start || seen > s.len() {
                    break;
                }
            }
            if seen != s.len() || (!open && cur != start) {
                return bad(format!("vertex {v} has a link that is not a single fan"));
            }
        }
        // connectivity
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        if (0..self.vertex_count).any(|v| find(&mut parent, v) != root) {
            return bad("mesh is not connected".into());
        }
        // boundary loops account for every boundary edge, with matching direction
        let mut bedges: BTreeSet<(usize, usize)> = self.boundary_edges().into_iter().collect();
        for (li, l) in self.boundary_loops.iter().enumerate() {
            let n = l.vertices.len();
            if n < 3 {
                return bad(format!("boundary loop {li} has {n} vertices"));
            }
            for k in 0..n {
                let d = (l.vertices[k], l.vertices[(k + 1) % n]);
                if !bedges.remove(&d) {
                    return bad(format!(
                        "boundary loop {li} edge {d:?} is not a boundary edge in loop direction"
                    ));
                }
            }
        }
        if let Some(d) = bedges.iter().next() {
            return bad(format!("boundary edge {d:?} not covered by a boundary loop"));
        }
        // metric
        for t in 0..self.triangles.len() {
            let [a, b, c] = self.triangle_sides(t);
            if !(a < b + c && b < a + c && c < a + b) {
                return bad(format!(
                    "triangle {t} violates the strict triangle inequality ({a}, {b}, {c})"
                ));
            }
            if !(self.triangle_area(t) > 0.0) {
                return bad(format!("triangle {t} has non-positive area"));
            }
        }
        if let Some(chi) = expected_chi {
            let got = self.euler_characteristic();
            if got != chi {
                return bad(format!("Euler characteristic {got}, expected {chi}"));
            }
        }
        Ok(())
    }

    /// Relabels vertices: new index of old vertex `v` is `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, MeshError> {
        if perm.len() != self.vertex_count {
            return Err(MeshError::InvalidArgument("permutation length mismatch".into()));
        }
        let tris = self
            .triangles
            .iter()
            .map(|t| [perm[t[0]], perm[t[1]], perm[t[2]]])
            .collect();
        let mut lengths = BTreeMap::new();
        for (e, l) in self.edges.iter().zip(&self.edge_lengths) {
            lengths.insert(edge_key(perm[e[0]], perm[e[1]]), *l);
        }
        let loops = self
            .boundary_loops
            .iter()
            .map(|l| BoundaryLoop {
                vertices: l.vertices.iter().map(|&v| perm[v]).collect(),
                tag: l.tag,
                label: l.label.clone(),
            })
            .collect();
        let mut prov = self.provenance.clone();
        for (old, p) in self.provenance.iter().enumerate() {
            prov[perm[old]] = *p;
        }
        HyperbolicMesh::new(self.metric, self.vertex_count, tris, &lengths, loops, prov)
    }

    /// Retags every loop with `from` to `to`.
    pub fn retag(&mut self, from: LoopTag, to: LoopTag) {
        for l in &mut self.boundary_loops {
            if l.tag == from {
                l.tag = to;
            }
        }
    }

    /// Stable content hash of connectivity, lengths and loops.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(format!("{:?}{}", self.metric, self.vertex_count).as_bytes());
        for t in &self.triangles {
            for v in t {
                h.update((*v as u64).to_le_bytes());
            }
        }
        for l in &self.edge_lengths {
            h.update(l.to_bits().to_le_bytes());
        }
        for l in &self.boundary_loops {
            h.update(l.tag.as_str().as_bytes());
            for v in &l.vertices {
                h.update((*v as u64).to_le_bytes());
            }
        }
        let digest = h.finalize();
        digest.iter().take(12).map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for MeshQuality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "V={} F={} h_max={:.6} min_angle={:.3}deg",
            self.vertex_count,
            self.triangle_count,
            self.h_max,
            self.min_angle.to_degrees()
        )
    }
}

/// Area of the hyperbolic triangle with sides `a, b, c`, i.e. its angle
/// deficit, from the hyperbolic l'Huilier formula.
pub fn hyperbolic_area(a: f64, b: f64, c: f64) -> f64 {
    let s = 0.5 * (a + b + c);
    let p = (0.5 * s).tanh() * (0.5 * (s - a)).tanh() * (0.5 * (s - b)).tanh() * (0.5 * (s - c)).tanh();
    if !(p > 0.0) {
        return 0.0;
    }
    4.0 * p.sqrt().atan()
}

/// Euclidean area by Kahan's stable Heron formula.
pub fn euclidean_area(a: f64, b: f64, c: f64) -> f64 {
    let mut x = [a, b, c];
    x.sort_by(|p, q| q.partial_cmp(p).unwrap());
    let [a, b, c] = x;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if !(p > 0.0) {
        return 0.0;
    }
    0.25 * p.sqrt()
}

/// Interior angles opposite `a, b, c` via the half-angle formula.
pub fn hyperbolic_angles(a: f64, b: f64, c: f64) -> [f64; 3] {
    let s = 0.5 * (a + b + c);
    let half = |_x: f64, y: f64, z: f64| {
        // angle opposite the first argument
        let v = ((s - y).sinh() * (s - z).sinh() / (y.sinh() * z.sinh())).clamp(0.0, 1.0);
        2.0 * v.sqrt().asin()
    };
    [half(a, b, c), half(b, c, a), half(c, a, b)]
}

pub fn euclidean_angles(a: f64, b: f64, c: f64) -> [f64; 3] {
    let s = 0.5 * (a + b + c);
    let half = |_x: f64, y: f64, z: f64| {
        let v = ((s - y) * (s - z) / (y * z)).clamp(0.0, 1.0);
        2.0 * v.sqrt().asin()
    };
    [half(a, b, c), half(b, c, a), half(c, a, b)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lengths(es: &[([usize; 2], f64)]) -> BTreeMap<[usize; 2], f64> {
        es.iter().map(|(e, l)| (edge_key(e[0], e[1]), *l)).collect()
    }

    #[test]
    fn deficit_matches_law_of_cosines() {
        let (a, b, c) = (0.9f64, 1.3f64, 1.1f64);
        let ang = |x: f64, y: f64, z: f64| ((y.cosh() * z.cosh() - x.cosh()) / (y.sinh() * z.sinh())).acos();
        let deficit = std::f64::consts::PI - ang(a, b, c) - ang(b, c, a) - ang(c, a, b);
        assert!((hyperbolic_area(a, b, c) - deficit).abs() < 1e-13);
        let h = hyperbolic_angles(a, b, c);
        assert!((h[0] - ang(a, b, c)).abs() < 1e-13);
    }

    #[test]
    fn tiny_triangles_approach_euclidean() {
        let s = 1e-4;
        let h = hyperbolic_area(s, s, s);
        let e = euclidean_area(s, s, s);
        assert!((h - e).abs() / e < 1e-8);
        assert!((euclidean_area(3.0, 4.0, 5.0) - 6.0).abs() < 1e-14);
        assert_eq!(hyperbolic_area(1.0, 1.0, 2.0), 0.0);
    }

    #[test]
    fn single_triangle_validates() {
        let l = lengths(&[([0, 1], 1.0), ([1, 2], 1.0), ([0, 2], 1.0)]);
        let loops = vec![BoundaryLoop {
            vertices: vec![0, 1, 2],
            tag: LoopTag::Neumann,
            label: "b".into(),
        }];
        let m = HyperbolicMesh::new(Metric::Hyperbolic, 3, vec![[0, 1, 2]], &l, loops, vec![]).unwrap();
        m.validate(Some(1)).unwrap();
        assert_eq!(m.quality().vertex_count, 3);
        let bad = HyperbolicMesh::new(Metric::Hyperbolic, 3, vec![[0, 1, 2]], &l, vec![], vec![]).unwrap();
        assert!(bad.validate(None).is_err());
    }

    #[test]
    fn inconsistent_orientation_rejected() {
        let l = lengths(&[
            ([0, 1], 1.0),
            ([1, 2], 1.0),
            ([0, 2], 1.0),
            ([1, 3], 1.0),
            ([2, 3], 1.0),
        ]);
        let m = HyperbolicMesh::new(Metric::Euclidean, 4, vec![[0, 1, 2], [1, 2, 3]], &l, vec![], vec![]).unwrap();
        assert!(m.validate(None).unwrap_err().to_string().contains("orientation"));
    }

    #[test]
    fn missing_length_rejected() {
        let l = lengths(&[([0, 1], 1.0), ([1, 2], 1.0)]);
        assert!(HyperbolicMesh::new(Metric::Euclidean, 3, vec![[0, 1, 2]], &l, vec![], vec![]).is_err());
    }
}

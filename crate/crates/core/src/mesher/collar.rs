//! Graph distances and the topology of vertex-induced sub-complexes.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};

use super::mesh::{edge_key, HyperbolicMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubComplex {
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
    pub euler_characteristic: i64,
    /// Connected components of the boundary edge graph.
    pub boundary_components: usize,
    pub components: usize,
}

#[derive(PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Shortest edge-path distance from the nearest source to every vertex.
pub fn graph_distances(mesh: &HyperbolicMesh, sources: &[usize]) -> Vec<f64> {
    let n = mesh.vertex_count();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (e, l) in mesh.edges().iter().zip(mesh.edge_lengths()) {
        adj[e[0]].push((e[1], *l));
        adj[e[1]].push((e[0], *l));
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Item(0.0, s));
    }
    while let Some(Item(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(w, l) in &adj[v] {
            let nd = d + l;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Item(nd, w));
            }
        }
    }
    dist
}

fn components(n: usize, edges: impl Iterator<Item = (usize, usize)>, present: &[bool]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    (0..n).filter(|&v| present[v] && find(&mut parent, v) == v).count()
}

/// The full sub-complex spanned by the vertices with `keep[v]`.
pub fn induced_subcomplex(mesh: &HyperbolicMesh, keep: &[bool]) -> SubComplex {
    let n = mesh.vertex_count();
    let vertices = keep.iter().filter(|&&k| k).count();
    let edges: Vec<[usize; 2]> = mesh
        .edges()
        .iter()
        .copied()
        .filter(|e| keep[e[0]] && keep[e[1]])
        .collect();
    let tris: Vec<[usize; 3]> = mesh
        .triangles()
        .iter()
        .copied()
        .filter(|t| t.iter().all(|&v| keep[v]))
        .collect();
    let mut uses: BTreeMap<[usize; 2], usize> = edges.iter().map(|e| (*e, 0)).collect();
    for t in &tris {
        for k in 0..3 {
            *uses.get_mut(&edge_key(t[k], t[(k + 1) % 3])).unwrap() += 1;
        }
    }
    let boundary: Vec<[usize; 2]> = uses.iter().filter(|(_, &c)| c < 2).map(|(e, _)| *e).collect();
    let mut on_boundary = vec![false; n];
    for e in &boundary {
        on_boundary[e[0]] = true;
        on_boundary[e[1]] = true;
    }
    SubComplex {
        vertices,
        edges: edges.len(),
        triangles: tris.len(),
        euler_characteristic: vertices as i64 - edges.len() as i64 + tris.len() as i64,
        boundary_components: components(n, boundary.iter().map(|e| (e[0], e[1])), &on_boundary),
        components: components(n, edges.iter().map(|e| (e[0], e[1])), keep),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesher::mesh::Metric;
    use crate::mesher::simple::geodesic_disk;

    #[test]
    fn disk_minus_centre_is_annulus() {
        let m = geodesic_disk(1.0, 0.2, Metric::Hyperbolic).unwrap();
        let d = graph_distances(&m, &[0]);
        assert_eq!(d[0], 0.0);
        let all = induced_subcomplex(&m, &vec![true; m.vertex_count()]);
        assert_eq!(all.euler_characteristic, 1);
        assert_eq!(all.boundary_components, 1);
        let mut keep = vec![true; m.vertex_count()];
        keep[0] = false;
        let ann = induced_subcomplex(&m, &keep);
        assert_eq!(ann.euler_characteristic, 0);
        assert_eq!(ann.boundary_components, 2);
        assert_eq!(ann.components, 1);
    }
}

//! Nodal domains of discrete eigenfunctions via vertex signs.

use serde::Serialize;

use crate::mesher::HyperbolicMesh;

/// Vertices with `|φ| <= NODAL_THRESHOLD · ‖φ‖_∞` belong to no domain.
pub const NODAL_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodalDomain {
    pub sign: i8,
    pub vertices: Vec<usize>,
    pub euler_characteristic: i64,
    /// Lumped area of the domain's vertices.
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodalReport {
    pub domains: Vec<NodalDomain>,
    /// Vertices assigned to no domain.
    pub near_zero: usize,
}

impl NodalReport {
    pub fn count(&self) -> usize {
        self.domains.len()
    }

    pub fn count_with_sign(&self, sign: i8) -> usize {
        self.domains.iter().filter(|d| d.sign == sign).count()
    }

    pub fn max_euler_characteristic(&self) -> Option<i64> {
        self.domains.iter().map(|d| d.euler_characteristic).max()
    }
}

fn find(p: &mut [usize], mut x: usize) -> usize {
    while p[x] != x {
        p[x] = p[p[x]];
        x = p[x];
    }
    x
}

/// Connected components of the positive and negative vertex sets, each
/// with the Euler characteristic of its induced sub-complex. Domains are
/// ordered by their smallest vertex.
pub fn nodal_domains(mesh: &HyperbolicMesh, phi: &[f64]) -> NodalReport {
    let n = mesh.vertex_count();
    assert_eq!(phi.len(), n, "one value per vertex");
    let sup = phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cut = NODAL_THRESHOLD * sup;
    let sign: Vec<i8> = phi
        .iter()
        .map(|&v| {
            if v > cut {
                1
            } else if v < -cut {
                -1
            } else {
                0
            }
        })
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    for e in mesh.edges() {
        let (a, b) = (e[0], e[1]);
        if sign[a] != 0 && sign[a] == sign[b] {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    let mut vertex_area = vec![0.0; n];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let a = mesh.triangle_area(t) / 3.0;
        for &v in tri {
            vertex_area[v] += a;
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut domains: Vec<NodalDomain> = Vec::new();
    let mut label = vec![usize::MAX; n];
    for v in 0..n {
        if sign[v] == 0 {
            continue;
        }
        let r = find(&mut parent, v);
        if slot[r] == usize::MAX {
            slot[r] = domains.len();
            domains.push(NodalDomain {
                sign: sign[v],
                vertices: Vec::new(),
                euler_characteristic: 0,
                area: 0.0,
            });
        }
        let d = slot[r];
        label[v] = d;
        domains[d].vertices.push(v);
        domains[d].euler_characteristic += 1;
        domains[d].area += vertex_area[v];
    }
    for e in mesh.edges() {
        if label[e[0]] != usize::MAX && label[e[0]] == label[e[1]] {
            domains[label[e[0]]].euler_characteristic -= 1;
        }
    }
    for t in mesh.triangles() {
        let d = label[t[0]];
        if d != usize::MAX && d == label[t[1]] && d == label[t[2]] {
            domains[d].euler_characteristic += 1;
        }
    }
    NodalReport {
        domains,
        near_zero: sign.iter().filter(|&&s| s == 0).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesher::{geodesic_disk, induced_subcomplex, Metric};

    #[test]
    fn halves_of_a_disk() {
        let m = geodesic_disk(1.0, 0.2, Metric::Hyperbolic).unwrap();
        let x: Vec<f64> = m.provenance.iter().map(|p| p.chart[1]).collect();
        let rep = nodal_domains(&m, &x);
        assert_eq!(rep.count(), 2);
        assert_eq!(rep.count_with_sign(1), 1);
        for d in &rep.domains {
            let mut keep = vec![false; m.vertex_count()];
            d.vertices.iter().for_each(|&v| keep[v] = true);
            assert_eq!(
                d.euler_characteristic,
                induced_subcomplex(&m, &keep).euler_characteristic
            );
            assert_eq!(d.euler_characteristic, 1);
        }
        let total: f64 = rep.domains.iter().map(|d| d.area).sum();
        assert!(total < m.area());
        let one = nodal_domains(&m, &vec![2.0; m.vertex_count()]);
        assert_eq!(one.count(), 1);
        assert_eq!(one.domains[0].euler_characteristic, 1);
        assert!((one.domains[0].area - m.area()).abs() < 1e-12);
    }
}

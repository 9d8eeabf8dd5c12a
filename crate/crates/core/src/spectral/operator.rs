//! Assembly of the stiffness and lumped mass matrices.

use rayon::prelude::*;

use crate::error::SpectralError;
use crate::mesher::{HyperbolicMesh, LoopTag, Metric};

/// Boundary condition applied to the unglued boundary of a mesh.
///
/// `Dirichlet` fixes zero values on loops tagged `Dirichlet` or `GlueSeam`
/// (a free geodesic boundary); `Neumann` leaves every boundary natural.
/// Cusp rims are always natural.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
        }
    }
}

/// Symmetric sparse matrix in compressed-row form (both triangles stored).
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from unsorted triplets; duplicates are summed in input order.
    pub fn from_triplets(n: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        // stable sort keeps the summation order deterministic
        t.sort_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(t.len());
        let mut vals: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in t {
            if last == Some((i, j)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(j);
                vals.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix { n, row_ptr, cols, vals }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match r.binary_search(&j) {
            Ok(k) => self.vals[self.row_ptr[i] + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        y.par_iter_mut().enumerate().for_each(|(i, yi)| {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.vals[k] * x[self.cols[k]];
            }
            *yi = s;
        });
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut ay = vec![0.0; self.n];
        self.mul_vec(y, &mut ay);
        x.iter().zip(&ay).map(|(a, b)| a * b).sum()
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        self.vals[self.row_ptr[i]..self.row_ptr[i + 1]].iter().sum()
    }

    /// Largest `|A_ij - A_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self
            .vals
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.cols[k];
                worst = worst.max((self.vals[k] - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n)
            .flat_map(move |i| (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.cols[k], self.vals[k])))
    }
}

/// The discrete Laplacian pencil `(K, M)` on the free degrees of freedom.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub stiffness: CsrMatrix,
    /// Diagonal of the lumped mass matrix.
    pub mass: Vec<f64>,
    pub dof_vertex: Vec<usize>,
    pub vertex_dof: Vec<Option<usize>>,
    pub bc: BoundaryCondition,
    pub metric: Metric,
    pub h_max: f64,
    pub mesh_hash: String,
}

/// Cotangents of the Euclidean triangle with sides `a, b, c` at the
/// vertices opposite each side.
pub fn comparison_cotangents(a: f64, b: f64, c: f64) -> [f64; 3] {
    let area4 = 4.0 * crate::mesher::euclidean_area(a, b, c);
    let (a2, b2, c2) = (a * a, b * b, c * c);
    [(b2 + c2 - a2) / area4, (a2 + c2 - b2) / area4, (a2 + b2 - c2) / area4]
}

impl DiscreteOperator {
    pub fn dofs(&self) -> usize {
        self.dof_vertex.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_dof.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Restricts a vertex function to the degrees of freedom.
    pub fn restrict(&self, f: &[f64]) -> Vec<f64> {
        self.dof_vertex.iter().map(|&v| f[v]).collect()
    }

    /// Extends a dof vector by zero to all vertices.
    pub fn extend(&self, x: &[f64]) -> Vec<f64> {
        let mut f = vec![0.0; self.vertex_count()];
        for (d, &v) in self.dof_vertex.iter().enumerate() {
            f[v] = x[d];
        }
        f
    }

    /// `f^T M g` for vertex functions.
    pub fn mass_inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.dof_vertex
            .iter()
            .zip(&self.mass)
            .map(|(&v, m)| m * f[v] * g[v])
            .sum()
    }

    /// `f^T K g` for vertex functions.
    pub fn stiffness_inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.stiffness.bilinear(&self.restrict(f), &self.restrict(g))
    }

    /// The same pencil with every vertex outside `keep` also fixed to zero:
    /// the Dirichlet problem on the sub-complex where `keep` holds.
    pub fn restricted(&self, keep: &[bool]) -> Result<DiscreteOperator, SpectralError> {
        if keep.len() != self.vertex_count() {
            return Err(SpectralError::InvalidRequest(format!(
                "mask has {} entries for {} vertices",
                keep.len(),
                self.vertex_count()
            )));
        }
        let mut new_of_old = vec![None; self.dofs()];
        let mut dof_vertex = Vec::new();
        let mut vertex_dof = vec![None; self.vertex_count()];
        for (d, &v) in self.dof_vertex.iter().enumerate() {
            if keep[v] {
                new_of_old[d] = Some(dof_vertex.len());
                vertex_dof[v] = Some(dof_vertex.len());
                dof_vertex.push(v);
            }
        }
        if dof_vertex.is_empty() {
            return Err(SpectralError::InvalidRequest("no free degrees of freedom".into()));
        }
        let trip = self
            .stiffness
            .triplets()
            .filter_map(|(i, j, v)| Some((new_of_old[i]?, new_of_old[j]?, v)))
            .collect();
        Ok(DiscreteOperator {
            stiffness: CsrMatrix::from_triplets(dof_vertex.len(), trip),
            mass: dof_vertex
                .iter()
                .map(|&v| self.mass[self.vertex_dof[v].unwrap()])
                .collect(),
            dof_vertex,
            vertex_dof,
            bc: BoundaryCondition::Dirichlet,
            metric: self.metric,
            h_max: self.h_max,
            mesh_hash: self.mesh_hash.clone(),
        })
    }
}

pub fn assemble(mesh: &HyperbolicMesh, bc: BoundaryCondition) -> Result<DiscreteOperator, SpectralError> {
    let nv = mesh.vertex_count();
    let mut fixed = vec![false; nv];
    if bc == BoundaryCondition::Dirichlet {
        for l in &mesh.boundary_loops {
            if matches!(l.tag, LoopTag::Dirichlet | LoopTag::GlueSeam) {
                for &v in &l.vertices {
                    fixed[v] = true;
                }
            }
        }
    }
    let mut vertex_dof = vec![None; nv];
    let mut dof_vertex = Vec::with_capacity(nv);
    for v in 0..nv {
        if !fixed[v] {
            vertex_dof[v] = Some(dof_vertex.len());
            dof_vertex.push(v);
        }
    }
    if dof_vertex.is_empty() {
        return Err(SpectralError::InvalidRequest("no free degrees of freedom".into()));
    }
    struct Local {
        verts: [usize; 3],
        cot: [f64; 3],
        area: f64,
    }
    let locals: Vec<Local> = (0..mesh.triangles().len())
        .into_par_iter()
        .map(|t| {
            let s = mesh.triangle_sides(t);
            let area = mesh.triangle_area(t);
            if !(area > 0.0) {
                return Err(SpectralError::ZeroArea(t));
            }
            Ok(Local {
                verts: mesh.triangles()[t],
                cot: comparison_cotangents(s[0], s[1], s[2]),
                area,
            })
        })
        .collect::<Result<_, _>>()?;
    let mut mass_v = vec![0.0; nv];
    let mut trip = Vec::with_capacity(locals.len() * 9);
    for l in &locals {
        for k in 0..3 {
            mass_v[l.verts[k]] += l.area / 3.0;
            // edge opposite vertex k joins the other two
            let (i, j) = (l.verts[(k + 1) % 3], l.verts[(k + 2) % 3]);
            let w = 0.5 * l.cot[k];
            if let (Some(di), Some(dj)) = (vertex_dof[i], vertex_dof[j]) {
                trip.push((di, dj, -w));
                trip.push((dj, di, -w));
            }
            if let Some(di) = vertex_dof[i] {
                trip.push((di, di, w));
            }
            if let Some(dj) = vertex_dof[j] {
                trip.push((dj, dj, w));
            }
        }
    }
    let stiffness = CsrMatrix::from_triplets(dof_vertex.len(), trip);
    let mass = dof_vertex.iter().map(|&v| mass_v[v]).collect();
    Ok(DiscreteOperator {
        stiffness,
        mass,
        dof_vertex,
        vertex_dof,
        bc,
        metric: mesh.metric,
        h_max: mesh.quality().h_max,
        mesh_hash: mesh.content_hash(),
    })
}

/// `(f^T K f) / (f^T M f)` for a vertex function `f`; values on fixed
/// vertices are ignored.
pub fn rayleigh_quotient(op: &DiscreteOperator, f: &[f64]) -> Result<f64, SpectralError> {
    if f.len() != op.vertex_count() {
        return Err(SpectralError::InvalidRequest(format!(
            "function has {} values for {} vertices",
            f.len(),
            op.vertex_count()
        )));
    }
    let x = op.restrict(f);
    let den: f64 = x.iter().zip(&op.mass).map(|(v, m)| m * v * v).sum();
    if !(den > 0.0) {
        return Err(SpectralError::ZeroFunction);
    }
    Ok(op.stiffness.bilinear(&x, &x) / den)
}

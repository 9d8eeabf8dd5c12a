//! Lowest eigenpairs of the pencil `(K, M)` by shift-invert block subspace
//! iteration with Rayleigh–Ritz projection.

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Mat, Par, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::operator::{BoundaryCondition, DiscreteOperator};
use crate::error::SpectralError;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 0x5eed;

// below this many dofs the pencil is solved densely
const DENSE_LIMIT: usize = 400;

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub m: usize,
    pub tol: f64,
    pub seed: u64,
    pub max_iter: usize,
    pub shift: f64,
    /// Extra block columns beyond `m`; `None` picks `max(m, 8)`.
    pub guard: Option<usize>,
}

impl SolverOptions {
    pub fn new(m: usize) -> Self {
        SolverOptions {
            m,
            tol: DEFAULT_TOL,
            seed: DEFAULT_SEED,
            max_iter: 500,
            shift: 1e-2,
            guard: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    /// Vertex-indexed, mass-orthonormal, zero on fixed vertices.
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
    pub residual_norms: Vec<f64>,
    pub h_max: f64,
    #[serde(serialize_with = "ser_bc")]
    pub bc: BoundaryCondition,
    pub iterations: usize,
    pub mesh_hash: String,
}

fn ser_bc<S: serde::Serializer>(bc: &BoundaryCondition, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(bc.as_str())
}

pub fn lowest_eigenpairs(op: &DiscreteOperator, m: usize, tol: f64) -> Result<SpectralResult, SpectralError> {
    let mut o = SolverOptions::new(m);
    o.tol = tol;
    lowest_eigenpairs_with(op, &o)
}

/// `‖K x − λ M x‖ / ‖M x‖` in the Euclidean norm of dof vectors.
pub fn residual_norm(op: &DiscreteOperator, x: &[f64], lambda: f64) -> f64 {
    let mut kx = vec![0.0; x.len()];
    op.stiffness.mul_vec(x, &mut kx);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..x.len() {
        let mx = op.mass[i] * x[i];
        num += (kx[i] - lambda * mx).powi(2);
        den += mx * mx;
    }
    (num / den).sqrt()
}

pub fn lowest_eigenpairs_with(op: &DiscreteOperator, o: &SolverOptions) -> Result<SpectralResult, SpectralError> {
    let n = op.dofs();
    if o.m == 0 || o.m >= n {
        return Err(SpectralError::InvalidRequest(format!(
            "need 1 <= m < {n} dofs, got m = {}",
            o.m
        )));
    }
    if !(o.tol > 0.0) {
        return Err(SpectralError::InvalidRequest("tolerance must be positive".into()));
    }
    if op.mass.iter().any(|&w| !(w > 0.0)) {
        return Err(SpectralError::InvalidRequest(
            "mass matrix has a non-positive entry".into(),
        ));
    }
    faer::set_global_parallelism(Par::Seq);
    let (vals, vecs, iterations) = if n <= DENSE_LIMIT {
        dense(op, o.m)?
    } else {
        subspace(op, o)?
    };
    let mut eigenvalues = Vec::with_capacity(o.m);
    let mut eigenvectors = Vec::with_capacity(o.m);
    let mut residual_norms = Vec::with_capacity(o.m);
    for (lambda, mut x) in vals.into_iter().zip(vecs) {
        fix_sign(&mut x);
        residual_norms.push(residual_norm(op, &x, lambda));
        eigenvalues.push(lambda);
        eigenvectors.push(op.extend(&x));
    }
    let worst = residual_norms.iter().cloned().fold(0.0, f64::max);
    if !(worst <= o.tol) {
        return Err(SpectralError::NotConverged {
            iterations,
            worst_residual: worst,
            residuals: residual_norms,
        });
    }
    Ok(SpectralResult {
        eigenvalues,
        eigenvectors,
        residual_norms,
        h_max: op.h_max,
        bc: op.bc,
        iterations,
        mesh_hash: op.mesh_hash.clone(),
    })
}

// largest-magnitude entry (first on ties) made positive
fn fix_sign(x: &mut [f64]) {
    let mut best = 0;
    for i in 1..x.len() {
        if x[i].abs() > x[best].abs() * (1.0 + 1e-9) {
            best = i;
        }
    }
    if x[best] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

type Pairs = (Vec<f64>, Vec<Vec<f64>>, usize);

fn dense(op: &DiscreteOperator, m: usize) -> Result<Pairs, SpectralError> {
    let n = op.dofs();
    let s: Vec<f64> = op.mass.iter().map(|w| 1.0 / w.sqrt()).collect();
    let mut a = Mat::<f64>::zeros(n, n);
    for (i, j, v) in op.stiffness.triplets() {
        a[(i, j)] = v * s[i] * s[j];
    }
    let e = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| SpectralError::Factorization(format!("{e:?}")))?;
    let vals = e.S().column_vector();
    let u = e.U();
    let lam = (0..m).map(|k| vals[k]).collect();
    let vecs = (0..m).map(|k| (0..n).map(|i| u[(i, k)] * s[i]).collect()).collect();
    Ok((lam, vecs, 1))
}

fn spmm(op: &DiscreteOperator, x: &Mat<f64>) -> Mat<f64> {
    let mut y = Mat::<f64>::zeros(x.nrows(), x.ncols());
    let cols: Vec<Vec<f64>> = (0..x.ncols())
        .into_par_iter()
        .map(|j| {
            let mut out = vec![0.0; x.nrows()];
            op.stiffness.mul_vec(x.col_as_slice(j), &mut out);
            out
        })
        .collect();
    for (j, c) in cols.into_iter().enumerate() {
        y.col_as_slice_mut(j).copy_from_slice(&c);
    }
    y
}

fn subspace(op: &DiscreteOperator, o: &SolverOptions) -> Result<Pairs, SpectralError> {
    let n = op.dofs();
    let p = (o.m + o.guard.unwrap_or(o.m.max(8))).min(n);
    let shifted: Vec<Triplet<usize, usize, f64>> = op
        .stiffness
        .triplets()
        .filter(|&(i, j, _)| j <= i)
        .map(|(i, j, v)| Triplet::new(i, j, if i == j { v + o.shift * op.mass[i] } else { v }))
        .collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &shifted)
        .map_err(|e| SpectralError::Factorization(format!("{e:?}")))?;
    let llt = a
        .sp_cholesky(Side::Lower)
        .map_err(|e| SpectralError::Factorization(format!("{e:?}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let mut x = Mat::<f64>::from_fn(n, p, |_, _| rng.gen::<f64>() - 0.5);
    let sqm: Vec<f64> = op.mass.iter().map(|w| w.sqrt()).collect();
    let mut best: Option<(f64, Pairs)> = None;
    for it in 1..=o.max_iter {
        // y = (K + σM)^{-1} M x
        let mut y = Mat::<f64>::from_fn(n, p, |i, j| op.mass[i] * x[(i, j)]);
        llt.solve_in_place(y.as_mut());
        // M-orthonormal basis of span(y)
        let z = Mat::<f64>::from_fn(n, p, |i, j| sqm[i] * y[(i, j)]);
        let g = z.transpose() * &z;
        let ge = g
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| SpectralError::Factorization(format!("{e:?}")))?;
        let gs = ge.S().column_vector();
        let gmax = (0..p).map(|k| gs[k]).fold(0.0, f64::max);
        let keep: Vec<usize> = (0..p).filter(|&k| gs[k] > 1e-13 * gmax).collect();
        if keep.len() < o.m {
            return Err(SpectralError::Factorization("search space collapsed".into()));
        }
        let q = keep.len();
        let gu = ge.U();
        let c = Mat::<f64>::from_fn(p, q, |i, k| gu[(i, keep[k])] / gs[keep[k]].sqrt());
        let b = &y * &c;
        let kb = spmm(op, &b);
        let mut h = b.transpose() * &kb;
        for i in 0..q {
            for j in 0..i {
                let s = 0.5 * (h[(i, j)] + h[(j, i)]);
                h[(i, j)] = s;
                h[(j, i)] = s;
            }
        }
        let he = h
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| SpectralError::Factorization(format!("{e:?}")))?;
        let theta = he.S().column_vector();
        let xu = &b * he.U();
        let kx = &kb * he.U();
        let mut worst = 0.0f64;
        for k in 0..o.m {
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..n {
                let mx = op.mass[i] * xu[(i, k)];
                num += (kx[(i, k)] - theta[k] * mx).powi(2);
                den += mx * mx;
            }
            worst = worst.max((num / den).sqrt());
        }
        let pairs = || -> Pairs {
            (
                (0..o.m).map(|k| theta[k]).collect(),
                (0..o.m).map(|k| xu.col_as_slice(k).to_vec()).collect(),
                it,
            )
        };
        if worst <= o.tol {
            return Ok(pairs());
        }
        if best.as_ref().is_none_or(|(w, _)| worst < *w) {
            best = Some((worst, pairs()));
        }
        x = if q == p {
            xu
        } else {
            Mat::from_fn(n, p, |i, j| if j < q { xu[(i, j)] } else { rng.gen::<f64>() - 0.5 })
        };
    }
    // hand back the best iterate; the caller reports non-convergence
    let (_, mut pairs) = best.expect("at least one iteration");
    pairs.2 = o.max_iter;
    Ok(pairs)
}

/// Groups consecutive eigenvalues whose gap is at most `rel_gap` relative
/// to their magnitude (or `abs_floor` near zero). Returns index ranges.
pub fn clusters(eigenvalues: &[f64], rel_gap: f64, abs_floor: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=eigenvalues.len() {
        let split = i == eigenvalues.len() || {
            let (a, b) = (eigenvalues[i - 1], eigenvalues[i]);
            (b - a).abs() > (rel_gap * a.abs().max(b.abs())).max(abs_floor)
        };
        if split {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// Index, eigenvalue and residual per line.
pub fn spectrum_csv(result: &SpectralResult) -> String {
    let mut s = String::from("index,eigenvalue,residual\n");
    for (i, (l, r)) in result.eigenvalues.iter().zip(&result.residual_norms).enumerate() {
        s.push_str(&format!("{i},{l:.12e},{r:.3e}\n"));
    }
    s
}

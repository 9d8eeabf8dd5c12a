//! Mesh refinement studies with Richardson extrapolation.

use serde::Serialize;

use super::operator::{assemble, BoundaryCondition, DiscreteOperator};
use super::solver::{lowest_eigenpairs, DEFAULT_TOL};
use crate::error::{Error, SpectralError};
use crate::geometry::surface::FNSurface;
use crate::mesher::{mesh_surface, MeshOptions};

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub h: Vec<f64>,
    pub h_max: Vec<f64>,
    pub dofs: Vec<usize>,
    /// `eigenvalues[level][index]`.
    pub eigenvalues: Vec<Vec<f64>>,
    /// Per eigenvalue, from the two finest levels assuming `O(h^2)` error.
    pub extrapolated: Vec<f64>,
    /// Per eigenvalue, from the three finest levels; `None` when the
    /// differences change sign.
    pub observed_order: Vec<Option<f64>>,
    pub monotone: Vec<bool>,
}

/// Order `p` with `(a1 - a2) / (a2 - a3) = (h1^p - h2^p) / (h2^p - h3^p)`.
pub fn observed_order(h: [f64; 3], a: [f64; 3]) -> Option<f64> {
    let (d1, d2) = (a[0] - a[1], a[1] - a[2]);
    if d1 == 0.0 || d2 == 0.0 || d1.signum() != d2.signum() {
        return None;
    }
    let target = d1 / d2;
    let f = |p: f64| (h[0].powf(p) - h[1].powf(p)) / (h[1].powf(p) - h[2].powf(p)) - target;
    let (mut lo, mut hi) = (1e-3, 12.0);
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `a` at `h = 0` from values at `h1 > h2` assuming `a(h) = a0 + c h^2`.
pub fn richardson(h1: f64, a1: f64, h2: f64, a2: f64) -> f64 {
    (a2 * h1 * h1 - a1 * h2 * h2) / (h1 * h1 - h2 * h2)
}

/// Runs `build` at each mesh size (strictly decreasing, at least three)
/// and extrapolates the `m` lowest eigenvalues.
pub fn convergence_study_with<F>(h_list: &[f64], m: usize, mut build: F) -> Result<ConvergenceReport, Error>
where
    F: FnMut(f64) -> Result<DiscreteOperator, Error>,
{
    if h_list.len() < 3 {
        return Err(SpectralError::Convergence(format!("need at least 3 mesh sizes, got {}", h_list.len())).into());
    }
    for w in h_list.windows(2) {
        if !(w[1] < w[0]) {
            return Err(SpectralError::Convergence(format!(
                "mesh sizes must be strictly decreasing, got {} then {}",
                w[0], w[1]
            ))
            .into());
        }
    }
    let mut rep = ConvergenceReport {
        h: h_list.to_vec(),
        h_max: Vec::new(),
        dofs: Vec::new(),
        eigenvalues: Vec::new(),
        extrapolated: Vec::new(),
        observed_order: Vec::new(),
        monotone: Vec::new(),
    };
    for &h in h_list {
        let op = build(h)?;
        let r = lowest_eigenpairs(&op, m, DEFAULT_TOL)?;
        rep.h_max.push(op.h_max);
        rep.dofs.push(op.dofs());
        rep.eigenvalues.push(r.eigenvalues);
    }
    let l = h_list.len();
    for k in 0..m {
        let a: Vec<f64> = rep.eigenvalues.iter().map(|e| e[k]).collect();
        let diffs: Vec<f64> = a.windows(2).map(|w| w[1] - w[0]).collect();
        rep.monotone
            .push(diffs.iter().all(|d| *d >= 0.0) || diffs.iter().all(|d| *d <= 0.0));
        rep.extrapolated
            .push(richardson(h_list[l - 2], a[l - 2], h_list[l - 1], a[l - 1]));
        rep.observed_order.push(observed_order(
            [h_list[l - 3], h_list[l - 2], h_list[l - 1]],
            [a[l - 3], a[l - 2], a[l - 1]],
        ));
    }
    Ok(rep)
}

pub fn convergence_study(
    surface: &FNSurface,
    h_list: &[f64],
    m: usize,
    bc: BoundaryCondition,
) -> Result<ConvergenceReport, Error> {
    convergence_study_with(h_list, m, |h| {
        let sm = mesh_surface(surface, &MeshOptions::new(h))?;
        Ok(assemble(&sm.mesh, bc)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_recovers_power_law() {
        let h = [0.2, 0.1, 0.07];
        let a = h.map(|x: f64| 3.0 + 0.5 * x.powf(1.5));
        assert!((observed_order(h, a).unwrap() - 1.5).abs() < 1e-9);
        assert!((richardson(0.1, 3.0 + 0.1f64.powi(2), 0.05, 3.0 + 0.05f64.powi(2)) - 3.0).abs() < 1e-14);
        assert!(observed_order(h, [1.0, 2.0, 1.5]).is_none());
    }

    #[test]
    fn rejects_bad_sizes() {
        let never = |_h: f64| -> Result<DiscreteOperator, Error> { unreachable!() };
        assert!(convergence_study_with(&[0.2, 0.1, 0.1], 2, never).is_err());
        assert!(convergence_study_with(&[0.2, 0.1], 2, never).is_err());
    }
}

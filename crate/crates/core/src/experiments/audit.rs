//! Checks of a computed spectrum against the small-eigenvalue theorems.

use crate::error::{Error, ExperimentError};
use crate::geometry::bounds::{BoundReport, LAMBDA0_HYPERBOLIC_PLANE};
use crate::geometry::surface::FNSurface;
use crate::mesher::HyperbolicMesh;
use crate::spectral::{clusters, SpectralResult, CLUSTER_GAP};
use crate::verdict::Verdict;

use super::nodal::nodal_domains;

/// Relative slack for comparing discrete eigenvalues with thresholds.
pub const SOLVER_SLACK: f64 = 0.05;

// eigenvalues below this count as zero when clustering
const ZERO_FLOOR: f64 = 1e-8;

/// `Λ_lower` from the report, or `1/4` when no systole bound exists.
pub fn lambda_lower(bounds: &BoundReport) -> f64 {
    bounds.lambda_interval.map_or(LAMBDA0_HYPERBOLIC_PLANE, |iv| iv.0)
}

pub fn count_at_most(eigenvalues: &[f64], limit: f64) -> usize {
    eigenvalues.iter().filter(|&&l| l <= limit).count()
}

/// The four audit checks: small-eigenvalue count, the eigenvalue of index
/// `-χ` above `1/4`, negative Euler characteristic of nodal domains of
/// small eigenfunctions, and cluster sizes.
pub fn small_eigenvalue_audit(
    surface: &FNSurface,
    mesh: &HyperbolicMesh,
    result: &SpectralResult,
    bounds: &BoundReport,
) -> Result<Vec<Verdict>, Error> {
    let chi = surface.euler_characteristic();
    let nchi = (-chi) as usize;
    let ev = &result.eigenvalues;
    if ev.len() < nchi + 1 {
        return Err(ExperimentError::InsufficientEigenpairs {
            needed: nchi + 1,
            have: ev.len(),
        }
        .into());
    }
    let lower = lambda_lower(bounds);
    let mut out = Vec::new();
    let count = count_at_most(ev, lower);
    out.push(Verdict::at_most(
        "count_below_lambda_lower",
        count as f64,
        nchi as f64,
        format!("{count} eigenvalues <= {lower:.9}, limit -chi = {nchi}"),
    ));
    let threshold = LAMBDA0_HYPERBOLIC_PLANE * (1.0 - SOLVER_SLACK);
    out.push(Verdict::above(
        "lambda_chi_above_quarter",
        ev[nchi],
        threshold,
        format!("lambda_{nchi} = {:.9} vs {threshold}", ev[nchi]),
    ));
    let mut worst_chi = i64::MIN;
    let mut checked = 0;
    for (i, &l) in ev.iter().enumerate() {
        if l > LAMBDA0_HYPERBOLIC_PLANE {
            continue;
        }
        checked += 1;
        let rep = nodal_domains(mesh, &result.eigenvectors[i]);
        if let Some(c) = rep.max_euler_characteristic() {
            worst_chi = worst_chi.max(c);
        }
    }
    out.push(Verdict::new(
        "nodal_domains_negative_euler",
        worst_chi < 0,
        -(worst_chi as f64),
        format!("{checked} eigenfunctions with lambda <= 1/4, largest domain chi {worst_chi}"),
    ));
    let cl = clusters(ev, CLUSTER_GAP, ZERO_FLOOR);
    let c1 = cl.iter().find(|r| r.contains(&1)).cloned().unwrap_or(1..2);
    let truncated = c1.end == ev.len();
    let limit1 = (5 - chi) as usize;
    out.push(Verdict::at_most(
        "cluster_lambda1",
        c1.len() as f64,
        limit1 as f64,
        format!(
            "lambda_1 cluster {:?} of size {}{}, limit 5 - chi = {limit1}",
            c1,
            c1.len(),
            if truncated {
                " (reaches the last computed eigenvalue)"
            } else {
                ""
            }
        ),
    ));
    let small = cl
        .iter()
        .filter(|r| ev[r.start] > ZERO_FLOOR && ev[r.end - 1] <= LAMBDA0_HYPERBOLIC_PLANE)
        .map(|r| r.len())
        .max()
        .unwrap_or(0);
    let limit_small = nchi.saturating_sub(1);
    out.push(Verdict::at_most(
        "cluster_small",
        small as f64,
        limit_small as f64,
        format!("largest cluster in (0, 1/4] has size {small}, limit -chi - 1 = {limit_small}"),
    ));
    Ok(out)
}

/// Eigenfunction `i` has at most `i + 1` nodal domains, for `i < count`.
pub fn courant_check(mesh: &HyperbolicMesh, result: &SpectralResult, count: usize) -> Verdict {
    let upto = count.min(result.eigenvectors.len());
    let mut worst = i64::MAX;
    let mut counts = Vec::with_capacity(upto);
    for i in 0..upto {
        let c = nodal_domains(mesh, &result.eigenvectors[i]).count();
        counts.push(c);
        worst = worst.min(i as i64 + 1 - c as i64);
    }
    Verdict::new("courant", worst >= 0, worst as f64, format!("domain counts {counts:?}"))
}

/// Every base eigenvalue at most `1/4` has a cover eigenvalue within
/// `2 · SOLVER_SLACK` relative (plus an absolute `1e-8`).
pub fn spectrum_contained(base: &[f64], cover: &[f64]) -> Verdict {
    let mut worst = f64::INFINITY;
    let mut details = Vec::new();
    for &b in base.iter().filter(|&&b| b <= LAMBDA0_HYPERBOLIC_PLANE) {
        let tol = 2.0 * SOLVER_SLACK * b.abs() + 1e-8;
        let d = cover.iter().map(|c| (c - b).abs()).fold(f64::INFINITY, f64::min);
        worst = worst.min(tol - d);
        details.push(format!("{b:.9}:{d:.2e}"));
    }
    Verdict::new(
        "base_spectrum_in_cover",
        worst >= 0.0,
        worst,
        format!("base eigenvalue:distance {}", details.join(" ")),
    )
}

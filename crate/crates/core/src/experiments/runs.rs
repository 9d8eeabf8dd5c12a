//! End-to-end runs: build, mesh, solve and check.

use crate::error::Error;
use crate::geometry::bounds::{buser_rayleigh_bound, BoundReport};
use crate::geometry::surface::FNSurface;
use crate::mesher::{mesh_surface, MeshOptions, SurfaceMesh};
use crate::spectral::{assemble, lowest_eigenpairs_with, BoundaryCondition, SolverOptions, SpectralResult};
use crate::verdict::Verdict;

use super::audit::{count_at_most, small_eigenvalue_audit, spectrum_contained, SOLVER_SLACK};
use super::family::{buser_surface_twisted, buser_test_functions, randol_family, verify_variational, TestFamily};

/// Neumann spectrum of a glued surface mesh.
pub fn surface_spectrum(sm: &SurfaceMesh, m: usize, seed: u64) -> Result<SpectralResult, Error> {
    let op = assemble(&sm.mesh, BoundaryCondition::Neumann)?;
    let mut o = SolverOptions::new(m.min(op.dofs() - 1));
    o.seed = seed;
    Ok(lowest_eigenpairs_with(&op, &o)?)
}

/// Default eigenpair count `-χ + 3`.
pub fn default_m(surface: &FNSurface) -> usize {
    (3 - surface.euler_characteristic()) as usize
}

#[derive(Debug)]
pub struct BuserOutcome {
    pub surface: FNSurface,
    pub mesh: SurfaceMesh,
    pub family: TestFamily,
    pub result: SpectralResult,
    pub bounds: BoundReport,
    pub verdicts: Vec<Verdict>,
}

/// Buser's construction on the genus-`genus` surface with all pants curves
/// of length `l`: the plateau family, the eigenvalues it forces, and the
/// audit that bounds them from the other side.
pub fn run_buser(
    genus: usize,
    l: f64,
    twists: Option<&[f64]>,
    h: f64,
    m: Option<usize>,
    seed: u64,
) -> Result<BuserOutcome, Error> {
    let nc = 3 * genus.max(2) - 3;
    let zeros = vec![0.0; nc];
    let surface = buser_surface_twisted(genus, l, twists.unwrap_or(&zeros))?;
    let mesh = mesh_surface(&surface, &MeshOptions::new(h))?;
    let family = buser_test_functions(&surface, &mesh)?;
    let m = m.unwrap_or_else(|| default_m(&surface));
    let result = surface_spectrum(&mesh, m, seed)?;
    let bounds = BoundReport::for_surface(&surface)?;
    let mut verdicts = vec![
        family.bound_verdict(3.0 * result.h_max),
        verify_variational(&family, &result)?,
    ];
    let nchi = (-surface.euler_characteristic()) as usize;
    let eps = buser_rayleigh_bound(3.0 * l)? * (1.0 + SOLVER_SLACK);
    let below = count_at_most(&result.eigenvalues, eps);
    verdicts.push(Verdict::new(
        "count_below_buser_bound",
        below >= nchi,
        below as f64 - nchi as f64,
        format!("{below} eigenvalues <= {eps:.9}, need -chi = {nchi}"),
    ));
    verdicts.extend(small_eigenvalue_audit(&surface, &mesh.mesh, &result, &bounds)?);
    Ok(BuserOutcome {
        surface,
        mesh,
        family,
        result,
        bounds,
        verdicts,
    })
}

#[derive(Debug)]
pub struct RandolOutcome {
    pub cover: SurfaceMesh,
    pub family: TestFamily,
    pub base_result: SpectralResult,
    pub cover_result: SpectralResult,
    pub verdicts: Vec<Verdict>,
}

/// Randol's cover of order `(k + 2) n` along gluing `curve` of `base`, the
/// `n` cut-off functions and the eigenvalues they force.
pub fn run_randol(
    base: &FNSurface,
    curve: usize,
    k: usize,
    n: usize,
    h: f64,
    m: Option<usize>,
    seed: u64,
) -> Result<RandolOutcome, Error> {
    let base_mesh = mesh_surface(base, &MeshOptions::new(h))?;
    let base_result = surface_spectrum(&base_mesh, default_m(base), seed)?;
    let (cover, family) = randol_family(base, curve, k, n, h)?;
    let m = m.unwrap_or(n + 3).max(n + 1);
    let cover_result = surface_spectrum(&cover, m, seed)?;
    let bound = family.bounds[0] * (1.0 + SOLVER_SLACK);
    let below = count_at_most(&cover_result.eigenvalues, bound);
    let order = (k + 2) * n;
    let verdicts = vec![
        Verdict::new(
            "cover_order",
            cover.sheets == order,
            0.0,
            format!("{} sheets, (k + 2) n = {order}", cover.sheets),
        ),
        family.bound_verdict(SOLVER_SLACK),
        verify_variational(&family, &cover_result)?,
        Verdict::new(
            "count_below_randol_bound",
            below >= n,
            below as f64 - n as f64,
            format!("{below} eigenvalues <= {bound:.9}, need n = {n}"),
        ),
        spectrum_contained(&base_result.eigenvalues, &cover_result.eigenvalues),
    ];
    Ok(RandolOutcome {
        cover,
        family,
        base_result,
        cover_result,
        verdicts,
    })
}

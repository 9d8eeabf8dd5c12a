//! The small-eigenvalue constructions, nodal-domain analysis and audits,
//! combining geometry, mesher and spectral.

pub mod audit;
pub mod campaign;
pub mod family;
pub mod nodal;
pub mod runs;

pub use audit::{count_at_most, courant_check, lambda_lower, small_eigenvalue_audit, spectrum_contained, SOLVER_SLACK};
pub use campaign::{campaign_csv, run_campaign, BoundColumns, CampaignConfig, CampaignRow, SurfaceSpec, CHECKS};
pub use family::{
    buser_surface, buser_surface_twisted, buser_test_functions, randol_family, randol_functions, random_twist_surface,
    verify_variational, Construction, TestFamily, MIN_BAND_LAYERS,
};
pub use nodal::{nodal_domains, NodalDomain, NodalReport, NODAL_THRESHOLD};
pub use runs::{default_m, run_buser, run_randol, surface_spectrum, BuserOutcome, RandolOutcome};

//! Verification campaigns: many surfaces, one CSV row per check.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ExperimentError};
use crate::geometry::bounds::{buser_rayleigh_bound, BoundReport};
use crate::geometry::surface::{FNSurface, SurfaceFile};
use crate::mesher::{mesh_surface, MeshOptions};
use crate::spectral::DEFAULT_SEED;
use crate::verdict::Verdict;

use super::audit::{courant_check, small_eigenvalue_audit};
use super::family::{buser_surface_twisted, buser_test_functions, random_twist_surface, verify_variational};
use super::runs::{default_m, surface_spectrum};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceSpec {
    Buser {
        name: String,
        genus: usize,
        ell: f64,
        #[serde(default)]
        twists: Option<Vec<f64>>,
    },
    RandomTwist {
        name: String,
        genus: usize,
        ell_min: f64,
        ell_max: f64,
        seed: u64,
    },
    File {
        name: String,
        path: PathBuf,
    },
    Inline {
        name: String,
        surface: SurfaceFile,
    },
}

impl SurfaceSpec {
    pub fn name(&self) -> &str {
        match self {
            SurfaceSpec::Buser { name, .. }
            | SurfaceSpec::RandomTwist { name, .. }
            | SurfaceSpec::File { name, .. }
            | SurfaceSpec::Inline { name, .. } => name,
        }
    }

    /// Relative file paths resolve against `base_dir`.
    pub fn build(&self, base_dir: &Path) -> Result<FNSurface, Error> {
        match self {
            SurfaceSpec::Buser { genus, ell, twists, .. } => {
                let zeros = vec![0.0; 3 * (*genus).max(2) - 3];
                buser_surface_twisted(*genus, *ell, twists.as_deref().unwrap_or(&zeros))
            }
            SurfaceSpec::RandomTwist {
                genus,
                ell_min,
                ell_max,
                seed,
                ..
            } => random_twist_surface(*genus, *ell_min, *ell_max, *seed),
            SurfaceSpec::File { path, .. } => FNSurface::from_json_file(&base_dir.join(path)),
            SurfaceSpec::Inline { surface, .. } => Ok(surface.clone().into_surface()?),
        }
    }
}

pub const CHECKS: [&str; 4] = ["buser", "variational", "audit", "courant"];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub surfaces: Vec<SurfaceSpec>,
    pub h: f64,
    #[serde(default)]
    pub m: Option<usize>,
    pub checks: Vec<String>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl CampaignConfig {
    pub fn from_json_str(text: &str) -> Result<Self, Error> {
        let c: CampaignConfig = serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.surfaces.is_empty() {
            return Err(ExperimentError::Config("no surfaces".into()).into());
        }
        if !(self.h > 0.0) {
            return Err(ExperimentError::Config(format!("h must be positive, got {}", self.h)).into());
        }
        for c in &self.checks {
            if !CHECKS.contains(&c.as_str()) {
                return Err(ExperimentError::Config(format!("unknown check {c:?}; known: {CHECKS:?}")).into());
            }
        }
        let mut names: Vec<&str> = self.surfaces.iter().map(|s| s.name()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(ExperimentError::Config("surface names must be unique".into()).into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignRow {
    pub surface: String,
    pub verdict: Verdict,
    pub bounds: BoundColumns,
}

/// Closed-form values reported beside every verdict.
#[derive(Debug, Clone, Serialize)]
pub struct BoundColumns {
    pub area: f64,
    pub euler_char: i64,
    pub sys_upper: f64,
    pub lambda_lower: f64,
    pub lambda_upper: f64,
    pub small_count_bound: u64,
    pub mondal_delta: f64,
    pub buser_bound: f64,
    pub collar_widths: String,
}

impl BoundColumns {
    fn new(surface: &FNSurface, b: &BoundReport) -> Self {
        let (lo, hi) = b.lambda_interval.unwrap_or((f64::NAN, f64::NAN));
        let worst_sum = surface
            .blocks
            .iter()
            .map(|bl| bl.boundary_lengths.iter().flatten().sum::<f64>())
            .fold(0.0, f64::max);
        BoundColumns {
            area: b.area,
            euler_char: b.euler_char,
            sys_upper: b.sys_upper,
            lambda_lower: lo,
            lambda_upper: hi,
            small_count_bound: b.small_count_bound,
            mondal_delta: b.mondal_delta.unwrap_or(f64::NAN),
            buser_bound: buser_rayleigh_bound(worst_sum).unwrap_or(f64::NAN),
            collar_widths: b
                .collar_widths
                .values()
                .map(|w| format!("{w:.9}"))
                .collect::<Vec<_>>()
                .join(";"),
        }
    }
}

fn run_surface(spec: &SurfaceSpec, cfg: &CampaignConfig, base_dir: &Path) -> Result<Vec<CampaignRow>, Error> {
    let surface = spec.build(base_dir)?;
    let bounds = BoundReport::for_surface(&surface)?;
    let cols = BoundColumns::new(&surface, &bounds);
    let sm = mesh_surface(&surface, &MeshOptions::new(cfg.h))?;
    let m = cfg.m.unwrap_or_else(|| default_m(&surface));
    let result = surface_spectrum(&sm, m, cfg.seed.unwrap_or(DEFAULT_SEED))?;
    let mut verdicts = Vec::new();
    let wants = |c: &str| cfg.checks.iter().any(|x| x == c);
    if wants("buser") || wants("variational") {
        let fam = buser_test_functions(&surface, &sm)?;
        if wants("buser") {
            verdicts.push(fam.bound_verdict(3.0 * result.h_max));
        }
        if wants("variational") {
            verdicts.push(verify_variational(&fam, &result)?);
        }
    }
    if wants("audit") {
        verdicts.extend(small_eigenvalue_audit(&surface, &sm.mesh, &result, &bounds)?);
    }
    if wants("courant") {
        verdicts.push(courant_check(&sm.mesh, &result, 10));
    }
    Ok(verdicts
        .into_iter()
        .map(|verdict| CampaignRow {
            surface: spec.name().to_string(),
            verdict,
            bounds: cols.clone(),
        })
        .collect())
}

/// Runs every surface in parallel; rows come back in configuration order.
pub fn run_campaign(cfg: &CampaignConfig, base_dir: &Path) -> Result<Vec<CampaignRow>, Error> {
    cfg.validate()?;
    let per: Vec<Result<Vec<CampaignRow>, Error>> =
        cfg.surfaces.par_iter().map(|s| run_surface(s, cfg, base_dir)).collect();
    let mut rows = Vec::new();
    for (spec, r) in cfg.surfaces.iter().zip(per) {
        match r {
            Ok(v) => rows.extend(v),
            Err(e) => rows.push(CampaignRow {
                surface: spec.name().to_string(),
                verdict: Verdict::new("run", false, f64::NAN, e.to_string()),
                bounds: BoundColumns {
                    area: f64::NAN,
                    euler_char: 0,
                    sys_upper: f64::NAN,
                    lambda_lower: f64::NAN,
                    lambda_upper: f64::NAN,
                    small_count_bound: 0,
                    mondal_delta: f64::NAN,
                    buser_bound: f64::NAN,
                    collar_widths: String::new(),
                },
            }),
        }
    }
    Ok(rows)
}

pub fn campaign_csv(rows: &[CampaignRow]) -> Result<String, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "surface",
        "check",
        "verdict",
        "margin",
        "detail",
        "area",
        "euler_char",
        "sys_upper",
        "lambda_lower",
        "lambda_upper",
        "small_count_bound",
        "mondal_delta",
        "buser_bound",
        "collar_widths",
    ])
    .map_err(csv_err)?;
    for r in rows {
        let b = &r.bounds;
        w.write_record([
            r.surface.clone(),
            r.verdict.name.clone(),
            r.verdict.label().to_string(),
            format!("{:.9e}", r.verdict.margin),
            r.verdict.detail.clone(),
            format!("{:.12}", b.area),
            b.euler_char.to_string(),
            format!("{:.12}", b.sys_upper),
            format!("{:.12}", b.lambda_lower),
            format!("{:.12}", b.lambda_upper),
            b.small_count_bound.to_string(),
            format!("{:.12}", b.mondal_delta),
            format!("{:.12}", b.buser_bound),
            b.collar_widths.clone(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| csv_err(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    std::io::Error::other(e.to_string()).into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let c = CampaignConfig::from_json_str(
            r#"{"surfaces": [{"kind": "buser", "name": "b", "genus": 2, "ell": 0.1},
                             {"kind": "random_twist", "name": "r", "genus": 2, "ell_min": 0.5, "ell_max": 1.5, "seed": 1}],
                "h": 0.2, "checks": ["audit"]}"#,
        )
        .unwrap();
        assert_eq!(c.surfaces.len(), 2);
        assert!(CampaignConfig::from_json_str(r#"{"surfaces": [], "h": 0.2, "checks": []}"#).is_err());
        assert!(CampaignConfig::from_json_str(
            r#"{"surfaces": [{"kind": "buser", "name": "b", "genus": 2, "ell": 0.1}], "h": 0.2, "checks": ["nope"]}"#
        )
        .is_err());
    }

    #[test]
    fn small_campaign_is_reproducible() {
        let c = CampaignConfig::from_json_str(
            r#"{"surfaces": [{"kind": "random_twist", "name": "r", "genus": 2, "ell_min": 0.5, "ell_max": 1.5, "seed": 7}],
                "h": 0.25, "m": 5, "checks": ["audit", "courant"]}"#,
        )
        .unwrap();
        let a = campaign_csv(&run_campaign(&c, Path::new(".")).unwrap()).unwrap();
        let b = campaign_csv(&run_campaign(&c, Path::new(".")).unwrap()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 1 + 5 + 1);
    }
}

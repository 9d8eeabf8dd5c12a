//! Test-function families whose Rayleigh quotients force small eigenvalues.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, ExperimentError};
use crate::geometry::bounds::{buser_rayleigh_bound, gauss_bonnet_area, randol_quotient_bound};
use crate::geometry::surface::{closed_surface, FNSurface};
use crate::geometry::trig::{collar_width, length_for_collar_width};
use crate::mesher::{cyclic_cover_mesh, MeshOptions, SurfaceMesh};
use crate::spectral::{assemble, rayleigh_quotient, BoundaryCondition, DiscreteOperator, SpectralResult};
use crate::verdict::Verdict;

/// Fewest mesh layers allowed across a cut-off band.
pub const MIN_BAND_LAYERS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Construction {
    Buser,
    Randol,
    Custom,
}

#[derive(Debug, Clone, Serialize)]
pub struct TestFamily {
    pub construction: Construction,
    #[serde(skip)]
    pub functions: Vec<Vec<f64>>,
    pub quotients: Vec<f64>,
    /// Continuum bound each quotient is compared with.
    pub bounds: Vec<f64>,
    /// Per function, the smallest `C >= 0` with `q <= bound (1 + C h_max)`.
    pub slack_constants: Vec<f64>,
    pub h_max: f64,
    /// Mesh layers across the cut-off band.
    pub band_layers: usize,
    pub mesh_hash: String,
}

impl TestFamily {
    /// Family of arbitrary vertex functions on an operator.
    pub fn custom(op: &DiscreteOperator, functions: Vec<Vec<f64>>) -> Result<Self, Error> {
        let quotients = functions
            .iter()
            .map(|f| rayleigh_quotient(op, f))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(TestFamily {
            construction: Construction::Custom,
            bounds: quotients.clone(),
            slack_constants: vec![0.0; functions.len()],
            functions,
            quotients,
            h_max: op.h_max,
            band_layers: 0,
            mesh_hash: op.mesh_hash.clone(),
        })
    }

    fn build(
        construction: Construction,
        op: &DiscreteOperator,
        functions: Vec<Vec<f64>>,
        bounds: Vec<f64>,
        band_layers: usize,
    ) -> Result<Self, Error> {
        let mut fam = TestFamily::custom(op, functions)?;
        fam.construction = construction;
        fam.slack_constants = fam
            .quotients
            .iter()
            .zip(&bounds)
            .map(|(q, b)| ((q / b - 1.0) / op.h_max).max(0.0))
            .collect();
        fam.bounds = bounds;
        fam.band_layers = band_layers;
        Ok(fam)
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn max_quotient(&self) -> f64 {
        self.quotients.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest `|<f_i, f_j>_M| / (|f_i|_M |f_j|_M)` over pairs `i != j`.
    pub fn max_overlap(&self, op: &DiscreteOperator) -> f64 {
        let norms: Vec<f64> = self.functions.iter().map(|f| op.mass_inner(f, f).sqrt()).collect();
        let mut worst = 0.0f64;
        for i in 0..self.len() {
            for j in 0..i {
                let ip = op.mass_inner(&self.functions[i], &self.functions[j]);
                worst = worst.max(ip.abs() / (norms[i] * norms[j]));
            }
        }
        worst
    }

    /// Every quotient within `bound * (1 + slack)`.
    pub fn bound_verdict(&self, slack: f64) -> Verdict {
        let worst = self
            .quotients
            .iter()
            .zip(&self.bounds)
            .map(|(q, b)| q / (b * (1.0 + slack)))
            .fold(0.0, f64::max);
        Verdict::at_most(
            format!("{:?}_quotients_below_bound", self.construction).to_lowercase(),
            worst,
            1.0,
            format!(
                "quotients {:?} bounds {:?} slack {slack} C {:?}",
                self.quotients, self.bounds, self.slack_constants
            ),
        )
    }
}

/// Closed genus-`genus` surface with every pants curve of length `l`.
pub fn buser_surface(genus: usize, l: f64) -> Result<FNSurface, Error> {
    buser_surface_twisted(genus, l, &vec![0.0; 3 * genus.max(2) - 3])
}

pub fn buser_surface_twisted(genus: usize, l: f64, twists: &[f64]) -> Result<FNSurface, Error> {
    let w = collar_width(l)?;
    if !(w > 1.0) {
        return Err(ExperimentError::InvalidConstruction(format!(
            "collar width {w:.6} of curves of length {l} is not above 1; width-1 bands need l < {:.9}",
            length_for_collar_width(1.0)?
        ))
        .into());
    }
    Ok(closed_surface(genus, &vec![l; 3 * genus.max(2) - 3], twists)?)
}

/// Genus-`genus` surface with curve lengths uniform in `[l_min, l_max]` and
/// twists uniform in `[0, l)`, drawn from a seeded generator.
pub fn random_twist_surface(genus: usize, l_min: f64, l_max: f64, seed: u64) -> Result<FNSurface, Error> {
    if !(l_min > 0.0 && l_max >= l_min) {
        return Err(ExperimentError::InvalidConstruction(format!("bad length range [{l_min}, {l_max}]")).into());
    }
    let nc = 3 * genus.max(2) - 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lengths: Vec<f64> = (0..nc).map(|_| rng.gen_range(l_min..=l_max)).collect();
    let twists: Vec<f64> = lengths.iter().map(|l| rng.gen_range(0.0..*l)).collect();
    Ok(closed_surface(genus, &lengths, &twists)?)
}

fn layers(width: f64, spacing: f64) -> usize {
    (width / spacing + 1e-9).floor() as usize
}

/// One plateau function per block: 1 at distance at least 1 from the
/// block's boundary, linear in that distance below 1, zero off the block.
pub fn buser_test_functions(surface: &FNSurface, sm: &SurfaceMesh) -> Result<TestFamily, Error> {
    let band = layers(1.0, sm.layer_spacing);
    if band < MIN_BAND_LAYERS {
        return Err(ExperimentError::UnderResolved {
            layers: band,
            required: MIN_BAND_LAYERS,
        }
        .into());
    }
    let op = assemble(&sm.mesh, BoundaryCondition::Neumann)?;
    let nb = sm.instances.len();
    let mut functions = Vec::with_capacity(nb);
    let mut bounds = Vec::with_capacity(nb);
    for inst in 0..nb {
        let f: Vec<f64> = sm
            .homes
            .iter()
            .map(|homes| {
                homes
                    .iter()
                    .filter(|p| p.block == inst)
                    .map(|p| sm.block_boundary_distance(p).clamp(0.0, 1.0))
                    .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))))
                    .unwrap_or(0.0)
            })
            .collect();
        let base = sm.instances[inst].base_block;
        let sum_l: f64 = surface.blocks[base].boundary_lengths.iter().flatten().sum();
        bounds.push(buser_rayleigh_bound(sum_l)?);
        functions.push(f);
    }
    TestFamily::build(Construction::Buser, &op, functions, bounds, band)
}

/// Cyclic cover of order `(k + 2) n` unwrapping `curve`, with `n` functions
/// each supported on one run of `k + 2` sheets and cut off linearly across
/// the collars at its two ends.
pub fn randol_family(
    surface: &FNSurface,
    curve: usize,
    k: usize,
    n: usize,
    h: f64,
) -> Result<(SurfaceMesh, TestFamily), Error> {
    let sm = cyclic_cover_mesh(surface, curve, k, n, &MeshOptions::new(h))?;
    let fam = randol_functions(surface, &sm, curve, k, n)?;
    Ok((sm, fam))
}

pub fn randol_functions(
    surface: &FNSurface,
    sm: &SurfaceMesh,
    curve: usize,
    k: usize,
    n: usize,
) -> Result<TestFamily, Error> {
    let g = surface
        .gluings
        .get(curve)
        .ok_or_else(|| ExperimentError::InvalidConstruction(format!("gluing {curve} does not exist")))?;
    let l = surface
        .slot_length(g.from)
        .ok_or_else(|| ExperimentError::InvalidConstruction("curve has no length".into()))?;
    let rho = collar_width(l)?;
    let band = layers(rho, sm.layer_spacing);
    if band < MIN_BAND_LAYERS {
        return Err(ExperimentError::UnderResolved {
            layers: band,
            required: MIN_BAND_LAYERS,
        }
        .into());
    }
    if sm.sheets != (k + 2) * n {
        return Err(ExperimentError::InvalidConstruction(format!(
            "cover has {} sheets, expected (k + 2) n = {}",
            sm.sheets,
            (k + 2) * n
        ))
        .into());
    }
    let op = assemble(&sm.mesh, BoundaryCondition::Neumann)?;
    let bound = randol_quotient_bound(l, k as u64, gauss_bonnet_area(surface))?;
    let nb = surface.blocks.len();
    let mut functions = Vec::with_capacity(n);
    for i in 0..n {
        let first = i * (k + 2);
        let last = first + k + 1;
        let value = |p: &crate::mesher::Provenance| -> f64 {
            let inst = sm.instances[p.block];
            if inst.sheet < first || inst.sheet > last {
                return 0.0;
            }
            let mut v: f64 = 1.0;
            // the cut side glued to the previous run
            if inst.sheet == first && inst.base_block == g.from.block {
                v = v.min(sm.slot_distance(p, g.from.slot) / rho);
            }
            if inst.sheet == last && inst.base_block == g.to.block {
                v = v.min(sm.slot_distance(p, g.to.slot) / rho);
            }
            v.clamp(0.0, 1.0)
        };
        let f: Vec<f64> = sm
            .homes
            .iter()
            .map(|homes| homes.iter().map(value).fold(f64::INFINITY, f64::min))
            .collect();
        functions.push(f);
    }
    debug_assert_eq!(sm.instances.len(), sm.sheets * nb);
    TestFamily::build(Construction::Randol, &op, functions, vec![bound; n], band)
}

/// At least `family.len()` eigenvalues at or below the family's largest
/// quotient, which the discrete min-max principle guarantees.
pub fn verify_variational(family: &TestFamily, result: &SpectralResult) -> Result<Verdict, Error> {
    if family.mesh_hash != result.mesh_hash {
        return Err(ExperimentError::MeshMismatch {
            family: family.mesh_hash.clone(),
            result: result.mesh_hash.clone(),
        }
        .into());
    }
    let m = family.len();
    if m == 0 {
        return Err(ExperimentError::InvalidConstruction("empty family".into()).into());
    }
    if result.eigenvalues.len() < m {
        return Err(ExperimentError::InsufficientEigenpairs {
            needed: m,
            have: result.eigenvalues.len(),
        }
        .into());
    }
    let q = family.max_quotient();
    let sorted = result.eigenvalues.windows(2).all(|w| w[0] <= w[1]);
    let lam = result.eigenvalues[m - 1];
    let tol = 1e-8 * q.abs().max(1.0);
    let detail = format!("lambda_{} = {lam:.9e}, max quotient {q:.9e}", m - 1);
    if !sorted {
        return Ok(Verdict::new(
            "variational",
            false,
            f64::NAN,
            format!("eigenvalues not ascending; {detail}"),
        ));
    }
    Ok(Verdict::new("variational", lam <= q + tol, q - lam, detail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesher::mesh_surface;
    use crate::spectral::lowest_eigenpairs;

    #[test]
    fn buser_surface_shapes() {
        let s = buser_surface(2, 0.05).unwrap();
        assert_eq!((s.blocks.len(), s.gluings.len(), s.euler_characteristic()), (2, 3, -2));
        let s = buser_surface(3, 0.05).unwrap();
        assert_eq!((s.blocks.len(), s.gluings.len()), (4, 6));
        let e = buser_surface(2, 2.0).unwrap_err().to_string();
        assert!(e.contains("l < 1.54387"), "{e}");
    }

    #[test]
    fn variational_negative_control() {
        let s = buser_surface(2, 0.1).unwrap();
        let sm = mesh_surface(&s, &MeshOptions::new(0.15)).unwrap();
        let fam = buser_test_functions(&s, &sm).unwrap();
        assert_eq!(fam.len(), 2);
        let op = assemble(&sm.mesh, BoundaryCondition::Neumann).unwrap();
        assert!(fam.max_overlap(&op) <= 1e-10);
        let mut r = lowest_eigenpairs(&op, 4, 1e-8).unwrap();
        assert!(verify_variational(&fam, &r).unwrap().pass);
        r.eigenvalues.swap(1, 3);
        assert!(!verify_variational(&fam, &r).unwrap().pass);
        r.mesh_hash = "other".into();
        assert!(verify_variational(&fam, &r).is_err());
    }

    #[test]
    fn coarse_band_rejected() {
        let s = buser_surface(2, 0.1).unwrap();
        let sm = mesh_surface(&s, &MeshOptions::new(0.5)).unwrap();
        assert!(matches!(
            buser_test_functions(&s, &sm),
            Err(Error::Experiment(ExperimentError::UnderResolved { .. }))
        ));
    }
}

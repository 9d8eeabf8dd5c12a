//! Closed-form areas, spectral bounds and cover orders.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use crate::error::GeometryError;
use crate::geometry::surface::FNSurface;
use crate::geometry::trig::{collar_width, stable_asinh};
use crate::verdict::Verdict;

/// Bottom of the spectrum of the hyperbolic plane.
pub const LAMBDA0_HYPERBOLIC_PLANE: f64 = 0.25;

fn positive(name: &str, x: f64) -> Result<(), GeometryError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(GeometryError::InvalidArgument(format!(
            "{name} must be positive, got {x}"
        )))
    }
}

/// Hyperbolic area by Gauss–Bonnet: `2π` per pants block. Cusps carry
/// finite area so they are included; funnels are not modelled.
pub fn gauss_bonnet_area(surface: &FNSurface) -> f64 {
    -2.0 * PI * surface.euler_characteristic() as f64
}

/// Upper bound for the Rayleigh quotient of the plateau test function on a
/// pants block whose boundary lengths sum to `sum_l`.
pub fn buser_rayleigh_bound(sum_l: f64) -> Result<f64, GeometryError> {
    let n = 1f64.sinh() * sum_l;
    if !(sum_l >= 0.0) || n >= 2.0 * PI {
        return Err(GeometryError::OutOfRange(format!(
            "sinh(1) * sum_l = {n} must lie in [0, 2π)"
        )));
    }
    Ok(n / (2.0 * PI - n))
}

/// Cover-order data for a non-separating geodesic of length `l` on a
/// surface of area `area`, targeting eigenvalues below `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverOrder {
    /// Minimal `k >= 1` with `k >= l e^l / (2 sinh(l/2) eps area)`.
    pub k: u64,
    /// `l e^l / (2 sinh(l/2) eps area)`.
    pub displayed_bound: f64,
    /// `2 l sinh(rho) / (rho^2 eps area)` with `rho` the collar width.
    pub collar_bound: f64,
    /// Minimal `k >= 1` with `k > collar_bound` (strict).
    pub k_collar: u64,
}

fn ceil_at_least_one(x: f64) -> u64 {
    (x.ceil().max(1.0)) as u64
}

fn strict_above(x: f64) -> u64 {
    let k = x.ceil().max(1.0);
    if k == x {
        (k + 1.0) as u64
    } else {
        k as u64
    }
}

pub fn randol_cover_order(l: f64, eps: f64, area: f64) -> Result<CoverOrder, GeometryError> {
    positive("length", l)?;
    positive("epsilon", eps)?;
    positive("area", area)?;
    let displayed_bound = l * l.exp() / (2.0 * (0.5 * l).sinh() * eps * area);
    let rho = collar_width(l)?;
    let collar_bound = 2.0 * l * rho.sinh() / (rho * rho * eps * area);
    Ok(CoverOrder {
        k: ceil_at_least_one(displayed_bound),
        displayed_bound,
        collar_bound,
        k_collar: strict_above(collar_bound),
    })
}

/// Rayleigh-quotient bound `2 l sinh(rho) / (rho^2 k area)` of the cover
/// test function built from `k` interior copies.
pub fn randol_quotient_bound(l: f64, k: u64, area: f64) -> Result<f64, GeometryError> {
    positive("length", l)?;
    positive("area", area)?;
    if k == 0 {
        return Err(GeometryError::InvalidArgument("k must be at least 1".into()));
    }
    let rho = collar_width(l)?;
    Ok(2.0 * l * rho.sinh() / (rho * rho * k as f64 * area))
}

/// Minimal `k >= 1` with `k >= 2 ln(4γ-2) / eps`, valid for every
/// hyperbolic metric on the closed genus-`genus` surface.
pub fn randol_genus_order(genus: u64, eps: f64) -> Result<u64, GeometryError> {
    if genus < 2 {
        return Err(GeometryError::InvalidArgument(format!(
            "genus must be >= 2, got {genus}"
        )));
    }
    positive("epsilon", eps)?;
    let g = genus as f64;
    Ok(ceil_at_least_one(2.0 * (4.0 * g - 2.0).ln() / eps))
}

/// Length bound for a shortest non-separating geodesic in genus `genus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonsepBound {
    /// `2 arcosh(2γ - 1)`.
    pub sharp: f64,
    /// `2 ln(4γ - 2)`.
    pub log_form: f64,
}

pub fn nonsep_length_bound(genus: u64) -> Result<NonsepBound, GeometryError> {
    if genus < 2 {
        return Err(GeometryError::InvalidArgument(format!(
            "genus must be >= 2, got {genus}"
        )));
    }
    let g = genus as f64;
    Ok(NonsepBound {
        sharp: 2.0 * (2.0 * g - 1.0).acosh(),
        log_form: 2.0 * (4.0 * g - 2.0).ln(),
    })
}

/// Lower and upper bounds for the analytic systole.
///
/// `lower = -κ/4 + sys²/area²` holds for curvature `K <= κ <= 0`; `upper =
/// 1/4 + 4π²/w²` with `w = arsinh(1/sinh(sys))` holds for `K >= -1`, which
/// the caller asserts.
pub fn analytic_systole_interval(sys: f64, area: f64, chi: i64, kappa: f64) -> Result<(f64, f64), GeometryError> {
    positive("systole", sys)?;
    positive("area", area)?;
    if chi >= 0 {
        return Err(GeometryError::InvalidArgument(format!(
            "Euler characteristic must be negative, got {chi}"
        )));
    }
    if !(kappa <= 0.0) {
        return Err(GeometryError::InvalidArgument(format!(
            "curvature bound must be <= 0, got {kappa}"
        )));
    }
    let lower = -kappa / 4.0 + sys * sys / (area * area);
    let w = stable_asinh(1.0 / sys.sinh());
    let upper = 0.25 + 4.0 * PI * PI / (w * w);
    Ok((lower, upper))
}

/// `min{π/area, sys²/area²}`.
pub fn mondal_delta(sys: f64, area: f64) -> Result<f64, GeometryError> {
    positive("systole", sys)?;
    positive("area", area)?;
    Ok((PI / area).min(sys * sys / (area * area)))
}

/// Cheeger's inequality `λ0 >= h²/4`.
pub fn cheeger_lower_bound(h: f64) -> Result<f64, GeometryError> {
    if !(h >= 0.0) {
        return Err(GeometryError::InvalidArgument(format!(
            "Cheeger constant must be >= 0, got {h}"
        )));
    }
    Ok(h * h / 4.0)
}

/// Maximal number of eigenvalues in `[0, Λ(S)]`: `-χ`.
pub fn small_count_bound(surface: &FNSurface) -> Result<u64, GeometryError> {
    let chi = surface.euler_characteristic();
    if chi >= 0 {
        return Err(GeometryError::InvalidArgument(
            "surface must have negative Euler characteristic".into(),
        ));
    }
    Ok((-chi) as u64)
}

/// Shortest enumerated curve: pants curves and free boundaries. This only
/// bounds the systole from above; `+∞` when there is no such curve.
pub fn sys_upper_bound(surface: &FNSurface) -> f64 {
    surface
        .curve_lengths()
        .into_iter()
        .chain(surface.free_boundaries.iter().filter_map(|r| surface.slot_length(*r)))
        .fold(f64::INFINITY, f64::min)
}

/// Every closed-form quantity for one surface, with sanity verdicts.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub area: f64,
    pub euler_char: i64,
    pub sys_upper: f64,
    /// Collar width per gluing curve, keyed by gluing index.
    pub collar_widths: BTreeMap<usize, f64>,
    pub lambda0_universal: f64,
    /// `1/4` with cusps, `+∞` for compact surfaces.
    pub lambda_ess_floor: f64,
    pub lambda_interval: Option<(f64, f64)>,
    pub small_count_bound: u64,
    pub mondal_delta: Option<f64>,
    pub warnings: Vec<String>,
    pub verdicts: Vec<Verdict>,
}

impl BoundReport {
    pub fn for_surface(surface: &FNSurface) -> Result<Self, GeometryError> {
        let area = gauss_bonnet_area(surface);
        let chi = surface.euler_characteristic();
        let sys = sys_upper_bound(surface);
        let mut warnings = Vec::new();
        let mut collar_widths = BTreeMap::new();
        for (gi, l) in surface.curve_lengths().into_iter().enumerate() {
            collar_widths.insert(gi, collar_width(l)?);
        }
        let lambda_ess_floor = if surface.cusp_count() > 0 {
            LAMBDA0_HYPERBOLIC_PLANE
        } else {
            f64::INFINITY
        };
        let mut verdicts = Vec::new();
        let (lambda_interval, delta) = if sys.is_finite() {
            warnings.push(
                "sys_upper is an upper bound for the systole: the analytic-systole lower bound \
                 consumes it in the unsound direction"
                    .to_string(),
            );
            let iv = analytic_systole_interval(sys, area, chi, -1.0)?;
            verdicts.push(Verdict::at_most(
                "lambda_interval_ordered",
                iv.0,
                iv.1,
                format!("lower {:.9} upper {:.9}", iv.0, iv.1),
            ));
            (Some(iv), Some(mondal_delta(sys, area)?))
        } else {
            warnings.push("no closed pants curve: systole bound is +inf".to_string());
            (None, None)
        };
        if !surface.is_closed() {
            warnings.push(
                "analytic-systole interval is stated for closed surfaces; reported for reference only".to_string(),
            );
        }
        let scb = small_count_bound(surface)?;
        verdicts.push(Verdict::new(
            "small_count_positive",
            scb >= 1 && scb as i64 == -chi,
            scb as f64,
            format!("-chi = {}", -chi),
        ));
        Ok(BoundReport {
            area,
            euler_char: chi,
            sys_upper: sys,
            collar_widths,
            lambda0_universal: LAMBDA0_HYPERBOLIC_PLANE,
            lambda_ess_floor,
            lambda_interval,
            small_count_bound: scb,
            mondal_delta: delta,
            warnings,
            verdicts,
        })
    }

    /// `(name, value)` rows in a fixed order, for CSV export.
    pub fn rows(&self) -> Vec<(String, String)> {
        let mut rows = vec![
            ("area".to_string(), fmt_f(self.area)),
            ("euler_char".to_string(), self.euler_char.to_string()),
            ("sys_upper".to_string(), fmt_f(self.sys_upper)),
            ("lambda0_universal".to_string(), fmt_f(self.lambda0_universal)),
            ("lambda_ess_floor".to_string(), fmt_f(self.lambda_ess_floor)),
        ];
        match self.lambda_interval {
            Some((lo, hi)) => {
                rows.push(("lambda_lower".into(), fmt_f(lo)));
                rows.push(("lambda_upper".into(), fmt_f(hi)));
            }
            None => {
                rows.push(("lambda_lower".into(), "nan".into()));
                rows.push(("lambda_upper".into(), "nan".into()));
            }
        }
        rows.push(("small_count_bound".into(), self.small_count_bound.to_string()));
        rows.push((
            "mondal_delta".into(),
            self.mondal_delta.map(fmt_f).unwrap_or_else(|| "nan".into()),
        ));
        for (g, w) in &self.collar_widths {
            rows.push((format!("collar_width[{g}]"), fmt_f(*w)));
        }
        rows
    }
}

fn fmt_f(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.12}")
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.rows() {
            writeln!(f, "{k:<22} {v}")?;
        }
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        for v in &self.verdicts {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

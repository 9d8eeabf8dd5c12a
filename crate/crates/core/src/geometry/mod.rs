//! Hyperbolic trigonometry, the Fenchel–Nielsen surface model and the
//! closed-form bounds that the experiments check against.

pub mod bounds;
pub mod hyperboloid;
pub mod surface;
pub mod trig;

pub use bounds::{
    analytic_systole_interval, buser_rayleigh_bound, cheeger_lower_bound, gauss_bonnet_area, mondal_delta,
    nonsep_length_bound, randol_cover_order, randol_genus_order, randol_quotient_bound, small_count_bound,
    sys_upper_bound, BoundReport, CoverOrder, NonsepBound, LAMBDA0_HYPERBOLIC_PLANE,
};
pub use surface::{closed_surface, euler_characteristic, BlockKind, FNSurface, Gluing, PantsBlock, Signature, SlotRef};
pub use trig::{collar_width, hexagons_from_pants, stable_asinh, HalfBoundary, Hexagon, PantsHexagon};

//! Hyperbolic surfaces of finite type assembled from pants decompositions,
//! their low Laplace spectrum by linear finite elements, and numerical checks
//! of small-eigenvalue constructions and bounds.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: hyperbolic trigonometry, the Fenchel–Nielsen surface model
//!   and every closed-form bound.
//! * [`mesher`]: intrinsic geodesic triangulations (edge lengths only) of
//!   pants, cusps, glued surfaces and cyclic covers.
//! * [`spectral`]: cotangent stiffness / lumped hyperbolic mass assembly and
//!   a shift-invert block eigensolver.
//! * [`experiments`]: test-function families, nodal domains and audits that
//!   tie the other modules together.

pub mod error;
pub mod experiments;
pub mod geometry;
pub mod mesher;
pub mod spectral;
pub mod verdict;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use verdict::{verdicts_csv, Verdict};

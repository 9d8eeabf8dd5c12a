//! Intrinsic triangulations of pants, cusps, glued surfaces and covers.
//!
//! Meshes store connectivity and one hyperbolic (or, for oracle problems,
//! Euclidean) length per edge. Coordinates are only used while building.

pub mod collar;
pub mod glue;
pub mod io;
pub mod mesh;
pub mod pants;
pub mod simple;
pub mod strip;

pub use collar::{graph_distances, induced_subcomplex, SubComplex};
pub use glue::{cyclic_cover_mesh, glue, mesh_blocks, mesh_surface, BlockInstance, SeamRecord, SurfaceMesh};
pub use io::{load_mesh, read_mesh, save_mesh, write_mesh};
pub use mesh::{
    euclidean_area, hyperbolic_area, BoundaryLoop, HyperbolicMesh, LoopTag, MeshQuality, Metric, Provenance,
};
pub use pants::{
    half_segments, mesh_pants, mesh_pants_with, orientation, truncate_cusp, HexagonChart, MeshOptions, PantsMesh,
    SideChart, DEFAULT_CUSP_LENGTH,
};
pub use simple::{flat_torus, geodesic_disk};

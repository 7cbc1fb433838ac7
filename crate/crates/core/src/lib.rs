//! Exact lattice and point-counting tools for rational points of bounded
//! height.
//!
//! The crate covers integer linear algebra (Hermite normal form, kernels,
//! LLL), integer lattices and box enumeration, projective points and linear
//! subvarieties, plane covers and primitive lattice enumeration, brute-force
//! counting on presented varieties, resultant-based projection of space
//! curves, and the experiment harness that fits scaling exponents.

pub mod cover;
pub mod experiment;
pub mod lattice;
pub mod linalg;
pub mod poly;
pub mod projection;
pub mod projective;
pub mod subdivision;
pub mod variety;

pub use cover::{
    cover_plane_for_point, cover_planes, densest_planes_count, enum_primitive_lattices, CoverError, DensestPlanes,
    LatticeEnumeration, PlaneCover,
};
pub use experiment::{fit_exponent, run_experiment, ExperimentConfig, ExperimentReport, Fit};
pub use lattice::{IntegerLattice, LatticeError};
pub use linalg::{gram_det_sq, hnf, kernel_basis, lll_reduce, IntMatrix, LinalgError};
pub use poly::{ParseError, Poly, PolyError};
pub use projection::{best_projection, projection_degree, sylvester_resultant, BestProjection, SpaceCurve};
pub use projective::{
    count_points_on_plane, enum_proj_points, lattice_from_plane, plane_contains, plane_from_lattice, LinearVariety,
    ProjPoint,
};
pub use subdivision::{subdivide, SubdivisionScheme};
pub use variety::{count_affine_points, count_proj_points, union_of_planes_variety, Ambient, VarietySpec};

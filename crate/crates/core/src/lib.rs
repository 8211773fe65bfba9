//! Displacement fields produced by point forces distributed over an immersed
//! cell boundary, evaluated through the closed-form Kelvin fundamental
//! solutions of linear elastostatics.
//!
//! A cell boundary (a closed curve in 2D, a closed surface in 3D) is
//! discretized into force stations: segment midpoints or triangle centroids
//! carrying an inward unit normal, a force magnitude per unit measure, and the
//! element measure. The displacement anywhere off the boundary is the
//! superposition of the fundamental solution over all stations. Companion
//! quadrature and Richardson utilities measure how fast that discrete sum
//! approaches the continuous boundary-integral field as the mesh refines; the
//! observed order is two, matching the composite midpoint rule.
//!
//! Entry points:
//! - [`Material`], [`greens_2d`], [`greens_3d`]: elastic constants and kernels
//! - [`BoundaryMesh2D`], [`SurfaceMesh3D`]: circle polygons and icospheres
//! - [`field_sum_2d`], [`field_sum_3d`]: superposed displacement fields
//! - [`field_integral_oracle_2d`], [`field_integral_oracle_3d`]: extrapolated
//!   boundary-integral reference values
//! - [`midpoint_polyline`], [`midpoint_triangles`], the `l2_norm_*` family,
//!   and [`richardson_q`]: convergence instrumentation
//! - [`Study2d`], [`Study3d`]: the convergence study runners

mod error;
mod evalset;
mod field;
mod greens;
mod icosphere;
mod material;
mod norms;
mod oracle;
mod polygon;
mod quadrature;
mod richardson;
mod station;
mod study;

pub use error::CoreError;
pub use evalset::{EvalSet2, EvalSet3};
pub use field::{
    boundary_trace_2d, boundary_trace_3d, field_grid_2d, field_grid_3d, field_sum_2d, field_sum_3d,
    field_sum_stations_2d, field_sum_stations_3d, FieldGrid, FieldSample, GridSpec2, GridSpec3,
    SkippedPoint,
};
pub use greens::{greens_2d, greens_3d, KERNEL_TOL_SING};
pub use icosphere::SurfaceMesh3D;
pub use material::Material;
pub use norms::{l2_norm_circle, l2_norm_rectangle, l2_norm_segment, std_normal_component, L2Norm};
pub use oracle::{
    field_integral_oracle_2d, field_integral_oracle_3d, CircleBoundary, OracleSample,
    SphereBoundary,
};
pub use polygon::BoundaryMesh2D;
pub use quadrature::{midpoint_polyline, midpoint_triangles, QuadratureResult};
pub use richardson::richardson_q;
pub use station::ForceStation;
pub use study::{CaseTable, ConvergenceRow, Study2d, Study3d, StudyCase};

/// 2D point / displacement vector.
pub type Vec2 = nalgebra::Vector2<f64>;
/// 3D point / displacement vector.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 2D Green's tensor.
pub type Mat2 = nalgebra::Matrix2<f64>;
/// 3D Green's tensor.
pub type Mat3 = nalgebra::Matrix3<f64>;

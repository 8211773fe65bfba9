use crate::error::CoreError;
use crate::field::{field_sum_2d, field_sum_3d, FieldSample};
use crate::icosphere::SurfaceMesh3D;
use crate::material::Material;
use crate::polygon::{BoundaryMesh2D, FIELD_TOL_FRACTION};
use crate::{Vec2, Vec3};

/// Exact circular cell boundary with a constant force density; meshes are
/// generated on demand at whatever resolution the extrapolation asks for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleBoundary {
    pub center: Vec2,
    pub radius: f64,
    pub magnitude: f64,
}

/// Exact spherical cell boundary with a constant force density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereBoundary {
    pub center: Vec3,
    pub radius: f64,
    pub magnitude: f64,
}

/// Extrapolated boundary-integral displacement, with the resolution the
/// extrapolation stopped at and the relative gap between the last two
/// extrapolants (an a-posteriori error estimate).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSample<const D: usize> {
    pub sample: FieldSample<D>,
    /// Segment count (2D) or refinement level (3D) of the finest mesh used.
    pub final_resolution: u64,
    pub gap: f64,
}

const START_SEGMENTS: usize = 64;
const MAX_SEGMENTS: usize = 1 << 21;
const MAX_LEVEL_3D: u32 = 8;

fn relative_gap<const D: usize>(
    a: &nalgebra::SVector<f64, D>,
    b: &nalgebra::SVector<f64, D>,
) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

/// Second-order Richardson extrapolant of a mesh-halving pair.
fn extrapolate<const D: usize>(
    coarse: &nalgebra::SVector<f64, D>,
    fine: &nalgebra::SVector<f64, D>,
) -> nalgebra::SVector<f64, D> {
    fine + (fine - coarse) / 3.0
}

fn check_boundary_clearance(distance_to_surface: f64, radius: f64) -> Result<(), CoreError> {
    let tol = FIELD_TOL_FRACTION * radius;
    if distance_to_surface < tol {
        Err(CoreError::Singular {
            distance: distance_to_surface,
            tolerance: tol,
        })
    } else {
        Ok(())
    }
}

/// Continuous boundary-integral field of a circular cell at `x`.
///
/// Evaluates the discrete superposition at geometrically refined polygons and
/// Richardson-extrapolates consecutive pairs until two successive
/// extrapolants agree to `rel_tol`. The midpoint discretization converges at
/// second order, so the extrapolant removes the leading error term and the
/// gap between extrapolants bounds what remains.
pub fn field_integral_oracle_2d(
    boundary: &CircleBoundary,
    mat: &Material,
    x: &Vec2,
    rel_tol: f64,
) -> Result<OracleSample<2>, CoreError> {
    if !(rel_tol.is_finite() && rel_tol > 0.0) {
        return Err(CoreError::ParamDomain(format!(
            "rel_tol must be positive, got {rel_tol}"
        )));
    }
    check_boundary_clearance(
        ((x - boundary.center).norm() - boundary.radius).abs(),
        boundary.radius,
    )?;

    let eval = |m: usize| -> Result<FieldSample<2>, CoreError> {
        let mesh = BoundaryMesh2D::circle(boundary.center, boundary.radius, m, boundary.magnitude)?;
        field_sum_2d(&mesh, mat, x)
    };

    let mut m = START_SEGMENTS;
    let mut coarse = eval(m)?;
    let mut fine = eval(2 * m)?;
    let mut previous = extrapolate(&coarse.displacement, &fine.displacement);
    loop {
        m *= 2;
        coarse = fine;
        fine = eval(2 * m)?;
        let current = extrapolate(&coarse.displacement, &fine.displacement);
        let gap = relative_gap(&previous, &current);
        if gap <= rel_tol {
            return Ok(OracleSample {
                sample: FieldSample {
                    point: *x,
                    displacement: current,
                    min_station_distance: fine.min_station_distance,
                },
                final_resolution: (2 * m) as u64,
                gap,
            });
        }
        if 2 * m >= MAX_SEGMENTS {
            return Err(CoreError::NoConvergence {
                rel_tol,
                gap,
                resolution: (2 * m) as u64,
            });
        }
        previous = current;
    }
}

/// Continuous boundary-integral field of a spherical cell at `x`; the 3D
/// counterpart of [`field_integral_oracle_2d`], refining over icosphere
/// levels.
pub fn field_integral_oracle_3d(
    boundary: &SphereBoundary,
    mat: &Material,
    x: &Vec3,
    rel_tol: f64,
) -> Result<OracleSample<3>, CoreError> {
    if !(rel_tol.is_finite() && rel_tol > 0.0) {
        return Err(CoreError::ParamDomain(format!(
            "rel_tol must be positive, got {rel_tol}"
        )));
    }
    check_boundary_clearance(
        ((x - boundary.center).norm() - boundary.radius).abs(),
        boundary.radius,
    )?;

    let eval = |level: u32| -> Result<FieldSample<3>, CoreError> {
        let mesh =
            SurfaceMesh3D::icosphere(boundary.center, boundary.radius, level, boundary.magnitude)?;
        field_sum_3d(&mesh, mat, x)
    };

    let mut level = 0;
    let mut coarse = eval(level)?;
    let mut fine = eval(level + 1)?;
    let mut previous = extrapolate(&coarse.displacement, &fine.displacement);
    loop {
        level += 1;
        coarse = fine;
        fine = eval(level + 1)?;
        let current = extrapolate(&coarse.displacement, &fine.displacement);
        let gap = relative_gap(&previous, &current);
        if gap <= rel_tol {
            return Ok(OracleSample {
                sample: FieldSample {
                    point: *x,
                    displacement: current,
                    min_station_distance: fine.min_station_distance,
                },
                final_resolution: (level + 1) as u64,
                gap,
            });
        }
        if level + 1 >= MAX_LEVEL_3D {
            return Err(CoreError::NoConvergence {
                rel_tol,
                gap,
                resolution: (level + 1) as u64,
            });
        }
        previous = current;
    }
}

use nalgebra::SVector;
use rayon::prelude::*;

use crate::error::CoreError;
use crate::greens::{greens_2d, greens_3d};
use crate::icosphere::SurfaceMesh3D;
use crate::material::Material;
use crate::polygon::BoundaryMesh2D;
use crate::station::ForceStation;
use crate::{Vec2, Vec3};

/// Displacement evaluated at one point, with the recorded clearance to the
/// nearest force station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample<const D: usize> {
    pub point: SVector<f64, D>,
    pub displacement: SVector<f64, D>,
    pub min_station_distance: f64,
}

fn min_station_distance<const D: usize>(
    stations: &[ForceStation<D>],
    x: &SVector<f64, D>,
    tol: f64,
) -> Result<f64, CoreError> {
    let mut min = f64::INFINITY;
    for (j, s) in stations.iter().enumerate() {
        let d = (x - s.position).norm();
        if d < tol {
            return Err(CoreError::StationTooClose {
                station: j,
                distance: d,
                tolerance: tol,
            });
        }
        min = min.min(d);
    }
    Ok(min)
}

/// Superposed displacement of an arbitrary station set at `x`, refusing
/// points within `clearance_tol` of any station.
///
/// The sum runs over stations in slice order, so results are reproducible
/// bit-for-bit regardless of how callers parallelize across points.
pub fn field_sum_stations_2d(
    stations: &[ForceStation<2>],
    clearance_tol: f64,
    mat: &Material,
    x: &Vec2,
) -> Result<FieldSample<2>, CoreError> {
    let min = min_station_distance(stations, x, clearance_tol)?;
    let mut displacement = Vec2::zeros();
    for (j, s) in stations.iter().enumerate() {
        let g = greens_2d(x, &s.position, mat).map_err(|e| e.at_element(j))?;
        displacement += s.magnitude * s.measure * (g * s.normal);
    }
    Ok(FieldSample {
        point: *x,
        displacement,
        min_station_distance: min,
    })
}

/// 3D counterpart of [`field_sum_stations_2d`].
pub fn field_sum_stations_3d(
    stations: &[ForceStation<3>],
    clearance_tol: f64,
    mat: &Material,
    x: &Vec3,
) -> Result<FieldSample<3>, CoreError> {
    let min = min_station_distance(stations, x, clearance_tol)?;
    let mut displacement = Vec3::zeros();
    for (j, s) in stations.iter().enumerate() {
        let g = greens_3d(x, &s.position, mat).map_err(|e| e.at_element(j))?;
        displacement += s.magnitude * s.measure * (g * s.normal);
    }
    Ok(FieldSample {
        point: *x,
        displacement,
        min_station_distance: min,
    })
}

/// Superposed displacement of all stations of a circle boundary at `x`.
pub fn field_sum_2d(
    mesh: &BoundaryMesh2D,
    mat: &Material,
    x: &Vec2,
) -> Result<FieldSample<2>, CoreError> {
    field_sum_stations_2d(mesh.stations(), mesh.clearance_tol(), mat, x)
}

/// Superposed displacement of all stations of a spherical surface at `x`.
pub fn field_sum_3d(
    mesh: &SurfaceMesh3D,
    mat: &Material,
    x: &Vec3,
) -> Result<FieldSample<3>, CoreError> {
    field_sum_stations_3d(mesh.stations(), mesh.clearance_tol(), mat, x)
}

/// Row-major lattice over a parallelogram patch in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec2 {
    pub corner: Vec2,
    pub edge1: Vec2,
    pub edge2: Vec2,
    pub cells1: usize,
    pub cells2: usize,
}

/// Row-major lattice over a parallelogram patch in space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec3 {
    pub corner: Vec3,
    pub edge1: Vec3,
    pub edge2: Vec3,
    pub cells1: usize,
    pub cells2: usize,
}

/// A lattice point skipped because it violated the station clearance shell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkippedPoint<const D: usize> {
    pub row: usize,
    pub col: usize,
    pub point: SVector<f64, D>,
    pub distance: f64,
}

/// Outcome of a lattice sweep: samples in row-major order, plus the points
/// that were refused for clearance.
#[derive(Debug, Clone)]
pub struct FieldGrid<const D: usize> {
    pub samples: Vec<FieldSample<D>>,
    pub skipped: Vec<SkippedPoint<D>>,
}

fn grid_nodes<const D: usize>(
    corner: SVector<f64, D>,
    edge1: SVector<f64, D>,
    edge2: SVector<f64, D>,
    cells1: usize,
    cells2: usize,
) -> Result<Vec<(usize, usize, SVector<f64, D>)>, CoreError> {
    if cells1 < 1 || cells2 < 1 {
        return Err(CoreError::ParamDomain(format!(
            "grid needs at least 1x1 cells, got {cells1}x{cells2}"
        )));
    }
    let mut nodes = Vec::with_capacity(cells1 * cells2);
    for i in 0..cells1 {
        for j in 0..cells2 {
            let p = corner
                + edge1 * ((i as f64 + 0.5) / cells1 as f64)
                + edge2 * ((j as f64 + 0.5) / cells2 as f64);
            nodes.push((i, j, p));
        }
    }
    Ok(nodes)
}

fn sweep_grid<const D: usize>(
    nodes: Vec<(usize, usize, SVector<f64, D>)>,
    eval: impl Fn(&SVector<f64, D>) -> Result<FieldSample<D>, CoreError> + Sync,
) -> Result<FieldGrid<D>, CoreError>
where
    SVector<f64, D>: Send + Sync,
{
    let evaluated: Vec<_> = nodes
        .into_par_iter()
        .map(|(i, j, p)| (i, j, p, eval(&p)))
        .collect();
    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    for (row, col, point, res) in evaluated {
        match res {
            Ok(sample) => samples.push(sample),
            Err(CoreError::StationTooClose { distance, .. }) => skipped.push(SkippedPoint {
                row,
                col,
                point,
                distance,
            }),
            Err(e) => return Err(e),
        }
    }
    Ok(FieldGrid { samples, skipped })
}

/// Evaluates the 2D field over a lattice, skipping points inside the
/// clearance shell and reporting them.
pub fn field_grid_2d(
    mesh: &BoundaryMesh2D,
    mat: &Material,
    grid: &GridSpec2,
) -> Result<FieldGrid<2>, CoreError> {
    let nodes = grid_nodes(
        grid.corner,
        grid.edge1,
        grid.edge2,
        grid.cells1,
        grid.cells2,
    )?;
    sweep_grid(nodes, |p| field_sum_2d(mesh, mat, p))
}

/// Evaluates the 3D field over a lattice patch; see [`field_grid_2d`].
pub fn field_grid_3d(
    mesh: &SurfaceMesh3D,
    mat: &Material,
    grid: &GridSpec3,
) -> Result<FieldGrid<3>, CoreError> {
    let nodes = grid_nodes(
        grid.corner,
        grid.edge1,
        grid.edge2,
        grid.cells1,
        grid.cells2,
    )?;
    sweep_grid(nodes, |p| field_sum_3d(mesh, mat, p))
}

/// Negated field values at outer-boundary points: the Dirichlet data handed
/// to a downstream solver that removes the singular part of the solution.
pub fn boundary_trace_2d(
    mesh: &BoundaryMesh2D,
    mat: &Material,
    points: &[Vec2],
) -> Result<Vec<(Vec2, Vec2)>, CoreError> {
    points
        .iter()
        .map(|p| field_sum_2d(mesh, mat, p).map(|s| (*p, -s.displacement)))
        .collect()
}

/// 3D counterpart of [`boundary_trace_2d`].
pub fn boundary_trace_3d(
    mesh: &SurfaceMesh3D,
    mat: &Material,
    points: &[Vec3],
) -> Result<Vec<(Vec3, Vec3)>, CoreError> {
    points
        .iter()
        .map(|p| field_sum_3d(mesh, mat, p).map(|s| (*p, -s.displacement)))
        .collect()
}

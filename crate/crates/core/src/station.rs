use nalgebra::SVector;

/// A point of force application on the discretized cell boundary.
///
/// `position` is the element midpoint (2D segment) or centroid (3D triangle),
/// `normal` the unit inward normal, `magnitude` the force per unit measure,
/// and `measure` the segment length or triangle area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceStation<const D: usize> {
    pub position: SVector<f64, D>,
    pub normal: SVector<f64, D>,
    pub magnitude: f64,
    pub measure: f64,
}

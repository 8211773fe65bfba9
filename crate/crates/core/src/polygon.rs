use crate::error::CoreError;
use crate::station::ForceStation;
use crate::Vec2;

/// Fraction of the cell radius used as the clearance shell around stations;
/// field evaluation inside the shell is refused.
pub(crate) const FIELD_TOL_FRACTION: f64 = 1e-6;

/// Polygonal discretization of a closed circular cell boundary.
///
/// Vertices sit on the circle at angles `2πj/m`, ordered counter-clockwise
/// and implicitly closed. Each segment carries one force station at its
/// midpoint with the unit normal pointing toward the cell center.
#[derive(Debug, Clone)]
pub struct BoundaryMesh2D {
    center: Vec2,
    radius: f64,
    vertices: Vec<Vec2>,
    stations: Vec<ForceStation<2>>,
}

impl BoundaryMesh2D {
    /// Regular `segments`-gon inscribed in the circle, constant force
    /// magnitude.
    pub fn circle(
        center: Vec2,
        radius: f64,
        segments: usize,
        magnitude: f64,
    ) -> Result<Self, CoreError> {
        Self::circle_with(center, radius, segments, |_| magnitude)
    }

    /// Regular polygon with a per-station magnitude supplied as a function of
    /// the station position.
    pub fn circle_with(
        center: Vec2,
        radius: f64,
        segments: usize,
        magnitude: impl Fn(&Vec2) -> f64,
    ) -> Result<Self, CoreError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(CoreError::ParamDomain(format!(
                "cell radius must be positive, got {radius}"
            )));
        }
        if segments < 3 {
            return Err(CoreError::ParamDomain(format!(
                "a closed polygon needs at least 3 segments, got {segments}"
            )));
        }
        let m = segments;
        let vertices: Vec<Vec2> = (0..m)
            .map(|j| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                center + radius * Vec2::new(theta.cos(), theta.sin())
            })
            .collect();
        let stations = (0..m)
            .map(|j| {
                let a = vertices[j];
                let b = vertices[(j + 1) % m];
                let position = 0.5 * (a + b);
                let tangent = b - a;
                // Rotate the tangent a quarter turn, then orient toward the
                // center so the result is independent of winding.
                let mut normal = Vec2::new(-tangent.y, tangent.x).normalize();
                if normal.dot(&(center - position)) < 0.0 {
                    normal = -normal;
                }
                ForceStation {
                    position,
                    normal,
                    magnitude: magnitude(&position),
                    measure: tangent.norm(),
                }
            })
            .collect();
        Ok(Self {
            center,
            radius,
            vertices,
            stations,
        })
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn stations(&self) -> &[ForceStation<2>] {
        &self.stations
    }

    pub fn perimeter(&self) -> f64 {
        self.stations.iter().map(|s| s.measure).sum()
    }

    /// Maximal element diameter: the longest segment.
    pub fn h(&self) -> f64 {
        self.stations.iter().map(|s| s.measure).fold(0.0, f64::max)
    }

    /// Minimum admissible distance between an evaluation point and any
    /// station.
    pub fn clearance_tol(&self) -> f64 {
        FIELD_TOL_FRACTION * self.radius
    }
}

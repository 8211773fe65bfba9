use nalgebra::SVector;
use rayon::prelude::*;

use crate::error::CoreError;
use crate::field::FieldSample;
use crate::norms::{circle_nodes, segment_nodes, L2Norm};
use crate::{Vec2, Vec3};

/// Geometry over which a 2D field is sampled and reduced to an L² norm.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalSet2 {
    Point(Vec2),
    Circle {
        center: Vec2,
        radius: f64,
        samples: usize,
    },
    Segment {
        a: Vec2,
        b: Vec2,
        subdivisions: usize,
    },
}

/// Geometry over which a 3D field is sampled and reduced to an L² norm.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalSet3 {
    Point(Vec3),
    Segment {
        a: Vec3,
        b: Vec3,
        subdivisions: usize,
    },
    Rectangle {
        corner: Vec3,
        edge1: Vec3,
        edge2: Vec3,
        cells1: usize,
        cells2: usize,
    },
}

fn validate_segment<const D: usize>(
    a: &SVector<f64, D>,
    b: &SVector<f64, D>,
    subdivisions: usize,
) -> Result<(), CoreError> {
    if subdivisions < 1 {
        return Err(CoreError::ParamDomain(
            "segment needs at least 1 subdivision".into(),
        ));
    }
    if (a - b).norm() == 0.0 {
        return Err(CoreError::ParamDomain("segment endpoints coincide".into()));
    }
    Ok(())
}

fn segment_distance_range<const D: usize>(
    a: &SVector<f64, D>,
    b: &SVector<f64, D>,
    p: &SVector<f64, D>,
) -> (f64, f64) {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    let min = (p - (a + ab * t)).norm();
    let max = (p - a).norm().max((p - b).norm());
    (min, max)
}

fn lattice_nodes(
    corner: &Vec3,
    edge1: &Vec3,
    edge2: &Vec3,
    n1: usize,
    n2: usize,
    area: f64,
) -> Vec<(Vec3, f64)> {
    let w = area / (n1 * n2) as f64;
    let mut nodes = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            nodes.push((
                corner
                    + edge1 * ((i as f64 + 0.5) / n1 as f64)
                    + edge2 * ((j as f64 + 0.5) / n2 as f64),
                w,
            ));
        }
    }
    nodes
}

/// Min/max distance from a parallelogram patch to a point, probed on a fine
/// lattice plus the corners. Good enough for the theory flag, which only
/// needs to know whether the patch reaches both sides of the cell surface.
fn patch_distance_range(corner: &Vec3, edge1: &Vec3, edge2: &Vec3, p: &Vec3) -> (f64, f64) {
    let mut min = f64::INFINITY;
    let mut max: f64 = 0.0;
    for (node, _) in lattice_nodes(corner, edge1, edge2, 32, 32, 1.0) {
        let d = (p - node).norm();
        min = min.min(d);
        max = max.max(d);
    }
    for c in [
        *corner,
        corner + edge1,
        corner + edge2,
        corner + edge1 + edge2,
    ] {
        let d = (p - c).norm();
        min = min.min(d);
        max = max.max(d);
    }
    (min, max)
}

fn eval_norm<const D: usize>(
    nodes: &[(SVector<f64, D>, f64)],
    measure: f64,
    field: impl Fn(&SVector<f64, D>) -> Result<FieldSample<D>, CoreError> + Sync,
) -> Result<(L2Norm, f64), CoreError>
where
    SVector<f64, D>: Send + Sync,
{
    let values: Vec<Result<FieldSample<D>, CoreError>> =
        nodes.par_iter().map(|(p, _)| field(p)).collect();
    let mut sum = 0.0;
    let mut clearance = f64::INFINITY;
    for ((_, w), v) in nodes.iter().zip(values) {
        let sample = v?;
        sum += sample.displacement.norm_squared() * w;
        clearance = clearance.min(sample.min_station_distance);
    }
    let plain = sum.sqrt();
    Ok((
        L2Norm {
            plain,
            rms: plain / measure.sqrt(),
        },
        clearance,
    ))
}

impl EvalSet2 {
    pub fn validate(&self) -> Result<(), CoreError> {
        match self {
            Self::Point(_) => Ok(()),
            Self::Circle {
                radius, samples, ..
            } => {
                if *radius <= 0.0 {
                    Err(CoreError::ParamDomain(
                        "evaluation circle radius must be positive".into(),
                    ))
                } else if *samples < 8 {
                    Err(CoreError::ParamDomain(format!(
                        "evaluation circle needs at least 8 samples, got {samples}"
                    )))
                } else {
                    Ok(())
                }
            }
            Self::Segment { a, b, subdivisions } => validate_segment(a, b, *subdivisions),
        }
    }

    /// Continuum measure: 1 for a point, circumference for a circle, length
    /// for a segment.
    pub fn measure(&self) -> f64 {
        match self {
            Self::Point(_) => 1.0,
            Self::Circle { radius, .. } => 2.0 * std::f64::consts::PI * radius,
            Self::Segment { a, b, .. } => (a - b).norm(),
        }
    }

    /// Midpoint quadrature nodes and weights.
    pub fn nodes(&self) -> Vec<(Vec2, f64)> {
        match self {
            Self::Point(p) => vec![(*p, 1.0)],
            Self::Circle {
                center,
                radius,
                samples,
            } => circle_nodes(center, *radius, *samples),
            Self::Segment { a, b, subdivisions } => segment_nodes(a, b, *subdivisions),
        }
    }

    /// Range of distances from the set to a reference point.
    pub fn distance_range(&self, reference: &Vec2) -> (f64, f64) {
        match self {
            Self::Point(p) => {
                let d = (p - reference).norm();
                (d, d)
            }
            Self::Circle { center, radius, .. } => {
                let d = (center - reference).norm();
                ((d - radius).abs(), d + radius)
            }
            Self::Segment { a, b, .. } => segment_distance_range(a, b, reference),
        }
    }

    /// True when the set reaches both sides of the cell circle; convergence
    /// theory does not cover such sets.
    pub fn straddles_surface(&self, cell_center: &Vec2, cell_radius: f64) -> bool {
        let (min, max) = self.distance_range(cell_center);
        min <= cell_radius && max >= cell_radius
    }

    /// L² norm of a field over the set plus the smallest clearance any
    /// sample had to a force station.
    pub fn norm_with_clearance(
        &self,
        field: impl Fn(&Vec2) -> Result<FieldSample<2>, CoreError> + Sync,
    ) -> Result<(L2Norm, f64), CoreError> {
        self.validate()?;
        eval_norm(&self.nodes(), self.measure(), field)
    }
}

impl EvalSet3 {
    pub fn validate(&self) -> Result<(), CoreError> {
        match self {
            Self::Point(_) => Ok(()),
            Self::Segment { a, b, subdivisions } => validate_segment(a, b, *subdivisions),
            Self::Rectangle {
                edge1,
                edge2,
                cells1,
                cells2,
                ..
            } => {
                if *cells1 < 1 || *cells2 < 1 {
                    Err(CoreError::ParamDomain(
                        "rectangle needs at least 1x1 cells".into(),
                    ))
                } else if edge1.cross(edge2).norm() <= 1e-14 * edge1.norm() * edge2.norm() {
                    Err(CoreError::ParamDomain(
                        "rectangle edges are linearly dependent".into(),
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Continuum measure: 1 for a point, length for a segment, area for a
    /// patch.
    pub fn measure(&self) -> f64 {
        match self {
            Self::Point(_) => 1.0,
            Self::Segment { a, b, .. } => (a - b).norm(),
            Self::Rectangle { edge1, edge2, .. } => edge1.cross(edge2).norm(),
        }
    }

    /// Midpoint quadrature nodes and weights.
    pub fn nodes(&self) -> Vec<(Vec3, f64)> {
        match self {
            Self::Point(p) => vec![(*p, 1.0)],
            Self::Segment { a, b, subdivisions } => segment_nodes(a, b, *subdivisions),
            Self::Rectangle {
                corner,
                edge1,
                edge2,
                cells1,
                cells2,
            } => lattice_nodes(
                corner,
                edge1,
                edge2,
                *cells1,
                *cells2,
                edge1.cross(edge2).norm(),
            ),
        }
    }

    /// Range of distances from the set to a reference point.
    pub fn distance_range(&self, reference: &Vec3) -> (f64, f64) {
        match self {
            Self::Point(p) => {
                let d = (p - reference).norm();
                (d, d)
            }
            Self::Segment { a, b, .. } => segment_distance_range(a, b, reference),
            Self::Rectangle {
                corner,
                edge1,
                edge2,
                ..
            } => patch_distance_range(corner, edge1, edge2, reference),
        }
    }

    /// True when the set reaches both sides of the cell surface; convergence
    /// theory does not cover such sets.
    pub fn straddles_surface(&self, cell_center: &Vec3, cell_radius: f64) -> bool {
        let (min, max) = self.distance_range(cell_center);
        min <= cell_radius && max >= cell_radius
    }

    /// L² norm of a field over the set plus the smallest clearance any
    /// sample had to a force station.
    pub fn norm_with_clearance(
        &self,
        field: impl Fn(&Vec3) -> Result<FieldSample<3>, CoreError> + Sync,
    ) -> Result<(L2Norm, f64), CoreError> {
        self.validate()?;
        eval_norm(&self.nodes(), self.measure(), field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_set_is_its_own_norm() {
        let set = EvalSet3::Point(Vec3::new(2.0, 0.0, 0.0));
        let (norm, clearance) = set
            .norm_with_clearance(|p| {
                Ok(FieldSample {
                    point: *p,
                    displacement: Vec3::new(3.0, 4.0, 0.0),
                    min_station_distance: 1.9,
                })
            })
            .unwrap();
        assert_eq!(norm.plain, 5.0);
        assert_eq!(norm.rms, 5.0);
        assert_eq!(clearance, 1.9);
    }

    #[test]
    fn straddle_detection() {
        let center = Vec3::zeros();
        let crossing = EvalSet3::Segment {
            a: Vec3::new(0.0, 0.0, -1.0),
            b: Vec3::new(0.0, 0.0, 1.0),
            subdivisions: 10,
        };
        assert!(crossing.straddles_surface(&center, 0.1));

        let outside = EvalSet3::Segment {
            a: Vec3::new(-1.0, 1.0, -1.0),
            b: Vec3::new(-1.0, 1.0, 1.0),
            subdivisions: 10,
        };
        assert!(!outside.straddles_surface(&center, 0.1));

        // Unit square with one corner at the cell center crosses any sphere
        // smaller than the square.
        let plane = EvalSet3::Rectangle {
            corner: Vec3::new(-1.0, -1.0, 0.0),
            edge1: Vec3::new(1.0, 0.0, 0.0),
            edge2: Vec3::new(0.0, 1.0, 0.0),
            cells1: 12,
            cells2: 12,
        };
        assert!(plane.straddles_surface(&center, 0.1));

        let point = EvalSet3::Point(Vec3::new(2.0, 0.0, 0.0));
        assert!(!point.straddles_surface(&center, 0.1));
    }

    #[test]
    fn circle_set_distance_range() {
        let set = EvalSet2::Circle {
            center: Vec2::new(1.0, 0.0),
            radius: 0.5,
            samples: 64,
        };
        let (min, max) = set.distance_range(&Vec2::zeros());
        assert!((min - 0.5).abs() < 1e-15);
        assert!((max - 1.5).abs() < 1e-15);
    }

    #[test]
    fn validation_catches_degenerate_sets() {
        assert!(EvalSet3::Segment {
            a: Vec3::zeros(),
            b: Vec3::zeros(),
            subdivisions: 4,
        }
        .validate()
        .is_err());
        assert!(EvalSet2::Circle {
            center: Vec2::zeros(),
            radius: 0.5,
            samples: 4,
        }
        .validate()
        .is_err());
        assert!(EvalSet3::Rectangle {
            corner: Vec3::zeros(),
            edge1: Vec3::new(1.0, 0.0, 0.0),
            edge2: Vec3::new(2.0, 0.0, 0.0),
            cells1: 3,
            cells2: 3,
        }
        .validate()
        .is_err());
    }

    #[test]
    fn nodes_are_distinct() {
        let set = EvalSet3::Rectangle {
            corner: Vec3::new(-1.0, -1.0, 0.0),
            edge1: Vec3::new(1.0, 0.0, 0.0),
            edge2: Vec3::new(0.0, 1.0, 0.0),
            cells1: 5,
            cells2: 7,
        };
        let nodes = set.nodes();
        assert_eq!(nodes.len(), 35);
        for (i, (a, _)) in nodes.iter().enumerate() {
            for (b, _) in nodes.iter().skip(i + 1) {
                assert!((a - b).norm() > 1e-12);
            }
        }
    }
}

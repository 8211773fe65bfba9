use nalgebra::SVector;
use rayon::prelude::*;

use crate::error::CoreError;
use crate::{Vec2, Vec3};

/// Composite-midpoint L² norm of a vector field over an evaluation set.
///
/// `plain` is `sqrt(Σ |field|² Δ)`; `rms` divides by the square root of the
/// continuum measure of the set (circumference, length, area), so a constant
/// field of magnitude `c` has `rms ≈ c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Norm {
    pub plain: f64,
    pub rms: f64,
}

impl L2Norm {
    pub fn get(&self, rms: bool) -> f64 {
        if rms {
            self.rms
        } else {
            self.plain
        }
    }
}

/// Chord midpoints of the regular `n`-gon inscribed in a circle, each
/// weighted by the chord length.
pub(crate) fn circle_nodes(center: &Vec2, radius: f64, n: usize) -> Vec<(Vec2, f64)> {
    let chord = 2.0 * radius * (std::f64::consts::PI / n as f64).sin();
    let mid_radius = radius * (std::f64::consts::PI / n as f64).cos();
    (0..n)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
            (
                center + mid_radius * Vec2::new(theta.cos(), theta.sin()),
                chord,
            )
        })
        .collect()
}

pub(crate) fn segment_nodes<const D: usize>(
    a: &SVector<f64, D>,
    b: &SVector<f64, D>,
    n: usize,
) -> Vec<(SVector<f64, D>, f64)> {
    let w = (b - a).norm() / n as f64;
    (0..n)
        .map(|k| (a + (b - a) * ((k as f64 + 0.5) / n as f64), w))
        .collect()
}

pub(crate) fn rectangle_nodes(
    corner: &Vec3,
    edge1: &Vec3,
    edge2: &Vec3,
    n1: usize,
    n2: usize,
) -> Vec<(Vec3, f64)> {
    let w = edge1.cross(edge2).norm() / (n1 * n2) as f64;
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

/// Evaluates the field on the nodes in parallel, then reduces in node order
/// so the result is independent of the thread count.
pub(crate) fn l2_over_nodes<const D: usize>(
    nodes: &[(SVector<f64, D>, f64)],
    measure: f64,
    field: impl Fn(&SVector<f64, D>) -> Result<SVector<f64, D>, CoreError> + Sync,
) -> Result<L2Norm, CoreError>
where
    SVector<f64, D>: Send + Sync,
{
    let values: Vec<Result<SVector<f64, D>, CoreError>> =
        nodes.par_iter().map(|(p, _)| field(p)).collect();
    let mut sum = 0.0;
    for ((_, w), v) in nodes.iter().zip(values) {
        sum += v?.norm_squared() * w;
    }
    let plain = sum.sqrt();
    Ok(L2Norm {
        plain,
        rms: plain / measure.sqrt(),
    })
}

/// L² norm over the circle `∂B(center, radius)`, sampled at the midpoints of
/// the inscribed `samples`-gon.
pub fn l2_norm_circle(
    field: impl Fn(&Vec2) -> Result<Vec2, CoreError> + Sync,
    center: &Vec2,
    radius: f64,
    samples: usize,
) -> Result<L2Norm, CoreError> {
    if samples < 8 {
        return Err(CoreError::ParamDomain(format!(
            "circle norm needs at least 8 samples, got {samples}"
        )));
    }
    let nodes = circle_nodes(center, radius, samples);
    l2_over_nodes(&nodes, 2.0 * std::f64::consts::PI * radius, field)
}

/// L² norm over the segment `[a, b]` with `subdivisions` equal midpoint
/// cells.
pub fn l2_norm_segment<const D: usize>(
    field: impl Fn(&SVector<f64, D>) -> Result<SVector<f64, D>, CoreError> + Sync,
    a: &SVector<f64, D>,
    b: &SVector<f64, D>,
    subdivisions: usize,
) -> Result<L2Norm, CoreError>
where
    SVector<f64, D>: Send + Sync,
{
    if subdivisions < 1 {
        return Err(CoreError::ParamDomain(
            "segment norm needs at least 1 subdivision".into(),
        ));
    }
    let length = (b - a).norm();
    if length == 0.0 {
        return Err(CoreError::ParamDomain("segment endpoints coincide".into()));
    }
    let nodes = segment_nodes(a, b, subdivisions);
    l2_over_nodes(&nodes, length, field)
}

/// L² norm over the parallelogram patch spanned by `edge1`, `edge2` from
/// `corner`, with an `n1 × n2` midpoint lattice.
pub fn l2_norm_rectangle(
    field: impl Fn(&Vec3) -> Result<Vec3, CoreError> + Sync,
    corner: &Vec3,
    edge1: &Vec3,
    edge2: &Vec3,
    n1: usize,
    n2: usize,
) -> Result<L2Norm, CoreError> {
    if n1 < 1 || n2 < 1 {
        return Err(CoreError::ParamDomain(format!(
            "rectangle norm needs at least 1x1 cells, got {n1}x{n2}"
        )));
    }
    let area = edge1.cross(edge2).norm();
    if area <= 1e-14 * edge1.norm() * edge2.norm() {
        return Err(CoreError::ParamDomain(
            "rectangle edges are linearly dependent".into(),
        ));
    }
    let nodes = rectangle_nodes(corner, edge1, edge2, n1, n2);
    l2_over_nodes(&nodes, area, field)
}

/// Population standard deviation of the radial field component over the
/// circle samples. Vanishes for a rotationally symmetric field.
pub fn std_normal_component(
    field: impl Fn(&Vec2) -> Result<Vec2, CoreError> + Sync,
    center: &Vec2,
    radius: f64,
    samples: usize,
) -> Result<f64, CoreError> {
    if samples < 8 {
        return Err(CoreError::ParamDomain(format!(
            "standard deviation needs at least 8 samples, got {samples}"
        )));
    }
    let nodes = circle_nodes(center, radius, samples);
    let values: Vec<Result<Vec2, CoreError>> = nodes.par_iter().map(|(p, _)| field(p)).collect();
    let mut components = Vec::with_capacity(samples);
    for ((p, _), v) in nodes.iter().zip(values) {
        let radial = (p - center).normalize();
        components.push(v?.dot(&radial));
    }
    let mean = components.iter().sum::<f64>() / samples as f64;
    let var = components
        .iter()
        .map(|c| (c - mean) * (c - mean))
        .sum::<f64>()
        / samples as f64;
    Ok(var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_field_circle_norms() {
        let c = Vec2::new(3.0, -4.0); // magnitude 5
        let radius = 0.5;
        let n = 64;
        let norm = l2_norm_circle(|_| Ok(c), &Vec2::zeros(), radius, n).unwrap();
        let polygon_perimeter = n as f64 * 2.0 * radius * (std::f64::consts::PI / n as f64).sin();
        assert_relative_eq!(
            norm.plain,
            5.0 * polygon_perimeter.sqrt(),
            max_relative = 1e-14
        );
        // RMS of a constant approaches its magnitude as the polygon fills the
        // circle.
        assert_relative_eq!(norm.rms, 5.0, max_relative = 1e-3);
        assert!(norm.rms < 5.0);
    }

    #[test]
    fn rms_is_plain_over_sqrt_measure() {
        let field = |p: &Vec2| Ok(Vec2::new(p.x * p.y, p.x - p.y));
        let norm = l2_norm_circle(field, &Vec2::new(1.0, 2.0), 0.7, 128).unwrap();
        let measure = 2.0 * std::f64::consts::PI * 0.7;
        assert_eq!(norm.rms, norm.plain / measure.sqrt());
    }

    #[test]
    fn frame_rotation_changes_circle_norm_at_second_order() {
        // Offsetting the sample frame is the same as rotating the field. A
        // field with a kink keeps the quadrature error at its generic
        // O(N^-2) scale (smooth fields converge spectrally and the gap sits
        // in rounding noise), so the gap must shrink with N.
        let field = |p: &Vec2| Ok(Vec2::new(p.x.abs(), 0.2 * p.y));
        let rot = nalgebra::Rotation2::new(std::f64::consts::PI / 64.0);
        let rotated = |p: &Vec2| field(&(rot * p)).map(|u| rot * u);
        let mut gaps = Vec::new();
        for n in [64, 256] {
            let a = l2_norm_circle(field, &Vec2::zeros(), 1.0, n).unwrap().plain;
            let b = l2_norm_circle(rotated, &Vec2::zeros(), 1.0, n)
                .unwrap()
                .plain;
            gaps.push((a - b).abs() / a);
        }
        assert!(gaps[0] < 1e-3, "gap {:.3e}", gaps[0]);
        assert!(gaps[1] < gaps[0] / 4.0, "gaps {gaps:?}");
    }

    #[test]
    fn constant_field_segment_norm_exact() {
        let c = Vec3::new(1.0, 2.0, 2.0); // magnitude 3
        let a = Vec3::zeros();
        let b = Vec3::new(0.0, 0.0, 1.0);
        for n in [1, 7, 32] {
            let norm = l2_norm_segment(|_| Ok(c), &a, &b, n).unwrap();
            assert_relative_eq!(norm.plain, 3.0, max_relative = 1e-15);
            assert_relative_eq!(norm.rms, 3.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn segment_norm_self_convergence_is_second_order() {
        let field = |p: &Vec3| Ok(Vec3::new((3.0 * p.z).sin(), (2.0 * p.z).cos(), p.z));
        let a = Vec3::new(10.0, 0.0, -1.0);
        let b = Vec3::new(10.0, 0.0, 1.0);
        let norms: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&n| l2_norm_segment(field, &a, &b, n).unwrap().plain)
            .collect();
        let d1 = (norms[0] - norms[1]).abs();
        let d2 = (norms[1] - norms[2]).abs();
        let d3 = (norms[2] - norms[3]).abs();
        assert!((3.5..=4.5).contains(&(d1 / d2)));
        assert!((3.5..=4.5).contains(&(d2 / d3)));
    }

    #[test]
    fn constant_field_unit_square_norm() {
        let c = Vec3::new(0.0, 3.0, 4.0);
        let norm = l2_norm_rectangle(
            |_| Ok(c),
            &Vec3::new(-1.0, -1.0, 0.0),
            &Vec3::new(1.0, 0.0, 0.0),
            &Vec3::new(0.0, 1.0, 0.0),
            5,
            9,
        )
        .unwrap();
        assert_relative_eq!(norm.plain, 5.0, max_relative = 1e-15);
        assert_relative_eq!(norm.rms, 5.0, max_relative = 1e-15);
    }

    #[test]
    fn rectangle_norm_self_convergence_is_second_order() {
        let field = |p: &Vec3| {
            Ok(Vec3::new(
                (2.0 * p.x + p.y).sin(),
                (p.x - 3.0 * p.y).cos(),
                0.5 * p.x * p.y,
            ))
        };
        let corner = Vec3::new(-1.0, -1.0, 0.0);
        let e1 = Vec3::new(1.0, 0.0, 0.0);
        let e2 = Vec3::new(0.0, 1.0, 0.0);
        let norms: Vec<f64> = [4, 8, 16, 32]
            .iter()
            .map(|&n| {
                l2_norm_rectangle(field, &corner, &e1, &e2, n, n)
                    .unwrap()
                    .plain
            })
            .collect();
        let d1 = (norms[0] - norms[1]).abs();
        let d2 = (norms[1] - norms[2]).abs();
        let d3 = (norms[2] - norms[3]).abs();
        assert!((3.5..=4.5).contains(&(d1 / d2)), "ratio {}", d1 / d2);
        assert!((3.5..=4.5).contains(&(d2 / d3)), "ratio {}", d2 / d3);
    }

    #[test]
    fn degenerate_rectangle_rejected() {
        let r = l2_norm_rectangle(
            |_| Ok(Vec3::zeros()),
            &Vec3::zeros(),
            &Vec3::new(1.0, 1.0, 0.0),
            &Vec3::new(2.0, 2.0, 0.0),
            4,
            4,
        );
        assert!(r.is_err());
    }

    #[test]
    fn radial_field_has_zero_normal_spread() {
        // Constant-magnitude radial field: every sample sees the same normal
        // component.
        let center = Vec2::new(0.5, -0.25);
        let field = |p: &Vec2| Ok(2.5 * (p - center).normalize());
        let std = std_normal_component(field, &center, 0.8, 256).unwrap();
        assert!(std <= 1e-15);
    }

    #[test]
    fn std_invariant_under_rigid_rotation() {
        let mesh = crate::BoundaryMesh2D::circle(Vec2::zeros(), 0.3, 10, 1.0e3).unwrap();
        let mat = crate::Material::new(1.0e7, 0.25).unwrap();
        let field = |p: &Vec2| crate::field_sum_2d(&mesh, &mat, p).map(|s| s.displacement);
        let rot = nalgebra::Rotation2::new(0.71);
        let rot_mesh =
            crate::BoundaryMesh2D::circle_with(Vec2::zeros(), 0.3, 10, |_| 1.0e3).unwrap();
        // Rotating the whole configuration = evaluating the original field in
        // rotated coordinates and rotating the displacement back out.
        let rotated_field = |p: &Vec2| {
            crate::field_sum_2d(&rot_mesh, &mat, &(rot.inverse() * p)).map(|s| rot * s.displacement)
        };
        let a = std_normal_component(field, &Vec2::zeros(), 0.5, 160).unwrap();
        let b = std_normal_component(rotated_field, &Vec2::zeros(), 0.5, 160).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-10);
    }

    #[test]
    fn sample_floor_enforced() {
        assert!(l2_norm_circle(|_| Ok(Vec2::zeros()), &Vec2::zeros(), 1.0, 7).is_err());
        assert!(std_normal_component(|_| Ok(Vec2::zeros()), &Vec2::zeros(), 1.0, 4).is_err());
    }
}

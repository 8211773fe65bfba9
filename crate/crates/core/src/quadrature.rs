use crate::error::CoreError;
use crate::icosphere::SurfaceMesh3D;
use crate::Vec2;

/// Value of a composite midpoint quadrature together with the mesh data that
/// produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub element_count: usize,
    /// Maximal element diameter.
    pub h: f64,
}

/// Composite midpoint rule over a closed polygon: `Σ f(midpoint_j) · len_j`.
///
/// Exact for affine integrands; second order in the longest segment for C²
/// integrands. Integrand failures are reported with the segment index.
pub fn midpoint_polyline(
    mut f: impl FnMut(&Vec2) -> Result<f64, CoreError>,
    vertices: &[Vec2],
) -> Result<QuadratureResult, CoreError> {
    if vertices.len() < 3 {
        return Err(CoreError::ParamDomain(format!(
            "a closed polygon needs at least 3 vertices, got {}",
            vertices.len()
        )));
    }
    let m = vertices.len();
    let mut value = 0.0;
    let mut h = 0.0_f64;
    for j in 0..m {
        let a = vertices[j];
        let b = vertices[(j + 1) % m];
        let len = (b - a).norm();
        let mid = 0.5 * (a + b);
        value += f(&mid).map_err(|e| e.at_element(j))? * len;
        h = h.max(len);
    }
    Ok(QuadratureResult {
        value,
        element_count: m,
        h,
    })
}

/// Centroid rule over a triangulated surface: `Σ f(centroid_j) · area_j`.
///
/// Mirrors [`midpoint_polyline`] one dimension up; exact for affine
/// integrands, second order in the longest triangle edge otherwise.
pub fn midpoint_triangles(
    mut f: impl FnMut(&crate::Vec3) -> Result<f64, CoreError>,
    mesh: &SurfaceMesh3D,
) -> Result<QuadratureResult, CoreError> {
    let mut value = 0.0;
    for (j, s) in mesh.stations().iter().enumerate() {
        value += f(&s.position).map_err(|e| e.at_element(j))? * s.measure;
    }
    Ok(QuadratureResult {
        value,
        element_count: mesh.stations().len(),
        h: mesh.h(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Vec3;
    use approx::assert_relative_eq;

    fn regular_polygon(radius: f64, m: usize) -> Vec<Vec2> {
        (0..m)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                radius * Vec2::new(t.cos(), t.sin())
            })
            .collect()
    }

    /// Exact integral of a quadratic along one segment, from the quadratic's
    /// closed-form antiderivative in the segment parameter.
    fn exact_segment_integral(f: impl Fn(&Vec2) -> f64, a: &Vec2, b: &Vec2) -> f64 {
        // f restricted to the segment is a quadratic polynomial in t; Simpson
        // integrates it exactly.
        let len = (b - a).norm();
        let mid = 0.5 * (a + b);
        len * (f(a) + 4.0 * f(&mid) + f(b)) / 6.0
    }

    #[test]
    fn constant_integrand_gives_perimeter() {
        let poly = regular_polygon(0.7, 9);
        let q = midpoint_polyline(|_| Ok(1.0), &poly).unwrap();
        let perimeter: f64 = (0..9).map(|j| (poly[(j + 1) % 9] - poly[j]).norm()).sum();
        assert_relative_eq!(q.value, perimeter, max_relative = 1e-15);
        assert_eq!(q.element_count, 9);
    }

    #[test]
    fn affine_integrand_exact_on_polygons() {
        let poly = regular_polygon(1.3, 11);
        let f = |p: &Vec2| 2.0 * p.x - 0.7 * p.y + 0.3;
        let q = midpoint_polyline(|p| Ok(f(p)), &poly).unwrap();
        let exact: f64 = (0..11)
            .map(|j| exact_segment_integral(f, &poly[j], &poly[(j + 1) % 11]))
            .sum();
        assert_relative_eq!(q.value, exact, max_relative = 1e-13);
    }

    #[test]
    fn quadratic_error_decays_second_order() {
        let f = |p: &Vec2| p.x * p.x;
        let mut errors = Vec::new();
        for k in 0..4 {
            let m = 16 << k;
            let poly = regular_polygon(1.0, m);
            let exact: f64 = (0..m)
                .map(|j| exact_segment_integral(f, &poly[j], &poly[(j + 1) % m]))
                .sum();
            let q = midpoint_polyline(|p| Ok(f(p)), &poly).unwrap();
            errors.push((q.value - exact).abs());
        }
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn integrand_failure_carries_segment_index() {
        let poly = regular_polygon(1.0, 5);
        let err = midpoint_polyline(
            |p| {
                if p.y < 0.0 {
                    Err(CoreError::ParamDomain("below axis".into()))
                } else {
                    Ok(1.0)
                }
            },
            &poly,
        )
        .unwrap_err();
        match err {
            CoreError::Element { element, .. } => assert!(element < 5),
            other => panic!("expected element error, got {other:?}"),
        }
    }

    #[test]
    fn too_few_vertices_rejected() {
        let two = [Vec2::zeros(), Vec2::new(1.0, 0.0)];
        assert!(midpoint_polyline(|_| Ok(1.0), &two).is_err());
    }

    #[test]
    fn triangle_constant_gives_total_area() {
        let mesh = SurfaceMesh3D::icosphere(Vec3::zeros(), 0.4, 2, 1.0).unwrap();
        let q = midpoint_triangles(|_| Ok(1.0), &mesh).unwrap();
        assert_relative_eq!(q.value, mesh.total_area(), max_relative = 1e-14);
        assert_eq!(q.element_count, 320);
    }

    /// Degree-2 exact rule on a flat triangle: average of the three edge
    /// midpoints.
    fn edge_midpoint_rule(f: impl Fn(&Vec3) -> f64, p1: &Vec3, p2: &Vec3, p3: &Vec3) -> f64 {
        let area = 0.5 * (p2 - p1).cross(&(p3 - p1)).norm();
        let m12 = 0.5 * (p1 + p2);
        let m23 = 0.5 * (p2 + p3);
        let m31 = 0.5 * (p3 + p1);
        area * (f(&m12) + f(&m23) + f(&m31)) / 3.0
    }

    fn exact_on_polyhedron(f: impl Fn(&Vec3) -> f64 + Copy, mesh: &SurfaceMesh3D) -> f64 {
        mesh.triangles()
            .iter()
            .map(|&[a, b, c]| {
                edge_midpoint_rule(
                    f,
                    &mesh.vertices()[a],
                    &mesh.vertices()[b],
                    &mesh.vertices()[c],
                )
            })
            .sum()
    }

    #[test]
    fn triangle_affine_exact() {
        let mesh = SurfaceMesh3D::icosphere(Vec3::new(0.1, 0.2, -0.3), 0.5, 1, 1.0).unwrap();
        let f = |p: &Vec3| 1.5 * p.x - 2.0 * p.y + 0.25 * p.z - 3.0;
        let q = midpoint_triangles(|p| Ok(f(p)), &mesh).unwrap();
        assert_relative_eq!(q.value, exact_on_polyhedron(f, &mesh), max_relative = 1e-13);
    }

    #[test]
    fn triangle_quadratic_error_decays_second_order() {
        // The icosahedron-to-level-1 window is pre-asymptotic (projection
        // still reshapes the triangles there), so start at level 1.
        let f = |p: &Vec3| p.norm_squared();
        let mut errors = Vec::new();
        for level in 1..=5 {
            let mesh = SurfaceMesh3D::icosphere(Vec3::zeros(), 1.0, level, 1.0).unwrap();
            let q = midpoint_triangles(|p| Ok(f(p)), &mesh).unwrap();
            errors.push((q.value - exact_on_polyhedron(f, &mesh)).abs());
        }
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        }
    }
}

use crate::error::CoreError;
use crate::material::Material;
use crate::{Mat2, Mat3, Vec2, Vec3};

/// Relative kernel singularity tolerance.
///
/// Evaluation is refused when `|x − x'|` falls below this fraction of the
/// characteristic length of the pair, `max(1, |x|, |x'|)`. The kernel is never
/// regularized; a too-close pair is an error.
pub const KERNEL_TOL_SING: f64 = 1e-12;

fn separation<const D: usize>(
    x: &nalgebra::SVector<f64, D>,
    source: &nalgebra::SVector<f64, D>,
) -> Result<f64, CoreError> {
    let r = (x - source).norm();
    let tol = KERNEL_TOL_SING * x.norm().max(source.norm()).max(1.0);
    if r < tol {
        Err(CoreError::Singular {
            distance: r,
            tolerance: tol,
        })
    } else {
        Ok(r)
    }
}

/// Plane-strain Kelvin tensor: displacement at `x` per unit point force at
/// `source` in an unbounded 2D medium,
///
/// ```text
/// G(x, x') = -1/(8πμ(1-ν)) [ (3-4ν) ln|x-x'| I₂ − (x-x')⊗(x-x') / |x-x'|² ]
/// ```
///
/// The two bracket terms carry opposite signs; with both positive the tensor
/// would not annihilate the Navier operator away from the source (see the
/// equilibrium tests).
pub fn greens_2d(x: &Vec2, source: &Vec2, mat: &Material) -> Result<Mat2, CoreError> {
    let r = separation(x, source)?;
    let d = x - source;
    let nu = mat.poisson_ratio();
    let pref = -1.0 / (8.0 * std::f64::consts::PI * mat.shear_modulus() * (1.0 - nu));
    let log_coeff = (3.0 - 4.0 * nu) * r.ln();
    let dyadic = d * d.transpose() / (r * r);
    Ok(pref * (Mat2::identity() * log_coeff - dyadic))
}

/// Kelvin tensor in 3D: displacement at `x` per unit point force at `source`
/// in an unbounded medium,
///
/// ```text
/// G(x, x') = (1+ν)/(16πE(1-ν)) [ (3-4ν) I₃ / r + (x-x')⊗(x-x') / r³ ]
/// ```
pub fn greens_3d(x: &Vec3, source: &Vec3, mat: &Material) -> Result<Mat3, CoreError> {
    let r = separation(x, source)?;
    let d = x - source;
    let nu = mat.poisson_ratio();
    let pref = (1.0 + nu) / (16.0 * std::f64::consts::PI * mat.young_modulus() * (1.0 - nu));
    let iso = (3.0 - 4.0 * nu) / r;
    let dyadic = d * d.transpose() / (r * r * r);
    Ok(pref * (Mat3::identity() * iso + dyadic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mat() -> Material {
        Material::new(1.0e7, 0.25).unwrap()
    }

    #[test]
    fn unit_separation_kills_log_term() {
        // r = 1 along e1: only the dyadic survives.
        let g = greens_2d(&Vec2::new(1.0, 0.0), &Vec2::zeros(), &mat()).unwrap();
        let pref = 1.0 / (8.0 * std::f64::consts::PI * 4.0e6 * 0.75);
        assert_relative_eq!(g[(0, 0)], pref, max_relative = 1e-15);
        assert_eq!(g[(0, 1)], 0.0);
        assert_eq!(g[(1, 0)], 0.0);
        assert_eq!(g[(1, 1)], 0.0);
    }

    #[test]
    fn scalar_hand_evaluation_2d() {
        // G11 for collinear points: pref * ((3-4v) ln r - 1), evaluated with
        // plain scalar arithmetic as an independent route.
        let x = Vec2::new(0.5, 0.0);
        let src = Vec2::new(0.3, 0.0);
        let g = greens_2d(&x, &src, &mat()).unwrap();
        let pref = -1.0 / (8.0 * std::f64::consts::PI * 4.0e6 * 0.75);
        let expect_g11 = pref * (2.0 * 0.2f64.ln() - 1.0);
        let expect_g22 = pref * (2.0 * 0.2f64.ln());
        assert_relative_eq!(g[(0, 0)], expect_g11, max_relative = 1e-14);
        assert_relative_eq!(g[(1, 1)], expect_g22, max_relative = 1e-14);
        assert_eq!(g[(0, 1)], 0.0);
    }

    #[test]
    fn scalar_hand_evaluation_3d() {
        // G11 at r = 2 along e1: pref * ((3-4v)/2 + 4/8).
        let g = greens_3d(&Vec3::new(2.0, 0.0, 0.0), &Vec3::zeros(), &mat()).unwrap();
        let pref = 1.25 / (16.0 * std::f64::consts::PI * 1.0e7 * 0.75);
        assert_relative_eq!(
            g[(0, 0)],
            pref * (2.0 / 2.0 + 4.0 / 8.0),
            max_relative = 1e-14
        );
        assert_relative_eq!(g[(1, 1)], pref * (2.0 / 2.0), max_relative = 1e-14);
        assert_eq!(g[(0, 2)], 0.0);
    }

    #[test]
    fn symmetric_in_arguments() {
        let a = Vec3::new(0.4, -1.2, 2.0);
        let b = Vec3::new(-0.3, 0.9, 0.1);
        let gab = greens_3d(&a, &b, &mat()).unwrap();
        let gba = greens_3d(&b, &a, &mat()).unwrap();
        assert_relative_eq!(gab, gba, max_relative = 1e-15);

        let a2 = Vec2::new(0.4, -1.2);
        let b2 = Vec2::new(-0.3, 0.9);
        assert_relative_eq!(
            greens_2d(&a2, &b2, &mat()).unwrap(),
            greens_2d(&b2, &a2, &mat()).unwrap(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn isotropic_part_scales_as_inverse_r() {
        // Doubling r along a fixed direction halves the identity term.
        let m = mat();
        let g1 = greens_3d(&Vec3::new(0.0, 1.0, 0.0), &Vec3::zeros(), &m).unwrap();
        let g2 = greens_3d(&Vec3::new(0.0, 2.0, 0.0), &Vec3::zeros(), &m).unwrap();
        // G00 has no dyadic contribution for a displacement along e2.
        assert_relative_eq!(g1[(0, 0)], 2.0 * g2[(0, 0)], max_relative = 1e-14);
        assert_relative_eq!(g1[(2, 2)], 2.0 * g2[(2, 2)], max_relative = 1e-14);
    }

    #[test]
    fn coincident_points_rejected() {
        let p = Vec2::new(0.7, -0.2);
        match greens_2d(&p, &p, &mat()) {
            Err(CoreError::Singular { .. }) => {}
            other => panic!("expected singular error, got {other:?}"),
        }
        let q = Vec3::new(1.0, 2.0, 3.0);
        assert!(greens_3d(&q, &(q + Vec3::new(1e-14, 0.0, 0.0)), &mat()).is_err());
    }
}

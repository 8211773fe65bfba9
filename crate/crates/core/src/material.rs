use crate::error::CoreError;

/// Homogeneous, isotropic, linearly elastic material.
///
/// Constructed from the Young's modulus `E` and Poisson ratio `ν`; the Lamé
/// pair is derived once at construction:
///
/// ```text
/// μ = E / (2 (1 + ν)),    λ = E ν / ((1 + ν) (1 − 2ν))
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    young_modulus: f64,
    poisson_ratio: f64,
    shear_modulus: f64,
    lame_lambda: f64,
}

impl Material {
    /// Builds a material from `E > 0` and `ν ∈ (0, 0.5)`.
    ///
    /// The open upper bound keeps λ finite (it diverges at the incompressible
    /// limit ν = 0.5); non-positive ν is rejected because the intended media
    /// are soft tissues.
    pub fn new(young_modulus: f64, poisson_ratio: f64) -> Result<Self, CoreError> {
        if !young_modulus.is_finite() || young_modulus <= 0.0 {
            return Err(CoreError::ParamDomain(format!(
                "Young's modulus must be positive, got {young_modulus}"
            )));
        }
        if !poisson_ratio.is_finite() || poisson_ratio <= 0.0 || poisson_ratio >= 0.5 {
            return Err(CoreError::ParamDomain(format!(
                "Poisson ratio must lie in (0, 0.5), got {poisson_ratio}"
            )));
        }
        let shear_modulus = young_modulus / (2.0 * (1.0 + poisson_ratio));
        let lame_lambda =
            young_modulus * poisson_ratio / ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
        Ok(Self {
            young_modulus,
            poisson_ratio,
            shear_modulus,
            lame_lambda,
        })
    }

    pub fn young_modulus(&self) -> f64 {
        self.young_modulus
    }

    pub fn poisson_ratio(&self) -> f64 {
        self.poisson_ratio
    }

    /// Shear modulus μ.
    pub fn shear_modulus(&self) -> f64 {
        self.shear_modulus
    }

    /// First Lamé parameter λ.
    pub fn lame_lambda(&self) -> f64 {
        self.lame_lambda
    }
}

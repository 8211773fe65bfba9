use thiserror::Error;

/// Errors produced by mesh construction, field evaluation, and the
/// convergence instrumentation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoreError {
    /// A constructor argument is outside its admissible domain.
    #[error("parameter out of domain: {0}")]
    ParamDomain(String),

    /// Source and evaluation point coincide within the kernel tolerance.
    #[error("evaluation point within {tolerance:.3e} of the source (distance {distance:.3e})")]
    Singular { distance: f64, tolerance: f64 },

    /// An evaluation point sits inside the clearance shell of a force station.
    #[error(
        "evaluation point within {tolerance:.3e} of station {station} (distance {distance:.3e})"
    )]
    StationTooClose {
        station: usize,
        distance: f64,
        tolerance: f64,
    },

    /// An integrand failed on a specific mesh element.
    #[error("element {element}: {source}")]
    Element {
        element: usize,
        #[source]
        source: Box<CoreError>,
    },

    /// Extrapolation stalled before reaching the requested tolerance.
    #[error(
        "extrapolation gap {gap:.3e} still above rel_tol {rel_tol:.1e} at resolution {resolution}"
    )]
    NoConvergence {
        rel_tol: f64,
        gap: f64,
        resolution: u64,
    },

    /// The Richardson denominator sits below the floating-point noise floor.
    #[error("Richardson denominator {denominator:.3e} below noise floor {floor:.3e}")]
    DegenerateDenominator { denominator: f64, floor: f64 },
}

impl CoreError {
    pub(crate) fn at_element(self, element: usize) -> CoreError {
        CoreError::Element {
            element,
            source: Box::new(self),
        }
    }
}

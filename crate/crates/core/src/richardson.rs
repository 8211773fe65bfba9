use crate::error::CoreError;

/// Observed order of convergence from three norms at resolutions `h`, `h/2`,
/// `h/4`:
///
/// ```text
/// q = log2( |n_h − n_{h/2}| / |n_{h/2} − n_{h/4}| )
/// ```
///
/// Fails when the denominator falls below the floating-point noise floor of
/// the inputs, where no order can be read off.
pub fn richardson_q(n_h: f64, n_h2: f64, n_h4: f64) -> Result<f64, CoreError> {
    if !(n_h.is_finite() && n_h2.is_finite() && n_h4.is_finite()) {
        return Err(CoreError::ParamDomain(
            "Richardson estimation needs finite norms".into(),
        ));
    }
    let denominator = (n_h2 - n_h4).abs();
    let floor = 32.0 * f64::EPSILON * n_h.abs().max(n_h2.abs()).max(n_h4.abs());
    if denominator <= floor {
        return Err(CoreError::DegenerateDenominator { denominator, floor });
    }
    Ok(((n_h - n_h2).abs() / denominator).log2())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_convergence_triples() {
        // Rates reconstructed from the reported circle norms at m = 10..80.
        let q1 = richardson_q(4.2100e-6, 4.4263e-6, 4.4815e-6).unwrap();
        assert!((q1 - 1.9703).abs() < 1e-3, "q1 = {q1}");
        let q2 = richardson_q(4.4263e-6, 4.4815e-6, 4.4954e-6).unwrap();
        assert!((q2 - 1.9896).abs() < 1e-3, "q2 = {q2}");
    }

    #[test]
    fn exact_second_order_sequence() {
        // n(h) = A + B h^2 sampled at h, h/2, h/4 gives exactly 2.
        let (a, b, h) = (3.7, -0.9, 0.1);
        let n = |h: f64| a + b * h * h;
        let q = richardson_q(n(h), n(h / 2.0), n(h / 4.0)).unwrap();
        assert!((q - 2.0).abs() < 1e-12);
    }

    #[test]
    fn first_order_sequence() {
        let n = |h: f64| 1.0 + 0.5 * h;
        let q = richardson_q(n(0.2), n(0.1), n(0.05)).unwrap();
        assert!((q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn converged_sequence_is_degenerate() {
        match richardson_q(1.0, 1.0 + 1e-16, 1.0) {
            Err(CoreError::DegenerateDenominator { .. }) => {}
            other => panic!("expected degenerate denominator, got {other:?}"),
        }
    }
}

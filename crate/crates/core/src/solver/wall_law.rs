//! Analytic law of the wall used by the low-fidelity wall closure.

use crate::error::{Error, Result};

/// Von Karman constant.
pub const KAPPA: f64 = 0.41;
/// Log-law intercept.
pub const B_LOG: f64 = 5.0;

/// Reichardt's smooth blending of the viscous sublayer (u+ = y+) and the
/// logarithmic law u+ = (1/kappa) ln(y+) + B.
///
/// The blending constant is fixed by requiring the large-y+ asymptote to
/// reproduce the log law exactly: C = B - ln(kappa)/kappa.
///
/// Strictly increasing in y+, with u+(0) = 0 and u+ ~ y+ for y+ -> 0.
pub fn law_of_the_wall(y_plus: f64) -> Result<f64> {
    if !y_plus.is_finite() || y_plus < 0.0 {
        return Err(Error::Domain(format!(
            "law_of_the_wall requires finite y+ >= 0, got {y_plus}"
        )));
    }
    Ok(reichardt(y_plus))
}

/// Unchecked evaluation for hot solver loops; callers guarantee y+ >= 0.
#[inline]
pub(crate) fn reichardt(y_plus: f64) -> f64 {
    let c = B_LOG - KAPPA.ln() / KAPPA;
    (1.0 / KAPPA) * (1.0 + KAPPA * y_plus).ln()
        + c * (1.0 - (-y_plus / 11.0).exp() - (y_plus / 11.0) * (-y_plus / 3.0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Reference values evaluated independently from the closed-form
    // expression (frozen; see also the log-law asymptote check below).
    const U_PLUS_AT_5: f64 = 4.724528204069646;
    const U_PLUS_AT_1000: f64 = 21.854125204341507;

    #[test]
    fn no_slip_limit() {
        assert_eq!(law_of_the_wall(0.0).unwrap(), 0.0);
    }

    #[test]
    fn buffer_layer_value_in_bounds() {
        let u = law_of_the_wall(5.0).unwrap();
        assert!(u > 4.0 && u < 5.0, "u+(5) = {u} outside (4, 5)");
        assert_relative_eq!(u, U_PLUS_AT_5, max_relative = 1e-12);
    }

    #[test]
    fn log_law_asymptote() {
        let u = law_of_the_wall(1000.0).unwrap();
        let log_law = (1000.0f64).ln() / KAPPA + B_LOG;
        assert!(
            (u - log_law).abs() / log_law < 0.02,
            "u+(1000) = {u} deviates more than 2% from log law {log_law}"
        );
        assert_relative_eq!(u, U_PLUS_AT_1000, max_relative = 1e-12);
    }

    #[test]
    fn sublayer_tracks_y_plus() {
        // u+ = y+ holds to within ~1% through the viscous sublayer.
        for &yp in &[0.1, 0.5, 1.0] {
            let u = law_of_the_wall(yp).unwrap();
            assert_relative_eq!(u, yp, max_relative = 0.01);
        }
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert!(law_of_the_wall(-1e-9).is_err());
        assert!(law_of_the_wall(f64::NAN).is_err());
        assert!(law_of_the_wall(f64::INFINITY).is_err());
    }

    #[test]
    fn strictly_increasing() {
        let mut prev = law_of_the_wall(0.0).unwrap();
        let mut yp = 1e-3;
        while yp < 1e5 {
            let u = law_of_the_wall(yp).unwrap();
            assert!(u > prev, "not increasing at y+ = {yp}");
            prev = u;
            yp *= 1.1;
        }
    }
}

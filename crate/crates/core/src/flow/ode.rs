//! Second-order form of the characteristic system: `8BB_xx + 12B_x² = 1`.

use super::FlowError;

/// `8BB_xx + 12B_x² − 1` at interior points of a uniform grid with step `dx`,
/// using central differences.
pub fn residual_ode(b: &[f64], dx: f64) -> Result<Vec<f64>, FlowError> {
    if b.len() < 5 {
        return Err(FlowError::TooFewSamples { needed: 5, got: b.len() });
    }
    if !(dx > 0.0) {
        return Err(FlowError::Invalid(format!("grid step {dx} must be positive")));
    }
    Ok(b.windows(3)
        .map(|w| {
            let bx = (w[2] - w[0]) / (2.0 * dx);
            let bxx = (w[2] - 2.0 * w[1] + w[0]) / (dx * dx);
            8.0 * w[1] * bxx + 12.0 * bx * bx - 1.0
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_similar_line_has_zero_residual() {
        let b: Vec<f64> = (0..20).map(|k| (1.0 + 0.1 * k as f64) / 12f64.sqrt()).collect();
        assert!(residual_ode(&b, 0.1).unwrap().iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn identity_has_residual_eleven() {
        let b: Vec<f64> = (0..8).map(|k| k as f64 * 0.5).collect();
        let res = residual_ode(&b, 0.5).unwrap();
        assert_eq!(res.len(), 6);
        assert!(res.iter().all(|r| (r - 11.0).abs() < 1e-12));
    }

    #[test]
    fn needs_five_points() {
        assert!(residual_ode(&[1.0; 4], 0.1).is_err());
    }
}

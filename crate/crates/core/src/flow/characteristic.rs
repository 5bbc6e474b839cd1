//! Classical RK4 along a characteristic `y = const`:
//! `dB/dx = A/(2B)`, `dA/dx = ¼(1 − A²/B²)`.

use super::FlowError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacteristicState {
    pub x: f64,
    pub b: f64,
    pub a: f64,
}

/// `A²B/4 − B³/12`, constant along characteristics.
pub fn first_integral(b: f64, a: f64) -> f64 {
    a * a * b / 4.0 - b * b * b / 12.0
}

fn rhs(b: f64, a: f64) -> (f64, f64) {
    (a / (2.0 * b), 0.25 * (1.0 - a * a / (b * b)))
}

fn check(s: CharacteristicState) -> Result<CharacteristicState, FlowError> {
    if s.b > 0.0 && s.b.is_finite() && s.a.is_finite() {
        Ok(s)
    } else {
        Err(FlowError::DegenerateCharacteristic { x: s.x, b: s.b })
    }
}

/// Integrates from `start` to `x_end` in `steps` equal steps, calling
/// `visit` on every state including the first.
pub fn integrate_characteristic(
    start: CharacteristicState,
    x_end: f64,
    steps: usize,
    mut visit: impl FnMut(&CharacteristicState),
) -> Result<CharacteristicState, FlowError> {
    if steps == 0 {
        return Err(FlowError::Invalid("steps must be at least 1".into()));
    }
    if !(start.a > 0.0) {
        return Err(FlowError::Invalid(format!("initial A = {} must be positive", start.a)));
    }
    let mut s = check(start)?;
    visit(&s);
    let dx = (x_end - start.x) / steps as f64;
    for i in 1..=steps {
        let (k1b, k1a) = rhs(s.b, s.a);
        let (k2b, k2a) = rhs(s.b + 0.5 * dx * k1b, s.a + 0.5 * dx * k1a);
        let (k3b, k3a) = rhs(s.b + 0.5 * dx * k2b, s.a + 0.5 * dx * k2a);
        let (k4b, k4a) = rhs(s.b + dx * k3b, s.a + dx * k3a);
        s = check(CharacteristicState {
            x: start.x + i as f64 * dx,
            b: s.b + dx / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b),
            a: s.a + dx / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
        })?;
        visit(&s);
    }
    Ok(s)
}

/// State at `x_end` of the characteristic through `(x = y, B, A)`.
pub fn characteristic_oracle(
    y: f64,
    b_init: f64,
    a_init: f64,
    x_end: f64,
    steps: usize,
) -> Result<CharacteristicState, FlowError> {
    if !(x_end > y) {
        return Err(FlowError::Invalid(format!("x_end = {x_end} must exceed y = {y}")));
    }
    integrate_characteristic(CharacteristicState { x: y, b: b_init, a: a_init }, x_end, steps, |_| {})
}

/// Largest `|f(x) − f(start)|` along the integration.
pub fn first_integral_drift(
    start: CharacteristicState,
    x_end: f64,
    steps: usize,
) -> Result<f64, FlowError> {
    let f0 = first_integral(start.b, start.a);
    let mut drift: f64 = 0.0;
    integrate_characteristic(start, x_end, steps, |s| {
        drift = drift.max((first_integral(s.b, s.a) - f0).abs());
    })?;
    Ok(drift)
}

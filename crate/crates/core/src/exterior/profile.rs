//! Numeric sources for `A`, `B` and their partial derivatives.

use super::expr::{Field, Symbol, SymbolValues};
use super::EvalError;

/// Supplies values of `A`, `B` and their partials at `(r, t)`.
pub trait Profile: Sync {
    fn partial(&self, field: Field, r_order: u8, t_order: u8, r: f64, t: f64)
        -> Result<f64, EvalError>;

    fn value(&self, field: Field, r: f64, t: f64) -> Result<f64, EvalError> {
        self.partial(field, 0, 0, r, t)
    }

    /// `(A, B, A_r, B_r, A_t, B_t)`.
    fn first_jet(&self, r: f64, t: f64) -> Result<[f64; 6], EvalError> {
        Ok([
            self.partial(Field::A, 0, 0, r, t)?,
            self.partial(Field::B, 0, 0, r, t)?,
            self.partial(Field::A, 1, 0, r, t)?,
            self.partial(Field::B, 1, 0, r, t)?,
            self.partial(Field::A, 0, 1, r, t)?,
            self.partial(Field::B, 0, 1, r, t)?,
        ])
    }
}

impl<P: Profile + ?Sized> Profile for &P {
    fn partial(&self, field: Field, r_order: u8, t_order: u8, r: f64, t: f64)
        -> Result<f64, EvalError> {
        (**self).partial(field, r_order, t_order, r, t)
    }
}

/// A profile frozen at one point, usable as [`SymbolValues`].
pub struct ProfileAt<'a, P: ?Sized> {
    profile: &'a P,
    r: f64,
    t: f64,
}

impl<'a, P: Profile + ?Sized> ProfileAt<'a, P> {
    pub fn new(profile: &'a P, r: f64, t: f64) -> Self {
        ProfileAt { profile, r, t }
    }
}

impl<P: Profile + ?Sized> SymbolValues for ProfileAt<'_, P> {
    fn value(&self, s: Symbol) -> Result<f64, EvalError> {
        self.profile
            .partial(s.field, s.r_order, s.t_order, self.r, self.t)
    }
}

/// Values and first partials at a single point; the same jet is returned for
/// every `(r, t)`. Higher partials are unavailable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointJet {
    pub a: f64,
    pub b: f64,
    pub a_r: f64,
    pub b_r: f64,
    pub a_t: f64,
    pub b_t: f64,
}

impl PointJet {
    pub fn new(a: f64, b: f64) -> Self {
        PointJet {
            a,
            b,
            a_r: 0.0,
            b_r: 0.0,
            a_t: 0.0,
            b_t: 0.0,
        }
    }

    pub fn with_r_derivatives(self, a_r: f64, b_r: f64) -> Self {
        PointJet { a_r, b_r, ..self }
    }

    pub fn with_t_derivatives(self, a_t: f64, b_t: f64) -> Self {
        PointJet { a_t, b_t, ..self }
    }
}

impl Profile for PointJet {
    fn partial(&self, field: Field, r_order: u8, t_order: u8, _r: f64, _t: f64)
        -> Result<f64, EvalError> {
        let (v, vr, vt) = match field {
            Field::A => (self.a, self.a_r, self.a_t),
            Field::B => (self.b, self.b_r, self.b_t),
        };
        match (r_order, t_order) {
            (0, 0) => Ok(v),
            (1, 0) => Ok(vr),
            (0, 1) => Ok(vt),
            _ => Err(EvalError::Unsupported(Symbol::new(field, r_order, t_order))),
        }
    }
}

/// Bivariate polynomial `Σ c_ij r^i t^j`, differentiable to any order.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly2 {
    /// `coeffs[i][j]` multiplies `r^i t^j`.
    coeffs: Vec<Vec<f64>>,
}

impl Poly2 {
    pub fn new(coeffs: Vec<Vec<f64>>) -> Self {
        Poly2 { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Poly2::new(vec![vec![c]])
    }

    /// `slope · r`.
    pub fn linear_r(slope: f64) -> Self {
        Poly2::new(vec![vec![0.0], vec![slope]])
    }

    pub fn derivative(&self, r_order: u8, t_order: u8, r: f64, t: f64) -> f64 {
        let mut total = 0.0;
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c == 0.0 || i < r_order as usize || j < t_order as usize {
                    continue;
                }
                let fr = falling(i, r_order as usize) * r.powi((i - r_order as usize) as i32);
                let ft = falling(j, t_order as usize) * t.powi((j - t_order as usize) as i32);
                total += c * fr * ft;
            }
        }
        total
    }
}

fn falling(n: usize, k: usize) -> f64 {
    ((n - k + 1)..=n).map(|v| v as f64).product()
}

/// Profile with polynomial `A` and `B`. `r/3, r/√3` is the torsion-free cone.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialProfile {
    pub a: Poly2,
    pub b: Poly2,
}

impl PolynomialProfile {
    pub fn new(a: Poly2, b: Poly2) -> Self {
        PolynomialProfile { a, b }
    }

    pub fn constant(a: f64, b: f64) -> Self {
        PolynomialProfile::new(Poly2::constant(a), Poly2::constant(b))
    }

    /// `A = a·r`, `B = b·r`.
    pub fn linear(a: f64, b: f64) -> Self {
        PolynomialProfile::new(Poly2::linear_r(a), Poly2::linear_r(b))
    }

    /// The cone `A = r/3`, `B = r/√3`.
    pub fn g2_cone() -> Self {
        PolynomialProfile::linear(1.0 / 3.0, 1.0 / 3f64.sqrt())
    }
}

impl Profile for PolynomialProfile {
    fn partial(&self, field: Field, r_order: u8, t_order: u8, r: f64, t: f64)
        -> Result<f64, EvalError> {
        let p = match field {
            Field::A => &self.a,
            Field::B => &self.b,
        };
        let v = p.derivative(r_order, t_order, r, t);
        if r_order == 0 && t_order == 0 && v <= 0.0 {
            return Err(EvalError::NonPositive { field, value: v });
        }
        Ok(v)
    }
}

/// Largest relative mismatch between supplied first partials and central
/// differences of supplied values at `(r, t)`.
pub fn derivative_consistency<P: Profile + ?Sized>(
    profile: &P,
    r: f64,
    t: f64,
    step: f64,
) -> Result<f64, EvalError> {
    let mut worst = 0.0f64;
    for field in [Field::A, Field::B] {
        let dr = (profile.value(field, r + step, t)? - profile.value(field, r - step, t)?)
            / (2.0 * step);
        let dt = (profile.value(field, r, t + step)? - profile.value(field, r, t - step)?)
            / (2.0 * step);
        let sr = profile.partial(field, 1, 0, r, t)?;
        let st = profile.partial(field, 0, 1, r, t)?;
        worst = worst.max((dr - sr).abs() / sr.abs().max(1.0));
        worst = worst.max((dt - st).abs() / st.abs().max(1.0));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        // A = 1 + 2 r t + 3 r^2
        let p = Poly2::new(vec![vec![1.0], vec![0.0, 2.0], vec![3.0]]);
        assert_eq!(p.derivative(0, 0, 2.0, 5.0), 1.0 + 20.0 + 12.0);
        assert_eq!(p.derivative(1, 0, 2.0, 5.0), 10.0 + 12.0);
        assert_eq!(p.derivative(0, 1, 2.0, 5.0), 4.0);
        assert_eq!(p.derivative(2, 0, 2.0, 5.0), 6.0);
        assert_eq!(p.derivative(1, 1, 2.0, 5.0), 2.0);
        assert_eq!(p.derivative(3, 0, 2.0, 5.0), 0.0);
    }

    #[test]
    fn positivity_is_enforced() {
        let p = PolynomialProfile::linear(1.0, -1.0);
        assert!(p.value(Field::B, 2.0, 0.0).is_err());
        assert!(p.value(Field::A, 2.0, 0.0).is_ok());
    }

    #[test]
    fn polynomial_profile_is_self_consistent() {
        let p = PolynomialProfile::new(
            Poly2::new(vec![vec![1.0, 0.3], vec![0.2, 0.1]]),
            Poly2::new(vec![vec![2.0], vec![0.5], vec![0.01]]),
        );
        assert!(derivative_consistency(&p, 2.0, 0.5, 1e-5).unwrap() < 1e-8);
    }

    #[test]
    fn jet_rejects_second_partials() {
        let j = PointJet::new(1.0, 1.0);
        assert!(j.partial(Field::A, 2, 0, 1.0, 0.0).is_err());
        assert_eq!(j.first_jet(1.0, 0.0).unwrap(), [1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    }
}

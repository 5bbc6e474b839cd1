//! The free data `f(y)`, `h(y)` of the explicit solution.

use std::fmt;
use std::sync::Arc;

use super::solution::{quadrature_f, quadrature_f_df};
use super::FlowError;

/// A real function of `y` together with its derivative.
pub trait SmoothFn: Send + Sync + fmt::Debug {
    fn value(&self, y: f64) -> Result<f64, FlowError>;
    fn derivative(&self, y: f64) -> Result<f64, FlowError>;
    /// Whether the function is bounded on all of ℝ, if known in closed form.
    fn bounded(&self) -> Option<bool> {
        None
    }
    /// `false` for data that is only C¹ (interpolated tables).
    fn smooth(&self) -> bool {
        true
    }
    /// Constant value, if the function is constant.
    fn as_constant(&self) -> Option<f64> {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constant(pub f64);

impl SmoothFn for Constant {
    fn value(&self, _: f64) -> Result<f64, FlowError> {
        Ok(self.0)
    }
    fn derivative(&self, _: f64) -> Result<f64, FlowError> {
        Ok(0.0)
    }
    fn bounded(&self) -> Option<bool> {
        Some(true)
    }
    fn as_constant(&self) -> Option<f64> {
        Some(self.0)
    }
}

/// `c·exp(−y²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianBump(pub f64);

impl SmoothFn for GaussianBump {
    fn value(&self, y: f64) -> Result<f64, FlowError> {
        Ok(self.0 * (-y * y).exp())
    }
    fn derivative(&self, y: f64) -> Result<f64, FlowError> {
        Ok(-2.0 * y * self.0 * (-y * y).exp())
    }
    fn bounded(&self) -> Option<bool> {
        Some(true)
    }
}

/// `c/(1 + y²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RationalDecay(pub f64);

impl SmoothFn for RationalDecay {
    fn value(&self, y: f64) -> Result<f64, FlowError> {
        Ok(self.0 / (1.0 + y * y))
    }
    fn derivative(&self, y: f64) -> Result<f64, FlowError> {
        let q = 1.0 + y * y;
        Ok(-2.0 * y * self.0 / (q * q))
    }
    fn bounded(&self) -> Option<bool> {
        Some(true)
    }
}

/// `slope·y + intercept`; unbounded unless the slope is zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine {
    pub slope: f64,
    pub intercept: f64,
}

impl SmoothFn for Affine {
    fn value(&self, y: f64) -> Result<f64, FlowError> {
        Ok(self.slope * y + self.intercept)
    }
    fn derivative(&self, _: f64) -> Result<f64, FlowError> {
        Ok(self.slope)
    }
    fn bounded(&self) -> Option<bool> {
        Some(self.slope == 0.0)
    }
    fn as_constant(&self) -> Option<f64> {
        (self.slope == 0.0).then_some(self.intercept)
    }
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch–Carlson slopes),
/// held constant outside the sampled range.
#[derive(Clone, Debug, PartialEq)]
pub struct Pchip {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl Pchip {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, FlowError> {
        if xs.len() != ys.len() {
            return Err(FlowError::Invalid("abscissae and values differ in length".into()));
        }
        if xs.len() < 2 {
            return Err(FlowError::TooFewSamples { needed: 2, got: xs.len() });
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(FlowError::Invalid("non-finite table entry".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FlowError::Invalid("abscissae must be strictly increasing".into()));
        }
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
        let mut slopes = vec![0.0; n];
        if n == 2 {
            slopes = vec![delta[0]; 2];
        } else {
            for k in 1..n - 1 {
                if delta[k - 1] * delta[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    slopes[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
                }
            }
            slopes[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            slopes[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Pchip { xs, ys, slopes })
    }

    fn locate(&self, x: f64) -> Option<usize> {
        let n = self.xs.len();
        if x < self.xs[0] || x > self.xs[n - 1] {
            return None;
        }
        let k = self.xs.partition_point(|&v| v <= x);
        Some(k.clamp(1, n - 1) - 1)
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}

impl SmoothFn for Pchip {
    fn value(&self, x: f64) -> Result<f64, FlowError> {
        if !x.is_finite() {
            return Err(FlowError::Undefined { what: "table", y: x });
        }
        let Some(k) = self.locate(x) else {
            return Ok(if x < self.xs[0] { self.ys[0] } else { self.ys[self.ys.len() - 1] });
        };
        let h = self.xs[k + 1] - self.xs[k];
        let s = (x - self.xs[k]) / h;
        let (h00, h10) = ((1.0 + 2.0 * s) * (1.0 - s).powi(2), s * (1.0 - s).powi(2));
        let (h01, h11) = (s * s * (3.0 - 2.0 * s), s * s * (s - 1.0));
        Ok(h00 * self.ys[k]
            + h * h10 * self.slopes[k]
            + h01 * self.ys[k + 1]
            + h * h11 * self.slopes[k + 1])
    }

    fn derivative(&self, x: f64) -> Result<f64, FlowError> {
        if !x.is_finite() {
            return Err(FlowError::Undefined { what: "table", y: x });
        }
        let Some(k) = self.locate(x) else {
            return Ok(0.0);
        };
        let h = self.xs[k + 1] - self.xs[k];
        let s = (x - self.xs[k]) / h;
        let d00 = 6.0 * s * (s - 1.0) / h;
        let d10 = (1.0 - s) * (1.0 - 3.0 * s);
        let d01 = -d00;
        let d11 = s * (3.0 * s - 2.0);
        Ok(d00 * self.ys[k]
            + d10 * self.slopes[k]
            + d01 * self.ys[k + 1]
            + d11 * self.slopes[k + 1])
    }

    fn bounded(&self) -> Option<bool> {
        Some(true)
    }

    fn smooth(&self) -> bool {
        false
    }
}

/// `f = A0²B0/4 − B0³/12` for initial data `(B0, A0)`.
#[derive(Clone, Debug)]
pub struct InducedF {
    b0: Arc<dyn SmoothFn>,
    a0: Arc<dyn SmoothFn>,
}

impl SmoothFn for InducedF {
    fn value(&self, y: f64) -> Result<f64, FlowError> {
        let (b, a) = positive_initial(&*self.b0, &*self.a0, y)?;
        let (plus, minus) = (a * a * b / 4.0, b * b * b / 12.0);
        Ok(cancel(plus, minus))
    }
    fn derivative(&self, y: f64) -> Result<f64, FlowError> {
        let (b, a) = positive_initial(&*self.b0, &*self.a0, y)?;
        let (db, da) = (self.b0.derivative(y)?, self.a0.derivative(y)?);
        Ok(cancel((2.0 * a * da * b + a * a * db) / 4.0, b * b * db / 4.0))
    }
    fn smooth(&self) -> bool {
        self.b0.smooth() && self.a0.smooth()
    }
}

/// `h(y) = y − F(B0(y); f(y))`.
#[derive(Clone, Debug)]
pub struct InducedH {
    b0: Arc<dyn SmoothFn>,
    f: InducedF,
    rel_tol: f64,
}

impl SmoothFn for InducedH {
    fn value(&self, y: f64) -> Result<f64, FlowError> {
        let b = self.b0.value(y)?;
        Ok(y - quadrature_f(b, self.f.value(y)?, self.rel_tol)?)
    }
    fn derivative(&self, y: f64) -> Result<f64, FlowError> {
        let b = self.b0.value(y)?;
        let fv = self.f.value(y)?;
        let df = self.f.derivative(y)?;
        let f_b = 1.0 / (1.0 / 12.0 + fv / (b * b * b)).sqrt();
        let f_f = if df == 0.0 { 0.0 } else { quadrature_f_df(b, fv, self.rel_tol)? };
        Ok(1.0 - f_b * self.b0.derivative(y)? - f_f * df)
    }
    fn smooth(&self) -> bool {
        self.f.smooth()
    }
}

/// `plus − minus`, snapped to 0 when the difference is rounding noise, so
/// data on the self-similar line gives `f ≡ 0` exactly.
fn cancel(plus: f64, minus: f64) -> f64 {
    let diff = plus - minus;
    if diff.abs() <= 16.0 * f64::EPSILON * (plus.abs() + minus.abs()) { 0.0 } else { diff }
}

fn positive_initial(b0: &dyn SmoothFn, a0: &dyn SmoothFn, y: f64) -> Result<(f64, f64), FlowError> {
    let (b, a) = (b0.value(y)?, a0.value(y)?);
    if !(b > 0.0 && a > 0.0) {
        return Err(FlowError::Undefined { what: "positive initial data", y });
    }
    Ok((b, a))
}

/// Which convergence hypotheses hold on a sampled window.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HypothesisReport {
    pub f_bounded: bool,
    pub f_nonneg: bool,
    pub h_bounded: bool,
    pub h_below_identity: bool,
    pub smooth: bool,
    pub violations: Vec<String>,
}

impl HypothesisReport {
    pub fn holds(&self) -> bool {
        self.f_bounded && self.f_nonneg && self.h_bounded && self.h_below_identity
    }
}

/// The pair `(f, h)` parametrizing solutions.
#[derive(Clone, Debug)]
pub struct FlowData {
    pub f: Arc<dyn SmoothFn>,
    pub h: Arc<dyn SmoothFn>,
}

impl FlowData {
    pub fn new(f: impl SmoothFn + 'static, h: impl SmoothFn + 'static) -> Self {
        FlowData { f: Arc::new(f), h: Arc::new(h) }
    }

    pub fn constant(f: f64, h: f64) -> Self {
        Self::new(Constant(f), Constant(h))
    }

    /// Data whose solution at `t = 0` is `(B0, A0)`.
    pub fn from_initial_data(
        b0: Arc<dyn SmoothFn>,
        a0: Arc<dyn SmoothFn>,
        rel_tol: f64,
    ) -> Self {
        let f = InducedF { b0: b0.clone(), a0 };
        let h = InducedH { b0, f: f.clone(), rel_tol };
        FlowData { f: Arc::new(f), h: Arc::new(h) }
    }

    /// True when `f ≡ 0` is known in closed form.
    pub fn f_is_zero(&self) -> bool {
        self.f.as_constant() == Some(0.0)
    }

    /// Checks the hypotheses: sign and boundedness of `f`, boundedness of `h`
    /// over `window`, and `h(y) < y` over `initial` (the `t = 0` slice).
    ///
    /// Boundedness is taken from closed-form knowledge when available and
    /// otherwise from finiteness of the samples.
    pub fn check_hypotheses(&self, window: &[f64], initial: &[f64]) -> HypothesisReport {
        let mut report = HypothesisReport {
            f_bounded: true,
            f_nonneg: true,
            h_bounded: true,
            h_below_identity: true,
            smooth: self.f.smooth() && self.h.smooth(),
            violations: Vec::new(),
        };
        for &y in window {
            match self.f.value(y) {
                Ok(v) if v < 0.0 => {
                    if report.f_nonneg {
                        report.violations.push(format!("f >= 0 fails: f({y}) = {v}"));
                    }
                    report.f_nonneg = false;
                }
                Ok(v) if !v.is_finite() => report.f_bounded = false,
                Ok(_) => {}
                Err(e) => {
                    if report.f_nonneg {
                        report.violations.push(format!("f undefined at {y}: {e}"));
                    }
                    report.f_nonneg = false;
                }
            }
            match self.h.value(y) {
                Ok(v) if v.is_finite() => {}
                _ => report.h_bounded = false,
            }
        }
        if self.f.bounded() == Some(false) {
            report.f_bounded = false;
        }
        if !report.f_bounded {
            report.violations.push("f is not bounded".into());
        }
        if self.h.bounded() == Some(false) {
            report.h_bounded = false;
        }
        if !report.h_bounded {
            report.violations.push("h is not bounded".into());
        }
        for &y in initial {
            match self.h.value(y) {
                Ok(v) if v < y => {}
                Ok(v) => {
                    report.h_below_identity = false;
                    report.violations.push(format!("h(y) < y fails: h({y}) = {v}"));
                    break;
                }
                Err(e) => {
                    report.h_below_identity = false;
                    report.violations.push(format!("h(y) < y cannot be checked at {y}: {e}"));
                    break;
                }
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_and_derivatives() {
        let fns: Vec<Box<dyn SmoothFn>> = vec![
            Box::new(GaussianBump(0.3)),
            Box::new(RationalDecay(2.0)),
            Box::new(Affine { slope: -0.5, intercept: 1.0 }),
        ];
        for g in &fns {
            for y in [-1.3, 0.0, 0.7, 2.5] {
                let e = 1e-6;
                let fd = (g.value(y + e).unwrap() - g.value(y - e).unwrap()) / (2.0 * e);
                assert!((fd - g.derivative(y).unwrap()).abs() < 1e-8, "{g:?}");
            }
        }
    }

    #[test]
    fn pchip_interpolates_and_preserves_monotonicity() {
        let xs = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = vec![0.0, 0.1, 0.1, 2.0, 2.1];
        let p = Pchip::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((p.value(*x).unwrap() - y).abs() < 1e-15);
        }
        let mut prev = p.value(0.0).unwrap();
        for k in 1..=400 {
            let v = p.value(k as f64 * 0.01).unwrap();
            assert!(v >= prev - 1e-15);
            prev = v;
        }
        assert_eq!(p.value(-5.0).unwrap(), 0.0);
        assert_eq!(p.value(9.0).unwrap(), 2.1);
        assert!(!p.smooth());
    }

    #[test]
    fn pchip_derivative_matches_difference_quotient() {
        let p = Pchip::new(vec![0.0, 0.5, 1.5, 2.0], vec![1.0, 0.2, 0.4, 3.0]).unwrap();
        for x in [0.1, 0.7, 1.2, 1.9] {
            let e = 1e-7;
            let fd = (p.value(x + e).unwrap() - p.value(x - e).unwrap()) / (2.0 * e);
            assert!((fd - p.derivative(x).unwrap()).abs() < 1e-6);
        }
    }

    #[test]
    fn pchip_rejects_bad_tables() {
        assert!(Pchip::new(vec![0.0], vec![1.0]).is_err());
        assert!(Pchip::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(Pchip::new(vec![0.0, f64::NAN], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn induced_f_examples() {
        let unit = FlowData::from_initial_data(Arc::new(Constant(1.0)), Arc::new(Constant(1.0)), 1e-12);
        assert!((unit.f.value(0.3).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let cone = FlowData::from_initial_data(
            Arc::new(Constant(1.0)),
            Arc::new(Constant(1.0 / 3f64.sqrt())),
            1e-12,
        );
        assert!(cone.f.value(2.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn self_similar_initial_data_gives_zero_f_and_h() {
        let data = FlowData::from_initial_data(
            Arc::new(Affine { slope: 1.0 / 12f64.sqrt(), intercept: 0.0 }),
            Arc::new(Affine { slope: 1.0 / 6.0, intercept: 0.0 }),
            1e-12,
        );
        for y in [0.7, 1.5, 2.5, 3.0] {
            assert_eq!(data.f.value(y).unwrap(), 0.0);
            assert_eq!(data.f.derivative(y).unwrap(), 0.0);
            assert!(data.h.value(y).unwrap().abs() < 1e-14);
            assert!(data.h.derivative(y).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn hypotheses_flag_identity_h() {
        let data = FlowData::new(Constant(0.0), Affine { slope: 1.0, intercept: 0.0 });
        let ys: Vec<f64> = (1..=8).map(|k| 0.5 * k as f64).collect();
        let rep = data.check_hypotheses(&ys, &ys);
        assert!(!rep.h_below_identity && !rep.h_bounded && !rep.holds());
        let ok = FlowData::new(GaussianBump(0.1), Constant(-1.0)).check_hypotheses(&ys, &ys);
        assert!(ok.holds(), "{ok:?}");
    }

    #[test]
    fn negative_f_is_reported() {
        let data = FlowData::constant(-0.1, 0.0);
        let rep = data.check_hypotheses(&[1.0, 2.0], &[1.0]);
        assert!(!rep.f_nonneg);
        assert_eq!(rep.violations.len(), 1);
    }
}

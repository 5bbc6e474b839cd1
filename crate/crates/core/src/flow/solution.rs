//! Explicit solution of the reduced system.
//!
//! Along `y = const` the system is an ODE in `x` with first integral
//! `f = A²B/4 − B³/12`, and `B` is recovered from
//! `x = F(B; f(y)) + h(y)`, `F(B; f) = ∫₀^B db/√(1/12 + f/b³)`,
//! then `A = 2B√(1/12 + f/B³)`.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::exterior::{EvalError, Field, PointJet, Profile, Symbol};

use super::data::FlowData;
use super::quadrature::integrate;
use super::root::{brent, RootError};
use super::FlowError;

const SQRT12: f64 = 3.464_101_615_137_754_6;

/// Knot spacing of the memo, in `u = √b`.
const KNOT: f64 = 0.25;
const MEMO_CAPACITY: usize = 50_000;

fn check_args(b: f64, f: f64) -> Result<(), FlowError> {
    if f < 0.0 || f.is_nan() {
        return Err(FlowError::NegativeF(f));
    }
    if b < 0.0 || b.is_nan() {
        return Err(FlowError::NegativeB(b));
    }
    Ok(())
}

// With b = u² the cusp b^{3/2} at the origin becomes the polynomial-like u⁴.
fn f_integral(f: f64, u0: f64, u1: f64, rel_tol: f64) -> Result<f64, FlowError> {
    let r = integrate(|u| {
        let u2 = u * u;
        2.0 * u2 * u2 / (f + u2 * u2 * u2 / 12.0).sqrt()
    }, u0, u1, rel_tol, 0.0);
    if r.converged { Ok(r.value) } else { Err(FlowError::Quadrature(r.error)) }
}

/// `F(B; f)`; exact `√12·B` for `f = 0`.
pub fn quadrature_f(b: f64, f: f64, rel_tol: f64) -> Result<f64, FlowError> {
    check_args(b, f)?;
    if b == 0.0 {
        return Ok(0.0);
    }
    if f == 0.0 {
        return Ok(SQRT12 * b);
    }
    f_integral(f, 0.0, b.sqrt(), rel_tol)
}

/// `∂F/∂f = −½∫₀^B b^{3/2}(f + b³/12)^{−3/2} db`; diverges as `f → 0`.
pub fn quadrature_f_df(b: f64, f: f64, rel_tol: f64) -> Result<f64, FlowError> {
    check_args(b, f)?;
    if b == 0.0 {
        return Ok(0.0);
    }
    if f == 0.0 {
        return Err(FlowError::Invalid("dF/df is unbounded at f = 0".into()));
    }
    let r = integrate(|u| {
        let u2 = u * u;
        u2 * u2 * (f + u2 * u2 * u2 / 12.0).powf(-1.5)
    }, 0.0, b.sqrt(), rel_tol, 0.0);
    if r.converged { Ok(-r.value) } else { Err(FlowError::Quadrature(r.error)) }
}

/// `A = 2B√(1/12 + f/B³)`.
pub fn solution_a(b: f64, f: f64) -> Result<f64, FlowError> {
    if !(b > 0.0) {
        return Err(FlowError::NegativeB(b));
    }
    let radicand = 1.0 / 12.0 + f / (b * b * b);
    if !(radicand > 0.0) {
        return Err(FlowError::MetricDegenerates { b, radicand });
    }
    Ok(2.0 * b * radicand.sqrt())
}

/// Values and first partials in characteristic coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolutionJet {
    pub x: f64,
    pub y: f64,
    pub f: f64,
    pub h: f64,
    pub b: f64,
    pub a: f64,
    pub b_x: f64,
    pub b_y: f64,
    pub a_x: f64,
    pub a_y: f64,
}

impl SolutionJet {
    /// The same jet in `(r, t)`: `∂_r = ∂_x + ∂_y`, `∂_t = ∂_x − ∂_y`.
    pub fn point_jet(&self) -> PointJet {
        PointJet::new(self.a, self.b)
            .with_r_derivatives(self.a_x + self.a_y, self.b_x + self.b_y)
            .with_t_derivatives(self.a_x - self.a_y, self.b_x - self.b_y)
    }
}

/// A solution determined by `(f, h)`; evaluation is read-only apart from the
/// memo of `F(·; f)` knots, which is safe to share across threads.
#[derive(Debug)]
pub struct FlowSolution {
    data: FlowData,
    quad_tol: f64,
    root_tol: f64,
    memo: RwLock<HashMap<u64, Vec<f64>>>,
}

impl FlowSolution {
    pub fn new(data: FlowData, quad_tol: f64, root_tol: f64) -> Self {
        FlowSolution { data, quad_tol, root_tol, memo: RwLock::new(HashMap::new()) }
    }

    pub fn with_default_tolerances(data: FlowData) -> Self {
        Self::new(data, 1e-10, 1e-10)
    }

    pub fn data(&self) -> &FlowData {
        &self.data
    }

    /// `F(B; f)` through cumulative knots at `u = k·KNOT`, so the value
    /// depends only on `(B, f)` and not on evaluation order.
    pub fn f_integral(&self, b: f64, f: f64) -> Result<f64, FlowError> {
        check_args(b, f)?;
        if f == 0.0 || b == 0.0 {
            return quadrature_f(b, f, self.quad_tol);
        }
        let u = b.sqrt();
        let k = (u / KNOT).floor() as usize;
        let base = self.knot(f, k)?;
        let tail = f_integral(f, k as f64 * KNOT, u, self.quad_tol)?;
        Ok(base + tail)
    }

    fn knot(&self, f: f64, k: usize) -> Result<f64, FlowError> {
        let key = f.to_bits();
        if let Some(v) = self.memo.read().expect("memo poisoned").get(&key).and_then(|c| c.get(k)) {
            return Ok(*v);
        }
        let mut memo = self.memo.write().expect("memo poisoned");
        if memo.len() >= MEMO_CAPACITY && !memo.contains_key(&key) {
            memo.clear();
        }
        let cum = memo.entry(key).or_insert_with(|| vec![0.0]);
        while cum.len() <= k {
            let j = cum.len();
            let seg = f_integral(f, (j - 1) as f64 * KNOT, j as f64 * KNOT, self.quad_tol)?;
            let last = cum[j - 1];
            cum.push(last + seg);
        }
        Ok(cum[k])
    }

    fn data_at(&self, y: f64) -> Result<(f64, f64), FlowError> {
        let f = self.data.f.value(y)?;
        let h = self.data.h.value(y)?;
        if !f.is_finite() {
            return Err(FlowError::Undefined { what: "f", y });
        }
        if !h.is_finite() {
            return Err(FlowError::Undefined { what: "h", y });
        }
        if f < 0.0 {
            return Err(FlowError::NegativeF(f));
        }
        Ok((f, h))
    }

    /// The unique `B` with `F(B; f(y)) + h(y) = x`.
    pub fn solve_b(&self, x: f64, y: f64) -> Result<f64, FlowError> {
        let (f, h) = self.data_at(y)?;
        self.invert(x, f, h)
    }

    fn invert(&self, x: f64, f: f64, h: f64) -> Result<f64, FlowError> {
        let target = x - h;
        if !(target > 0.0) {
            return Err(FlowError::OutsideDomain { x, h });
        }
        let lo = target / SQRT12;
        if f == 0.0 {
            return Ok(lo);
        }
        let g = |b: f64| -> Result<f64, FlowError> { Ok(self.f_integral(b, f)? - target) };
        // F(B) <= √12·B holds exactly, so g(lo) > 0 is rounding and lo is the root
        if g(lo)? >= 0.0 {
            return Ok(lo);
        }
        let mut hi = 2.0 * lo;
        let mut doublings = 0;
        while g(hi)? < 0.0 {
            hi *= 2.0;
            doublings += 1;
            if doublings > 200 || !hi.is_finite() {
                return Err(FlowError::Root(format!("no upper bracket for x - h = {target}")));
            }
        }
        // carry quadrature failures through the root finder's error channel
        let failure = std::cell::RefCell::new(None);
        let found = brent(
            |b| {
                g(b).map_err(|e| {
                    *failure.borrow_mut() = Some(e);
                    RootError::NotFinite { x: b }
                })
            },
            lo,
            hi,
            self.root_tol,
        );
        match (found, failure.into_inner()) {
            (Ok(b), _) => Ok(b),
            (Err(_), Some(e)) => Err(e),
            (Err(e), None) => Err(FlowError::Root(e.to_string())),
        }
    }

    /// `(B, A)` at characteristic coordinates.
    pub fn values(&self, x: f64, y: f64) -> Result<(f64, f64), FlowError> {
        let (f, h) = self.data_at(y)?;
        let b = self.invert(x, f, h)?;
        Ok((b, solution_a(b, f)?))
    }

    /// `(B, A)` at `(r, t)`.
    pub fn values_rt(&self, r: f64, t: f64) -> Result<(f64, f64), FlowError> {
        self.values(r + t, r - t)
    }

    /// Values and first partials by implicit differentiation of
    /// `x = F(B; f(y)) + h(y)`:
    /// `B_x = √(1/12 + f/B³)`, `B_y = −(F_f f' + h')·B_x`,
    /// `A_x = 1/6 − f/B³`, `A_y = ∂A/∂B·B_y + ∂A/∂f·f'`.
    pub fn jet(&self, x: f64, y: f64) -> Result<SolutionJet, FlowError> {
        let (f, h) = self.data_at(y)?;
        let b = self.invert(x, f, h)?;
        let a = solution_a(b, f)?;
        let df = self.data.f.derivative(y)?;
        let dh = self.data.h.derivative(y)?;
        let b3 = b * b * b;
        let b_x = (1.0 / 12.0 + f / b3).sqrt();
        let f_f = if df == 0.0 { 0.0 } else { quadrature_f_df(b, f, self.quad_tol)? };
        let b_y = -(f_f * df + dh) * b_x;
        let da_db = (b / 6.0 - f / (b * b)) / (b * b_x);
        let da_df = 1.0 / (b * b * b_x);
        Ok(SolutionJet {
            x,
            y,
            f,
            h,
            b,
            a,
            b_x,
            b_y,
            a_x: 1.0 / 6.0 - f / b3,
            a_y: da_db * b_y + da_df * df,
        })
    }

    pub fn jet_rt(&self, r: f64, t: f64) -> Result<SolutionJet, FlowError> {
        self.jet(r + t, r - t)
    }
}

/// Each call solves afresh; callers evaluating many partials at one point
/// should use [`FlowSolution::jet_rt`] and its [`PointJet`].
impl Profile for FlowSolution {
    fn partial(&self, field: Field, r_order: u8, t_order: u8, r: f64, t: f64)
        -> Result<f64, EvalError> {
        let jet = self.first_jet(r, t)?;
        let base = match field { Field::A => 0, Field::B => 1 };
        match (r_order, t_order) {
            (0, 0) => Ok(jet[base]),
            (1, 0) => Ok(jet[base + 2]),
            (0, 1) => Ok(jet[base + 4]),
            _ => Err(EvalError::Unsupported(Symbol { field, r_order, t_order })),
        }
    }

    fn first_jet(&self, r: f64, t: f64) -> Result<[f64; 6], EvalError> {
        let j = self.jet_rt(r, t).map_err(|e| EvalError::OutOfDomain(e.to_string()))?.point_jet();
        Ok([j.a, j.b, j.a_r, j.b_r, j.a_t, j.b_t])
    }
}

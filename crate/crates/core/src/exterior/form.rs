use std::collections::BTreeMap;
use std::fmt;

use super::coframe::{Blade, CoframeIndex};
use super::expr::{CoeffExpr, SymbolValues};
use super::ExteriorError;

/// Coefficient ring for forms: symbolic expressions or plain reals.
pub trait Coefficient: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn from_i64(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;

    fn neg(&self) -> Self {
        self.mul(&Self::from_i64(-1))
    }

    fn scale_sign(&self, sign: i8) -> Self {
        if sign >= 0 {
            self.clone()
        } else {
            self.neg()
        }
    }
}

impl Coefficient for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Coefficient for CoeffExpr {
    fn zero() -> Self {
        CoeffExpr::zero()
    }
    fn from_i64(n: i64) -> Self {
        CoeffExpr::int(n)
    }
    fn is_zero(&self) -> bool {
        CoeffExpr::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }
    fn mul(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }
}

/// A homogeneous differential form in the fixed coframe.
#[derive(Clone, Debug, PartialEq)]
pub struct Form<C> {
    degree: u8,
    terms: BTreeMap<Blade, C>,
}

/// Form with symbolic coefficients.
pub type KForm = Form<CoeffExpr>;
/// Form with real coefficients, e.g. a [`KForm`] evaluated at a point.
pub type NumForm = Form<f64>;

impl<C: Coefficient> Form<C> {
    pub fn zero(degree: u8) -> Self {
        Form {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(c: C) -> Self {
        let mut f = Form::zero(0);
        f.add_term(Blade::SCALAR, c);
        f
    }

    /// The coframe 1-form `e^index` with unit coefficient.
    pub fn basis(index: CoframeIndex) -> Self {
        let mut f = Form::zero(1);
        f.add_term(Blade::from_bits(index.bit()).expect("valid bit"), C::from_i64(1));
        f
    }

    /// `c · e^{i_1} ∧ … ∧ e^{i_k}` for indices in any order.
    pub fn monomial(indices: &[u8], c: C) -> Result<Self, ExteriorError> {
        let mut f = Form::zero(indices.len() as u8);
        if let Some((blade, sign)) = Blade::from_indices(indices)? {
            f.add_term(blade, c.scale_sign(sign));
        }
        Ok(f)
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &C)> {
        self.terms.iter().map(|(b, c)| (*b, c))
    }

    /// Coefficient of the stored (sorted) blade.
    pub fn get(&self, blade: Blade) -> C {
        self.terms.get(&blade).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficient of `e^{i_1} ∧ … ∧ e^{i_k}` written in any index order,
    /// so `coefficient(&[6, 2, 1]) == -coefficient(&[1, 2, 6])`.
    pub fn coefficient(&self, indices: &[u8]) -> Result<C, ExteriorError> {
        Ok(match Blade::from_indices(indices)? {
            Some((blade, sign)) if blade.degree() == self.degree => {
                self.get(blade).scale_sign(sign)
            }
            _ => C::zero(),
        })
    }

    /// Adds `c` to the coefficient of `blade`, dropping the entry if it cancels.
    pub fn add_term(&mut self, blade: Blade, c: C) {
        debug_assert_eq!(blade.degree(), self.degree, "blade degree mismatch");
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&blade) {
            Some(old) => old.add(&c),
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&blade);
        } else {
            self.terms.insert(blade, sum);
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExteriorError> {
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(ExteriorError::DegreeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        let mut out = self.clone();
        for (b, c) in other.terms() {
            out.add_term(b, c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, k: &C) -> Self {
        self.map(|c| c.mul(k))
    }

    /// Applies `f` to every coefficient, dropping results that vanish.
    pub fn map<D: Coefficient>(&self, mut f: impl FnMut(&C) -> D) -> Form<D> {
        let mut out = Form::zero(self.degree);
        for (b, c) in self.terms() {
            out.add_term(b, f(c));
        }
        out
    }

    pub fn try_map<D: Coefficient, E>(
        &self,
        mut f: impl FnMut(Blade, &C) -> Result<D, E>,
    ) -> Result<Form<D>, E> {
        let mut out = Form::zero(self.degree);
        for (b, c) in self.terms() {
            out.add_term(b, f(b, c)?);
        }
        Ok(out)
    }

    /// Exterior product. Degree overflow yields the zero form of degree `p + q`.
    pub fn wedge(&self, other: &Self) -> Self {
        let mut out = Form::zero(self.degree + other.degree);
        if self.degree + other.degree > 7 {
            return out;
        }
        for (b1, c1) in self.terms() {
            for (b2, c2) in other.terms() {
                if let Some(sign) = b1.wedge_sign(b2) {
                    let blade = Blade::from_bits(b1.bits() | b2.bits()).expect("7 bits");
                    out.add_term(blade, c1.mul(c2).scale_sign(sign));
                }
            }
        }
        out
    }

    /// Interior product with the dual frame vector of `v`.
    pub fn contract(&self, v: CoframeIndex) -> Result<Self, ExteriorError> {
        if self.degree == 0 {
            return Err(ExteriorError::ContractScalar);
        }
        let mut out = Form::zero(self.degree - 1);
        for (b, c) in self.terms() {
            if let Some(pos) = b.position(v) {
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                out.add_term(b.without(v), c.scale_sign(sign));
            }
        }
        Ok(out)
    }
}

impl KForm {
    /// Evaluates every coefficient; failures name the offending blade.
    pub fn eval(&self, values: &dyn SymbolValues) -> Result<NumForm, ExteriorError> {
        self.try_map(|blade, c| {
            c.eval(values)
                .map_err(|source| ExteriorError::Eval { blade, source })
        })
    }

    /// Lifts a real-coefficient form whose coefficients are exact small integers.
    pub fn from_integer_form(form: &NumForm) -> Result<KForm, ExteriorError> {
        form.try_map(|blade, c| {
            if c.fract() == 0.0 && c.abs() < 1e15 {
                Ok(CoeffExpr::int(*c as i64))
            } else {
                Err(ExteriorError::NotInteger { blade, value: *c })
            }
        })
    }
}

impl NumForm {
    pub fn max_abs(&self) -> f64 {
        self.terms().map(|(_, c)| c.abs()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference over the union of both supports.
    pub fn max_abs_diff(&self, other: &NumForm) -> f64 {
        let mut worst = 0.0f64;
        for (b, c) in self.terms() {
            worst = worst.max((c - other.get(b)).abs());
        }
        for (b, c) in other.terms() {
            worst = worst.max((c - self.get(b)).abs());
        }
        worst
    }

    /// Blade with the largest coefficient difference, if any differ.
    pub fn worst_term(&self, other: &NumForm) -> Option<(Blade, f64)> {
        let mut best: Option<(Blade, f64)> = None;
        let blades = self.terms().map(|(b, _)| b).chain(other.terms().map(|(b, _)| b));
        for b in blades {
            let diff = (self.get(b) - other.get(b)).abs();
            if best.is_none_or(|(_, d)| diff > d) {
                best = Some((b, diff));
            }
        }
        best
    }

    /// Drops coefficients with `|c| <= tol`.
    pub fn chop(&self, tol: f64) -> NumForm {
        let mut out = Form::zero(self.degree());
        for (b, c) in self.terms() {
            if c.abs() > tol {
                out.add_term(b, *c);
            }
        }
        out
    }

    pub fn top_coefficient(&self) -> f64 {
        if self.degree() == 7 {
            self.get(Blade::TOP)
        } else {
            0.0
        }
    }
}

impl<C: Coefficient + fmt::Display> fmt::Display for Form<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (b, c)) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}·{b}")?;
        }
        Ok(())
    }
}

//! Symbolic coefficients over the metric functions `A(r, t)`, `B(r, t)` and
//! their formal partial derivatives.
//!
//! Expressions are ordinary trees. [`CoeffExpr::canonical`] maps a tree to a
//! normal form: a sum of rational multiples of products of atoms raised to
//! rational powers, where an atom is either a symbol or a sum that cannot be
//! expanded (a sum under a fractional or negative power). Sums are fully
//! expanded through products and positive integer powers, so two polynomial
//! (Laurent) identities compare equal syntactically. Identities that need
//! radical manipulation are decided by [`CoeffExpr::equivalent`], which falls
//! back to evaluation at random points.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::EvalError;

pub type Rational = Rational64;

/// One of the two metric functions of the cone ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    A,
    B,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::A => f.write_str("A"),
            Field::B => f.write_str("B"),
        }
    }
}

/// Differentiation variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    R,
    T,
}

/// `A` or `B` differentiated `r_order` times in `r` and `t_order` times in `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub field: Field,
    pub r_order: u8,
    pub t_order: u8,
}

impl Symbol {
    pub const A: Symbol = Symbol::new(Field::A, 0, 0);
    pub const B: Symbol = Symbol::new(Field::B, 0, 0);

    pub const fn new(field: Field, r_order: u8, t_order: u8) -> Self {
        Symbol {
            field,
            r_order,
            t_order,
        }
    }

    pub fn differentiated(self, var: Var) -> Self {
        match var {
            Var::R => Symbol {
                r_order: self.r_order + 1,
                ..self
            },
            Var::T => Symbol {
                t_order: self.t_order + 1,
                ..self
            },
        }
    }

    /// The undifferentiated metric functions are strictly positive.
    pub fn is_positive(self) -> bool {
        self.r_order == 0 && self.t_order == 0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.field)?;
        if self.r_order + self.t_order > 0 {
            f.write_str("_")?;
            for _ in 0..self.r_order {
                f.write_str("r")?;
            }
            for _ in 0..self.t_order {
                f.write_str("t")?;
            }
        }
        Ok(())
    }
}

/// Numeric values for symbols.
pub trait SymbolValues {
    fn value(&self, symbol: Symbol) -> Result<f64, EvalError>;
}

impl<F> SymbolValues for F
where
    F: Fn(Symbol) -> Result<f64, EvalError>,
{
    fn value(&self, symbol: Symbol) -> Result<f64, EvalError> {
        self(symbol)
    }
}

/// Expression tree for form coefficients.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoeffExpr {
    Const(Rational),
    Sym(Symbol),
    Sum(Vec<CoeffExpr>),
    Product(Vec<CoeffExpr>),
    Quotient(Box<CoeffExpr>, Box<CoeffExpr>),
    Pow(Box<CoeffExpr>, Rational),
}

impl CoeffExpr {
    pub fn zero() -> Self {
        CoeffExpr::Const(Rational::zero())
    }

    pub fn one() -> Self {
        CoeffExpr::Const(Rational::one())
    }

    pub fn int(n: i64) -> Self {
        CoeffExpr::Const(Rational::from_integer(n))
    }

    pub fn rational(num: i64, den: i64) -> Self {
        CoeffExpr::Const(Rational::new(num, den))
    }

    pub fn sym(symbol: Symbol) -> Self {
        CoeffExpr::Sym(symbol)
    }

    pub fn a() -> Self {
        CoeffExpr::Sym(Symbol::A)
    }

    pub fn b() -> Self {
        CoeffExpr::Sym(Symbol::B)
    }

    /// `field` differentiated `r_order` times in r and `t_order` times in t.
    pub fn partial(field: Field, r_order: u8, t_order: u8) -> Self {
        CoeffExpr::Sym(Symbol::new(field, r_order, t_order))
    }

    pub fn pow(self, exponent: Rational) -> Self {
        CoeffExpr::Pow(Box::new(self), exponent).canonical()
    }

    pub fn powi(self, exponent: i64) -> Self {
        self.pow(Rational::from_integer(exponent))
    }

    pub fn sqrt(self) -> Self {
        self.pow(Rational::new(1, 2))
    }

    pub fn recip(self) -> Self {
        self.powi(-1)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, CoeffExpr::Const(c) if c.is_zero())
    }

    pub fn as_const(&self) -> Option<Rational> {
        match self {
            CoeffExpr::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// Rewrites the tree in canonical sum-of-products form.
    pub fn canonical(&self) -> CoeffExpr {
        Poly::from_expr(self).to_expr()
    }

    /// Formal partial derivative; orders of every symbol are raised by the chain rule.
    pub fn differentiate(&self, var: Var) -> CoeffExpr {
        self.derivative_tree(var).canonical()
    }

    fn derivative_tree(&self, var: Var) -> CoeffExpr {
        match self {
            CoeffExpr::Const(_) => CoeffExpr::zero(),
            CoeffExpr::Sym(s) => CoeffExpr::Sym(s.differentiated(var)),
            CoeffExpr::Sum(items) => {
                CoeffExpr::Sum(items.iter().map(|e| e.derivative_tree(var)).collect())
            }
            CoeffExpr::Product(items) => {
                let mut terms = Vec::with_capacity(items.len());
                for k in 0..items.len() {
                    let factors = items
                        .iter()
                        .enumerate()
                        .map(|(j, e)| {
                            if j == k {
                                e.derivative_tree(var)
                            } else {
                                e.clone()
                            }
                        })
                        .collect();
                    terms.push(CoeffExpr::Product(factors));
                }
                CoeffExpr::Sum(terms)
            }
            CoeffExpr::Quotient(num, den) => {
                let top = CoeffExpr::Sum(vec![
                    CoeffExpr::Product(vec![num.derivative_tree(var), (**den).clone()]),
                    CoeffExpr::Product(vec![
                        CoeffExpr::int(-1),
                        (**num).clone(),
                        den.derivative_tree(var),
                    ]),
                ]);
                CoeffExpr::Quotient(
                    Box::new(top),
                    Box::new(CoeffExpr::Pow(den.clone(), Rational::from_integer(2))),
                )
            }
            CoeffExpr::Pow(base, q) => CoeffExpr::Product(vec![
                CoeffExpr::Const(*q),
                CoeffExpr::Pow(base.clone(), *q - Rational::one()),
                base.derivative_tree(var),
            ]),
        }
    }

    pub fn eval(&self, values: &dyn SymbolValues) -> Result<f64, EvalError> {
        match self {
            CoeffExpr::Const(c) => Ok(rational_to_f64(*c)),
            CoeffExpr::Sym(s) => values.value(*s),
            CoeffExpr::Sum(items) => items.iter().map(|e| e.eval(values)).sum(),
            CoeffExpr::Product(items) => items.iter().map(|e| e.eval(values)).product(),
            CoeffExpr::Quotient(num, den) => {
                let d = den.eval(values)?;
                if d == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                Ok(num.eval(values)? / d)
            }
            CoeffExpr::Pow(base, q) => real_pow(base.eval(values)?, *q),
        }
    }

    /// Every symbol occurring in the expression.
    pub fn symbols(&self) -> Vec<Symbol> {
        fn walk(e: &CoeffExpr, out: &mut Vec<Symbol>) {
            match e {
                CoeffExpr::Const(_) => {}
                CoeffExpr::Sym(s) => out.push(*s),
                CoeffExpr::Sum(v) | CoeffExpr::Product(v) => v.iter().for_each(|x| walk(x, out)),
                CoeffExpr::Quotient(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                CoeffExpr::Pow(b, _) => walk(b, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Equality up to algebraic identities: syntactic after canonicalization,
    /// otherwise agreement at `samples` random points where undifferentiated
    /// symbols are drawn from (0.1, 10) and derivative symbols from (-2, 2).
    pub fn equivalent(&self, other: &CoeffExpr, samples: usize, seed: u64) -> bool {
        let lhs = self.canonical();
        let rhs = other.canonical();
        if lhs == rhs {
            return true;
        }
        let diff = (lhs.clone() - rhs.clone()).canonical();
        if let Some(c) = diff.as_const() {
            return c.is_zero();
        }
        let mut symbols = lhs.symbols();
        symbols.extend(rhs.symbols());
        symbols.sort();
        symbols.dedup();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut compared = 0;
        for _ in 0..samples.max(1) * 4 {
            let point: BTreeMap<Symbol, f64> = symbols
                .iter()
                .map(|s| {
                    let v = if s.is_positive() {
                        rng.gen_range(0.1..10.0)
                    } else {
                        rng.gen_range(-2.0..2.0)
                    };
                    (*s, v)
                })
                .collect();
            let lookup = |s: Symbol| point.get(&s).copied().ok_or(EvalError::MissingSymbol(s));
            let (Ok(a), Ok(b)) = (lhs.eval(&lookup), rhs.eval(&lookup)) else {
                continue;
            };
            let scale = a.abs().max(b.abs()).max(1.0);
            if (a - b).abs() > 1e-9 * scale {
                return false;
            }
            compared += 1;
            if compared >= samples {
                break;
            }
        }
        compared >= samples
    }
}

pub(crate) fn rational_to_f64(q: Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn real_pow(base: f64, q: Rational) -> Result<f64, EvalError> {
    if q.is_integer() {
        let n = *q.numer();
        if base == 0.0 && n < 0 {
            return Err(EvalError::DivisionByZero);
        }
        return Ok(match i32::try_from(n) {
            Ok(n) => base.powi(n),
            Err(_) => base.powf(n as f64),
        });
    }
    if base == 0.0 && q.is_negative() {
        return Err(EvalError::DivisionByZero);
    }
    let exp = rational_to_f64(q);
    if base < 0.0 {
        if q.denom() % 2 == 0 {
            return Err(EvalError::NegativeRadicand(base));
        }
        let magnitude = (-base).powf(exp);
        return Ok(if q.numer() % 2 == 0 {
            magnitude
        } else {
            -magnitude
        });
    }
    Ok(base.powf(exp))
}

// --- normal form ------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Atom {
    Sym(Symbol),
    /// A sum that stays unexpanded because its exponent is fractional or negative.
    Composite(Box<Poly>),
}

impl Atom {
    fn is_positive(&self) -> bool {
        matches!(self, Atom::Sym(s) if s.is_positive())
    }
}

/// Sorted atom powers with nonzero exponents.
type Monomial = Vec<(Atom, Rational)>;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    fn constant(c: Rational) -> Poly {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    fn atom(atom: Atom, exponent: Rational) -> Poly {
        let mut p = Poly::default();
        p.terms.insert(vec![(atom, exponent)], Rational::one());
        p
    }

    fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self
                .terms
                .iter()
                .next()
                .filter(|(m, _)| m.is_empty())
                .map(|(_, c)| *c),
            _ => None,
        }
    }

    fn add_term(&mut self, mono: Monomial, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            Entry::Vacant(slot) => {
                slot.insert(coeff);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coeff;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    fn scale(&self, k: Rational) -> Poly {
        if k.is_zero() {
            return Poly::default();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), *c * k)).collect(),
        }
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let prod = monomial_product(m1, m2);
                out = out.add(&prod.scale(*c1 * *c2));
            }
        }
        out
    }

    fn powi(&self, n: u32) -> Poly {
        let mut acc = Poly::constant(Rational::one());
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    fn pow(&self, q: Rational) -> Poly {
        if q.is_zero() {
            return Poly::constant(Rational::one());
        }
        if let Some(c) = self.as_constant() {
            if let Some(v) = rational_pow(c, q) {
                return Poly::constant(v);
            }
        }
        if q.is_integer() && q.is_positive() {
            if let Ok(n) = u32::try_from(*q.numer()) {
                return self.powi(n);
            }
        }
        if self.terms.len() == 1 {
            let (mono, coeff) = self.terms.iter().next().expect("one term");
            let distribute = q.is_integer()
                || (mono.iter().all(|(a, _)| a.is_positive()) && coeff.is_positive());
            if distribute {
                let scaled: Monomial = mono.iter().map(|(a, e)| (a.clone(), *e * q)).collect();
                let mut p = normalize_monomial(scaled);
                match rational_pow(*coeff, q) {
                    Some(v) => p = p.scale(v),
                    None => {
                        let c = Poly::atom(Atom::Composite(Box::new(Poly::constant(*coeff))), q);
                        p = p.mul(&c);
                    }
                }
                return p;
            }
        }
        Poly::atom(Atom::Composite(Box::new(self.clone())), q)
    }

    fn from_expr(e: &CoeffExpr) -> Poly {
        match e {
            CoeffExpr::Const(c) => Poly::constant(*c),
            CoeffExpr::Sym(s) => Poly::atom(Atom::Sym(*s), Rational::one()),
            CoeffExpr::Sum(items) => items
                .iter()
                .fold(Poly::default(), |acc, x| acc.add(&Poly::from_expr(x))),
            CoeffExpr::Product(items) => items
                .iter()
                .fold(Poly::constant(Rational::one()), |acc, x| {
                    acc.mul(&Poly::from_expr(x))
                }),
            CoeffExpr::Quotient(n, d) => Poly::from_expr(n)
                .mul(&Poly::from_expr(d).pow(Rational::from_integer(-1))),
            CoeffExpr::Pow(b, q) => Poly::from_expr(b).pow(*q),
        }
    }

    fn to_expr(&self) -> CoeffExpr {
        let mut terms: Vec<CoeffExpr> = self
            .terms
            .iter()
            .map(|(mono, coeff)| {
                let mut factors = Vec::with_capacity(mono.len() + 1);
                if !coeff.is_one() || mono.is_empty() {
                    factors.push(CoeffExpr::Const(*coeff));
                }
                for (atom, exp) in mono {
                    let base = match atom {
                        Atom::Sym(s) => CoeffExpr::Sym(*s),
                        Atom::Composite(p) => p.to_expr(),
                    };
                    factors.push(if exp.is_one() {
                        base
                    } else {
                        CoeffExpr::Pow(Box::new(base), *exp)
                    });
                }
                if factors.len() == 1 {
                    factors.pop().expect("one factor")
                } else {
                    CoeffExpr::Product(factors)
                }
            })
            .collect();
        match terms.len() {
            0 => CoeffExpr::zero(),
            1 => terms.pop().expect("one term"),
            _ => CoeffExpr::Sum(terms),
        }
    }
}

fn monomial_product(a: &Monomial, b: &Monomial) -> Poly {
    let mut merged: BTreeMap<Atom, Rational> = BTreeMap::new();
    for (atom, e) in a.iter().chain(b.iter()) {
        *merged.entry(atom.clone()).or_insert_with(Rational::zero) += *e;
    }
    normalize_monomial(merged.into_iter().collect())
}

/// Drops zero exponents and expands composites whose exponent became a positive integer.
fn normalize_monomial(mono: Monomial) -> Poly {
    let mut kept: BTreeMap<Atom, Rational> = BTreeMap::new();
    let mut expand = Poly::constant(Rational::one());
    for (atom, e) in mono {
        if e.is_zero() {
            continue;
        }
        match &atom {
            Atom::Composite(p) if e.is_integer() && e.is_positive() => {
                expand = expand.mul(&p.pow(e));
            }
            _ => *kept.entry(atom).or_insert_with(Rational::zero) += e,
        }
    }
    let kept: Monomial = kept.into_iter().filter(|(_, e)| !e.is_zero()).collect();
    let mut base = Poly::default();
    base.terms.insert(kept, Rational::one());
    if expand.as_constant() == Some(Rational::one()) {
        base
    } else {
        base.mul(&expand)
    }
}

/// `c^q` when it is rational.
fn rational_pow(c: Rational, q: Rational) -> Option<Rational> {
    if c.is_zero() {
        return if q.is_positive() {
            Some(Rational::zero())
        } else {
            None
        };
    }
    let n = i32::try_from(*q.numer()).ok()?;
    let d = u32::try_from(*q.denom()).ok()?;
    let root = if d == 1 {
        c
    } else {
        if c.is_negative() && d % 2 == 0 {
            return None;
        }
        Rational::new(int_root(*c.numer(), d)?, int_root(*c.denom(), d)?)
    };
    checked_rational_powi(root, n)
}

fn checked_rational_powi(base: Rational, n: i32) -> Option<Rational> {
    let (num, den) = if n >= 0 {
        (*base.numer(), *base.denom())
    } else {
        (*base.denom(), *base.numer())
    };
    let e = n.unsigned_abs();
    let num = num.checked_pow(e)?;
    let den = den.checked_pow(e)?;
    Some(Rational::new(num, den))
}

fn int_root(v: i64, d: u32) -> Option<i64> {
    let sign = v.signum();
    let a = v.unsigned_abs();
    let guess = (a as f64).powf(1.0 / d as f64).round() as u64;
    for cand in guess.saturating_sub(1)..=guess + 1 {
        if cand.checked_pow(d) == Some(a) {
            return Some(sign * cand as i64);
        }
    }
    None
}

// --- arithmetic -------------------------------------------------------------

impl Add for CoeffExpr {
    type Output = CoeffExpr;
    fn add(self, rhs: CoeffExpr) -> CoeffExpr {
        CoeffExpr::Sum(vec![self, rhs]).canonical()
    }
}

impl Sub for CoeffExpr {
    type Output = CoeffExpr;
    fn sub(self, rhs: CoeffExpr) -> CoeffExpr {
        CoeffExpr::Sum(vec![self, CoeffExpr::Product(vec![CoeffExpr::int(-1), rhs])]).canonical()
    }
}

impl Mul for CoeffExpr {
    type Output = CoeffExpr;
    fn mul(self, rhs: CoeffExpr) -> CoeffExpr {
        CoeffExpr::Product(vec![self, rhs]).canonical()
    }
}

impl Div for CoeffExpr {
    type Output = CoeffExpr;
    fn div(self, rhs: CoeffExpr) -> CoeffExpr {
        CoeffExpr::Quotient(Box::new(self), Box::new(rhs)).canonical()
    }
}

impl Neg for CoeffExpr {
    type Output = CoeffExpr;
    fn neg(self) -> CoeffExpr {
        CoeffExpr::Product(vec![CoeffExpr::int(-1), self]).canonical()
    }
}

impl From<i64> for CoeffExpr {
    fn from(n: i64) -> Self {
        CoeffExpr::int(n)
    }
}

impl From<Symbol> for CoeffExpr {
    fn from(s: Symbol) -> Self {
        CoeffExpr::Sym(s)
    }
}

impl fmt::Display for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffExpr::Const(c) => {
                if c.is_integer() {
                    write!(f, "{}", c.numer())
                } else {
                    write!(f, "({}/{})", c.numer(), c.denom())
                }
            }
            CoeffExpr::Sym(s) => write!(f, "{s}"),
            CoeffExpr::Sum(items) => {
                f.write_str("(")?;
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" + ")?;
                    }
                    write!(f, "{e}")?;
                }
                f.write_str(")")
            }
            CoeffExpr::Product(items) => {
                for (i, e) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str("*")?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
            CoeffExpr::Quotient(n, d) => write!(f, "({n})/({d})"),
            CoeffExpr::Pow(b, q) => {
                if q.is_integer() {
                    write!(f, "{b}^{}", q.numer())
                } else {
                    write!(f, "{b}^({}/{})", q.numer(), q.denom())
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a_r() -> CoeffExpr {
        CoeffExpr::partial(Field::A, 1, 0)
    }
    fn b_r() -> CoeffExpr {
        CoeffExpr::partial(Field::B, 1, 0)
    }
    fn a_t() -> CoeffExpr {
        CoeffExpr::partial(Field::A, 0, 1)
    }
    fn b_t() -> CoeffExpr {
        CoeffExpr::partial(Field::B, 0, 1)
    }

    #[test]
    fn leibniz_rule() {
        let d = (CoeffExpr::a() * CoeffExpr::b()).differentiate(Var::R);
        let expected = a_r() * CoeffExpr::b() + CoeffExpr::a() * b_r();
        assert_eq!(d, expected);
    }

    #[test]
    fn power_rule() {
        let d = CoeffExpr::b().powi(3).differentiate(Var::R);
        let expected = CoeffExpr::int(3) * CoeffExpr::b().powi(2) * b_r();
        assert_eq!(d, expected);
    }

    #[test]
    fn quotient_rule() {
        let d = (CoeffExpr::a() / CoeffExpr::b()).differentiate(Var::T);
        let expected =
            (a_t() * CoeffExpr::b() - CoeffExpr::a() * b_t()) / CoeffExpr::b().powi(2);
        assert_eq!(d, expected);
    }

    #[test]
    fn cancellation_is_syntactic() {
        let e = CoeffExpr::a() * CoeffExpr::b() - CoeffExpr::b() * CoeffExpr::a();
        assert!(e.is_zero());
        let e = (CoeffExpr::a() + CoeffExpr::b()).powi(2)
            - CoeffExpr::a().powi(2)
            - CoeffExpr::int(2) * CoeffExpr::a() * CoeffExpr::b()
            - CoeffExpr::b().powi(2);
        assert!(e.is_zero());
    }

    #[test]
    fn radicals_merge() {
        let root = CoeffExpr::b().sqrt();
        assert_eq!(root.clone() * root, CoeffExpr::b());
        let s = (CoeffExpr::a() + CoeffExpr::b()).sqrt();
        assert_eq!(s.clone() * s, CoeffExpr::a() + CoeffExpr::b());
        assert_eq!(CoeffExpr::int(4).sqrt(), CoeffExpr::int(2));
        assert_eq!(CoeffExpr::rational(1, 12).pow(Rational::new(-1, 2)).as_const(), None);
    }

    #[test]
    fn derivative_symbols_are_not_distributed_under_roots() {
        let e = a_r().powi(2).sqrt();
        assert_ne!(e, a_r());
        let v = |s: Symbol| {
            if s == Symbol::new(Field::A, 1, 0) {
                Ok(-3.0)
            } else {
                Err(EvalError::MissingSymbol(s))
            }
        };
        assert_eq!(e.eval(&v).unwrap(), 3.0);
    }

    #[test]
    fn evaluation_errors() {
        let v = |_s: Symbol| Ok(0.0);
        assert_eq!(
            CoeffExpr::a().recip().eval(&v),
            Err(EvalError::DivisionByZero)
        );
        let w = |_s: Symbol| Ok(-1.0);
        assert!(matches!(
            a_r().sqrt().eval(&w),
            Err(EvalError::NegativeRadicand(_))
        ));
    }

    #[test]
    fn equivalence_falls_back_to_sampling() {
        // sqrt(A^2 B^2) = A B on the positive domain only; both sides canonicalize apart
        // when the base is a sum.
        let lhs = (CoeffExpr::a() * CoeffExpr::a() + CoeffExpr::a() * CoeffExpr::b()).sqrt();
        let rhs = CoeffExpr::a().sqrt() * (CoeffExpr::a() + CoeffExpr::b()).sqrt();
        assert_ne!(lhs.canonical(), rhs.canonical());
        assert!(lhs.equivalent(&rhs, 20, 7));
        assert!(!lhs.equivalent(&CoeffExpr::a(), 20, 7));
    }

    #[test]
    fn display_is_readable() {
        let e = CoeffExpr::rational(1, 12) + CoeffExpr::a() * b_r();
        assert_eq!(e.to_string(), "((1/12) + A*B_r)");
    }
}

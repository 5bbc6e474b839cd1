//! Hodge star for metrics diagonal in the coframe, numeric and symbolic.
//!
//! With `g = Σ s_i² (e^i)²` the coframe `θ^i = s_i e^i` is orthonormal and
//! `∗e^I = σ(I, I^c) · (∏_{I^c} s) / (∏_I s) · e^{I^c}`, where `σ` is the sign
//! of `e^I ∧ e^{I^c}` relative to `e^{1…7}`.

use crate::exterior::{d, Blade, CoeffExpr, KForm, NumForm};

use super::metric::MetricDiag;

fn complement_sign(blade: Blade) -> f64 {
    match blade.wedge_sign(blade.complement()) {
        Some(1) => 1.0,
        _ => -1.0,
    }
}

fn scale_product(blade: Blade, scales: &[f64; 7]) -> f64 {
    blade.indices().map(|i| scales[i as usize - 1]).product()
}

pub fn hodge_star(form: &NumForm, g: &MetricDiag) -> NumForm {
    let scales = g.scales();
    let mut out = NumForm::zero(7 - form.degree());
    for (blade, c) in form.terms() {
        let comp = blade.complement();
        let factor =
            complement_sign(blade) * scale_product(comp, &scales) / scale_product(blade, &scales);
        out.add_term(comp, c * factor);
    }
    out
}

/// Symbolic star; `scales[i]` is the symbolic `s_{i+1}`.
pub fn hodge_star_symbolic(form: &KForm, scales: &[CoeffExpr; 7]) -> KForm {
    let mut out = KForm::zero(7 - form.degree());
    for (blade, c) in form.terms() {
        let comp = blade.complement();
        let mut factor = CoeffExpr::int(complement_sign(blade) as i64);
        for i in comp.indices() {
            factor = factor * scales[i as usize - 1].clone();
        }
        for i in blade.indices() {
            factor = factor / scales[i as usize - 1].clone();
        }
        out.add_term(comp, c.clone() * factor);
    }
    out
}

/// Codifferential `δ = (−1)^k ∗ d ∗` on k-forms in dimension 7.
pub fn codifferential_symbolic(form: &KForm, scales: &[CoeffExpr; 7]) -> KForm {
    let star = hodge_star_symbolic(form, scales);
    let result = hodge_star_symbolic(&d(&star), scales);
    if form.degree().is_multiple_of(2) {
        result
    } else {
        result.neg()
    }
}

/// Rewrites coframe coefficients in the orthonormal basis `θ^i = s_i e^i`.
pub fn to_orthonormal(form: &NumForm, scales: &[f64; 7]) -> NumForm {
    let mut out = NumForm::zero(form.degree());
    for (blade, c) in form.terms() {
        out.add_term(blade, c / scale_product(blade, scales));
    }
    out
}

/// Inverse of [`to_orthonormal`].
pub fn from_orthonormal(form: &NumForm, scales: &[f64; 7]) -> NumForm {
    let mut out = NumForm::zero(form.degree());
    for (blade, c) in form.terms() {
        out.add_term(blade, c * scale_product(blade, scales));
    }
    out
}

use std::sync::OnceLock;

use super::coframe::{Blade, CoframeIndex};
use super::expr::{CoeffExpr, Var};
use super::form::{Form, KForm, NumForm};
use super::profile::{Profile, ProfileAt};
use super::ExteriorError;

/// `d` of a coframe generator in the α/β/dr basis.
///
/// From `dη_i = −2 η_j∧η_k` on each sphere (cyclic `(i, j, k)`) with
/// `η = (α + β)/2`, `η̃ = (α − β)/2`:
///
/// * `dα_i = −(α_j∧α_k + β_j∧β_k)`
/// * `dβ_i = −(α_j∧β_k + β_j∧α_k)`
/// * `d(dr) = 0`
pub fn structure_differential(index: CoframeIndex) -> NumForm {
    let i = index.get();
    let mut out = NumForm::zero(2);
    if i == 7 {
        return out;
    }
    let base = (i - 1) % 3;
    let j = (base + 1) % 3 + 1;
    let k = (base + 2) % 3 + 1;
    let pairs: [(u8, u8); 2] = if i <= 3 {
        [(j, k), (j + 3, k + 3)]
    } else {
        [(j, k + 3), (j + 3, k)]
    };
    for (p, q) in pairs {
        let m = NumForm::monomial(&[p, q], -1.0).expect("valid indices");
        out = out.checked_add(&m).expect("same degree");
    }
    out
}

/// `d` of each constant-coefficient basis blade, indexed by blade bits.
fn blade_differentials() -> &'static [NumForm] {
    static TABLE: OnceLock<Vec<NumForm>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0u8..=0x7f)
            .map(|bits| {
                let blade = Blade::from_bits(bits).expect("7 bits");
                let indices: Vec<u8> = blade.indices().collect();
                let mut out = NumForm::zero(blade.degree() + 1);
                for (p, &i) in indices.iter().enumerate() {
                    let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
                    let left = NumForm::monomial(&indices[..p], sign).expect("valid");
                    let right = NumForm::monomial(&indices[p + 1..], 1.0).expect("valid");
                    let di = structure_differential(CoframeIndex::new(i).expect("valid"));
                    let term = left.wedge(&di).wedge(&right);
                    out = out.checked_add(&term).expect("same degree");
                }
                out
            })
            .collect()
    })
}

/// `d` of the constant blade `e^I`.
pub fn blade_differential(blade: Blade) -> &'static NumForm {
    &blade_differentials()[blade.bits() as usize]
}

/// Exterior derivative. Coefficients depend on `(r, t)` only, so
/// `d(c·e^I) = ∂c/∂r · dr∧e^I + c · d(e^I)`.
pub fn d(form: &KForm) -> KForm {
    let mut out = KForm::zero(form.degree() + 1);
    if form.degree() >= 7 {
        return out;
    }
    for (blade, c) in form.terms() {
        if !blade.contains(CoframeIndex::DR) {
            let dc = c.differentiate(Var::R);
            if !dc.is_zero() {
                let sign = if blade.degree() % 2 == 0 { 1 } else { -1 };
                out.add_term(blade.with(CoframeIndex::DR), dc * CoeffExpr::int(sign));
            }
        }
        for (target, k) in blade_differential(blade).terms() {
            out.add_term(target, c.clone() * CoeffExpr::int(*k as i64));
        }
    }
    out
}

/// Evaluates a symbolic form at `(r, t)` of a profile.
pub fn eval<P: Profile + ?Sized>(
    form: &KForm,
    profile: &P,
    r: f64,
    t: f64,
) -> Result<NumForm, ExteriorError> {
    form.eval(&ProfileAt::new(profile, r, t))
}

/// `∂/∂t` applied to every coefficient.
pub fn time_derivative(form: &KForm) -> KForm {
    form.map(|c| c.differentiate(Var::T))
}

impl<C: super::form::Coefficient> Form<C> {
    /// The sum of two forms. Panics on a degree mismatch between nonzero forms.
    pub fn plus(&self, other: &Self) -> Self {
        self.checked_add(other).expect("forms of different degree")
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.checked_sub(other).expect("forms of different degree")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::expr::Field;
    use crate::exterior::profile::PointJet;

    fn idx(i: u8) -> CoframeIndex {
        CoframeIndex::new(i).unwrap()
    }

    fn sym_mono(indices: &[u8], c: CoeffExpr) -> KForm {
        KForm::monomial(indices, c).unwrap()
    }

    #[test]
    fn d_of_dr_vanishes() {
        assert!(d(&KForm::basis(CoframeIndex::DR)).is_zero());
    }

    #[test]
    fn d_alpha_one() {
        let expected = NumForm::monomial(&[2, 3], -1.0)
            .unwrap()
            .plus(&NumForm::monomial(&[5, 6], -1.0).unwrap());
        assert_eq!(structure_differential(idx(1)), expected);
        let symbolic = d(&KForm::basis(idx(1)));
        assert_eq!(symbolic, KForm::from_integer_form(&expected).unwrap());
    }

    #[test]
    fn d_of_scaled_beta_four() {
        // d(B β4) = B' dr∧β4 − B(α2∧β6 + β5∧α3)
        let form = sym_mono(&[4], CoeffExpr::b());
        let b_r = CoeffExpr::partial(Field::B, 1, 0);
        let expected = sym_mono(&[7, 4], b_r)
            .plus(&sym_mono(&[2, 6], -CoeffExpr::b()))
            .plus(&sym_mono(&[5, 3], -CoeffExpr::b()));
        assert_eq!(d(&form), expected);
    }

    #[test]
    fn eval_of_d_a_alpha_one() {
        let jet = PointJet::new(2.0, 1.0).with_r_derivatives(0.5, 0.0);
        let form = sym_mono(&[1], CoeffExpr::a());
        let got = eval(&d(&form), &jet, 1.5, 0.0).unwrap();
        let expected = NumForm::monomial(&[7, 1], 0.5)
            .unwrap()
            .plus(&NumForm::monomial(&[2, 3], -2.0).unwrap())
            .plus(&NumForm::monomial(&[5, 6], -2.0).unwrap());
        assert!(got.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn eval_examples() {
        let jet = PointJet::new(2.0, 1.0);
        let got = eval(&sym_mono(&[1], CoeffExpr::a()), &jet, 2.0, 0.0).unwrap();
        assert_eq!(got, NumForm::monomial(&[1], 2.0).unwrap());
        let one = eval(&KForm::scalar(CoeffExpr::one()), &jet, 2.0, 0.0).unwrap();
        assert_eq!(one, NumForm::scalar(1.0));
    }

    #[test]
    fn eval_failure_names_the_blade() {
        let jet = PointJet::new(2.0, 1.0);
        let form = sym_mono(&[1, 2], CoeffExpr::partial(Field::A, 2, 0));
        let err = eval(&form, &jet, 2.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("e^12"), "{err}");
    }

    #[test]
    fn d_squared_on_generators() {
        for i in 1..=7 {
            let first = d(&KForm::basis(idx(i)));
            assert!(d(&first).is_zero(), "d d e^{i} != 0");
        }
    }
}

//! The cone family `φ(A, B)` and the closed-form expressions for `dφ` and
//! `∂φ/∂t` in the scaled basis `e^i = A α_i`, `e^j = B β_j`, `e^7 = dr`.

use std::sync::OnceLock;

use crate::exterior::{
    self, d, time_derivative, Blade, CoeffExpr, CoframeIndex, ExteriorError, Field, KForm,
    NumForm, Profile,
};
use crate::g2::hodge::to_orthonormal;
use crate::g2::octonion::FANO_TRIPLES;

/// Symbolic scale factors of the coframe: `A, A, A, B, B, B, 1`.
pub fn cone_scales() -> [CoeffExpr; 7] {
    std::array::from_fn(|i| match i {
        0..=2 => CoeffExpr::a(),
        3..=5 => CoeffExpr::b(),
        _ => CoeffExpr::one(),
    })
}

/// Numeric scale factors for given `A`, `B`.
pub fn numeric_scales(a: f64, b: f64) -> [f64; 7] {
    [a, a, a, b, b, b, 1.0]
}

/// `φ(t)` in the α/β/dr coframe: the associative form in the scaled basis, so
/// the coefficients are `B³`, `A²B` and `AB`.
pub fn cone_phi() -> &'static KForm {
    static PHI: OnceLock<KForm> = OnceLock::new();
    PHI.get_or_init(|| {
        let scales = cone_scales();
        FANO_TRIPLES
            .iter()
            .map(|t| {
                let c = t
                    .iter()
                    .fold(CoeffExpr::one(), |acc, &i| acc * scales[i as usize - 1].clone());
                KForm::monomial(t, c).expect("valid indices")
            })
            .fold(KForm::zero(3), |acc, m| acc.plus(&m))
    })
}

/// `d(φ)` from the exterior engine.
pub fn engine_dphi() -> &'static KForm {
    static DPHI: OnceLock<KForm> = OnceLock::new();
    DPHI.get_or_init(|| d(cone_phi()))
}

/// `∂φ/∂t` by differentiating every coefficient of `φ`.
pub fn engine_dphidt() -> &'static KForm {
    static DPHIDT: OnceLock<KForm> = OnceLock::new();
    DPHIDT.get_or_init(|| time_derivative(cone_phi()))
}

/// `∂φ/∂t ∧ dr − dφ` from the engine.
pub fn engine_flow_residual() -> &'static KForm {
    static RES: OnceLock<KForm> = OnceLock::new();
    RES.get_or_init(|| {
        engine_dphidt()
            .wedge(&KForm::basis(CoframeIndex::DR))
            .minus(engine_dphi())
    })
}

fn sym(field: Field, r: u8, t: u8) -> CoeffExpr {
    CoeffExpr::partial(field, r, t)
}

/// Closed-form `dφ` and `∂φ/∂t` in the scaled basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedFormTables {
    pub dphi: KForm,
    pub dphidt: KForm,
}

impl ClosedFormTables {
    /// `dφ = 3(A/B² − B'/B) e^{4567} + (B'/B + 2A'/A − 1/A)(e^{1267} + e^{2347} − e^{1357})`
    /// and `∂e^{ijk}/∂t = (Σ rates) e^{ijk}` with rate `Ḃ/B` per β factor and
    /// `Ȧ/A` per α factor.
    pub fn standard() -> Self {
        let a = CoeffExpr::a();
        let b = CoeffExpr::b();
        let a_r = sym(Field::A, 1, 0);
        let b_r = sym(Field::B, 1, 0);
        let a_t = sym(Field::A, 0, 1);
        let b_t = sym(Field::B, 0, 1);

        let c4567 = CoeffExpr::int(3) * (a.clone() / b.clone().powi(2) - b_r.clone() / b.clone());
        let mixed = b_r / b.clone() + CoeffExpr::int(2) * a_r / a.clone() - a.clone().recip();
        let mono = |idx: &[u8], c: CoeffExpr| KForm::monomial(idx, c).expect("valid indices");
        let dphi = mono(&[4, 5, 6, 7], c4567)
            .plus(&mono(&[1, 2, 6, 7], mixed.clone()))
            .plus(&mono(&[2, 3, 4, 7], mixed.clone()))
            .plus(&mono(&[1, 3, 5, 7], -mixed));

        let beta_rate = b_t / b;
        let alpha_rate = a_t / a;
        let rate = |n_alpha: i64, n_beta: i64| {
            CoeffExpr::int(n_beta) * beta_rate.clone() + CoeffExpr::int(n_alpha) * alpha_rate.clone()
        };
        let dphidt = [
            ([4, 5, 6], rate(0, 3)),
            ([6, 2, 1], rate(2, 1)),
            ([1, 7, 4], rate(1, 1)),
            ([5, 2, 7], rate(1, 1)),
            ([6, 3, 7], rate(1, 1)),
            ([1, 3, 5], rate(2, 1)),
            ([4, 3, 2], rate(2, 1)),
        ]
        .into_iter()
        .map(|(idx, c)| mono(&idx, c))
        .fold(KForm::zero(3), |acc, m| acc.plus(&m));

        ClosedFormTables { dphi, dphidt }
    }

    /// Copy with the sign of one `dφ` coefficient reversed, for fault-injection tests.
    pub fn with_flipped_dphi(&self, blade: Blade) -> Self {
        let mut dphi = KForm::zero(4);
        for (b, c) in self.dphi.terms() {
            let c = if b == blade { -c.clone() } else { c.clone() };
            dphi.add_term(b, c);
        }
        ClosedFormTables {
            dphi,
            dphidt: self.dphidt.clone(),
        }
    }

    pub fn dphi_at<P: Profile + ?Sized>(&self, p: &P, r: f64, t: f64) -> Result<NumForm, ExteriorError> {
        exterior::eval(&self.dphi, p, r, t)
    }

    pub fn dphidt_at<P: Profile + ?Sized>(&self, p: &P, r: f64, t: f64) -> Result<NumForm, ExteriorError> {
        exterior::eval(&self.dphidt, p, r, t)
    }
}

fn standard_tables() -> &'static ClosedFormTables {
    static TABLES: OnceLock<ClosedFormTables> = OnceLock::new();
    TABLES.get_or_init(ClosedFormTables::standard)
}

fn scales_at<P: Profile + ?Sized>(p: &P, r: f64, t: f64) -> Result<[f64; 7], ExteriorError> {
    let wrap = |field| {
        p.value(field, r, t).map_err(|source| ExteriorError::Eval {
            blade: Blade::SCALAR,
            source,
        })
    };
    Ok(numeric_scales(wrap(Field::A)?, wrap(Field::B)?))
}

/// Engine `dφ` at a point, in the scaled basis.
pub fn dphi_engine<P: Profile + ?Sized>(p: &P, r: f64, t: f64) -> Result<NumForm, ExteriorError> {
    let coframe = exterior::eval(engine_dphi(), p, r, t)?;
    Ok(to_orthonormal(&coframe, &scales_at(p, r, t)?))
}

/// Engine `∂φ/∂t` at a point, in the scaled basis.
pub fn dphidt_engine<P: Profile + ?Sized>(p: &P, r: f64, t: f64) -> Result<NumForm, ExteriorError> {
    let coframe = exterior::eval(engine_dphidt(), p, r, t)?;
    Ok(to_orthonormal(&coframe, &scales_at(p, r, t)?))
}

/// Closed-form `dφ` at a point, in the scaled basis.
pub fn dphi_closed_form<P: Profile + ?Sized>(p: &P, r: f64, t: f64) -> Result<NumForm, ExteriorError> {
    standard_tables().dphi_at(p, r, t)
}

/// Closed-form `∂φ/∂t` at a point, in the scaled basis.
pub fn dphidt_closed_form<P: Profile + ?Sized>(p: &P, r: f64, t: f64) -> Result<NumForm, ExteriorError> {
    standard_tables().dphidt_at(p, r, t)
}

/// `∂φ/∂t ∧ dr − dφ` at a point, in the scaled basis.
pub fn flow_residual<P: Profile + ?Sized>(p: &P, r: f64, t: f64) -> Result<NumForm, ExteriorError> {
    let coframe = exterior::eval(engine_flow_residual(), p, r, t)?;
    Ok(to_orthonormal(&coframe, &scales_at(p, r, t)?))
}

/// The two equations the flow reduces to, `(Ḃ + B' − A/B, Ȧ + A' − ½(1 − A²/B²))`.
pub fn reduced_system_defect<P: Profile + ?Sized>(
    p: &P,
    r: f64,
    t: f64,
) -> Result<(f64, f64), crate::exterior::EvalError> {
    let [a, b, a_r, b_r, a_t, b_t] = p.first_jet(r, t)?;
    Ok((b_t + b_r - a / b, a_t + a_r - 0.5 * (1.0 - a * a / (b * b))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::PointJet;

    fn blade(idx: &[u8]) -> Blade {
        Blade::from_indices(idx).unwrap().unwrap().0
    }

    #[test]
    fn cone_phi_coefficients() {
        let phi = cone_phi();
        let c = |idx: &[u8]| phi.coefficient(idx).unwrap();
        assert_eq!(c(&[4, 5, 6]), CoeffExpr::b().powi(3));
        assert_eq!(c(&[1, 7, 4]), CoeffExpr::a() * CoeffExpr::b());
        assert_eq!(c(&[6, 2, 1]), CoeffExpr::a().powi(2) * CoeffExpr::b());
        assert_eq!(phi.len(), 7);
    }

    #[test]
    fn cone_phi_at_unit_scale_is_associative() {
        let phi = exterior::eval(cone_phi(), &PointJet::new(1.0, 1.0), 2.0, 0.0).unwrap();
        assert_eq!(phi, crate::g2::octonion::listed_associative_form());
    }

    #[test]
    fn closed_form_dphi_at_unit_profile() {
        let got = dphi_closed_form(&PointJet::new(1.0, 1.0), 2.0, 0.0).unwrap();
        assert_eq!(got.get(blade(&[4, 5, 6, 7])), 3.0);
        assert_eq!(got.get(blade(&[1, 2, 6, 7])), -1.0);
        assert_eq!(got.get(blade(&[2, 3, 4, 7])), -1.0);
        assert_eq!(got.get(blade(&[1, 3, 5, 7])), 1.0);
        assert_eq!(got.len(), 4);
    }

    #[test]
    fn dphidt_examples() {
        let stat = dphidt_closed_form(&PointJet::new(1.3, 0.7), 2.0, 0.0).unwrap();
        assert!(stat.is_zero());
        let jet = PointJet::new(1.0, 2.0).with_t_derivatives(0.0, 2.0);
        let got = dphidt_closed_form(&jet, 2.0, 0.0).unwrap();
        assert!((got.get(blade(&[4, 5, 6])) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn engine_matches_closed_form_at_a_point() {
        let jet = PointJet::new(0.8, 1.9)
            .with_r_derivatives(0.3, -0.45)
            .with_t_derivatives(-0.2, 0.6);
        let a = dphi_engine(&jet, 2.0, 0.0).unwrap();
        let b = dphi_closed_form(&jet, 2.0, 0.0).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12, "{a} vs {b}");
        let a = dphidt_engine(&jet, 2.0, 0.0).unwrap();
        let b = dphidt_closed_form(&jet, 2.0, 0.0).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn static_unit_residual_is_minus_dphi() {
        let jet = PointJet::new(1.0, 1.0);
        let res = flow_residual(&jet, 2.0, 0.0).unwrap();
        let dphi = dphi_closed_form(&jet, 2.0, 0.0).unwrap();
        assert!(res.max_abs_diff(&dphi.neg()) < 1e-15);
    }

    #[test]
    fn second_equation_defect_has_predicted_support() {
        // satisfies Ḃ + B' = A/B but not the A equation
        let (a, b) = (0.9, 1.4);
        let jet = PointJet::new(a, b)
            .with_r_derivatives(0.1, 0.2)
            .with_t_derivatives(0.3, a / b - 0.2);
        let res = flow_residual(&jet, 2.0, 0.0).unwrap().chop(1e-14);
        let support: Vec<Blade> = res.terms().map(|(b, _)| b).collect();
        assert_eq!(
            support,
            vec![blade(&[1, 2, 6, 7]), blade(&[1, 3, 5, 7]), blade(&[2, 3, 4, 7])]
        );
    }

    #[test]
    fn flipped_table_differs_only_on_that_blade() {
        let t = ClosedFormTables::standard().with_flipped_dphi(blade(&[4, 5, 6, 7]));
        let jet = PointJet::new(1.0, 1.0);
        let got = t.dphi_at(&jet, 2.0, 0.0).unwrap();
        assert_eq!(got.get(blade(&[4, 5, 6, 7])), -3.0);
        assert_eq!(got.get(blade(&[1, 2, 6, 7])), -1.0);
    }
}

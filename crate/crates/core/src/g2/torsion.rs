//! Torsion of the cone structure: a G₂-structure is parallel iff `dφ = 0`
//! and `δφ = 0`.

use std::sync::OnceLock;

use crate::exterior::{self, ExteriorError, KForm, Profile};
use crate::flow::cone::{self, cone_phi, cone_scales, numeric_scales};

use super::hodge::{codifferential_symbolic, to_orthonormal};

/// Which computation supplies `dφ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DphiRoute {
    Engine,
    ClosedForm,
}

/// Max-abs coefficients of `dφ` and `δφ` in the orthonormal coframe.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorsionResiduals {
    pub dphi: f64,
    pub codiff: f64,
}

/// `δφ = −∗d∗φ` in the α/β/dr coframe.
pub fn codifferential_phi() -> &'static KForm {
    static DELTA: OnceLock<KForm> = OnceLock::new();
    DELTA.get_or_init(|| codifferential_symbolic(cone_phi(), &cone_scales()))
}

pub fn torsion_residuals<P: Profile + ?Sized>(
    p: &P,
    r: f64,
    t: f64,
) -> Result<TorsionResiduals, ExteriorError> {
    torsion_residuals_with(p, r, t, DphiRoute::Engine)
}

pub fn torsion_residuals_with<P: Profile + ?Sized>(
    p: &P,
    r: f64,
    t: f64,
    route: DphiRoute,
) -> Result<TorsionResiduals, ExteriorError> {
    let dphi = match route {
        DphiRoute::Engine => cone::dphi_engine(p, r, t)?,
        DphiRoute::ClosedForm => cone::dphi_closed_form(p, r, t)?,
    };
    let delta = exterior::eval(codifferential_phi(), p, r, t)?;
    let [a, b, ..] = p.first_jet(r, t).map_err(|source| ExteriorError::Eval {
        blade: exterior::Blade::SCALAR,
        source,
    })?;
    let delta = to_orthonormal(&delta, &numeric_scales(a, b));
    Ok(TorsionResiduals {
        dphi: dphi.max_abs(),
        codiff: delta.max_abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::{PointJet, PolynomialProfile};

    #[test]
    fn torsion_free_cone() {
        let p = PolynomialProfile::g2_cone();
        for r in [1.5, 3.0, 10.0] {
            let res = torsion_residuals(&p, r, 0.0).unwrap();
            assert!(res.dphi < 1e-12 && res.codiff < 1e-12, "{res:?}");
        }
    }

    #[test]
    fn unit_profile_has_dphi_residual_three() {
        let jet = PointJet::new(1.0, 1.0);
        for route in [DphiRoute::Engine, DphiRoute::ClosedForm] {
            let res = torsion_residuals_with(&jet, 2.0, 0.0, route).unwrap();
            assert!((res.dphi - 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn codifferential_is_a_two_form() {
        assert_eq!(codifferential_phi().degree(), 2);
    }
}

//! The metric induced by a G₂-structure.
//!
//! `B_ij e^{1…7} = (∂_i⌟φ) ∧ (∂_j⌟φ) ∧ φ` and `g_ij = B_ij / (6^{2/9} det(B)^{1/9})`.
//! For the associative form `B = 6·I`, so this normalization returns the
//! identity.

use nalgebra::{SMatrix, SymmetricEigen};

use crate::exterior::{CoframeIndex, KForm, NumForm, Profile};

use super::G2Error;

pub type Matrix7 = SMatrix<f64, 7, 7>;

/// Relative eigenvalue threshold for non-degeneracy.
pub const NONDEGENERACY_THRESHOLD: f64 = 1e-9;

/// The symmetric bilinear form `B` of a 3-form, in the coframe basis.
pub fn b_matrix(phi: &NumForm) -> Result<Matrix7, G2Error> {
    if phi.degree() != 3 {
        return Err(G2Error::NotThreeForm(phi.degree()));
    }
    let contractions: Vec<NumForm> = CoframeIndex::all()
        .map(|i| phi.contract(i))
        .collect::<Result<_, _>>()?;
    let mut b = Matrix7::zeros();
    for i in 0..7 {
        let left = contractions[i].wedge(phi);
        for j in i..7 {
            let v = contractions[j].wedge(&left).top_coefficient();
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    Ok(b)
}

fn definiteness(b: &Matrix7) -> Option<f64> {
    let scale = b.amax();
    if scale == 0.0 {
        return None;
    }
    let eig = SymmetricEigen::new(*b);
    let threshold = NONDEGENERACY_THRESHOLD * scale;
    if eig.eigenvalues.iter().all(|&l| l > threshold) {
        Some(1.0)
    } else if eig.eigenvalues.iter().all(|&l| l < -threshold) {
        Some(-1.0)
    } else {
        None
    }
}

/// True iff `B` is definite (of either sign).
pub fn nondegenerate(phi: &NumForm) -> bool {
    b_matrix(phi).ok().and_then(|b| definiteness(&b)).is_some()
}

/// Symmetric 7×7 metric in the coframe basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMetric(pub Matrix7);

impl SymMetric {
    pub fn max_off_diagonal(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..7 {
            for j in 0..7 {
                if i != j {
                    worst = worst.max(self.0[(i, j)].abs());
                }
            }
        }
        worst
    }

    /// The diagonal, provided off-diagonal entries are below `tol`.
    pub fn to_diag(&self, tol: f64) -> Result<MetricDiag, G2Error> {
        let off = self.max_off_diagonal();
        if off > tol {
            return Err(G2Error::NotDiagonal(off));
        }
        MetricDiag::new(std::array::from_fn(|i| self.0[(i, i)]))
    }
}

/// Metric that is diagonal in the coframe: `g = Σ g_ii (e^i)²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricDiag([f64; 7]);

impl MetricDiag {
    pub fn new(components: [f64; 7]) -> Result<Self, G2Error> {
        for (i, &g) in components.iter().enumerate() {
            if !(g > 0.0 && g.is_finite()) {
                return Err(G2Error::NonPositiveMetric { index: i + 1, value: g });
            }
        }
        Ok(MetricDiag(components))
    }

    pub fn identity() -> Self {
        MetricDiag([1.0; 7])
    }

    /// `diag(A², A², A², B², B², B², 1)`.
    pub fn cone(a: f64, b: f64) -> Result<Self, G2Error> {
        let (a2, b2) = (a * a, b * b);
        MetricDiag::new([a2, a2, a2, b2, b2, b2, 1.0])
    }

    pub fn components(&self) -> [f64; 7] {
        self.0
    }

    /// Square roots of the components: `θ^i = s_i e^i` is orthonormal.
    pub fn scales(&self) -> [f64; 7] {
        self.0.map(f64::sqrt)
    }

    pub fn max_abs_diff(&self, other: &MetricDiag) -> f64 {
        (0..7)
            .map(|i| (self.0[i] - other.0[i]).abs())
            .fold(0.0, f64::max)
    }
}

/// Metric of a non-degenerate 3-form with coframe orientation `e^{1…7}`.
pub fn metric_from_form(phi: &NumForm) -> Result<SymMetric, G2Error> {
    let b = b_matrix(phi)?;
    if definiteness(&b).is_none() {
        return Err(G2Error::Degenerate);
    }
    let det = b.determinant();
    if det <= 0.0 {
        return Err(G2Error::OrientationMismatch(det));
    }
    let norm = 6f64.powf(2.0 / 9.0) * det.powf(1.0 / 9.0);
    let g = b / norm;
    Ok(SymMetric((g + g.transpose()) * 0.5))
}

/// Metric of a symbolic 3-form evaluated on a profile at `(r, t)`.
pub fn metric_from_phi<P: Profile + ?Sized>(
    phi: &KForm,
    profile: &P,
    r: f64,
    t: f64,
) -> Result<SymMetric, G2Error> {
    let numeric = crate::exterior::eval(phi, profile, r, t)?;
    metric_from_form(&numeric)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g2::octonion::listed_associative_form;

    #[test]
    fn standard_form_has_b_equal_six_identity() {
        let b = b_matrix(&listed_associative_form()).unwrap();
        assert!((b - Matrix7::identity() * 6.0).amax() < 1e-12);
    }

    #[test]
    fn standard_metric_is_identity() {
        let g = metric_from_form(&listed_associative_form()).unwrap();
        assert!((g.0 - Matrix7::identity()).amax() < 1e-12);
    }

    #[test]
    fn homogeneity_example() {
        let phi = listed_associative_form().scale(&8.0);
        let g = metric_from_form(&phi).unwrap();
        assert!((g.0 - Matrix7::identity() * 4.0).amax() < 1e-12);
    }

    #[test]
    fn degenerate_forms() {
        let single = NumForm::monomial(&[1, 2, 3], 1.0).unwrap();
        assert!(!nondegenerate(&single));
        assert_eq!(metric_from_form(&single), Err(G2Error::Degenerate));
        assert!(!nondegenerate(&NumForm::zero(3)));
        assert!(nondegenerate(&listed_associative_form()));
        assert!(matches!(
            b_matrix(&NumForm::zero(2)),
            Err(G2Error::NotThreeForm(2))
        ));
    }

    #[test]
    fn reversed_orientation_is_rejected() {
        let phi = listed_associative_form().neg();
        assert!(nondegenerate(&phi));
        assert!(matches!(
            metric_from_form(&phi),
            Err(G2Error::OrientationMismatch(_))
        ));
    }

    #[test]
    fn metric_diag_validation() {
        assert!(MetricDiag::new([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0]).is_err());
        assert_eq!(
            MetricDiag::cone(2.0, 3.0).unwrap().components(),
            [4.0, 4.0, 4.0, 9.0, 9.0, 9.0, 1.0]
        );
    }
}

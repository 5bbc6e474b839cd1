//! G₂ linear algebra: octonions, the associative form, the metric of a
//! 3-form, the Hodge star and torsion residuals of the cone structure.

pub mod hodge;
pub mod metric;
pub mod octonion;
pub mod torsion;

use thiserror::Error;

use crate::exterior::{EvalError, ExteriorError};

pub use hodge::{codifferential_symbolic, hodge_star, hodge_star_symbolic};
pub use metric::{b_matrix, metric_from_form, metric_from_phi, nondegenerate, MetricDiag, SymMetric};
pub use octonion::{associative_form, listed_associative_form, ImOctonion, Octonion};
pub use torsion::{torsion_residuals, torsion_residuals_with, DphiRoute, TorsionResiduals};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum G2Error {
    #[error("expected a 3-form, got degree {0}")]
    NotThreeForm(u8),
    #[error("degenerate G2-structure")]
    Degenerate,
    #[error("orientation mismatch: det(B) = {0}")]
    OrientationMismatch(f64),
    #[error("metric component g_{index}{index} = {value} is not positive")]
    NonPositiveMetric { index: usize, value: f64 },
    #[error("metric is not diagonal (off-diagonal entry {0})")]
    NotDiagonal(f64),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
}

impl From<EvalError> for G2Error {
    fn from(source: EvalError) -> Self {
        G2Error::Exterior(ExteriorError::Eval {
            blade: crate::exterior::Blade::SCALAR,
            source,
        })
    }
}

//! The flow `∂φ/∂t ∧ dr = dφ` on the cone family and its explicit solution
//! along characteristics `x = r + t`, `y = r − t`.

pub mod characteristic;
pub mod cone;
pub mod data;
pub mod io;
pub mod ode;
pub mod quadrature;
pub mod root;
pub mod solution;

use thiserror::Error;

pub use characteristic::{characteristic_oracle, first_integral, CharacteristicState};
pub use data::{FlowData, HypothesisReport, SmoothFn};
pub use ode::residual_ode;
pub use solution::{quadrature_f, quadrature_f_df, solution_a, FlowSolution, SolutionJet};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("f = {0} < 0: the solution formula requires f >= 0")]
    NegativeF(f64),
    #[error("B = {0} must be nonnegative")]
    NegativeB(f64),
    #[error("outside solution domain: x = {x} <= h(y) = {h}")]
    OutsideDomain { x: f64, h: f64 },
    #[error("metric degenerates: 1/12 + f/B^3 = {radicand} at B = {b}")]
    MetricDegenerates { b: f64, radicand: f64 },
    #[error("degenerate metric on characteristic at x = {x} (B = {b})")]
    DegenerateCharacteristic { x: f64, b: f64 },
    #[error("{what} is undefined at y = {y}")]
    Undefined { what: &'static str, y: f64 },
    #[error("quadrature did not reach tolerance (estimated error {0})")]
    Quadrature(f64),
    #[error("root finding failed: {0}")]
    Root(String),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("csv: {0}")]
    Csv(String),
}

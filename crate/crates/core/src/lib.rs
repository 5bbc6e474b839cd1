//! Exterior calculus on the cone over S³×S³ and a first-order flow of
//! G₂-structures on it.
//!
//! * [`exterior`]: forms in the fixed coframe with symbolic coefficients and `d`.
//! * [`g2`]: octonions, the associative 3-form, metric from a 3-form, Hodge star.
//! * [`flow`]: the cone family `φ(A, B)`, the flow `∂φ/∂t ∧ dr = dφ`, its closed-form
//!   solution and a characteristic integrator.
//! * [`convergence`]: rescaled-metric deviation from the limit cone.
//! * [`cli`]: configuration and the `g2cone` commands.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod convergence;
pub mod exterior;
pub mod flow;
pub mod g2;

//! Petersson norms of Hecke's weight-one theta series attached to real
//! quadratic fields.
//!
//! The closed form expresses `||theta_L||^2` as `-(Psi(g0) + Psi(g1))/12 * ln(eps)`
//! with `Psi` the Rademacher symbol of two hyperbolic matrices built from the
//! lattice. [`norm::closed_form_norm`] evaluates it exactly; [`theta`] builds
//! the q-expansion itself and [`oracles`] checks both numerically.

pub mod cli;
pub mod error;
pub mod norm;
pub mod oracles;
pub mod quadfield;
pub mod rademacher;
pub mod rat;
pub mod theta;

pub use error::{Error, Result};

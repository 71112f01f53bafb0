//! Variable-order Caputo fractional derivatives.
//!
//! The crate evaluates the three variable-order Caputo operators (types I, II
//! and III, left and right) in three independent ways:
//!
//! * closed forms for power functions ([`reference::power_closed_form`]),
//! * adaptive quadrature of the defining integrals ([`reference::caputo_quadrature`]),
//! * integer-order expansions with computable error bounds ([`expansion`]).
//!
//! The expansion turns fractional PDEs into ordinary systems; [`pde`] solves
//! a time-fractional diffusion equation and a linear Burgers equation this way.

pub mod error;
pub mod expansion;
pub mod function;
pub mod ode;
pub mod order;
pub mod pde;
pub mod quadrature;
pub mod reference;
pub mod special;

pub use error::{Error, Result};
pub use expansion::{
    ApproxResult, DerivativeBound, ExpansionCoefficients, ExpansionParams, MomentVector,
};
pub use function::{BoundSource, ScalarFunction};
pub use order::{Interval, OrderFunction};
pub use reference::{Kind, OperatorKind, RlKind, Side};

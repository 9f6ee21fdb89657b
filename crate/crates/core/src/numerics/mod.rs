//! Numerical plumbing shared by the exact and asymptotic engines.

pub mod diff;
pub mod kahan;
pub mod quadrature;

pub use diff::{mixed_partial, mixed_partial_vec, Derivative, FdSchedule};
pub use kahan::CompensatedSum;
pub use quadrature::{integrate, QuadResult, QuadratureSpec};

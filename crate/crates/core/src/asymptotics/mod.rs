//! Large-n expansions in the merging-radii regime.
//!
//! [`bulk_coeffs`] and [`edge_coeffs`] evaluate `C1..C4` by adaptive
//! quadrature of the kernels in [`kernels`]. Infinite ranges are cut at
//! `T = max|s_l| + truncation_margin`; every integrand decays at least like
//! `erfc(t - max|s|)`, so the default margin of 10 leaves a tail below `1e-40`.

pub mod closed_form;
mod coeffs;
pub mod kernels;

pub use closed_form::{closed_form_moments, clt_covariance, ClosedFormMoments, Expansion, PairExpansion};
pub use coeffs::{
    bulk_coeffs, cumulant_asymptotics, cumulant_asymptotics_with, edge_coeffs, expansion_coeffs, ExpansionCoeffs,
    IntegralReport, RegimeKind, MAX_ASYMPTOTIC_ORDER,
};
pub use kernels::{g1, g2, h1, h2, Kernels};

pub use crate::numerics::QuadratureSpec;

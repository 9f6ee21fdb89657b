//! Disk-counting statistics for the Mittag-Leffler ensemble with merging radii.
//!
//! The ensemble has joint density proportional to
//! `prod |z_j - z_k|^2 prod |z_j|^{2 alpha} exp(-n |z_j|^{2b})`. For radii
//! `r_1 < .. < r_m` that merge at rate `n^{-1/2}` this crate computes the
//! exact joint moment generating function of the disk counts
//! `N(r_l) = #{j : |z_j| < r_l}`, its large-`n` expansion, closed-form
//! moments, and a direct sampler of the counts.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// tabulated constants are kept at their published precision
#![allow(clippy::excessive_precision)]

pub mod asymptotics;
pub mod ensemble;
pub mod error;
pub mod numerics;
pub mod sampler;
pub mod special;

pub use ensemble::{EnsembleParams, Fugacities, MergeConfig, Regime};
pub use error::{Error, Result};

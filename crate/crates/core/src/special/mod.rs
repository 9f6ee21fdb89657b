//! Scalar special functions: complementary error function, log-gamma and the
//! regularized lower incomplete gamma function with a uniform large-shape path.
//!
//! All functions are pure and safe to call from any thread.

mod erf;
mod gamma;
mod temme;

pub use erf::{erfc, erfcx};
pub use gamma::{
    ln_gamma, reg_gamma_pair, reg_lower_gamma, reg_lower_gamma_series_cf, select_regime, GammaPair, GammaRegime,
    UNIFORM_LAMBDA_RANGE, UNIFORM_MIN_SHAPE,
};
pub use temme::{reg_lower_gamma_temme, temme_coeffs, temme_eta, temme_r};

//! Completed twisted L-functions: derivatives at the center, conversion to
//! Taylor coefficients, sign predictions and the approximate functional
//! equation.

pub mod afe;
pub mod kernel;
pub mod series;
pub mod sign;
pub mod taylor;

pub use kernel::g_r_weight;
pub use series::{
    detect_fricke_eta, lambda_derivatives, q_scale, truncation_length, CenterConvention, CompletedSeries,
    DerivativeVector, KernelMode,
};
pub use sign::{predicted_sign, sign_survey, sign_threshold, superpositivity_check, SignSurvey, Threshold};
pub use taylor::{
    inverse_gamma_derivative, l_derivatives_from_lambda, taylor_coefficients, InverseGammaTable, TaylorCoefficients,
    TwistEngine, TwistResult,
};

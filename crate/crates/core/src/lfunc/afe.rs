//! Approximate functional equation with incomplete-gamma weights.

use statrs::function::gamma::{gamma, gamma_ur};
use std::f64::consts::PI;

use super::series::CompletedSeries;
use crate::error::{Error, Result};

/// `W_γ(x) = Γ(1+γ, 2πx/√q) / Γ(1+γ)`.
pub fn incomplete_gamma_weight(gamma_shift: f64, x: f64, q: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("weight needs x > 0, got {x}")));
    }
    if gamma_shift.abs() > 0.5 {
        return Err(Error::Domain(format!("|γ| must be at most 1/2, got {gamma_shift}")));
    }
    Ok(gamma_ur(1.0 + gamma_shift, 2.0 * PI * x / q.sqrt()))
}

/// `L(1+γ)` (arithmetic normalization) from the two smoothed sums:
/// `Σ b_n n^{−1−γ} W_γ + ω Q^{−2γ} Γ(1−γ)/Γ(1+γ) Σ b_n n^{−1+γ} W_{−γ}`,
/// where the weights are taken at `2πn/√N`.
pub fn shifted_value(series: &CompletedSeries, gamma_shift: f64) -> Result<f64> {
    let q = series.q_scale();
    let omega = series.omega as f64;
    let dual = omega * q.powf(-2.0 * gamma_shift) * gamma(1.0 - gamma_shift) / gamma(1.0 + gamma_shift);
    let mut total = 0.0;
    for n in 1..=series.coefficients.n_max() {
        let b = series.coefficients.a(n);
        if b == 0 {
            continue;
        }
        let x = n as f64 / q;
        let nf = n as f64;
        // both weights in the variable 2πn/√N = x, i.e. W_γ with q = 4π²
        let w_plus = gamma_ur(1.0 + gamma_shift, x);
        let w_minus = gamma_ur(1.0 - gamma_shift, x);
        total += b as f64 * (nf.powf(-1.0 - gamma_shift) * w_plus + dual * nf.powf(-1.0 + gamma_shift) * w_minus);
    }
    Ok(total)
}

//! Predicted leading terms of the first and second family moments.

use super::euler::{beta_function, sym_square_l1, z_alpha_with, zstar_halfhalf_with, WeightIndex};
use crate::arith::CoefficientTable;
use crate::error::{Error, Result};
use crate::gauss::BumpFunction;
use std::f64::consts::PI;

/// Euler products and Mellin value entering the predictions for one curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentConstants {
    pub eta: i8,
    /// `J̃(1)` of the family weight.
    pub jtilde_1: f64,
    pub l1_sym2: f64,
    pub z1_0: f64,
    pub zq_0: f64,
    pub zstar_1: f64,
    pub zstar_q: f64,
    pub prime_cutoff: u64,
    /// Largest drift among the products above, relative to its value.
    pub relative_tail: f64,
}

impl MomentConstants {
    pub fn compute(
        table: &CoefficientTable,
        eta: i8,
        weight: &BumpFunction,
        prime_cutoff: u64,
        index: WeightIndex,
    ) -> Result<Self> {
        let q = table.conductor_q();
        let l1 = sym_square_l1(table, q, prime_cutoff)?;
        let z1 = z_alpha_with(1, 0.0, table, q, prime_cutoff, index)?;
        let zq = z_alpha_with(q, 0.0, table, q, prime_cutoff, index)?;
        let s1 = zstar_halfhalf_with(1, table, q, prime_cutoff, index)?;
        let sq = zstar_halfhalf_with(q, table, q, prime_cutoff, index)?;
        let relative_tail =
            [l1, z1, zq, s1, sq].iter().map(|v| v.tail_estimate / v.value.abs().max(1e-300)).fold(0.0, f64::max);
        Ok(MomentConstants {
            eta,
            jtilde_1: weight.mellin(1.0),
            l1_sym2: l1.value,
            z1_0: z1.value,
            zq_0: zq.value,
            zstar_1: s1.value,
            zstar_q: sq.value,
            prime_cutoff,
            relative_tail,
        })
    }
}

/// Main term of `Σ* L^{(i)}(1/2, f⊗χ_{8d}) J(8d/X)`.
///
/// For `i = 0` both terms of the shifted first moment are of size `X` and
/// the full value at `α = 0` is returned. For `i ≥ 1` only the second term
/// carries `log^i X`, giving `(−2)^i(−η)/(2π²)·J̃(1)L(1,sym²)Z_q(0)·X log^i X`.
pub fn predicted_first_moment(c: &MomentConstants, i: usize, x: f64) -> f64 {
    let eta = c.eta as f64;
    let base = x / (2.0 * PI * PI) * c.jtilde_1 * c.l1_sym2;
    if i == 0 {
        base * (c.z1_0 - eta * c.zq_0)
    } else {
        base * (-2.0f64).powi(i as i32) * (-eta) * c.zq_0 * x.ln().powi(i as i32)
    }
}

/// Constant `C` in `Σ* L^{(l1)}L^{(l2)}(1/2, f⊗χ_{8d}) J(8d/X) ~ C·X·log^{l1+l2+1} X`.
pub fn predicted_second_moment_constant(
    l1: usize,
    l2: usize,
    eta: i8,
    jtilde_1: f64,
    l1_sym2: f64,
    zstar_1: f64,
    zstar_q: f64,
) -> Result<f64> {
    let total = (l1 + l2 + 1) as i32;
    let lead = (-2.0f64).powi(total) / (2.0 * PI * PI);
    let l3 = l1_sym2.powi(3);
    let first = lead * (-1.0 / total as f64) * jtilde_1 * l3 * zstar_1;
    let beta = beta_function(l1 as f64 + 1.0, l2 as f64 + 1.0)?;
    let second = -(jtilde_1 * l3 * (-(eta as f64)) * zstar_q * lead) * beta;
    let c = first + second;
    if !c.is_finite() {
        return Err(Error::Domain(format!("second moment constant for ({l1}, {l2}) is not finite")));
    }
    Ok(c)
}

/// Closed form for `l1 = l2 = 0`: `J̃(1)L(1,sym²)³(Z*_1 − η Z*_q)/π²`.
pub fn second_moment_constant_00(eta: i8, jtilde_1: f64, l1_sym2: f64, zstar_1: f64, zstar_q: f64) -> f64 {
    jtilde_1 * l1_sym2.powi(3) * (zstar_1 - eta as f64 * zstar_q) / (PI * PI)
}

pub fn predicted_second_moment(c: &MomentConstants, l1: usize, l2: usize, x: f64) -> Result<f64> {
    let k = predicted_second_moment_constant(l1, l2, c.eta, c.jtilde_1, c.l1_sym2, c.zstar_1, c.zstar_q)?;
    Ok(k * x * x.ln().powi((l1 + l2 + 1) as i32))
}

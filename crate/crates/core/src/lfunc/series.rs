//! Completed L-series `Λ(s) = Q^s Γ(s) Σ b_n n^{−s}`, `Q = √N/2π`, and its
//! derivatives at `s = 1`.
//!
//! With `φ(y) = Σ b_n e^{−n y/Q}` and `φ(1/y) = ω y² φ(y)`, splitting the
//! Mellin integral at `y = 1` gives
//! `Λ^{(r)}(1) = (1 + (−1)^r ω) Σ b_n G_r(n/Q)`.
//!
//! The functional equation is tested independently: splitting instead at
//! `y = A` defines `Λ_A(s)` from the coefficients alone, and
//! `Λ_A(s) − ωΛ_A(2−s) = ∫_{1/A}^{A} (ω y^{1−s} − y^{s−1}) φ(y) dy`,
//! which vanishes exactly when the coefficients and `ω` are consistent.

use std::f64::consts::PI;

use super::kernel::{cutoff_for, g_all, g_fast, grids, KernelRule, FE_SIGMA};
use crate::arith::{CoefficientTable, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::special::gauss_legendre;

/// Which point is called the center; values at the center agree order by order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CenterConvention {
    /// `s = 1` with `Γ(s)`.
    #[default]
    Arithmetic,
    /// `s = 1/2` with `L(s, f) = L(E, s + 1/2)`.
    Analytic,
}

#[derive(Clone, Debug)]
pub struct CompletedSeries {
    pub coefficients: CoefficientTable,
    pub conductor_n: u64,
    pub omega: i8,
    pub center: CenterConvention,
}

impl CompletedSeries {
    pub fn new(coefficients: CoefficientTable, conductor_n: u64, omega: i8) -> Result<Self> {
        if omega.abs() != 1 {
            return Err(Error::Domain(format!("root number must be ±1, got {omega}")));
        }
        Ok(CompletedSeries { coefficients, conductor_n, omega, center: CenterConvention::Arithmetic })
    }

    pub fn q_scale(&self) -> f64 {
        q_scale(self.conductor_n)
    }
}

/// `√N / 2π`.
pub fn q_scale(conductor_n: u64) -> f64 {
    (conductor_n as f64).sqrt() / (2.0 * PI)
}

/// Number of terms needed for derivatives up to order `r`:
/// `⌈(√N/2π)(38 + 5r)⌉`.
pub fn truncation_length(conductor_n: u64, r: usize) -> usize {
    (q_scale(conductor_n) * (38.0 + 5.0 * r as f64)).ceil() as usize
}

/// `Λ^{(r)}(1)` for `r = 0..=r_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivativeVector {
    pub r_max: usize,
    pub values: Vec<f64>,
    pub truncation_error_bound: f64,
    /// `max_s |Λ_A(s) − ωΛ_A(2−s)| / (1 + |Λ(1.3)|)` over `s ∈ {1.3, 1.7}`.
    pub fe_residual: f64,
}

/// How `G_r` is evaluated inside the coefficient sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KernelMode {
    /// Closed forms for `r ≤ 1`, quadrature for higher orders.
    #[default]
    Exact,
    /// Interpolated grids for `r ≤ 2`.
    Tabulated,
}

const SPLIT_A: f64 = 1.2;
const FE_NODES: usize = 32;
const FE_POINTS: [f64; 2] = [1.3, 1.7];
const REANCHOR: usize = 64;

/// Coefficients `b_n = a_n·χ(n)` for `n ≤ len`.
#[derive(Clone, Copy)]
pub(crate) struct Terms<'a> {
    pub a: &'a [i64],
    pub chi: Option<&'a [i8]>,
    pub len: usize,
}

impl Terms<'_> {
    #[inline]
    fn b(&self, n: usize) -> i64 {
        match self.chi {
            Some(c) => self.a[n] * c[n] as i64,
            None => self.a[n],
        }
    }
}

pub(crate) fn jet_core(terms: Terms<'_>, q: f64, omega: i8, r_max: usize, mode: KernelMode) -> DerivativeVector {
    let w = omega as f64;
    let parity: Vec<f64> = (0..=r_max).map(|r| 1.0 + if r % 2 == 0 { w } else { -w }).collect();
    let top = (0..=r_max).rev().find(|&r| parity[r] != 0.0);
    let mut sums = vec![0.0; r_max + 1];

    let (gx, gw) = gauss_legendre(FE_NODES);
    let (lo, hi) = (1.0 / SPLIT_A, SPLIT_A);
    let ys: Vec<f64> = gx.iter().map(|z| lo + 0.5 * (hi - lo) * (z + 1.0)).collect();
    let yw: Vec<f64> = gw.iter().map(|w| 0.5 * (hi - lo) * w).collect();
    let ratio: Vec<f64> = ys.iter().map(|y| (-y / q).exp()).collect();
    let mut pw = ratio.clone();
    let mut phi = vec![0.0; FE_NODES];
    let mut lambda_13 = 0.0;

    let kg = grids();
    let exact_rule = |x: f64| KernelRule::new(x, cutoff_for(r_max.max(2)));

    for n in 1..=terms.len {
        if n % REANCHOR == 0 {
            for (p, y) in pw.iter_mut().zip(&ys) {
                *p = (-(n as f64) * y / q).exp();
            }
        }
        let b = terms.b(n);
        if b != 0 {
            let bf = b as f64;
            let x = n as f64 / q;
            if let Some(top) = top {
                match mode {
                    KernelMode::Tabulated if top <= 2 => {
                        for (r, s) in sums.iter_mut().enumerate().take(top + 1) {
                            if parity[r] != 0.0 {
                                *s += bf * g_fast(r, x);
                            }
                        }
                    }
                    _ => {
                        let g = g_all(top, x);
                        for (r, s) in sums.iter_mut().enumerate().take(top + 1) {
                            if parity[r] != 0.0 {
                                *s += bf * g[r];
                            }
                        }
                    }
                }
            }
            for (f, p) in phi.iter_mut().zip(&pw) {
                *f += bf * p;
            }
            let kp = kg.k_pos.eval(x);
            let kn = kg.k_neg.eval(x);
            let (kp, kn) = match (kp, kn) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    let rule = exact_rule(x);
                    (rule.power_kernel(FE_SIGMA), rule.power_kernel(-FE_SIGMA))
                }
            };
            lambda_13 += bf * (kp + w * kn);
        }
        for (p, r) in pw.iter_mut().zip(&ratio) {
            *p *= r;
        }
    }

    let values: Vec<f64> = sums.iter().zip(&parity).map(|(s, p)| if *p == 0.0 { 0.0 } else { p * s }).collect();

    let scale = 1.0 + lambda_13.abs();
    let fe_residual = FE_POINTS
        .iter()
        .map(|&s| {
            let r: f64 = ys
                .iter()
                .zip(&yw)
                .zip(&phi)
                .map(|((y, wy), f)| wy * (w * y.powf(1.0 - s) - y.powf(s - 1.0)) * f)
                .sum();
            r.abs() / scale
        })
        .fold(0.0, f64::max);

    // |a_n| ≤ √n τ(n) ≤ 2n and G_r(x) ≤ r! e^{−x} / x^{r+1}
    let x0 = (terms.len + 1) as f64 / q;
    let mass = 2.0 * 2.0 * q * (terms.len as f64 + 1.0 + q) * (-x0).exp();
    let mut fact = 1.0;
    let mut bound: f64 = 0.0;
    for (r, p) in parity.iter().enumerate() {
        if r > 0 {
            fact *= r as f64;
        }
        if *p != 0.0 {
            bound = bound.max(mass * fact / x0.powi(r as i32 + 1));
        }
    }

    DerivativeVector { r_max, values, truncation_error_bound: bound, fe_residual }
}

/// `Λ^{(r)}(1)` for `r ≤ r_max`, with exact parity zeros.
pub fn lambda_derivatives(series: &CompletedSeries, r_max: usize) -> Result<DerivativeVector> {
    let required = truncation_length(series.conductor_n, r_max);
    let available = series.coefficients.n_max();
    if available < required {
        return Err(Error::TableTooShort { required, available });
    }
    let terms = Terms { a: series.coefficients.a_slice(), chi: None, len: available };
    Ok(jet_core(terms, series.q_scale(), series.omega, r_max, KernelMode::Exact))
}

/// Fricke eigenvalue `η` of the untwisted form, chosen so that `ω = −η`
/// satisfies the functional equation numerically.
pub fn detect_fricke_eta(curve: &WeierstrassCurve) -> Result<i8> {
    detect_fricke_eta_with(curve, 2 * truncation_length(curve.conductor_q, 4))
}

pub fn detect_fricke_eta_with(curve: &WeierstrassCurve, n_max: usize) -> Result<i8> {
    let table = crate::arith::coefficient_table(curve, n_max, Exec::Sequential)?;
    let q = q_scale(curve.conductor_q);
    let terms = Terms { a: table.a_slice(), chi: None, len: n_max };
    let res_plus = jet_core(terms, q, 1, 0, KernelMode::Exact).fe_residual;
    let res_minus = jet_core(terms, q, -1, 0, KernelMode::Exact).fe_residual;
    match (res_plus < 1e-8 && res_minus > 1e-3, res_minus < 1e-8 && res_plus > 1e-3) {
        // ω = +1 fits, so η = −1
        (true, false) => Ok(-1),
        (false, true) => Ok(1),
        _ => Err(Error::AmbiguousEta { res_plus, res_minus }),
    }
}

//! From `Λ^{(k)}(1)` to `L^{(m)}(1)` and the Taylor coefficients `c_i`.

use super::series::{jet_core, q_scale, truncation_length, DerivativeVector, KernelMode, Terms};
use crate::arith::{
    character_values, coefficient_table, CoefficientTable, PrimeSieve, TwistDescriptor, WeierstrassCurve,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::special::{zeta, EULER_GAMMA};

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Coefficient of `z^i` in the exponent of `1/Γ(1+z) = exp(γz + Σ_{i≥2} (−1)^{i+1} ζ(i) z^i / i)`.
fn log_inverse_gamma_coeff(i: usize) -> f64 {
    if i == 1 {
        EULER_GAMMA
    } else {
        let sign = if i.is_multiple_of(2) { -1.0 } else { 1.0 };
        sign * zeta(i as u32) / i as f64
    }
}

/// Partition sum over `k_1 + 2k_2 + ⋯ + t k_t = t` (without the `t!`).
fn partition_sum(t: usize) -> f64 {
    let constants: Vec<f64> =
        (1..=t).map(|i| if i == 1 { EULER_GAMMA } else { zeta(i as u32) / i as f64 }).collect();
    // depth-first over i = t, t−1, …, 1 with the remaining weight
    fn walk(i: usize, remaining: usize, constants: &[f64], parts: usize, acc: f64, out: &mut f64) {
        if i == 0 {
            if remaining == 0 {
                let sign = if parts.is_multiple_of(2) { 1.0 } else { -1.0 };
                *out += sign * acc;
            }
            return;
        }
        let c = constants[i - 1];
        let mut term = acc;
        let mut k = 0;
        while k * i <= remaining {
            walk(i - 1, remaining - k * i, constants, parts + k, term, out);
            k += 1;
            term *= c / k as f64;
        }
    }
    let mut out = 0.0;
    walk(t, t, &constants, 0, 1.0, &mut out);
    // overall sign (−1)^{Σk_i + t}
    if t.is_multiple_of(2) {
        out
    } else {
        -out
    }
}

/// `(1/Γ)^{(t)}(1)` by exhaustive enumeration of partitions of `t`.
pub fn inverse_gamma_derivative(t: usize) -> f64 {
    assert!(t <= 30, "inverse_gamma_derivative supports t <= 30");
    if t == 0 {
        1.0
    } else {
        factorial(t) * partition_sum(t)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InverseGammaTable {
    pub t_max: usize,
    pub g: Vec<f64>,
}

impl InverseGammaTable {
    pub fn new(t_max: usize) -> Self {
        InverseGammaTable { t_max, g: (0..=t_max).map(inverse_gamma_derivative).collect() }
    }
}

/// Taylor coefficients of `1/Γ(1+z)` by power-series exponentiation.
fn inverse_gamma_series(t_max: usize) -> Vec<f64> {
    let s: Vec<f64> = (0..=t_max).map(|i| if i == 0 { 0.0 } else { log_inverse_gamma_coeff(i) }).collect();
    let mut e = vec![0.0; t_max + 1];
    e[0] = 1.0;
    for n in 1..=t_max {
        e[n] = (1..=n).map(|k| k as f64 * s[k] * e[n - k]).sum::<f64>() / n as f64;
    }
    e
}

/// `L^{(m)}(1)` by multiplying the series of `Λ(1+z)`, `Q^{−1−z}` and
/// `1/Γ(1+z)`; also returns the sum of absolute products per order.
fn conversion_by_series(values: &[f64], q: f64, m_max: usize) -> (Vec<f64>, Vec<f64>) {
    let ell = q.ln();
    let lam: Vec<f64> = values.iter().enumerate().map(|(k, v)| v / factorial(k)).collect();
    let qs: Vec<f64> = (0..=m_max).map(|j| (-ell).powi(j as i32) / factorial(j) / q).collect();
    let ig = inverse_gamma_series(m_max);
    let f: Vec<f64> = (0..=m_max).map(|j| (0..=j).map(|i| qs[i] * ig[j - i]).sum()).collect();
    let fabs: Vec<f64> = (0..=m_max).map(|j| (0..=j).map(|i| (qs[i] * ig[j - i]).abs()).sum()).collect();
    let mut out = vec![0.0; m_max + 1];
    let mut mag = vec![0.0; m_max + 1];
    for m in 0..=m_max {
        for k in 0..=m {
            out[m] += lam[k] * f[m - k];
            mag[m] += (lam[k] * fabs[m - k]).abs();
        }
        out[m] *= factorial(m);
        mag[m] *= factorial(m);
    }
    (out, mag)
}

/// Leibniz expansion with the inverse-gamma derivatives at `s = 1`:
/// `L^{(m)}(1) = Q^{−1} Σ_k Λ^{(k)}(1) [ m!/(k!(m−k)!) (−log Q)^{m−k}
///   + Σ_{t≥1} m!/(k!(m−k−t)!) (−log Q)^{m−k−t} g_t/t! ]`.
fn conversion_by_leibniz(values: &[f64], q: f64, m_max: usize, table: &InverseGammaTable) -> Vec<f64> {
    let ell = q.ln();
    (0..=m_max)
        .map(|m| {
            let mut total = 0.0;
            for k in 0..=m {
                if values[k] == 0.0 {
                    continue;
                }
                let mut inner = factorial(m) / (factorial(k) * factorial(m - k)) * (-ell).powi((m - k) as i32);
                for t in 1..=(m - k) {
                    let p = table.g[t] / factorial(t);
                    inner += factorial(m) / (factorial(k) * factorial(m - k - t)) * (-ell).powi((m - k - t) as i32) * p;
                }
                total += values[k] * inner / q;
            }
            total
        })
        .collect()
}

/// `L^{(m)}(1)` for `m ≤ m_max` from `Λ^{(k)}(1)`, checked against the
/// power-series product.
pub fn l_derivatives_from_lambda(vec: &DerivativeVector, conductor_n: u64, m_max: usize) -> Result<Vec<f64>> {
    if vec.r_max < m_max {
        return Err(Error::Domain(format!("need Λ derivatives up to {m_max}, have {}", vec.r_max)));
    }
    convert_checked(&vec.values[..=m_max], q_scale(conductor_n), m_max)
}

pub(crate) fn convert_checked(values: &[f64], q: f64, m_max: usize) -> Result<Vec<f64>> {
    let table = InverseGammaTable::new(m_max);
    let formula = conversion_by_leibniz(values, q, m_max, &table);
    let (oracle, mag) = conversion_by_series(values, q, m_max);
    for m in 0..=m_max {
        if (formula[m] - oracle[m]).abs() > 1e-9 * mag[m].max(f64::MIN_POSITIVE) {
            return Err(Error::ConversionMismatch { m, formula: formula[m], oracle: oracle[m] });
        }
    }
    Ok(formula)
}

/// `c_i = L^{(i)}(1)/i!` with the analytic rank read off at `rank_tolerance`.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorCoefficients {
    pub c: Vec<f64>,
    pub analytic_rank: usize,
    pub rank_tolerance: f64,
}

pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-6;

impl TaylorCoefficients {
    /// `rank_tolerance = rel·max(1, max|c_i|)`.
    pub fn from_l_derivatives(l: &[f64], rel: f64) -> Self {
        let c: Vec<f64> = l.iter().enumerate().map(|(i, v)| v / factorial(i)).collect();
        let sup = c.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let rank_tolerance = rel * sup;
        let analytic_rank = c.iter().position(|v| v.abs() > rank_tolerance).unwrap_or(c.len());
        TaylorCoefficients { c, analytic_rank, rank_tolerance }
    }
}

/// Everything computed for one twist.
#[derive(Clone, Debug)]
pub struct TwistResult {
    pub descriptor: TwistDescriptor,
    pub terms: usize,
    pub lambda: DerivativeVector,
    pub l_derivatives: Vec<f64>,
    pub taylor: TaylorCoefficients,
}

/// Untwisted coefficients plus a sieve, shared by every twist of one curve.
#[derive(Clone, Debug)]
pub struct TwistEngine {
    curve: WeierstrassCurve,
    eta: i8,
    base: CoefficientTable,
    sieve: PrimeSieve,
    mode: KernelMode,
}

impl TwistEngine {
    /// Build the base table (and detect `η` when the curve does not carry it).
    pub fn new(curve: &WeierstrassCurve, n_max: usize, exec: Exec) -> Result<Self> {
        let base = coefficient_table(curve, n_max, exec)?;
        Self::from_table(curve, base)
    }

    pub fn from_table(curve: &WeierstrassCurve, base: CoefficientTable) -> Result<Self> {
        let eta = match curve.fricke_eta {
            Some(e) => e,
            None => super::series::detect_fricke_eta(curve)?,
        };
        let sieve = PrimeSieve::new(base.n_max());
        Ok(TwistEngine { curve: curve.clone(), eta, base, sieve, mode: KernelMode::Exact })
    }

    pub fn with_kernel_mode(mut self, mode: KernelMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn curve(&self) -> &WeierstrassCurve {
        &self.curve
    }

    pub fn eta(&self) -> i8 {
        self.eta
    }

    pub fn base(&self) -> &CoefficientTable {
        &self.base
    }

    pub fn descriptor(&self, d: i64) -> Result<TwistDescriptor> {
        TwistDescriptor::new(d, self.curve.conductor_q, self.eta)
    }

    /// Terms needed for order `r_max` of the twist by `d`.
    pub fn required_terms(&self, d: i64, r_max: usize) -> Result<usize> {
        Ok(truncation_length(self.descriptor(d)?.twisted_conductor, r_max))
    }

    /// `Λ^{(r)}(1)` of the twist using the first `len` coefficients.
    pub fn jet_with_len(&self, d: i64, r_max: usize, len: usize) -> Result<(TwistDescriptor, DerivativeVector)> {
        let desc = self.descriptor(d)?;
        if len > self.base.n_max() {
            return Err(Error::TableTooShort { required: len, available: self.base.n_max() });
        }
        let chi = character_values(d, len, &self.sieve);
        let terms = Terms { a: self.base.a_slice(), chi: Some(&chi), len };
        let q = q_scale(desc.twisted_conductor);
        Ok((desc, jet_core(terms, q, desc.omega, r_max, self.mode)))
    }

    pub fn jet(&self, d: i64, r_max: usize) -> Result<(TwistDescriptor, DerivativeVector)> {
        let len = self.required_terms(d, r_max)?;
        self.jet_with_len(d, r_max, len)
    }

    /// Full pipeline for one twist with `len` coefficients.
    pub fn taylor_with_len(&self, d: i64, r_max: usize, len: usize) -> Result<TwistResult> {
        let (descriptor, lambda) = self.jet_with_len(d, r_max, len)?;
        let l_derivatives = l_derivatives_from_lambda(&lambda, descriptor.twisted_conductor, r_max)?;
        let taylor = TaylorCoefficients::from_l_derivatives(&l_derivatives, DEFAULT_RANK_TOLERANCE);
        Ok(TwistResult { descriptor, terms: len, lambda, l_derivatives, taylor })
    }

    pub fn taylor(&self, d: i64, r_max: usize) -> Result<TwistResult> {
        let len = self.required_terms(d, r_max)?;
        self.taylor_with_len(d, r_max, len)
    }
}

/// `c_0..c_R` of the twist of `curve` by `d`.
pub fn taylor_coefficients(curve: &WeierstrassCurve, d: i64, r_max: usize) -> Result<TaylorCoefficients> {
    if r_max > 15 {
        return Err(Error::Domain(format!("R = {r_max} exceeds 15")));
    }
    let n = truncation_length(crate::arith::twisted_conductor(curve.conductor_q, d)?, r_max);
    let engine = TwistEngine::new(curve, n, Exec::default())?;
    Ok(engine.taylor(d, r_max)?.taylor)
}

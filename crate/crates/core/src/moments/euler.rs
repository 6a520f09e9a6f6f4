//! Euler products for `L(1, sym²f)`, `Z_{q'}(α)` and `Z*_{q'}(1/2, 1/2)`.
//!
//! Each `Z` local factor is divided by the local factors of the zeta and
//! symmetric-square functions it is known to contain, so the remaining
//! product converges absolutely.

use crate::arith::primes::{is_prime, PrimeSieve};
use crate::arith::CoefficientTable;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Terms with `i + j` above this are dropped from each local sum.
const LOCAL_DEPTH: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EulerKind {
    SymSquareL1,
    ZQprime,
    ZstarQprime,
    ZAlpha,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerProductValue {
    pub kind: EulerKind,
    pub qprime: u64,
    pub shift: (f64, f64),
    pub prime_cutoff: u64,
    pub value: f64,
    /// Largest movement of the partial product over primes in `(cutoff/4, cutoff]`.
    pub tail_estimate: f64,
}

/// Which modulus indexes the weight `∏ p/(p+1)` in the `Z` sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WeightIndex {
    /// Primes dividing `q·n₁n₂`.
    #[default]
    Level,
    /// Primes dividing `q'·n₁n₂`.
    Qprime,
}

/// `λ(p^k)` for `k ≤ depth`.
fn prime_power_lambdas(lambda_p: f64, bad: bool, depth: usize) -> Vec<f64> {
    let mut out = vec![1.0, lambda_p];
    for k in 2..=depth {
        let next = if bad { out[k - 1] * lambda_p } else { lambda_p * out[k - 1] - out[k - 2] };
        out.push(next);
    }
    out.truncate(depth + 1);
    out
}

/// `L_p(s, sym²f)`: `[(1−α²x)(1−x)(1−β²x)]^{−1}` with `x = p^{−s}` at good
/// primes, `(1 − λ(p)² x)^{−1}` at bad ones.
pub fn sym_square_local(lambda_p: f64, p: u64, s: f64, bad: bool) -> f64 {
    let x = (p as f64).powf(-s);
    if bad {
        1.0 / (1.0 - lambda_p * lambda_p * x)
    } else {
        // (1−α²x)(1−β²x) = 1 − (λ²−2)x + x²
        1.0 / ((1.0 - (lambda_p * lambda_p - 2.0) * x + x * x) * (1.0 - x))
    }
}

fn check_table(table: &CoefficientTable, cutoff: u64) -> Result<()> {
    if cutoff < 3 {
        return Err(Error::Domain(format!("prime cutoff {cutoff} too small")));
    }
    if (table.n_max() as u64) < cutoff {
        return Err(Error::TableTooShort { required: cutoff as usize, available: table.n_max() });
    }
    Ok(())
}

/// Product of `local(p)` over `p ≤ cutoff` together with the drift estimate.
fn product(cutoff: u64, local: impl Fn(u64) -> f64) -> (f64, f64) {
    let sieve = PrimeSieve::new(cutoff as usize);
    let mut log_value = 0.0;
    let mut partial = Vec::new();
    for &p in sieve.primes() {
        log_value += local(p as u64).ln();
        if 4 * p as u64 > cutoff {
            partial.push(log_value);
        }
    }
    let value = log_value.exp();
    let tail = partial.iter().map(|l| (l.exp() - value).abs()).fold(0.0, f64::max);
    (value, tail)
}

/// `L(1, sym²f)` over primes `p ≤ prime_cutoff`.
pub fn sym_square_l1(table: &CoefficientTable, q: u64, prime_cutoff: u64) -> Result<EulerProductValue> {
    check_table(table, prime_cutoff)?;
    let (value, tail_estimate) =
        product(prime_cutoff, |p| sym_square_local(table.lambda(p as usize), p, 1.0, q.is_multiple_of(p)));
    Ok(EulerProductValue {
        kind: EulerKind::SymSquareL1,
        qprime: 1,
        shift: (0.0, 0.0),
        prime_cutoff,
        value,
        tail_estimate,
    })
}

/// `L(1, sym²f)` from the residue of `Σ λ(n)² n^{−s}` at `s = 1`, using the
/// smoothed sum `(1/x) Σ λ(n)² e^{−n/x}`.
pub fn sym_square_l1_rankin_selberg(table: &CoefficientTable, q: u64, x: f64) -> Result<f64> {
    let needed = (40.0 * x).ceil() as usize;
    if table.n_max() < needed {
        return Err(Error::TableTooShort { required: needed, available: table.n_max() });
    }
    let s: f64 = (1..=needed).map(|n| table.lambda(n).powi(2) * (-(n as f64) / x).exp()).sum();
    let bad: f64 = (2..=q).filter(|&p| q.is_multiple_of(p) && is_prime(p)).map(|p| (p as f64 + 1.0) / p as f64).product();
    Ok(PI * PI / 6.0 * bad * s / x)
}

fn weight(p: u64, q: u64, qprime: u64, index: WeightIndex, nontrivial: bool) -> f64 {
    let divides = match index {
        WeightIndex::Level => q.is_multiple_of(p),
        WeightIndex::Qprime => qprime.is_multiple_of(p),
    };
    if nontrivial || divides {
        p as f64 / (p as f64 + 1.0)
    } else {
        1.0
    }
}

/// Local factor of `Z_{q'}(0, 0)` at the odd prime `p`.
fn z_local(lams: &[f64], p: u64, q: u64, qprime: u64, index: WeightIndex) -> f64 {
    let odd_exponent = qprime.is_multiple_of(p);
    let pf = p as f64;
    let mut total = 0.0;
    for i in 0..=LOCAL_DEPTH {
        for j in 0..=(LOCAL_DEPTH - i) {
            if ((i + j) % 2 == 1) != odd_exponent {
                continue;
            }
            let w = weight(p, q, qprime, index, i + j > 0);
            total += lams[i] * lams[j] * pf.powf(-((i + j) as f64) / 2.0) * w;
        }
    }
    total
}

/// `Z*_{q'}(1/2, 1/2)`: the product of `Z_p(0,0) / (ζ_p(1)·L_p(1, sym²)³)`.
pub fn zstar_halfhalf(qprime: u64, table: &CoefficientTable, q: u64, prime_cutoff: u64) -> Result<EulerProductValue> {
    zstar_halfhalf_with(qprime, table, q, prime_cutoff, WeightIndex::Level)
}

pub fn zstar_halfhalf_with(
    qprime: u64,
    table: &CoefficientTable,
    q: u64,
    prime_cutoff: u64,
    index: WeightIndex,
) -> Result<EulerProductValue> {
    check_table(table, prime_cutoff)?;
    check_qprime(qprime, q)?;
    let (value, tail_estimate) = product(prime_cutoff, |p| zstar_local(table, p, q, qprime, index));
    Ok(EulerProductValue {
        kind: EulerKind::ZstarQprime,
        qprime,
        shift: (0.5, 0.5),
        prime_cutoff,
        value,
        tail_estimate,
    })
}

/// One local factor of `Z*_{q'}(1/2, 1/2)`.
pub fn zstar_local(table: &CoefficientTable, p: u64, q: u64, qprime: u64, index: WeightIndex) -> f64 {
    let bad = q.is_multiple_of(p);
    let lp = table.lambda(p as usize);
    let z = if p == 2 { 1.0 } else { z_local(&prime_power_lambdas(lp, bad, LOCAL_DEPTH), p, q, qprime, index) };
    let zeta_p = 1.0 / (1.0 - 1.0 / p as f64);
    z / (zeta_p * sym_square_local(lp, p, 1.0, bad).powi(3))
}

fn check_qprime(qprime: u64, q: u64) -> Result<()> {
    if qprime != 1 && qprime != q {
        return Err(Error::Domain(format!("q' must be 1 or {q}, got {qprime}")));
    }
    Ok(())
}

/// `Z_{q'}(α)` with `L(1+2α, sym²f)·Z_{q'}(α) = Σ_{q'n=□, n odd} λ(n) n^{−1/2−α} ∏_{p|qn} p/(p+1)`.
pub fn z_alpha(qprime: u64, alpha: f64, table: &CoefficientTable, q: u64, prime_cutoff: u64) -> Result<EulerProductValue> {
    z_alpha_with(qprime, alpha, table, q, prime_cutoff, WeightIndex::Level)
}

pub fn z_alpha_with(
    qprime: u64,
    alpha: f64,
    table: &CoefficientTable,
    q: u64,
    prime_cutoff: u64,
    index: WeightIndex,
) -> Result<EulerProductValue> {
    check_table(table, prime_cutoff)?;
    check_qprime(qprime, q)?;
    if alpha.abs() > 0.25 - 1e-3 {
        return Err(Error::Domain(format!("|α| must be below 1/4, got {alpha}")));
    }
    let (value, tail_estimate) = product(prime_cutoff, |p| z_alpha_local(table, p, q, qprime, alpha, index));
    Ok(EulerProductValue { kind: EulerKind::ZAlpha, qprime, shift: (alpha, alpha), prime_cutoff, value, tail_estimate })
}

/// Local sum `Σ_k λ(p^k) p^{−k(1/2+α)}·w` over admissible `k`, undivided.
pub fn z_alpha_sum_local(table: &CoefficientTable, p: u64, q: u64, qprime: u64, alpha: f64, index: WeightIndex) -> f64 {
    if p == 2 {
        return 1.0;
    }
    let bad = q.is_multiple_of(p);
    let lams = prime_power_lambdas(table.lambda(p as usize), bad, LOCAL_DEPTH);
    let odd_exponent = qprime.is_multiple_of(p);
    let base = (p as f64).powf(-(0.5 + alpha));
    let mut pk = 1.0;
    let mut total = 0.0;
    for (k, l) in lams.iter().enumerate() {
        if (k % 2 == 1) == odd_exponent {
            total += l * pk * weight(p, q, qprime, index, k > 0);
        }
        pk *= base;
    }
    total
}

fn z_alpha_local(table: &CoefficientTable, p: u64, q: u64, qprime: u64, alpha: f64, index: WeightIndex) -> f64 {
    let bad = q.is_multiple_of(p);
    z_alpha_sum_local(table, p, q, qprime, alpha, index)
        / sym_square_local(table.lambda(p as usize), p, 1.0 + 2.0 * alpha, bad)
}

/// `B(a, b) = Γ(a)Γ(b)/Γ(a+b)`.
pub fn beta_function(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!("beta needs positive arguments, got ({a}, {b})")));
    }
    Ok(statrs::function::beta::beta(a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{coefficient_table, WeierstrassCurve};
    use crate::exec::Exec;
    use approx::assert_relative_eq;
    use std::sync::OnceLock;

    fn table_11a() -> &'static CoefficientTable {
        static T: OnceLock<CoefficientTable> = OnceLock::new();
        T.get_or_init(|| coefficient_table(&WeierstrassCurve::curve_11a(), 200_000, Exec::default()).unwrap())
    }

    fn degenerate(n: usize) -> CoefficientTable {
        let mut a = vec![0i64; n + 1];
        a[1] = 1;
        CoefficientTable::from_raw(a, 1).unwrap()
    }

    #[test]
    fn degenerate_satake_locals() {
        for p in [3u64, 5, 7, 101] {
            let pf = p as f64;
            let expect = 1.0 / ((1.0 - 1.0 / pf) * (1.0 + 1.0 / pf).powi(2));
            assert_relative_eq!(sym_square_local(0.0, p, 1.0, false), expect, max_relative = 1e-15);
        }
        let t = degenerate(1000);
        // Z local = 1 when only n = 1 contributes
        let p = 3.0f64;
        let expect = (1.0 - 1.0 / p) / sym_square_local(0.0, 3, 1.0, false).powi(3);
        let got = zstar_local(&t, 3, 1, 1, WeightIndex::Level);
        let z = super::z_local(&prime_power_lambdas(0.0, false, LOCAL_DEPTH), 3, 1, 1, WeightIndex::Level);
        // λ(3^k) = 0, −1, 0, 1, … contributes at even i, j
        let lam = prime_power_lambdas(0.0, false, 4);
        assert_eq!(lam, vec![1.0, 0.0, -1.0, 0.0, 1.0]);
        assert_relative_eq!(got, expect * z, max_relative = 1e-14);
    }

    #[test]
    fn degenerate_alpha_product_is_explicit() {
        let t = degenerate(2000);
        let v = z_alpha(1, 0.1, &t, 1, 1000).unwrap();
        let mut expect = 1.0;
        for p in crate::arith::PrimeSieve::new(1000).primes() {
            let p = *p as u64;
            if p == 2 {
                expect /= sym_square_local(0.0, 2, 1.2, false);
                continue;
            }
            let pf = p as f64;
            // λ(p^{2m}) = (−1)^m, weight p/(p+1) for m ≥ 1
            let x = pf.powf(-1.2);
            let sum = 1.0 + pf / (pf + 1.0) * (-x / (1.0 + x));
            expect *= sum / sym_square_local(0.0, p, 1.2, false);
        }
        assert_relative_eq!(v.value, expect, max_relative = 1e-10);
    }

    #[test]
    fn sym_square_is_stable_and_matches_rankin_selberg() {
        let t = table_11a();
        let a = sym_square_l1(t, 11, 10_000).unwrap();
        let b = sym_square_l1(t, 11, 100_000).unwrap();
        assert!(b.tail_estimate < 0.02 * b.value);
        assert!((a.value - b.value).abs() <= a.tail_estimate.max(b.tail_estimate) * 2.0 + 1e-3 * b.value);
        let rs = sym_square_l1_rankin_selberg(t, 11, 5_000.0).unwrap();
        assert!((rs - b.value).abs() < 0.02 * b.value, "{rs} vs {}", b.value);
    }

    #[test]
    fn zstar_converges() {
        let t = table_11a();
        for qp in [1, 11] {
            let a = zstar_halfhalf(qp, t, 11, 50_000).unwrap();
            let b = zstar_halfhalf(qp, t, 11, 100_000).unwrap();
            assert!((a.value - b.value).abs() < 0.01 * b.value.abs());
        }
        // the two variants differ only at p = 11
        let one = zstar_local(t, 11, 11, 1, WeightIndex::Level);
        let full = zstar_local(t, 11, 11, 11, WeightIndex::Level);
        assert!(one != full);
        for p in [3u64, 5, 13, 97] {
            assert_eq!(zstar_local(t, p, 11, 1, WeightIndex::Level), zstar_local(t, p, 11, 11, WeightIndex::Level));
        }
    }

    #[test]
    fn locals_are_second_order_small() {
        let t = table_11a();
        let mut c: f64 = 0.0;
        for p in crate::arith::PrimeSieve::new(20_000).primes().iter().map(|&p| p as u64).filter(|&p| p > 100) {
            let dev = (zstar_local(t, p, 11, 1, WeightIndex::Level) - 1.0).abs();
            c = c.max(dev * (p * p) as f64);
            let dev = (z_alpha_local(t, p, 11, 11, 0.0, WeightIndex::Level) - 1.0).abs();
            c = c.max(dev * (p * p) as f64);
        }
        assert!(c < 50.0, "fitted constant {c}");
    }

    #[test]
    fn z_alpha_is_continuous() {
        let t = table_11a();
        let a = z_alpha(11, 0.0, t, 11, 100_000).unwrap().value;
        let b = z_alpha(11, 1e-4, t, 11, 100_000).unwrap().value;
        assert!((a - b).abs() < 1e-2 * a.abs().max(1.0));
        assert!(z_alpha(1, 0.3, t, 11, 1000).is_err());
    }

    fn smoothed_direct(qprime: u64, m_scale: f64) -> f64 {
        let t = table_11a();
        let m_max = ((35.0 * m_scale) as usize).min(t.n_max());
        let sieve = crate::arith::PrimeSieve::new(m_max);
        let mut total = 0.0;
        for m in (1..=m_max).step_by(2) {
            let mut fac = sieve.factor(m);
            if qprime == 11 && m % 11 != 0 {
                fac.push((11, 0));
            }
            let mut lam = 1.0;
            let mut w = 11.0 / 12.0;
            for (p, e) in fac {
                let bad = p == 11;
                let k = 2 * e as usize + usize::from(bad && qprime == 11);
                lam *= prime_power_lambdas(t.lambda(p as usize), bad, k)[k];
                if !bad {
                    w *= p as f64 / (p as f64 + 1.0);
                }
            }
            let n_sqrt = m as f64 * (qprime as f64).sqrt();
            total += lam / n_sqrt * w * (-(m as f64) / m_scale).exp();
        }
        total
    }

    #[test]
    fn product_matches_smoothed_direct_sum() {
        let t = table_11a();
        let l1 = sym_square_l1(t, 11, 100_000).unwrap().value;
        for qp in [1u64, 11] {
            let z = z_alpha(qp, 0.0, t, 11, 100_000).unwrap().value;
            let direct = smoothed_direct(qp, 5_000.0);
            assert!((l1 * z - direct).abs() < 0.02 * direct.abs(), "q'={qp}: {} vs {direct}", l1 * z);
        }
    }

    #[test]
    fn beta_values() {
        assert_relative_eq!(beta_function(1.0, 1.0).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(beta_function(2.0, 1.0).unwrap(), 0.5, max_relative = 1e-12);
        assert_relative_eq!(beta_function(2.0, 2.0).unwrap(), 1.0 / 6.0, max_relative = 1e-12);
        assert!(beta_function(0.0, 1.0).is_err());
    }
}

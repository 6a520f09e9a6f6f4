//! The character sums `G_k(n) = ((1−i)/2 + (−1/n)(1+i)/2) Σ_{a mod n} (a/n) e(ak/n)`
//! for odd `n`.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::arith::kronecker::jacobi;
use crate::arith::primes::{factor_trial, totient};
use crate::error::{Error, Result};

/// A value of `G_k(n)`; real for every odd `n`, kept complex for the direct sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussSumValue {
    pub value: Complex64,
}

impl GaussSumValue {
    pub fn re(&self) -> f64 {
        self.value.re
    }

    pub fn im(&self) -> f64 {
        self.value.im
    }
}

fn check_odd(n: u64) -> Result<()> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::Domain(format!("modulus must be odd and positive, got {n}")));
    }
    Ok(())
}

fn prefactor(n: u64) -> Complex64 {
    let chi = jacobi(-1, n) as f64;
    Complex64::new(0.5, -0.5) + Complex64::new(0.5, 0.5) * chi
}

/// Literal evaluation of the definition, `O(n)`.
pub fn gauss_sum_direct(k: i64, n: u64) -> Result<GaussSumValue> {
    check_odd(n)?;
    if n > 1_000_000 {
        return Err(Error::Domain(format!("direct sum limited to n ≤ 10⁶, got {n}")));
    }
    let kr = k.rem_euclid(n as i64) as u64;
    let mut sum = Complex64::new(0.0, 0.0);
    for a in 0..n {
        let s = jacobi(a as i64, n);
        if s == 0 {
            continue;
        }
        let phase = 2.0 * PI * ((a * kr) % n) as f64 / n as f64;
        sum += Complex64::from_polar(s as f64, phase);
    }
    Ok(GaussSumValue { value: prefactor(n) * sum })
}

/// `G_k(p^β)` from the prime-power table (`α = v_p(k)`, infinite for `k = 0`).
fn prime_power_value(k: i64, p: u64, beta: u32) -> f64 {
    let mut alpha = 0u32;
    let mut rest = k;
    if k == 0 {
        alpha = u32::MAX;
    } else {
        while rest % p as i64 == 0 {
            rest /= p as i64;
            alpha += 1;
        }
    }
    let pb = p.pow(beta);
    if beta <= alpha {
        if beta % 2 == 1 {
            0.0
        } else {
            totient(pb) as f64
        }
    } else if beta == alpha + 1 {
        let pa = p.pow(alpha) as f64;
        if beta.is_multiple_of(2) {
            -pa
        } else {
            jacobi(rest, p) as f64 * pa * (p as f64).sqrt()
        }
    } else {
        0.0
    }
}

/// Multiplicative evaluation over the factorization of `n`.
pub fn gauss_sum_closed(k: i64, n: u64) -> Result<GaussSumValue> {
    check_odd(n)?;
    let value = factor_trial(n).into_iter().map(|(p, e)| prime_power_value(k, p, e)).product();
    Ok(GaussSumValue { value: Complex64::new(value, 0.0) })
}

//! Hecke coefficient tables `a_n`, `λ(n) = a_n/√n` and their quadratic twists.

use super::curve::{ap, WeierstrassCurve};
use super::discriminant::check_admissible;
use super::kronecker::kronecker;
use super::primes::PrimeSieve;
use crate::error::{Error, Result};
use crate::exec::Exec;

/// `a_1..a_{n_max}` together with the normalized `λ(n)`.
///
/// Index 0 is unused and holds zero so that `a[n]` reads naturally.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientTable {
    a: Vec<i64>,
    lambda: Vec<f64>,
    conductor_q: u64,
}

impl CoefficientTable {
    /// Wrap raw integer coefficients (`a[0]` ignored, `a[1]` must be 1).
    pub fn from_raw(mut a: Vec<i64>, conductor_q: u64) -> Result<Self> {
        if a.len() < 2 || a[1] != 1 {
            return Err(Error::Domain("coefficient table must start with a_1 = 1".into()));
        }
        a[0] = 0;
        let lambda = a
            .iter()
            .enumerate()
            .map(|(n, &v)| if n == 0 { 0.0 } else { v as f64 / (n as f64).sqrt() })
            .collect();
        Ok(CoefficientTable { a, lambda, conductor_q })
    }

    pub fn n_max(&self) -> usize {
        self.a.len() - 1
    }

    pub fn conductor_q(&self) -> u64 {
        self.conductor_q
    }

    #[inline]
    pub fn a(&self, n: usize) -> i64 {
        self.a[n]
    }

    #[inline]
    pub fn lambda(&self, n: usize) -> f64 {
        self.lambda[n]
    }

    /// All `a_n` with a zero at index 0.
    pub fn a_slice(&self) -> &[i64] {
        &self.a
    }

    pub fn lambda_slice(&self) -> &[f64] {
        &self.lambda
    }

    /// Prefix of length `n_max`.
    pub fn truncated(&self, n_max: usize) -> CoefficientTable {
        let n = n_max.min(self.n_max());
        CoefficientTable {
            a: self.a[..=n].to_vec(),
            lambda: self.lambda[..=n].to_vec(),
            conductor_q: self.conductor_q,
        }
    }

    /// Entrywise twist `a_n·(d/n)`; see [`twisted_coefficients`].
    pub fn twisted(&self, d: i64) -> Result<CoefficientTable> {
        twisted_coefficients(self, d)
    }
}

/// Build `a_n` for `n ≤ n_max` from the traces at primes.
pub fn coefficient_table(curve: &WeierstrassCurve, n_max: usize, exec: Exec) -> Result<CoefficientTable> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be positive".into()));
    }
    let sieve = PrimeSieve::new(n_max);
    let primes = sieve.primes().to_vec();
    let traces = exec.map(&primes, |&p| ap(curve, p as u64));
    let mut ap_of = vec![0i64; n_max + 1];
    for (&p, &t) in primes.iter().zip(&traces) {
        ap_of[p as usize] = t;
    }
    let a = assemble(&sieve, n_max, curve.conductor_q, |p| ap_of[p])?;
    CoefficientTable::from_raw(a, curve.conductor_q)
}

/// Multiplicative assembly: Hecke recursion on prime powers, products across
/// coprime parts. Bad primes (dividing `conductor_q`) use `a_{p^k} = a_p^k`.
pub(crate) fn assemble(
    sieve: &PrimeSieve,
    n_max: usize,
    conductor_q: u64,
    trace: impl Fn(usize) -> i64,
) -> Result<Vec<i64>> {
    let mut a = vec![0i64; n_max + 1];
    let mut prime_power = vec![0u32; n_max + 1];
    if n_max >= 1 {
        a[1] = 1;
    }
    for n in 2..=n_max {
        let p = sieve.spf(n);
        let m = n / p;
        prime_power[n] = if m.is_multiple_of(p) { prime_power[m] * p as u32 } else { p as u32 };
        let pk = prime_power[n] as usize;
        let value = if pk == n {
            let ap = trace(p);
            if m == 1 {
                Some(ap)
            } else if conductor_q.is_multiple_of(p as u64) {
                ap.checked_mul(a[m])
            } else {
                let prev2 = if m / p == 0 { 0 } else { a[m / p] };
                ap.checked_mul(a[m])
                    .and_then(|x| (p as i64).checked_mul(prev2).and_then(|y| x.checked_sub(y)))
            }
        } else {
            a[pk].checked_mul(a[n / pk])
        };
        a[n] = value.ok_or(Error::Overflow { n })?;
    }
    Ok(a)
}

/// Values of the Kronecker character `n ↦ (d/n)` for `n ≤ n_max`, from its
/// values at primes.
pub fn character_values(d: i64, n_max: usize, sieve: &PrimeSieve) -> Vec<i8> {
    assert!(sieve.limit() >= n_max, "sieve too short for character table");
    let mut chi = vec![0i8; n_max + 1];
    if n_max >= 1 {
        chi[1] = 1;
    }
    for n in 2..=n_max {
        let p = sieve.spf(n);
        chi[n] = if p == n { kronecker(d, n as i64) } else { chi[p] * chi[n / p] };
    }
    chi
}

/// Twist a table by the quadratic character of the fundamental discriminant
/// `d`; requires `gcd(d, q) = 1`.
pub fn twisted_coefficients(table: &CoefficientTable, d: i64) -> Result<CoefficientTable> {
    check_admissible(d, table.conductor_q)?;
    let sieve = PrimeSieve::new(table.n_max());
    let chi = character_values(d, table.n_max(), &sieve);
    let a = table.a.iter().zip(&chi).map(|(&a, &c)| a * c as i64).collect();
    CoefficientTable::from_raw(a, table.conductor_q)
}

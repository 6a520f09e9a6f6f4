//! Long Weierstrass models, point counts and Hecke eigenvalues at primes.

use super::bsgs;
use super::kronecker::jacobi;
use super::primes::reduce;
use crate::error::{Error, Result};

/// Primes at or above this bound use baby-step giant-step for `a_p`.
const BSGS_THRESHOLD: u64 = 1000;

/// Integer model `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeierstrassCurve {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
    pub conductor_q: u64,
    /// Eigenvalue of the Fricke involution, when known.
    pub fricke_eta: Option<i8>,
}

impl WeierstrassCurve {
    pub fn new(coeffs: [i64; 5], conductor_q: u64, fricke_eta: Option<i8>) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = coeffs;
        let curve = WeierstrassCurve { a1, a2, a3, a4, a6, conductor_q, fricke_eta };
        if conductor_q == 0 {
            return Err(Error::InvalidCurve("conductor must be positive".into()));
        }
        if curve.discriminant() == 0 {
            return Err(Error::InvalidCurve(format!("singular model {coeffs:?}")));
        }
        if let Some(eta) = fricke_eta {
            if eta != 1 && eta != -1 {
                return Err(Error::InvalidCurve(format!("Fricke eigenvalue must be ±1, got {eta}")));
            }
        }
        Ok(curve)
    }

    /// `y² = x³ − x`, conductor 32.
    pub fn congruent_32a() -> Self {
        Self::new([0, 0, 0, -1, 0], 32, None).expect("valid model")
    }

    /// `y² + y = x³ − x² − 10x − 20`, conductor 11.
    pub fn curve_11a() -> Self {
        Self::new([0, -1, 1, -10, -20], 11, None).expect("valid model")
    }

    pub fn coeffs(&self) -> [i64; 5] {
        [self.a1, self.a2, self.a3, self.a4, self.a6]
    }

    pub fn with_eta(mut self, eta: i8) -> Self {
        self.fricke_eta = Some(eta);
        self
    }

    /// (b2, b4, b6, b8).
    pub fn b_invariants(&self) -> (i128, i128, i128, i128) {
        let (a1, a2, a3, a4, a6) =
            (self.a1 as i128, self.a2 as i128, self.a3 as i128, self.a4 as i128, self.a6 as i128);
        let b2 = a1 * a1 + 4 * a2;
        let b4 = 2 * a4 + a1 * a3;
        let b6 = a3 * a3 + 4 * a6;
        let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
        (b2, b4, b6, b8)
    }

    pub fn discriminant(&self) -> i128 {
        let (b2, b4, b6, b8) = self.b_invariants();
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    /// (c4, c6).
    pub fn c_invariants(&self) -> (i128, i128) {
        let (b2, b4, b6, _) = self.b_invariants();
        (b2 * b2 - 24 * b4, -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6)
    }

    pub fn is_good_prime(&self, p: u64) -> bool {
        !self.conductor_q.is_multiple_of(p) && self.discriminant() % p as i128 != 0
    }
}

fn reduce128(a: i128, p: u64) -> u64 {
    a.rem_euclid(p as i128) as u64
}

/// Projective points on the reduction of `curve` modulo the prime `p`,
/// counting a singular point if there is one.
pub fn count_points_mod_p(curve: &WeierstrassCurve, p: u64) -> u64 {
    if p <= 3 {
        return count_exhaustive(curve, p);
    }
    // (2y + a1·x + a3)² = 4x³ + b2·x² + 2b4·x + b6
    let (b2, b4, b6, _) = curve.b_invariants();
    let (b2, b4, b6) = (reduce128(b2, p), reduce128(2 * b4, p), reduce128(b6, p));
    let pu = p as usize;
    let mut is_square = vec![false; pu];
    for y in 0..pu {
        is_square[(y * y) % pu] = true;
    }
    let mut count = 1u64;
    for x in 0..p {
        let g = ((((4 * x % p + b2) % p * x % p + b4) % p) * x % p + b6) % p;
        count += if g == 0 {
            1
        } else if is_square[g as usize] {
            2
        } else {
            0
        };
    }
    count
}

fn count_exhaustive(curve: &WeierstrassCurve, p: u64) -> u64 {
    let [a1, a2, a3, a4, a6] = curve.coeffs().map(|a| reduce(a, p));
    let mut count = 1u64;
    for x in 0..p {
        for y in 0..p {
            let lhs = (y * y + a1 * x * y + a3 * y) % p;
            let rhs = (x * x * x + a2 * x * x + a4 * x + a6) % p;
            if lhs == rhs {
                count += 1;
            }
        }
    }
    count
}

/// `a_p = p + 1 − #E(F_p)`.
pub fn ap(curve: &WeierstrassCurve, p: u64) -> i64 {
    if p >= BSGS_THRESHOLD && curve.is_good_prime(p) {
        let (c4, c6) = curve.c_invariants();
        let a = reduce128(-27 * c4, p);
        let b = reduce128(-54 * c6, p);
        if let Some(order) = bsgs::group_order(a, b, p) {
            return p as i64 + 1 - order as i64;
        }
    }
    p as i64 + 1 - count_points_mod_p(curve, p) as i64
}

/// Legendre symbol of `a` modulo an odd prime.
pub(crate) fn legendre(a: u64, p: u64) -> i8 {
    jacobi(a as i64, p)
}

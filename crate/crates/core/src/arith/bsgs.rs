//! Group orders of `y² = x³ + ax + b` over `F_p` by baby-step giant-step.
//!
//! Points are taken on quadratic twists `y² = x³ + ac²x + bc³` with
//! `c = x₀³ + ax₀ + b`, which carry the rational point `(c·x₀, c²)`. When `c`
//! is a square the twist is isomorphic to the curve itself, otherwise it is
//! the nontrivial twist with order `2p + 2 − #E`. Orders of such points
//! constrain `#E` inside the Hasse interval until one candidate remains.

use std::collections::HashMap;

use super::curve::legendre;
use super::primes::{factor_trial, inv_mod, isqrt, mul_mod};

type Point = Option<(u64, u64)>;

#[derive(Clone, Copy)]
struct Curve {
    a: u64,
    p: u64,
}

impl Curve {
    fn add(&self, lhs: Point, rhs: Point) -> Point {
        let p = self.p;
        let (x1, y1) = match lhs {
            None => return rhs,
            Some(v) => v,
        };
        let (x2, y2) = match rhs {
            None => return lhs,
            Some(v) => v,
        };
        let lambda = if x1 == x2 {
            if (y1 + y2) % p == 0 {
                return None;
            }
            let num = (3 * mul_mod(x1, x1, p) + self.a) % p;
            mul_mod(num, inv_mod(2 * y1 % p, p), p)
        } else {
            let num = (y2 + p - y1) % p;
            mul_mod(num, inv_mod((x2 + p - x1) % p, p), p)
        };
        let x3 = (mul_mod(lambda, lambda, p) + 2 * p - x1 - x2) % p;
        let y3 = (mul_mod(lambda, (x1 + p - x3) % p, p) + p - y1) % p;
        Some((x3, y3))
    }

    fn mul(&self, point: Point, mut k: u64) -> Point {
        let mut acc = None;
        let mut base = point;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    /// Exact order of `point`, given that the group order lies in `[lo, hi]`.
    fn order(&self, point: Point, lo: u64, hi: u64) -> Option<u64> {
        let width = hi - lo + 1;
        let m = (isqrt(width / 2) + 1).max(1);
        let mut baby: HashMap<u64, (u64, u64)> = HashMap::with_capacity(m as usize);
        let mut jp = None;
        for j in 1..=m {
            jp = self.add(jp, point);
            match jp {
                // first multiple hitting O is the order
                None => return Some(j),
                Some((x, y)) => {
                    baby.entry(x).or_insert((j, y));
                }
            }
        }
        let step = 2 * m + 1;
        let giant = self.mul(point, step);
        let mut centre = lo + m;
        let mut cp = self.mul(point, centre);
        let mut found = None;
        while centre <= hi + m {
            match cp {
                None => {
                    found = Some(centre);
                    break;
                }
                Some((x, y)) => {
                    if let Some(&(j, yj)) = baby.get(&x) {
                        let k = if y == yj { centre - j } else { centre + j };
                        if self.mul(point, k).is_none() {
                            found = Some(k);
                            break;
                        }
                    }
                }
            }
            cp = self.add(cp, giant);
            centre += step;
        }
        let mut k = found?;
        for (l, _) in factor_trial(k) {
            while k % l == 0 && self.mul(point, k / l).is_none() {
                k /= l;
            }
        }
        Some(k)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    let g = super::primes::gcd(a as i64, b as i64) as u64;
    a / g * b
}

/// `#E(F_p)` for `y² = x³ + ax + b` with `p ≥ 5` prime and nonzero discriminant.
///
/// Returns `None` if the order could not be isolated (the caller falls back
/// to direct counting).
pub fn group_order(a: u64, b: u64, p: u64) -> Option<u64> {
    let w = isqrt(4 * p);
    let (lo, hi) = (p + 1 - w, p + 1 + w);
    let (mut l_curve, mut l_twist) = (1u64, 1u64);
    for x0 in 1..p.min(400) {
        let c = (mul_mod(mul_mod(x0, x0, p), x0, p) + mul_mod(a, x0, p) + b) % p;
        if c == 0 {
            continue;
        }
        let c2 = mul_mod(c, c, p);
        let twist = Curve { a: mul_mod(a, c2, p), p };
        let point = Some((mul_mod(c, x0, p), c2));
        let ord = twist.order(point, lo, hi)?;
        if legendre(c, p) == 1 {
            l_curve = lcm(l_curve, ord);
        } else {
            l_twist = lcm(l_twist, ord);
        }
        let first = lo.div_ceil(l_curve) * l_curve;
        let mut candidates = (first..=hi)
            .step_by(l_curve as usize)
            .filter(|&n| (2 * p + 2 - n).is_multiple_of(l_twist));
        if let (Some(n), None) = (candidates.next(), candidates.next()) {
            return Some(n);
        }
    }
    None
}

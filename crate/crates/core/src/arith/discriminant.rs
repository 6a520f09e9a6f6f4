//! Fundamental discriminants and twist descriptors.

use super::kronecker::kronecker;
use super::primes::{gcd, is_squarefree, squarefree_flags};
use crate::error::{Error, Result};

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// A twist is admissible when `d` is a fundamental discriminant coprime to
/// the level.
pub fn check_admissible(d: i64, q: u64) -> Result<()> {
    if !is_fundamental_discriminant(d) {
        return Err(Error::Inadmissible { d, reason: "not a fundamental discriminant".into() });
    }
    if gcd(d, q as i64) != 1 {
        return Err(Error::Inadmissible { d, reason: format!("gcd(d, {q}) > 1") });
    }
    Ok(())
}

/// Conductor `q·d²` of the twist.
pub fn twisted_conductor(q: u64, d: i64) -> Result<u64> {
    if gcd(d, q as i64) != 1 {
        return Err(Error::Inadmissible { d, reason: format!("gcd(d, {q}) > 1") });
    }
    let d2 = (d.unsigned_abs() as u128).pow(2);
    u64::try_from(q as u128 * d2).map_err(|_| Error::Domain(format!("conductor of twist {d} overflows")))
}

/// Root number `−η·(d/−q)` of the twist by `d` of a form with Fricke
/// eigenvalue `η` and level `q`.
pub fn twist_root_number(eta: i8, d: i64, q: u64) -> i8 {
    -eta * kronecker(d, -(q as i64))
}

/// Fundamental discriminant together with the data of the twisted form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwistDescriptor {
    pub d: i64,
    pub twisted_conductor: u64,
    pub omega: i8,
    pub sign_of_d: i8,
}

impl TwistDescriptor {
    pub fn new(d: i64, q: u64, eta: i8) -> Result<Self> {
        check_admissible(d, q)?;
        Ok(TwistDescriptor {
            d,
            twisted_conductor: twisted_conductor(q, d)?,
            omega: twist_root_number(eta, d, q),
            sign_of_d: if d > 0 { 1 } else { -1 },
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SignFilter {
    Positive,
    Negative,
    #[default]
    Any,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiscriminantFilter {
    /// Keep `D` (or `d` for the `8d` family) coprime to this integer.
    pub coprime_to: u64,
    pub sign: SignFilter,
    /// Restrict to `D = 8d` with `d` odd, squarefree and positive.
    pub family_8d: bool,
    /// Whether `D = 1` may appear.
    pub include_one: bool,
}

impl Default for DiscriminantFilter {
    fn default() -> Self {
        DiscriminantFilter { coprime_to: 1, sign: SignFilter::Any, family_8d: false, include_one: false }
    }
}

/// Fundamental discriminants in `[lo, hi]` passing `filter`, ordered by `|D|`
/// (negative first on ties).
pub fn enumerate_fundamental_discriminants(lo: i64, hi: i64, filter: &DiscriminantFilter) -> Vec<i64> {
    if lo > hi {
        return Vec::new();
    }
    let bound = lo.unsigned_abs().max(hi.unsigned_abs()) as usize;
    let sf = squarefree_flags(bound);
    let squarefree = |m: i64| sf[m.unsigned_abs() as usize];
    let coprime = |m: i64| gcd(m, filter.coprime_to as i64) == 1;
    let mut out = Vec::new();
    for abs in 1..=bound as i64 {
        for d in [-abs, abs] {
            if d < lo || d > hi {
                continue;
            }
            match filter.sign {
                SignFilter::Positive if d < 0 => continue,
                SignFilter::Negative if d > 0 => continue,
                _ => {}
            }
            if d == 1 && !filter.include_one {
                continue;
            }
            let keep = if filter.family_8d {
                d > 0 && d % 8 == 0 && {
                    let m = d / 8;
                    m % 2 == 1 && squarefree(m) && coprime(m)
                }
            } else {
                let fundamental = match d.rem_euclid(4) {
                    1 => squarefree(d),
                    0 => matches!((d / 4).rem_euclid(4), 2 | 3) && squarefree(d / 4),
                    _ => false,
                };
                fundamental && coprime(d)
            };
            if keep {
                out.push(d);
            }
        }
    }
    out
}

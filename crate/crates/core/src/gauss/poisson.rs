//! Twisted Poisson summation for odd moduli, checked numerically with a
//! Gaussian test function.

use super::sums::gauss_sum_closed;
use crate::arith::kronecker::{jacobi, kronecker};
use crate::error::{Error, Result};
use crate::special::integrate;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoissonVariant {
    /// Sum over all integers `d`.
    AllD,
    /// Sum over odd `d`.
    OddD,
}

/// `F̌(y) = ∫ (cos 2πxy + sin 2πxy) F(x) dx` over `[a, b]`, outside of which
/// `F` is negligible.
pub fn fourier_cos_sin_transform(f: impl Fn(f64) -> f64, y: f64, a: f64, b: f64) -> f64 {
    let w = 2.0 * PI * y;
    integrate(|x| ((w * x).cos() + (w * x).sin()) * f(x), a, b, 1e-13)
}

fn gaussian(x: f64) -> f64 {
    (-PI * x * x).exp()
}

/// Range where `e^{−πt²}` exceeds `10⁻¹⁸`.
const GAUSS_REACH: f64 = 3.65;

/// `|LHS − RHS|` of the identity for `F(x) = e^{−πx²}` (self-dual, `F̌ = F`).
pub fn poisson_check(n: u64, z: f64, variant: PoissonVariant) -> Result<f64> {
    if n.is_multiple_of(2) || n > 999 {
        return Err(Error::Domain(format!("modulus must be odd and at most 999, got {n}")));
    }
    if !(z > 0.0) {
        return Err(Error::Domain(format!("Z must be positive, got {z}")));
    }
    let dmax = (GAUSS_REACH * z).ceil() as i64 + 1;
    let lhs: f64 = (-dmax..=dmax)
        .filter(|d| variant == PoissonVariant::AllD || d.rem_euclid(2) == 1)
        .map(|d| jacobi(d, n) as f64 * gaussian(d as f64 / z))
        .sum();
    let nf = n as f64;
    let rhs = match variant {
        PoissonVariant::AllD => {
            let kmax = (GAUSS_REACH * nf / z).ceil() as i64 + 1;
            let s: f64 = (-kmax..=kmax)
                .map(|k| Ok(gauss_sum_closed(k, n)?.re() * gaussian(k as f64 * z / nf)))
                .sum::<Result<f64>>()?;
            z / nf * s
        }
        PoissonVariant::OddD => {
            let kmax = (GAUSS_REACH * 2.0 * nf / z).ceil() as i64 + 1;
            let s: f64 = (-kmax..=kmax)
                .map(|k| {
                    let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                    Ok(sign * gauss_sum_closed(k, n)?.re() * gaussian(k as f64 * z / (2.0 * nf)))
                })
                .sum::<Result<f64>>()?;
            z / (2.0 * nf) * kronecker(2, n as i64) as f64 * s
        }
    };
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::bump::bump_j;

    #[test]
    fn transform_of_gaussian() {
        assert!((fourier_cos_sin_transform(gaussian, 0.0, -8.0, 8.0) - 1.0).abs() < 1e-12);
        for y in [0.3, 1.1, 2.0] {
            assert!((fourier_cos_sin_transform(gaussian, y, -8.0, 8.0) - gaussian(y)).abs() < 1e-12);
        }
        let area = integrate(bump_j, 0.5, 2.0, 1e-14);
        assert!((fourier_cos_sin_transform(bump_j, 0.0, 0.5, 2.0) - area).abs() < 1e-12);
    }

    #[test]
    fn documented_residuals() {
        assert!(poisson_check(1, 3.7, PoissonVariant::AllD).unwrap() < 1e-10);
        assert!(poisson_check(15, 10.0, PoissonVariant::AllD).unwrap() < 1e-8);
        assert!(poisson_check(99, 1.0, PoissonVariant::OddD).unwrap() < 1e-8);
        assert!(poisson_check(4, 1.0, PoissonVariant::AllD).is_err());
    }
}

//! Mellin kernels `∫₁^∞ w(log t) e^{−xt} dt`.
//!
//! `G_r(x)` takes `w(u) = u^r` and `K_σ(x)` takes `w(u) = e^{σu}`. Both are
//! evaluated from one node set per `x`: for `x ≥ 1` the substitution
//! `t = 1 + v/x`, for `x < 1` a split at `t = 1/x` with `t = e^u` below and
//! `t = (1+v)/x` above. The `v` ranges use graded panels `[0,1], [1,3],
//! [3,7], …` with a 20-point Gauss–Legendre rule on each.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::special::{e1, gauss_legendre};

const ORDER: usize = 20;

fn gl20() -> &'static (Vec<f64>, Vec<f64>) {
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL.get_or_init(|| gauss_legendre(ORDER))
}

/// Nodes `u_i = log t_i` and weights with `∫₁^∞ w(log t) e^{−xt} dt ≈ Σ w_i·w(u_i)`.
#[derive(Clone, Debug)]
pub struct KernelRule {
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

impl KernelRule {
    /// Rule for `x > 0` whose `v` integrals stop at `cutoff` (`e^{−cutoff}` is
    /// the neglected relative mass before the polynomial factor).
    pub fn new(x: f64, cutoff: f64) -> Self {
        let (gx, gw) = gl20();
        let mut u = Vec::with_capacity(12 * ORDER);
        let mut w = Vec::with_capacity(12 * ORDER);
        let graded = |map: &dyn Fn(f64) -> f64, scale: f64, u: &mut Vec<f64>, w: &mut Vec<f64>| {
            let (mut lo, mut width) = (0.0f64, 1.0f64);
            while lo < cutoff {
                let hi = (lo + width).min(cutoff);
                let half = 0.5 * (hi - lo);
                for (z, wz) in gx.iter().zip(gw) {
                    let v = lo + half * (z + 1.0);
                    u.push(map(v));
                    w.push(scale * half * wz * (-v).exp());
                }
                lo = hi;
                width *= 2.0;
            }
        };
        if x >= 1.0 {
            graded(&|v| (v / x).ln_1p(), (-x).exp() / x, &mut u, &mut w);
        } else {
            // 1 ≤ t ≤ 1/x, t = e^u: integrand w(u)·e^{u − x e^u}
            let top = -x.ln();
            let panels = top.ceil().max(1.0) as usize;
            let h = top / panels as f64;
            for k in 0..panels {
                let lo = k as f64 * h;
                for (z, wz) in gx.iter().zip(gw) {
                    let uu = lo + 0.5 * h * (z + 1.0);
                    u.push(uu);
                    w.push(0.5 * h * wz * (uu - x * uu.exp()).exp());
                }
            }
            // t ≥ 1/x, t = (1+v)/x
            graded(&|v| v.ln_1p() + top, (-1.0f64).exp() / x, &mut u, &mut w);
        }
        KernelRule { u, w }
    }

    /// `G_r(x)` for `r = 0..=r_max`.
    pub fn powers(&self, r_max: usize) -> Vec<f64> {
        let mut out = vec![0.0; r_max + 1];
        for (&u, &w) in self.u.iter().zip(&self.w) {
            let mut p = w;
            for o in out.iter_mut() {
                *o += p;
                p *= u;
            }
        }
        out
    }

    /// `K_σ(x) = ∫₁^∞ t^σ e^{−xt} dt`.
    pub fn power_kernel(&self, sigma: f64) -> f64 {
        self.u.iter().zip(&self.w).map(|(u, w)| w * (sigma * u).exp()).sum()
    }
}

/// Panel cutoff for derivative order `r`.
pub fn cutoff_for(r: usize) -> f64 {
    40.0 + 10.0 * r as f64
}

/// `G_r(x) = ∫₁^∞ (log t)^r e^{−xt} dt`.
pub fn g_r_weight(r: usize, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("G_r needs x > 0, got {x}")));
    }
    Ok(match r {
        0 => (-x).exp() / x,
        1 => e1(x) / x,
        _ => KernelRule::new(x, cutoff_for(r)).powers(r)[r],
    })
}

/// `G_0..G_{r_max}` at `x`: closed forms when `r_max ≤ 1`, otherwise one
/// shared quadrature rule.
pub fn g_all(r_max: usize, x: f64) -> Vec<f64> {
    match r_max {
        0 => vec![(-x).exp() / x],
        1 => vec![(-x).exp() / x, e1(x) / x],
        _ => KernelRule::new(x, cutoff_for(r_max)).powers(r_max),
    }
}

/// Values of `h(x) = F(x)·x·e^x` on a uniform grid in `log x`, read back by
/// four-point Lagrange interpolation.
#[derive(Clone, Debug)]
pub struct KernelGrid {
    log_lo: f64,
    step: f64,
    h: Vec<f64>,
}

pub const GRID_X_MIN: f64 = 1e-7;
pub const GRID_X_MAX: f64 = 120.0;
const GRID_STEP: f64 = 0.004;

impl KernelGrid {
    pub fn build(f: impl Fn(f64) -> f64) -> Self {
        let log_lo = GRID_X_MIN.ln() - 2.0 * GRID_STEP;
        let n = ((GRID_X_MAX.ln() - log_lo) / GRID_STEP).ceil() as usize + 4;
        let h = (0..n)
            .map(|i| {
                let x = (log_lo + i as f64 * GRID_STEP).exp();
                f(x) * x * x.exp()
            })
            .collect();
        KernelGrid { log_lo, step: GRID_STEP, h }
    }

    /// `F(x)` for `x` in `[GRID_X_MIN, GRID_X_MAX]`; `None` outside.
    #[inline]
    pub fn eval(&self, x: f64) -> Option<f64> {
        if !(GRID_X_MIN..=GRID_X_MAX).contains(&x) {
            return None;
        }
        let s = (x.ln() - self.log_lo) / self.step;
        let i = (s.floor() as usize).clamp(1, self.h.len() - 3);
        let t = s - i as f64;
        let (a, b, c, d) = (self.h[i - 1], self.h[i], self.h[i + 1], self.h[i + 2]);
        let tm1 = t - 1.0;
        let tm2 = t - 2.0;
        let tp1 = t + 1.0;
        let h = -a * t * tm1 * tm2 / 6.0 + b * tp1 * tm1 * tm2 / 2.0 - c * tp1 * t * tm2 / 2.0 + d * tp1 * t * tm1 / 6.0;
        Some(h * (-x).exp() / x)
    }
}

/// Shared grids: `G_1`, `G_2`, `K_{0.3}`, `K_{−0.3}`.
pub struct KernelGrids {
    pub g: [KernelGrid; 2],
    pub k_pos: KernelGrid,
    pub k_neg: KernelGrid,
}

pub const FE_SIGMA: f64 = 0.3;

pub fn grids() -> &'static KernelGrids {
    static GRIDS: OnceLock<KernelGrids> = OnceLock::new();
    GRIDS.get_or_init(|| KernelGrids {
        g: [
            KernelGrid::build(|x| e1(x) / x),
            KernelGrid::build(|x| KernelRule::new(x, cutoff_for(2)).powers(2)[2]),
        ],
        k_pos: KernelGrid::build(|x| KernelRule::new(x, 60.0).power_kernel(FE_SIGMA)),
        k_neg: KernelGrid::build(|x| KernelRule::new(x, 60.0).power_kernel(-FE_SIGMA)),
    })
}

/// `G_r(x)` for `r ≤ 2` from the grids, falling back to direct evaluation
/// outside the tabulated range.
#[inline]
pub fn g_fast(r: usize, x: f64) -> f64 {
    match r {
        0 => (-x).exp() / x,
        1 | 2 => grids().g[r - 1].eval(x).unwrap_or_else(|| g_r_weight(r, x).unwrap_or(0.0)),
        _ => g_r_weight(r, x).unwrap_or(0.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::integrate;
    use approx::assert_relative_eq;

    /// `G_r` by brute force in the variable `t` on `[1, 1 + span/x]`.
    fn brute(r: i32, x: f64) -> f64 {
        let span = (60.0 + 12.0 * r as f64) / x;
        let mut total = 0.0;
        let mut lo = 1.0;
        let mut width = 1.0 / x;
        while lo < 1.0 + span {
            let hi = lo + width;
            total += integrate(|t: f64| t.ln().powi(r) * (-x * t).exp(), lo, hi, 1e-14);
            lo = hi;
            width *= 1.5;
        }
        total
    }

    #[test]
    fn closed_forms() {
        assert_relative_eq!(g_r_weight(0, 1.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(g_r_weight(1, 1.0).unwrap(), 0.219_383_934_395_520_3, max_relative = 1e-13);
        assert!(g_r_weight(2, 0.0).is_err());
        assert!(g_r_weight(0, -1.0).is_err());
    }

    #[test]
    fn quadrature_agrees_with_brute_force() {
        for &x in &[1e-3, 0.05, 0.4, 0.99, 1.0, 2.5, 10.0, 40.0] {
            let rule = KernelRule::new(x, cutoff_for(11));
            let g = rule.powers(11);
            assert_relative_eq!(g[0], (-x).exp() / x, max_relative = 1e-12);
            assert_relative_eq!(g[1], e1(x) / x, max_relative = 1e-12);
            for r in [2, 3, 7, 11] {
                assert_relative_eq!(g[r], brute(r as i32, x), max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn power_kernel_matches_incomplete_gamma() {
        use statrs::function::gamma::{gamma, gamma_ur};
        for &x in &[1e-4, 0.3, 1.0, 7.0, 30.0] {
            let rule = KernelRule::new(x, 60.0);
            for sigma in [0.3, -0.3] {
                let a = sigma + 1.0;
                let expect = gamma_ur(a, x) * gamma(a) * x.powf(-a);
                assert_relative_eq!(rule.power_kernel(sigma), expect, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn grids_interpolate_within_budget() {
        let g = grids();
        let mut x = 1.3e-7;
        while x < 110.0 {
            assert_relative_eq!(g.g[0].eval(x).unwrap(), e1(x) / x, max_relative = 1e-9);
            let exact2 = KernelRule::new(x, cutoff_for(2)).powers(2)[2];
            assert_relative_eq!(g.g[1].eval(x).unwrap(), exact2, max_relative = 1e-9);
            x *= 1.0173;
        }
        assert!(g.g[0].eval(1e-9).is_none());
        assert_relative_eq!(g_fast(1, 1e-9), e1(1e-9) / 1e-9, max_relative = 1e-12);
    }
}

//! Smooth compactly supported test functions.
//!
//! `J(x) = exp(−1/((x−1/2)(2−x)))` on `(1/2, 2)`. `G` rises on `[3/4, 1]`
//! through the smoothstep `S(t) = ψ(t)/(ψ(t)+ψ(1−t))`, `ψ(t) = e^{−1/t}`,
//! equals 1 on `[1, 3/2]` and is `1 − G(x/2)` on `[3/2, 2]`.

use crate::special::integrate;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BumpKind {
    JBump,
    GPartition,
    VWindow,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumpFunction {
    pub kind: BumpKind,
    pub support: (f64, f64),
    /// Constant multiple applied to the base shape.
    pub scale: f64,
}

impl BumpFunction {
    pub fn j() -> Self {
        BumpFunction { kind: BumpKind::JBump, support: (0.5, 2.0), scale: 1.0 }
    }

    pub fn g() -> Self {
        BumpFunction { kind: BumpKind::GPartition, support: (0.75, 2.0), scale: 1.0 }
    }

    pub fn v() -> Self {
        BumpFunction { kind: BumpKind::VWindow, support: (0.375, 4.0), scale: 1.0 }
    }

    pub fn scaled(mut self, kappa: f64) -> Self {
        self.scale *= kappa;
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.scale
            * match self.kind {
                BumpKind::JBump => bump_j(x),
                BumpKind::GPartition => partition_g(x),
                BumpKind::VWindow => window_v(x),
            }
    }

    /// `∫₀^∞ f(x) x^{w−1} dx`.
    pub fn mellin(&self, w: f64) -> f64 {
        let (a, b) = self.support;
        integrate(|x| self.eval(x) * x.powf(w - 1.0), a, b, 1e-14)
    }
}

pub fn bump_j(x: f64) -> f64 {
    if x <= 0.5 || x >= 2.0 {
        0.0
    } else {
        (-1.0 / ((x - 0.5) * (2.0 - x))).exp()
    }
}

/// `J̃(w) = ∫ J(x) x^{w−1} dx`.
pub fn mellin_j(w: f64) -> f64 {
    integrate(|x| bump_j(x) * x.powf(w - 1.0), 0.5, 2.0, 1e-14)
}

fn psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = psi(t);
        a / (a + psi(1.0 - t))
    }
}

pub fn partition_g(x: f64) -> f64 {
    if x <= 0.75 || x >= 2.0 {
        0.0
    } else if x < 1.0 {
        smoothstep(4.0 * (x - 0.75))
    } else if x <= 1.5 {
        1.0
    } else {
        1.0 - smoothstep(4.0 * (x / 2.0 - 0.75))
    }
}

pub fn window_v(x: f64) -> f64 {
    partition_g(2.0 * x) + partition_g(x) + partition_g(x / 2.0)
}

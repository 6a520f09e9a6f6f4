//! Sign predictions for `c_m` and positivity of central derivatives.

use std::f64::consts::PI;

use super::series::DerivativeVector;
use super::taylor::{TwistEngine, TwistResult};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::special::EULER_GAMMA;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Threshold {
    pub value: f64,
    /// The exponent left the double range and `value` is `+∞`.
    pub overflow: bool,
}

/// `(2π/√q)·exp(h³ e^{γ+1})`; `+∞` (flagged) for `h ≥ 2`.
pub fn sign_threshold(h: u32, q: f64) -> Result<Threshold> {
    if h == 0 {
        return Err(Error::Domain("h must be at least 1".into()));
    }
    if !(q > 0.0) {
        return Err(Error::Domain(format!("q must be positive, got {q}")));
    }
    if h >= 2 {
        return Ok(Threshold { value: f64::INFINITY, overflow: true });
    }
    let value = 2.0 * PI / q.sqrt() * (EULER_GAMMA + 1.0).exp().exp();
    Ok(Threshold { value, overflow: false })
}

/// `ω·(−1)^m`.
pub fn predicted_sign(m: usize, omega: i8) -> i8 {
    if m.is_multiple_of(2) {
        omega
    } else {
        -omega
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositivityEntry {
    pub order: usize,
    pub value: f64,
    pub nonnegative: bool,
    pub strictly_positive: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuperpositivityReport {
    pub scale: f64,
    pub entries: Vec<PositivityEntry>,
}

impl SuperpositivityReport {
    pub fn all_nonnegative(&self) -> bool {
        self.entries.iter().all(|e| e.nonnegative)
    }

    pub fn all_strict(&self) -> bool {
        self.entries.iter().all(|e| e.strictly_positive)
    }
}

/// Checks `Λ^{(r_d + 2j)}(1) ≥ 0` for `j ≤ j_max` within `10⁻¹⁰·scale`,
/// where `scale = max(1, max|Λ^{(r)}(1)|)`.
pub fn superpositivity_check(vec: &DerivativeVector, r_d: usize, j_max: usize) -> SuperpositivityReport {
    let scale = vec.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-10 * scale;
    let entries = (0..=j_max)
        .map(|j| r_d + 2 * j)
        .take_while(|&r| r <= vec.r_max)
        .map(|order| {
            let value = vec.values[order];
            PositivityEntry { order, value, nonnegative: value > -tol, strictly_positive: value > tol }
        })
        .collect();
    SuperpositivityReport { scale, entries }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Zone {
    /// `|d|` at or above the threshold: the sign rule is asserted.
    Assertion,
    /// Below the threshold: deviations are reported only.
    Report,
}

#[derive(Clone, Debug)]
pub struct SurveyRow {
    pub result: TwistResult,
    pub zone: Zone,
    /// Orders `m` in `[r_d, h]` where `c_m` vanishes or has the wrong sign.
    pub violations: Vec<usize>,
    /// Every `c_0..c_h` is nonzero.
    pub all_nonvanishing: bool,
}

#[derive(Clone, Debug)]
pub struct SignSurvey {
    pub h: u32,
    pub threshold: Threshold,
    pub rows: Vec<SurveyRow>,
}

impl SignSurvey {
    /// `(d, m)` pairs violating the rule in the assertion zone.
    pub fn assertion_violations(&self) -> Vec<(i64, usize)> {
        self.rows
            .iter()
            .filter(|r| r.zone == Zone::Assertion)
            .flat_map(|r| r.violations.iter().map(move |&m| (r.result.descriptor.d, m)))
            .collect()
    }
}

/// Compute `c_0..c_h` for every `d` (in the given order) and classify the
/// sign rule against `ω(−1)^m`.
pub fn sign_survey(engine: &TwistEngine, ds: &[i64], h: u32, nonzero_tol: f64, exec: Exec) -> Result<SignSurvey> {
    let threshold = sign_threshold(h, engine.curve().conductor_q as f64)?;
    let r_max = h as usize;
    let results = exec.try_map(ds, |&d| engine.taylor(d, r_max))?;
    let rows = results
        .into_iter()
        .map(|result| {
            let c = &result.taylor.c;
            let omega = result.descriptor.omega;
            let violations = (result.taylor.analytic_rank..=r_max)
                .filter(|&m| {
                    let expect = predicted_sign(m, omega) as f64;
                    !(c[m].abs() > nonzero_tol && c[m].signum() == expect)
                })
                .collect();
            let zone = if (result.descriptor.d.unsigned_abs() as f64) >= threshold.value {
                Zone::Assertion
            } else {
                Zone::Report
            };
            let all_nonvanishing = c.iter().all(|v| v.abs() > nonzero_tol);
            SurveyRow { result, zone, violations, all_nonvanishing }
        })
        .collect();
    Ok(SignSurvey { h, threshold, rows })
}

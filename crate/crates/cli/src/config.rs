//! Flat `key = value` job files.
//!
//! Blank lines and lines starting with `#` are skipped. Every key is checked
//! against the schema before anything runs, and errors name the key.

use qtwist::arith::WeierstrassCurve;
use qtwist::moments::{FamilyKind, WeightIndex};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
#[error("config key `{key}`: {message}")]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

fn bad(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError { key: key.to_string(), message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Task {
    Taylor,
    SignSurvey,
    Moments,
    Nonvanish,
    Selftest,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Taylor => "taylor",
            Task::SignSurvey => "sign-survey",
            Task::Moments => "moments",
            Task::Nonvanish => "nonvanish",
            Task::Selftest => "selftest",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Discriminants {
    List(Vec<i64>),
    Range(i64, i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentChoice {
    First(usize),
    Second(usize, usize),
}

/// Schema: key, tasks that accept it (empty means every task).
const SCHEMA: &[(&str, &[Task])] = &[
    ("task", &[]),
    ("curve", &[]),
    ("a1", &[]),
    ("a2", &[]),
    ("a3", &[]),
    ("a4", &[]),
    ("a6", &[]),
    ("conductor", &[]),
    ("eta", &[]),
    ("d", &[Task::Taylor]),
    ("d_min", &[Task::Taylor, Task::SignSurvey]),
    ("d_max", &[Task::Taylor, Task::SignSurvey]),
    ("coprime_to", &[Task::Taylor, Task::SignSurvey]),
    ("order", &[Task::Taylor]),
    ("h", &[Task::SignSurvey]),
    ("nonzero_tol", &[Task::SignSurvey, Task::Nonvanish]),
    ("moment", &[Task::Moments]),
    ("i", &[Task::Moments, Task::Nonvanish]),
    ("l1", &[Task::Moments]),
    ("l2", &[Task::Moments]),
    ("x_values", &[Task::Moments]),
    ("x", &[Task::Nonvanish]),
    ("family", &[Task::Moments, Task::Nonvanish]),
    ("joint", &[Task::Nonvanish]),
    ("prime_cutoff", &[Task::Moments]),
    ("weight_index", &[Task::Moments]),
    ("checkpoint", &[Task::Moments]),
    ("out", &[]),
    ("workers", &[]),
    ("cache_dir", &[]),
    ("format", &[]),
];

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub task: Task,
    pub curve: WeierstrassCurve,
    pub discriminants: Option<Discriminants>,
    pub coprime_to: Option<u64>,
    pub order: usize,
    pub h: u32,
    pub nonzero_tol: f64,
    pub moment: MomentChoice,
    /// Derivative order counted by `nonvanish`.
    pub i: usize,
    pub x_values: Vec<f64>,
    pub family: FamilyKind,
    pub joint: Option<(usize, usize)>,
    pub prime_cutoff: u64,
    pub weight_index: WeightIndex,
    pub checkpoint: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub format: Format,
    /// Every key as read, for the manifest.
    pub echo: BTreeMap<String, String>,
}

pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| bad(line, format!("line {} is not `key = value`", lineno + 1)))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if map.insert(k.clone(), v).is_some() {
            return Err(bad(&k, "given more than once"));
        }
    }
    Ok(map)
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| bad(key, format!("cannot parse {v:?}")))
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, ConfigError> {
    v.split(',').map(|s| num(key, s.trim())).collect()
}

/// Parse `x` as a plain or scientific number that must be a positive finite real.
fn positive(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = num(key, v)?;
    if !(x.is_finite() && x > 0.0) {
        return Err(bad(key, "must be a positive number"));
    }
    Ok(x)
}

impl JobConfig {
    pub fn from_map(task: Task, map: BTreeMap<String, String>) -> Result<Self, ConfigError> {
        for key in map.keys() {
            match SCHEMA.iter().find(|(k, _)| k == key) {
                None => return Err(bad(key, "unknown key")),
                Some((_, tasks)) if !tasks.is_empty() && !tasks.contains(&task) => {
                    return Err(bad(key, format!("not used by `{}`", task.name())));
                }
                _ => {}
            }
        }
        if let Some(t) = map.get("task") {
            if t != task.name() {
                return Err(bad("task", format!("file is for `{t}`, subcommand is `{}`", task.name())));
            }
        }
        let get = |k: &str| map.get(k).map(String::as_str);

        let curve = parse_curve(task, &map)?;
        let discriminants = match (get("d"), get("d_min"), get("d_max")) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(bad("d", "give either `d` or `d_min`/`d_max`, not both"));
            }
            (Some(v), None, None) => Some(Discriminants::List(list("d", v)?)),
            (None, Some(lo), Some(hi)) => {
                let (lo, hi) = (num("d_min", lo)?, num("d_max", hi)?);
                if lo > hi {
                    return Err(bad("d_min", "exceeds d_max"));
                }
                Some(Discriminants::Range(lo, hi))
            }
            (None, Some(_), None) => return Err(bad("d_max", "missing")),
            (None, None, Some(_)) => return Err(bad("d_min", "missing")),
            (None, None, None) => None,
        };
        if matches!(task, Task::Taylor | Task::SignSurvey) && discriminants.is_none() {
            let key = if task == Task::Taylor { "d" } else { "d_min" };
            return Err(bad(key, "missing"));
        }
        if let Some(Discriminants::List(ds)) = &discriminants {
            if ds.is_empty() || ds.contains(&0) {
                return Err(bad("d", "needs nonzero discriminants"));
            }
        }
        let coprime_to = get("coprime_to").map(|v| num::<u64>("coprime_to", v)).transpose()?;
        if coprime_to == Some(0) {
            return Err(bad("coprime_to", "must be positive"));
        }

        let order = get("order").map(|v| num("order", v)).transpose()?.unwrap_or(11);
        if order > 15 {
            return Err(bad("order", "at most 15"));
        }
        let h = get("h").map(|v| num("h", v)).transpose()?.unwrap_or(1u32);
        if h == 0 || h > 15 {
            return Err(bad("h", "must be in 1..=15"));
        }
        let nonzero_tol = get("nonzero_tol").map(|v| positive("nonzero_tol", v)).transpose()?.unwrap_or(1e-6);

        let i = get("i").map(|v| num::<usize>("i", v)).transpose()?;
        let l1 = get("l1").map(|v| num::<usize>("l1", v)).transpose()?;
        let l2 = get("l2").map(|v| num::<usize>("l2", v)).transpose()?;
        let moment = match get("moment").unwrap_or("second") {
            "first" => {
                if l1.is_some() || l2.is_some() {
                    return Err(bad("l1", "first moments take `i`"));
                }
                MomentChoice::First(i.unwrap_or(0))
            }
            "second" => {
                if task == Task::Moments && i.is_some() {
                    return Err(bad("i", "second moments take `l1` and `l2`"));
                }
                MomentChoice::Second(l1.unwrap_or(0), l2.unwrap_or(0))
            }
            other => return Err(bad("moment", format!("expected first or second, got {other:?}"))),
        };
        let top = match moment {
            MomentChoice::First(i) => i,
            MomentChoice::Second(a, b) => a.max(b),
        };
        if top > 2 {
            return Err(bad(if matches!(moment, MomentChoice::First(_)) { "i" } else { "l1" }, "family orders are capped at 2"));
        }
        if task == Task::Nonvanish && i.unwrap_or(0) > 2 {
            return Err(bad("i", "family orders are capped at 2"));
        }

        let x_values = match get("x_values") {
            Some(v) => {
                let xs = list::<f64>("x_values", v)?;
                if xs.is_empty() || xs.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                    return Err(bad("x_values", "needs positive numbers"));
                }
                xs
            }
            None if task == Task::Moments => return Err(bad("x_values", "missing")),
            None => match get("x") {
                Some(v) => vec![positive("x", v)?],
                None if task == Task::Nonvanish => return Err(bad("x", "missing")),
                None => Vec::new(),
            },
        };
        let family = match get("family") {
            None => {
                if task == Task::Nonvanish {
                    FamilyKind::AllFundamental
                } else {
                    FamilyKind::EightD
                }
            }
            Some("eight_d") => FamilyKind::EightD,
            Some("all_fundamental") => FamilyKind::AllFundamental,
            Some(other) => return Err(bad("family", format!("expected eight_d or all_fundamental, got {other:?}"))),
        };
        let joint = match get("joint") {
            None => None,
            Some(v) => match list::<usize>("joint", v)?.as_slice() {
                &[a, b] if a.max(b) <= 2 => Some((a, b)),
                _ => return Err(bad("joint", "expected two orders `i,j` at most 2")),
            },
        };
        let prime_cutoff = get("prime_cutoff").map(|v| num("prime_cutoff", v)).transpose()?.unwrap_or(100_000u64);
        if prime_cutoff < 100 {
            return Err(bad("prime_cutoff", "must be at least 100"));
        }
        let weight_index = match get("weight_index") {
            None | Some("level") => WeightIndex::Level,
            Some("qprime") => WeightIndex::Qprime,
            Some(other) => return Err(bad("weight_index", format!("expected level or qprime, got {other:?}"))),
        };
        let format = match get("format") {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return Err(bad("format", format!("expected csv or json, got {other:?}"))),
        };
        let workers = get("workers").map(|v| num("workers", v)).transpose()?;

        Ok(JobConfig {
            task,
            curve,
            discriminants,
            coprime_to,
            order,
            h,
            nonzero_tol,
            moment,
            i: i.unwrap_or(0),
            x_values,
            family,
            joint,
            prime_cutoff,
            weight_index,
            checkpoint: get("checkpoint").map(PathBuf::from),
            out: get("out").map(PathBuf::from),
            workers,
            cache_dir: get("cache_dir").map(PathBuf::from),
            format,
            echo: map,
        })
    }
}

fn parse_curve(task: Task, map: &BTreeMap<String, String>) -> Result<WeierstrassCurve, ConfigError> {
    let coeff_keys = ["a1", "a2", "a3", "a4", "a6", "conductor"];
    let explicit = coeff_keys.iter().any(|k| map.contains_key(*k));
    let eta = match map.get("eta").map(String::as_str) {
        None => None,
        Some("1") | Some("+1") => Some(1i8),
        Some("-1") => Some(-1i8),
        Some(other) => return Err(bad("eta", format!("must be +1 or -1, got {other:?}"))),
    };
    let curve = match (map.get("curve").map(String::as_str), explicit) {
        (Some(_), true) => return Err(bad("curve", "give a label or coefficients, not both")),
        (Some("32a"), false) => WeierstrassCurve::congruent_32a(),
        (Some("11a"), false) => WeierstrassCurve::curve_11a(),
        (Some(other), false) => return Err(bad("curve", format!("unknown label {other:?}; use 32a, 11a or coefficients"))),
        (None, true) => {
            let mut c = [0i64; 5];
            for (slot, k) in c.iter_mut().zip(["a1", "a2", "a3", "a4", "a6"]) {
                if let Some(v) = map.get(k) {
                    *slot = num(k, v)?;
                }
            }
            let q: u64 = num("conductor", map.get("conductor").ok_or_else(|| bad("conductor", "missing"))?)?;
            if q == 0 {
                return Err(bad("conductor", "must be positive"));
            }
            WeierstrassCurve::new(c, q, None).map_err(|e| bad("a1", e.to_string()))?
        }
        (None, false) if task == Task::Selftest => WeierstrassCurve::congruent_32a(),
        (None, false) => return Err(bad("curve", "missing")),
    };
    Ok(match eta {
        Some(e) => curve.with_eta(e),
        None => curve,
    })
}

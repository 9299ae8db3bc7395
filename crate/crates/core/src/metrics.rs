//! Error measures.
//!
//! Two residual families are kept apart here:
//! * equation residuals `x⁽⁰⁾(k) + a·z⁽¹⁾(k) − b·z⁽¹⁾(k)^α` over k = 2..n,
//!   optionally divided by `x⁽⁰⁾(k)`, used to estimate (a, b) and select λ;
//! * level residuals `x̂⁽¹⁾(k) − x⁽¹⁾(k)` over k = 1..n, used to choose the
//!   integration constant c.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::StructuralParams;
use crate::series::{ago, mean_sequence, RawSeries};

/// Vector norm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    L1,
    L2,
    Inf,
}

impl Norm {
    pub fn apply(self, r: &[f64]) -> f64 {
        match self {
            Norm::L1 => r.iter().map(|v| v.abs()).sum(),
            Norm::L2 => r.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Norm::Inf => r.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::L1 => "1",
            Norm::L2 => "2",
            Norm::Inf => "inf",
        })
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "l1" => Ok(Norm::L1),
            "2" | "l2" => Ok(Norm::L2),
            "inf" | "infinity" | "max" | "∞" => Ok(Norm::Inf),
            other => Err(Error::Config(format!("unknown norm {other:?}"))),
        }
    }
}

impl Serialize for Norm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Norm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        let text = match Repr::deserialize(d)? {
            Repr::Int(i) => i.to_string(),
            Repr::Text(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Which norm of the equation residuals to minimise, and whether residuals
/// are divided by the observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualObjective {
    pub norm: Norm,
    pub relative: bool,
}

impl ResidualObjective {
    pub const LEAST_SQUARES: Self = Self {
        norm: Norm::L2,
        relative: false,
    };

    pub fn new(norm: Norm, relative: bool) -> Self {
        Self { norm, relative }
    }
}

/// Signed relative error in percent, `(actual − predicted) / actual × 100`.
pub fn relative_error(actual: f64, predicted: f64) -> f64 {
    (actual - predicted) / actual * 100.0
}

/// Equation residuals of the power model over k = 2..fit_len.
pub fn equation_residuals(
    raw: &RawSeries,
    sp: &StructuralParams,
    relative: bool,
) -> Result<Vec<f64>> {
    let z = mean_sequence(&ago(raw), sp.lambda)?;
    let x0 = &raw.fit_values()[1..];
    Ok(x0
        .iter()
        .zip(&z.values)
        .map(|(&x, &zk)| {
            let r = x + sp.a * zk - sp.b * zk.powf(sp.alpha);
            if relative {
                r / x
            } else {
                r
            }
        })
        .collect())
}

/// f_p(a, b, λ) or its relative variant, evaluated at `sp`.
pub fn objective_value(
    raw: &RawSeries,
    sp: &StructuralParams,
    obj: ResidualObjective,
) -> Result<f64> {
    Ok(obj.norm.apply(&equation_residuals(raw, sp, obj.relative)?))
}

/// Objective used to choose the integration constant c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LevelObjective {
    /// Σ |x̂⁽¹⁾(k) − x⁽¹⁾(k)|
    F1,
    /// Σ (x̂⁽¹⁾(k) − x⁽¹⁾(k))²
    F2,
}

/// Level objective over paired fitted and accumulated values. Non-finite
/// fitted values make the objective infinite.
pub fn level_objective(fitted: &[f64], accumulated: &[f64], kind: LevelObjective) -> f64 {
    let mut total = 0.0;
    for (f, x) in fitted.iter().zip(accumulated) {
        let d = f - x;
        if !d.is_finite() {
            return f64::INFINITY;
        }
        total += match kind {
            LevelObjective::F1 => d.abs(),
            LevelObjective::F2 => d * d,
        };
    }
    total
}

/// Per-point signed relative errors with their summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub per_point: Vec<f64>,
    pub mean_signed: f64,
    pub mean_absolute: f64,
    /// Sum of squared level errors.
    pub sse: f64,
}

impl ErrorSummary {
    /// Build from `(actual, predicted)` pairs. Returns `None` when empty.
    pub fn from_pairs<I>(pairs: I) -> Option<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut per_point = Vec::new();
        let mut sse = 0.0;
        for (actual, predicted) in pairs {
            per_point.push(relative_error(actual, predicted));
            sse += (actual - predicted).powi(2);
        }
        if per_point.is_empty() {
            return None;
        }
        let n = per_point.len() as f64;
        Some(Self {
            mean_signed: per_point.iter().sum::<f64>() / n,
            mean_absolute: per_point.iter().map(|e| e.abs()).sum::<f64>() / n,
            per_point,
            sse,
        })
    }
}

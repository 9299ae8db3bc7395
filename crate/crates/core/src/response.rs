//! Time response `x̂⁽¹⁾(t) = (c·e^{−(1−α)at} + b/a)^{1/(1−α)}`, restored
//! order-0 predictions, the modified Verhulst restoration and per-point
//! evaluation against observations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::StructuralParams;
use crate::initcond::InitCondition;
use crate::metrics::{relative_error, ErrorSummary, ResidualObjective};
use crate::series::{AgoSeries, RawSeries};

/// Evaluate the general solution for constant `c` at time `t`.
///
/// Integer exponents `1/(1−α)` (α = 0 → 1, α = 2 → −1, …) accept any
/// non-zero base; fractional exponents require a positive base.
pub fn response_value(sp: &StructuralParams, c: f64, t: f64) -> Result<f64> {
    let q = sp.one_minus_alpha();
    let base = c * (-q * sp.a * t).exp() + sp.b_over_a()?;
    let exponent = 1.0 / q;
    let rounded = exponent.round();
    let value = if (exponent - rounded).abs() < 1e-12 && rounded.abs() <= i32::MAX as f64 {
        let e = rounded as i32;
        if e == 1 {
            base
        } else {
            base.powi(e)
        }
    } else if base > 0.0 {
        base.powf(exponent)
    } else {
        return Err(Error::Domain {
            t,
            reason: format!("base {base} is not positive for fractional exponent {exponent}"),
        });
    };
    if !value.is_finite() {
        return Err(Error::Domain {
            t,
            reason: format!("response is not finite (base {base}, exponent {exponent})"),
        });
    }
    Ok(value)
}

/// Parameters sufficient to evaluate the time response.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub sp: StructuralParams,
    pub ic: InitCondition,
    /// Fit length n.
    pub n: usize,
    pub x1_first: f64,
    pub x1_last: f64,
}

impl FittedModel {
    /// Build a model and check that the response is defined at t = 1..n.
    pub fn new(sp: StructuralParams, ic: InitCondition, ago: &AgoSeries) -> Result<Self> {
        let model = Self {
            sp,
            ic,
            n: ago.len(),
            x1_first: ago.first(),
            x1_last: ago.last(),
        };
        model.validate_through(model.n)?;
        Ok(model)
    }

    /// Check the response at every integer t = 1..=`last`.
    pub fn validate_through(&self, last: usize) -> Result<()> {
        for t in 1..=last {
            time_response(self, t as f64)?;
        }
        Ok(())
    }
}

pub fn time_response(model: &FittedModel, t: f64) -> Result<f64> {
    response_value(&model.sp, model.ic.c, t)
}

/// x̂⁽⁰⁾(k) = x̂⁽¹⁾(k) − x̂⁽¹⁾(k−1); for k = 1 the response value itself.
pub fn restored(model: &FittedModel, k: usize) -> Result<f64> {
    match k {
        0 => Err(Error::ParameterDomain("time index starts at 1".into())),
        1 => time_response(model, 1.0),
        _ => Ok(time_response(model, k as f64)? - time_response(model, (k - 1) as f64)?),
    }
}

/// Root of the quadratic grey Verhulst equation
/// `x + a(X + λx) = b(X + λx)²` for x, with `X` the fitted x̂⁽¹⁾(k−1).
///
/// Takes the minus-square-root branch. When `1 + aλ − 2bλX > 0` it is
/// evaluated in the rationalised form `2X(bX − a) / (D + √Δ)`, which stays
/// accurate as λ or b approach zero and equals `bX² − aX` at λ = 0.
pub fn verhulst_modified_restored(model: &FittedModel, k: usize) -> Result<f64> {
    let sp = &model.sp;
    if sp.alpha != 2.0 {
        return Err(Error::ParameterDomain(format!(
            "quadratic restoration needs the Verhulst model (α = 2), got α = {}",
            sp.alpha
        )));
    }
    if k < 2 {
        return Err(Error::ParameterDomain(
            "quadratic restoration starts at k = 2".into(),
        ));
    }
    let x_prev = time_response(model, (k - 1) as f64)?;
    quadratic_root(sp.a, sp.b, sp.lambda, x_prev, k)
}

fn quadratic_root(a: f64, b: f64, lambda: f64, x_prev: f64, k: usize) -> Result<f64> {
    let d = 1.0 + a * lambda - 2.0 * b * lambda * x_prev;
    let disc = d * d + 4.0 * b * lambda * lambda * x_prev * (a - b * x_prev);
    if disc < 0.0 {
        return Err(Error::Domain {
            t: k as f64,
            reason: format!("negative discriminant {disc} in the quadratic restoration"),
        });
    }
    let root = disc.sqrt();
    let denom = 2.0 * b * lambda * lambda;
    let minus = if d > 0.0 {
        2.0 * x_prev * (b * x_prev - a) / (d + root)
    } else if denom != 0.0 {
        (d - root) / denom
    } else {
        // b·λ² = 0 with D ≤ 0: the equation is linear, x·(1 + aλ) = −aX
        let lin = 1.0 + a * lambda;
        if lin == 0.0 {
            return Err(Error::Domain {
                t: k as f64,
                reason: "quadratic restoration degenerates (1 + aλ = 0)".into(),
            });
        }
        -a * x_prev / lin
    };
    if denom != 0.0 && minus < 0.0 {
        let plus = (d + root) / denom;
        if plus > 0.0 {
            log::warn!("k = {k}: minus-root restoration {minus} is negative while the plus root {plus} is positive");
        }
    }
    Ok(minus)
}

/// Which restoration produces the order-0 predictions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Restoration {
    #[default]
    Difference,
    VerhulstQuadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Fit,
    Forecast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub t: usize,
    pub actual: Option<f64>,
    pub predicted: f64,
    pub relative_error_percent: Option<f64>,
    pub phase: Phase,
}

/// Every resolved parameter of a fitted model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelEcho {
    pub alpha: f64,
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub beta: f64,
    pub c: f64,
    pub beta_in_unit_interval: bool,
    /// Objective that selected λ, when one was used.
    pub objective: Option<ResidualObjective>,
}

impl ModelEcho {
    pub fn of(model: &FittedModel) -> Self {
        Self {
            alpha: model.sp.alpha,
            lambda: model.sp.lambda,
            a: model.sp.a,
            b: model.sp.b,
            beta: model.ic.beta,
            c: model.ic.c,
            beta_in_unit_interval: model.ic.beta_in_unit_interval,
            objective: None,
        }
    }
}

/// Per-point predictions and signed relative errors.
///
/// Row k = 1 is the anchor: it shows the observed x⁽⁰⁾(1) with zero error.
/// Phase means average over every row of the phase that has an
/// observation, the anchor row included, which is how the comparison
/// tables this layout mirrors compute their "mean" rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub rows: Vec<ReportRow>,
    pub fit_mean_error: f64,
    pub forecast_mean_error: Option<f64>,
    /// Mean over all rows with observations.
    pub combined_mean_error: f64,
    pub restoration: Restoration,
    pub model: ModelEcho,
}

impl EvaluationReport {
    pub fn phase_summary(&self, phase: Phase) -> Option<ErrorSummary> {
        ErrorSummary::from_pairs(
            self.rows
                .iter()
                .filter(|r| r.phase == phase)
                .filter_map(|r| r.actual.map(|a| (a, r.predicted))),
        )
    }
}

/// Predict k = 1..fit_len + horizon and compare with the observations that
/// exist.
pub fn evaluate(
    model: &FittedModel,
    raw: &RawSeries,
    horizon: usize,
    restoration: Restoration,
) -> Result<EvaluationReport> {
    let n = raw.fit_len();
    let last = n + horizon;
    let mut rows = Vec::with_capacity(last);
    for k in 1..=last {
        let predicted = if k == 1 {
            raw.at(1).expect("series is non-empty")
        } else {
            match restoration {
                Restoration::Difference => restored(model, k),
                Restoration::VerhulstQuadratic => verhulst_modified_restored(model, k),
            }
            .map_err(|e| e.at_step(k))?
        };
        let actual = raw.at(k);
        rows.push(ReportRow {
            t: k,
            actual,
            predicted,
            relative_error_percent: actual.map(|a| relative_error(a, predicted)),
            phase: if k <= n { Phase::Fit } else { Phase::Forecast },
        });
    }

    let mean_of = |phase: Option<Phase>| {
        let errs: Vec<f64> = rows
            .iter()
            .filter(|r| phase.is_none_or(|p| r.phase == p))
            .filter_map(|r| r.relative_error_percent)
            .collect();
        (!errs.is_empty()).then(|| errs.iter().sum::<f64>() / errs.len() as f64)
    };

    Ok(EvaluationReport {
        fit_mean_error: mean_of(Some(Phase::Fit)).expect("fit rows always have observations"),
        forecast_mean_error: mean_of(Some(Phase::Forecast)),
        combined_mean_error: mean_of(None).expect("fit rows always have observations"),
        rows,
        restoration,
        model: ModelEcho::of(model),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::lsq_fit;
    use crate::initcond::{c_from_beta, resolve, InitPolicy};
    use crate::series::ago;

    const EX1: [f64; 7] = [2.9836, 4.4511, 6.6402, 9.9061, 14.7781, 22.0464, 32.8893];

    fn model_for(raw: &RawSeries, lambda: f64, alpha: f64, policy: InitPolicy) -> FittedModel {
        let sp = lsq_fit(raw, lambda, alpha).unwrap();
        let acc = ago(raw);
        let ic = resolve(policy, &sp, &acc).unwrap();
        FittedModel::new(sp, ic, &acc).unwrap()
    }

    #[test]
    fn classic_response_starts_at_first_observation() {
        let raw = RawSeries::with_fit_len(EX1.to_vec(), 5).unwrap();
        let m = model_for(&raw, 0.5, 0.0, InitPolicy::BetaFixed { beta: 1.0 });
        assert!((time_response(&m, 1.0).unwrap() - EX1[0]).abs() < 1e-12);
        assert!((restored(&m, 2).unwrap() - 4.3804).abs() < 5e-4);
        assert!((restored(&m, 7).unwrap() - 31.5285).abs() < 5e-4);
    }

    #[test]
    fn beta_zero_interpolates_last_point() {
        let raw = RawSeries::with_fit_len(EX1.to_vec(), 5).unwrap();
        for alpha in [0.0, -0.1, 2.0] {
            let m = model_for(&raw, 0.5, alpha, InitPolicy::BetaFixed { beta: 0.0 });
            assert!((time_response(&m, 5.0).unwrap() - m.x1_last).abs() < 1e-9);
        }
    }

    #[test]
    fn optimal_beta_example_differences() {
        let raw = RawSeries::with_fit_len(EX1.to_vec(), 5).unwrap();
        let sp = lsq_fit(&raw, 0.5, 0.0).unwrap();
        let acc = ago(&raw);
        let c = c_from_beta(0.522684, &sp, &acc).unwrap();
        let ic = InitCondition {
            c,
            beta: 0.522684,
            policy: InitPolicy::BetaFixed { beta: 0.522684 },
            beta_in_unit_interval: true,
        };
        let m = FittedModel::new(sp, ic, &acc).unwrap();
        let want = [4.4562, 6.6131, 9.8139, 14.5640, 21.6132, 32.0743];
        for (k, w) in (2..=7).zip(want) {
            assert!((restored(&m, k).unwrap() - w).abs() < 5e-4, "k={k}");
        }
    }

    #[test]
    fn flat_response_restores_to_zero() {
        let sp = StructuralParams::new(0.5, 2.0, 0.0, 0.5).unwrap();
        let acc = AgoSeries::new(vec![4.0, 4.5, 5.0, 5.5]).unwrap();
        let ic = InitCondition {
            c: 0.0,
            beta: f64::NAN,
            policy: InitPolicy::CLeastSquares,
            beta_in_unit_interval: false,
        };
        let m = FittedModel::new(sp, ic, &acc).unwrap();
        assert_eq!(restored(&m, 1).unwrap(), 4.0);
        assert_eq!(restored(&m, 2).unwrap(), 0.0);
        assert_eq!(restored(&m, 3).unwrap(), 0.0);
        assert!(restored(&m, 0).is_err());
    }

    #[test]
    fn fractional_exponent_needs_positive_base() {
        // α = −1: exponent 1/2, base = c·e^{−0.6t} − 3.33 < 0
        let sp = StructuralParams::new(0.3, -1.0, -1.0, 0.5).unwrap();
        assert!(matches!(response_value(&sp, 1.0, 2.0), Err(Error::Domain { t, .. }) if t == 2.0));
        // α = 0.5: exponent 2 is integral, so a negative base is fine
        let sp = StructuralParams::new(0.3, -1.0, 0.5, 0.5).unwrap();
        let v = response_value(&sp, 1.0, 1.0).unwrap();
        assert!((v - ((-0.15f64).exp() - 1.0 / 0.3).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn quadratic_root_limits() {
        let (a, b, x) = (-0.3, -0.01, 5.0);
        let exact = b * x * x - a * x;
        assert_eq!(quadratic_root(a, b, 0.0, x, 2).unwrap(), exact);
        // λ = 1e-6 against a bisection root of the same quadratic
        let lambda = 1e-6;
        let g = |y: f64| y + a * (x + lambda * y) - b * (x + lambda * y).powi(2);
        let (mut lo, mut hi) = (0.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(lo) * g(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let bisected = 0.5 * (lo + hi);
        let y = quadratic_root(a, b, lambda, x, 2).unwrap();
        assert!((y - bisected).abs() < 1e-12);
        assert!((y - exact).abs() < 1e-6);
    }

    #[test]
    fn quadratic_root_satisfies_equation() {
        for &(a, b, lambda, x) in &[
            (-0.3, -0.01, 0.5, 5.0),
            (-0.8, -0.002, 0.9, 120.0),
            (0.2, 0.05, 0.3, 2.0),
            (-0.5, 0.0, 0.5, 3.0),
        ] {
            let y = quadratic_root(a, b, lambda, x, 3).unwrap();
            let zk = x + lambda * y;
            let residual = y + a * zk - b * zk * zk;
            assert!(
                residual.abs() < 1e-9 * (1.0 + y.abs()),
                "{a} {b} {lambda} {x}: {residual}"
            );
        }
    }

    #[test]
    fn quadratic_root_negative_discriminant() {
        // b > 0 with large X: D < 0 and Δ < 0
        assert!(matches!(
            quadratic_root(0.1, 1.0, 1.0, 10.0, 4),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn verhulst_restoration_requires_alpha_two() {
        let raw = RawSeries::with_fit_len(EX1.to_vec(), 5).unwrap();
        let m = model_for(&raw, 0.5, 0.0, InitPolicy::BetaFixed { beta: 1.0 });
        assert!(verhulst_modified_restored(&m, 2).is_err());
    }

    #[test]
    fn perfect_model_has_zero_errors() {
        // data generated from the response itself
        let sp = StructuralParams::new(-0.2, 1.0, 0.0, 0.5).unwrap();
        let c = 8.0;
        let x1: Vec<f64> = (1..=8)
            .map(|t| response_value(&sp, c, t as f64).unwrap())
            .collect();
        let acc = AgoSeries::new(x1[..6].to_vec()).unwrap();
        let mut x0 = vec![x1[0]];
        x0.extend(x1.windows(2).map(|w| w[1] - w[0]));
        let raw = RawSeries::with_fit_len(x0, 6).unwrap();
        let ic = InitCondition {
            c,
            beta: 1.0,
            policy: InitPolicy::BetaFixed { beta: 1.0 },
            beta_in_unit_interval: true,
        };
        let m = FittedModel::new(sp, ic, &acc).unwrap();
        let rep = evaluate(&m, &raw, 2, Restoration::Difference).unwrap();
        for row in &rep.rows {
            assert!(row.relative_error_percent.unwrap().abs() < 1e-10);
        }
        assert!(rep.fit_mean_error.abs() < 1e-10);
        assert!(rep.forecast_mean_error.unwrap().abs() < 1e-10);
    }

    #[test]
    fn evaluate_layout() {
        let raw = RawSeries::with_fit_len(EX1.to_vec(), 5).unwrap();
        let m = model_for(&raw, 0.5, 0.0, InitPolicy::BetaFixed { beta: 1.0 });
        let rep = evaluate(&m, &raw, 0, Restoration::Difference).unwrap();
        assert_eq!(rep.rows.len(), 5);
        assert!(rep.forecast_mean_error.is_none());
        assert_eq!(rep.rows[0].relative_error_percent, Some(0.0));

        // horizon past the data: predictions without observations
        let rep = evaluate(&m, &raw, 4, Restoration::Difference).unwrap();
        assert_eq!(rep.rows.len(), 9);
        assert!(rep.rows[8].actual.is_none());
        assert_eq!(rep.rows[8].phase, Phase::Forecast);
        let summary = rep.phase_summary(Phase::Forecast).unwrap();
        assert_eq!(summary.per_point.len(), 2);
        assert!((summary.mean_signed - rep.forecast_mean_error.unwrap()).abs() < 1e-12);
    }
}

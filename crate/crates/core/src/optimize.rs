//! Outer search over the mean value parameter λ and orchestration of the
//! structural fit, initial condition and evaluation stages.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Stage};
use crate::estimation::{check_alpha, lsq_fit, norm_fit, StructuralParams};
use crate::initcond::{resolve, InitPolicy};
use crate::metrics::{objective_value, ResidualObjective};
use crate::minimize::golden_section;
use crate::response::{evaluate, EvaluationReport, FittedModel, Restoration};
use crate::series::{ago, check_lambda, RawSeries};

/// Grid resolution of the λ search.
pub const LAMBDA_GRID_STEPS: usize = 100;
/// Final bracket width of the golden-section refinement around the best grid point.
pub const LAMBDA_REFINE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LambdaPolicy {
    Fixed {
        lambda: f64,
    },
    /// λ ∈ {0, 0.01, …, 1}, then golden-section refinement.
    GridSearch,
}

/// Estimator for (a, b) at a fixed λ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ParamPolicy {
    Lsq,
    NormFit { objective: ResidualObjective },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPlan {
    pub alpha: f64,
    pub lambda_policy: LambdaPolicy,
    pub param_policy: ParamPolicy,
    pub ic_policy: InitPolicy,
    /// Objective that ranks λ values; also the reported `achieved_objective`.
    pub objective_for_lambda: ResidualObjective,
    #[serde(default)]
    pub restoration: Restoration,
}

impl FitPlan {
    /// Classic GM(1,1): α = 0, λ = 0.5, least squares, x⁽¹⁾(1) anchor.
    pub fn classic() -> Self {
        Self {
            alpha: 0.0,
            lambda_policy: LambdaPolicy::Fixed { lambda: 0.5 },
            param_policy: ParamPolicy::Lsq,
            ic_policy: InitPolicy::BetaFixed { beta: 1.0 },
            objective_for_lambda: ResidualObjective::LEAST_SQUARES,
            restoration: Restoration::Difference,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if let LambdaPolicy::Fixed { lambda } = self.lambda_policy {
            check_lambda(lambda)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FittedModel,
    pub achieved_objective: f64,
    /// Every (λ, objective) pair evaluated, in evaluation order.
    pub lambda_trace: Vec<(f64, f64)>,
    pub converged: bool,
}

struct Inner {
    sp: StructuralParams,
    objective: f64,
    converged: bool,
}

fn inner_fit(raw: &RawSeries, plan: &FitPlan, lambda: f64) -> Result<Inner> {
    let start = lsq_fit(raw, lambda, plan.alpha)?;
    let (sp, converged) = match plan.param_policy {
        ParamPolicy::Lsq => (start, true),
        ParamPolicy::NormFit { objective } => {
            let fit = norm_fit(raw, lambda, plan.alpha, objective, &start)?;
            (fit.params, fit.converged)
        }
    };
    let objective = objective_value(raw, &sp, plan.objective_for_lambda)?;
    if !objective.is_finite() {
        return Err(Error::DegenerateDesign(format!(
            "objective is not finite at λ = {lambda}"
        )));
    }
    Ok(Inner {
        sp,
        objective,
        converged,
    })
}

/// Lexicographic (objective, λ) order.
fn better(candidate: (f64, f64), incumbent: (f64, f64)) -> bool {
    candidate
        .1
        .total_cmp(&incumbent.1)
        .then(candidate.0.total_cmp(&incumbent.0))
        == std::cmp::Ordering::Less
}

/// Resolve λ and (a, b) per the plan, then the initial condition.
pub fn optimize_lambda(raw: &RawSeries, plan: &FitPlan) -> Result<FitResult> {
    plan.validate().map_err(|e| e.in_stage(Stage::Estimation))?;
    let mut trace = Vec::new();

    let (lambda, inner) = match plan.lambda_policy {
        LambdaPolicy::Fixed { lambda } => {
            let inner = inner_fit(raw, plan, lambda).map_err(|e| e.in_stage(Stage::Estimation))?;
            trace.push((lambda, inner.objective));
            (lambda, inner)
        }
        LambdaPolicy::GridSearch => {
            let mut best: Option<(f64, f64)> = None;
            let mut last_err = None;
            for i in 0..=LAMBDA_GRID_STEPS {
                let lambda = i as f64 / LAMBDA_GRID_STEPS as f64;
                match inner_fit(raw, plan, lambda) {
                    Ok(inner) => {
                        trace.push((lambda, inner.objective));
                        if best.is_none_or(|b| better((lambda, inner.objective), b)) {
                            best = Some((lambda, inner.objective));
                        }
                    }
                    Err(e) => last_err = Some(e),
                }
            }
            let Some((grid_lambda, grid_obj)) = best else {
                let detail = last_err.map_or_else(String::new, |e| format!(": {e}"));
                return Err(Error::DegenerateDesign(format!(
                    "every λ grid point is degenerate{detail}"
                ))
                .in_stage(Stage::Estimation));
            };

            let step = 1.0 / LAMBDA_GRID_STEPS as f64;
            let lo = (grid_lambda - step).max(0.0);
            let hi = (grid_lambda + step).min(1.0);
            let refined = golden_section(
                |lambda| match inner_fit(raw, plan, lambda) {
                    Ok(inner) => {
                        trace.push((lambda, inner.objective));
                        inner.objective
                    }
                    Err(_) => f64::INFINITY,
                },
                lo,
                hi,
                LAMBDA_REFINE_TOL,
                200,
            );
            let lambda = if better((refined.x, refined.fx), (grid_lambda, grid_obj)) {
                refined.x
            } else {
                grid_lambda
            };
            let inner = inner_fit(raw, plan, lambda).map_err(|e| e.in_stage(Stage::Estimation))?;
            (lambda, inner)
        }
    };
    log::debug!("λ = {lambda}, objective = {}", inner.objective);

    let acc = ago(raw);
    let ic = resolve(plan.ic_policy, &inner.sp, &acc)
        .map_err(|e| e.in_stage(Stage::InitialCondition))?;
    let model =
        FittedModel::new(inner.sp, ic, &acc).map_err(|e| e.in_stage(Stage::InitialCondition))?;
    Ok(FitResult {
        model,
        achieved_objective: inner.objective,
        lambda_trace: trace,
        converged: inner.converged,
    })
}

/// Fit per `plan`, then evaluate `horizon` steps past the fit window.
pub fn fit_pipeline(
    raw: &RawSeries,
    plan: &FitPlan,
    horizon: usize,
) -> Result<(FitResult, EvaluationReport)> {
    let fit = optimize_lambda(raw, plan)?;
    let mut report = evaluate(&fit.model, raw, horizon, plan.restoration)
        .map_err(|e| e.in_stage(Stage::Evaluation))?;
    report.model.objective = Some(plan.objective_for_lambda);
    Ok((fit, report))
}

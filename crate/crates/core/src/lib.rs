//! Grey power model forecasting for small samples.
//!
//! The model family is `x⁽⁰⁾(k) + a·z⁽¹⁾(k) = b·(z⁽¹⁾(k))^α` with background
//! values `z⁽¹⁾(k) = λ·x⁽¹⁾(k) + (1−λ)·x⁽¹⁾(k−1)`; α = 0 gives GM(1,1) and
//! α = 2 the grey Verhulst model. Forecasts come from the whitened-equation
//! solution `x̂⁽¹⁾(t) = (c·e^{−(1−α)at} + b/a)^{1/(1−α)}`, with the
//! integration constant chosen from a β-weighted blend of the first and last
//! accumulated points or by minimising the level error.
//!
//! ```
//! use greypower::{fit_pipeline, FitPlan, RawSeries};
//!
//! let raw = RawSeries::with_fit_len(
//!     vec![2.9836, 4.4511, 6.6402, 9.9061, 14.7781, 22.0464, 32.8893],
//!     5,
//! )?;
//! let (_, report) = fit_pipeline(&raw, &FitPlan::classic(), 2)?;
//! assert!((report.rows[1].predicted - 4.3804).abs() < 5e-4);
//! # Ok::<(), greypower::Error>(())
//! ```

pub mod cli;
pub mod error;
pub mod estimation;
pub mod initcond;
pub mod metrics;
pub mod minimize;
pub mod optimize;
pub mod response;
pub mod series;

pub use error::{Error, Result, Stage};
pub use estimation::{lsq_fit, lsq_fit_lambda_closed, norm_fit, NormFit, StructuralParams};
pub use initcond::{
    beta_from_c, c_from_beta, c_least_squares_gm, c_minimize, InitCondition, InitPolicy,
};
pub use metrics::{
    objective_value, relative_error, ErrorSummary, LevelObjective, Norm, ResidualObjective,
};
pub use optimize::{fit_pipeline, optimize_lambda, FitPlan, FitResult, LambdaPolicy, ParamPolicy};
pub use response::{
    evaluate, restored, time_response, verhulst_modified_restored, EvaluationReport, FittedModel,
    ModelEcho, Phase, ReportRow, Restoration,
};
pub use series::{ago, iago, mean_sequence, AgoSeries, MeanSeries, RawSeries};

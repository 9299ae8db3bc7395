//! TOML run configuration: optional top-level run settings and one `[[plan]]`
//! table per model column.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::initcond::InitPolicy;
use crate::metrics::{LevelObjective, Norm, ResidualObjective};
use crate::optimize::{FitPlan, LambdaPolicy, ParamPolicy};
use crate::response::Restoration;

use super::{NamedPlan, OutputFormat};

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    /// Series path, relative to the configuration file.
    pub input: Option<PathBuf>,
    pub fit_len: Option<usize>,
    pub horizon: Option<usize>,
    pub format: Option<OutputFormat>,
    pub precision: Option<usize>,
    pub labels: Option<Vec<String>>,
    #[serde(rename = "plan", default)]
    pub plans: Vec<PlanSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Value(f64),
    Keyword(LambdaKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaKeyword {
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamsSpec {
    #[default]
    Lsq,
    Norm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialSpec {
    #[default]
    Beta,
    CLeastSquares,
    CF1,
    CF2,
}

fn default_lambda() -> LambdaSpec {
    LambdaSpec::Value(0.5)
}

fn default_norm() -> Norm {
    Norm::L2
}

fn default_beta() -> f64 {
    1.0
}

/// One model column.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSpec {
    pub name: String,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default = "default_lambda")]
    pub lambda: LambdaSpec,
    #[serde(default)]
    pub params: ParamsSpec,
    /// Residual norm that ranks λ and, with `params = "norm"`, fits (a, b).
    #[serde(default = "default_norm")]
    pub norm: Norm,
    #[serde(default)]
    pub relative: bool,
    #[serde(default)]
    pub initial: InitialSpec,
    /// Used with `initial = "beta"`.
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub restoration: Restoration,
}

impl PlanSpec {
    pub fn to_plan(&self) -> Result<NamedPlan> {
        let objective = ResidualObjective::new(self.norm, self.relative);
        let plan = FitPlan {
            alpha: self.alpha,
            lambda_policy: match self.lambda {
                LambdaSpec::Value(lambda) => LambdaPolicy::Fixed { lambda },
                LambdaSpec::Keyword(LambdaKeyword::Grid) => LambdaPolicy::GridSearch,
            },
            param_policy: match self.params {
                ParamsSpec::Lsq => ParamPolicy::Lsq,
                ParamsSpec::Norm => ParamPolicy::NormFit { objective },
            },
            ic_policy: match self.initial {
                InitialSpec::Beta => InitPolicy::BetaFixed { beta: self.beta },
                InitialSpec::CLeastSquares => InitPolicy::CLeastSquares,
                InitialSpec::CF1 => InitPolicy::CMinimize {
                    objective: LevelObjective::F1,
                },
                InitialSpec::CF2 => InitPolicy::CMinimize {
                    objective: LevelObjective::F2,
                },
            },
            objective_for_lambda: objective,
            restoration: self.restoration,
        };
        plan.validate()
            .map_err(|e| Error::Config(format!("plan {:?}: {e}", self.name)))?;
        Ok(NamedPlan {
            name: self.name.clone(),
            plan,
        })
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Load and resolve `input` against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::parse(&text)?;
        if let (Some(input), Some(dir)) = (&cfg.input, path.parent()) {
            if input.is_relative() {
                cfg.input = Some(dir.join(input));
            }
        }
        Ok(cfg)
    }

    pub fn named_plans(&self) -> Result<Vec<NamedPlan>> {
        self.plans.iter().map(PlanSpec::to_plan).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plans_with_defaults() {
        let cfg = ConfigFile::parse(
            r#"
            fit_len = 5
            horizon = 2

            [[plan]]
            name = "GM(1,1)"

            [[plan]]
            name = "optimal"
            lambda = "grid"
            norm = 1
            relative = true
            initial = "c-f1"

            [[plan]]
            name = "power"
            alpha = -0.1
            lambda = 0.25
            params = "norm"
            norm = "inf"
            initial = "c-least-squares"
            restoration = "difference"
            "#,
        )
        .unwrap();
        assert_eq!(cfg.fit_len, Some(5));
        let plans = cfg.named_plans().unwrap();
        assert_eq!(plans[0].plan, FitPlan::classic());
        assert_eq!(plans[1].plan.lambda_policy, LambdaPolicy::GridSearch);
        assert_eq!(
            plans[1].plan.ic_policy,
            InitPolicy::CMinimize {
                objective: LevelObjective::F1
            }
        );
        assert_eq!(
            plans[1].plan.objective_for_lambda,
            ResidualObjective::new(Norm::L1, true)
        );
        assert_eq!(plans[1].plan.param_policy, ParamPolicy::Lsq);
        assert_eq!(
            plans[2].plan.param_policy,
            ParamPolicy::NormFit {
                objective: ResidualObjective::new(Norm::Inf, false)
            }
        );
        assert_eq!(
            plans[2].plan.lambda_policy,
            LambdaPolicy::Fixed { lambda: 0.25 }
        );
    }

    #[test]
    fn rejects_unknown_keys_and_invalid_plans() {
        let err = ConfigFile::parse("[[plan]]\nname = \"x\"\nlamda = 0.3\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert_eq!(err.exit_code(), 2);

        let cfg = ConfigFile::parse("[[plan]]\nname = \"x\"\nalpha = 1.0\n").unwrap();
        assert!(matches!(cfg.named_plans(), Err(Error::Config(_))));

        let cfg = ConfigFile::parse("[[plan]]\nname = \"x\"\nlambda = 1.5\n").unwrap();
        assert!(matches!(cfg.named_plans(), Err(Error::Config(_))));

        assert!(ConfigFile::parse("[[plan]]\nname = \"x\"\nlambda = \"best\"\n").is_err());
    }
}

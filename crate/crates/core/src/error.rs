use std::fmt;

/// Pipeline stage an error was raised in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Estimation,
    InitialCondition,
    Evaluation,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Estimation => "estimation",
            Stage::InitialCondition => "initial condition",
            Stage::Evaluation => "evaluation",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid series: {0}")]
    InvalidSeries(String),

    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    #[error("degenerate initial condition: {0}")]
    DegenerateInitialCondition(String),

    #[error("response undefined at t = {t}: {reason}")]
    Domain { t: f64, reason: String },

    #[error("optimisation failed: {0}")]
    OptimizationDomain(String),

    #[error("at k = {k}: {source}")]
    AtStep {
        k: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{stage}: {source}")]
    InStage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },

    #[error("plan {plan:?}: {source}")]
    InPlan {
        plan: String,
        #[source]
        source: Box<Error>,
    },

    #[error("line {line}: cannot parse {content:?}")]
    Parse { line: usize, content: String },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn in_stage(self, stage: Stage) -> Self {
        Error::InStage {
            stage,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_step(self, k: usize) -> Self {
        Error::AtStep {
            k,
            source: Box::new(self),
        }
    }

    /// Process exit code for the CLI: 2 input, 3 fitting, 4 evaluation/domain.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidSeries(_) | Error::Parse { .. } | Error::Config(_) | Error::Io(_) => 2,
            Error::InPlan { source, .. } => source.exit_code(),
            Error::InStage { stage, .. } => match stage {
                Stage::Evaluation => 4,
                _ => 3,
            },
            Error::Domain { .. } | Error::AtStep { .. } => 4,
            Error::ParameterDomain(_)
            | Error::DegenerateDesign(_)
            | Error::DegenerateInitialCondition(_)
            | Error::OptimizationDomain(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad run or ingest configuration.
    #[error("config: {0}")]
    Config(String),

    /// A data file row that could not be parsed.
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// Input data violating a structural invariant.
    #[error("validation: {0}")]
    Validation(String),

    /// Fewer than two threshold exceedances, so no interval can be formed.
    #[error("too few exceedances ({count}) to form recurrence intervals")]
    TooFewExceedances { count: usize },

    /// Intraday profile has a minute that averages to zero volume.
    #[error("degenerate intraday profile: minute {minute} averages zero")]
    DegenerateProfile { minute: usize },

    /// A series whose variance vanishes cannot be normalized.
    #[error("zero variance: {0}")]
    ZeroVariance(String),

    /// Every tail sample sits exactly at the lower bound; the likelihood has no maximum.
    #[error("divergent tail exponent estimate: all {n} tail samples equal the lower bound")]
    DivergentMle { n: usize },

    /// No lower-bound candidate leaves enough tail samples.
    #[error(
        "no feasible tail lower bound: floor {floor} leaves fewer than {n_tail_floor} samples"
    )]
    NoFeasibleXmin { floor: f64, n_tail_floor: usize },

    /// Correlation is undefined when either margin is constant.
    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    /// No return exceeded the trace trigger.
    #[error(
        "no trigger events: trigger {trigger} exceeds the maximum observed return {max_observed}"
    )]
    NoTriggerEvents { trigger: f64, max_observed: f64 },

    /// Series is too short for the requested fluctuation scales.
    #[error("series too short for scale {requested}: maximum feasible scale is {max_feasible}")]
    SeriesTooShort {
        requested: usize,
        max_feasible: usize,
    },

    /// A catch-all for statistical preconditions (empty samples, bad parameters).
    #[error("statistics: {0}")]
    Stats(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    /// An error annotated with the pipeline stage it occurred in.
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// Attach a pipeline stage name to an error.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Process exit code taxonomy: 1 config, 2 ingest, 3 statistics, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Parse { .. } | Error::Validation(_) => 2,
            Error::Io { .. } => 4,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}

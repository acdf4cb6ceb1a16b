use thiserror::Error;

/// Errors raised anywhere in the robust-optimization pipeline.
///
/// Every variant maps to a stable machine-readable [`kind`](MoropError::kind)
/// string and to a process exit code used by the CLI.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoropError {
    #[error("model failure: {0}")]
    ModelFailure(String),

    #[error("BEMT induction iteration did not converge (residual {residual:.3e} after {iterations} iterations)")]
    BemtNoConvergence { residual: f64, iterations: usize },

    #[error("angle of attack {alpha_deg:.3} deg outside polar range [{min:.3}, {max:.3}]")]
    PolarOutOfRange { alpha_deg: f64, min: f64, max: f64 },

    #[error("malformed polar table: {0}")]
    MalformedPolar(String),

    #[error("dimension mismatch: expected {expected}, got {actual} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("objective {index} has zero range on the Pareto front (max = min = {value})")]
    ZeroRangeObjective { index: usize, value: f64 },

    #[error("invalid scenario probabilities: {0}")]
    InvalidProbability(String),

    #[error("sample value {0} outside [0, 1)")]
    SampleOutOfRange(f64),

    #[error("no feasible solution in the final population")]
    NoFeasibleSolution,

    #[error("empty archive")]
    EmptyArchive,

    #[error("archive schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("not enough samples: need at least {needed}, got {got}")]
    NotEnoughSamples { needed: usize, got: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl MoropError {
    pub fn kind(&self) -> &'static str {
        match self {
            MoropError::ModelFailure(_) => "model-failure",
            MoropError::BemtNoConvergence { .. } => "bemt-no-convergence",
            MoropError::PolarOutOfRange { .. } => "polar-out-of-range",
            MoropError::MalformedPolar(_) => "malformed-polar",
            MoropError::DimensionMismatch { .. } => "dimension-mismatch",
            MoropError::ZeroRangeObjective { .. } => "zero-range-objective",
            MoropError::InvalidProbability(_) => "invalid-probability",
            MoropError::SampleOutOfRange(_) => "sample-out-of-range",
            MoropError::NoFeasibleSolution => "no-feasible-solution",
            MoropError::EmptyArchive => "empty-archive",
            MoropError::SchemaMismatch(_) => "schema-mismatch",
            MoropError::Config(_) => "config",
            MoropError::NotEnoughSamples { .. } => "not-enough-samples",
            MoropError::Io(_) => "io",
        }
    }

    /// True for errors that originate in an evaluator rather than in the caller's input.
    pub fn is_model_failure(&self) -> bool {
        matches!(
            self,
            MoropError::ModelFailure(_)
                | MoropError::BemtNoConvergence { .. }
                | MoropError::PolarOutOfRange { .. }
        )
    }

    /// Process exit code: 2 configuration/input error, 3 model failure, 4 no feasible solution.
    pub fn exit_code(&self) -> i32 {
        match self {
            e if e.is_model_failure() => 3,
            MoropError::NoFeasibleSolution => 4,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() })
    }
}

impl From<std::io::Error> for MoropError {
    fn from(e: std::io::Error) -> Self {
        MoropError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, MoropError>;

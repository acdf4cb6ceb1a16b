//! Built-in evaluators.

pub mod bemt;
pub mod numerical;
pub mod polar;
pub mod wind;

use crate::error::{MoropError, Result};
use crate::model::ProblemDef;

/// Names accepted in run configurations.
pub const BUILTIN_EVALUATORS: &[&str] = &["numerical_eg1", "bemt_rotor"];

/// Builds a built-in problem with its default parameters.
pub fn builtin(name: &str) -> Result<ProblemDef> {
    match name {
        "numerical_eg1" => numerical::numerical_problem(5.0, 0.1),
        "bemt_rotor" => wind::wind_turbine_problem(polar::PolarTable::s809()),
        other => Err(MoropError::Config(format!(
            "unknown evaluator '{other}' (expected one of {BUILTIN_EVALUATORS:?})"
        ))),
    }
}

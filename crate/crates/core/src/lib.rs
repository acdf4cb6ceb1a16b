//! Multi-objective robust optimization under small and large variations.
//!
//! The crate evaluates a set of Pareto-optimal alternatives against two kinds of
//! uncertainty:
//!
//! * small variations in design variables and environment parameters, summarised by
//!   the index `I_RS` (normalised spread plus mean shift of each objective), and
//! * large, discretised variations of the environment, summarised by `I_RL`
//!   (probability-weighted reciprocal Pareto rank, zeroed out by infeasibility).
//!
//! Each alternative gets a point in the `(I_RS, I_RL)` robustness-function space,
//! and the non-dominated subset of that space is reported as the robust-Pareto set.
//!
//! Module map:
//! * [`model`]: problem definition, evaluation, feasibility
//! * [`pareto`]: dominance, individual ranking, front extraction
//! * [`sampling`]: Latin hypercube sampling and additive noise
//! * [`robustness`]: scenario sets and both robustness indices
//! * [`nsga2`]: the evolutionary solver producing the alternative archive
//! * [`problems`]: built-in evaluators (numerical example, BEMT rotor)
//! * [`pipeline`]: run configuration, orchestration and CSV/JSON artifacts

pub mod error;
pub mod model;
pub mod nsga2;
pub mod pareto;
pub mod pipeline;
pub mod problems;
pub mod robustness;
pub mod sampling;

pub use error::{MoropError, Result};
pub use model::{DepVector, DesignVector, Evaluation, NoiseSpec, ParetoArchive, ProblemDef};

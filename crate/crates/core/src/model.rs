//! Problem abstraction: design vectors, environment parameters, evaluation and feasibility.
//!
//! All objectives are minimised and all constraints are stored in the `g <= 0`
//! convention. Box bounds on design variables are kept apart from `g`; the optimizer
//! enforces them by clipping.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{MoropError, Result};

/// Design variables `x`, the quantities the designer controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DesignVector(pub Vec<f64>);

/// Design environment parameters `p`, which the designer cannot adjust.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DepVector(pub Vec<f64>);

macro_rules! vector_newtype {
    ($t:ty) => {
        impl $t {
            pub fn new(values: Vec<f64>) -> Self {
                Self(values)
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }
        }

        impl From<Vec<f64>> for $t {
            fn from(v: Vec<f64>) -> Self {
                Self(v)
            }
        }

        impl std::ops::Deref for $t {
            type Target = [f64];
            fn deref(&self) -> &[f64] {
                &self.0
            }
        }
    };
}

vector_newtype!(DesignVector);
vector_newtype!(DepVector);

/// Objective values `f` (minimisation) and constraint values `g` (feasible when `g <= 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl Evaluation {
    pub fn new(f: Vec<f64>, g: Vec<f64>) -> Self {
        Self { f, g }
    }

    pub fn is_finite(&self) -> bool {
        self.f.iter().chain(self.g.iter()).all(|v| v.is_finite())
    }

    /// Sum of positive constraint values; zero for a feasible evaluation.
    pub fn total_violation(&self) -> f64 {
        self.g.iter().map(|&g| g.max(0.0)).sum()
    }
}

/// True iff every constraint satisfies `g_k <= 0`. The boundary counts as satisfied.
pub fn is_feasible(e: &Evaluation) -> bool {
    e.g.iter().all(|&g| g <= 0.0)
}

/// Additive noise model applied around a nominal value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSpec {
    #[default]
    None,
    /// Uniform on `[nominal - half_width, nominal + half_width]`.
    Uniform { half_width: f64 },
    /// Normal with standard deviation `std`, centred on the nominal value.
    Normal { std: f64 },
}

impl NoiseSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::None => Ok(()),
            NoiseSpec::Uniform { half_width } if half_width >= 0.0 && half_width.is_finite() => {
                Ok(())
            }
            NoiseSpec::Normal { std } if std >= 0.0 && std.is_finite() => Ok(()),
            other => Err(MoropError::Config(format!("invalid noise spec {other:?}"))),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, NoiseSpec::None)
    }
}

/// Closed interval for one design variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lower && v <= self.upper
    }

    pub fn clip(&self, v: f64) -> f64 {
        v.clamp(self.lower, self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// A deterministic map `(x, p) -> (f, g)`.
///
/// Implementations must be pure: identical inputs produce bitwise-identical outputs,
/// and calls may happen concurrently from many threads.
pub trait Evaluator: Send + Sync {
    fn evaluate(&self, x: &[f64], p: &[f64]) -> Result<Evaluation>;
}

impl<F> Evaluator for F
where
    F: Fn(&[f64], &[f64]) -> Result<Evaluation> + Send + Sync,
{
    fn evaluate(&self, x: &[f64], p: &[f64]) -> Result<Evaluation> {
        self(x, p)
    }
}

/// A fully wired multi-objective problem: counts, names, bounds, nominal environment,
/// noise models and the evaluator.
#[derive(Clone)]
pub struct ProblemDef {
    pub name: String,
    pub dv_names: Vec<String>,
    pub dep_names: Vec<String>,
    pub objective_names: Vec<String>,
    pub constraint_names: Vec<String>,
    pub dv_bounds: Vec<Bounds>,
    pub dep_nominal: DepVector,
    pub dv_noise: Vec<NoiseSpec>,
    pub dep_noise: Vec<NoiseSpec>,
    evaluator: Arc<dyn Evaluator>,
}

impl fmt::Debug for ProblemDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemDef")
            .field("name", &self.name)
            .field("n", &self.n())
            .field("m", &self.m())
            .field("q", &self.q())
            .field("r", &self.r())
            .field("dv_bounds", &self.dv_bounds)
            .field("dep_nominal", &self.dep_nominal)
            .finish_non_exhaustive()
    }
}

/// Builder-style description used by [`ProblemDef::new`].
pub struct ProblemSpec {
    pub name: String,
    pub dv_names: Vec<String>,
    pub dep_names: Vec<String>,
    pub objective_names: Vec<String>,
    pub constraint_names: Vec<String>,
    pub dv_bounds: Vec<Bounds>,
    pub dep_nominal: Vec<f64>,
    pub dv_noise: Vec<NoiseSpec>,
    pub dep_noise: Vec<NoiseSpec>,
}

impl ProblemDef {
    pub fn new(spec: ProblemSpec, evaluator: Arc<dyn Evaluator>) -> Result<Self> {
        let n = spec.dv_names.len();
        let r = spec.dep_names.len();
        check_len("dv_bounds", n, spec.dv_bounds.len())?;
        check_len("dv_noise", n, spec.dv_noise.len())?;
        check_len("dep_nominal", r, spec.dep_nominal.len())?;
        check_len("dep_noise", r, spec.dep_noise.len())?;
        if spec.objective_names.is_empty() {
            return Err(MoropError::Config("problem needs at least one objective".into()));
        }
        for (i, b) in spec.dv_bounds.iter().enumerate() {
            if !(b.lower <= b.upper) {
                return Err(MoropError::Config(format!(
                    "design variable {} has lower bound {} above upper bound {}",
                    spec.dv_names[i], b.lower, b.upper
                )));
            }
        }
        for ns in spec.dv_noise.iter().chain(spec.dep_noise.iter()) {
            ns.validate()?;
        }
        Ok(Self {
            name: spec.name,
            dv_names: spec.dv_names,
            dep_names: spec.dep_names,
            objective_names: spec.objective_names,
            constraint_names: spec.constraint_names,
            dv_bounds: spec.dv_bounds,
            dep_nominal: DepVector(spec.dep_nominal),
            dv_noise: spec.dv_noise,
            dep_noise: spec.dep_noise,
            evaluator,
        })
    }

    pub fn n(&self) -> usize {
        self.dv_bounds.len()
    }

    pub fn m(&self) -> usize {
        self.objective_names.len()
    }

    pub fn q(&self) -> usize {
        self.constraint_names.len()
    }

    pub fn r(&self) -> usize {
        self.dep_nominal.len()
    }

    /// Evaluates `(x, p)`, checking argument lengths and output shape.
    ///
    /// Non-finite objective or constraint values are reported as a model failure,
    /// never folded into infeasibility.
    pub fn evaluate(&self, x: &[f64], p: &[f64]) -> Result<Evaluation> {
        check_len("design vector", self.n(), x.len())?;
        check_len("environment vector", self.r(), p.len())?;
        let e = self.evaluator.evaluate(x, p)?;
        check_len("objective vector", self.m(), e.f.len())?;
        check_len("constraint vector", self.q(), e.g.len())?;
        if !e.is_finite() {
            return Err(MoropError::ModelFailure(format!(
                "non-finite output at x = {x:?}, p = {p:?}"
            )));
        }
        Ok(e)
    }

    pub fn evaluate_nominal(&self, x: &[f64]) -> Result<Evaluation> {
        self.evaluate(x, &self.dep_nominal)
    }

    pub fn within_bounds(&self, x: &[f64]) -> bool {
        x.len() == self.n() && self.dv_bounds.iter().zip(x).all(|(b, &v)| b.contains(v))
    }

    pub fn clip_to_bounds(&self, x: &mut [f64]) {
        for (v, b) in x.iter_mut().zip(&self.dv_bounds) {
            *v = b.clip(*v);
        }
    }

    /// Replaces the nominal environment, e.g. to align it with a scenario set's `p_0`.
    pub fn with_dep_nominal(mut self, p: DepVector) -> Result<Self> {
        check_len("dep_nominal", self.r(), p.len())?;
        self.dep_nominal = p;
        Ok(self)
    }

    pub fn with_dv_noise(mut self, noise: Vec<NoiseSpec>) -> Result<Self> {
        check_len("dv_noise", self.n(), noise.len())?;
        for ns in &noise {
            ns.validate()?;
        }
        self.dv_noise = noise;
        Ok(self)
    }

    pub fn with_dep_noise(mut self, noise: Vec<NoiseSpec>) -> Result<Self> {
        check_len("dep_noise", self.r(), noise.len())?;
        for ns in &noise {
            ns.validate()?;
        }
        self.dep_noise = noise;
        Ok(self)
    }

    pub fn with_dv_bounds(mut self, bounds: Vec<Bounds>) -> Result<Self> {
        check_len("dv_bounds", self.n(), bounds.len())?;
        if let Some(b) = bounds.iter().find(|b| !(b.lower <= b.upper)) {
            return Err(MoropError::Config(format!("invalid bounds {b:?}")));
        }
        self.dv_bounds = bounds;
        Ok(self)
    }
}

/// The alternative solutions: design vectors with their nominal evaluations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoArchive {
    pub ids: Vec<String>,
    pub designs: Vec<DesignVector>,
    pub nominal: Vec<Evaluation>,
}

impl ParetoArchive {
    /// Evaluates every design at the problem's nominal environment.
    pub fn from_designs(problem: &ProblemDef, ids: Vec<String>, designs: Vec<DesignVector>) -> Result<Self> {
        check_len("archive ids", designs.len(), ids.len())?;
        if designs.is_empty() {
            return Err(MoropError::EmptyArchive);
        }
        let nominal = designs
            .iter()
            .map(|x| problem.evaluate_nominal(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { ids, designs, nominal })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(MoropError::DimensionMismatch { what, expected, actual })
    }
}

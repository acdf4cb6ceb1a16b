//! Robustness indices for a set of Pareto-optimal alternatives.
//!
//! * `I_RS` measures sensitivity to small variations: for each objective, the sample
//!   standard deviation plus the absolute mean shift, normalised by the objective's
//!   range over the nominal Pareto front, combined as a Euclidean norm.
//! * `I_RL` measures robustness to large, discretised environment changes:
//!   `I_RL = 1 - I_F * sum_j h_j / rank_j`, where `rank_j` counts the alternatives that
//!   dominate the solution in scenario `j` (plus one) and `I_F` is 1 only if the
//!   solution is feasible in every scenario.
//!
//! Both indices are "smaller is more robust". The pair `(I_RS, I_RL)` places every
//! alternative in the robustness-function space, whose non-dominated subset is
//! returned by [`robust_pareto_filter`].

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MoropError, Result};
use crate::model::{is_feasible, DepVector, Evaluation, ParetoArchive, ProblemDef};
use crate::pareto::{dominates_slice, pareto_front_indices, rank_individuals, ObjectivePoint};
use crate::sampling::{apply_noise, derive_seed, lhs, normal_cdf};

const PROBABILITY_TOLERANCE: f64 = 1e-9;

/// One discrete environment with its probability mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub p: DepVector,
    pub h: f64,
}

/// Discrete environments `p_1..p_N` with masses `h_j`; `p_0` is the most probable one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSet {
    scenarios: Vec<Scenario>,
    initial: usize,
}

impl ScenarioSet {
    /// Validates masses (non-negative, summing to one within 1e-9) and picks `p_0` as
    /// the first scenario of maximum mass.
    pub fn new(scenarios: Vec<Scenario>) -> Result<Self> {
        if scenarios.is_empty() {
            return Err(MoropError::InvalidProbability("scenario set is empty".into()));
        }
        let r = scenarios[0].p.len();
        if let Some(s) = scenarios.iter().find(|s| s.p.len() != r) {
            return Err(MoropError::DimensionMismatch {
                what: "scenario environment vector",
                expected: r,
                actual: s.p.len(),
            });
        }
        if let Some(s) = scenarios.iter().find(|s| !(s.h >= 0.0) || !s.h.is_finite()) {
            return Err(MoropError::InvalidProbability(format!("negative or non-finite mass {}", s.h)));
        }
        let total: f64 = scenarios.iter().map(|s| s.h).sum();
        if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(MoropError::InvalidProbability(format!(
                "masses sum to {total}, expected 1"
            )));
        }
        let mut initial = 0;
        for (j, s) in scenarios.iter().enumerate() {
            if s.h > scenarios[initial].h {
                initial = j;
            }
        }
        Ok(Self { scenarios, initial })
    }

    pub fn scenarios(&self) -> &[Scenario] {
        &self.scenarios
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    /// Index of `p_0`.
    pub fn initial_index(&self) -> usize {
        self.initial
    }

    pub fn initial(&self) -> &Scenario {
        &self.scenarios[self.initial]
    }

    pub fn masses(&self) -> Vec<f64> {
        self.scenarios.iter().map(|s| s.h).collect()
    }
}

/// How [`bin_normal`] turns a normal density into cell masses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BinningMethod {
    /// Density at each cell centre, renormalised over the grid.
    #[default]
    Density,
    /// Exact probability of each cell, renormalised over the truncated range.
    CellMass,
}

/// Discretises `N(mean, std)` for the parameter at `dep_index` into `count` equal-width
/// cells whose centres run from `lower` to `upper`; all other parameters keep the
/// values of `template`.
pub fn bin_normal(
    template: &DepVector,
    dep_index: usize,
    mean: f64,
    std: f64,
    lower: f64,
    upper: f64,
    count: usize,
    method: BinningMethod,
) -> Result<ScenarioSet> {
    if dep_index >= template.len() {
        return Err(MoropError::Config(format!(
            "dep_index {dep_index} out of range for {} environment parameters",
            template.len()
        )));
    }
    if count == 0 || !(std > 0.0) || !(upper >= lower) || (count == 1 && upper != lower) {
        return Err(MoropError::Config(format!(
            "invalid normal binning: count={count}, std={std}, range=[{lower}, {upper}]"
        )));
    }
    let step = if count > 1 { (upper - lower) / (count - 1) as f64 } else { 1.0 };
    let centres: Vec<f64> = (0..count).map(|k| lower + k as f64 * step).collect();
    let weights: Vec<f64> = centres
        .iter()
        .map(|&c| {
            let z = (c - mean) / std;
            match method {
                BinningMethod::Density => (-0.5 * z * z).exp(),
                BinningMethod::CellMass => {
                    let half = 0.5 * step / std;
                    normal_cdf(z + half) - normal_cdf(z - half)
                }
            }
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let scenarios = centres
        .iter()
        .zip(&weights)
        .map(|(&c, &w)| {
            let mut p = template.clone();
            p.0[dep_index] = c;
            Scenario { p, h: w / total }
        })
        .collect();
    ScenarioSet::new(scenarios)
}

/// Per-objective `max` and `min` over the nominal Pareto front at `p_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveExtremes {
    pub max: Vec<f64>,
    pub min: Vec<f64>,
}

impl ObjectiveExtremes {
    pub fn new(max: Vec<f64>, min: Vec<f64>) -> Self {
        Self { max, min }
    }

    /// Extremes over the feasible non-dominated members of `nominal`.
    pub fn from_front(nominal: &[Evaluation]) -> Result<Self> {
        if nominal.is_empty() {
            return Err(MoropError::EmptyArchive);
        }
        let points: Vec<ObjectivePoint> = nominal
            .iter()
            .enumerate()
            .map(|(i, e)| ObjectivePoint::new(i.to_string(), e.f.clone(), is_feasible(e)))
            .collect();
        let front = pareto_front_indices(&points)?;
        if front.is_empty() {
            return Err(MoropError::NoFeasibleSolution);
        }
        let m = nominal[0].f.len();
        let mut max = vec![f64::NEG_INFINITY; m];
        let mut min = vec![f64::INFINITY; m];
        for &i in &front {
            for (k, &v) in nominal[i].f.iter().enumerate() {
                max[k] = max[k].max(v);
                min[k] = min[k].min(v);
            }
        }
        Ok(Self { max, min })
    }

    pub fn ranges(&self) -> Vec<f64> {
        self.max.iter().zip(&self.min).map(|(a, b)| a - b).collect()
    }
}

/// Spread statistics of one solution under small variations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallVariationStats {
    pub i_rs: f64,
    pub sigma: Vec<f64>,
    pub mu: Vec<f64>,
    pub f0: Vec<f64>,
    /// Largest absolute deviation from nominal per objective (`delta f^S`).
    pub delta: Vec<f64>,
}

/// Small-variation robustness index.
///
/// `sigma` uses the `n - 1` divisor. `weights`, when given, scale each objective's
/// squared normalised term; the default is equal importance.
pub fn i_rs(
    samples: &[Evaluation],
    nominal: &Evaluation,
    extremes: &ObjectiveExtremes,
    weights: Option<&[f64]>,
) -> Result<SmallVariationStats> {
    if samples.len() < 2 {
        return Err(MoropError::NotEnoughSamples { needed: 2, got: samples.len() });
    }
    let m = nominal.f.len();
    crate::model::check_len("extremes", m, extremes.max.len())?;
    crate::model::check_len("extremes", m, extremes.min.len())?;
    if let Some(w) = weights {
        crate::model::check_len("objective weights", m, w.len())?;
    }
    if let Some(s) = samples.iter().find(|s| s.f.len() != m) {
        return Err(MoropError::DimensionMismatch { what: "sample objective vector", expected: m, actual: s.f.len() });
    }
    let n = samples.len() as f64;
    let mut sigma = Vec::with_capacity(m);
    let mut mu = Vec::with_capacity(m);
    let mut sum_sq = 0.0;
    for i in 0..m {
        let range = extremes.max[i] - extremes.min[i];
        if !(range > 0.0) {
            return Err(MoropError::ZeroRangeObjective { index: i, value: extremes.max[i] });
        }
        let mean = samples.iter().map(|s| s.f[i]).sum::<f64>() / n;
        let var = samples.iter().map(|s| (s.f[i] - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let sd = var.sqrt();
        let term = (sd + (mean - nominal.f[i]).abs()) / range;
        sum_sq += weights.map_or(1.0, |w| w[i]) * term * term;
        sigma.push(sd);
        mu.push(mean);
    }
    Ok(SmallVariationStats {
        i_rs: sum_sq.sqrt(),
        sigma,
        mu,
        f0: nominal.f.clone(),
        delta: max_deviation(samples, nominal),
    })
}

/// `max_k |f_i(sample_k) - f_i(nominal)|` per objective.
pub fn max_deviation(samples: &[Evaluation], nominal: &Evaluation) -> Vec<f64> {
    (0..nominal.f.len())
        .map(|i| {
            samples
                .iter()
                .map(|s| (s.f[i] - nominal.f[i]).abs())
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Evaluations of one solution under noise, plus the count of samples whose model
/// evaluation failed (those are excluded).
#[derive(Debug, Clone)]
pub struct NoisySamples {
    pub evaluations: Vec<Evaluation>,
    pub failed: usize,
}

/// Draws `n_samples` LHS perturbations of `(x, p)` using the problem's noise specs.
///
/// The LHS has one column per design variable and per environment parameter.
/// Perturbed design variables are not clipped back into their bounds.
pub fn sample_small_variations(
    problem: &ProblemDef,
    x: &[f64],
    p: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<NoisySamples> {
    let n = problem.n();
    let unit = lhs(n_samples, n + problem.r(), seed)?;
    let mut evaluations = Vec::with_capacity(n_samples);
    let mut failed = 0;
    for row in unit.iter_rows() {
        let xs = apply_noise(x, &problem.dv_noise, &row[..n])?;
        let ps = apply_noise(p, &problem.dep_noise, &row[n..])?;
        match problem.evaluate(&xs, &ps) {
            Ok(e) => evaluations.push(e),
            Err(e) if e.is_model_failure() => failed += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(NoisySamples { evaluations, failed })
}

/// `I_RS` for every archive member, with per-solution seeds derived from `seed` and the
/// archive position so the result does not depend on scheduling.
pub fn assess_small_variations(
    problem: &ProblemDef,
    archive: &ParetoArchive,
    extremes: &ObjectiveExtremes,
    n_samples: usize,
    seed: u64,
    weights: Option<&[f64]>,
) -> Result<Vec<(SmallVariationStats, usize)>> {
    (0..archive.len())
        .into_par_iter()
        .map(|k| {
            let samples = sample_small_variations(
                problem,
                &archive.designs[k],
                &problem.dep_nominal,
                n_samples,
                derive_seed(seed, k as u64),
            )?;
            if samples.failed > 0 {
                warn!(
                    "solution {}: {} of {} noisy samples failed to evaluate and were dropped",
                    archive.ids[k], samples.failed, n_samples
                );
            }
            let stats = i_rs(&samples.evaluations, &archive.nominal[k], extremes, weights)?;
            Ok((stats, samples.failed))
        })
        .collect()
}

/// Outcome of evaluating one solution in one scenario.
pub type ScenarioOutcome = std::result::Result<Evaluation, MoropError>;

/// `[solution][scenario]` evaluations at nominal design values (no small noise).
#[derive(Debug, Clone)]
pub struct ScenarioEvaluations {
    pub outcomes: Vec<Vec<ScenarioOutcome>>,
}

impl ScenarioEvaluations {
    pub fn evaluate(problem: &ProblemDef, archive: &ParetoArchive, scenarios: &ScenarioSet) -> Result<Self> {
        let jobs: Vec<(usize, usize)> = (0..archive.len())
            .flat_map(|k| (0..scenarios.len()).map(move |j| (k, j)))
            .collect();
        let flat: Vec<ScenarioOutcome> = jobs
            .par_iter()
            .map(|&(k, j)| problem.evaluate(&archive.designs[k], &scenarios.scenarios()[j].p))
            .collect();
        if let Some(Err(e)) = flat.iter().find(|o| matches!(o, Err(e) if !e.is_model_failure())) {
            return Err(e.clone());
        }
        let n = scenarios.len();
        let mut outcomes = Vec::with_capacity(archive.len());
        let mut it = flat.into_iter();
        for _ in 0..archive.len() {
            outcomes.push(it.by_ref().take(n).collect());
        }
        Ok(Self { outcomes })
    }
}

/// Feasibility index: 1 iff every scenario evaluation succeeded and is feasible.
///
/// A model failure counts as infeasible and is logged.
pub fn feasibility_index(outcomes: &[ScenarioOutcome]) -> u8 {
    let mut all = true;
    for (j, o) in outcomes.iter().enumerate() {
        match o {
            Ok(e) => all &= is_feasible(e),
            Err(err) => {
                warn!("scenario {}: evaluation failed ({err}); treating as infeasible", j + 1);
                all = false;
            }
        }
    }
    u8::from(all)
}

/// `I_F` for a single design evaluated directly.
pub fn i_f(problem: &ProblemDef, x: &[f64], scenarios: &ScenarioSet) -> Result<u8> {
    let outcomes: Vec<ScenarioOutcome> = scenarios
        .scenarios()
        .iter()
        .map(|s| problem.evaluate(x, &s.p))
        .collect();
    if let Some(Err(e)) = outcomes.iter().find(|o| matches!(o, Err(e) if !e.is_model_failure())) {
        return Err(e.clone());
    }
    Ok(feasibility_index(&outcomes))
}

/// Large-variation indices of one solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeVariationRecord {
    pub i_f: u8,
    /// `1 / rank` per scenario; `None` where the evaluation failed.
    pub i_p: Vec<Option<f64>>,
    pub ranks: Vec<Option<usize>>,
    pub i_rl: f64,
    /// Largest absolute deviation from nominal per objective over the scenarios (`delta f^L`).
    pub delta: Vec<f64>,
}

/// `I_F`, `I_P` and `I_RL` for every archive member.
///
/// In each scenario, every solution is ranked against the whole archive. With
/// `include_infeasible` set, infeasible alternatives also count as dominators.
pub fn assess_large_variations(
    archive: &ParetoArchive,
    evals: &ScenarioEvaluations,
    scenarios: &ScenarioSet,
    include_infeasible: bool,
) -> Result<Vec<LargeVariationRecord>> {
    let total: f64 = scenarios.masses().iter().sum();
    if (total - 1.0).abs() > PROBABILITY_TOLERANCE {
        return Err(MoropError::InvalidProbability(format!("masses sum to {total}, expected 1")));
    }
    crate::model::check_len("scenario evaluations", archive.len(), evals.outcomes.len())?;
    let n_sol = archive.len();
    let n_sc = scenarios.len();
    let mut ranks = vec![vec![None; n_sc]; n_sol];
    for j in 0..n_sc {
        let mut members = Vec::new();
        let mut points = Vec::new();
        for k in 0..n_sol {
            if let Ok(e) = &evals.outcomes[k][j] {
                members.push(k);
                points.push(ObjectivePoint::new(archive.ids[k].clone(), e.f.clone(), is_feasible(e)));
            }
        }
        if points.is_empty() {
            continue;
        }
        let r = rank_individuals(&points, include_infeasible)?;
        for (&k, &rank) in members.iter().zip(&r.ranks) {
            ranks[k][j] = Some(rank);
        }
    }

    let masses = scenarios.masses();
    Ok((0..n_sol)
        .map(|k| {
            let i_f = feasibility_index(&evals.outcomes[k]);
            let i_p: Vec<Option<f64>> = ranks[k].iter().map(|r| r.map(|r| 1.0 / r as f64)).collect();
            // 1 - sum h_j I_P_j written as sum h_j (1 - I_P_j), exact when every I_P_j = 1
            let shortfall: f64 = i_p.iter().zip(&masses).map(|(ip, h)| h * (1.0 - ip.unwrap_or(0.0))).sum();
            let i_rl = if i_f == 1 { shortfall.clamp(0.0, 1.0) } else { 1.0 };
            let ok: Vec<Evaluation> = evals.outcomes[k].iter().filter_map(|o| o.as_ref().ok().cloned()).collect();
            LargeVariationRecord {
                i_f,
                i_p,
                ranks: ranks[k].clone(),
                i_rl,
                delta: max_deviation(&ok, &archive.nominal[k]),
            }
        })
        .collect())
}

/// `I_RL` and per-scenario `I_P` of the archive member `id`.
pub fn i_rl(
    id: &str,
    archive: &ParetoArchive,
    problem: &ProblemDef,
    scenarios: &ScenarioSet,
    include_infeasible: bool,
) -> Result<LargeVariationRecord> {
    let k = archive
        .ids
        .iter()
        .position(|i| i == id)
        .ok_or_else(|| MoropError::SchemaMismatch(format!("solution {id} not in archive")))?;
    let evals = ScenarioEvaluations::evaluate(problem, archive, scenarios)?;
    Ok(assess_large_variations(archive, &evals, scenarios, include_infeasible)?.swap_remove(k))
}

/// All robustness results for one alternative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRecord {
    pub id: String,
    pub x: Vec<f64>,
    pub f0: Vec<f64>,
    pub small: SmallVariationStats,
    pub failed_samples: usize,
    pub large: LargeVariationRecord,
}

impl RobustnessRecord {
    pub fn i_rs(&self) -> f64 {
        self.small.i_rs
    }

    pub fn i_rl(&self) -> f64 {
        self.large.i_rl
    }
}

/// A solution's position in the robustness-function space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfPoint {
    pub id: String,
    pub i_rs: f64,
    pub i_rl: f64,
}

pub fn rf_space(records: &[RobustnessRecord]) -> Vec<RfPoint> {
    records
        .iter()
        .map(|r| RfPoint { id: r.id.clone(), i_rs: r.i_rs(), i_rl: r.i_rl() })
        .collect()
}

/// Ids of the RF-space points not dominated when minimising both `I_RS` and `I_RL`.
pub fn robust_pareto_filter(points: &[RfPoint]) -> Vec<String> {
    points
        .iter()
        .filter(|s| {
            !points
                .iter()
                .any(|t| dominates_slice(&[t.i_rs, t.i_rl], &[s.i_rs, s.i_rl]))
        })
        .map(|p| p.id.clone())
        .collect()
}

//! NSGA-II with real-coded SBX crossover, polynomial mutation and the
//! feasibility-first constraint rule.
//!
//! Constraint handling: a feasible individual beats any infeasible one, two infeasible
//! individuals compare by total violation, and two feasible ones by Pareto dominance.
//! Individuals whose evaluation failed are treated as infinitely infeasible.
//! Offspring are clipped to the design-variable bounds.

use log::{debug, info};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{MoropError, Result};
use crate::model::{is_feasible, Bounds, DesignVector, Evaluation, ParetoArchive, ProblemDef};
use crate::pareto::dominates_slice;

/// Components closer than this collapse to one archive member.
const DEDUP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_prob: f64,
    pub crossover_eta: f64,
    /// Per-variable mutation probability; `None` means `1 / n`.
    pub mutation_prob: Option<f64>,
    pub mutation_eta: f64,
    pub seed: u64,
    pub feasibility_first: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 200,
            generations: 250,
            crossover_prob: 0.9,
            crossover_eta: 15.0,
            mutation_prob: None,
            mutation_eta: 20.0,
            seed: 0,
            feasibility_first: true,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(MoropError::Config(msg));
        if self.population_size < 4 || self.population_size % 2 != 0 {
            return bad(format!("population_size must be even and >= 4 (got {})", self.population_size));
        }
        if !(0.0..=1.0).contains(&self.crossover_prob) {
            return bad(format!("crossover_prob {} outside [0, 1]", self.crossover_prob));
        }
        if let Some(p) = self.mutation_prob {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("mutation_prob {p} outside [0, 1]"));
            }
        }
        if !(self.crossover_eta > 0.0 && self.mutation_eta > 0.0) {
            return bad("distribution indices must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct Individual {
    x: Vec<f64>,
    eval: Option<Evaluation>,
    /// Objectives used for sorting; +inf when the evaluation failed.
    f: Vec<f64>,
    violation: f64,
}

impl Individual {
    fn new(x: Vec<f64>, outcome: Result<Evaluation>, m: usize) -> Result<Self> {
        match outcome {
            Ok(e) => Ok(Self { f: e.f.clone(), violation: e.total_violation(), x, eval: Some(e) }),
            Err(e) if e.is_model_failure() => {
                debug!("evaluation failed at {x:?}: {e}");
                Ok(Self { f: vec![f64::INFINITY; m], violation: f64::INFINITY, x, eval: None })
            }
            Err(e) => Err(e),
        }
    }

    fn feasible(&self) -> bool {
        self.eval.as_ref().is_some_and(is_feasible)
    }
}

/// Constrained dominance between two individuals.
fn constrained_dominates(a: &Individual, b: &Individual, feasibility_first: bool) -> bool {
    if !feasibility_first {
        return dominates_slice(&a.f, &b.f);
    }
    match (a.feasible(), b.feasible()) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.violation < b.violation,
        (true, true) => dominates_slice(&a.f, &b.f),
    }
}

/// Non-dominated sorting over `n` items given a dominance predicate.
///
/// Returns fronts in order; each front lists indices in increasing order.
pub fn fast_nondominated_sort_by(n: usize, dominates: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut dominated_by_count = vec![0usize; n];
    let mut dominating: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(i, j) {
                dominating[i].push(j);
                dominated_by_count[j] += 1;
            } else if dominates(j, i) {
                dominating[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominating[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Plain Pareto non-dominated sorting of objective vectors.
pub fn fast_nondominated_sort(objectives: &[Vec<f64>]) -> Vec<Vec<usize>> {
    fast_nondominated_sort_by(objectives.len(), |i, j| dominates_slice(&objectives[i], &objectives[j]))
}

/// Crowding distance of each member of one front.
///
/// Per objective, the two boundary members get +inf and interior members accumulate the
/// normalised gap between their neighbours. Objectives with zero or non-finite range are
/// skipped. Exact duplicates share one distance: the first copy keeps it and the
/// later copies get zero.
pub fn crowding_distance(front: &[&[f64]]) -> Vec<f64> {
    let n = front.len();
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let mut unique: Vec<usize> = Vec::with_capacity(n);
    let mut duplicate_of = vec![None; n];
    for i in 0..n {
        match unique.iter().find(|&&u| front[u] == front[i]) {
            Some(&u) => duplicate_of[i] = Some(u),
            None => unique.push(i),
        }
    }
    let mut dist = vec![0.0; n];
    if unique.len() <= 2 {
        for &u in &unique {
            dist[u] = f64::INFINITY;
        }
    } else {
        let m = front[0].len();
        for k in 0..m {
            let mut order = unique.clone();
            order.sort_by(|&a, &b| front[a][k].total_cmp(&front[b][k]).then(a.cmp(&b)));
            let lo = front[order[0]][k];
            let hi = front[order[order.len() - 1]][k];
            dist[order[0]] = f64::INFINITY;
            dist[order[order.len() - 1]] = f64::INFINITY;
            let range = hi - lo;
            if !(range > 0.0 && range.is_finite()) {
                continue;
            }
            for w in order.windows(3) {
                dist[w[1]] += (front[w[2]][k] - front[w[0]][k]) / range;
            }
        }
    }
    for i in 0..n {
        if duplicate_of[i].is_some() {
            dist[i] = 0.0;
        }
    }
    dist
}

/// Rank (front index, 0 = best) and crowding distance of one population member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fitness {
    pub rank: usize,
    pub crowding: f64,
    pub feasible: bool,
}

/// Binary tournament: feasible beats infeasible (when enabled), then lower rank, then
/// larger crowding distance; ties go to the first contestant.
pub fn tournament_winner(a: Fitness, b: Fitness, feasibility_first: bool) -> bool {
    if feasibility_first && a.feasible != b.feasible {
        return a.feasible;
    }
    if a.rank != b.rank {
        return a.rank < b.rank;
    }
    a.crowding >= b.crowding
}

fn sbx(rng: &mut ChaCha8Rng, x1: f64, x2: f64, b: &Bounds, eta: f64) -> (f64, f64) {
    if (x1 - x2).abs() <= 1e-14 || b.width() <= 0.0 {
        return (x1, x2);
    }
    let (y1, y2) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
    let u: f64 = rng.random();
    let spread = |beta: f64| {
        let alpha = 2.0 - beta.powf(-(eta + 1.0));
        if u <= 1.0 / alpha {
            (u * alpha).powf(1.0 / (eta + 1.0))
        } else {
            (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
        }
    };
    let bq1 = spread(1.0 + 2.0 * (y1 - b.lower) / (y2 - y1));
    let bq2 = spread(1.0 + 2.0 * (b.upper - y2) / (y2 - y1));
    let c1 = b.clip(0.5 * ((y1 + y2) - bq1 * (y2 - y1)));
    let c2 = b.clip(0.5 * ((y1 + y2) + bq2 * (y2 - y1)));
    if rng.random_bool(0.5) {
        (c2, c1)
    } else {
        (c1, c2)
    }
}

fn polynomial_mutation(rng: &mut ChaCha8Rng, y: f64, b: &Bounds, eta: f64) -> f64 {
    let width = b.width();
    if width <= 0.0 {
        return y;
    }
    let d1 = (y - b.lower) / width;
    let d2 = (b.upper - y) / width;
    let u: f64 = rng.random();
    let power = 1.0 / (eta + 1.0);
    let dq = if u <= 0.5 {
        let v = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta + 1.0);
        v.powf(power) - 1.0
    } else {
        let v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta + 1.0);
        1.0 - v.powf(power)
    };
    b.clip(y + dq * width)
}

/// Per-generation snapshot. `front` holds the feasible first front of the population;
/// `best` is the non-dominated set of every feasible first-front member seen so far.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub front: Vec<Vec<f64>>,
    pub best: Vec<Vec<f64>>,
    pub feasible: usize,
    pub failed: usize,
}

struct Engine<'a> {
    problem: &'a ProblemDef,
    config: &'a GaConfig,
    rng: ChaCha8Rng,
}

impl Engine<'_> {
    fn evaluate(&self, xs: Vec<Vec<f64>>) -> Result<Vec<Individual>> {
        let p = &self.problem.dep_nominal;
        let m = self.problem.m();
        let outcomes: Vec<Result<Evaluation>> = xs.par_iter().map(|x| self.problem.evaluate(x, p)).collect();
        xs.into_iter().zip(outcomes).map(|(x, o)| Individual::new(x, o, m)).collect()
    }

    fn fitness(&self, pop: &[Individual]) -> (Vec<Vec<usize>>, Vec<Fitness>) {
        let ff = self.config.feasibility_first;
        let fronts = fast_nondominated_sort_by(pop.len(), |i, j| constrained_dominates(&pop[i], &pop[j], ff));
        let mut fit = vec![Fitness { rank: 0, crowding: 0.0, feasible: false }; pop.len()];
        for (rank, front) in fronts.iter().enumerate() {
            let objs: Vec<&[f64]> = front.iter().map(|&i| pop[i].f.as_slice()).collect();
            for (&i, d) in front.iter().zip(crowding_distance(&objs)) {
                fit[i] = Fitness { rank, crowding: d, feasible: pop[i].feasible() };
            }
        }
        (fronts, fit)
    }

    fn select(&mut self, fit: &[Fitness]) -> usize {
        let a = self.rng.random_range(0..fit.len());
        let b = self.rng.random_range(0..fit.len());
        if tournament_winner(fit[a], fit[b], self.config.feasibility_first) {
            a
        } else {
            b
        }
    }

    fn offspring(&mut self, pop: &[Individual], fit: &[Fitness]) -> Vec<Vec<f64>> {
        let n = self.problem.n();
        let bounds = &self.problem.dv_bounds;
        let pm = self.config.mutation_prob.unwrap_or(1.0 / n as f64);
        let mut children = Vec::with_capacity(pop.len());
        while children.len() < pop.len() {
            let p1 = self.select(fit);
            let p2 = self.select(fit);
            let mut c1 = pop[p1].x.clone();
            let mut c2 = pop[p2].x.clone();
            if self.rng.random_bool(self.config.crossover_prob) {
                for v in 0..n {
                    if self.rng.random_bool(0.5) {
                        let (a, b) = sbx(&mut self.rng, c1[v], c2[v], &bounds[v], self.config.crossover_eta);
                        c1[v] = a;
                        c2[v] = b;
                    }
                }
            }
            for c in [&mut c1, &mut c2] {
                for v in 0..n {
                    if self.rng.random_bool(pm) {
                        c[v] = polynomial_mutation(&mut self.rng, c[v], &bounds[v], self.config.mutation_eta);
                    }
                }
                self.problem.clip_to_bounds(c);
            }
            children.push(c1);
            if children.len() < pop.len() {
                children.push(c2);
            }
        }
        children
    }

    fn survivors(&self, combined: Vec<Individual>, size: usize) -> Vec<Individual> {
        let (fronts, fit) = self.fitness(&combined);
        let mut keep: Vec<usize> = Vec::with_capacity(size);
        for front in fronts {
            if keep.len() + front.len() <= size {
                keep.extend(front);
            } else {
                let mut rest = front;
                rest.sort_by(|&a, &b| fit[b].crowding.total_cmp(&fit[a].crowding).then(a.cmp(&b)));
                keep.extend(rest.into_iter().take(size - keep.len()));
            }
            if keep.len() == size {
                break;
            }
        }
        keep.sort_unstable();
        let mut slots: Vec<Option<Individual>> = combined.into_iter().map(Some).collect();
        keep.into_iter().map(|i| slots[i].take().expect("index kept once")).collect()
    }

    fn snapshot(
        &self,
        trace: bool,
        generation: usize,
        pop: &[Individual],
        fronts: &[Vec<usize>],
        previous: Option<&GenerationRecord>,
    ) -> GenerationRecord {
        if !trace {
            return GenerationRecord { generation, front: Vec::new(), best: Vec::new(), feasible: 0, failed: 0 };
        }
        let front: Vec<Vec<f64>> = fronts
            .first()
            .map(|f| f.iter().filter(|&&i| pop[i].feasible()).map(|&i| pop[i].f.clone()).collect())
            .unwrap_or_default();
        let mut best: Vec<Vec<f64>> = match previous {
            Some(r) => r.best.iter().filter(|b| !front.iter().any(|f| dominates_slice(f, b))).cloned().collect(),
            None => Vec::new(),
        };
        for f in &front {
            if !best.iter().any(|b| dominates_slice(b, f) || b == f) {
                best.push(f.clone());
            }
        }
        GenerationRecord {
            generation,
            front,
            best,
            feasible: pop.iter().filter(|i| i.feasible()).count(),
            failed: pop.iter().filter(|i| i.eval.is_none()).count(),
        }
    }
}

/// Result of a traced run: the archive plus one record per generation (index 0 is the
/// initial population).
#[derive(Debug, Clone)]
pub struct OptimizeTrace {
    pub archive: ParetoArchive,
    pub history: Vec<GenerationRecord>,
}

/// Runs NSGA-II at the problem's nominal environment.
pub fn optimize(problem: &ProblemDef, config: &GaConfig) -> Result<ParetoArchive> {
    Ok(run(problem, config, None, false)?.archive)
}

/// Runs NSGA-II, optionally starting from a given population (padded or truncated to
/// `population_size`; padding draws uniformly inside the bounds).
pub fn optimize_traced(
    problem: &ProblemDef,
    config: &GaConfig,
    initial: Option<Vec<DesignVector>>,
) -> Result<OptimizeTrace> {
    run(problem, config, initial, true)
}

fn run(
    problem: &ProblemDef,
    config: &GaConfig,
    initial: Option<Vec<DesignVector>>,
    trace: bool,
) -> Result<OptimizeTrace> {
    config.validate()?;
    let mut engine = Engine { problem, config, rng: ChaCha8Rng::seed_from_u64(config.seed) };
    let size = config.population_size;

    let mut xs: Vec<Vec<f64>> = initial.unwrap_or_default().into_iter().map(|d| d.0).take(size).collect();
    for x in &mut xs {
        crate::model::check_len("initial design", problem.n(), x.len())?;
        problem.clip_to_bounds(x);
    }
    while xs.len() < size {
        let x = problem
            .dv_bounds
            .iter()
            .map(|b| if b.width() > 0.0 { engine.rng.random_range(b.lower..=b.upper) } else { b.lower })
            .collect();
        xs.push(x);
    }

    let mut pop = engine.evaluate(xs)?;
    let (fronts, mut fit) = engine.fitness(&pop);
    let mut history = vec![engine.snapshot(trace, 0, &pop, &fronts, None)];

    for generation in 1..=config.generations {
        let children = engine.offspring(&pop, &fit);
        let mut combined = pop;
        combined.extend(engine.evaluate(children)?);
        pop = engine.survivors(combined, size);
        let (fronts, f) = engine.fitness(&pop);
        fit = f;
        let rec = engine.snapshot(trace, generation, &pop, &fronts, history.last());
        if trace && (generation % 50 == 0 || generation == config.generations) {
            debug!(
                "generation {generation}: {} feasible, {} failed, first front {}",
                rec.feasible,
                rec.failed,
                rec.front.len()
            );
        }
        if trace {
            history.push(rec);
        }
    }

    let archive = final_archive(problem, &engine, &pop)?;
    info!("NSGA-II finished: {} archive members", archive.len());
    Ok(OptimizeTrace { archive, history })
}

fn final_archive(problem: &ProblemDef, engine: &Engine<'_>, pop: &[Individual]) -> Result<ParetoArchive> {
    let (fronts, _) = engine.fitness(pop);
    let mut members: Vec<&Individual> = fronts
        .first()
        .map(|f| f.iter().map(|&i| &pop[i]).filter(|ind| ind.feasible()).collect())
        .unwrap_or_default();
    if members.is_empty() {
        return Err(MoropError::NoFeasibleSolution);
    }
    members.sort_by(|a, b| {
        a.f.iter()
            .zip(&b.f)
            .map(|(x, y)| x.total_cmp(y))
            .chain(a.x.iter().zip(&b.x).map(|(x, y)| x.total_cmp(y)))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut unique: Vec<&Individual> = Vec::with_capacity(members.len());
    for ind in members {
        let dup = unique.iter().any(|u| {
            u.x.iter().zip(&ind.x).all(|(a, b)| (a - b).abs() <= DEDUP_TOLERANCE)
        });
        if !dup {
            unique.push(ind);
        }
    }
    debug_assert!(unique.iter().all(|u| problem.within_bounds(&u.x)));
    let width = unique.len().to_string().len().max(3);
    Ok(ParetoArchive {
        ids: (0..unique.len()).map(|k| format!("s{k:0width$}")).collect(),
        designs: unique.iter().map(|u| DesignVector(u.x.clone())).collect(),
        nominal: unique.iter().map(|u| u.eval.clone().expect("feasible members are evaluated")).collect(),
    })
}

/// Area dominated by a set of 2-objective points and bounded by `reference`.
pub fn hypervolume_2d(points: &[Vec<f64>], reference: [f64; 2]) -> f64 {
    let mut pts: Vec<[f64; 2]> = points
        .iter()
        .filter(|p| p[0] < reference[0] && p[1] < reference[1])
        .map(|p| [p[0], p[1]])
        .collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut best_y = reference[1];
    for p in pts {
        if p[1] < best_y {
            area += (reference[0] - p[0]) * (best_y - p[1]);
            best_y = p[1];
        }
    }
    area
}

//! Run configuration, end-to-end orchestration and the CSV/JSON artifacts.
//!
//! Stages: optimize (or load an archive) → small-variation sampling and `I_RS` →
//! scenario evaluation and `I_RL` → RF-space → robust-Pareto filter.
//!
//! Artifacts written to the output directory:
//!
//! | file | content |
//! |---|---|
//! | `pareto.csv` | id, design variables, nominal objectives and constraints |
//! | `robustness.csv` | per-solution indices and spread statistics |
//! | `rfspace.csv` | id, `I_RS`, `I_RL` |
//! | `scenario_fronts.csv` | every archive member evaluated in every scenario |
//! | `summary.json` | counts and the robust-Pareto ids, re-derivable by [`report`] |
//! | `run_info.json` | run metadata and wall-clock timings |
//!
//! Floats are written with 17 significant digits so they parse back bit-exactly.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};

use crate::error::{MoropError, Result};
use crate::model::{check_len, is_feasible, Bounds, DepVector, DesignVector, NoiseSpec, ParetoArchive, ProblemDef};
use crate::nsga2::{optimize, GaConfig};
use crate::problems::bemt::BemtOptions;
use crate::problems::polar::load_polar;
use crate::problems::{builtin, numerical, wind};
use crate::robustness::{
    assess_large_variations, assess_small_variations, bin_normal, rf_space, robust_pareto_filter, BinningMethod,
    ObjectiveExtremes, RfPoint, RobustnessRecord, Scenario, ScenarioEvaluations, ScenarioSet,
};
use crate::sampling::derive_seed;

pub const DEFAULT_SAMPLES: usize = 1000;

/// Problem selection plus optional overrides of the built-in defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    /// One of [`crate::problems::BUILTIN_EVALUATORS`].
    pub evaluator: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dep_nominal: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dv_bounds: Option<Vec<Bounds>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dv_noise: Option<Vec<NoiseSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dep_noise: Option<Vec<NoiseSpec>>,
    /// Airfoil polar CSV for `bemt_rotor`; the bundled S809 table otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polar_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bemt: Option<BemtOptions>,
}

/// Where the environment scenarios come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioConfig {
    Table {
        entries: Vec<Scenario>,
    },
    /// Normal distribution of one environment parameter binned into equal-width cells;
    /// the other parameters keep their nominal values.
    BinNormal {
        dep_index: usize,
        mean: f64,
        std: f64,
        lower: f64,
        upper: f64,
        count: usize,
        #[serde(default)]
        method: BinningMethod,
    },
    /// The nine tabulated wind speeds of the rotor problem.
    WindSpeedTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemConfig,
    pub scenarios: ScenarioConfig,
    #[serde(default)]
    pub ga: GaConfig,
    /// Existing archive CSV; when set, optimization is skipped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub archive: Option<PathBuf>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Drives every random stream of the run; overrides `ga.seed`.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default = "default_true")]
    pub include_infeasible: bool,
    /// Per-objective weights of the `I_RS` terms; equal weights when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_true() -> bool {
    true
}

impl RunConfig {
    /// Parses a JSON config. Relative paths inside it resolve against `base_dir`.
    pub fn from_json(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| MoropError::Config(format!("run config: {e}")))?;
        if let Some(base) = base_dir {
            let fix = |p: &mut PathBuf| {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            };
            cfg.archive.as_mut().map(fix);
            cfg.out_dir.as_mut().map(fix);
            cfg.problem.polar_path.as_mut().map(fix);
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| MoropError::Io(format!("reading config {}: {e}", path.display())))?;
        Self::from_json(&text, path.parent())
    }

    /// Builds and cross-checks the problem and scenario set without evaluating anything.
    ///
    /// The problem's nominal environment is aligned to the scenario set's `p_0`.
    pub fn prepare(&self) -> Result<(ProblemDef, ScenarioSet)> {
        if self.samples < 2 {
            return Err(MoropError::Config(format!("samples must be >= 2 (got {})", self.samples)));
        }
        if self.threads == Some(0) {
            return Err(MoropError::Config("threads must be >= 1".into()));
        }
        self.ga.validate()?;
        let mut problem = build_problem(&self.problem)?;
        let scenarios = build_scenarios(&self.scenarios, &problem.dep_nominal)?;
        check_len("scenario environment vector", problem.r(), scenarios.initial().p.len())?;
        if let Some(w) = &self.weights {
            check_len("objective weights", problem.m(), w.len())?;
            if w.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(MoropError::Config("weights must be finite and non-negative".into()));
            }
        }
        let p0 = &scenarios.initial().p;
        if *p0 != problem.dep_nominal {
            info!("nominal environment {:?} replaced by the most probable scenario {:?}", problem.dep_nominal.0, p0.0);
            problem = problem.with_dep_nominal(p0.clone())?;
        }
        Ok((problem, scenarios))
    }
}

pub fn build_problem(cfg: &ProblemConfig) -> Result<ProblemDef> {
    let mut problem = match cfg.evaluator.as_str() {
        "bemt_rotor" => {
            let polar = match &cfg.polar_path {
                Some(p) => load_polar(p)?,
                None => crate::problems::polar::PolarTable::s809(),
            };
            let opts = cfg.bemt.unwrap_or_default();
            if opts.n_elements == 0 || !(opts.relaxation > 0.0 && opts.relaxation <= 1.0) {
                return Err(MoropError::Config("bemt: n_elements >= 1 and relaxation in (0, 1] required".into()));
            }
            wind::wind_turbine_problem_with(polar, opts)?
        }
        "numerical_eg1" => {
            if cfg.polar_path.is_some() || cfg.bemt.is_some() {
                return Err(MoropError::Config("polar_path and bemt apply only to bemt_rotor".into()));
            }
            numerical::numerical_problem(5.0, 0.1)?
        }
        other => builtin(other)?,
    };
    if let Some(p) = &cfg.dep_nominal {
        problem = problem.with_dep_nominal(DepVector(p.clone()))?;
    }
    if let Some(b) = &cfg.dv_bounds {
        problem = problem.with_dv_bounds(b.clone())?;
    }
    if let Some(n) = &cfg.dv_noise {
        problem = problem.with_dv_noise(n.clone())?;
    }
    if let Some(n) = &cfg.dep_noise {
        problem = problem.with_dep_noise(n.clone())?;
    }
    Ok(problem)
}

pub fn build_scenarios(cfg: &ScenarioConfig, nominal: &DepVector) -> Result<ScenarioSet> {
    match cfg {
        ScenarioConfig::Table { entries } => ScenarioSet::new(entries.clone()),
        ScenarioConfig::BinNormal { dep_index, mean, std, lower, upper, count, method } => {
            bin_normal(nominal, *dep_index, *mean, *std, *lower, *upper, *count, *method)
        }
        ScenarioConfig::WindSpeedTable => {
            if nominal.len() != wind::NOMINAL_ENVIRONMENT.len() {
                return Err(MoropError::Config("wind_speed_table needs the rotor environment vector".into()));
            }
            wind::wind_scenarios_around(nominal)
        }
    }
}

/// Counts and the robust-Pareto ids; everything here is re-derivable from the CSVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub archive_size: usize,
    pub scenario_count: usize,
    pub feasible_in_all_scenarios: usize,
    pub infeasible_in_some_scenario: usize,
    pub failed_noise_samples: usize,
    pub robust_pareto: Vec<String>,
}

impl Summary {
    fn from_parts(records: &[RfPoint], i_f: &[u8], failed: &[usize], scenario_count: usize) -> Self {
        let feasible = i_f.iter().filter(|&&v| v == 1).count();
        Self {
            archive_size: records.len(),
            scenario_count,
            feasible_in_all_scenarios: feasible,
            infeasible_in_some_scenario: records.len() - feasible,
            failed_noise_samples: failed.iter().sum(),
            robust_pareto: robust_pareto_filter(records),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub optimize_ms: f64,
    pub small_variations_ms: f64,
    pub large_variations_ms: f64,
    pub total_ms: f64,
}

/// Run metadata; the only artifact that differs between identical runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub mode: String,
    pub problem: String,
    pub seed: u64,
    pub samples: usize,
    pub threads: Option<usize>,
    pub timings: Timings,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub problem: ProblemDef,
    pub scenarios: ScenarioSet,
    pub archive: ParetoArchive,
    pub evaluations: ScenarioEvaluations,
    pub records: Vec<RobustnessRecord>,
    pub rf_points: Vec<RfPoint>,
    pub summary: Summary,
    pub info: RunInfo,
}

/// Small- and large-variation assessment of an existing archive.
///
/// Noise samples for archive member `k` use the seed `derive_seed(seed, k)`.
pub fn assess_archive(
    problem: &ProblemDef,
    scenarios: &ScenarioSet,
    archive: &ParetoArchive,
    samples: usize,
    seed: u64,
    include_infeasible: bool,
    weights: Option<&[f64]>,
) -> Result<(Vec<RobustnessRecord>, ScenarioEvaluations, Timings)> {
    if archive.is_empty() {
        return Err(MoropError::EmptyArchive);
    }
    let t = Instant::now();
    let extremes = ObjectiveExtremes::from_front(&archive.nominal)?;
    let small = assess_small_variations(problem, archive, &extremes, samples, seed, weights)?;
    let small_ms = t.elapsed().as_secs_f64() * 1e3;

    let t = Instant::now();
    let evaluations = ScenarioEvaluations::evaluate(problem, archive, scenarios)?;
    let large = assess_large_variations(archive, &evaluations, scenarios, include_infeasible)?;
    let large_ms = t.elapsed().as_secs_f64() * 1e3;

    let records = small
        .into_iter()
        .zip(large)
        .enumerate()
        .map(|(k, ((stats, failed), large))| RobustnessRecord {
            id: archive.ids[k].clone(),
            x: archive.designs[k].0.clone(),
            f0: archive.nominal[k].f.clone(),
            small: stats,
            failed_samples: failed,
            large,
        })
        .collect();
    let timings = Timings { small_variations_ms: small_ms, large_variations_ms: large_ms, ..Timings::default() };
    Ok((records, evaluations, timings))
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| MoropError::Config(format!("thread pool: {e}")))?
            .install(f),
    }
}

/// Runs the whole pipeline and, when `out_dir` is set, writes the artifacts.
pub fn run_pipeline(config: &RunConfig) -> Result<RunReport> {
    match &config.archive {
        Some(path) => analyze_archive(path, config),
        None => execute(config, None),
    }
}

/// Robustness stages only, on an archive CSV (`id` followed by the design variables).
pub fn analyze_archive(archive_path: impl AsRef<Path>, config: &RunConfig) -> Result<RunReport> {
    execute(config, Some(archive_path.as_ref()))
}

fn execute(config: &RunConfig, archive_path: Option<&Path>) -> Result<RunReport> {
    let start = Instant::now();
    let (problem, scenarios) = config.prepare()?;
    if let Some(dir) = &config.out_dir {
        fs::create_dir_all(dir).map_err(|e| MoropError::Io(format!("creating {}: {e}", dir.display())))?;
    }
    let report = with_threads(config.threads, || {
        let t = Instant::now();
        let (archive, mode) = match archive_path {
            Some(path) => {
                let (ids, designs) = read_archive_csv(path, &problem)?;
                (ParetoArchive::from_designs(&problem, ids, designs)?, "analyze")
            }
            None => {
                let ga = GaConfig { seed: config.seed, ..config.ga.clone() };
                (optimize(&problem, &ga)?, "run")
            }
        };
        let optimize_ms = if mode == "run" { t.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
        info!("{mode}: {} alternatives, {} scenarios", archive.len(), scenarios.len());

        let (records, evaluations, mut timings) = assess_archive(
            &problem,
            &scenarios,
            &archive,
            config.samples,
            derive_seed(config.seed, 1),
            config.include_infeasible,
            config.weights.as_deref(),
        )?;
        timings.optimize_ms = optimize_ms;
        let rf_points = rf_space(&records);
        let i_f: Vec<u8> = records.iter().map(|r| r.large.i_f).collect();
        let failed: Vec<usize> = records.iter().map(|r| r.failed_samples).collect();
        let summary = Summary::from_parts(&rf_points, &i_f, &failed, scenarios.len());
        Ok(RunReport {
            problem: problem.clone(),
            scenarios: scenarios.clone(),
            archive,
            evaluations,
            records,
            rf_points,
            summary,
            info: RunInfo {
                mode: mode.into(),
                problem: problem.name.clone(),
                seed: config.seed,
                samples: config.samples,
                threads: config.threads,
                timings,
            },
        })
    });
    let mut report = report?;
    report.info.timings.total_ms = start.elapsed().as_secs_f64() * 1e3;
    if let Some(dir) = &config.out_dir {
        write_artifacts(&report, dir)?;
    }
    Ok(report)
}

/// Lossless float text: 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path) -> impl Fn(csv::Error) -> MoropError + '_ {
    move |e| MoropError::Io(format!("{}: {e}", path.display()))
}

fn write_csv(path: &Path, header: Vec<String>, rows: Vec<Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(io_err(path))?;
    w.write_record(&header).map_err(io_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(io_err(path))?;
    }
    w.flush().map_err(|e| MoropError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| MoropError::Io(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| MoropError::Io(format!("{}: {e}", path.display())))
}

fn prefixed(prefix: &str, names: &[String]) -> Vec<String> {
    names.iter().map(|n| format!("{prefix}{n}")).collect()
}

fn floats(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| fmt_float(v)).collect()
}

pub fn write_artifacts(report: &RunReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| MoropError::Io(format!("creating {}: {e}", dir.display())))?;
    let p = &report.problem;
    let n_sc = report.scenarios.len();

    let mut header = vec!["id".to_string()];
    header.extend(p.dv_names.iter().cloned());
    header.extend(p.objective_names.iter().cloned());
    header.extend(p.constraint_names.iter().cloned());
    let rows = (0..report.archive.len())
        .map(|k| {
            let mut row = vec![report.archive.ids[k].clone()];
            row.extend(floats(&report.archive.designs[k]));
            row.extend(floats(&report.archive.nominal[k].f));
            row.extend(floats(&report.archive.nominal[k].g));
            row
        })
        .collect();
    write_csv(&dir.join("pareto.csv"), header, rows)?;

    let mut header = vec!["id".to_string()];
    header.extend(p.dv_names.iter().cloned());
    header.extend(prefixed("f0_", &p.objective_names));
    header.push("i_rs".into());
    header.push("i_f".into());
    header.extend((1..=n_sc).map(|j| format!("i_p_{j}")));
    header.push("i_rl".into());
    header.extend(prefixed("sigma_", &p.objective_names));
    header.extend(prefixed("mu_", &p.objective_names));
    header.extend(prefixed("dfs_", &p.objective_names));
    header.extend(prefixed("dfl_", &p.objective_names));
    header.push("failed_samples".into());
    let rows = report
        .records
        .iter()
        .map(|r| {
            let mut row = vec![r.id.clone()];
            row.extend(floats(&r.x));
            row.extend(floats(&r.f0));
            row.push(fmt_float(r.small.i_rs));
            row.push(r.large.i_f.to_string());
            row.extend(r.large.i_p.iter().map(|v| v.map(fmt_float).unwrap_or_default()));
            row.push(fmt_float(r.large.i_rl));
            row.extend(floats(&r.small.sigma));
            row.extend(floats(&r.small.mu));
            row.extend(floats(&r.small.delta));
            row.extend(floats(&r.large.delta));
            row.push(r.failed_samples.to_string());
            row
        })
        .collect();
    write_csv(&dir.join("robustness.csv"), header, rows)?;

    let rows = report
        .rf_points
        .iter()
        .map(|r| vec![r.id.clone(), fmt_float(r.i_rs), fmt_float(r.i_rl)])
        .collect();
    write_csv(&dir.join("rfspace.csv"), vec!["id".into(), "i_rs".into(), "i_rl".into()], rows)?;

    let mut header = vec!["scenario".to_string(), "h".to_string()];
    header.extend(p.dep_names.iter().cloned());
    header.push("id".into());
    header.push("status".into());
    header.extend(p.objective_names.iter().cloned());
    header.extend(p.constraint_names.iter().cloned());
    header.push("feasible".into());
    header.push("rank".into());
    let mut rows = Vec::new();
    for (j, s) in report.scenarios.scenarios().iter().enumerate() {
        for (k, id) in report.archive.ids.iter().enumerate() {
            let mut row = vec![(j + 1).to_string(), fmt_float(s.h)];
            row.extend(floats(&s.p));
            row.push(id.clone());
            match &report.evaluations.outcomes[k][j] {
                Ok(e) => {
                    row.push("ok".into());
                    row.extend(floats(&e.f));
                    row.extend(floats(&e.g));
                    row.push(u8::from(is_feasible(e)).to_string());
                }
                Err(err) => {
                    row.push(err.kind().into());
                    row.extend(std::iter::repeat_n(String::new(), p.m() + p.q() + 1));
                }
            }
            row.push(report.records[k].large.ranks[j].map(|r| r.to_string()).unwrap_or_default());
            rows.push(row);
        }
    }
    write_csv(&dir.join("scenario_fronts.csv"), header, rows)?;

    write_json(&dir.join("summary.json"), &report.summary)?;
    write_json(&dir.join("run_info.json"), &report.info)?;
    info!("artifacts written to {}", dir.display());
    Ok(())
}

fn read_table(path: &Path) -> Result<(Vec<String>, Vec<csv::StringRecord>)> {
    let mut r = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(io_err(path))?;
    let header: Vec<String> = r.headers().map_err(io_err(path))?.iter().map(String::from).collect();
    let rows = r
        .records()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| MoropError::SchemaMismatch(format!("{}: {e}", path.display())))?;
    Ok((header, rows))
}

fn parse_float(path: &Path, row: usize, col: &str, text: &str) -> Result<f64> {
    text.parse::<f64>().map_err(|_| {
        MoropError::SchemaMismatch(format!("{} row {row}: column '{col}' has non-numeric value '{text}'", path.display()))
    })
}

/// Reads an archive CSV: column `id` then one column per design variable, named as in
/// the problem. Further columns (for example objectives from `pareto.csv`) are ignored.
pub fn read_archive_csv(path: impl AsRef<Path>, problem: &ProblemDef) -> Result<(Vec<String>, Vec<DesignVector>)> {
    let path = path.as_ref();
    let (header, rows) = read_table(path)?;
    let expected: Vec<&str> = std::iter::once("id").chain(problem.dv_names.iter().map(String::as_str)).collect();
    if header.len() < expected.len() || header[..expected.len()] != expected[..] {
        return Err(MoropError::SchemaMismatch(format!(
            "{}: header starts {:?}, expected {:?}",
            path.display(),
            header,
            expected
        )));
    }
    if rows.is_empty() {
        return Err(MoropError::EmptyArchive);
    }
    let mut ids = Vec::with_capacity(rows.len());
    let mut designs = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let id = row.get(0).unwrap_or_default().to_string();
        if id.is_empty() || ids.contains(&id) {
            return Err(MoropError::SchemaMismatch(format!("{} row {}: missing or repeated id '{id}'", path.display(), i + 1)));
        }
        let x = (1..expected.len())
            .map(|c| parse_float(path, i + 1, expected[c], row.get(c).unwrap_or_default()))
            .collect::<Result<Vec<f64>>>()?;
        ids.push(id);
        designs.push(DesignVector(x));
    }
    Ok((ids, designs))
}

fn column(header: &[String], name: &str, path: &Path) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| MoropError::SchemaMismatch(format!("{}: missing column '{name}'", path.display())))
}

/// Re-derives `summary.json` from `rfspace.csv` and `robustness.csv` in `dir`.
pub fn report(dir: impl AsRef<Path>) -> Result<Summary> {
    let dir = dir.as_ref();
    let rf_path = dir.join("rfspace.csv");
    let (header, rows) = read_table(&rf_path)?;
    let (c_id, c_rs, c_rl) =
        (column(&header, "id", &rf_path)?, column(&header, "i_rs", &rf_path)?, column(&header, "i_rl", &rf_path)?);
    let points = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(RfPoint {
                id: r.get(c_id).unwrap_or_default().to_string(),
                i_rs: parse_float(&rf_path, i + 1, "i_rs", r.get(c_rs).unwrap_or_default())?,
                i_rl: parse_float(&rf_path, i + 1, "i_rl", r.get(c_rl).unwrap_or_default())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let rob_path = dir.join("robustness.csv");
    let (header, rows) = read_table(&rob_path)?;
    let (c_if, c_failed) = (column(&header, "i_f", &rob_path)?, column(&header, "failed_samples", &rob_path)?);
    let scenario_count = header.iter().filter(|h| h.starts_with("i_p_")).count();
    check_len("robustness.csv rows", points.len(), rows.len())?;
    let mut i_f = Vec::with_capacity(rows.len());
    let mut failed = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        let bad = |col: &str| MoropError::SchemaMismatch(format!("{} row {}: bad '{col}'", rob_path.display(), i + 1));
        i_f.push(r.get(c_if).and_then(|v| v.parse::<u8>().ok()).ok_or_else(|| bad("i_f"))?);
        failed.push(r.get(c_failed).and_then(|v| v.parse::<usize>().ok()).ok_or_else(|| bad("failed_samples"))?);
    }
    Ok(Summary::from_parts(&points, &i_f, &failed, scenario_count))
}

/// Writes a re-derived summary back to `dir/summary.json`.
pub fn write_report(dir: impl AsRef<Path>) -> Result<Summary> {
    let summary = report(&dir)?;
    write_json(&dir.as_ref().join("summary.json"), &summary)?;
    Ok(summary)
}

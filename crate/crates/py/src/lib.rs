//! Python bindings: `import morop`.
//!
//! Results with nested structure (run summaries, robustness records) are returned as
//! plain dicts and lists. Errors raise `morop.MoropError` with `args = (kind, message)`.

use std::path::PathBuf;

use morop_core::model::{DepVector, DesignVector, ParetoArchive, ProblemDef};
use morop_core::nsga2::{self, GaConfig};
use morop_core::pareto::{self, ObjectivePoint};
use morop_core::pipeline::{self, RunConfig, RunReport};
use morop_core::problems::{self, numerical};
use morop_core::robustness::{self, BinningMethod, RfPoint, ScenarioSet};
use morop_core::sampling;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(morop, MoropError, PyException);

fn err(e: morop_core::MoropError) -> PyErr {
    MoropError::new_err((e.kind(), e.to_string()))
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for morop_core::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(err)
    }
}

fn to_python<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| MoropError::new_err(("io", e.to_string())))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A built-in problem (`"numerical_eg1"` or `"bemt_rotor"`).
#[pyclass(name = "Problem", module = "morop", frozen)]
struct PyProblem {
    inner: ProblemDef,
}

#[pymethods]
impl PyProblem {
    #[new]
    #[pyo3(signature = (name, dep_nominal=None))]
    fn new(name: &str, dep_nominal: Option<Vec<f64>>) -> PyResult<Self> {
        let mut inner = problems::builtin(name).py_err()?;
        if let Some(p) = dep_nominal {
            inner = inner.with_dep_nominal(DepVector(p)).py_err()?;
        }
        Ok(Self { inner })
    }

    /// The numerical example with nominal `p` and uniform noise half-width `w` on `x`.
    #[staticmethod]
    #[pyo3(signature = (p_nominal=5.0, half_width=0.1))]
    fn numerical(p_nominal: f64, half_width: f64) -> PyResult<Self> {
        Ok(Self { inner: numerical::numerical_problem(p_nominal, half_width).py_err()? })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn dv_names(&self) -> Vec<String> {
        self.inner.dv_names.clone()
    }

    #[getter]
    fn dep_names(&self) -> Vec<String> {
        self.inner.dep_names.clone()
    }

    #[getter]
    fn objective_names(&self) -> Vec<String> {
        self.inner.objective_names.clone()
    }

    #[getter]
    fn dep_nominal(&self) -> Vec<f64> {
        self.inner.dep_nominal.0.clone()
    }

    /// Returns `(f, g)` at design `x` and environment `p` (nominal when omitted).
    #[pyo3(signature = (x, p=None))]
    fn evaluate(&self, x: Vec<f64>, p: Option<Vec<f64>>) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let p = p.unwrap_or_else(|| self.inner.dep_nominal.0.clone());
        let e = self.inner.evaluate(&x, &p).py_err()?;
        Ok((e.f, e.g))
    }

    /// Runs NSGA-II at the nominal environment.
    #[pyo3(signature = (population_size=200, generations=250, seed=0))]
    fn optimize(&self, py: Python<'_>, population_size: usize, generations: usize, seed: u64) -> PyResult<PyArchive> {
        let cfg = GaConfig { population_size, generations, seed, ..GaConfig::default() };
        let inner = py.detach(|| nsga2::optimize(&self.inner, &cfg)).py_err()?;
        Ok(PyArchive { inner })
    }

    /// Evaluates the given designs at the nominal environment.
    fn archive(&self, ids: Vec<String>, designs: Vec<Vec<f64>>) -> PyResult<PyArchive> {
        let designs = designs.into_iter().map(DesignVector).collect();
        Ok(PyArchive { inner: ParetoArchive::from_designs(&self.inner, ids, designs).py_err()? })
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(name={:?}, n={}, m={}, q={}, r={})",
            self.inner.name,
            self.inner.n(),
            self.inner.m(),
            self.inner.q(),
            self.inner.r()
        )
    }
}

/// Alternative solutions with their nominal objective and constraint values.
#[pyclass(name = "Archive", module = "morop", frozen)]
struct PyArchive {
    inner: ParetoArchive,
}

#[pymethods]
impl PyArchive {
    #[getter]
    fn ids(&self) -> Vec<String> {
        self.inner.ids.clone()
    }

    #[getter]
    fn designs(&self) -> Vec<Vec<f64>> {
        self.inner.designs.iter().map(|d| d.0.clone()).collect()
    }

    #[getter]
    fn objectives(&self) -> Vec<Vec<f64>> {
        self.inner.nominal.iter().map(|e| e.f.clone()).collect()
    }

    #[getter]
    fn constraints(&self) -> Vec<Vec<f64>> {
        self.inner.nominal.iter().map(|e| e.g.clone()).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Archive(len={})", self.inner.len())
    }
}

/// Discrete environment scenarios `[(p, h), ...]`.
#[pyclass(name = "ScenarioSet", module = "morop", frozen)]
struct PyScenarioSet {
    inner: ScenarioSet,
}

#[pymethods]
impl PyScenarioSet {
    #[new]
    fn new(entries: Vec<(Vec<f64>, f64)>) -> PyResult<Self> {
        let scenarios =
            entries.into_iter().map(|(p, h)| robustness::Scenario { p: DepVector(p), h }).collect();
        Ok(Self { inner: ScenarioSet::new(scenarios).py_err()? })
    }

    /// Normal distribution of parameter `dep_index` binned into `count` cells centred from
    /// `lower` to `upper`; `method` is `"density"` or `"cell_mass"`.
    #[staticmethod]
    #[pyo3(signature = (template, dep_index, mean, std, lower, upper, count, method="density"))]
    #[allow(clippy::too_many_arguments)]
    fn bin_normal(
        template: Vec<f64>,
        dep_index: usize,
        mean: f64,
        std: f64,
        lower: f64,
        upper: f64,
        count: usize,
        method: &str,
    ) -> PyResult<Self> {
        let method = match method {
            "density" => BinningMethod::Density,
            "cell_mass" => BinningMethod::CellMass,
            other => return Err(MoropError::new_err(("config", format!("unknown binning method '{other}'")))),
        };
        let inner =
            robustness::bin_normal(&DepVector(template), dep_index, mean, std, lower, upper, count, method)
                .py_err()?;
        Ok(Self { inner })
    }

    /// The nine tabulated wind-speed scenarios of the rotor problem.
    #[staticmethod]
    fn wind_speed_table() -> Self {
        Self { inner: problems::wind::wind_scenarios() }
    }

    #[getter]
    fn entries(&self) -> Vec<(Vec<f64>, f64)> {
        self.inner.scenarios().iter().map(|s| (s.p.0.clone(), s.h)).collect()
    }

    #[getter]
    fn initial_index(&self) -> usize {
        self.inner.initial_index()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Robustness records (list of dicts) for `archive` under `problem` and `scenarios`.
#[pyfunction]
#[pyo3(signature = (problem, scenarios, archive, samples=1000, seed=0, include_infeasible=true, weights=None))]
#[allow(clippy::too_many_arguments)]
fn assess<'py>(
    py: Python<'py>,
    problem: &PyProblem,
    scenarios: &PyScenarioSet,
    archive: &PyArchive,
    samples: usize,
    seed: u64,
    include_infeasible: bool,
    weights: Option<Vec<f64>>,
) -> PyResult<Bound<'py, PyAny>> {
    let (records, _, _) = py
        .detach(|| {
            pipeline::assess_archive(
                &problem.inner,
                &scenarios.inner,
                &archive.inner,
                samples,
                seed,
                include_infeasible,
                weights.as_deref(),
            )
        })
        .py_err()?;
    to_python(py, &records)
}

fn report_to_python<'py>(py: Python<'py>, report: &RunReport) -> PyResult<Bound<'py, PyAny>> {
    to_python(
        py,
        &serde_json::json!({
            "summary": report.summary,
            "info": report.info,
            "archive": report.archive,
            "records": report.records,
        }),
    )
}

fn load_config(config: &str) -> morop_core::Result<RunConfig> {
    if config.trim_start().starts_with('{') {
        RunConfig::from_json(config, None)
    } else {
        RunConfig::load(config)
    }
}

/// Runs the pipeline; `config` is a JSON string or a path to a JSON file.
#[pyfunction]
#[pyo3(signature = (config, out_dir=None))]
fn run_pipeline<'py>(py: Python<'py>, config: &str, out_dir: Option<PathBuf>) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = load_config(config).py_err()?;
    if out_dir.is_some() {
        cfg.out_dir = out_dir;
    }
    let report = py.detach(|| pipeline::run_pipeline(&cfg)).py_err()?;
    report_to_python(py, &report)
}

/// Robustness stages only, on an archive CSV.
#[pyfunction]
#[pyo3(signature = (archive_path, config, out_dir=None))]
fn analyze_archive<'py>(
    py: Python<'py>,
    archive_path: PathBuf,
    config: &str,
    out_dir: Option<PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = load_config(config).py_err()?;
    if out_dir.is_some() {
        cfg.out_dir = out_dir;
    }
    let report = py.detach(|| pipeline::analyze_archive(&archive_path, &cfg)).py_err()?;
    report_to_python(py, &report)
}

/// Re-derives the summary dict from the CSVs in `out_dir`.
#[pyfunction]
fn report(py: Python<'_>, out_dir: PathBuf) -> PyResult<Bound<'_, PyAny>> {
    to_python(py, &pipeline::report(out_dir).py_err()?)
}

#[pyfunction]
fn dominates(a: Vec<f64>, b: Vec<f64>) -> PyResult<bool> {
    pareto::dominates(&ObjectivePoint::new("a", a, true), &ObjectivePoint::new("b", b, true)).py_err()
}

/// `1 + number of dominators` for each `(f, feasible)` point.
#[pyfunction]
#[pyo3(signature = (points, include_infeasible=true))]
fn rank_individuals(points: Vec<(Vec<f64>, bool)>, include_infeasible: bool) -> PyResult<Vec<usize>> {
    let pts: Vec<ObjectivePoint> = points
        .into_iter()
        .enumerate()
        .map(|(i, (f, feasible))| ObjectivePoint::new(i.to_string(), f, feasible))
        .collect();
    Ok(pareto::rank_individuals(&pts, include_infeasible).py_err()?.ranks)
}

/// Indices of the feasible non-dominated `(f, feasible)` points.
#[pyfunction]
fn pareto_front(points: Vec<(Vec<f64>, bool)>) -> PyResult<Vec<usize>> {
    let pts: Vec<ObjectivePoint> = points
        .into_iter()
        .enumerate()
        .map(|(i, (f, feasible))| ObjectivePoint::new(i.to_string(), f, feasible))
        .collect();
    pareto::pareto_front_indices(&pts).py_err()
}

#[pyfunction]
fn fast_nondominated_sort(objectives: Vec<Vec<f64>>) -> Vec<Vec<usize>> {
    nsga2::fast_nondominated_sort(&objectives)
}

#[pyfunction]
fn crowding_distance(front: Vec<Vec<f64>>) -> Vec<f64> {
    let refs: Vec<&[f64]> = front.iter().map(Vec::as_slice).collect();
    nsga2::crowding_distance(&refs)
}

/// Ids of the `(id, i_rs, i_rl)` points on the RF-space Pareto front.
#[pyfunction]
fn robust_pareto_filter(points: Vec<(String, f64, f64)>) -> Vec<String> {
    let pts: Vec<RfPoint> = points.into_iter().map(|(id, i_rs, i_rl)| RfPoint { id, i_rs, i_rl }).collect();
    robustness::robust_pareto_filter(&pts)
}

/// `n x d` Latin hypercube sample on the unit cube.
#[pyfunction]
fn lhs(n: usize, d: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let m = sampling::lhs(n, d, seed).py_err()?;
    Ok(m.iter_rows().map(<[f64]>::to_vec).collect())
}

#[pymodule]
fn morop(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MoropError", m.py().get_type::<MoropError>())?;
    m.add_class::<PyProblem>()?;
    m.add_class::<PyArchive>()?;
    m.add_class::<PyScenarioSet>()?;
    m.add_function(wrap_pyfunction!(assess, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_archive, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    m.add_function(wrap_pyfunction!(dominates, m)?)?;
    m.add_function(wrap_pyfunction!(rank_individuals, m)?)?;
    m.add_function(wrap_pyfunction!(pareto_front, m)?)?;
    m.add_function(wrap_pyfunction!(fast_nondominated_sort, m)?)?;
    m.add_function(wrap_pyfunction!(crowding_distance, m)?)?;
    m.add_function(wrap_pyfunction!(robust_pareto_filter, m)?)?;
    m.add_function(wrap_pyfunction!(lhs, m)?)?;
    m.add("BUILTIN_EVALUATORS", problems::BUILTIN_EVALUATORS.to_vec())?;
    Ok(())
}

//! Python module `graphshare_py`: thin wrappers over the `graphshare` crate.
//!
//! Exact shares come back as `fractions.Fraction`, tie policies and players
//! as the same short strings the CLI uses (`forbid`, `first`, `second`).

use graphshare::adversary::{parse_shapes, search_shapes, Method};
use graphshare::game::{format_fraction, format_line, Player};
use graphshare::io::{format_instance, parse_instance};
use graphshare::{generators, oracle, solver, verify};
use graphshare::{Fraction, GameState, SolveError, TiePolicy, VertexSet};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(graphshare_py, TieError, PyValueError, "Play reached equal totals under the forbid policy.");

fn value_error(err: impl ToString) -> PyErr {
    PyValueError::new_err(err.to_string())
}

fn solve_error(err: SolveError) -> PyErr {
    if err.is_tie() {
        TieError::new_err(err.to_string())
    } else {
        value_error(err)
    }
}

fn policy(name: &str) -> PyResult<TiePolicy> {
    name.parse().map_err(PyValueError::new_err)
}

fn fraction<'py>(py: Python<'py>, x: &Fraction) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((*x.numer(), *x.denom()))
}

fn line_items(line: &[(Player, usize)]) -> Vec<(String, usize)> {
    line.iter().map(|(p, v)| (p.to_string(), *v)).collect()
}

fn vertex_set(n: usize, vertices: &[usize]) -> PyResult<VertexSet> {
    let mut set = VertexSet::default();
    for &v in vertices {
        if v >= n {
            return Err(PyValueError::new_err(format!("vertex {v} does not exist")));
        }
        set.insert(v);
    }
    Ok(set)
}

/// Weighted connected graph.
#[pyclass(name = "Instance", frozen, skip_from_py_object, module = "graphshare_py")]
#[derive(Clone)]
struct PyInstance {
    inner: graphshare::Instance,
}

#[pymethods]
impl PyInstance {
    #[new]
    fn new(weights: Vec<u64>, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let inner = graphshare::Instance::new(weights, edges).map_err(value_error)?;
        Ok(PyInstance { inner })
    }

    /// Parses the plain-text instance format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = parse_instance(text).map_err(value_error)?;
        Ok(PyInstance { inner })
    }

    fn to_text(&self) -> String {
        format_instance(&self.inner)
    }

    #[getter]
    fn weights(&self) -> Vec<u64> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn total_weight(&self) -> u64 {
        self.inner.total_weight()
    }

    fn is_tree(&self) -> bool {
        self.inner.is_tree()
    }

    fn __len__(&self) -> usize {
        self.inner.vertex_count()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(weights={:?}, edges={:?})",
            self.inner.weights(),
            self.inner.edges()
        )
    }
}

/// Optimal play from one opening.
#[pyclass(name = "StartValue", frozen, module = "graphshare_py")]
struct PyStartValue {
    #[pyo3(get)]
    start: usize,
    #[pyo3(get)]
    first_weight: u64,
    value: Fraction,
    line: Vec<(Player, usize)>,
}

#[pymethods]
impl PyStartValue {
    #[getter]
    fn value<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.value)
    }

    /// Moves as `(player, vertex)` pairs, the opening included.
    #[getter]
    fn line(&self) -> Vec<(String, usize)> {
        line_items(&self.line)
    }

    fn __repr__(&self) -> String {
        format!(
            "StartValue(start={}, value={}, line='{}')",
            self.start,
            format_fraction(&self.value),
            format_line(&self.line)
        )
    }
}

#[pyclass(name = "SolveReport", frozen, module = "graphshare_py")]
struct PySolveReport {
    inner: solver::SolveReport,
}

#[pymethods]
impl PySolveReport {
    #[getter]
    fn value<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.value)
    }

    #[getter]
    fn best_start(&self) -> usize {
        self.inner.best_start
    }

    #[getter]
    fn policy(&self) -> String {
        self.inner.policy.to_string()
    }

    #[getter]
    fn total_weight(&self) -> u64 {
        self.inner.total_weight
    }

    #[getter]
    fn state_count(&self) -> usize {
        self.inner.state_count
    }

    #[getter]
    fn per_start(&self) -> Vec<PyStartValue> {
        self.inner
            .per_start
            .iter()
            .map(|sv| PyStartValue {
                start: sv.start,
                first_weight: sv.first_weight,
                value: sv.value,
                line: sv.line.clone(),
            })
            .collect()
    }

    /// The same `key=value` block the CLI prints.
    fn to_kv(&self) -> String {
        self.inner.to_kv()
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveReport(value={}, best_start={}, policy='{}')",
            format_fraction(&self.inner.value),
            self.inner.best_start,
            self.inner.policy
        )
    }
}

#[pyfunction]
#[pyo3(signature = (instance, policy_name = "forbid"))]
fn solve(instance: &PyInstance, policy_name: &str) -> PyResult<PySolveReport> {
    let inner = solver::solve(&instance.inner, policy(policy_name)?).map_err(solve_error)?;
    Ok(PySolveReport { inner })
}

/// First's optimal share from the position where First holds `first` and
/// Second holds `second`.
#[pyfunction]
#[pyo3(signature = (instance, first, second, policy_name = "forbid"))]
fn value_from<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    first: Vec<usize>,
    second: Vec<usize>,
    policy_name: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let n = instance.inner.vertex_count();
    let state = GameState::new(vertex_set(n, &first)?, vertex_set(n, &second)?);
    let value = solver::value_from(&instance.inner, policy(policy_name)?, &state).map_err(solve_error)?;
    fraction(py, &value)
}

#[pyfunction]
#[pyo3(signature = (instance, start, policy_name = "forbid"))]
fn principal_line(instance: &PyInstance, start: usize, policy_name: &str) -> PyResult<Vec<(String, usize)>> {
    let line = solver::principal_line(&instance.inner, policy(policy_name)?, start).map_err(solve_error)?;
    Ok(line_items(&line))
}

/// Second's canonical reply to every opening, indexed by opening vertex.
#[pyfunction]
#[pyo3(signature = (instance, policy_name = "forbid"))]
fn response_map(instance: &PyInstance, policy_name: &str) -> PyResult<Vec<usize>> {
    let map = solver::response_map(&instance.inner, policy(policy_name)?).map_err(solve_error)?;
    Ok(map.reply)
}

#[pyfunction]
#[pyo3(signature = (instance, policy_name = "forbid"))]
fn mutual_edges(instance: &PyInstance, policy_name: &str) -> PyResult<Vec<(usize, usize)>> {
    let map = solver::response_map(&instance.inner, policy(policy_name)?).map_err(solve_error)?;
    Ok(map.mutual_edges())
}

/// Unmemoized reference value for small instances.
#[pyfunction]
#[pyo3(signature = (instance, start, policy_name = "forbid"))]
fn brute_value<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    start: usize,
    policy_name: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let value = oracle::brute_value(&instance.inner, policy(policy_name)?, start).map_err(value_error)?;
    fraction(py, &value)
}

#[pyfunction]
fn gen_cycle7(m: u64) -> PyResult<PyInstance> {
    let inner = generators::gen_cycle7_family(m).map_err(value_error)?;
    Ok(PyInstance { inner })
}

#[pyfunction]
fn cycle7_bound<'py>(py: Python<'py>, m: u64) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &generators::cycle7_bound(m))
}

#[pyfunction]
fn gen_random_tree(n: usize, seed: u64, weight_max: u64) -> PyResult<PyInstance> {
    let inner = generators::gen_random_tree(n, seed, weight_max).map_err(value_error)?;
    Ok(PyInstance { inner })
}

#[pyfunction]
fn gen_random_connected(n: usize, extra_edges: usize, seed: u64, weight_max: u64) -> PyResult<PyInstance> {
    let inner = generators::gen_random_connected(n, extra_edges, seed, weight_max).map_err(value_error)?;
    Ok(PyInstance { inner })
}

/// Runs a verification suite; returns `(passed, report_text)`.
#[pyfunction]
#[pyo3(signature = (name, seed, params = None))]
fn run_suite(name: &str, seed: u64, params: Option<&Bound<'_, PyDict>>) -> PyResult<(bool, String)> {
    let mut pairs = Vec::new();
    if let Some(dict) = params {
        for (k, v) in dict.iter() {
            pairs.push((k.str()?.to_string(), v.str()?.to_string()));
        }
    }
    let report = verify::run_suite(name, seed, &pairs).map_err(value_error)?;
    Ok((report.passed(), report.render()))
}

/// Searches weights on the named shapes for a low certified value.
/// Returns `(shape, instance, value)`.
#[pyfunction]
#[pyo3(signature = (shape, seed, policy_name = "forbid", method = "alt", iters = 30))]
fn adversary<'py>(
    py: Python<'py>,
    shape: &str,
    seed: u64,
    policy_name: &str,
    method: &str,
    iters: usize,
) -> PyResult<(String, PyInstance, Bound<'py, PyAny>)> {
    let shapes = parse_shapes(shape).map_err(value_error)?;
    let method: Method = method.parse().map_err(PyValueError::new_err)?;
    let policy = policy(policy_name)?;
    let found = py
        .detach(|| search_shapes(&shapes, policy, method, seed, iters))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let value = fraction(py, &found.outcome.value)?;
    Ok((found.shape, PyInstance { inner: found.outcome.instance }, value))
}

#[pymodule]
fn graphshare_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("TieError", m.py().get_type::<TieError>())?;
    m.add_class::<PyInstance>()?;
    m.add_class::<PyStartValue>()?;
    m.add_class::<PySolveReport>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(value_from, m)?)?;
    m.add_function(wrap_pyfunction!(principal_line, m)?)?;
    m.add_function(wrap_pyfunction!(response_map, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_edges, m)?)?;
    m.add_function(wrap_pyfunction!(brute_value, m)?)?;
    m.add_function(wrap_pyfunction!(gen_cycle7, m)?)?;
    m.add_function(wrap_pyfunction!(cycle7_bound, m)?)?;
    m.add_function(wrap_pyfunction!(gen_random_tree, m)?)?;
    m.add_function(wrap_pyfunction!(gen_random_connected, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(adversary, m)?)?;
    Ok(())
}

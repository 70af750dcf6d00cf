//! Python bindings: scenarios, solves, certification reports and recovery.

use std::path::PathBuf;

use dispatch::collapse::{reconstruct, recover_class, CollapseError};
use dispatch::economics::price_report;
use dispatch::kkt::{NewtonOptions, SolveError};
use dispatch::optimality::optimality_residuals;
use dispatch::scenario::{load_scenario, load_scenario_file, Scenario, ScenarioError};
use dispatch::transcribe::{build, DiscreteSolution, Scheme};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

create_exception!(dispatch_py, SolverError, PyRuntimeError);
create_exception!(dispatch_py, SingularPairError, PyValueError);

fn scenario_err(e: ScenarioError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn solver_err(e: SolveError) -> PyErr {
    SolverError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn serialize<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// A validated scenario: load classes, generation model, grid and net load.
#[pyclass(name = "Scenario", module = "dispatch_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyScenario {
    inner: Scenario,
}

#[pymethods]
impl PyScenario {
    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        load_scenario_file(&path).map(|inner| PyScenario { inner }).map_err(scenario_err)
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        load_scenario(text).map(|inner| PyScenario { inner }).map_err(scenario_err)
    }

    fn with_steps(&self, steps: usize) -> PyResult<Self> {
        self.inner.with_steps(steps).map(|inner| PyScenario { inner }).map_err(scenario_err)
    }

    fn with_initial(&self, x0: Vec<f64>, z0: Vec<f64>) -> PyResult<Self> {
        self.inner.with_initial(x0, z0).map(|inner| PyScenario { inner }).map_err(scenario_err)
    }

    #[getter]
    fn class_names(&self) -> Vec<String> {
        self.inner.classes.iter().map(|c| c.name.clone()).collect()
    }

    #[getter]
    fn steps(&self) -> usize {
        self.inner.grid.steps
    }

    #[getter]
    fn horizon(&self) -> f64 {
        self.inner.grid.horizon
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.grid.times()
    }

    #[getter]
    fn net_load(&self) -> Vec<f64> {
        self.inner.net_load.values.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(classes={:?}, horizon={}, steps={})",
            self.class_names(),
            self.inner.grid.horizon,
            self.inner.grid.steps
        )
    }
}

/// Node trajectories and multipliers of a solved scenario.
#[pyclass(name = "Solution", module = "dispatch_py", frozen)]
struct PySolution {
    inner: DiscreteSolution,
}

fn per_class<'py>(py: Python<'py>, names: &[String], rows: &[Vec<f64>]) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (n, r) in names.iter().zip(rows) {
        d.set_item(n, r.clone())?;
    }
    Ok(d)
}

#[pymethods]
impl PySolution {
    #[getter]
    fn t(&self) -> Vec<f64> {
        self.inner.t.clone()
    }
    #[getter]
    fn g(&self) -> Vec<f64> {
        self.inner.g.clone()
    }
    #[getter]
    fn gamma(&self) -> Vec<f64> {
        self.inner.gamma.clone()
    }
    #[getter]
    fn rho(&self) -> Vec<f64> {
        self.inner.rho.clone()
    }
    /// SoC co-state (class mean).
    #[getter]
    fn costate(&self) -> Vec<f64> {
        self.inner.lambda_mean()
    }
    #[getter]
    fn beta(&self) -> Vec<f64> {
        self.inner.beta_mean()
    }
    #[getter]
    fn x<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        per_class(py, &self.inner.class_names, &self.inner.x)
    }
    #[getter]
    fn z<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        per_class(py, &self.inner.class_names, &self.inner.z)
    }
    #[getter]
    fn u<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        per_class(py, &self.inner.class_names, &self.inner.u)
    }
    #[getter]
    fn objective(&self) -> f64 {
        self.inner.objective
    }
    #[getter]
    fn newton_iters(&self) -> usize {
        self.inner.newton_iters
    }
    #[getter]
    fn kkt_residual(&self) -> f64 {
        self.inner.kkt_residual
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    #[staticmethod]
    fn from_csv(text: &str, scenario: &PyScenario) -> PyResult<Self> {
        DiscreteSolution::from_csv(text, &scenario.inner)
            .map(|inner| PySolution { inner })
            .map_err(scenario_err)
    }
}

fn parse_scheme(s: &str) -> PyResult<Scheme> {
    s.parse().map_err(PyValueError::new_err)
}

#[pyfunction]
#[pyo3(signature = (scenario, scheme = "trapezoidal", tol = 1e-10, max_iters = 50))]
fn solve(py: Python<'_>, scenario: &PyScenario, scheme: &str, tol: f64, max_iters: usize) -> PyResult<PySolution> {
    let scheme = parse_scheme(scheme)?;
    let opts = NewtonOptions {
        tol,
        max_iters,
        ..Default::default()
    };
    let s = scenario.inner.clone();
    py.detach(move || dispatch::transcribe::solve(&build(&s, scheme), &opts))
        .map(|inner| PySolution { inner })
        .map_err(solver_err)
}

/// Residuals of the continuous optimality system, as a dict.
#[pyfunction]
fn residuals<'py>(py: Python<'py>, solution: &PySolution, scenario: &PyScenario) -> PyResult<Bound<'py, PyAny>> {
    let r = optimality_residuals(&solution.inner, &scenario.inner).map_err(|e| PyValueError::new_err(e.to_string()))?;
    serialize(py, &r)
}

/// Equilibrium price, its averages and the dual value, as a dict.
#[pyfunction]
fn prices<'py>(py: Python<'py>, solution: &PySolution, scenario: &PyScenario) -> PyResult<Bound<'py, PyAny>> {
    let r = price_report(&solution.inner, &scenario.inner, &NewtonOptions::default()).map_err(solver_err)?;
    serialize(py, &r)
}

/// Re-certification table: list of (name, value, tolerance, passed).
#[pyfunction]
#[pyo3(signature = (solution, scenario, skip_nodes = 1, rel_tol = 0.1))]
fn check(solution: &PySolution, scenario: &PyScenario, skip_nodes: usize, rel_tol: f64) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let lines = dispatch::cli::check_suite(&solution.inner, &scenario.inner, skip_nodes, rel_tol).map_err(PyValueError::new_err)?;
    Ok(lines
        .into_iter()
        .map(|l| {
            let ok = l.informational || l.pass();
            (l.name, l.value, l.tol, ok)
        })
        .collect())
}

/// Reconstructs the co-state from classes `a` and `b` and recovers `target`.
/// Returns a dict with `t`, `lambda`, `dlambda` and `x` (target SoC), all
/// from node 1 on.
#[pyfunction]
fn recover<'py>(
    py: Python<'py>,
    solution: &PySolution,
    scenario: &PyScenario,
    a: &str,
    b: &str,
    target: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let s = &scenario.inner;
    let sol = &solution.inner;
    let idx = |n: &str| s.class_index(n).ok_or_else(|| PyValueError::new_err(format!("unknown class {n:?}")));
    let (ia, ib, it) = (idx(a)?, idx(b)?, idx(target)?);
    let rec = reconstruct(&sol.x[ia], &sol.x[ib], &s.classes[ia], &s.classes[ib]).map_err(|e| match e {
        CollapseError::SingularPair { .. } => SingularPairError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    })?;
    let x = recover_class(&rec, &s.classes[it]).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let d = PyDict::new(py);
    d.set_item("t", sol.t[rec.first_node..].to_vec())?;
    d.set_item("lambda", rec.lambda)?;
    d.set_item("dlambda", rec.dlambda)?;
    d.set_item("x", x)?;
    d.set_item("condition", rec.condition)?;
    Ok(d)
}

#[pymodule]
fn dispatch_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScenario>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(residuals, m)?)?;
    m.add_function(wrap_pyfunction!(prices, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(recover, m)?)?;
    m.add("SolverError", m.py().get_type::<SolverError>())?;
    m.add("SingularPairError", m.py().get_type::<SingularPairError>())?;
    Ok(())
}

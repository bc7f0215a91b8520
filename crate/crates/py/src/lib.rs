//! Python bindings: grid functions, the eight fractional operators in both
//! formulations, GL weights, and the verification suite.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use discfrac::{Family, Formulation, GridFunction, Kind, OperatorSpec, Side, WeightMode};

fn err(e: discfrac::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "GridFunction", skip_from_py_object)]
#[derive(Clone)]
struct PyGridFunction {
    inner: GridFunction,
}

#[pymethods]
impl PyGridFunction {
    #[new]
    fn new(origin: f64, values: Vec<f64>) -> PyResult<Self> {
        Ok(PyGridFunction {
            inner: GridFunction::new(origin, values).map_err(err)?,
        })
    }

    #[getter]
    fn origin(&self) -> f64 {
        self.inner.origin()
    }

    #[getter]
    fn end(&self) -> f64 {
        self.inner.end()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Stored value at grid point t, or None off the stored grid.
    fn value_at(&self, t: f64) -> Option<f64> {
        self.inner.value_at(t)
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(PyGridFunction {
            inner: GridFunction::from_csv(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyGridFunction {
            inner: GridFunction::from_json(text).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "GridFunction(origin={}, len={})",
            self.inner.origin(),
            self.inner.len()
        )
    }
}

fn parse_family(s: &str) -> PyResult<Family> {
    match s {
        "delta" => Ok(Family::Delta),
        "nabla" => Ok(Family::Nabla),
        _ => Err(PyValueError::new_err(format!(
            "family must be 'delta' or 'nabla', got '{s}'"
        ))),
    }
}

fn parse_side(s: &str) -> PyResult<Side> {
    match s {
        "left" => Ok(Side::Left),
        "right" => Ok(Side::Right),
        _ => Err(PyValueError::new_err(format!(
            "side must be 'left' or 'right', got '{s}'"
        ))),
    }
}

fn parse_kind(s: &str) -> PyResult<Kind> {
    match s {
        "sum" => Ok(Kind::Sum),
        "difference" => Ok(Kind::Difference),
        _ => Err(PyValueError::new_err(format!(
            "kind must be 'sum' or 'difference', got '{s}'"
        ))),
    }
}

fn parse_formulation(s: &str) -> PyResult<Formulation> {
    match s {
        "riemann" => Ok(Formulation::Riemann),
        "binomial" => Ok(Formulation::Binomial),
        _ => Err(PyValueError::new_err(format!(
            "formulation must be 'riemann' or 'binomial', got '{s}'"
        ))),
    }
}

/// Applies a fractional operator. The anchor is a for left operators and b
/// for right ones; `fast` routes binomial operators through the FFT path.
#[pyfunction]
#[pyo3(signature = (f, family, side, kind, alpha, anchor, formulation="riemann", fast=true))]
#[allow(clippy::too_many_arguments)]
fn apply(
    f: &PyGridFunction,
    family: &str,
    side: &str,
    kind: &str,
    alpha: f64,
    anchor: f64,
    formulation: &str,
    fast: bool,
) -> PyResult<PyGridFunction> {
    let spec = OperatorSpec::new(
        parse_family(family)?,
        parse_side(side)?,
        parse_kind(kind)?,
        parse_formulation(formulation)?,
        alpha,
        anchor,
    )
    .map_err(err)?;
    let out = if fast {
        discfrac::apply_fast(&spec, &f.inner)
    } else {
        discfrac::apply(&spec, &f.inner)
    }
    .map_err(err)?;
    Ok(PyGridFunction { inner: out })
}

/// Grünwald–Letnikov weights w[0..=k_max]; mode is 'difference' or 'sum'.
#[pyfunction]
fn gl_weights(alpha: f64, mode: &str, k_max: usize) -> PyResult<Vec<f64>> {
    let mode = match mode {
        "difference" => WeightMode::Difference,
        "sum" => WeightMode::Sum,
        _ => {
            return Err(PyValueError::new_err(format!(
                "mode must be 'difference' or 'sum', got '{mode}'"
            )))
        }
    };
    Ok(discfrac::gl_weights(alpha, mode, k_max).values().to_vec())
}

#[pyfunction]
fn falling_factorial(t: f64, alpha: f64) -> PyResult<f64> {
    discfrac::falling_factorial(t, alpha).map_err(err)
}

#[pyfunction]
fn rising_factorial(t: f64, alpha: f64) -> PyResult<f64> {
    discfrac::rising_factorial(t, alpha).map_err(err)
}

#[pyfunction]
fn gamma_ratio(x: f64, y: f64) -> PyResult<f64> {
    discfrac::gamma_ratio(x, y).map_err(err)
}

/// Runs verification checks (all when ids is empty); returns one JSON report
/// string per check.
#[pyfunction]
#[pyo3(signature = (ids=vec![], seed=42))]
fn run_suite(ids: Vec<String>, seed: u64) -> PyResult<Vec<String>> {
    let reports = discfrac::run_suite(&ids, seed).map_err(err)?;
    Ok(reports.iter().map(|r| r.to_json_line()).collect())
}

/// Ids of every registered verification check.
#[pyfunction]
fn check_ids() -> Vec<String> {
    discfrac::verify::all_check_ids()
        .into_iter()
        .map(String::from)
        .collect()
}

#[pymodule]
fn _discfrac(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGridFunction>()?;
    m.add_function(wrap_pyfunction!(apply, m)?)?;
    m.add_function(wrap_pyfunction!(gl_weights, m)?)?;
    m.add_function(wrap_pyfunction!(falling_factorial, m)?)?;
    m.add_function(wrap_pyfunction!(rising_factorial, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_function(wrap_pyfunction!(check_ids, m)?)?;
    Ok(())
}

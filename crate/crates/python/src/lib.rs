use binform::form::parse_rational;
use binform::geometry::{default_steps, CircleMapKind, CircleMaps};
use binform::rank::{real_rank, SearchBudget};
use binform::roots::{count_projective_real_roots, resultant_gradient};
use binform::theorem::{verify_corollary, verify_theorem1};
use binform::Error;
use num_traits::Zero;
use pyo3::exceptions::{PyArithmeticError, PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyFloat, PyString};
use serde::Serialize;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::NotSquareFree | Error::Undersampled { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py(py: Python<'_>, value: &impl Serialize) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn rational(obj: &Bound<'_, PyAny>) -> PyResult<binform::poly::Q> {
    if obj.is_instance_of::<PyFloat>() {
        return Err(PyTypeError::new_err("float coefficients are not exact; pass int, str or Fraction"));
    }
    let text = obj.str()?;
    parse_rational(text.to_str()?).map_err(py_err)
}

fn map_kind(name: &str) -> PyResult<CircleMapKind> {
    match name {
        "phi" => Ok(CircleMapKind::Phi),
        "psi" => Ok(CircleMapKind::Psi),
        _ => Err(PyValueError::new_err(format!("unknown map `{name}`, expected phi or psi"))),
    }
}

/// A real binary form with exact rational coefficients, stored as
/// `sum c_i x^(n-i) y^i`.
#[pyclass(name = "BinaryForm", frozen, eq, skip_from_py_object, module = "binform_py")]
#[derive(Clone, PartialEq)]
struct PyBinaryForm {
    inner: binform::BinaryForm,
}

#[pymethods]
impl PyBinaryForm {
    #[new]
    fn new(expr: &str) -> PyResult<Self> {
        binform::parse_form(expr).map(|inner| Self { inner }).map_err(py_err)
    }

    /// Coefficients may be ints, strings such as "3/4", or Fractions.
    #[staticmethod]
    fn from_coeffs(coeffs: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        let coeffs = coeffs.iter().map(rational).collect::<PyResult<Vec<_>>>()?;
        binform::BinaryForm::new(coeffs).map(|inner| Self { inner }).map_err(py_err)
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn coeffs(&self) -> Vec<String> {
        self.inner.coeffs().iter().map(|c| c.to_string()).collect()
    }

    fn is_squarefree(&self) -> PyResult<bool> {
        Ok(!resultant_gradient(&self.inner).map_err(py_err)?.is_zero())
    }

    fn evaluate(&self, x: &Bound<'_, PyAny>, y: &Bound<'_, PyAny>) -> PyResult<String> {
        Ok(self.inner.evaluate(&rational(x)?, &rational(y)?).to_string())
    }

    fn partial_x(&self) -> PyResult<Self> {
        self.inner.partial_x().map(|inner| Self { inner }).map_err(py_err)
    }

    fn partial_y(&self) -> PyResult<Self> {
        self.inner.partial_y().map(|inner| Self { inner }).map_err(py_err)
    }

    fn hessian(&self) -> PyResult<Self> {
        self.inner.hessian().map(|inner| Self { inner }).map_err(py_err)
    }

    /// f(m11 x + m12 y, m21 x + m22 y)
    fn change_coordinates(
        &self,
        m11: &Bound<'_, PyAny>,
        m12: &Bound<'_, PyAny>,
        m21: &Bound<'_, PyAny>,
        m22: &Bound<'_, PyAny>,
    ) -> PyResult<Self> {
        let m = binform::Substitution::new(rational(m11)?, rational(m12)?, rational(m21)?, rational(m22)?);
        self.inner.change_coordinates(&m).map(|inner| Self { inner }).map_err(py_err)
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self { inner: self.inner.mul(&other.inner) }
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("BinaryForm({:?})", self.inner.to_string())
    }
}

#[pyfunction]
fn parse_form(expr: &str) -> PyResult<PyBinaryForm> {
    PyBinaryForm::new(expr)
}

#[pyfunction]
fn real_roots(py: Python<'_>, f: &PyBinaryForm) -> PyResult<Py<PyAny>> {
    to_py(py, &count_projective_real_roots(&f.inner).map_err(py_err)?)
}

#[pyfunction]
#[pyo3(signature = (f, max_candidates = None, seed = 0))]
fn rank(py: Python<'_>, f: &PyBinaryForm, max_candidates: Option<usize>, seed: u64) -> PyResult<Py<PyAny>> {
    let mut budget = SearchBudget { seed, ..SearchBudget::default() };
    if let Some(m) = max_candidates {
        budget.max_candidates = m;
    }
    let cert = py.detach(|| real_rank(&f.inner, &budget)).map_err(py_err)?;
    to_py(py, &cert)
}

#[pyfunction]
#[pyo3(signature = (f, corollary = false))]
fn verify(py: Python<'_>, f: &PyBinaryForm, corollary: bool) -> PyResult<Py<PyAny>> {
    if corollary {
        let report = py.detach(|| verify_corollary(&f.inner, &SearchBudget::default())).map_err(py_err)?;
        to_py(py, &report)
    } else {
        let report = py.detach(|| verify_theorem1(&f.inner)).map_err(py_err)?;
        to_py(py, &report)
    }
}

/// Degree of the normalized gradient map (phi) or its rotated companion (psi).
#[pyfunction]
#[pyo3(signature = (f, map = "phi", steps = None))]
fn winding(f: &PyBinaryForm, map: &str, steps: Option<usize>) -> PyResult<i64> {
    let kind = map_kind(map)?;
    let maps = CircleMaps::new(&f.inner).map_err(py_err)?;
    let steps = steps.unwrap_or_else(|| default_steps(f.inner.degree()));
    Ok(maps.winding_number(kind, steps).map_err(py_err)?.degree)
}

/// Rows of (theta, vx, vy, angular_velocity).
#[pyfunction]
#[pyo3(signature = (f, map = "phi", steps = 360))]
fn trajectory(f: &PyBinaryForm, map: &str, steps: usize) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let kind = map_kind(map)?;
    let samples = CircleMaps::new(&f.inner).and_then(|m| m.trajectory(kind, steps)).map_err(py_err)?;
    Ok(samples.iter().map(|s| (s.theta, s.value[0], s.value[1], s.angular_velocity)).collect())
}

/// Runs an experiment from a JSON config string; `kind` is "typical_rank" or "theorem_fuzz".
#[pyfunction]
#[pyo3(signature = (config, kind = "typical_rank"))]
fn experiment(py: Python<'_>, config: &Bound<'_, PyString>, kind: &str) -> PyResult<Py<PyAny>> {
    let config: binform::experiments::ExperimentConfig =
        serde_json::from_str(config.to_str()?).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let run = match kind {
        "typical_rank" => binform::experiments::typical_rank_experiment,
        "theorem_fuzz" => binform::experiments::theorem_fuzz,
        _ => return Err(PyValueError::new_err(format!("unknown experiment `{kind}`"))),
    };
    let report = py.detach(|| run(&config)).map_err(py_err)?;
    to_py(py, &report)
}

#[pymodule]
fn binform_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBinaryForm>()?;
    m.add_function(wrap_pyfunction!(parse_form, m)?)?;
    m.add_function(wrap_pyfunction!(real_roots, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(winding, m)?)?;
    m.add_function(wrap_pyfunction!(trajectory, m)?)?;
    m.add_function(wrap_pyfunction!(experiment, m)?)?;
    Ok(())
}

//! Python bindings: the module `btq`.

use btq_core::cli::{execute, parse_config, parse_polynomial};
use btq_core::index::{self, ClassicalIdempotent, DEFAULT_GAP};
use btq_core::moyal::{self, FormalSeries, DEFAULT_TRUNCATION};
use btq_core::quantize::{self, MapKind, QuantOperator};
use btq_core::section::{make_space, SectionSpace};
use btq_core::sphere::{self, SpherePoint, SpherePolynomial};
use btq_core::Error;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn err(e: Error) -> PyErr {
    match e {
        Error::Parse(_) | Error::Config(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any().unbind(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(json_to_py(py, x)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(m) => {
            let dict = PyDict::new(py);
            for (k, x) in m {
                dict.set_item(k, json_to_py(py, x)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

fn map_kind(kind: &str) -> PyResult<MapKind> {
    kind.parse().map_err(err)
}

fn point(u: f64, v: f64, w: f64) -> PyResult<SpherePoint> {
    SpherePoint::new(u, v, w).map_err(err)
}

/// Complex polynomial in the ambient coordinates `u, v, w`, reduced modulo `u^2 + v^2 + w^2 = 1`.
#[pyclass(name = "SpherePolynomial", module = "btq", frozen, skip_from_py_object, eq)]
#[derive(Clone, PartialEq)]
struct PySpherePolynomial(SpherePolynomial);

#[pymethods]
impl PySpherePolynomial {
    #[new]
    fn new(expr: &str) -> PyResult<Self> {
        parse_polynomial(expr).map(Self).map_err(err)
    }

    #[staticmethod]
    fn u() -> Self {
        Self(SpherePolynomial::u())
    }

    #[staticmethod]
    fn v() -> Self {
        Self(SpherePolynomial::v())
    }

    #[staticmethod]
    fn w() -> Self {
        Self(SpherePolynomial::w())
    }

    #[staticmethod]
    fn constant(c: Complex64) -> Self {
        Self(SpherePolynomial::constant(c))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(Self).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("polynomial serializes")
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn is_real(&self) -> bool {
        self.0.is_real()
    }

    fn coefficient(&self, a: u32, b: u32, c: u32) -> Complex64 {
        self.0.coefficient([a, b, c])
    }

    /// `[((a, b, c), coefficient), ...]` in canonical order.
    fn terms(&self) -> Vec<((u32, u32, u32), Complex64)> {
        self.0.terms().map(|(&[a, b, c], &z)| ((a, b, c), z)).collect()
    }

    fn eval(&self, u: f64, v: f64, w: f64) -> PyResult<Complex64> {
        Ok(self.0.eval(&point(u, v, w)?))
    }

    fn conj(&self) -> Self {
        Self(self.0.conj())
    }

    fn bracket(&self, other: &Self) -> Self {
        Self(sphere::poisson_bracket(&self.0, &other.0))
    }

    fn laplacian(&self) -> Self {
        Self(sphere::laplacian(&self.0))
    }

    fn integrate(&self) -> PyResult<Complex64> {
        let grid = sphere::build_grid(self.0.degree() / 2 + 1).map_err(err)?;
        sphere::integrate(&grid, &self.0).map_err(err)
    }

    #[pyo3(signature = (samples = 4000))]
    fn sup_norm(&self, samples: usize) -> PyResult<f64> {
        sphere::sup_norm(&self.0, samples).map_err(err)
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    fn __neg__(&self) -> Self {
        Self(-&self.0)
    }

    fn __pow__(&self, k: u32, _modulo: Option<Py<PyAny>>) -> Self {
        Self(self.0.pow(k))
    }

    fn scale(&self, c: Complex64) -> Self {
        Self(self.0.scale(c))
    }

    fn __repr__(&self) -> String {
        format!("SpherePolynomial('{}')", self.0)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

/// The space `H_N` of holomorphic sections of `O(N + k0)`.
#[pyclass(name = "SectionSpace", module = "btq", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySectionSpace(SectionSpace);

#[pymethods]
impl PySectionSpace {
    #[new]
    #[pyo3(signature = (level, k0 = 0))]
    fn new(level: i64, k0: i64) -> Self {
        Self(make_space(level, k0))
    }

    #[getter]
    fn level(&self) -> i64 {
        self.0.level()
    }

    #[getter]
    fn k0(&self) -> i64 {
        self.0.k0()
    }

    #[getter]
    fn total_degree(&self) -> i64 {
        self.0.total_degree()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn gram_diag(&self) -> Vec<f64> {
        self.0.gram_diag().to_vec()
    }

    fn gram_by_quadrature(&self) -> PyResult<Vec<f64>> {
        self.0.gram_by_quadrature().map_err(err)
    }

    #[pyo3(signature = (f, kind = "toeplitz"))]
    fn quantize(&self, f: &PySpherePolynomial, kind: &str) -> PyResult<PyOperator> {
        quantize::quantize_auto(&self.0, &f.0, map_kind(kind)?).map(PyOperator).map_err(err)
    }

    fn toeplitz(&self, f: &PySpherePolynomial) -> PyResult<PyOperator> {
        self.quantize(f, "toeplitz")
    }

    fn geometric(&self, f: &PySpherePolynomial) -> PyResult<PyOperator> {
        self.quantize(f, "geometric")
    }

    fn identity(&self) -> PyOperator {
        PyOperator(QuantOperator::identity(&self.0))
    }

    fn __repr__(&self) -> String {
        format!("SectionSpace(level={}, k0={}, dim={})", self.0.level(), self.0.k0(), self.0.dim())
    }
}

/// A dense operator on `H_N` in the orthonormal monomial basis.
#[pyclass(name = "Operator", module = "btq", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyOperator(QuantOperator);

#[pymethods]
impl PyOperator {
    #[getter]
    fn size(&self) -> usize {
        self.0.size()
    }

    /// Row-major list of rows.
    fn matrix(&self) -> Vec<Vec<Complex64>> {
        let m = self.0.matrix();
        (0..m.nrows()).map(|j| (0..m.ncols()).map(|k| m[(j, k)]).collect()).collect()
    }

    fn entry(&self, j: usize, k: usize) -> PyResult<Complex64> {
        let m = self.0.matrix();
        if j < m.nrows() && k < m.ncols() {
            Ok(m[(j, k)])
        } else {
            Err(PyValueError::new_err(format!("index ({j}, {k}) out of range for size {}", m.nrows())))
        }
    }

    fn norm(&self) -> f64 {
        quantize::operator_norm(&self.0)
    }

    fn trace(&self) -> Complex64 {
        quantize::partial_trace(&self.0)
    }

    fn is_hermitian(&self, tol: f64) -> bool {
        self.0.is_hermitian(tol)
    }

    fn eigenvalues(&self) -> Vec<f64> {
        self.0.hermitian_eigenvalues()
    }

    fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    fn commutator(&self, other: &Self) -> Self {
        Self(self.0.commutator(&other.0))
    }

    fn symbol(&self, u: f64, v: f64, w: f64) -> PyResult<Complex64> {
        quantize::symbol(&self.0, &point(u, v, w)?).map_err(err)
    }

    fn scale(&self, c: Complex64) -> Self {
        Self(self.0.scale(c))
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    fn __matmul__(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    fn __repr__(&self) -> String {
        format!("Operator(size={})", self.0.size())
    }
}

/// Element of the formal Weyl algebra with exact rational coefficients.
#[pyclass(name = "FormalSeries", module = "btq", frozen, skip_from_py_object, eq)]
#[derive(Clone, PartialEq)]
struct PyFormalSeries(FormalSeries);

#[pymethods]
impl PyFormalSeries {
    #[staticmethod]
    #[pyo3(signature = (i, pairs = 1, truncation = DEFAULT_TRUNCATION))]
    fn x(i: usize, pairs: usize, truncation: i32) -> Self {
        Self(FormalSeries::x(pairs, truncation, i))
    }

    #[staticmethod]
    #[pyo3(signature = (i, pairs = 1, truncation = DEFAULT_TRUNCATION))]
    fn p(i: usize, pairs: usize, truncation: i32) -> Self {
        Self(FormalSeries::p(pairs, truncation, i))
    }

    #[staticmethod]
    #[pyo3(signature = (pairs = 1, truncation = DEFAULT_TRUNCATION))]
    fn one(pairs: usize, truncation: i32) -> Self {
        Self(FormalSeries::one(pairs, truncation))
    }

    #[staticmethod]
    #[pyo3(signature = (pairs = 1, truncation = DEFAULT_TRUNCATION))]
    fn hbar(pairs: usize, truncation: i32) -> Self {
        Self(FormalSeries::hbar(pairs, truncation))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        FormalSeries::from_json(&v).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        self.0.to_json().to_string()
    }

    #[getter]
    fn pairs(&self) -> usize {
        self.0.pairs()
    }

    #[getter]
    fn truncation(&self) -> i32 {
        self.0.truncation()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.0.add(&other.0).map(Self).map_err(err)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.0.sub(&other.0).map(Self).map_err(err)
    }

    /// Moyal star product.
    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        moyal::moyal_product(&self.0, &other.0, self.0.truncation().min(other.0.truncation())).map(Self).map_err(err)
    }

    fn commutator(&self, other: &Self) -> PyResult<Self> {
        moyal::star_commutator(&self.0, &other.0, self.0.truncation().min(other.0.truncation())).map(Self).map_err(err)
    }

    fn poisson_bracket(&self, other: &Self) -> PyResult<Self> {
        self.0.poisson_bracket(&other.0).map(Self).map_err(err)
    }

    fn conj(&self) -> Self {
        Self(self.0.star_conjugate())
    }

    fn __repr__(&self) -> String {
        format!("FormalSeries({})", self.to_json())
    }
}

fn idempotents(names: &[String]) -> PyResult<Vec<ClassicalIdempotent>> {
    names.iter().map(|n| index::idempotent_by_name(n).map_err(err)).collect()
}

/// Lifts one named idempotent at one level and compares its trace with the prediction.
#[pyfunction]
#[pyo3(signature = (level, name = "trivial", k0 = 0, kind = "toeplitz", min_gap = DEFAULT_GAP))]
fn index_check(py: Python<'_>, level: i64, name: &str, k0: i64, kind: &str, min_gap: f64) -> PyResult<Py<PyAny>> {
    let e = index::idempotent_by_name(name).map_err(err)?;
    let r = index::index_check(level, k0, &e, map_kind(kind)?, min_gap).map_err(err)?;
    json_to_py(py, &r.to_json())
}

#[pyfunction]
#[pyo3(signature = (levels, names = vec!["trivial".to_string(), "bott+1".to_string()], k0 = 0, kind = "toeplitz", min_gap = DEFAULT_GAP))]
fn beta_check(py: Python<'_>, levels: Vec<i64>, names: Vec<String>, k0: i64, kind: &str, min_gap: f64) -> PyResult<Py<PyAny>> {
    let r = index::beta_check(&levels, k0, &idempotents(&names)?, map_kind(kind)?, min_gap).map_err(err)?;
    json_to_py(py, &r.to_json())
}

/// `theta` as `{"deg0": {...}, "deg2": {...}}` keyed by powers of `hbar`.
#[pyfunction]
#[pyo3(signature = (k0 = 0))]
fn theta_class(py: Python<'_>, k0: i64) -> PyResult<Py<PyAny>> {
    let t = index::theta_class(k0);
    json_to_py(py, &serde_json::json!({"deg0": t.deg0.to_json("hbar"), "deg2": t.deg2.to_json("hbar")}))
}

/// `dim` of the lifted range as a polynomial in `N`: `{"N": a, "1": b}`.
#[pyfunction]
#[pyo3(signature = (name, k0 = 0))]
fn gq_index_polynomial(py: Python<'_>, name: &str, k0: i64) -> PyResult<Py<PyAny>> {
    let e = index::idempotent_by_name(name).map_err(err)?;
    json_to_py(py, &index::gq_index_polynomial(&e.character(), k0).to_json("N"))
}

#[pyfunction]
#[pyo3(signature = (f, g, levels = vec![8, 16, 32, 64], k0 = 0, kind = "toeplitz"))]
fn commutator_scan(
    f: &PySpherePolynomial,
    g: &PySpherePolynomial,
    levels: Vec<i64>,
    k0: i64,
    kind: &str,
) -> PyResult<(Vec<f64>, bool)> {
    let audit = btq_core::asymptotics::commutator_scan(&f.0, &g.0, &levels, k0, map_kind(kind)?).map_err(err)?;
    Ok((audit.configured.scan.real_values(), audit.passes()))
}

#[pyfunction]
#[pyo3(signature = (seed = 7, trials = 100, truncation = DEFAULT_TRUNCATION))]
fn run_axiom_checks(seed: u64, trials: usize, truncation: i32) -> PyResult<bool> {
    moyal::run_axiom_checks(seed, trials, truncation).map(|r| r.passes()).map_err(err)
}

/// Runs a CLI command on a JSON config string and returns `(pass, report)`.
#[pyfunction]
#[pyo3(signature = (command, config = "{}"))]
fn run(py: Python<'_>, command: &str, config: &str) -> PyResult<(bool, Py<PyAny>)> {
    let mut v: Value = serde_json::from_str(config).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let obj = v.as_object_mut().ok_or_else(|| PyValueError::new_err("config must be a JSON object"))?;
    obj.insert("command".into(), Value::String(command.into()));
    let cfg = parse_config(&v.to_string()).map_err(err)?;
    let out = execute(&cfg).map_err(err)?;
    Ok((out.pass, json_to_py(py, &out.report)?))
}

#[pymodule]
fn btq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpherePolynomial>()?;
    m.add_class::<PySectionSpace>()?;
    m.add_class::<PyOperator>()?;
    m.add_class::<PyFormalSeries>()?;
    m.add_function(wrap_pyfunction!(index_check, m)?)?;
    m.add_function(wrap_pyfunction!(beta_check, m)?)?;
    m.add_function(wrap_pyfunction!(theta_class, m)?)?;
    m.add_function(wrap_pyfunction!(gq_index_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(commutator_scan, m)?)?;
    m.add_function(wrap_pyfunction!(run_axiom_checks, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}

//! Python bindings: `import pygausscalc`.

use std::cell::RefCell;

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gausscalc::besov::{self, BesovParams, BesovQuadrature, HardyGrid, HardyKind, QExponent};
use gausscalc::fractional::{self, IntegralEvaluation};
use gausscalc::harness::{self, ExperimentConfig};
use gausscalc::hermite::lp_norm_gamma;
use gausscalc::quadrature::TimeQuadrature;
use gausscalc::semigroups::{self, KernelRule, SubordinationRule};
use gausscalc::{Error, MultiIndex};

create_exception!(pygausscalc, GaussCalcError, PyValueError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } | Error::Json(_) | Error::Csv(_) => PyRuntimeError::new_err(e.to_string()),
        other => GaussCalcError::new_err(other.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for gausscalc::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// Finite Hermite expansion `Σ c_ν h_ν` in `dim` variables.
#[pyclass(name = "HermiteExpansion", module = "pygausscalc", skip_from_py_object)]
#[derive(Clone)]
struct PyExpansion {
    inner: gausscalc::HermiteExpansion,
}

impl From<gausscalc::HermiteExpansion> for PyExpansion {
    fn from(inner: gausscalc::HermiteExpansion) -> Self {
        PyExpansion { inner }
    }
}

#[pymethods]
impl PyExpansion {
    /// `HermiteExpansion(dim, [(nu, c), ...])`.
    #[new]
    #[pyo3(signature = (dim, terms = Vec::new()))]
    fn new(dim: usize, terms: Vec<(Vec<u32>, f64)>) -> PyResult<Self> {
        if dim == 0 {
            return Err(GaussCalcError::new_err("dimension must be positive"));
        }
        let terms = terms.into_iter().map(|(nu, c)| (MultiIndex::new(nu), c));
        Ok(gausscalc::HermiteExpansion::from_terms(dim, terms).py()?.into())
    }

    /// The single basis function `h_ν`.
    #[staticmethod]
    fn basis(nu: Vec<u32>) -> PyResult<Self> {
        if nu.is_empty() {
            return Err(GaussCalcError::new_err("multi-index must be non-empty"));
        }
        Ok(gausscalc::HermiteExpansion::basis(MultiIndex::new(nu)).into())
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(gausscalc::HermiteExpansion::from_json(text).py()?.into())
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().py()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn degree(&self) -> u32 {
        self.inner.degree()
    }

    /// `[(nu, c), ...]` in index order.
    fn coeffs(&self) -> Vec<(Vec<u32>, f64)> {
        self.inner.terms().map(|(nu, c)| (nu.exponents().to_vec(), c)).collect()
    }

    fn coeff(&self, nu: Vec<u32>) -> f64 {
        self.inner.coeff(&MultiIndex::new(nu))
    }

    fn eval(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.eval(&x).py()
    }

    fn l2_norm(&self) -> f64 {
        self.inner.l2_norm()
    }

    fn scale(&self, s: f64) -> Self {
        self.inner.scale(s).into()
    }

    fn __add__(&self, other: PyRef<'_, PyExpansion>) -> PyResult<Self> {
        Ok(self.inner.add(&other.inner).py()?.into())
    }

    fn __sub__(&self, other: PyRef<'_, PyExpansion>) -> PyResult<Self> {
        Ok(self.inner.sub(&other.inner).py()?.into())
    }

    fn __mul__(&self, s: f64) -> Self {
        self.scale(s)
    }

    fn __rmul__(&self, s: f64) -> Self {
        self.scale(s)
    }

    fn __eq__(&self, other: PyRef<'_, PyExpansion>) -> bool {
        self.inner == other.inner
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __call__(&self, x: Vec<f64>) -> PyResult<f64> {
        self.eval(x)
    }

    fn __repr__(&self) -> String {
        format!("HermiteExpansion(dim={}, terms={}, degree={})", self.inner.dim(), self.inner.len(), self.inner.degree())
    }
}

/// Tensor Gauss-Hermite rule for `γ_d`.
#[pyclass(name = "GaussHermiteGrid", module = "pygausscalc")]
struct PyGrid {
    inner: gausscalc::GaussHermiteGrid,
}

#[pymethods]
impl PyGrid {
    /// `GaussHermiteGrid(dim, nodes_per_axis)`.
    #[new]
    fn new(dim: usize, nodes: usize) -> PyResult<Self> {
        Ok(PyGrid { inner: gausscalc::GaussHermiteGrid::new(dim, nodes).py()? })
    }

    /// Smallest grid integrating `|f|²` exactly for `deg f ≤ degree`.
    #[staticmethod]
    fn exact_for_degree(dim: usize, degree: u32) -> PyResult<Self> {
        Ok(PyGrid { inner: gausscalc::GaussHermiteGrid::exact_for_degree(dim, degree).py()? })
    }

    /// Grid used by the Besov norms for this degree and `p`.
    #[staticmethod]
    fn for_besov(dim: usize, degree: u32, p: f64) -> PyResult<Self> {
        Ok(PyGrid { inner: besov::spatial_grid_for(dim, degree, p).py()? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn nodes_per_axis(&self) -> usize {
        self.inner.nodes_per_axis()
    }

    fn nodes_1d(&self) -> Vec<f64> {
        self.inner.nodes_1d().to_vec()
    }

    fn weights_1d(&self) -> Vec<f64> {
        self.inner.weights_1d().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("GaussHermiteGrid(dim={}, nodes_per_axis={})", self.inner.dim(), self.inner.nodes_per_axis())
    }
}

/// `‖f‖_{p,γ}` on `grid`.
#[pyfunction]
fn lp_norm(f: PyRef<'_, PyExpansion>, p: f64, grid: PyRef<'_, PyGrid>) -> PyResult<f64> {
    lp_norm_gamma(&f.inner, p, &grid.inner).py()
}

/// Ornstein-Uhlenbeck semigroup `T_t f`.
#[pyfunction]
fn ou(f: PyRef<'_, PyExpansion>, t: f64) -> PyResult<PyExpansion> {
    Ok(semigroups::ou_spectral(&f.inner, t).py()?.into())
}

/// `T_t f(x)` through the Mehler formula.
#[pyfunction]
fn ou_mehler(f: PyRef<'_, PyExpansion>, t: f64, x: Vec<f64>, grid: PyRef<'_, PyGrid>) -> PyResult<f64> {
    semigroups::ou_mehler(&f.inner, t, &x, &grid.inner).py()
}

/// Poisson-Hermite semigroup `P_t f`.
#[pyfunction]
fn poisson_hermite(f: PyRef<'_, PyExpansion>, t: f64) -> PyResult<PyExpansion> {
    Ok(semigroups::ph_spectral(&f.inner, t).py()?.into())
}

/// `P_t f(x)` by subordination to `T_t`.
#[pyfunction]
fn ph_subordination(f: PyRef<'_, PyExpansion>, t: f64, x: Vec<f64>) -> PyResult<f64> {
    semigroups::ph_subordination(&f.inner, t, &x, &SubordinationRule::default()).py()
}

/// Poisson-Hermite kernel `p(t, x, y)` against Lebesgue measure.
#[pyfunction]
fn ph_kernel(t: f64, x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    semigroups::ph_kernel(t, &x, &y, &KernelRule::default()).py()
}

/// `∂_t^k P_t f`.
#[pyfunction]
fn time_derivative(f: PyRef<'_, PyExpansion>, t: f64, k: u32) -> PyResult<PyExpansion> {
    Ok(semigroups::time_derivative(&f.inner, t, k).py()?.into())
}

#[pyfunction]
fn riesz_potential(f: PyRef<'_, PyExpansion>, beta: f64) -> PyResult<PyExpansion> {
    Ok(fractional::riesz_potential(&f.inner, beta).py()?.into())
}

#[pyfunction]
fn bessel_potential(f: PyRef<'_, PyExpansion>, beta: f64) -> PyResult<PyExpansion> {
    Ok(fractional::bessel_potential(&f.inner, beta).py()?.into())
}

#[pyfunction]
fn riesz_derivative(f: PyRef<'_, PyExpansion>, beta: f64) -> PyResult<PyExpansion> {
    Ok(fractional::riesz_derivative(&f.inner, beta).py()?.into())
}

#[pyfunction]
fn bessel_derivative(f: PyRef<'_, PyExpansion>, beta: f64) -> PyResult<PyExpansion> {
    Ok(fractional::bessel_derivative(&f.inner, beta).py()?.into())
}

/// One of the integral representations, as `(value, head_error, tail_error)`.
///
/// `op` is `riesz_potential`, `bessel_potential`, `riesz_derivative` or
/// `bessel_derivative`.
#[pyfunction]
fn operator_integral(op: &str, f: PyRef<'_, PyExpansion>, beta: f64) -> PyResult<(PyExpansion, f64, f64)> {
    let tq = TimeQuadrature::default();
    let eval: IntegralEvaluation = match op {
        "riesz_potential" => fractional::riesz_potential_integral(&f.inner, beta, &tq),
        "bessel_potential" => fractional::bessel_potential_integral(&f.inner, beta, &tq),
        "riesz_derivative" => fractional::riesz_derivative_integral(&f.inner, beta, &tq),
        "bessel_derivative" => fractional::bessel_derivative_integral(&f.inner, beta, &tq),
        other => return Err(GaussCalcError::new_err(format!("unknown operator `{other}`"))),
    }
    .py()?;
    Ok((eval.value.into(), eval.head_error, eval.tail_error))
}

/// Normalizing constant `c_β` of the fractional derivative integral.
#[pyfunction]
fn c_beta(beta: f64) -> PyResult<f64> {
    fractional::c_beta(beta).py()
}

#[pyfunction]
fn c_beta_k(beta: f64, k: u32) -> PyResult<f64> {
    fractional::c_beta_k(beta, k).py()
}

#[pyfunction]
fn smallest_k(alpha: f64) -> u32 {
    besov::smallest_k(alpha)
}

fn parse_q(q: &Bound<'_, PyAny>) -> PyResult<QExponent> {
    if let Ok(s) = q.extract::<String>() {
        if s == "inf" {
            return Ok(QExponent::Infinite);
        }
        return Err(GaussCalcError::new_err(format!("q must be a number or \"inf\", got `{s}`")));
    }
    let v: f64 = q.extract()?;
    Ok(if v.is_infinite() { QExponent::Infinite } else { QExponent::Finite(v) })
}

/// Besov norm of `f` as a dict with keys `lp`, `semi`, `ak`, `total`,
/// `params` and `t_grid`. `q` may be `float("inf")` or `"inf"`.
#[pyfunction]
#[pyo3(signature = (f, alpha, p, q, k = None, grid = None))]
fn besov_norm<'py>(
    py: Python<'py>,
    f: PyRef<'_, PyExpansion>,
    alpha: f64,
    p: f64,
    q: &Bound<'py, PyAny>,
    k: Option<u32>,
    grid: Option<PyRef<'_, PyGrid>>,
) -> PyResult<Bound<'py, PyAny>> {
    let q = parse_q(q)?;
    let params = match k {
        Some(k) => BesovParams::with_k(alpha, p, q, k),
        None => BesovParams::new(alpha, p, q),
    }
    .py()?;
    let owned;
    let grid = match &grid {
        Some(g) => &g.inner,
        None => {
            owned = besov::spatial_grid_for(f.inner.dim(), f.inner.degree(), p).py()?;
            &owned
        }
    };
    let result = besov::besov_norm(&f.inner, &params, &BesovQuadrature::default(), grid).py()?;
    json_to_py(py, &result.to_json().py()?)
}

/// Both sides of a Hardy inequality for a Python callable `f ≥ 0`.
///
/// Returns `(lhs, rhs)` with `rhs` carrying the constant `(p/r)^p`; either
/// side is `inf` when it diverges. `kind` is `"head"` or `"tail"`.
#[pyfunction]
fn hardy_check(f: &Bound<'_, PyAny>, p: f64, r: f64, kind: &str) -> PyResult<(f64, f64)> {
    let kind = match kind {
        "head" => HardyKind::Head,
        "tail" => HardyKind::Tail,
        other => return Err(GaussCalcError::new_err(format!("kind must be head or tail, got `{other}`"))),
    };
    let failure: RefCell<Option<PyErr>> = RefCell::new(None);
    let g = |y: f64| match f.call1((y,)).and_then(|v| v.extract::<f64>()) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let outcome = besov::hardy_check(g, p, r, kind, &HardyGrid::default());
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let outcome = outcome.py()?;
    Ok((outcome.lhs, outcome.rhs))
}

/// `m` seeded random expansions with unit `L²` norm and degree at most `n`.
#[pyfunction]
fn gen_family(seed: u64, d: usize, m: usize, n: u32) -> PyResult<Vec<PyExpansion>> {
    Ok(harness::gen_family(seed, d, m, n).py()?.into_iter().map(Into::into).collect())
}

/// `[(id, summary), ...]` for the registered experiments.
#[pyfunction]
fn list_experiments() -> Vec<(&'static str, &'static str)> {
    harness::experiment_list().iter().map(|e| (e.id, e.summary)).collect()
}

fn config_from(overrides: Option<&Bound<'_, PyDict>>) -> PyResult<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(map) = overrides {
        for (k, v) in map.iter() {
            let key: String = k.extract()?;
            let value = match v.extract::<String>() {
                Ok(s) => s,
                Err(_) => v.str()?.to_string(),
            };
            cfg.set(&key, &value).py()?;
        }
    }
    cfg.validate().py()?;
    Ok(cfg)
}

fn report_to_py<'py>(py: Python<'py>, report: &harness::Report) -> PyResult<Bound<'py, PyAny>> {
    let text = harness::render(report, harness::OutputFormat::Json).py()?;
    json_to_py(py, &text)
}

/// Runs one experiment; returns the report as a dict.
///
/// `overrides` maps config keys to values, e.g. `{"family_size": 10}`.
#[pyfunction]
#[pyo3(signature = (name, overrides = None))]
fn run_experiment<'py>(
    py: Python<'py>,
    name: &str,
    overrides: Option<&Bound<'py, PyDict>>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config_from(overrides)?;
    let report = py.detach(|| harness::run_many([name], &cfg)).py()?;
    report_to_py(py, &report)
}

/// Runs every registered experiment; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (overrides = None))]
fn verify_all<'py>(py: Python<'py>, overrides: Option<&Bound<'py, PyDict>>) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config_from(overrides)?;
    let report = py.detach(|| harness::verify_all(&cfg)).py()?;
    report_to_py(py, &report)
}

#[pymodule]
fn pygausscalc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GaussCalcError", m.py().get_type::<GaussCalcError>())?;
    m.add_class::<PyExpansion>()?;
    m.add_class::<PyGrid>()?;
    m.add_function(wrap_pyfunction!(lp_norm, m)?)?;
    m.add_function(wrap_pyfunction!(ou, m)?)?;
    m.add_function(wrap_pyfunction!(ou_mehler, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_hermite, m)?)?;
    m.add_function(wrap_pyfunction!(ph_subordination, m)?)?;
    m.add_function(wrap_pyfunction!(ph_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(time_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(riesz_potential, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_potential, m)?)?;
    m.add_function(wrap_pyfunction!(riesz_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(operator_integral, m)?)?;
    m.add_function(wrap_pyfunction!(c_beta, m)?)?;
    m.add_function(wrap_pyfunction!(c_beta_k, m)?)?;
    m.add_function(wrap_pyfunction!(smallest_k, m)?)?;
    m.add_function(wrap_pyfunction!(besov_norm, m)?)?;
    m.add_function(wrap_pyfunction!(hardy_check, m)?)?;
    m.add_function(wrap_pyfunction!(gen_family, m)?)?;
    m.add_function(wrap_pyfunction!(list_experiments, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(verify_all, m)?)?;
    Ok(())
}

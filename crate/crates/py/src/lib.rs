//! Python bindings: groups, counting, percolation samples, couplings and
//! the acceptance criteria. Structured results come back as dicts.

use pyo3::exceptions::{PyMemoryError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use nilperc::cayley::{enumerate_ball, fit_growth, DEFAULT_POINT_CAP};
use nilperc::coupling::{coupled_quotient_exploration, dominance_test, QuotientSpec};
use nilperc::group::{builtin_spec, Builtin};
use nilperc::haar::{haar_count, lattice_count_anisotropic, CoordinateSystem, Region, DEFAULT_WINDOW_CAP};
use nilperc::percolation::{
    cluster_stats, estimate_lambda_c, sample_spread_out, Model, NeighborBall, Window, WindowSpec, DEFAULT_VERTEX_CAP,
};
use nilperc::verify::{run_criterion, VerifyOptions, DEFAULT_MASTER_SEED};
use nilperc::{CouplingError, Group, GroupError, HaarError, LatticePoint, MetricError, PercolationError, Structure};

/// Python exception for a library error: `MemoryError` for resource caps,
/// `ValueError` for bad input and `RuntimeError` otherwise.
trait ToPyErr: std::fmt::Display {
    fn class(&self) -> Class;
}

enum Class {
    Input,
    Cap,
    Other,
}

impl ToPyErr for GroupError {
    fn class(&self) -> Class {
        match self {
            GroupError::InvalidSpec(_) | GroupError::DimensionMismatch { .. } | GroupError::NonPositiveScale(_) => {
                Class::Input
            }
            _ => Class::Other,
        }
    }
}

impl ToPyErr for MetricError {
    fn class(&self) -> Class {
        match self {
            MetricError::Group(e) => e.class(),
            MetricError::ResourceCap { .. } => Class::Cap,
            MetricError::InvalidParameters(_)
            | MetricError::NoGenerators
            | MetricError::NotTransversal(_)
            | MetricError::TableTooSmall { .. } => Class::Input,
            _ => Class::Other,
        }
    }
}

impl ToPyErr for HaarError {
    fn class(&self) -> Class {
        match self {
            HaarError::Group(e) => e.class(),
            HaarError::Metric(e) => e.class(),
            HaarError::EnumerationCap { .. } => Class::Cap,
            HaarError::BadRegion(_) | HaarError::BadScale(_) => Class::Input,
        }
    }
}

impl ToPyErr for PercolationError {
    fn class(&self) -> Class {
        match self {
            PercolationError::Group(e) => e.class(),
            PercolationError::Metric(e) => e.class(),
            PercolationError::Haar(e) => e.class(),
            PercolationError::WindowTooLarge(_) => Class::Cap,
            PercolationError::LambdaTooLarge { .. }
            | PercolationError::BadWindow(_)
            | PercolationError::InsufficientSeeds { .. }
            | PercolationError::InvalidParameters(_) => Class::Input,
            _ => Class::Other,
        }
    }
}

impl ToPyErr for CouplingError {
    fn class(&self) -> Class {
        match self {
            CouplingError::Group(e) => e.class(),
            CouplingError::Metric(e) => e.class(),
            CouplingError::DistanceBound { .. } => Class::Other,
            _ => Class::Input,
        }
    }
}

impl ToPyErr for serde_json::Error {
    fn class(&self) -> Class {
        Class::Other
    }
}

fn err<E: ToPyErr>(e: E) -> PyErr {
    let m = e.to_string();
    match e.class() {
        Class::Input => PyValueError::new_err(m),
        Class::Cap => PyMemoryError::new_err(m),
        Class::Other => PyRuntimeError::new_err(m),
    }
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any().unbind()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any().unbind()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind()
            }
        }
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(a) => {
            let l = PyList::empty(py);
            for x in a {
                l.append(to_py(py, x)?)?;
            }
            l.into_any().unbind()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any().unbind()
        }
    })
}

fn json<T: serde::Serialize>(py: Python<'_>, x: &T) -> PyResult<Py<PyAny>> {
    to_py(py, &serde_json::to_value(x).map_err(err)?)
}

/// A built-in group: `z<d>`, `heisenberg3` or `filiform4`.
#[pyclass(name = "Group", module = "nilperc", frozen)]
struct PyGroup {
    inner: Group,
}

#[pymethods]
impl PyGroup {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        let b = Builtin::parse(name).map_err(err)?;
        Ok(PyGroup { inner: Group::new(builtin_spec(&b).map_err(err)?).map_err(err)? })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.spec().name.clone()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn weights(&self) -> Vec<u32> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn growth_degree(&self) -> u32 {
        self.inner.spec().growth_degree
    }

    #[getter]
    fn is_abelian(&self) -> bool {
        self.inner.spec().is_abelian()
    }

    fn identity(&self) -> Vec<i64> {
        self.inner.identity().0
    }

    fn multiply(&self, x: Vec<i64>, y: Vec<i64>) -> PyResult<Vec<i64>> {
        Ok(self.inner.multiply(&LatticePoint(x), &LatticePoint(y)).map_err(err)?.0)
    }

    fn inverse(&self, x: Vec<i64>) -> PyResult<Vec<i64>> {
        Ok(self.inner.inverse(&LatticePoint(x)).map_err(err)?.0)
    }

    /// Exponential coordinates as `(numerator, denominator)` pairs.
    fn to_exponential(&self, x: Vec<i64>) -> PyResult<Vec<(i128, i128)>> {
        let v = self.inner.to_exponential(&LatticePoint(x)).map_err(err)?;
        Ok(v.0.iter().map(|q| (*q.numer(), *q.denom())).collect())
    }

    /// Product of exponential coordinates; `graded` selects the limit law.
    #[pyo3(signature = (a, b, graded = false))]
    fn bch_multiply(&self, a: Vec<f64>, b: Vec<f64>, graded: bool) -> PyResult<Vec<f64>> {
        let s = if graded { Structure::Graded } else { Structure::Original };
        self.inner.bch_multiply_f64(s, &a, &b).map_err(err)
    }

    fn dilate(&self, factor: f64, v: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.dilate(factor, &v).map_err(err)
    }

    /// `beta(n)` for `n = 0..=rmax`.
    #[pyo3(signature = (rmax, cap = DEFAULT_POINT_CAP))]
    fn ball_sizes(&self, py: Python<'_>, rmax: usize, cap: usize) -> PyResult<Vec<u64>> {
        let g = self.inner.clone();
        Ok(py.detach(|| enumerate_ball(&g, rmax, false, cap)).map_err(err)?.counts)
    }

    /// Growth degree and `c_S` fitted on the ball of radius `rmax`.
    fn fit_growth(&self, py: Python<'_>, rmax: usize) -> PyResult<Py<PyAny>> {
        let g = self.inner.clone();
        let fit = py
            .detach(|| enumerate_ball(&g, rmax, false, DEFAULT_POINT_CAP).map(|t| fit_growth(&t)))
            .map_err(err)?
            .map_err(err)?;
        json(py, &fit)
    }

    /// Points of `delta_{1/r}(Gamma)` in the box `[lo, hi]`, given in
    /// `"exponential"` or `"second-kind"` coordinates.
    #[pyo3(signature = (lo, hi, r, system = "exponential", closed = true))]
    fn haar_count(&self, py: Python<'_>, lo: Vec<f64>, hi: Vec<f64>, r: f64, system: &str, closed: bool) -> PyResult<u64> {
        let system = match system {
            "exponential" => CoordinateSystem::Exponential,
            "second-kind" => CoordinateSystem::SecondKindGraded,
            other => return Err(PyValueError::new_err(format!("unknown coordinate system '{other}'"))),
        };
        let region = Region::WeightedBox { lo, hi, system, closed };
        let g = self.inner.clone();
        Ok(py.detach(|| haar_count(&g, &region, r, DEFAULT_WINDOW_CAP)).map_err(err)?.count)
    }

    fn __repr__(&self) -> String {
        format!("Group('{}')", self.inner.spec().name)
    }
}

/// `#(delta_{1/r}(Z^d) cap [lo, hi])` with anisotropic weights.
#[pyfunction]
fn lattice_count(weights: Vec<u32>, lo: Vec<f64>, hi: Vec<f64>, r: f64) -> PyResult<u128> {
    let region = Region::closed_box(lo, hi, CoordinateSystem::Exponential);
    lattice_count_anisotropic(&weights, &region, r).map_err(err)
}

fn model(kind: &str, r: usize, lambda: f64, c_s: Option<f64>) -> PyResult<Model> {
    match (kind, c_s) {
        ("word", _) => Ok(Model::WordMetric { r, lambda }),
        ("cc", Some(c_s)) => Ok(Model::CCProxy { r, lambda, c_s }),
        ("cc", None) => Err(PyValueError::new_err("the cc model needs c_s")),
        (other, _) => Err(PyValueError::new_err(format!("unknown model '{other}'"))),
    }
}

fn setup(g: &Group, r: usize, window: &str) -> PyResult<(NeighborBall, Window)> {
    let t = enumerate_ball(g, r, true, DEFAULT_POINT_CAP).map_err(err)?;
    let nb = NeighborBall::new(g, &t, r).map_err(err)?;
    let spec = WindowSpec::parse(window, g.dim()).map_err(err)?;
    let w = Window::build(g, &spec, DEFAULT_VERTEX_CAP).map_err(err)?;
    Ok((nb, w))
}

/// One percolation sample: vertex coordinates, open edges and cluster sizes.
#[pyfunction]
#[pyo3(signature = (group, r, lam, window, seed, model_kind = "word", c_s = None))]
#[allow(clippy::too_many_arguments)]
fn sample(
    py: Python<'_>,
    group: &PyGroup,
    r: usize,
    lam: f64,
    window: &str,
    seed: u64,
    model_kind: &str,
    c_s: Option<f64>,
) -> PyResult<Py<PyAny>> {
    let m = model(model_kind, r, lam, c_s)?;
    let g = group.inner.clone();
    let (nb, w) = setup(&g, r, window)?;
    let s = py.detach(|| sample_spread_out(&g, &nb, m, &w, seed)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("vertices", (0..w.len()).map(|i| w.coords(i).to_vec()).collect::<Vec<_>>())?;
    d.set_item("edges", s.edges.clone())?;
    d.set_item("header", json(py, &s.header)?)?;
    d.set_item("report", json(py, &cluster_stats(&s))?)?;
    Ok(d.into_any().unbind())
}

/// Bisection estimate of `lambda_c` with the majority rule over seeds.
#[pyfunction]
#[pyo3(signature = (group, r, window, seeds, theta = 0.1, tol = 0.05, model_kind = "word", c_s = None))]
#[allow(clippy::too_many_arguments)]
fn estimate_lambda_c_py(
    py: Python<'_>,
    group: &PyGroup,
    r: usize,
    window: &str,
    seeds: Vec<u64>,
    theta: f64,
    tol: f64,
    model_kind: &str,
    c_s: Option<f64>,
) -> PyResult<Py<PyAny>> {
    let m = model(model_kind, r, 1.0, c_s)?;
    let g = group.inner.clone();
    let (nb, w) = setup(&g, r, window)?;
    let est = py.detach(|| estimate_lambda_c(&g, &nb, m, &w, &seeds, theta, tol)).map_err(err)?;
    json(py, &est)
}

/// Coupled exploration on the rail-swapped ladder of `length` rungs.
#[pyfunction]
fn ladder_exploration(py: Python<'_>, length: usize, p: f64, root: u32, seed: u64) -> PyResult<Py<PyAny>> {
    let q = QuotientSpec::ladder(length).map_err(err)?;
    let t = coupled_quotient_exploration(&q, 1, p, root, seed).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("trace", json(py, &t)?)?;
    d.set_item("open_steps", t.open_steps())?;
    d.set_item("witnesses_are_sound", t.witnesses_are_sound())?;
    Ok(d.into_any().unbind())
}

/// Empirical dominance of the quotient cluster on the ladder.
#[pyfunction]
#[pyo3(signature = (length, p, root, levels, n_seeds, seed = DEFAULT_MASTER_SEED))]
fn ladder_dominance(
    py: Python<'_>,
    length: usize,
    p: f64,
    root: u32,
    levels: Vec<usize>,
    n_seeds: usize,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let q = QuotientSpec::ladder(length).map_err(err)?;
    let rep = py.detach(|| dominance_test(&q, 1, p, root, &levels, n_seeds, seed)).map_err(err)?;
    json(py, &rep)
}

/// Runs one acceptance criterion and returns its record.
#[pyfunction]
#[pyo3(signature = (id, quick = true, seed = DEFAULT_MASTER_SEED))]
fn verify_criterion(py: Python<'_>, id: u32, quick: bool, seed: u64) -> PyResult<Py<PyAny>> {
    if !(1..=10).contains(&id) {
        return Err(PyValueError::new_err(format!("no criterion {id}")));
    }
    let r = py.detach(|| run_criterion(id, &VerifyOptions { quick, seed }));
    let d = PyDict::new(py);
    d.set_item("id", r.id)?;
    d.set_item("name", &r.name)?;
    d.set_item("passed", r.passed)?;
    d.set_item("summary", &r.summary)?;
    d.set_item("data", to_py(py, &r.data)?)?;
    Ok(d.into_any().unbind())
}

#[pymodule]
#[pyo3(name = "_native")]
fn native(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_function(wrap_pyfunction!(lattice_count, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add("estimate_lambda_c", wrap_pyfunction!(estimate_lambda_c_py, m)?)?;
    m.add_function(wrap_pyfunction!(ladder_exploration, m)?)?;
    m.add_function(wrap_pyfunction!(ladder_dominance, m)?)?;
    m.add_function(wrap_pyfunction!(verify_criterion, m)?)?;
    Ok(())
}

//! Python bindings: fields, code spaces, epsilon evaluation, bounds and search.
//!
//! Reports are returned as plain dicts with the same field names as the JSON
//! reports of the command line.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pmd_core::metrics::{self, average_overlap, bergamaschi_gap, design_average_check, epsilon_of};
use pmd_core::search::{bloch_grid, optimize_epsilon};
use pmd_core::{
    CodeSpace, CodeSpaceError, DenseOperator, FieldCtx, FieldError, Limits, MetricsError, PauliError, PauliSpace,
    PmdReport, SearchConfig, SearchError,
};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn metrics_err(e: MetricsError) -> PyErr {
    match e {
        MetricsError::Linalg(_) => PyRuntimeError::new_err(e.to_string()),
        _ => value_err(e),
    }
}

fn search_err(e: SearchError) -> PyErr {
    match e {
        SearchError::BoundViolated { .. } => PyRuntimeError::new_err(e.to_string()),
        SearchError::Metrics(m) => metrics_err(m),
        _ => value_err(e),
    }
}

fn field_err(e: FieldError) -> PyErr {
    value_err(e)
}

fn pauli_err(e: PauliError) -> PyErr {
    value_err(e)
}

fn code_err(e: CodeSpaceError) -> PyErr {
    value_err(e)
}

/// Serializes through JSON so dict keys match the command-line reports.
fn to_dict<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn with_workers<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> PyResult<R> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(PyValueError::new_err("workers must be at least 1")),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn rows(m: &pmd_core::linalg::CMatrix) -> Vec<Vec<Complex64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// The field GF(p^m) with its default modulus.
#[pyclass(name = "Field", module = "pmd_codes", frozen)]
struct PyField {
    inner: FieldCtx,
}

impl PyField {
    fn element(&self, c: Vec<u64>) -> PyResult<pmd_core::FieldElement> {
        self.inner.element(&c).map_err(field_err)
    }
}

#[pymethods]
impl PyField {
    #[new]
    #[pyo3(signature = (p, m = 1))]
    fn new(p: u64, m: usize) -> PyResult<Self> {
        Ok(PyField {
            inner: FieldCtx::new(p, m).map_err(field_err)?,
        })
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.p()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.q()
    }

    /// Coefficients c_0..c_m of the monic modulus.
    #[getter]
    fn modulus(&self) -> Vec<u32> {
        self.inner.modulus().to_vec()
    }

    fn basis(&self) -> Vec<Vec<u32>> {
        self.inner.basis().iter().map(|e| e.coeffs().to_vec()).collect()
    }

    fn dual_basis(&self) -> Vec<Vec<u32>> {
        self.inner.dual_basis().iter().map(|e| e.coeffs().to_vec()).collect()
    }

    fn add(&self, a: Vec<u64>, b: Vec<u64>) -> PyResult<Vec<u32>> {
        let s = self
            .inner
            .add(&self.element(a)?, &self.element(b)?)
            .map_err(field_err)?;
        Ok(s.coeffs().to_vec())
    }

    fn mul(&self, a: Vec<u64>, b: Vec<u64>) -> PyResult<Vec<u32>> {
        let s = self
            .inner
            .mul(&self.element(a)?, &self.element(b)?)
            .map_err(field_err)?;
        Ok(s.coeffs().to_vec())
    }

    fn inv(&self, a: Vec<u64>) -> PyResult<Vec<u32>> {
        Ok(self.inner.inv(&self.element(a)?).map_err(field_err)?.coeffs().to_vec())
    }

    fn trace(&self, a: Vec<u64>) -> PyResult<u32> {
        self.inner.trace(&self.element(a)?).map_err(field_err)
    }

    fn __repr__(&self) -> String {
        format!("Field(p={}, m={})", self.inner.p(), self.inner.m())
    }
}

/// A `q^k`-dimensional subspace of `q^n` qudits.
#[pyclass(name = "CodeSpace", module = "pmd_codes", frozen)]
struct PyCodeSpace {
    inner: CodeSpace,
}

#[pymethods]
impl PyCodeSpace {
    #[staticmethod]
    #[pyo3(signature = (n, k, p, m = 1))]
    fn standard(n: usize, k: usize, p: u64, m: usize) -> PyResult<Self> {
        let ctx = FieldCtx::new(p, m).map_err(field_err)?;
        Ok(PyCodeSpace {
            inner: CodeSpace::standard(&ctx, n, k).map_err(code_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n, k, p, m = 1, seed = 0))]
    fn random(n: usize, k: usize, p: u64, m: usize, seed: u64) -> PyResult<Self> {
        let ctx = FieldCtx::new(p, m).map_err(field_err)?;
        Ok(PyCodeSpace {
            inner: CodeSpace::random(&ctx, n, k, seed).map_err(code_err)?,
        })
    }

    /// Single-qubit state `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    #[staticmethod]
    fn bloch_state(theta: f64, phi: f64) -> Self {
        PyCodeSpace {
            inner: CodeSpace::bloch_state(theta, phi),
        }
    }

    /// Builds a code from `q^k` columns of length `q^n`.
    #[staticmethod]
    #[pyo3(signature = (n, k, p, columns, m = 1, reorthonormalize = false))]
    fn from_columns(
        n: usize,
        k: usize,
        p: u64,
        columns: Vec<Vec<Complex64>>,
        m: usize,
        reorthonormalize: bool,
    ) -> PyResult<Self> {
        let ctx = FieldCtx::new(p, m).map_err(field_err)?;
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(PyValueError::new_err("columns have different lengths"));
        }
        let data: Vec<Complex64> = columns.into_iter().flatten().collect();
        let cols = data.len().checked_div(rows).unwrap_or(0);
        let basis = pmd_core::linalg::CMatrix::from_column_slice(rows, cols, &data);
        Ok(PyCodeSpace {
            inner: CodeSpace::from_basis(&ctx, n, k, basis, reorthonormalize).map_err(code_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyCodeSpace {
            inner: CodeSpace::from_json(text).map_err(code_err)?,
        })
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        Ok(PyCodeSpace {
            inner: CodeSpace::load_path(path).map_err(code_err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn save(&self, path: std::path::PathBuf) -> PyResult<()> {
        self.inner.save_path(path).map_err(code_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.q()
    }

    /// `λ = n − k`.
    #[getter]
    fn redundancy(&self) -> usize {
        self.inner.lambda()
    }

    /// Basis matrix as a list of rows.
    fn basis(&self) -> Vec<Vec<Complex64>> {
        rows(self.inner.basis())
    }

    /// Full PMD report: epsilon, worst label, bound and slack.
    #[pyo3(signature = (workers = None))]
    fn report<'py>(&self, py: Python<'py>, workers: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
        let limits = Limits::from_env();
        let cs = &self.inner;
        let report = py
            .detach(|| with_workers(workers, || PmdReport::evaluate(cs, &limits)))?
            .map_err(metrics_err)?
            .0;
        to_dict(py, &report)
    }

    /// Largest `‖Π E Π‖∞` over non-identity Paulis.
    fn epsilon(&self, py: Python<'_>) -> PyResult<f64> {
        let limits = Limits::from_env();
        let cs = &self.inner;
        Ok(py.detach(|| epsilon_of(cs, &limits)).map_err(metrics_err)?.epsilon)
    }

    /// `(‖A‖∞, ‖A − q^{−λ} Π‖∞)` for the average-overlap operator `A`.
    fn average_overlap(&self, py: Python<'_>) -> PyResult<(f64, f64)> {
        let limits = Limits::from_env();
        let cs = &self.inner;
        py.detach(|| average_overlap(cs, &limits)).map_err(metrics_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "CodeSpace(n={}, k={}, q={})",
            self.inner.n(),
            self.inner.k(),
            self.inner.q()
        )
    }
}

/// `√((q^{2n−λ} − 1)/(q^{2n} − 1))`.
#[pyfunction]
fn theorem1_bound(n: u32, redundancy: u32, q: u64) -> PyResult<f64> {
    metrics::theorem1_bound(n, redundancy, q).map_err(metrics_err)
}

/// Minimal redundancy `2 log_q(1/ε) − log_q 2`.
#[pyfunction]
fn corollary1_bound(epsilon: f64, q: u64) -> PyResult<f64> {
    metrics::corollary1_bound(epsilon, q).map_err(metrics_err)
}

#[pyfunction]
fn gap<'py>(py: Python<'py>, n: u32, ell: u32, q: u64) -> PyResult<Bound<'py, PyAny>> {
    to_dict(py, &bergamaschi_gap(n, ell, q).map_err(metrics_err)?)
}

type SearchOutput<'py> = (PyCodeSpace, Bound<'py, PyAny>, Vec<(u64, f64)>);

/// Returns `(best_code, report, trajectory)`.
#[pyfunction]
#[pyo3(signature = (n, k, p, m = 1, seed = 0, restarts = 8, steps = 500, workers = None))]
#[allow(clippy::too_many_arguments)]
fn search<'py>(
    py: Python<'py>,
    n: usize,
    k: usize,
    p: u64,
    m: usize,
    seed: u64,
    restarts: usize,
    steps: usize,
    workers: Option<usize>,
) -> PyResult<SearchOutput<'py>> {
    let cfg = SearchConfig {
        seed,
        restarts,
        local_steps: steps,
        ..SearchConfig::new(n, k, p, m)
    };
    let limits = Limits::from_env();
    let result = py
        .detach(|| with_workers(workers, || optimize_epsilon(&cfg, &limits)))?
        .map_err(search_err)?;
    let report = to_dict(py, &result.report)?;
    Ok((PyCodeSpace { inner: result.best }, report, result.trajectory))
}

/// Brute-force single-qubit minimum: `(min_epsilon, theta, phi)`.
#[pyfunction]
#[pyo3(signature = (resolution, refinements = 3))]
fn bloch_grid_min(resolution: usize, refinements: usize) -> PyResult<(f64, f64, f64)> {
    let r = bloch_grid(resolution, refinements).map_err(search_err)?;
    Ok((r.min_epsilon, r.theta, r.phi))
}

/// 1-design deviation for one seeded Gaussian operator on `n` qudits.
#[pyfunction]
#[pyo3(signature = (n, p, m = 1, seed = 0))]
fn design_deviation(py: Python<'_>, n: usize, p: u64, m: usize, seed: u64) -> PyResult<f64> {
    let ctx = FieldCtx::new(p, m).map_err(field_err)?;
    let space = PauliSpace::new(&ctx, n).map_err(pauli_err)?;
    let limits = Limits::from_env();
    let o = DenseOperator::random_gaussian(space.dim(), seed);
    py.detach(|| design_average_check(&space, &o, &limits))
        .map_err(metrics_err)
}

/// Number of Pauli labels `q^{2n}`.
#[pyfunction]
#[pyo3(signature = (n, p, m = 1))]
fn num_labels(n: usize, p: u64, m: usize) -> PyResult<u64> {
    let ctx = FieldCtx::new(p, m).map_err(field_err)?;
    Ok(PauliSpace::new(&ctx, n).map_err(pauli_err)?.num_labels())
}

/// Dense matrix (list of rows) of the Pauli with enumeration index `index`.
#[pyfunction]
#[pyo3(signature = (index, n, p, m = 1))]
fn pauli_matrix(index: u64, n: usize, p: u64, m: usize) -> PyResult<Vec<Vec<Complex64>>> {
    let ctx = FieldCtx::new(p, m).map_err(field_err)?;
    let space = PauliSpace::new(&ctx, n).map_err(pauli_err)?;
    if index >= space.num_labels() {
        return Err(PyValueError::new_err(format!("index {index} out of range")));
    }
    let mat = space
        .matrix(&space.label(index), &Limits::from_env())
        .map_err(pauli_err)?;
    Ok(rows(mat.matrix()))
}

/// Text form of the label with enumeration index `index`.
#[pyfunction]
#[pyo3(signature = (index, n, p, m = 1))]
fn pauli_label(index: u64, n: usize, p: u64, m: usize) -> PyResult<String> {
    let ctx = FieldCtx::new(p, m).map_err(field_err)?;
    let space = PauliSpace::new(&ctx, n).map_err(pauli_err)?;
    if index >= space.num_labels() {
        return Err(PyValueError::new_err(format!("index {index} out of range")));
    }
    Ok(space.label(index).to_string())
}

/// Symplectic phase `Σ⟨a_i, b'_i⟩ − ⟨a'_i, b_i⟩`; the matrices satisfy
/// `E₂E₁ = ω^phase E₁E₂`.
#[pyfunction]
#[pyo3(signature = (i, j, n, p, m = 1))]
fn commutation_phase(i: u64, j: u64, n: usize, p: u64, m: usize) -> PyResult<u32> {
    let ctx = FieldCtx::new(p, m).map_err(field_err)?;
    let space = PauliSpace::new(&ctx, n).map_err(pauli_err)?;
    if i.max(j) >= space.num_labels() {
        return Err(PyValueError::new_err("index out of range"));
    }
    space
        .commutation_phase(&space.label(i), &space.label(j))
        .map_err(pauli_err)
}

#[pymodule]
fn pmd_codes(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PyCodeSpace>()?;
    m.add_function(wrap_pyfunction!(theorem1_bound, m)?)?;
    m.add_function(wrap_pyfunction!(corollary1_bound, m)?)?;
    m.add_function(wrap_pyfunction!(gap, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(bloch_grid_min, m)?)?;
    m.add_function(wrap_pyfunction!(design_deviation, m)?)?;
    m.add_function(wrap_pyfunction!(num_labels, m)?)?;
    m.add_function(wrap_pyfunction!(pauli_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(pauli_label, m)?)?;
    m.add_function(wrap_pyfunction!(commutation_phase, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_and_errors() {
        assert!((theorem1_bound(1, 1, 2).unwrap() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(corollary1_bound(0.5, 2).unwrap(), 1.0);
        assert!(corollary1_bound(0.0, 2).is_err());
        assert!(PyField::new(6, 1).is_err());
    }

    #[test]
    fn field_wrapper() {
        let f = PyField::new(2, 2).unwrap();
        assert_eq!(f.modulus(), vec![1, 1, 1]);
        assert_eq!(f.mul(vec![0, 1], vec![0, 1]).unwrap(), vec![1, 1]);
        assert_eq!(f.trace(vec![0, 1]).unwrap(), 1);
        assert_eq!(f.dual_basis(), vec![vec![1, 1], vec![1, 0]]);
    }

    #[test]
    fn pauli_helpers() {
        assert_eq!(num_labels(2, 3, 1).unwrap(), 81);
        // X = label 1, Z = label 2 for one qubit
        let x = pauli_matrix(1, 1, 2, 1).unwrap();
        assert_eq!(x[0][1], Complex64::new(1.0, 0.0));
        assert_eq!(commutation_phase(1, 2, 1, 2, 1).unwrap(), 1);
        assert!(pauli_matrix(4, 1, 2, 1).is_err());
    }

    #[test]
    fn code_from_columns() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = vec![vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]];
        let cs = PyCodeSpace::from_columns(1, 0, 2, c, 1, false).unwrap();
        assert_eq!((cs.n(), cs.k(), cs.redundancy()), (1, 0, 1));
        let bad = vec![vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]];
        assert!(PyCodeSpace::from_columns(1, 0, 2, bad.clone(), 1, false).is_err());
        assert!(PyCodeSpace::from_columns(1, 0, 2, bad, 1, true).is_ok());
    }
}

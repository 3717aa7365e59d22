//! Python bindings: scenarios, runs, discrimination, and a few kernel helpers.

use everett_lab::distinguish::{self, Decision, TestResult};
use everett_lab::engine::{self, Theory};
use everett_lab::observer::{ObserverKind, ObserverSpec};
use everett_lab::qlin::{self, CMatrix, DensityMatrix, StateVector};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn from_rows(rows: &[Vec<Complex64>]) -> PyResult<CMatrix> {
    let n = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if n == 0 || rows.iter().any(|r| r.len() != c) {
        return Err(err("expected a non-empty rectangular matrix"));
    }
    Ok(CMatrix::from_fn(n, c, |i, j| rows[i][j]))
}

fn density(rows: &[Vec<Complex64>], factor_dims: Option<Vec<usize>>) -> PyResult<DensityMatrix> {
    let m = from_rows(rows)?;
    let dims = factor_dims.unwrap_or_else(|| vec![m.nrows()]);
    DensityMatrix::new(m, dims).map_err(err)
}

fn parse_theory(s: &str) -> PyResult<Theory> {
    match s {
        "everett" => Ok(Theory::Everett),
        "copenhagen" => Ok(Theory::Copenhagen),
        _ => Err(err(format!("unknown theory {s:?}"))),
    }
}

fn parse_kind(s: &str) -> PyResult<ObserverKind> {
    match s {
        "toy" => Ok(ObserverKind::Toy),
        "recording" => Ok(ObserverKind::Recording),
        "random" => Ok(ObserverKind::Random),
        _ => Err(err(format!("unknown observer kind {s:?}"))),
    }
}

fn test_dict<'py>(py: Python<'py>, t: &TestResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("n_samples", t.n_samples)?;
    d.set_item("perp_hits", t.perp_hits)?;
    d.set_item("p0", t.p0)?;
    d.set_item("p_value", t.p_value_under_copenhagen)?;
    d.set_item("collapse_rejected", t.decision == Decision::CollapseRejected)?;
    d.set_item("alpha", t.alpha)?;
    Ok(d)
}

/// Experiment configuration.
#[pyclass(module = "everett_lab_py", frozen)]
struct Scenario {
    inner: engine::Scenario,
}

#[pymethods]
impl Scenario {
    #[new]
    #[pyo3(signature = (n_qubits, n_streams, observer="toy", dim=None, memory_qubits=None, observer_seed=0, initial_state=None, theory="everett", seed=0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        n_qubits: u32,
        n_streams: usize,
        observer: &str,
        dim: Option<usize>,
        memory_qubits: Option<u32>,
        observer_seed: u64,
        initial_state: Option<Vec<Complex64>>,
        theory: &str,
        seed: u64,
    ) -> PyResult<Self> {
        let kind = parse_kind(observer)?;
        let dim = match (kind, dim, memory_qubits) {
            (_, Some(d), _) => d,
            (ObserverKind::Toy, None, _) => 2,
            (ObserverKind::Recording, None, Some(mem)) => 1usize.checked_shl(mem).ok_or_else(|| err("memory too large"))?,
            _ => return Err(err("observer dimension required")),
        };
        let initial = initial_state
            .map(|a| StateVector::normalized(a.into(), vec![dim]))
            .transpose()
            .map_err(err)?;
        let spec = ObserverSpec::new(kind, dim, memory_qubits, initial, observer_seed).map_err(err)?;
        let inner = engine::Scenario::new(n_qubits, n_streams, spec, parse_theory(theory)?, seed).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (n_streams=4, theory="everett"))]
    fn toy(n_streams: usize, theory: &str) -> PyResult<Self> {
        Ok(Self {
            inner: engine::Scenario::toy(n_streams, parse_theory(theory)?),
        })
    }

    #[getter]
    fn n_qubits(&self) -> u32 {
        self.inner.n_qubits
    }

    #[getter]
    fn n_streams(&self) -> usize {
        self.inner.n_streams
    }

    #[getter]
    fn observer_dim(&self) -> usize {
        self.inner.observer_dim()
    }

    #[getter]
    fn theory(&self) -> String {
        self.inner.theory.to_string()
    }

    #[getter]
    fn bound_is_informative(&self) -> bool {
        self.inner.bound_is_informative()
    }

    fn run(&self) -> PyResult<RunReport> {
        let r = engine::run(&self.inner).map_err(err)?;
        Ok(RunReport { inner: r })
    }

    /// Both theories through the same perp-hit test.
    #[pyo3(signature = (samples=1000, alpha=1e-6, seed=None))]
    fn discriminate<'py>(&self, py: Python<'py>, samples: usize, alpha: f64, seed: Option<u64>) -> PyResult<Bound<'py, PyDict>> {
        let seed = seed.unwrap_or(self.inner.seed);
        let d = distinguish::theory_discrimination(&self.inner, samples, alpha, seed).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("fs_dim", d.fs_dim)?;
        out.set_item("perp_dim", d.perp_dim)?;
        out.set_item("bound_vacuous", d.bound_vacuous)?;
        out.set_item("discriminating", d.discriminating())?;
        out.set_item("warnings", d.warnings.clone())?;
        out.set_item("everett", d.everett.as_ref().map(|t| test_dict(py, t)).transpose()?)?;
        out.set_item("copenhagen", d.copenhagen.as_ref().map(|t| test_dict(py, t)).transpose()?)?;
        Ok(out)
    }

    fn __repr__(&self) -> String {
        format!(
            "Scenario(n_qubits={}, n_streams={}, observer_dim={}, theory={:?})",
            self.inner.n_qubits,
            self.inner.n_streams,
            self.inner.observer_dim(),
            self.inner.theory.to_string()
        )
    }
}

/// Result of one run.
#[pyclass(module = "everett_lab_py", frozen)]
struct RunReport {
    inner: engine::RunReport,
}

#[pymethods]
impl RunReport {
    #[getter]
    fn theory(&self) -> String {
        self.inner.theory.to_string()
    }

    #[getter]
    fn rank_rho_s(&self) -> usize {
        self.inner.rank_rho_s
    }

    #[getter]
    fn fs_dim(&self) -> Option<usize> {
        self.inner.fs_dim
    }

    #[getter]
    fn per_stream_ranks(&self) -> Vec<usize> {
        self.inner.per_stream_ranks.clone()
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.inner.eigenvalues.clone()
    }

    #[getter]
    fn trace_distance_to_mixed(&self) -> f64 {
        self.inner.trace_distance_to_mixed
    }

    #[getter]
    fn rho_s(&self) -> Vec<Vec<Complex64>> {
        to_rows(self.inner.rho_s.matrix())
    }

    #[getter]
    fn collapse_bits(&self) -> Option<Vec<Vec<u8>>> {
        self.inner.collapse_bits.clone()
    }

    /// Probabilities of the eight toy outcomes `A1..A4, B1..B4`.
    fn toy_ab_probabilities(&self) -> PyResult<Vec<f64>> {
        distinguish::MeasurementBasis::toy_ab().probabilities(&self.inner.rho_s).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "RunReport(theory={:?}, rank_rho_s={}, fs_dim={:?})",
            self.inner.theory.to_string(),
            self.inner.rank_rho_s,
            self.inner.fs_dim
        )
    }
}

#[pyfunction]
fn toy_demo() -> PyResult<String> {
    everett_lab::cli::toy_demo_text().map_err(err)
}

#[pyfunction]
fn random_unitary(dim: usize, seed: u64) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(to_rows(qlin::random_unitary(dim, seed).map_err(err)?.matrix()))
}

#[pyfunction]
fn kron(a: Vec<Vec<Complex64>>, b: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
    Ok(to_rows(&qlin::kron_matrix(&from_rows(&a)?, &from_rows(&b)?)))
}

#[pyfunction]
fn partial_trace(rho: Vec<Vec<Complex64>>, factor_dims: Vec<usize>, keep: Vec<usize>) -> PyResult<Vec<Vec<Complex64>>> {
    let r = density(&rho, Some(factor_dims))?.partial_trace(&keep).map_err(err)?;
    Ok(to_rows(r.matrix()))
}

#[pyfunction]
#[pyo3(signature = (rho, tol=qlin::DEFAULT_TOL))]
fn numerical_rank(rho: Vec<Vec<Complex64>>, tol: f64) -> PyResult<usize> {
    Ok(qlin::numerical_rank(&density(&rho, None)?, tol))
}

/// Schmidt coefficients of `psi` split after factor `cut`.
#[pyfunction]
fn schmidt_coefficients(amplitudes: Vec<Complex64>, factor_dims: Vec<usize>, cut: usize) -> PyResult<Vec<f64>> {
    let psi = StateVector::new(amplitudes.into(), factor_dims).map_err(err)?;
    Ok(qlin::schmidt(&psi, cut).map_err(err)?.coefficients)
}

#[pyfunction]
fn binomial_lower_tail(k: usize, n: usize, p: f64) -> f64 {
    distinguish::binomial_lower_tail(k, n, p)
}

#[pymodule]
fn everett_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", everett_lab::TOOL_VERSION)?;
    m.add("DEFAULT_TOL", qlin::DEFAULT_TOL)?;
    m.add_class::<Scenario>()?;
    m.add_class::<RunReport>()?;
    m.add_function(wrap_pyfunction!(toy_demo, m)?)?;
    m.add_function(wrap_pyfunction!(random_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(kron, m)?)?;
    m.add_function(wrap_pyfunction!(partial_trace, m)?)?;
    m.add_function(wrap_pyfunction!(numerical_rank, m)?)?;
    m.add_function(wrap_pyfunction!(schmidt_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(binomial_lower_tail, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use everett_lab::qlin::C64;

    #[test]
    fn rows_round_trip() {
        let m = CMatrix::from_fn(2, 3, |i, j| C64::new(i as f64, j as f64));
        assert_eq!(from_rows(&to_rows(&m)).unwrap(), m);
        assert!(from_rows(&[]).is_err());
        assert!(from_rows(&[vec![C64::new(1.0, 0.0)], vec![]]).is_err());
    }

    #[test]
    fn name_parsing() {
        assert_eq!(parse_theory("copenhagen").unwrap(), Theory::Copenhagen);
        assert_eq!(parse_kind("recording").unwrap(), ObserverKind::Recording);
        assert!(parse_kind("cat").is_err());
    }
}

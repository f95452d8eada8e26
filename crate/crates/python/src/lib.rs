//! Python bindings: characters, mixed sums, Vinogradov counts, energies and
//! verification campaigns.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use charsum_core::characters::{crt_character, enumerate_primitive_characters, DirichletCharacter};
use charsum_core::energy::{self, EnergyMethod};
use charsum_core::error::Error;
use charsum_core::field::build_field;
use charsum_core::harness::{self, exponents, CampaignConfig};
use charsum_core::mean_values::{
    exact_w_squarefree, phi_product_weights, unit_weights, vinogradov_count_mitm, vinogradov_count_naive,
    VinogradovParams, DEFAULT_BUDGET,
};
use charsum_core::mixed::{self, LinearSystem};
use charsum_core::modular::factor_squarefree;
use charsum_core::poly::RealPolynomial;

create_exception!(charsum, CharsumError, PyException);

fn err(e: Error) -> PyErr {
    CharsumError::new_err(e.to_string())
}

fn energy_method(name: &str) -> PyResult<EnergyMethod> {
    match name {
        "naive" => Ok(EnergyMethod::Naive),
        "hashed" => Ok(EnergyMethod::Hashed),
        other => Err(CharsumError::new_err(format!("unknown method {other:?}"))),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// A Dirichlet character modulo a squarefree `q`, given by one index per
/// prime factor (in increasing order of the primes).
#[pyclass(name = "DirichletCharacter", module = "charsum", frozen)]
struct PyCharacter {
    inner: DirichletCharacter,
}

#[pymethods]
impl PyCharacter {
    #[new]
    fn new(q: u64, indices: Vec<u64>) -> PyResult<Self> {
        let m = factor_squarefree(q).map_err(err)?;
        Ok(PyCharacter {
            inner: crt_character(&m, &indices).map_err(err)?,
        })
    }

    #[getter]
    fn q(&self) -> u64 {
        self.inner.q()
    }

    #[getter]
    fn indices(&self) -> Vec<u64> {
        self.inner.indices()
    }

    fn is_primitive(&self) -> bool {
        self.inner.is_primitive()
    }

    fn order(&self) -> u64 {
        self.inner.order()
    }

    fn __call__(&self, n: i64) -> Complex64 {
        self.inner.value(n)
    }

    fn __repr__(&self) -> String {
        format!("DirichletCharacter(q={}, indices={:?})", self.inner.q(), self.inner.indices())
    }
}

/// Distinct prime factors of a squarefree `q`.
#[pyfunction]
fn factor(q: u64) -> PyResult<Vec<u64>> {
    Ok(factor_squarefree(q).map_err(err)?.primes().to_vec())
}

#[pyfunction]
fn primitive_characters(q: u64) -> PyResult<Vec<PyCharacter>> {
    let m = factor_squarefree(q).map_err(err)?;
    Ok(enumerate_primitive_characters(&m)
        .map_err(err)?
        .into_iter()
        .map(|inner| PyCharacter { inner })
        .collect())
}

/// `sum_{m < x <= m + n} chi(x) e(F(x))` with `F(x) = sum_k coeffs[k] x^k`.
#[pyfunction]
fn mixed_sum(chi: &PyCharacter, coeffs: Vec<f64>, m: i64, n: u64) -> PyResult<Complex64> {
    let f = RealPolynomial::univariate(&coeffs).map_err(err)?;
    mixed::mixed_sum(&chi.inner, &f, m, n).map_err(err)
}

/// `J_{r,d}(V)` by meet-in-the-middle (`"mitm"`) or direct comparison (`"naive"`).
#[pyfunction]
#[pyo3(signature = (r, d, v, method = "mitm", budget = None))]
fn vinogradov_count(r: u32, d: u32, v: u64, method: &str, budget: Option<u128>) -> PyResult<u64> {
    let p = VinogradovParams::new(r, d, v)
        .map_err(err)?
        .with_budget(budget.unwrap_or(DEFAULT_BUDGET));
    match method {
        "mitm" => vinogradov_count_mitm(&p),
        "naive" => vinogradov_count_naive(&p),
        other => return Err(CharsumError::new_err(format!("unknown method {other:?}"))),
    }
    .map_err(err)
}

/// Exact double mean value with unit (`"unit"`) or `phi` (`"phi"`) weights.
#[pyfunction]
#[pyo3(signature = (chi, r, d, v, weights = "unit"))]
fn exact_w(chi: &PyCharacter, r: u32, d: u32, v: u64, weights: &str) -> PyResult<f64> {
    let beta = match weights {
        "unit" => unit_weights(v),
        "phi" => phi_product_weights(v, d),
        other => return Err(CharsumError::new_err(format!("unknown weights {other:?}"))),
    };
    let p = VinogradovParams::new(r, d, v).map_err(err)?;
    exact_w_squarefree(&chi.inner, &beta, &p).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (q, m, n, u, method = "hashed", override_hypotheses = false))]
fn cong_energy(q: u64, m: i64, n: u64, u: u64, method: &str, override_hypotheses: bool) -> PyResult<u64> {
    energy::cong_energy(q, m, n, u, energy_method(method)?, override_hypotheses).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (q, n, h, u, method = "hashed", override_hypotheses = false))]
fn ff_box_energy(q: u64, n: usize, h: u64, u: u64, method: &str, override_hypotheses: bool) -> PyResult<u64> {
    let spec = build_field(q, n).map_err(err)?;
    energy::ff_box_energy(&spec, h, u, energy_method(method)?, override_hypotheses).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (q, matrix, h, u, method = "hashed", override_hypotheses = false))]
fn linear_forms_energy(
    q: u64,
    matrix: Vec<Vec<i64>>,
    h: u64,
    u: u64,
    method: &str,
    override_hypotheses: bool,
) -> PyResult<u64> {
    let l = LinearSystem::new(matrix).map_err(err)?;
    energy::linear_forms_energy(q, &l, h, u, energy_method(method)?, override_hypotheses).map_err(err)
}

/// Runs a campaign from its JSON config and returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (config, threads = None))]
fn verify<'py>(py: Python<'py>, config: &str, threads: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = CampaignConfig::from_json(config).map_err(err)?;
    cfg.threads = threads;
    let report = py.detach(|| harness::verify(&cfg)).map_err(err)?;
    json_to_py(py, &report.to_json())
}

#[pyfunction]
#[pyo3(signature = (n, q, d, r, delta = 0.05))]
fn compare_exponents<'py>(
    py: Python<'py>,
    n: f64,
    q: f64,
    d: u32,
    r: u32,
    delta: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let t = exponents::compare_exponents(n, q, d, r, delta).map_err(err)?;
    json_to_py(py, &serde_json::to_string(&t).expect("table serializes"))
}

#[pymodule]
fn charsum(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CharsumError", m.py().get_type::<CharsumError>())?;
    m.add_class::<PyCharacter>()?;
    m.add_function(wrap_pyfunction!(factor, m)?)?;
    m.add_function(wrap_pyfunction!(primitive_characters, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_sum, m)?)?;
    m.add_function(wrap_pyfunction!(vinogradov_count, m)?)?;
    m.add_function(wrap_pyfunction!(exact_w, m)?)?;
    m.add_function(wrap_pyfunction!(cong_energy, m)?)?;
    m.add_function(wrap_pyfunction!(ff_box_energy, m)?)?;
    m.add_function(wrap_pyfunction!(linear_forms_energy, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(compare_exponents, m)?)?;
    Ok(())
}

//! Python module `compound_codes`.
//!
//! Bit vectors cross the boundary as lists of 0/1 integers; summaries and
//! plans come back as plain dicts.

use compound_codes::analysis::{self, LowerCode, DEFAULT_ENDPOINT_BAND, DEFAULT_GRID};
use compound_codes::codec::{self, Constraint, Decoder};
use compound_codes::ensembles::AssembleOptions;
use compound_codes::sideinfo::{self, RatePlan, SideInfoMode};
use compound_codes::{BitVector, Error};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(
    compound_codes,
    EnumerationCapError,
    PyValueError,
    "Exhaustive enumeration would exceed the size cap."
);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::EnumerationCap { .. } => EnumerationCapError::new_err(e.to_string()),
        Error::SamplingFailed(_) => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    Ok(pythonize::pythonize(py, value)?)
}

fn bits(v: &BitVector) -> Vec<u32> {
    v.iter().map(u32::from).collect()
}

fn vector(bits: &[u32]) -> PyResult<BitVector> {
    if let Some(b) = bits.iter().find(|&&b| b > 1) {
        return Err(PyValueError::new_err(format!("bit vectors hold 0 or 1, got {b}")));
    }
    Ok(BitVector::from_bools(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>()))
}

fn lower_code(dv: Option<usize>, dc_prime: Option<usize>) -> PyResult<LowerCode> {
    match (dv, dc_prime) {
        (None, None) => Ok(LowerCode::Uncoded),
        (Some(v), Some(c)) => LowerCode::ldpc(v, c).map_err(py_err),
        _ => Err(PyValueError::new_err("give both dv and dc_prime, or neither")),
    }
}

fn decoder(name: &str, epsilon_n: Option<f64>) -> PyResult<Decoder> {
    match name {
        "ml" => Ok(Decoder::MaximumLikelihood),
        "threshold" => Ok(Decoder::Threshold { epsilon_n }),
        "threshold_ml" => Ok(Decoder::ThresholdThenMl { epsilon_n }),
        other => Err(PyValueError::new_err(format!(
            "unknown decoder {other:?}; expected ml, threshold or threshold_ml"
        ))),
    }
}

/// Sparse matrix over GF(2), built from the column indices of each row.
#[pyclass(name = "BitMatrix", module = "compound_codes", from_py_object)]
#[derive(Clone)]
struct PyBitMatrix(compound_codes::SparseBitMatrix);

#[pymethods]
impl PyBitMatrix {
    #[new]
    fn new(cols: usize, rows: Vec<Vec<usize>>) -> PyResult<Self> {
        compound_codes::SparseBitMatrix::from_rows(cols, rows)
            .map(Self)
            .map_err(py_err)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.rows(), self.0.cols())
    }

    fn rows(&self) -> Vec<Vec<usize>> {
        self.0.row_supports().to_vec()
    }

    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn matvec(&self, v: Vec<u32>) -> PyResult<Vec<u32>> {
        Ok(bits(&self.0.matvec(&vector(&v)?).map_err(py_err)?))
    }

    fn null_space_basis(&self) -> Vec<Vec<u32>> {
        self.0.null_space_basis().iter().map(bits).collect()
    }

    /// A solution of `M y = b` with free variables zero, or None.
    fn solve(&self, b: Vec<u32>) -> PyResult<Option<Vec<u32>>> {
        Ok(self.0.solve_particular(&vector(&b)?).map_err(py_err)?.map(|y| bits(&y)))
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        compound_codes::SparseBitMatrix::from_text(text)
            .map(Self)
            .map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("BitMatrix({}x{}, nnz={})", self.0.rows(), self.0.cols(), self.0.nnz())
    }
}

/// LDGM top code over an LDPC-constrained information word, with the checks
/// split into a base block H1 and a lower block H2.
#[pyclass(name = "CompoundCode", module = "compound_codes", from_py_object)]
#[derive(Clone)]
struct PyCompoundCode(compound_codes::CompoundCode);

#[pymethods]
impl PyCompoundCode {
    /// Samples a code; `k = 0` gives a plain LDGM code.
    #[staticmethod]
    #[pyo3(signature = (n, m, k, d_top, dv, dc_prime, seed, k1=None, k2=None, require_injective=false))]
    #[allow(clippy::too_many_arguments)]
    fn sample(
        n: usize,
        m: usize,
        k: usize,
        d_top: usize,
        dv: usize,
        dc_prime: usize,
        seed: u64,
        k1: Option<usize>,
        k2: Option<usize>,
        require_injective: bool,
    ) -> PyResult<Self> {
        let params = if k == 0 {
            compound_codes::EnsembleParams::ldgm(n, m, d_top, seed)
        } else {
            compound_codes::EnsembleParams::new(n, m, k, d_top, dv, dc_prime, seed)
        }
        .map_err(py_err)?;
        let options = AssembleOptions {
            k1: k1.unwrap_or(k),
            k2,
            require_injective,
        };
        compound_codes::CompoundCode::assemble_seeded(&params, &options)
            .map(Self)
            .map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        compound_codes::CompoundCode::from_json(text).map(Self).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    #[getter]
    fn k1(&self) -> usize {
        self.0.k1()
    }

    #[getter]
    fn k2(&self) -> usize {
        self.0.k2()
    }

    #[getter]
    fn g(&self) -> PyBitMatrix {
        PyBitMatrix(self.0.g().clone())
    }

    #[getter]
    fn h(&self) -> PyBitMatrix {
        PyBitMatrix(self.0.h().clone())
    }

    fn rates<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0.rates())
    }

    fn encode(&self, y: Vec<u32>) -> PyResult<Vec<u32>> {
        Ok(bits(&self.0.encode(&vector(&y)?).map_err(py_err)?))
    }

    /// `H2 y`.
    fn syndrome(&self, y: Vec<u32>) -> PyResult<Vec<u32>> {
        Ok(bits(&self.0.syndrome(&vector(&y)?).map_err(py_err)?))
    }

    fn is_injective_on_h1(&self) -> bool {
        self.0.is_injective_on_h1()
    }

    /// Information words `{y : H1 y = 0, H2 y = syndrome}`; empty when the
    /// syndrome is unreachable.
    fn coset(&self, syndrome: Vec<u32>) -> PyResult<Vec<Vec<u32>>> {
        let book = codec::Codebook::new(&self.0, &Constraint::Coset(vector(&syndrome)?)).map_err(py_err)?;
        Ok(book.iter().map(|(y, _)| bits(&y)).collect())
    }

    /// Nearest codeword of the base code `{H1 y = 0}` to `source`.
    fn quantize<'py>(&self, py: Python<'py>, source: Vec<u32>) -> PyResult<Bound<'py, PyAny>> {
        let r = codec::source_encode_exhaustive(&self.0, &vector(&source)?, &Constraint::Base).map_err(py_err)?;
        to_py(py, &r)
    }

    /// Maximum-likelihood decoding over the base code.
    fn decode_ml<'py>(&self, py: Python<'py>, received: Vec<u32>) -> PyResult<Bound<'py, PyAny>> {
        let r = codec::channel_decode_ml(&self.0, &vector(&received)?, &Constraint::Base).map_err(py_err)?;
        to_py(py, &r)
    }

    /// Counts of base-code codewords by weight.
    fn weight_enumerator(&self) -> PyResult<Vec<u64>> {
        Ok(codec::weight_enumerator_exact(&self.0, &Constraint::Base)
            .map_err(py_err)?
            .counts)
    }

    fn __repr__(&self) -> String {
        format!(
            "CompoundCode(n={}, m={}, k1={}, k2={})",
            self.0.n(),
            self.0.m(),
            self.0.k1(),
            self.0.k2()
        )
    }
}

#[pyfunction]
fn binary_entropy(p: f64) -> PyResult<f64> {
    analysis::binary_entropy(p).map_err(py_err)
}

#[pyfunction]
fn bernoulli_convolve(a: f64, b: f64) -> PyResult<f64> {
    analysis::bernoulli_convolve(a, b).map_err(py_err)
}

/// Overlap exponent F(t; D) in bits.
#[pyfunction]
fn overlap_exponent(t: f64, distortion: f64) -> PyResult<f64> {
    analysis::overlap_exponent_f(t, distortion).map_err(py_err)
}

#[pyfunction]
fn overlap_lambda_star(t: f64, distortion: f64) -> PyResult<(f64, f64)> {
    let s = analysis::overlap_lambda_star(t, distortion).map_err(py_err)?;
    Ok((s.lambda_star, s.value))
}

#[pyfunction]
fn exact_overlap_log_prob(n: usize, w: f64, distortion: f64, d_top: usize) -> PyResult<f64> {
    analysis::exact_overlap_log_prob(n, w, distortion, d_top).map_err(py_err)
}

#[pyfunction]
fn delta(w: f64, d_top: usize) -> PyResult<f64> {
    analysis::delta_fun(w, d_top).map_err(py_err)
}

/// LDPC weight-enumerator bound B(w) in bits.
#[pyfunction]
fn ldpc_enum_bound(w: f64, dv: usize, dc_prime: usize) -> PyResult<f64> {
    analysis::ldpc_enum_bound_b(w, dv, dc_prime).map_err(py_err)
}

/// Largest rate ratio over w, as `(argmax, value)`. Omit dv/dc_prime for an
/// uncoded lower code.
#[pyfunction]
#[pyo3(signature = (distortion, d_top, dv=None, dc_prime=None, grid=DEFAULT_GRID, band=DEFAULT_ENDPOINT_BAND))]
fn rd_min_rate(
    distortion: f64,
    d_top: usize,
    dv: Option<usize>,
    dc_prime: Option<usize>,
    grid: usize,
    band: f64,
) -> PyResult<(f64, f64)> {
    let e = analysis::rd_min_rate(distortion, d_top, lower_code(dv, dc_prime)?, grid, band).map_err(py_err)?;
    Ok((e.w, e.value))
}

#[pyfunction]
#[pyo3(signature = (p, d_top, dv=None, dc_prime=None, r_g=1.0, grid=DEFAULT_GRID))]
fn channel_condition<'py>(
    py: Python<'py>,
    p: f64,
    d_top: usize,
    dv: Option<usize>,
    dc_prime: Option<usize>,
    r_g: f64,
    grid: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let c = analysis::channel_condition_holds(p, d_top, lower_code(dv, dc_prime)?, r_g, grid).map_err(py_err)?;
    to_py(py, &c)
}

/// Sampled curve as `(w, values)`; `kind` is `rd`, `overlap` or `enum`.
#[pyfunction]
#[pyo3(signature = (kind, distortion=0.11, d_top=4, dv=3, dc_prime=6, grid=DEFAULT_GRID))]
fn curve(
    kind: &str,
    distortion: f64,
    d_top: usize,
    dv: usize,
    dc_prime: usize,
    grid: usize,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let c = match kind {
        "rd" => analysis::rd_ratio_curve(
            distortion,
            d_top,
            lower_code(Some(dv), Some(dc_prime))?,
            grid,
            DEFAULT_ENDPOINT_BAND,
        ),
        "rd_uncoded" => analysis::rd_ratio_curve(distortion, d_top, LowerCode::Uncoded, grid, DEFAULT_ENDPOINT_BAND),
        "overlap" => analysis::overlap_curve(distortion, d_top, grid),
        "enum" => analysis::enum_curve(dv, dc_prime, grid),
        other => return Err(PyValueError::new_err(format!("unknown curve {other:?}"))),
    }
    .map_err(py_err)?;
    Ok((c.w, c.values))
}

#[pyfunction]
fn derivative_checks<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &analysis::derivative_checks().checks)
}

#[pyfunction]
#[pyo3(signature = (distortion, p, epsilon, n, m=None))]
fn plan_scsi<'py>(
    py: Python<'py>,
    distortion: f64,
    p: f64,
    epsilon: f64,
    n: usize,
    m: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let plan = sideinfo::plan_rates_scsi_with_m(distortion, p, epsilon, n, m.unwrap_or(n)).map_err(py_err)?;
    to_py(py, &plan)
}

#[pyfunction]
#[pyo3(signature = (budget, p, epsilon, n, m=None))]
fn plan_ccsi<'py>(
    py: Python<'py>,
    budget: f64,
    p: f64,
    epsilon: f64,
    n: usize,
    m: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let plan = sideinfo::plan_rates_ccsi_with_m(budget, p, epsilon, n, m.unwrap_or(n)).map_err(py_err)?;
    to_py(py, &plan)
}

#[pyfunction]
fn simulate_rd<'py>(py: Python<'py>, code: &PyCompoundCode, trials: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let s = py
        .detach(|| codec::run_rd_batch(&code.0, trials, seed))
        .map_err(py_err)?;
    to_py(py, &s)
}

#[pyfunction]
#[pyo3(signature = (code, p, trials, seed, epsilon_n=None))]
fn simulate_channel<'py>(
    py: Python<'py>,
    code: &PyCompoundCode,
    p: f64,
    trials: usize,
    seed: u64,
    epsilon_n: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let s = py
        .detach(|| codec::run_channel_batch(&code.0, p, epsilon_n, trials, seed))
        .map_err(py_err)?;
    to_py(py, &s)
}

/// Side-information batch; `mode` is `scsi` (target = distortion) or `ccsi`
/// (target = weight budget).
#[pyfunction]
#[pyo3(signature = (code, mode, target, p, epsilon, trials, seed, decoder="threshold_ml", epsilon_n=None, keep_traces=false))]
#[allow(clippy::too_many_arguments)]
fn simulate_side_info<'py>(
    py: Python<'py>,
    code: &PyCompoundCode,
    mode: &str,
    target: f64,
    p: f64,
    epsilon: f64,
    trials: usize,
    seed: u64,
    decoder: &str,
    epsilon_n: Option<f64>,
    keep_traces: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let mode = match mode {
        "scsi" => SideInfoMode::Scsi,
        "ccsi" => SideInfoMode::Ccsi,
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    };
    let rule = self::decoder(decoder, epsilon_n)?;
    let plan = RatePlan::for_code(mode, &code.0, target, p, epsilon).map_err(py_err)?;
    let batch = py
        .detach(|| match mode {
            SideInfoMode::Scsi => sideinfo::run_scsi_batch(&code.0, &plan, &rule, trials, seed, keep_traces),
            SideInfoMode::Ccsi => sideinfo::run_ccsi_batch(&code.0, &plan, &rule, trials, seed, keep_traces),
        })
        .map_err(py_err)?;
    to_py(py, &serde_json::json!({ "plan": plan, "batch": batch }))
}

#[pyfunction]
#[pyo3(signature = (n, m, k, d_top, dv, dc_prime, distortion, trials, seed, batch_size=1000))]
#[allow(clippy::too_many_arguments)]
fn moment_experiment<'py>(
    py: Python<'py>,
    n: usize,
    m: usize,
    k: usize,
    d_top: usize,
    dv: usize,
    dc_prime: usize,
    distortion: f64,
    trials: usize,
    seed: u64,
    batch_size: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let params = compound_codes::EnsembleParams::new(n, m, k, d_top, dv, dc_prime, seed).map_err(py_err)?;
    let est = py
        .detach(|| codec::moment_experiment(&params, distortion, trials, batch_size))
        .map_err(py_err)?;
    to_py(py, &est)
}

#[pymodule(name = "compound_codes")]
fn init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("EnumerationCapError", m.py().get_type::<EnumerationCapError>())?;
    m.add_class::<PyBitMatrix>()?;
    m.add_class::<PyCompoundCode>()?;
    m.add_function(wrap_pyfunction!(binary_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(bernoulli_convolve, m)?)?;
    m.add_function(wrap_pyfunction!(overlap_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(overlap_lambda_star, m)?)?;
    m.add_function(wrap_pyfunction!(exact_overlap_log_prob, m)?)?;
    m.add_function(wrap_pyfunction!(delta, m)?)?;
    m.add_function(wrap_pyfunction!(ldpc_enum_bound, m)?)?;
    m.add_function(wrap_pyfunction!(rd_min_rate, m)?)?;
    m.add_function(wrap_pyfunction!(channel_condition, m)?)?;
    m.add_function(wrap_pyfunction!(curve, m)?)?;
    m.add_function(wrap_pyfunction!(derivative_checks, m)?)?;
    m.add_function(wrap_pyfunction!(plan_scsi, m)?)?;
    m.add_function(wrap_pyfunction!(plan_ccsi, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_rd, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_channel, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_side_info, m)?)?;
    m.add_function(wrap_pyfunction!(moment_experiment, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

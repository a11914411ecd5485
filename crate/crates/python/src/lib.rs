//! Python bindings for `andor`.

use std::collections::BTreeMap;

use andor::analytic::{self, catalog, Env, Precision, RatioValue};
use andor::formula::{parse_formula, truth_table, AndOrTree, TruthTable};
use andor::{complexity, counting, exact_dist, sampler, verify, Error};
use num_bigint::{BigInt, BigUint};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn err(e: Error) -> PyErr {
    match andor::cli::exit_code(&e) {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_to_py(py: Python<'_>, v: &Value) -> PyResult<PyObject> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_py(py),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_py(py),
            (None, Some(u)) => u.into_py(py),
            _ => n.as_f64().unwrap_or(f64::NAN).into_py(py),
        },
        Value::String(s) => s.into_py(py),
        Value::Array(xs) => PyList::new_bound(py, xs.iter().map(|x| json_to_py(py, x)).collect::<PyResult<Vec<_>>>()?).into_py(py),
        Value::Object(m) => {
            let d = PyDict::new_bound(py);
            for (k, x) in m {
                d.set_item(k, json_to_py(py, x)?)?;
            }
            d.into_py(py)
        }
    })
}

fn to_py<T: serde::Serialize>(py: Python<'_>, v: &T) -> PyResult<PyObject> {
    json_to_py(py, &serde_json::to_value(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?)
}

fn table(n: u32, hex: &str) -> PyResult<TruthTable> {
    TruthTable::from_hex(n, hex).map_err(err)
}

fn fraction(r: &num_rational::BigRational) -> (BigInt, BigInt) {
    (r.numer().clone(), r.denom().clone())
}

/// A stratified and/or tree with literal leaves.
#[pyclass(name = "Tree", module = "andor")]
#[derive(Clone)]
struct PyTree {
    inner: AndOrTree,
}

#[pymethods]
impl PyTree {
    #[staticmethod]
    fn parse(text: &str, n: u32) -> PyResult<Self> {
        Ok(PyTree { inner: parse_formula(text, n).map_err(err)? })
    }

    fn size(&self) -> usize {
        self.inner.size()
    }

    fn first_level_leaf_count(&self) -> usize {
        self.inner.first_level_leaf_count()
    }

    fn truth_table(&self, n: u32) -> PyResult<String> {
        self.inner.validate(n).map_err(err)?;
        Ok(truth_table(&self.inner, n).to_hex())
    }

    fn is_simple_tautology(&self) -> bool {
        self.inner.is_simple_tautology()
    }

    fn dual(&self) -> Self {
        PyTree { inner: self.inner.dual() }
    }

    /// Returns the irreducible tree and the removed subtrees in removal order.
    fn reduce(&self) -> (Self, Vec<Self>) {
        let r = complexity::reduce_irreducible(&self.inner);
        (PyTree { inner: r.tree }, r.trace.into_iter().map(|inner| PyTree { inner }).collect())
    }

    fn __str__(&self) -> String {
        self.inner.serialize()
    }

    fn __repr__(&self) -> String {
        format!("Tree({:?})", self.inner.serialize())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

/// `(a_hat, a_total)` for sizes `0..=max_size`.
#[pyfunction]
fn count_series(n: u32, max_size: usize) -> PyResult<(Vec<BigUint>, Vec<BigUint>)> {
    let s = counting::series(n, max_size).map_err(err)?;
    Ok((s.a_hat, s.a_total))
}

/// Exact probability that a uniform size-`m` tree computes `f`, as `(numerator, denominator)`.
#[pyfunction]
fn probability(m: usize, n: u32, f: &str) -> PyResult<(BigInt, BigInt)> {
    Ok(fraction(&exact_dist::prob(m, n, table(n, f)?).map_err(err)?))
}

/// `{hex: (numerator, denominator)}` over every function with a tree of size `m`.
#[pyfunction]
fn distribution(m: usize, n: u32) -> PyResult<BTreeMap<String, (BigInt, BigInt)>> {
    let d = exact_dist::FunctionCounts::new(n, m).and_then(|c| c.distribution(m)).map_err(err)?;
    Ok(d.probs.iter().map(|(f, p)| (f.to_hex(), fraction(p))).collect())
}

#[pyfunction]
#[pyo3(signature = (n, f, m_max = 60, tol = exact_dist::DEFAULT_TOLERANCE))]
fn limit_estimate(py: Python<'_>, n: u32, f: &str, m_max: usize, tol: f64) -> PyResult<PyObject> {
    to_py(py, &exact_dist::limit_estimate(n, table(n, f)?, m_max, tol).map_err(err)?)
}

/// Exact `rho`, `A(rho)` and `B(rho)` as strings `p+q*sqrt(2n)`, with float values.
#[pyfunction]
fn singularity(py: Python<'_>, n: u32) -> PyResult<PyObject> {
    let s = analytic::singularity(n);
    let d = PyDict::new_bound(py);
    for (k, v) in [("rho", &s.rho), ("a_rho", &s.a_rho), ("b_rho", &s.b_rho)] {
        d.set_item(k, (v.to_string(), v.to_f64()))?;
    }
    Ok(d.into_py(py))
}

/// Limiting ratio of a catalog family: `(exact string or None, float)`.
#[pyfunction]
#[pyo3(signature = (family, n, params = BTreeMap::new(), t_value = None, tau_prime = None, precision_bits = None))]
fn limiting_ratio(
    family: &str,
    n: u32,
    params: BTreeMap<String, i64>,
    t_value: Option<f64>,
    tau_prime: Option<f64>,
    precision_bits: Option<usize>,
) -> PyResult<(Option<String>, f64)> {
    let f = catalog::by_name(family, &params).map_err(err)?;
    let precision = precision_bits.map_or(Precision::Auto, Precision::Float);
    let v = analytic::limiting_ratio_with(&f, n, &Env { t_value, tau_prime }, precision).map_err(err)?;
    let exact = match &v {
        RatioValue::Exact(q) => Some(q.to_string()),
        RatioValue::Float(_) => None,
    };
    Ok((exact, v.to_f64()))
}

#[pyfunction]
fn tautology_bounds(py: Python<'_>, n: u32) -> PyResult<PyObject> {
    to_py(py, &analytic::tautology_bounds(n).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (m, n, seed, trial = 0))]
fn sample(m: usize, n: u32, seed: u64, trial: u64) -> PyResult<PyTree> {
    let ctx = sampler::SamplerContext::new(n, m).map_err(err)?;
    Ok(PyTree { inner: ctx.sample_trial(m, seed, trial).map_err(err)? })
}

#[pyfunction]
#[pyo3(signature = (m, n, trials, seed, stats = vec!["tautology_rate".to_string()]))]
fn monte_carlo(py: Python<'_>, m: usize, n: u32, trials: u64, seed: u64, stats: Vec<String>) -> PyResult<PyObject> {
    let stats = stats.iter().map(|s| sampler::Stat::parse(s, n)).collect::<Result<Vec<_>, _>>().map_err(err)?;
    let report = py.allow_threads(|| sampler::monte_carlo(m, n, trials, seed, &stats)).map_err(err)?;
    to_py(py, &report)
}

/// `(L, m_f)`; `m_f` is `None` for constants and literals.
#[pyfunction]
#[pyo3(signature = (f, n, budget = complexity::DEFAULT_BUDGET))]
fn tree_complexity(f: &str, n: u32, budget: usize) -> PyResult<(usize, Option<BigUint>)> {
    let rec = complexity::complexity(table(n, f)?, n, budget).map_err(err)?;
    Ok((rec.l, rec.m_f))
}

/// Runs one numbered reproduction check.
#[pyfunction]
fn check(py: Python<'_>, criterion: u8) -> PyResult<PyObject> {
    let r = py.allow_threads(|| verify::run_criterion(criterion));
    to_py(py, &r)
}

#[pymodule]
#[pyo3(name = "andor")]
fn andor_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTree>()?;
    m.add_function(wrap_pyfunction!(count_series, m)?)?;
    m.add_function(wrap_pyfunction!(probability, m)?)?;
    m.add_function(wrap_pyfunction!(distribution, m)?)?;
    m.add_function(wrap_pyfunction!(limit_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(singularity, m)?)?;
    m.add_function(wrap_pyfunction!(limiting_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(tautology_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(tree_complexity, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    Ok(())
}

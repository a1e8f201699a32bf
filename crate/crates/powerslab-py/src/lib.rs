//! Python bindings for the powerslab toolkit: the rigorous constants,
//! the power-sum estimates, the admissibility criterion, the residue-class
//! density bound, and the finite-range experiments.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use powerslab::{empirical, factor, linnik, primes, romanov, sigma, spectra};

fn to_py_err(e: powerslab::Error) -> PyErr {
    match e {
        powerslab::Error::InvalidArgument(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// A closed interval `[lo, hi]` guaranteed to contain the exact value.
#[pyclass(frozen, skip_from_py_object, name = "Interval")]
#[derive(Clone, Copy)]
struct PyInterval {
    inner: powerslab::Interval,
}

#[pymethods]
impl PyInterval {
    #[getter]
    fn lo(&self) -> f64 {
        self.inner.lo()
    }

    #[getter]
    fn hi(&self) -> f64 {
        self.inner.hi()
    }

    #[getter]
    fn width(&self) -> f64 {
        self.inner.width()
    }

    #[getter]
    fn midpoint(&self) -> f64 {
        self.inner.midpoint()
    }

    fn contains(&self, x: f64) -> bool {
        self.inner.contains(x)
    }

    fn __repr__(&self) -> String {
        format!("Interval({:?}, {:?})", self.inner.lo(), self.inner.hi())
    }
}

impl From<powerslab::Interval> for PyInterval {
    fn from(inner: powerslab::Interval) -> Self {
        PyInterval { inner }
    }
}

/// Enclosure of the twin-prime constant from the Euler product over odd
/// primes below `prime_limit`, with a rigorous tail bound.
#[pyfunction]
#[pyo3(signature = (prime_limit = 1_000_000))]
fn compute_c0(prime_limit: u64) -> PyResult<PyInterval> {
    Ok(sigma::compute_c0(prime_limit).map_err(to_py_err)?.into())
}

/// Prime factorization of `n` as a list of `(prime, exponent)` pairs.
#[pyfunction]
fn factorize(n: u64) -> PyResult<Vec<(u64, u32)>> {
    Ok(factor::factorize(n).map_err(to_py_err)?.factors)
}

/// Number of primes up to and including `n`.
#[pyfunction]
fn prime_pi(n: u64) -> PyResult<u64> {
    let sieve = primes::sieve_primes(n.max(2)).map_err(to_py_err)?;
    Ok(sieve.prime_pi(n))
}

/// Singular-series value `sigma(m) = 2·C0·prod_{p | m, p odd} (p−1)/(p−2)`.
#[pyfunction]
#[pyo3(signature = (m, prime_limit = 1_000_000))]
fn sigma_singular(m: i128, prime_limit: u64) -> PyResult<PyInterval> {
    let c0 = sigma::compute_c0(prime_limit).map_err(to_py_err)?;
    Ok(sigma::sigma_singular(m, c0).map_err(to_py_err)?.into())
}

/// Truncation estimate of the power-sum constant `A(k)` at level `L`:
/// returns `(S, A, paper_bracket)` as interval enclosures.
#[pyfunction]
#[pyo3(signature = (k, l, prime_limit = 1_000_000))]
fn estimate_ak(k: u32, l: u32, prime_limit: u64) -> PyResult<(PyInterval, PyInterval, PyInterval)> {
    let c0 = sigma::compute_c0(prime_limit).map_err(to_py_err)?;
    let est = spectra::estimate_ak(k, l, c0, None).map_err(to_py_err)?;
    let bracket = est
        .paper_bracket
        .ok_or_else(|| PyRuntimeError::new_err("missing reference bracket"))?;
    Ok((est.s_value.into(), est.estimate.into(), bracket.into()))
}

/// Left-hand side of the two-primes-plus-K-powers criterion; satisfied
/// when the value is strictly below 1.
#[pyfunction]
#[pyo3(signature = (k_total, c1, grh, prime_limit = 1_000_000))]
fn criterion_lhs(k_total: u32, c1: f64, grh: bool, prime_limit: u64) -> PyResult<(f64, bool)> {
    let c0 = sigma::compute_c0(prime_limit).map_err(to_py_err)?;
    let constants = linnik::LinnikConstants::reference(c0);
    let r = linnik::criterion_lhs(k_total, c1, grh, &constants).map_err(to_py_err)?;
    Ok((r.lhs, r.satisfied))
}

/// Largest admissible sieve constant for `K` powers of two (bisection).
#[pyfunction]
#[pyo3(signature = (k_total, grh, tol = 1e-6, prime_limit = 1_000_000))]
fn max_c1(k_total: u32, grh: bool, tol: f64, prime_limit: u64) -> PyResult<f64> {
    let c0 = sigma::compute_c0(prime_limit).map_err(to_py_err)?;
    let constants = linnik::LinnikConstants::reference(c0);
    linnik::max_c1(k_total, grh, &constants, tol).map_err(to_py_err)
}

/// Pintz positive-proportion factor `f(D)`.
#[pyfunction]
fn pintz_density_factor(d: f64) -> PyResult<f64> {
    romanov::pintz_density_factor(d).map_err(to_py_err)
}

/// Residue-class density lower bound. With the default `m = 24` the
/// published second-moment table is used; other `m` require `s_table`
/// (a `{divisor: value}` dict) and `c3`.
#[pyfunction]
#[pyo3(signature = (c1, m = 24, s_table = None, c3 = None, prime_limit = 1_000_000))]
fn density_lower_bound(
    c1: f64,
    m: u32,
    s_table: Option<BTreeMap<u32, f64>>,
    c3: Option<f64>,
    prime_limit: u64,
) -> PyResult<(f64, u64, u64)> {
    let c0 = sigma::compute_c0(prime_limit).map_err(to_py_err)?;
    let config = match (s_table, c3) {
        (None, None) if m == 24 => romanov::RomanovConfig::default_m24(c1, c0, None),
        (Some(table), Some(c3)) => romanov::RomanovConfig::custom(m, c1, c3, table, c0, None),
        _ => {
            return Err(PyValueError::new_err(
                "for m != 24 supply both s_table and c3",
            ));
        }
    }
    .map_err(to_py_err)?;
    let r = romanov::density_lower_bound(&config, None).map_err(to_py_err)?;
    Ok((r.d_lower, r.class_count_nonzero, r.phi_ell))
}

/// Number of representations `n = p + 2^{a_1} + … + 2^{a_k}` with the
/// exponent multiset unordered.
#[pyfunction]
#[pyo3(signature = (n, k_powers = 1))]
fn rep_count(n: u64, k_powers: u32) -> PyResult<u64> {
    let sieve = primes::sieve_primes(n.max(2)).map_err(to_py_err)?;
    empirical::rep_count(n, k_powers, &sieve).map_err(to_py_err)
}

/// Observed density of representable integers at each checkpoint.
#[pyfunction]
#[pyo3(signature = (limit, checkpoints, k_powers = 1))]
fn density_profile(limit: u64, checkpoints: Vec<u64>, k_powers: u32) -> PyResult<Vec<(u64, f64)>> {
    let sieve = primes::sieve_primes(limit.max(4)).map_err(to_py_err)?;
    empirical::density_profile(limit, k_powers, &checkpoints, &sieve).map_err(to_py_err)
}

/// Number of ordered pairs of odd primes summing to the even `n`.
#[pyfunction]
fn goldbach_g(n: u64) -> PyResult<u64> {
    let sieve = primes::sieve_primes(n.max(4)).map_err(to_py_err)?;
    empirical::goldbach_g(n, &sieve).map_err(to_py_err)
}

/// Number of primes `p <= n` with `p ≡ residue (mod modulus)` and `p + h`
/// also prime.
#[pyfunction]
#[pyo3(signature = (n, h, modulus = 1, residue = 0))]
fn gap_count(n: u64, h: u64, modulus: u64, residue: u64) -> PyResult<u64> {
    let sieve = primes::sieve_primes((n + h).max(4)).map_err(to_py_err)?;
    empirical::gap_count(n, h, modulus, residue, &sieve).map_err(to_py_err)
}

/// Witness `(p1, p2, a1, a2)` with `p1 + p2 + 2^a1 + 2^a2 = n`.
#[pyfunction]
fn verify_k2_decomposition(n: u64) -> PyResult<(u64, u64, u32, u32)> {
    let sieve = primes::sieve_primes(n.max(4)).map_err(to_py_err)?;
    let flags = empirical::representable_flags(n, 1, &sieve).map_err(to_py_err)?;
    empirical::verify_k2_decomposition(n, &flags, &sieve).map_err(to_py_err)
}

#[pymodule]
fn powerslab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInterval>()?;
    m.add_function(wrap_pyfunction!(compute_c0, m)?)?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(prime_pi, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_singular, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_ak, m)?)?;
    m.add_function(wrap_pyfunction!(criterion_lhs, m)?)?;
    m.add_function(wrap_pyfunction!(max_c1, m)?)?;
    m.add_function(wrap_pyfunction!(pintz_density_factor, m)?)?;
    m.add_function(wrap_pyfunction!(density_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(rep_count, m)?)?;
    m.add_function(wrap_pyfunction!(density_profile, m)?)?;
    m.add_function(wrap_pyfunction!(goldbach_g, m)?)?;
    m.add_function(wrap_pyfunction!(gap_count, m)?)?;
    m.add_function(wrap_pyfunction!(verify_k2_decomposition, m)?)?;
    Ok(())
}

//! Python bindings: analysis, partitions as JSON, verification and the
//! decoupling estimator.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use mhdec::cli::verify_partition;
use mhdec::estimator::{budget_from_env, decoupling_ratio, Grid};
use mhdec::partition::{decompose, partition_from_json, partition_to_json, EngineConfig};
use mhdec::polyalg::{detect_mixed_homogeneity, hessian_determinant, parse_poly, BivariatePoly};

fn poly(text: &str) -> PyResult<BivariatePoly> {
    parse_poly(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn config(c_flat: f64, c_phi: Option<f64>, seed: u64) -> EngineConfig {
    EngineConfig { c_flat, c_phi, seed, ..EngineConfig::default() }
}

/// Weights (q, r, s), or None when the polynomial is not mixed-homogeneous.
#[pyfunction]
fn weights(text: &str) -> PyResult<Option<(u32, u32, u32)>> {
    Ok(detect_mixed_homogeneity(&poly(text)?).map(|m| (m.q, m.r, m.s)))
}

#[pyfunction]
fn hessian(text: &str) -> PyResult<String> {
    Ok(hessian_determinant(&poly(text)?).to_string())
}

/// Partition JSON, without a manifest.
#[pyfunction]
#[pyo3(signature = (text, delta, c_flat=64.0, c_phi=None, seed=0))]
fn partition(py: Python<'_>, text: &str, delta: f64, c_flat: f64, c_phi: Option<f64>, seed: u64) -> PyResult<String> {
    let phi = poly(text)?;
    let cfg = config(c_flat, c_phi, seed);
    let p = py.allow_threads(|| decompose(&phi, delta, &cfg)).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(partition_to_json(&p, None))
}

/// (passed, covered fraction, max multiplicity, worst flatness ratio).
#[pyfunction]
#[pyo3(signature = (json, samples=100_000, grid=5, c_flat=64.0, seed=0))]
fn verify(py: Python<'_>, json: &str, samples: usize, grid: usize, c_flat: f64, seed: u64) -> PyResult<(bool, f64, usize, f64)> {
    let jp = partition_from_json(json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let r = py
        .allow_threads(|| verify_partition(&jp, samples, grid.max(3), c_flat, seed))
        .map_err(|e| PyRuntimeError::new_err(e.message))?;
    Ok((r.pass, r.covered_fraction, r.max_multiplicity, r.worst_ratio))
}

/// (D4 mean, D2 mean, piece count) at one scale.
#[pyfunction]
#[pyo3(signature = (text, delta, trials=8, grid=64, box_t=8.0, density=4, seed=0))]
fn estimate(
    py: Python<'_>,
    text: &str,
    delta: f64,
    trials: usize,
    grid: usize,
    box_t: f64,
    density: usize,
    seed: u64,
) -> PyResult<(f64, f64, usize)> {
    let phi = poly(text)?;
    let cfg = config(64.0, None, seed);
    let r = py
        .allow_threads(|| {
            let p = decompose(&phi, delta, &cfg).map_err(|e| e.to_string())?;
            decoupling_ratio(&phi, &p.shapes(), delta, trials, Grid { n: grid, t: box_t }, density, seed, budget_from_env())
                .map_err(|e| e.to_string())
        })
        .map_err(PyRuntimeError::new_err)?;
    Ok((r.d4_mean, r.d2_mean, r.pieces))
}

#[pymodule]
fn pymhdec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(weights, m)?)?;
    m.add_function(wrap_pyfunction!(hessian, m)?)?;
    m.add_function(wrap_pyfunction!(partition, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

//! Python module `mfel`.

use mfel_core::elliptic_genus as eg;
use mfel_core::fan_io;
use mfel_core::multifan::ToricModel;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: mfel_core::error::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn model(fan_json: &str) -> PyResult<(fan_io::FanFile, ToricModel)> {
    let f = fan_io::parse(fan_json).map_err(err)?;
    let fan = f.multifan().map_err(err)?;
    fan.check(&f.edges()).map_err(err)?;
    let m = ToricModel::new(fan, f.edges()).map_err(err)?;
    Ok((f, m))
}

/// Value and error bound of the genus at (w, tau, sigma).
#[pyfunction]
#[pyo3(signature = (fan_json, w, tau, sigma, divisor=None, terms=40))]
fn genus_numeric(
    fan_json: &str,
    w: Vec<Complex64>,
    tau: Complex64,
    sigma: Complex64,
    divisor: Option<&str>,
    terms: usize,
) -> PyResult<(Complex64, f64)> {
    let (f, m) = model(fan_json)?;
    let d = mfel_cli::resolve_divisor(divisor, &f, Some(&m)).map_err(err)?;
    if w.len() != m.rank() {
        return Err(PyValueError::new_err(format!("w needs {} coordinates", m.rank())));
    }
    let b = eg::genus_numeric(&m, &d, &w, tau, sigma, terms).map_err(err)?;
    Ok((b.value, b.bound))
}

/// Character expansion to q-order `qexp`, one `u=(..) q^{e}: coeff` line per term.
#[pyfunction]
#[pyo3(signature = (fan_json, qexp, window=3, divisor=None))]
fn genus_series(fan_json: &str, qexp: i64, window: i64, divisor: Option<&str>) -> PyResult<String> {
    let (f, m) = model(fan_json)?;
    let d = mfel_cli::resolve_divisor(divisor, &f, Some(&m)).map_err(err)?;
    if qexp < 0 || window < 1 {
        return Err(PyValueError::new_err("qexp must be >= 0 and window >= 1"));
    }
    let s = eg::genus_char_formula_auto(&m, &d, window, qexp, 64 * window).map_err(err)?;
    Ok(s.dump())
}

/// Runs `mfel` with the given arguments; returns (exit code, stdout, stderr).
#[pyfunction]
fn run(args: Vec<String>) -> (i32, String, String) {
    let argv = std::iter::once("mfel".to_string()).chain(args);
    let o = mfel_cli::run(argv);
    (o.code, o.stdout, o.stderr)
}

#[pymodule]
fn mfel(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(genus_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(genus_series, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}

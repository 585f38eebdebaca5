//! Python bindings: the command runner, the acceptance criteria and a few
//! exact helpers. Reports cross the boundary as JSON text.

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use rothcheck::arakelov::DEFAULT_MAX_PLUCKER;
use rothcheck::cli::suite::CRITERIA;
use rothcheck::cli::{execute, generate_convergents, Command, RunConfig};
use rothcheck::combinatorics::{mu, DEFAULT_LATTICE_LIMIT};
use rothcheck::exactnum::rational::{format_rational, parse_rational};

create_exception!(rothcheck_py, RothcheckError, PyException);

fn err(e: rothcheck::Error) -> PyErr {
    RothcheckError::new_err(e.to_string())
}

fn json(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).expect("reports serialize")
}

/// Runs a command on TOML input text. Returns the report as JSON and the
/// exit status the command line tool would use (0 all true, 1 otherwise).
#[pyfunction]
#[pyo3(signature = (command, input=None, precision=128, seed=0))]
fn run(command: &str, input: Option<String>, precision: u32, seed: u64) -> PyResult<(String, i32)> {
    if precision < 32 {
        return Err(PyValueError::new_err(format!("precision {precision} is below 32 bits")));
    }
    let c = Command::from_name(command).map_err(err)?;
    let cfg = RunConfig {
        command: c.name().into(),
        input: None,
        input_text: input,
        output: None,
        precision,
        seed,
        max_lattice: DEFAULT_LATTICE_LIMIT,
        max_plucker: DEFAULT_MAX_PLUCKER,
    };
    let out = execute(c, &cfg).map_err(err)?;
    Ok((json(&out.report), out.exit_code()))
}

/// (id, name) of every acceptance criterion.
#[pyfunction]
fn criteria() -> Vec<(u8, &'static str)> {
    CRITERIA.iter().map(|c| (c.id, c.name)).collect()
}

/// Runs one acceptance criterion and returns its report as JSON.
#[pyfunction]
#[pyo3(signature = (id, seed=7, precision=128))]
fn run_criterion(id: u8, seed: u64, precision: u32) -> PyResult<String> {
    let c = CRITERIA
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| PyValueError::new_err(format!("no criterion {id}")))?;
    Ok(json(&(c.run)(seed, precision)))
}

/// μₙ(t) as an exact rational string.
#[pyfunction]
fn instability_mu(n: usize, t: &str) -> PyResult<String> {
    let t = parse_rational(t).map_err(err)?;
    Ok(format_rational(&mu(n, &t).map_err(err)?))
}

/// First `count` convergents (p, q) of the larger root of a quadratic given
/// constant term first.
#[pyfunction]
fn convergents(minpoly: Vec<BigInt>, count: usize) -> PyResult<Vec<(BigInt, BigInt)>> {
    Ok(generate_convergents(&minpoly, count).map_err(err)?.convergents)
}

#[pymodule]
fn rothcheck_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("RothcheckError", m.py().get_type::<RothcheckError>())?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(criteria, m)?)?;
    m.add_function(wrap_pyfunction!(run_criterion, m)?)?;
    m.add_function(wrap_pyfunction!(instability_mu, m)?)?;
    m.add_function(wrap_pyfunction!(convergents, m)?)?;
    Ok(())
}

//! Python bindings. Maps are opaque objects built from expression strings;
//! every computation returns the same JSON document the command line prints.

#![allow(clippy::useless_conversion)]

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use dynaport::cli::{self, EXIT_OK, EXIT_PARTIAL, EXIT_USAGE};
use dynaport::dynamics::{ProjPoint, RationalMap};
use dynaport::expr::{parse_map, parse_point};
use dynaport::{Rat, RatFunc};

fn value_error(e: dynaport::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[derive(Clone)]
enum Inner {
    Nf(RationalMap<Rat>),
    Ff(RationalMap<RatFunc>),
}

/// A rational map on P^1 over Q (`base="nf"`) or Q(t) (`base="ff"`).
#[pyclass(module = "dynaport_py", frozen)]
#[derive(Clone)]
struct Map {
    inner: Inner,
}

impl Map {
    fn base(&self) -> &'static str {
        match self.inner {
            Inner::Nf(_) => "nf",
            Inner::Ff(_) => "ff",
        }
    }
}

fn orbit_of<K: dynaport::expr::Parse>(map: &RationalMap<K>, point: &str, k: usize) -> PyResult<Vec<String>> {
    let p: ProjPoint<K> = parse_point(point).map_err(value_error)?;
    Ok(map.orbit(&p, k).iter().map(|q| q.to_string()).collect())
}

#[pymethods]
impl Map {
    #[new]
    #[pyo3(signature = (expression, base = "nf"))]
    fn new(expression: &str, base: &str) -> PyResult<Self> {
        let inner = match base {
            "nf" => Inner::Nf(parse_map(expression).map_err(value_error)?),
            "ff" => Inner::Ff(parse_map(expression).map_err(value_error)?),
            other => {
                return Err(PyValueError::new_err(format!(
                    "base must be 'nf' or 'ff', got '{other}'"
                )))
            }
        };
        Ok(Map { inner })
    }

    #[getter]
    fn degree(&self) -> usize {
        match &self.inner {
            Inner::Nf(m) => m.degree(),
            Inner::Ff(m) => m.degree(),
        }
    }

    #[getter]
    fn expression(&self) -> String {
        match &self.inner {
            Inner::Nf(m) => m.expression(),
            Inner::Ff(m) => m.expression(),
        }
    }

    #[getter(base)]
    fn base_name(&self) -> &'static str {
        self.base()
    }

    /// `phi^0(point), ..., phi^k(point)` as strings; `inf` is the point at infinity.
    fn orbit(&self, point: &str, k: usize) -> PyResult<Vec<String>> {
        match &self.inner {
            Inner::Nf(m) => orbit_of(m, point, k),
            Inner::Ff(m) => orbit_of(m, point, k),
        }
    }

    #[pyo3(signature = (point, k = 1))]
    fn iterate(&self, point: &str, k: usize) -> PyResult<String> {
        Ok(self.orbit(point, k)?.pop().expect("orbit has k + 1 entries"))
    }

    fn __repr__(&self) -> String {
        format!("Map('{}', base='{}')", self.expression(), self.base())
    }

    fn __eq__(&self, other: &Self) -> bool {
        match (&self.inner, &other.inner) {
            (Inner::Nf(a), Inner::Nf(b)) => a == b,
            (Inner::Ff(a), Inner::Ff(b)) => a == b,
            _ => false,
        }
    }
}

/// Runs the command line in-process. Usage errors raise `ValueError`,
/// internal failures `RuntimeError`; cap-limited runs return their partial
/// JSON, which carries `"partial": true`.
fn invoke(py: Python<'_>, args: Vec<String>, threads: Option<usize>) -> PyResult<String> {
    let mut argv = vec!["dynaport".to_string()];
    if let Some(t) = threads {
        argv.push("--threads".into());
        argv.push(t.to_string());
    }
    argv.extend(args);
    let out = py.allow_threads(|| cli::run(argv));
    match out.code {
        EXIT_OK | EXIT_PARTIAL if !out.stdout.is_empty() => Ok(out.stdout),
        EXIT_PARTIAL | EXIT_USAGE => Err(PyValueError::new_err(out.stderr.trim().to_string())),
        _ => Err(PyRuntimeError::new_err(out.stderr.trim().to_string())),
    }
}

fn map_args(map: &Bound<'_, PyAny>) -> PyResult<Vec<String>> {
    if let Ok(m) = map.downcast::<Map>() {
        let m = m.get();
        return Ok(vec!["--map".into(), m.expression(), "--base".into(), m.base().into()]);
    }
    Ok(vec!["--map".into(), map.extract::<String>()?])
}

/// `--map` alone, for commands tied to one base.
fn expr_args(map: &Bound<'_, PyAny>, base: &str) -> PyResult<Vec<String>> {
    if let Ok(m) = map.downcast::<Map>() {
        if m.get().base() != base {
            return Err(PyValueError::new_err(format!(
                "this command needs a map with base '{base}'"
            )));
        }
    }
    Ok(map_args(map)?.into_iter().take(2).collect())
}

fn push<T: ToString>(args: &mut Vec<String>, flag: &str, v: Option<T>) {
    if let Some(v) = v {
        args.push(flag.into());
        args.push(v.to_string());
    }
}

#[pyfunction]
#[pyo3(signature = (map, alpha, prime = None, place = None, threads = None))]
fn portrait(
    py: Python<'_>,
    map: &Bound<'_, PyAny>,
    alpha: &str,
    prime: Option<u64>,
    place: Option<&str>,
    threads: Option<usize>,
) -> PyResult<String> {
    let mut args = vec!["portrait".to_string()];
    args.extend(map_args(map)?);
    push(&mut args, "--alpha", Some(alpha));
    push(&mut args, "--prime", prime);
    push(&mut args, "--place", place);
    invoke(py, args, threads)
}

#[pyfunction]
#[pyo3(signature = (map, alpha, m, n, pmax, exclude = Vec::new(), threads = None))]
#[allow(clippy::too_many_arguments)]
fn search(
    py: Python<'_>,
    map: &Bound<'_, PyAny>,
    alpha: &str,
    m: usize,
    n: usize,
    pmax: u64,
    exclude: Vec<u64>,
    threads: Option<usize>,
) -> PyResult<String> {
    let mut args = vec!["search".to_string()];
    args.extend(expr_args(map, "nf")?);
    push(&mut args, "--alpha", Some(alpha));
    push(&mut args, "--m", Some(m));
    push(&mut args, "--n", Some(n));
    push(&mut args, "--pmax", Some(pmax));
    if !exclude.is_empty() {
        let list: Vec<String> = exclude.iter().map(u64::to_string).collect();
        push(&mut args, "--exclude", Some(list.join(",")));
    }
    invoke(py, args, threads)
}

#[pyfunction]
#[pyo3(signature = (map, alpha = None, m = None, n = None, max_m = None, max_n = None, target = None, strategy = "auto", threads = None))]
#[allow(clippy::too_many_arguments)]
fn admissible(
    py: Python<'_>,
    map: &Bound<'_, PyAny>,
    alpha: Option<&str>,
    m: Option<usize>,
    n: Option<usize>,
    max_m: Option<usize>,
    max_n: Option<usize>,
    target: Option<&str>,
    strategy: &str,
    threads: Option<usize>,
) -> PyResult<String> {
    let mut args = vec!["admissible".to_string()];
    args.extend(map_args(map)?);
    push(&mut args, "--alpha", alpha);
    push(&mut args, "--m", m);
    push(&mut args, "--n", n);
    push(&mut args, "--max-m", max_m);
    push(&mut args, "--max-n", max_n);
    push(&mut args, "--target", target);
    push(&mut args, "--strategy", Some(strategy));
    invoke(py, args, threads)
}

#[pyfunction]
#[pyo3(signature = (map, alpha, tol = 1e-6))]
fn height(py: Python<'_>, map: &Bound<'_, PyAny>, alpha: &str, tol: f64) -> PyResult<String> {
    let mut args = vec!["height".to_string()];
    args.extend(map_args(map)?);
    push(&mut args, "--alpha", Some(alpha));
    push(&mut args, "--tol", Some(tol));
    invoke(py, args, None)
}

#[pyfunction]
#[pyo3(signature = (map = "x^2+t", n_max = 10))]
fn gleason(py: Python<'_>, map: &str, n_max: usize) -> PyResult<String> {
    let args = vec![
        "gleason".into(),
        "--map".into(),
        map.into(),
        "--n-max".into(),
        n_max.to_string(),
    ];
    invoke(py, args, None)
}

#[pyfunction]
#[pyo3(signature = (map, alpha, m, n, threads = None))]
fn ff_search(
    py: Python<'_>,
    map: &Bound<'_, PyAny>,
    alpha: &str,
    m: usize,
    n: usize,
    threads: Option<usize>,
) -> PyResult<String> {
    let mut args = vec!["ff-search".to_string()];
    args.extend(expr_args(map, "ff")?);
    push(&mut args, "--alpha", Some(alpha));
    push(&mut args, "--m", Some(m));
    push(&mut args, "--n", Some(n));
    invoke(py, args, threads)
}

#[pyfunction]
#[pyo3(signature = (example = "all", pmax = 10_000, threads = None))]
fn verify(py: Python<'_>, example: &str, pmax: u64, threads: Option<usize>) -> PyResult<String> {
    let args = vec![
        "verify".into(),
        "--example".into(),
        example.into(),
        "--pmax".into(),
        pmax.to_string(),
    ];
    let mut argv = vec!["dynaport".to_string()];
    if let Some(t) = threads {
        argv.extend(["--threads".to_string(), t.to_string()]);
    }
    argv.extend(args);
    // a failed example exits 1 but still prints its report
    let out = py.allow_threads(|| cli::run(argv));
    if out.stdout.is_empty() {
        return Err(PyValueError::new_err(out.stderr.trim().to_string()));
    }
    Ok(out.stdout)
}

/// Raw access to the command line: `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run(py: Python<'_>, args: Vec<String>) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("dynaport".to_string()).chain(args).collect();
    let out = py.allow_threads(|| cli::run(argv));
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
fn dynaport_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Map>()?;
    m.add_function(wrap_pyfunction!(portrait, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(admissible, m)?)?;
    m.add_function(wrap_pyfunction!(height, m)?)?;
    m.add_function(wrap_pyfunction!(gleason, m)?)?;
    m.add_function(wrap_pyfunction!(ff_search, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("SCHEMA_VERSION", dynaport::report::SCHEMA_VERSION)?;
    Ok(())
}

//! Python bindings. Rationals cross the boundary as `fractions.Fraction`
//! (ints, Fractions and "p/q" strings are accepted on input).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use torusvc::bounds;
use torusvc::extraction::{self, CheckMode, SampleOutcome};
use torusvc::formats;
use torusvc::lifting::{self, LiftMode};
use torusvc::search;
use torusvc::stripes;
use torusvc::torus::{parse_rat, Closure};
use torusvc::{Error, Family, Mask, Rat, Shape};

create_exception!(torusvc_py, TorusVcError, PyException);
create_exception!(torusvc_py, GuardError, TorusVcError);

fn err(e: Error) -> PyErr {
    match e {
        Error::Guard { .. } => GuardError::new_err(e.to_string()),
        _ => TorusVcError::new_err(e.to_string()),
    }
}

fn to_rat(obj: &Bound<'_, PyAny>) -> PyResult<Rat> {
    if let Ok(s) = obj.extract::<String>() {
        return parse_rat(&s).map_err(err);
    }
    let n: i64 = obj.getattr("numerator")?.extract()?;
    let d: i64 = obj.getattr("denominator")?.extract()?;
    if d == 0 {
        return Err(TorusVcError::new_err("zero denominator"));
    }
    Ok(Rat::new(n, d))
}

fn opt_rat(obj: Option<&Bound<'_, PyAny>>) -> PyResult<Option<Rat>> {
    obj.map(to_rat).transpose()
}

fn fraction<'py>(py: Python<'py>, r: Rat) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((*r.numer(), *r.denom()))
}

fn big_fraction<'py>(py: Python<'py>, n: &BigInt, d: &BigInt) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((n.clone(), d.clone()))
}

fn family(name: &str, l: Option<&Bound<'_, PyAny>>) -> PyResult<Family> {
    Family::parse(name, opt_rat(l)?).map_err(err)
}

fn arc_tuple<'py>(py: Python<'py>, a: &torusvc::Arc) -> PyResult<Bound<'py, PyAny>> {
    let closed = a.closure() == Closure::Closed;
    Ok((fraction(py, a.start())?, fraction(py, a.end())?, closed)
        .into_pyobject(py)?
        .into_any())
}

/// A shape as a dict: `kind`, `arcs` as (start, end, closed) tuples, and
/// `anchor` (0-based) for stripes.
fn shape_dict<'py>(py: Python<'py>, s: &Shape) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    let arcs = PyList::empty(py);
    match s {
        Shape::Box(b) => {
            d.set_item("kind", "box")?;
            for a in b.arcs() {
                arcs.append(arc_tuple(py, a)?)?;
            }
        }
        Shape::Cube(c) => {
            d.set_item("kind", "cube")?;
            d.set_item("edge", fraction(py, c.edge())?)?;
            for a in c.arcs() {
                arcs.append(arc_tuple(py, a)?)?;
            }
        }
        Shape::Stripe(st) => {
            d.set_item("kind", "stripe")?;
            d.set_item("anchor", st.anchor())?;
            d.set_item("ambient_dim", st.ambient_dim())?;
            arcs.append(arc_tuple(py, st.arc())?)?;
        }
    }
    d.set_item("arcs", arcs)?;
    Ok(d)
}

fn witnesses_dict<'py>(py: Python<'py>, w: &BTreeMap<Mask, Shape>) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (m, s) in w {
        d.set_item(m.0, shape_dict(py, s)?)?;
    }
    Ok(d)
}

/// A finite point set on the torus, stored as numerators over a common denominator.
#[pyclass(name = "PointSet", module = "torusvc_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyPointSet {
    inner: torusvc::PointSet,
}

#[pymethods]
impl PyPointSet {
    #[new]
    fn new(dim: usize, denom: u64, numers: Vec<Vec<u64>>) -> PyResult<Self> {
        Ok(PyPointSet {
            inner: torusvc::PointSet::new(dim, denom, numers).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyPointSet {
            inner: formats::parse_points(text).map_err(err)?,
        })
    }

    fn to_text(&self) -> String {
        formats::write_points(&self.inner)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn denom(&self) -> u64 {
        self.inner.denom()
    }

    fn numers(&self) -> Vec<Vec<u64>> {
        self.inner.all_numers().to_vec()
    }

    fn coords<'py>(&self, py: Python<'py>) -> PyResult<Vec<Vec<Bound<'py, PyAny>>>> {
        (0..self.inner.len())
            .map(|i| {
                (0..self.inner.dim())
                    .map(|k| fraction(py, self.inner.coord(i, k)))
                    .collect()
            })
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "PointSet(dim={}, n={}, denom={})",
            self.inner.dim(),
            self.inner.len(),
            self.inner.denom()
        )
    }
}

/// A symbol matrix over the alphabet `0..k`.
#[pyclass(
    name = "SymbolMatrix",
    module = "torusvc_py",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
pub struct PySymbolMatrix {
    inner: extraction::SymbolMatrix,
}

#[pymethods]
impl PySymbolMatrix {
    #[new]
    fn new(k: usize, rows: Vec<Vec<u32>>) -> PyResult<Self> {
        Ok(PySymbolMatrix {
            inner: extraction::SymbolMatrix::from_rows(k, &rows).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PySymbolMatrix {
            inner: formats::parse_matrix(text).map_err(err)?,
        })
    }

    fn to_text(&self) -> String {
        formats::write_matrix(&self.inner)
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.cols()
    }

    #[getter]
    fn alphabet(&self) -> usize {
        self.inner.alphabet()
    }

    fn entries(&self) -> Vec<Vec<u32>> {
        (0..self.inner.rows())
            .map(|i| self.inner.row(i).to_vec())
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "SymbolMatrix(rows={}, cols={}, k={})",
            self.inner.rows(),
            self.inner.cols(),
            self.inner.alphabet()
        )
    }
}

/// Shattering report: `shattered`, `missing` (smallest unrealizable mask or
/// None) and `witnesses` (mask -> shape dict).
#[pyfunction]
#[pyo3(signature = (points, family_name, l=None))]
fn shatter<'py>(
    py: Python<'py>,
    points: &PyPointSet,
    family_name: &str,
    l: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyDict>> {
    let fam = family(family_name, l)?;
    let r = torusvc::shatter::shatter_report(&points.inner, fam).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("shattered", r.shattered)?;
    d.set_item("missing", r.missing.map(|m| m.0))?;
    d.set_item("witnesses", witnesses_dict(py, &r.witnesses)?)?;
    Ok(d)
}

/// A shape cutting out exactly `mask`, or None.
#[pyfunction]
#[pyo3(signature = (points, mask, family_name, l=None))]
fn realize<'py>(
    py: Python<'py>,
    points: &PyPointSet,
    mask: u64,
    family_name: &str,
    l: Option<&Bound<'py, PyAny>>,
) -> PyResult<Option<Bound<'py, PyDict>>> {
    let fam = family(family_name, l)?;
    torusvc::shatter::realize(&points.inner, Mask(mask), fam)
        .map_err(err)?
        .map(|s| shape_dict(py, &s))
        .transpose()
}

/// Number of distinct subsets cut out by the family.
#[pyfunction]
#[pyo3(signature = (points, family_name, l=None))]
fn growth_count(
    points: &PyPointSet,
    family_name: &str,
    l: Option<&Bound<'_, PyAny>>,
) -> PyResult<u64> {
    let fam = family(family_name, l)?;
    torusvc::shatter::growth_count(&points.inner, fam).map_err(err)
}

/// The `n + 1` points in dimension `2^n` shattered by stripes of length `l`.
#[pyfunction]
fn build_stripe_set(n: usize, l: &Bound<'_, PyAny>) -> PyResult<PyPointSet> {
    Ok(PyPointSet {
        inner: stripes::build_stripe_shattered_set(n, to_rat(l)?).map_err(err)?,
    })
}

/// Extraction verdict: `holds`, `counterexample_word` and `failure_witness`
/// (dict with rows, symbols, cols).
#[pyfunction]
#[pyo3(signature = (matrix, mode="witness"))]
fn check_extraction<'py>(
    py: Python<'py>,
    matrix: &PySymbolMatrix,
    mode: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = match mode {
        "witness" => CheckMode::Witness,
        "exhaustive" => CheckMode::Exhaustive,
        other => return Err(TorusVcError::new_err(format!("unknown mode {other:?}"))),
    };
    let v = extraction::check_extraction(&matrix.inner, mode).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("holds", v.holds)?;
    d.set_item("counterexample_word", v.counterexample_word)?;
    match v.failure_witness {
        Some(w) => {
            let fw = PyDict::new(py);
            fw.set_item("rows", w.rows)?;
            fw.set_item("symbols", w.symbols)?;
            fw.set_item("cols", w.cols)?;
            d.set_item("failure_witness", fw)?;
        }
        None => d.set_item("failure_witness", py.None())?,
    }
    Ok(d)
}

/// Column indices extracting `word` (one column per row), or None.
#[pyfunction]
fn extract_columns(matrix: &PySymbolMatrix, word: Vec<u32>) -> PyResult<Option<Vec<usize>>> {
    extraction::extract_columns(&matrix.inner, &word).map_err(err)
}

/// Samples balanced matrices until one has the extraction property.
/// Returns `(matrix or None, trials)`.
#[pyfunction]
#[pyo3(signature = (m, k, q, seed=0, max_trials=1000))]
fn sample_extraction_matrix(
    m: u64,
    k: u64,
    q: &Bound<'_, PyAny>,
    seed: u64,
    max_trials: usize,
) -> PyResult<(Option<PySymbolMatrix>, usize)> {
    match extraction::sample_extraction_matrix(m, k, to_rat(q)?, max_trials, seed).map_err(err)? {
        SampleOutcome::Found { matrix, trials } => {
            Ok((Some(PySymbolMatrix { inner: matrix }), trials))
        }
        SampleOutcome::Exhausted { trials } => Ok((None, trials)),
    }
}

/// Exact counting ledger; `ratio_bound` is a Fraction.
#[pyfunction]
fn failure_probability_bound<'py>(
    py: Python<'py>,
    q: &Bound<'py, PyAny>,
    m: u64,
    k: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let q = to_rat(q)?;
    let l = extraction::failure_probability_bound(q, m, k).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("q", fraction(py, l.q)?)?;
    d.set_item("m", l.m)?;
    d.set_item("k", l.k)?;
    d.set_item("c", l.c)?;
    d.set_item("d", l.d)?;
    d.set_item("qm", l.qm)?;
    d.set_item("a", BigInt::from(l.a.clone()))?;
    d.set_item("t", BigInt::from(l.t.clone()))?;
    d.set_item("b_bound", BigInt::from(l.b_bound.clone()))?;
    d.set_item(
        "ratio_bound",
        big_fraction(py, l.ratio_bound.numer(), l.ratio_bound.denom())?,
    )?;
    d.set_item("below_inverse_q", l.below_inverse_q())?;
    d.set_item("ext_req", extraction::verify_ext_req(q, m, k).map_err(err)?)?;
    Ok(d)
}

/// Lifts `points` through `matrix` with stripe length `l`.
#[pyfunction]
fn lift(
    points: &PyPointSet,
    matrix: &PySymbolMatrix,
    l: &Bound<'_, PyAny>,
) -> PyResult<PyPointSet> {
    let inst = lifting::lift_points(&points.inner, &matrix.inner, to_rat(l)?).map_err(err)?;
    Ok(PyPointSet {
        inner: inst.lifted().clone(),
    })
}

/// Checks cube witnesses on the lifted set. `sample=None` checks every mask.
/// Returns `(checked, failures)` with failures as (mask, reason) pairs.
#[pyfunction]
#[pyo3(signature = (points, matrix, l, sample=None, seed=0))]
fn certify_lift(
    points: &PyPointSet,
    matrix: &PySymbolMatrix,
    l: &Bound<'_, PyAny>,
    sample: Option<usize>,
    seed: u64,
) -> PyResult<(usize, Vec<(u64, String)>)> {
    let inst = lifting::lift_points(&points.inner, &matrix.inner, to_rat(l)?).map_err(err)?;
    let mode = match sample {
        None => LiftMode::Exhaustive,
        Some(count) => LiftMode::Sample { count, seed },
    };
    let r = lifting::verify_lift(&inst, mode).map_err(err)?;
    Ok((
        r.checked,
        r.failures
            .into_iter()
            .map(|f| (f.mask.0, f.reason))
            .collect(),
    ))
}

/// Bound rows as dicts; `lower` is None when not certified.
#[pyfunction]
fn bounds_table<'py>(py: Python<'py>, ds: Vec<u64>) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let rows = py.detach(|| bounds::bounds_table(&ds)).map_err(err)?;
    rows.into_iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("d", r.d)?;
            d.set_item("stripe_ub", r.stripe_ub)?;
            d.set_item("trivial_ub", r.trivial_ub)?;
            d.set_item("refined_ub", r.refined_ub)?;
            d.set_item("lower", r.lower)?;
            Ok(d)
        })
        .collect()
}

/// Parameters chosen for the lower bound in dimension `d`.
#[pyfunction]
#[pyo3(signature = (d, f=None))]
fn choose_parameters<'py>(py: Python<'py>, d: u64, f: Option<u64>) -> PyResult<Bound<'py, PyDict>> {
    let p = bounds::choose_parameters(d, f).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("d", p.d)?;
    out.set_item("f", p.f)?;
    out.set_item("q", fraction(py, p.q)?)?;
    out.set_item("m", p.m)?;
    out.set_item("k", p.k)?;
    out.set_item("c", p.c)?;
    out.set_item("d_prime", p.d_prime)?;
    out.set_item("condition_ok", p.condition_ok)?;
    out.set_item("ext_req", p.ext_req)?;
    Ok(out)
}

#[pyfunction]
fn lower_bound_value(d: u64) -> PyResult<u64> {
    bounds::lower_bound_value(d).map_err(err)
}

/// Exact VC dimension by enumeration of order types.
#[pyfunction]
#[pyo3(signature = (d, family_name, l=None, n_max=8))]
fn vc_exact<'py>(
    py: Python<'py>,
    d: usize,
    family_name: &str,
    l: Option<&Bound<'py, PyAny>>,
    n_max: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let fam = family(family_name, l)?;
    let r = py.detach(|| search::vc_exact(d, fam, n_max)).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("value", r.value)?;
    out.set_item("refuted_at", r.refuted_at)?;
    out.set_item("complete", r.complete)?;
    out.set_item("witness", r.witness.map(|inner| PyPointSet { inner }))?;
    out.set_item("witnesses", witnesses_dict(py, &r.certificates)?)?;
    let levels: Vec<(usize, usize, bool)> = r
        .levels
        .iter()
        .map(|s| (s.n, s.configs, s.shattered))
        .collect();
    out.set_item("levels", levels)?;
    Ok(out)
}

/// Randomized search for `n` points in dimension `d` shattered by boxes.
#[pyfunction]
#[pyo3(signature = (d, n, budget=10000, seed=0))]
fn search_shattered(
    py: Python<'_>,
    d: usize,
    n: usize,
    budget: u64,
    seed: u64,
) -> PyResult<Option<(PyPointSet, u64)>> {
    let hit = py
        .detach(|| search::search_shattered(d, n, budget, seed))
        .map_err(err)?;
    Ok(hit.map(|h| (PyPointSet { inner: h.points }, h.evaluations)))
}

#[pymodule]
fn torusvc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("TorusVcError", m.py().get_type::<TorusVcError>())?;
    m.add("GuardError", m.py().get_type::<GuardError>())?;
    m.add_class::<PyPointSet>()?;
    m.add_class::<PySymbolMatrix>()?;
    m.add_function(wrap_pyfunction!(shatter, m)?)?;
    m.add_function(wrap_pyfunction!(realize, m)?)?;
    m.add_function(wrap_pyfunction!(growth_count, m)?)?;
    m.add_function(wrap_pyfunction!(build_stripe_set, m)?)?;
    m.add_function(wrap_pyfunction!(check_extraction, m)?)?;
    m.add_function(wrap_pyfunction!(extract_columns, m)?)?;
    m.add_function(wrap_pyfunction!(sample_extraction_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(failure_probability_bound, m)?)?;
    m.add_function(wrap_pyfunction!(lift, m)?)?;
    m.add_function(wrap_pyfunction!(certify_lift, m)?)?;
    m.add_function(wrap_pyfunction!(bounds_table, m)?)?;
    m.add_function(wrap_pyfunction!(choose_parameters, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound_value, m)?)?;
    m.add_function(wrap_pyfunction!(vc_exact, m)?)?;
    m.add_function(wrap_pyfunction!(search_shattered, m)?)?;
    Ok(())
}

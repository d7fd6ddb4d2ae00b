//! Python bindings. Rationals cross the boundary as `fractions.Fraction`
//! (strings like `"2/3"` and ints are accepted on input); formulas may be
//! passed as `Formula` objects or as text.

use std::collections::HashMap;

use pavelka::constants::{decide_rpl, define_rational, rpl_minimum, star_translate, AuxPool, Mode, Route};
use pavelka::definability::{
    d_condition as core_d_condition, def_check as core_def_check, reduce_dbar_to_def as core_dbar,
    reduce_sat_to_def as core_sat, DefInstance, DefVerdict,
};
use pavelka::formula::{Formula, Theory, Variable};
use pavelka::irrational::{self, builtin_oracle, RealOracle, TableOracle};
use pavelka::rational::{fmt_rational, parse_rational, Rational};
use pavelka::solver::{self, Consequence, SolverConfig};
use pavelka::{parse_formula, render_formula, Valuation};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(pavelka, PavelkaError, PyException);

fn fail(e: pavelka::Error) -> PyErr {
    PavelkaError::new_err(e.to_string())
}

fn config() -> SolverConfig {
    SolverConfig::from_env()
}

#[pyclass(name = "Formula", module = "pavelka", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PyFormula {
    inner: Formula,
}

#[pymethods]
impl PyFormula {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(PyFormula {
            inner: parse_formula(text).map_err(fail)?,
        })
    }

    /// Variable names in order of first occurrence.
    fn variables(&self) -> Vec<String> {
        self.inner.variables().iter().map(|v| v.name().to_string()).collect()
    }

    #[pyo3(signature = (assignment = None))]
    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        assignment: Option<HashMap<String, Bound<'py, PyAny>>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let v = valuation_arg(assignment)?;
        fraction(py, &pavelka::evaluate(&self.inner, &v).map_err(fail)?)
    }

    fn __str__(&self) -> String {
        render_formula(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Formula({:?})", render_formula(&self.inner))
    }
}

fn formula_arg(obj: &Bound<'_, PyAny>) -> PyResult<Formula> {
    if let Ok(f) = obj.extract::<PyRef<'_, PyFormula>>() {
        return Ok(f.inner.clone());
    }
    let text: String = obj.extract()?;
    parse_formula(&text).map_err(fail)
}

fn theory_arg(items: Option<Vec<Bound<'_, PyAny>>>) -> PyResult<Theory> {
    items
        .unwrap_or_default()
        .iter()
        .map(formula_arg)
        .collect::<PyResult<Vec<_>>>()
        .map(Theory::from_axioms)
}

fn rational_arg(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if obj.is_instance_of::<pyo3::types::PyFloat>() {
        return Err(PavelkaError::new_err("floats are not accepted; use Fraction or \"m/n\""));
    }
    parse_rational(&obj.str()?.to_cow()?).map_err(fail)
}

fn variable_arg(name: &str) -> PyResult<Variable> {
    match parse_formula(name).map_err(fail)? {
        Formula::Var(v) => Ok(v),
        _ => Err(PavelkaError::new_err(format!("`{name}` is not a variable"))),
    }
}

fn valuation_arg(assignment: Option<HashMap<String, Bound<'_, PyAny>>>) -> PyResult<Valuation> {
    let mut v = Valuation::new();
    for (name, value) in assignment.unwrap_or_default() {
        v.insert(variable_arg(&name)?, rational_arg(&value)?);
    }
    Ok(v)
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((fmt_rational(r),))
}

fn valuation_dict<'py>(py: Python<'py>, v: &Valuation) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (x, r) in v.iter() {
        d.set_item(x.name(), fraction(py, r)?)?;
    }
    Ok(d)
}

fn lines(t: &Theory) -> Vec<String> {
    t.iter().map(render_formula).collect()
}

fn mode_arg(mode: &str) -> PyResult<Mode> {
    mode.parse().map_err(fail)
}

fn instance(formula: &Bound<'_, PyAny>, var: &str, value: &Bound<'_, PyAny>) -> PyResult<DefInstance> {
    DefInstance::new(formula_arg(formula)?, variable_arg(var)?, rational_arg(value)?).map_err(fail)
}

fn oracle_arg(name: &str) -> PyResult<Box<dyn RealOracle>> {
    if let Some(o) = builtin_oracle(name) {
        return Ok(o);
    }
    let text = std::fs::read_to_string(name)
        .map_err(|e| PavelkaError::new_err(format!("unknown oracle `{name}` ({e})")))?;
    Ok(Box::new(TableOracle::parse(name, &text).map_err(fail)?))
}

#[pyfunction]
fn parse(text: &str) -> PyResult<PyFormula> {
    PyFormula::new(text)
}

#[pyfunction]
#[pyo3(signature = (formula, assignment = None))]
fn evaluate<'py>(
    py: Python<'py>,
    formula: &Bound<'py, PyAny>,
    assignment: Option<HashMap<String, Bound<'py, PyAny>>>,
) -> PyResult<Bound<'py, PyAny>> {
    let v = valuation_arg(assignment)?;
    fraction(py, &pavelka::evaluate(&formula_arg(formula)?, &v).map_err(fail)?)
}

/// `{"holds": bool, "value": Fraction | None, "countermodel": dict | None}`.
/// On failure the countermodel is a model minimising the formula.
#[pyfunction]
#[pyo3(signature = (formula, theory = None, route = "direct"))]
fn decide<'py>(
    py: Python<'py>,
    formula: &Bound<'py, PyAny>,
    theory: Option<Vec<Bound<'py, PyAny>>>,
    route: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let (t, f) = (theory_arg(theory)?, formula_arg(formula)?);
    let route: Route = route.parse().map_err(fail)?;
    let out = PyDict::new(py);
    match decide_rpl(&t, &f, route, &config()).map_err(fail)? {
        Consequence::Holds => {
            out.set_item("holds", true)?;
            out.set_item("value", py.None())?;
            out.set_item("countermodel", py.None())?;
        }
        Consequence::Countermodel { valuation, value } => {
            let (valuation, value) = match rpl_minimum(&t, &f, route, &config()).map_err(fail)? {
                Some(e) => (e.witness, e.value),
                None => (valuation, value),
            };
            out.set_item("holds", false)?;
            out.set_item("value", fraction(py, &value)?)?;
            out.set_item("countermodel", valuation_dict(py, &valuation)?)?;
        }
    }
    Ok(out)
}

/// Least value of the formula over the models of the theory (1 if none).
#[pyfunction]
#[pyo3(signature = (formula, theory = None))]
fn degree<'py>(
    py: Python<'py>,
    formula: &Bound<'py, PyAny>,
    theory: Option<Vec<Bound<'py, PyAny>>>,
) -> PyResult<Bound<'py, PyAny>> {
    let (t, f) = (theory_arg(theory)?, formula_arg(formula)?);
    fraction(py, &solver::truth_degree(&t, &f, &config()).map_err(fail)?)
}

#[pyfunction]
#[pyo3(signature = (formula, theory = None, mode = "naive"))]
fn translate<'py>(
    py: Python<'py>,
    formula: &Bound<'py, PyAny>,
    theory: Option<Vec<Bound<'py, PyAny>>>,
    mode: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let tr = star_translate(&theory_arg(theory)?, &formula_arg(formula)?, mode_arg(mode)?).map_err(fail)?;
    let out = PyDict::new(py);
    out.set_item("theory", lines(&tr.theory))?;
    out.set_item("formula", render_formula(&tr.formula))?;
    out.set_item("tq_fin", lines(&tr.tq_fin))?;
    Ok(out)
}

/// Axioms of a theory whose models all give `q<m/n>` the value m/n.
#[pyfunction]
#[pyo3(signature = (m, n, mode = "naive"))]
fn define(m: u64, n: u64, mode: &str) -> PyResult<Vec<String>> {
    let sys = define_rational(m, n, mode_arg(mode)?, &mut AuxPool::new()).map_err(fail)?;
    Ok(lines(&sys.theory))
}

/// `("defines" | "unsatisfiable" | "leaks", witness dict | None)`.
#[pyfunction]
fn def_check<'py>(
    py: Python<'py>,
    formula: &Bound<'py, PyAny>,
    var: &str,
    value: &Bound<'py, PyAny>,
) -> PyResult<(String, Option<Bound<'py, PyDict>>)> {
    let verdict = core_def_check(&instance(formula, var, value)?, &config()).map_err(fail)?;
    let witness = match &verdict {
        DefVerdict::Leaks { witness } => Some(valuation_dict(py, witness)?),
        _ => None,
    };
    Ok((verdict.label().to_string(), witness))
}

/// A satisfying valuation giving `var` a value other than `value`, if any.
#[pyfunction]
fn d_condition<'py>(
    py: Python<'py>,
    formula: &Bound<'py, PyAny>,
    var: &str,
    value: &Bound<'py, PyAny>,
) -> PyResult<Option<Bound<'py, PyDict>>> {
    core_d_condition(&instance(formula, var, value)?, &config())
        .map_err(fail)?
        .map(|w| valuation_dict(py, &w))
        .transpose()
}

fn instance_tuple<'py>(py: Python<'py>, inst: DefInstance) -> PyResult<(PyFormula, String, Bound<'py, PyAny>)> {
    let value = fraction(py, &inst.value)?;
    Ok((PyFormula { inner: inst.formula }, inst.var.name().to_string(), value))
}

#[pyfunction]
fn reduce_sat_to_def<'py>(
    py: Python<'py>,
    formula: &Bound<'py, PyAny>,
) -> PyResult<(PyFormula, String, Bound<'py, PyAny>)> {
    instance_tuple(py, core_sat(&formula_arg(formula)?))
}

#[pyfunction]
fn reduce_dbar_to_def<'py>(
    py: Python<'py>,
    formula: &Bound<'py, PyAny>,
    var: &str,
    value: &Bound<'py, PyAny>,
) -> PyResult<(PyFormula, String, Bound<'py, PyAny>)> {
    instance_tuple(py, core_dbar(&instance(formula, var, value)?).map_err(fail)?)
}

/// Dyadic bracket of the oracle at precision `p`, validated.
#[pyfunction]
fn bracket<'py>(py: Python<'py>, oracle: &str, precision: u32) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let (lo, hi) = irrational::checked_bracket(oracle_arg(oracle)?.as_ref(), precision).map_err(fail)?;
    Ok((fraction(py, &lo)?, fraction(py, &hi)?))
}

/// Range of the cut variable over the models of the cut fragment.
#[pyfunction]
fn confinement<'py>(py: Python<'py>, oracle: &str, precision: u32) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let frag = irrational::cut_fragment(oracle_arg(oracle)?.as_ref(), precision).map_err(fail)?;
    let (lo, hi) = irrational::confinement(&frag, &config()).map_err(fail)?;
    Ok((fraction(py, &lo)?, fraction(py, &hi)?))
}

#[pyfunction]
fn product_pair_check<'py>(py: Python<'py>, a: &str, b: &str, precision: u32) -> PyResult<Bound<'py, PyAny>> {
    let (oa, ob) = (oracle_arg(a)?, oracle_arg(b)?);
    let d = irrational::product_pair_check(oa.as_ref(), ob.as_ref(), precision, &config()).map_err(fail)?;
    fraction(py, &d)
}

#[pyfunction]
fn degree_floor(py: Python<'_>, precision: u32) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &irrational::degree_floor(precision))
}

/// Adds the classes and functions to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFormula>()?;
    m.add("PavelkaError", m.py().get_type::<PavelkaError>())?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(degree, m)?)?;
    m.add_function(wrap_pyfunction!(translate, m)?)?;
    m.add_function(wrap_pyfunction!(define, m)?)?;
    m.add_function(wrap_pyfunction!(def_check, m)?)?;
    m.add_function(wrap_pyfunction!(d_condition, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_sat_to_def, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_dbar_to_def, m)?)?;
    m.add_function(wrap_pyfunction!(bracket, m)?)?;
    m.add_function(wrap_pyfunction!(confinement, m)?)?;
    m.add_function(wrap_pyfunction!(product_pair_check, m)?)?;
    m.add_function(wrap_pyfunction!(degree_floor, m)?)?;
    Ok(())
}

#[pymodule]
#[pyo3(name = "pavelka")]
fn pavelka_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}

use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

fn with_module(code: &std::ffi::CStr) {
    Python::attach(|py| {
        let m = PyModule::new(py, "pavelka").unwrap();
        pavelka_py::register(&m).unwrap();
        let globals = PyDict::new(py);
        globals.set_item("pv", m).unwrap();
        if let Err(e) = py.run(code, Some(&globals), None) {
            e.print(py);
            panic!("python check failed");
        }
    });
}

#[test]
fn values_round_trip_as_fractions() {
    with_module(
        c"
from fractions import Fraction
f = pv.parse('6/13 -> 5/13')
assert pv.evaluate(f) == Fraction(12, 13)
assert pv.evaluate('x & y', {'x': '2/3', 'y': Fraction(1, 2)}) == Fraction(1, 6)
assert str(pv.Formula('x  ->  y')) == 'x -> y'
assert pv.Formula('x -> y') == pv.parse('x -> y')
assert pv.degree('x \\\\/ ~x') == Fraction(1, 2)
",
    );
}

#[test]
fn decisions_and_definability() {
    with_module(
        c"
from fractions import Fraction
r = pv.decide('2/3 -> (x \\\\/ ~x)', route='poly')
assert not r['holds'] and r['value'] == Fraction(5, 6) and r['countermodel'] == {'x': Fraction(1, 2)}
assert pv.decide('p (+) p (+) p', theory=['p <-> 1/3'])['holds']
assert pv.define(1, 5, mode='poly')[-1] == 'q<1/5> <-> aux1_y2'
assert pv.def_check('x <-> ~x', 'x', '1/2') == ('defines', None)
assert pv.def_check('x & ~x', 'x', 0)[0] == 'unsatisfiable'
f, var, value = pv.reduce_sat_to_def('x & ~x')
assert value == Fraction(1, 2) and pv.def_check(f, var, value)[0] != 'defines'
assert pv.d_condition('x <-> ~x', 'x', '1/4') == {'x': Fraction(1, 2)}
try:
    pv.parse('x ->')
    raise AssertionError('no error')
except pv.PavelkaError:
    pass
",
    );
}

#[test]
fn irrational_oracles() {
    with_module(
        c"
from fractions import Fraction
assert pv.bracket('sqrt2over2', 3) == (Fraction(11, 16), Fraction(3, 4))
assert pv.confinement('sqrt2over2', 3) == pv.bracket('sqrt2over2', 3)
assert pv.product_pair_check('sqrt2over2', 'sqrt2minus1', 3) == Fraction(7, 8)
assert pv.degree_floor(3) == Fraction(5, 8)
",
    );
}

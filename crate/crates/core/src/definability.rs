//! Implicit definability of truth values: the DEF problem, its failure
//! condition, definability in the logic, term definability, and the two
//! hardness reductions as instance transformers.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::constants::{define_rational, AuxPool, Mode};
use crate::error::{Error, Result};
use crate::formula::{Formula, Theory, VarKind, Variable};
use crate::parser::{parse_formula, render_formula};
use crate::rational::{denom_u64, fmt_rational, in_unit_interval, numer_u64, parse_unit_rational, rat, Rational};
use crate::semantics::{evaluate, Valuation};
use crate::solver::{self, optimize_with, Direction, Encoder, SolverConfig, Status, Target};

/// A triple: does `formula` implicitly define `value` in `var`?
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DefInstance {
    pub formula: Formula,
    pub var: Variable,
    pub value: Rational,
}

impl DefInstance {
    pub fn new(formula: Formula, var: Variable, value: Rational) -> Result<Self> {
        if !in_unit_interval(&value) {
            return Err(Error::InvalidArgument(format!(
                "value {} is outside [0,1]",
                fmt_rational(&value)
            )));
        }
        if !formula.occurs(&var) {
            return Err(Error::InvalidArgument(format!(
                "variable `{}` does not occur in the formula",
                var.name()
            )));
        }
        Ok(DefInstance { formula, var, value })
    }
}

/// Renders the single-line record `DEF <formula> | <variable> | <m/n>`.
impl fmt::Display for DefInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "DEF {} | {} | {}",
            render_formula(&self.formula),
            self.var.name(),
            fmt_rational(&self.value)
        )
    }
}

impl FromStr for DefInstance {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let body = line
            .trim()
            .strip_prefix("DEF ")
            .ok_or_else(|| Error::InvalidArgument("record must start with `DEF `".into()))?;
        let parts: Vec<&str> = body.split('|').map(str::trim).collect();
        let [formula, var, value] = parts[..] else {
            return Err(Error::InvalidArgument("record needs three `|`-separated fields".into()));
        };
        let formula = parse_formula(formula)?;
        let var = match parse_formula(var)? {
            Formula::Var(v) => v,
            _ => return Err(Error::InvalidArgument(format!("`{var}` is not a variable"))),
        };
        DefInstance::new(formula, var, parse_unit_rational(value)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DefVerdict {
    Defines,
    /// The formula never takes the value 1.
    Unsatisfiable,
    /// A satisfying valuation where the variable differs from the value.
    Leaks { witness: Valuation },
}

impl DefVerdict {
    pub fn defines(&self) -> bool {
        matches!(self, DefVerdict::Defines)
    }

    pub fn label(&self) -> &'static str {
        match self {
            DefVerdict::Defines => "defines",
            DefVerdict::Unsatisfiable => "unsatisfiable",
            DefVerdict::Leaks { .. } => "leaks",
        }
    }
}

/// A valuation satisfying the formula with `var` above or below the value.
pub fn d_condition(inst: &DefInstance, config: &SolverConfig) -> Result<Option<Valuation>> {
    let theory = Theory::from_axioms(vec![inst.formula.clone()]);
    let x = Formula::of(inst.var.clone());
    for direction in [Direction::Maximize, Direction::Minimize] {
        if let Some(e) = solver::improve_on(&theory, &x, direction, &inst.value, config)? {
            return Ok(Some(e.witness));
        }
    }
    Ok(None)
}

pub fn def_check(inst: &DefInstance, config: &SolverConfig) -> Result<DefVerdict> {
    if solver::satisfiable(&inst.formula, config)?.is_none() {
        return Ok(DefVerdict::Unsatisfiable);
    }
    Ok(match d_condition(inst, config)? {
        Some(witness) => DefVerdict::Leaks { witness },
        None => DefVerdict::Defines,
    })
}

/// First of `base`, `base1`, `base2`, ... that is not in `taken`.
fn fresh_name(base: &str, taken: impl Fn(&Variable) -> bool) -> Variable {
    std::iter::once(base.to_string())
        .chain((1..).map(|i| format!("{base}{i}")))
        .map(Variable::plain)
        .find(|v| !taken(v))
        .expect("unbounded supply of names")
}

/// Whether any two valuations satisfying `f` and agreeing off `x` agree on
/// `x`: the maximum of `x - x'` over two copies sharing all other variables
/// is 0.
pub fn implicit_in_logic(f: &Formula, x: &Variable, config: &SolverConfig) -> Result<bool> {
    if !f.occurs(x) {
        return Err(Error::InvalidArgument(format!("variable `{}` does not occur in the formula", x.name())));
    }
    let vars = f.variables();
    let base = format!("{}_copy", x.name().replace(['<', '>', '/'], "_"));
    let copy = fresh_name(&base, |v| vars.contains(v));
    let g = f.rename(x, &copy);
    let mut enc = Encoder::new();
    enc.assert_true(f);
    enc.assert_true(&g);
    let diff = &enc.value(&Formula::of(x.clone())) - &enc.value(&Formula::of(copy.clone()));
    let problem = enc.finish(diff, Direction::Maximize);
    let outcome = optimize_with(&problem, config, Target::StrictlyBetter(rat(0, 1)))?;
    if outcome.status != Status::Found {
        return Ok(true);
    }
    let w = outcome.witness.expect("witness with solution");
    let one = rat(1, 1);
    if evaluate(f, &w)? != one || evaluate(&g, &w)? != one || w.get(x) == w.get(&copy) {
        return Err(Error::Internal("implicit-definability witness does not check".into()));
    }
    Ok(false)
}

/// Whether `f` takes the value `a` under every valuation.
pub fn term_defines(f: &Formula, a: &Rational, config: &SolverConfig) -> Result<bool> {
    let empty = Theory::new();
    for direction in [Direction::Maximize, Direction::Minimize] {
        if solver::improve_on(&empty, f, direction, a, config)?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `f` ↦ ⟨f & (u <-> ~u), u, 1/2⟩ with `u` fresh: `f` is satisfiable iff the
/// result is in DEF.
pub fn reduce_sat_to_def(f: &Formula) -> DefInstance {
    let vars = f.variables();
    let u = fresh_name("u", |v| vars.contains(v));
    let fu = Formula::of(u.clone());
    DefInstance {
        formula: f.clone().and(fu.clone().equiv(fu.neg())),
        var: u,
        value: rat(1, 2),
    }
}

/// A formula over `x` and fresh auxiliaries forcing `x` to `a`, of size
/// polynomial in the bit-length of `a`.
pub fn defining_formula(x: &Variable, a: &Rational, avoid: &Formula) -> Result<Formula> {
    let mut pool = AuxPool::avoiding(avoid.variables().iter());
    let sys = define_rational(numer_u64(a)?, denom_u64(a)?, Mode::Poly, &mut pool)?;
    let scope = pool.fresh();
    let psi = sys.formula().map_leaves(&mut |node| match node {
        Formula::Var(v) if *v == sys.principal => Some(Formula::of(x.clone())),
        Formula::Var(v) => match v.kind() {
            VarKind::QConst(r) => Some(Formula::of(Variable::aux(
                scope,
                &format!("q{}_{}", numer_u64(r).unwrap_or(0), denom_u64(r).unwrap_or(1)),
            ))),
            _ => None,
        },
        _ => None,
    });
    Ok(psi)
}

/// ⟨φ, x, a⟩ ↦ ⟨φ ∨ ψ, x, a⟩ where ψ defines `a` in `x` over fresh
/// auxiliaries: the input has no satisfying valuation moving `x` off `a`
/// iff the output is in DEF.
pub fn reduce_dbar_to_def(inst: &DefInstance) -> Result<DefInstance> {
    let psi = defining_formula(&inst.var, &inst.value, &inst.formula)?;
    Ok(DefInstance {
        formula: inst.formula.clone().max(psi),
        var: inst.var.clone(),
        value: inst.value.clone(),
    })
}

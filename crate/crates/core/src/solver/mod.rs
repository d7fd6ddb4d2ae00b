//! Exact decision kernel: standard-algebra semantics encoded as 0-1 mixed
//! integer programs and solved with rational simplex plus branch and bound.
//!
//! Every answer carrying a valuation is re-evaluated with
//! [`crate::semantics::evaluate`] before it is returned.

mod branch;
mod encode;
mod num;
mod problem;
mod simplex;
mod text;

pub use branch::{optimize, optimize_with, OptimizationOutcome, SolveStats, SolverConfig, Status, Target};
pub use encode::{encode, Encoder, EncodingStats};
pub use problem::{Comparator, Direction, Domain, LinExpr, LinearConstraint, MilpProblem, VarDecl, VarId};
pub use text::write_milp;

use crate::error::{Error, Result};
use crate::formula::{Formula, Theory};
use crate::rational::{fmt_rational, one, Rational};
use crate::semantics::{evaluate, is_model, Valuation};

/// Verdict of a finite consequence query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Consequence {
    Holds,
    /// A model of the theory in which the formula has `value < 1`.
    Countermodel { valuation: Valuation, value: Rational },
}

impl Consequence {
    pub fn holds(&self) -> bool {
        matches!(self, Consequence::Holds)
    }
}

/// An attained optimum of a formula's value over the models of a theory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extremum {
    pub value: Rational,
    pub witness: Valuation,
}

fn recheck(theory: &Theory, f: &Formula, v: &Valuation, expected: &Rational) -> Result<()> {
    if !is_model(theory, v)? {
        return Err(Error::Internal("witness is not a model of the theory".into()));
    }
    let actual = evaluate(f, v)?;
    if actual != *expected {
        return Err(Error::Internal(format!(
            "witness evaluates to {} but the program reported {}",
            fmt_rational(&actual),
            fmt_rational(expected)
        )));
    }
    Ok(())
}

fn total_witness(problem: &MilpProblem, outcome: &OptimizationOutcome) -> Valuation {
    outcome.witness.clone().unwrap_or_else(|| {
        problem
            .formula_vars
            .keys()
            .map(|v| (v.clone(), Rational::from_integer(0.into())))
            .collect()
    })
}

/// A valuation giving `f` the value 1, if there is one.
pub fn satisfiable(f: &Formula, config: &SolverConfig) -> Result<Option<Valuation>> {
    let theory = Theory::from_axioms(vec![f.clone()]);
    let mut enc = Encoder::new();
    enc.assert_theory(&theory);
    let problem = enc.finish(LinExpr::default(), Direction::Maximize);
    let outcome = optimize_with(&problem, config, Target::AnyFeasible)?;
    if !outcome.has_solution() {
        return Ok(None);
    }
    let witness = total_witness(&problem, &outcome);
    recheck(&theory, f, &witness, &one())?;
    Ok(Some(witness))
}

/// Whether every standard model of `theory` gives `f` the value 1.
pub fn decide_consequence(theory: &Theory, f: &Formula, config: &SolverConfig) -> Result<Consequence> {
    let problem = encode(theory, f, Direction::Minimize);
    let outcome = optimize_with(&problem, config, Target::StrictlyBetter(one()))?;
    match outcome.status {
        Status::Found => {
            let value = outcome.value.clone().expect("solution value");
            let valuation = total_witness(&problem, &outcome);
            recheck(theory, f, &valuation, &value)?;
            Ok(Consequence::Countermodel { valuation, value })
        }
        _ => Ok(Consequence::Holds),
    }
}

fn extremum(theory: &Theory, f: &Formula, direction: Direction, config: &SolverConfig) -> Result<Option<Extremum>> {
    let problem = encode(theory, f, direction);
    let outcome = optimize_with(&problem, config, Target::Optimum)?;
    if outcome.status != Status::Optimal {
        return Ok(None);
    }
    let value = outcome.value.clone().expect("optimal value");
    let witness = total_witness(&problem, &outcome);
    recheck(theory, f, &witness, &value)?;
    Ok(Some(Extremum { value, witness }))
}

/// Minimum of `f` over the standard models of `theory`; `None` when the
/// theory has no standard model.
pub fn minimize(theory: &Theory, f: &Formula, config: &SolverConfig) -> Result<Option<Extremum>> {
    extremum(theory, f, Direction::Minimize, config)
}

pub fn maximize(theory: &Theory, f: &Formula, config: &SolverConfig) -> Result<Option<Extremum>> {
    extremum(theory, f, Direction::Maximize, config)
}

/// Infimum (attained) of `f` over the standard models of `theory`; 1 when
/// there are none.
pub fn truth_degree(theory: &Theory, f: &Formula, config: &SolverConfig) -> Result<Rational> {
    Ok(minimize(theory, f, config)?.map_or_else(one, |e| e.value))
}

/// A model of `theory` in which `f` is strictly greater than `threshold`
/// (or strictly smaller, for [`Direction::Minimize`]).
pub fn improve_on(
    theory: &Theory,
    f: &Formula,
    direction: Direction,
    threshold: &Rational,
    config: &SolverConfig,
) -> Result<Option<Extremum>> {
    let problem = encode(theory, f, direction);
    let outcome = optimize_with(&problem, config, Target::StrictlyBetter(threshold.clone()))?;
    if outcome.status != Status::Found {
        return Ok(None);
    }
    let value = outcome.value.clone().expect("solution value");
    let witness = total_witness(&problem, &outcome);
    recheck(theory, f, &witness, &value)?;
    let strictly = match direction {
        Direction::Minimize => value < *threshold,
        Direction::Maximize => value > *threshold,
    };
    if !strictly {
        return Err(Error::Internal("improvement does not beat the threshold".into()));
    }
    Ok(Some(Extremum { value, witness }))
}

/// True iff `theory` has a standard model.
pub fn consistent(theory: &Theory, config: &SolverConfig) -> Result<bool> {
    Ok(satisfiable(&theory.conjunction(), config)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;
    use crate::rational::{rat, zero};

    fn p(text: &str) -> Formula {
        parse_formula(text).unwrap()
    }

    fn theory(lines: &[&str]) -> Theory {
        lines.iter().map(|l| p(l)).collect()
    }

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn encode_strong_conjunction_shape() {
        let problem = encode(&Theory::new(), &p("x & y"), Direction::Minimize);
        assert_eq!(problem.num_binaries(), 1);
        assert_eq!(problem.num_continuous(), 3);
        assert_eq!(problem.constraints.len(), 3);
    }

    #[test]
    fn encode_forces_one_half() {
        let t = theory(&["x <-> ~x"]);
        let lo = minimize(&t, &p("x"), &cfg()).unwrap().unwrap();
        let hi = maximize(&t, &p("x"), &cfg()).unwrap().unwrap();
        assert_eq!((lo.value, hi.value), (rat(1, 2), rat(1, 2)));
    }

    #[test]
    fn encode_power_uses_squaring_chain() {
        let t = theory(&["x <-> (~x)^4"]);
        let mut enc = Encoder::new();
        enc.assert_theory(&t);
        let root = enc.value(&p("x"));
        let (problem, stats) = enc.into_parts(root, Direction::Minimize);
        assert_eq!(stats.power_chains, vec![3]);
        assert_eq!(problem.num_binaries(), 2);
        let lo = optimize(&problem).unwrap();
        assert_eq!(lo.value, Some(rat(1, 5)));
        let mut hi_problem = problem.clone();
        hi_problem.direction = Direction::Maximize;
        assert_eq!(optimize(&hi_problem).unwrap().value, Some(rat(1, 5)));
    }

    #[test]
    fn optimize_single_variable_programs() {
        let mut problem = MilpProblem::new();
        let x = problem.add_var("x", Domain::Continuous);
        problem.constrain(&LinExpr::var(x), Comparator::Ge, &LinExpr::constant(rat(1, 3)));
        problem.set_objective(LinExpr::var(x), Direction::Minimize);
        assert_eq!(optimize(&problem).unwrap().value, Some(rat(1, 3)));

        let mut contradictory = MilpProblem::new();
        let x = contradictory.add_var("x", Domain::Continuous);
        contradictory.constrain(&LinExpr::var(x), Comparator::Eq, &LinExpr::constant(one()));
        contradictory.constrain(&LinExpr::var(x), Comparator::Eq, &LinExpr::constant(zero()));
        contradictory.set_objective(LinExpr::var(x), Direction::Minimize);
        assert_eq!(optimize(&contradictory).unwrap().status, Status::Infeasible);
    }

    #[test]
    fn minimum_of_lattice_excluded_middle() {
        let e = minimize(&Theory::new(), &p("x \\/ ~x"), &cfg()).unwrap().unwrap();
        assert_eq!(e.value, rat(1, 2));
        assert_eq!(e.witness.value_of("x"), Some(&rat(1, 2)));
    }

    #[test]
    fn satisfiable_examples() {
        let v = satisfiable(&p("x <-> ~x"), &cfg()).unwrap().unwrap();
        assert_eq!(v.value_of("x"), Some(&rat(1, 2)));
        assert!(satisfiable(&p("x & ~x"), &cfg()).unwrap().is_none());
        let v = satisfiable(&p("q<1/3> <-> (~q<1/3>)^2"), &cfg()).unwrap().unwrap();
        assert_eq!(v.get(&crate::formula::Variable::q(rat(1, 3))), Some(&rat(1, 3)));
    }

    #[test]
    fn consequence_examples() {
        assert!(decide_consequence(&Theory::new(), &p("x -> x"), &cfg()).unwrap().holds());
        match decide_consequence(&Theory::new(), &p("x \\/ ~x"), &cfg()).unwrap() {
            Consequence::Countermodel { valuation, value } => {
                assert!(value < one());
                assert_eq!(evaluate(&p("x \\/ ~x"), &valuation).unwrap(), value);
            }
            Consequence::Holds => panic!("excluded middle is not valid"),
        }
        assert!(decide_consequence(&theory(&["x <-> ~x"]), &p("x <-> 1/2"), &cfg())
            .unwrap()
            .holds());
    }

    #[test]
    fn truth_degree_examples() {
        assert_eq!(truth_degree(&Theory::new(), &p("x \\/ ~x"), &cfg()).unwrap(), rat(1, 2));
        assert_eq!(truth_degree(&theory(&["x <-> (~x)^2"]), &p("x"), &cfg()).unwrap(), rat(1, 3));
        assert_eq!(truth_degree(&Theory::new(), &p("p"), &cfg()).unwrap(), zero());
        assert_eq!(truth_degree(&theory(&["x & ~x"]), &p("y"), &cfg()).unwrap(), one());
    }

    #[test]
    fn budgets_fail_loudly() {
        let tight = SolverConfig {
            pivot_limit: 1,
            node_limit: 1,
        };
        let err = truth_degree(&theory(&["x <-> (~x)^6"]), &p("x"), &tight).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }
}

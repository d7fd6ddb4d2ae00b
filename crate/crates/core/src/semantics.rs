//! Exact semantics over the standard MV-algebra `[0,1]` and its finite
//! subchains `{0, 1/k, ..., 1}`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::formula::{Formula, Theory, Variable};
use crate::rational::{fmt_rational, in_unit_interval, max_rat, min_rat, one, zero, Rational};

/// An assignment of truth values in `[0,1]` to variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation(BTreeMap<Variable, Rational>);

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, var: Variable, value: Rational) {
        self.0.insert(var, value);
    }

    pub fn with(mut self, name: &str, value: Rational) -> Self {
        self.insert(Variable::plain(name), value);
        self
    }

    pub fn get(&self, var: &Variable) -> Option<&Rational> {
        self.0.get(var)
    }

    pub fn value_of(&self, name: &str) -> Option<&Rational> {
        self.0.get(&Variable::plain(name))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Rational)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Keeps only the given variables.
    pub fn restrict(&self, vars: &BTreeSet<Variable>) -> Valuation {
        Valuation(
            self.0
                .iter()
                .filter(|(v, _)| vars.contains(v))
                .map(|(v, r)| (v.clone(), r.clone()))
                .collect(),
        )
    }

    /// Canonical valuation of q-variables: `q<r>` ↦ `r`.
    pub fn canonical(vars: &BTreeSet<Variable>) -> Valuation {
        Valuation(
            vars.iter()
                .filter_map(|v| v.q_index().map(|r| (v.clone(), r.clone())))
                .collect(),
        )
    }
}

impl FromIterator<(Variable, Rational)> for Valuation {
    fn from_iter<I: IntoIterator<Item = (Variable, Rational)>>(iter: I) -> Self {
        Valuation(iter.into_iter().collect())
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (v, r) in &self.0 {
            map.serialize_entry(v.name(), &fmt_rational(r))?;
        }
        map.end()
    }
}

pub fn strong_and(x: &Rational, y: &Rational) -> Rational {
    max_rat(zero(), x + y - one())
}

pub fn implication(x: &Rational, y: &Rational) -> Rational {
    min_rat(one(), one() - x + y)
}

pub fn strong_or(x: &Rational, y: &Rational) -> Rational {
    min_rat(one(), x + y)
}

pub fn negation(x: &Rational) -> Rational {
    one() - x
}

/// `x^n = max(0, n·x − (n−1))`.
pub fn power(x: &Rational, n: u64) -> Rational {
    let n = Rational::from_integer(BigInt::from(n));
    max_rat(zero(), &n * x - (n - one()))
}

/// `n·x = min(1, n·x)` under `⊕`.
pub fn multiple(x: &Rational, n: u64) -> Rational {
    min_rat(one(), Rational::from_integer(BigInt::from(n)) * x)
}

pub fn equivalence(x: &Rational, y: &Rational) -> Rational {
    one() - (x - y).abs()
}

pub fn evaluate(f: &Formula, v: &Valuation) -> Result<Rational> {
    Ok(match f {
        Formula::Const(r) => r.clone(),
        Formula::Var(x) => v
            .get(x)
            .cloned()
            .ok_or_else(|| Error::UnboundVariable(x.name().to_string()))?,
        Formula::Neg(a) => negation(&evaluate(a, v)?),
        Formula::And(a, b) => strong_and(&evaluate(a, v)?, &evaluate(b, v)?),
        Formula::Implies(a, b) => implication(&evaluate(a, v)?, &evaluate(b, v)?),
        Formula::Min(a, b) => min_rat(evaluate(a, v)?, evaluate(b, v)?),
        Formula::Max(a, b) => max_rat(evaluate(a, v)?, evaluate(b, v)?),
        Formula::Oplus(a, b) => strong_or(&evaluate(a, v)?, &evaluate(b, v)?),
        Formula::Equiv(a, b) => equivalence(&evaluate(a, v)?, &evaluate(b, v)?),
        Formula::Power(a, n) => power(&evaluate(a, v)?, *n),
        Formula::Multiple(n, a) => multiple(&evaluate(a, v)?, *n),
    })
}

/// True iff every axiom evaluates to 1.
pub fn is_model(theory: &Theory, v: &Valuation) -> Result<bool> {
    for axiom in theory {
        if !evaluate(axiom, v)?.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The finite MV-chain with `k + 1` elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainSpec {
    k: u64,
}

impl ChainSpec {
    pub fn new(k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidArgument("chain parameter k must be at least 1".into()));
        }
        Ok(ChainSpec { k })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn elements(&self) -> impl Iterator<Item = Rational> + '_ {
        (0..=self.k).map(move |j| Rational::new(BigInt::from(j), BigInt::from(self.k)))
    }

    pub fn contains(&self, value: &Rational) -> bool {
        in_unit_interval(value) && (BigInt::from(self.k) % value.denom()).is_zero()
    }
}

pub fn evaluate_on_chain(f: &Formula, chain: ChainSpec, v: &Valuation) -> Result<Rational> {
    for (var, value) in v.iter() {
        if !chain.contains(value) {
            return Err(Error::NotOnChain {
                var: var.name().to_string(),
                value: fmt_rational(value),
                k: chain.k,
            });
        }
    }
    let value = evaluate(f, v)?;
    debug_assert!(chain.contains(&value));
    Ok(value)
}

/// All chain elements `e` with `e = (¬e)^(n−1)`.
pub fn chain_unit_solutions(n: u64, chain: ChainSpec) -> Result<Vec<Rational>> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    Ok(chain
        .elements()
        .filter(|e| *e == power(&negation(e), n - 1))
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Connective {
    Strong,
    Implies,
    Oplus,
    Neg,
}

impl Connective {
    pub const ALL: [Connective; 4] = [
        Connective::Strong,
        Connective::Implies,
        Connective::Oplus,
        Connective::Neg,
    ];
}

/// How negation instances are written.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NegationForm {
    /// `~q<r> <-> q<1-r>`
    #[default]
    Equiv,
    /// `q<r> -> q<0> <-> q<1-r>`
    ImpliesZero,
}

/// Bookkeeping instances over a constant set, together with the results
/// that fell outside the set (for which no instance was emitted).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bookkeeping {
    pub theory: Theory,
    pub gaps: BTreeSet<Rational>,
}

/// Every instance `q<r> ∘ q<s> <-> q<t>` (and `¬` instances) whose result
/// `t` lies in `constants`; results outside the set are collected in
/// [`Bookkeeping::gaps`].
pub fn bookkeeping_instances(
    constants: &BTreeSet<Rational>,
    connectives: &BTreeSet<Connective>,
    negation_form: NegationForm,
) -> Result<Bookkeeping> {
    if let Some(bad) = constants.iter().find(|r| !in_unit_interval(r)) {
        return Err(Error::InvalidArgument(format!(
            "constant {} is outside [0,1]",
            fmt_rational(bad)
        )));
    }
    let mut out = Bookkeeping {
        theory: Theory::new().with_label("bookkeeping"),
        gaps: BTreeSet::new(),
    };
    let mut emit = |lhs: Formula, result: Rational| {
        if constants.contains(&result) {
            out.theory.push(lhs.equiv(Formula::q(result)));
        } else {
            out.gaps.insert(result);
        }
    };
    for conn in connectives {
        if *conn == Connective::Neg {
            for r in constants {
                let lhs = match negation_form {
                    NegationForm::Equiv => Formula::q(r.clone()).neg(),
                    NegationForm::ImpliesZero => Formula::q(r.clone()).implies(Formula::q(zero())),
                };
                emit(lhs, negation(r));
            }
            continue;
        }
        for r in constants {
            for s in constants {
                let (a, b) = (Formula::q(r.clone()), Formula::q(s.clone()));
                let (lhs, value) = match conn {
                    Connective::Strong => (a.and(b), strong_and(r, s)),
                    Connective::Implies => (a.implies(b), implication(r, s)),
                    Connective::Oplus => (a.oplus(b), strong_or(r, s)),
                    Connective::Neg => unreachable!(),
                };
                emit(lhs, value);
            }
        }
    }
    if negation_form == NegationForm::ImpliesZero
        && connectives.contains(&Connective::Neg)
        && !constants.contains(&zero())
    {
        // the `→ q<0>` form mentions q<0> itself
        out.gaps.insert(zero());
    }
    Ok(out)
}

/// Bookkeeping theory over a constant set closed under the connectives.
///
/// Fails with [`Error::BookkeepingClosure`] listing the missing results
/// when the set is not closed.
pub fn generate_bookkeeping(
    constants: &BTreeSet<Rational>,
    connectives: &BTreeSet<Connective>,
    negation_form: NegationForm,
) -> Result<Theory> {
    let out = bookkeeping_instances(constants, connectives, negation_form)?;
    if !out.gaps.is_empty() {
        return Err(Error::BookkeepingClosure {
            missing: out.gaps.into_iter().collect(),
        });
    }
    Ok(out.theory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{expand_abbreviations, ExpansionMode};
    use crate::parser::{parse_formula, render_formula};
    use crate::rational::rat;

    fn eval_text(text: &str, v: &Valuation) -> Rational {
        evaluate(&parse_formula(text).unwrap(), v).unwrap()
    }

    #[test]
    fn bookkeeping_example_value() {
        assert_eq!(eval_text("6/13 -> 5/13", &Valuation::new()), rat(12, 13));
    }

    #[test]
    fn excluded_middle_under_oplus() {
        let v = Valuation::new().with("x", rat(1, 3));
        assert_eq!(eval_text("x (+) ~x", &v), one());
    }

    #[test]
    fn power_closed_form_matches_iteration() {
        let v = Valuation::new().with("x", rat(1, 5));
        assert_eq!(eval_text("(~x)^4", &v), rat(1, 5));
        let iterated = expand_abbreviations(&parse_formula("(~x)^4").unwrap(), ExpansionMode::Full);
        assert_eq!(evaluate(&iterated, &v).unwrap(), rat(1, 5));
    }

    #[test]
    fn unbound_variable_is_an_error() {
        assert_eq!(
            evaluate(&parse_formula("x & y").unwrap(), &Valuation::new().with("x", one())),
            Err(Error::UnboundVariable("y".into()))
        );
    }

    #[test]
    fn chain_examples() {
        let f = parse_formula("x & x").unwrap();
        let v = Valuation::new().with("x", rat(1, 2));
        assert_eq!(evaluate_on_chain(&f, ChainSpec::new(2).unwrap(), &v).unwrap(), zero());

        let f = parse_formula("~x").unwrap();
        let v = Valuation::new().with("x", rat(2, 6));
        assert_eq!(evaluate_on_chain(&f, ChainSpec::new(6).unwrap(), &v).unwrap(), rat(2, 3));

        let v = Valuation::new().with("x", rat(1, 4));
        assert!(matches!(
            evaluate_on_chain(&f, ChainSpec::new(6).unwrap(), &v),
            Err(Error::NotOnChain { .. })
        ));
        assert!(ChainSpec::new(0).is_err());
    }

    #[test]
    fn chain_equation_has_unique_solution_one_third() {
        // brute force over the seven elements of the chain with k = 6
        let f = parse_formula("x <-> (~x)^2").unwrap();
        let chain = ChainSpec::new(6).unwrap();
        let hits: Vec<Rational> = chain
            .elements()
            .filter(|e| {
                let v = Valuation::new().with("x", e.clone());
                evaluate_on_chain(&f, chain, &v).unwrap().is_one()
            })
            .collect();
        assert_eq!(hits, vec![rat(1, 3)]);
    }

    #[test]
    fn chain_unit_solution_examples() {
        let sols = |n, k| chain_unit_solutions(n, ChainSpec::new(k).unwrap()).unwrap();
        assert_eq!(sols(3, 6), vec![rat(1, 3)]);
        assert!(sols(3, 5).is_empty());
        assert_eq!(sols(2, 2), vec![rat(1, 2)]);
        assert!(chain_unit_solutions(1, ChainSpec::new(3).unwrap()).is_err());
    }

    fn set(values: &[Rational]) -> BTreeSet<Rational> {
        values.iter().cloned().collect()
    }

    fn rendered(t: &Theory) -> Vec<String> {
        t.iter().map(render_formula).collect()
    }

    #[test]
    fn bookkeeping_for_implication() {
        let consts = set(&[rat(5, 13), rat(6, 13), rat(12, 13)]);
        let out = bookkeeping_instances(
            &consts,
            &[Connective::Implies].into_iter().collect(),
            NegationForm::Equiv,
        )
        .unwrap();
        assert!(rendered(&out.theory).contains(&"q<6/13> -> q<5/13> <-> q<12/13>".to_string()));
        assert!(out.gaps.contains(&one()));
    }

    #[test]
    fn bookkeeping_reports_closure_gaps() {
        let consts = set(&[rat(5, 13), rat(6, 13), rat(12, 13)]);
        let err = generate_bookkeeping(
            &consts,
            &[Connective::Implies].into_iter().collect(),
            NegationForm::Equiv,
        )
        .unwrap_err();
        match err {
            Error::BookkeepingClosure { missing } => {
                assert!(missing.contains(&one()));
                assert!(missing.contains(&rat(7, 13)));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bookkeeping_denominator_three() {
        let consts = set(&[zero(), rat(1, 3), rat(2, 3)]);
        let t = generate_bookkeeping(
            &consts,
            &[Connective::Strong].into_iter().collect(),
            NegationForm::Equiv,
        )
        .unwrap();
        let lines = rendered(&t);
        assert!(lines.contains(&"q<2/3> & q<2/3> <-> q<1/3>".to_string()));
        assert!(lines.contains(&"q<1/3> & q<2/3> <-> q<0>".to_string()));
    }

    #[test]
    fn boolean_bookkeeping() {
        let consts = set(&[zero(), one()]);
        let t = generate_bookkeeping(
            &consts,
            &[Connective::Strong, Connective::Implies].into_iter().collect(),
            NegationForm::Equiv,
        )
        .unwrap();
        assert_eq!(t.len(), 8);
        assert!(rendered(&t).contains(&"q<0> & q<1> <-> q<0>".to_string()));
    }

    #[test]
    fn negation_forms() {
        let consts = set(&[zero(), rat(1, 3), rat(2, 3), one()]);
        let neg = [Connective::Neg].into_iter().collect();
        let t = generate_bookkeeping(&consts, &neg, NegationForm::ImpliesZero).unwrap();
        assert!(rendered(&t).contains(&"q<1/3> -> q<0> <-> q<2/3>".to_string()));
        let t = generate_bookkeeping(&consts, &neg, NegationForm::Equiv).unwrap();
        assert!(rendered(&t).contains(&"~q<1/3> <-> q<2/3>".to_string()));
        let err = generate_bookkeeping(&set(&[rat(1, 2)]), &neg, NegationForm::ImpliesZero);
        assert!(err.is_err());
    }

    #[test]
    fn bookkeeping_is_valid_canonically() {
        for k in 1..=8u64 {
            let consts: BTreeSet<Rational> = ChainSpec::new(k).unwrap().elements().collect();
            let all = Connective::ALL.into_iter().collect();
            let t = generate_bookkeeping(&consts, &all, NegationForm::Equiv).unwrap();
            let v = Valuation::canonical(&t.variables());
            assert!(is_model(&t, &v).unwrap());
        }
    }
}

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::formula::Variable;
use crate::rational::{fmt_rational, zero, Rational};

/// Index of a solver variable within a [`MilpProblem`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Continuous,
    Binary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub domain: Domain,
}

/// Affine expression `Σ c_i·v_i + constant`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LinExpr {
    pub terms: BTreeMap<VarId, Rational>,
    pub constant: Rational,
}

impl LinExpr {
    pub fn constant(value: Rational) -> Self {
        LinExpr {
            terms: BTreeMap::new(),
            constant: value,
        }
    }

    pub fn var(v: VarId) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(v, Rational::one());
        LinExpr {
            terms,
            constant: zero(),
        }
    }

    pub fn as_constant(&self) -> Option<&Rational> {
        self.terms.is_empty().then_some(&self.constant)
    }

    pub fn add_term(&mut self, v: VarId, coeff: &Rational) {
        let entry = self.terms.entry(v).or_insert_with(zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&v);
        }
    }

    pub fn scale(&self, factor: &Rational) -> LinExpr {
        if factor.is_zero() {
            return LinExpr::default();
        }
        LinExpr {
            terms: self.terms.iter().map(|(v, c)| (*v, c * factor)).collect(),
            constant: &self.constant * factor,
        }
    }

    pub fn eval(&self, values: &[Rational]) -> Rational {
        self.terms
            .iter()
            .fold(self.constant.clone(), |acc, (v, c)| acc + c * &values[v.0])
    }
}

impl Add<&LinExpr> for &LinExpr {
    type Output = LinExpr;

    fn add(self, rhs: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        for (v, c) in &rhs.terms {
            out.add_term(*v, c);
        }
        out.constant += &rhs.constant;
        out
    }
}

impl Sub<&LinExpr> for &LinExpr {
    type Output = LinExpr;

    fn sub(self, rhs: &LinExpr) -> LinExpr {
        self + &(-rhs)
    }
}

impl Neg for &LinExpr {
    type Output = LinExpr;

    fn neg(self) -> LinExpr {
        self.scale(&-Rational::one())
    }
}

impl Add<Rational> for &LinExpr {
    type Output = LinExpr;

    fn add(self, rhs: Rational) -> LinExpr {
        let mut out = self.clone();
        out.constant += rhs;
        out
    }
}

impl Mul<&Rational> for &LinExpr {
    type Output = LinExpr;

    fn mul(self, rhs: &Rational) -> LinExpr {
        self.scale(rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparator {
    Le,
    Eq,
    Ge,
}

impl Comparator {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Comparator::Le => lhs <= rhs,
            Comparator::Eq => lhs == rhs,
            Comparator::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Le => "<=",
            Comparator::Eq => "=",
            Comparator::Ge => ">=",
        }
    }
}

/// `Σ coefficients·v  comparator  bound`, with at least one nonzero coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coefficients: BTreeMap<VarId, Rational>,
    pub comparator: Comparator,
    pub bound: Rational,
}

impl LinearConstraint {
    pub fn is_satisfied(&self, values: &[Rational]) -> bool {
        let lhs = self
            .coefficients
            .iter()
            .fold(zero(), |acc, (v, c)| acc + c * &values[v.0]);
        self.comparator.holds(&lhs, &self.bound)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

/// Mixed 0-1 linear program over the unit box: every variable lies in
/// `[0,1]`, binaries additionally in `{0,1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MilpProblem {
    pub vars: Vec<VarDecl>,
    pub constraints: Vec<LinearConstraint>,
    pub objective: LinExpr,
    pub direction: Direction,
    /// Formula variables and the continuous solver variable carrying each.
    pub formula_vars: BTreeMap<Variable, VarId>,
    /// Set when a constraint without variables was found to be false.
    pub trivially_infeasible: bool,
}

impl Default for MilpProblem {
    fn default() -> Self {
        MilpProblem {
            vars: Vec::new(),
            constraints: Vec::new(),
            objective: LinExpr::default(),
            direction: Direction::Minimize,
            formula_vars: BTreeMap::new(),
            trivially_infeasible: false,
        }
    }
}

impl MilpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, domain: Domain) -> VarId {
        self.vars.push(VarDecl {
            name: name.into(),
            domain,
        });
        VarId(self.vars.len() - 1)
    }

    pub fn num_binaries(&self) -> usize {
        self.vars.iter().filter(|v| v.domain == Domain::Binary).count()
    }

    pub fn num_continuous(&self) -> usize {
        self.vars.len() - self.num_binaries()
    }

    /// Adds `lhs cmp rhs`. Constraints without variables are checked
    /// immediately instead of being stored.
    pub fn constrain(&mut self, lhs: &LinExpr, comparator: Comparator, rhs: &LinExpr) {
        let diff = lhs - rhs;
        let bound = -diff.constant.clone();
        if diff.terms.is_empty() {
            if !comparator.holds(&zero(), &bound) {
                self.trivially_infeasible = true;
            }
            return;
        }
        self.constraints.push(LinearConstraint {
            coefficients: diff.terms,
            comparator,
            bound,
        });
    }

    pub fn set_objective(&mut self, objective: LinExpr, direction: Direction) {
        self.objective = objective;
        self.direction = direction;
    }

    /// Checks every declaration invariant; returns a description of the
    /// first violation.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.vars.len();
        let check = |v: &VarId| {
            if v.0 >= n {
                Err(format!("undeclared solver variable #{}", v.0))
            } else {
                Ok(())
            }
        };
        for c in &self.constraints {
            if c.coefficients.values().all(Zero::is_zero) {
                return Err("constraint without nonzero coefficient".into());
            }
            c.coefficients.keys().try_for_each(check)?;
        }
        self.objective.terms.keys().try_for_each(check)?;
        for v in self.formula_vars.values() {
            check(v)?;
            if self.vars[v.0].domain != Domain::Continuous {
                return Err("formula variable mapped to a binary".into());
            }
        }
        Ok(())
    }

    /// True iff `values` lies in the box, binaries are integral, and every
    /// constraint holds exactly.
    pub fn is_feasible(&self, values: &[Rational]) -> bool {
        if self.trivially_infeasible || values.len() != self.vars.len() {
            return false;
        }
        let in_box = values.iter().zip(&self.vars).all(|(x, decl)| {
            !x.is_negative()
                && *x <= Rational::one()
                && (decl.domain == Domain::Continuous || x.is_integer())
        });
        in_box && self.constraints.iter().all(|c| c.is_satisfied(values))
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.terms {
            write_term(f, c, &format!("v{}", v.0), first)?;
            first = false;
        }
        if first || !self.constant.is_zero() {
            if first {
                write!(f, "{}", fmt_rational(&self.constant))?;
            } else if self.constant.is_negative() {
                write!(f, " - {}", fmt_rational(&-self.constant.clone()))?;
            } else {
                write!(f, " + {}", fmt_rational(&self.constant))?;
            }
        }
        Ok(())
    }
}

pub(crate) fn write_term(
    f: &mut impl fmt::Write,
    coeff: &Rational,
    name: &str,
    first: bool,
) -> fmt::Result {
    let magnitude = coeff.abs();
    let sign = if coeff.is_negative() { "-" } else { "+" };
    if first {
        if coeff.is_negative() {
            f.write_str("-")?;
        }
    } else {
        write!(f, " {sign} ")?;
    }
    if magnitude.is_one() {
        f.write_str(name)
    } else {
        write!(f, "{} {}", fmt_rational(&magnitude), name)
    }
}

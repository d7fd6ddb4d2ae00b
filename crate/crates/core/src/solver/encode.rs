//! Formula-to-MILP encoding over the unit box.
//!
//! Every nonlinear connective gets a fresh continuous `z` and binary `b`:
//!
//! | connective | constraints |
//! |---|---|
//! | `x·y` | `z ≥ x+y−1`, `z ≤ x+y−1+b`, `z ≤ 1−b` |
//! | `x→y` | `z ≤ 1−x+y`, `z ≥ 1−x+y−b`, `z ≥ b` |
//! | `x⊕y` | `z ≤ x+y`, `z ≥ x+y−b`, `z ≥ b` |
//! | `x∧y` | `z ≤ x`, `z ≤ y`, `z ≥ x−b`, `z ≥ y−(1−b)` |
//! | `x∨y` | `z ≥ x`, `z ≥ y`, `z ≤ x+b`, `z ≤ y+(1−b)` |
//!
//! Negation and constants stay affine. `≡` becomes `(x→y)·(y→x)`. Powers
//! and multiples use a repeated-squaring (resp. doubling) chain, so their
//! encoding grows with the bit length of the exponent.
//!
//! Formulas asserted to be true (theory axioms) are encoded through their
//! top-level structure where that is linear: `a→b` true is `a ≤ b`, `a≡b`
//! true is `a = b`, `a·b` true splits into both conjuncts, and so on. The
//! set of satisfying valuations is unchanged. A true `a∨b` (or a false
//! `a∧b`) picks a side with a binary and pushes each side down under a
//! guard: its constraints are relaxed by their maximum violation over the
//! box when the side is not selected.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::formula::{Formula, Theory, Variable};
use crate::rational::{one, zero, Rational};
use crate::semantics;
use crate::solver::problem::{Comparator, Direction, Domain, LinExpr, MilpProblem, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    And,
    Implies,
    Oplus,
    Min,
    Max,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EncodingStats {
    /// Length `m + 1` of each repeated-squaring / doubling chain `y_0..y_m`.
    pub power_chains: Vec<usize>,
}

#[derive(Debug, Default)]
pub struct Encoder {
    problem: MilpProblem,
    formula_cache: HashMap<Formula, LinExpr>,
    op_cache: HashMap<(Op, LinExpr, LinExpr), LinExpr>,
    stats: EncodingStats,
    /// Switch-off indicators of the enclosing disjuncts during pushdown.
    guards: Vec<LinExpr>,
}

fn c(value: Rational) -> LinExpr {
    LinExpr::constant(value)
}

impl Encoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stats(&self) -> &EncodingStats {
        &self.stats
    }

    /// The continuous solver variable carrying a formula variable.
    pub fn var(&mut self, v: &Variable) -> VarId {
        if let Some(id) = self.problem.formula_vars.get(v) {
            return *id;
        }
        let id = self.problem.add_var(v.name(), Domain::Continuous);
        self.problem.formula_vars.insert(v.clone(), id);
        id
    }

    fn register_variables(&mut self, f: &Formula) {
        for v in f.variables() {
            self.var(&v);
        }
    }

    fn fresh(&mut self, op: Op) -> (LinExpr, LinExpr) {
        let k = self.problem.vars.len();
        let tag = match op {
            Op::And => "and",
            Op::Implies => "imp",
            Op::Oplus => "oplus",
            Op::Min => "min",
            Op::Max => "max",
        };
        let z = self.problem.add_var(format!("z{k}_{tag}"), Domain::Continuous);
        let b = self.problem.add_var(format!("b{}", k + 1), Domain::Binary);
        (LinExpr::var(z), LinExpr::var(b))
    }

    fn binary(&mut self) -> LinExpr {
        let k = self.problem.vars.len();
        LinExpr::var(self.problem.add_var(format!("b{k}"), Domain::Binary))
    }

    fn le(&mut self, lhs: &LinExpr, rhs: &LinExpr) {
        self.problem.constrain(lhs, Comparator::Le, rhs);
    }

    fn ge(&mut self, lhs: &LinExpr, rhs: &LinExpr) {
        self.problem.constrain(lhs, Comparator::Ge, rhs);
    }

    fn apply(&mut self, op: Op, x: &LinExpr, y: &LinExpr) -> LinExpr {
        if let (Some(a), Some(b)) = (x.as_constant(), y.as_constant()) {
            return c(match op {
                Op::And => semantics::strong_and(a, b),
                Op::Implies => semantics::implication(a, b),
                Op::Oplus => semantics::strong_or(a, b),
                Op::Min => a.min(b).clone(),
                Op::Max => a.max(b).clone(),
            });
        }
        if let Some(simple) = identity(op, x, y) {
            return simple;
        }
        let key = (op, x.clone(), y.clone());
        if let Some(hit) = self.op_cache.get(&key) {
            return hit.clone();
        }
        let (z, b) = self.fresh(op);
        let sum = x + y;
        match op {
            Op::And => {
                let base = &sum + -one();
                self.ge(&z, &base);
                self.le(&z, &(&base + &b));
                self.le(&z, &(&c(one()) - &b));
            }
            Op::Implies => {
                let base = &(y - x) + one();
                self.le(&z, &base);
                self.ge(&z, &(&base - &b));
                self.ge(&z, &b);
            }
            Op::Oplus => {
                self.le(&z, &sum);
                self.ge(&z, &(&sum - &b));
                self.ge(&z, &b);
            }
            Op::Min => {
                self.le(&z, x);
                self.le(&z, y);
                self.ge(&z, &(x - &b));
                self.ge(&z, &(&(y + -one()) + &b));
            }
            Op::Max => {
                self.ge(&z, x);
                self.ge(&z, y);
                self.le(&z, &(x + &b));
                self.le(&z, &(&(y + one()) - &b));
            }
        }
        self.op_cache.insert(key, z.clone());
        z
    }

    /// `f` iterated `n` times under `op` via repeated squaring/doubling.
    fn iterate(&mut self, op: Op, base: LinExpr, n: u64) -> LinExpr {
        let bits = 64 - n.leading_zeros() as usize;
        let mut chain = Vec::with_capacity(bits);
        chain.push(base);
        for i in 1..bits {
            let prev = chain[i - 1].clone();
            let next = self.apply(op, &prev, &prev);
            chain.push(next);
        }
        self.stats.power_chains.push(bits);
        let mut acc: Option<LinExpr> = None;
        for (i, y) in chain.iter().enumerate() {
            if n >> i & 1 == 1 {
                acc = Some(match acc {
                    None => y.clone(),
                    Some(a) => self.apply(op, &a, y),
                });
            }
        }
        acc.expect("n >= 1")
    }

    /// Affine expression equal to the semantic value of `f`.
    pub fn value(&mut self, f: &Formula) -> LinExpr {
        if let Some(hit) = self.formula_cache.get(f) {
            return hit.clone();
        }
        let out = match f {
            Formula::Const(r) => c(r.clone()),
            Formula::Var(v) => LinExpr::var(self.var(v)),
            Formula::Neg(a) => &c(one()) - &self.value(a),
            Formula::And(a, b) => self.binary_value(Op::And, a, b),
            Formula::Implies(a, b) => self.binary_value(Op::Implies, a, b),
            Formula::Oplus(a, b) => self.binary_value(Op::Oplus, a, b),
            Formula::Min(a, b) => self.binary_value(Op::Min, a, b),
            Formula::Max(a, b) => self.binary_value(Op::Max, a, b),
            Formula::Equiv(a, b) => {
                let (x, y) = (self.value(a), self.value(b));
                let forward = self.apply(Op::Implies, &x, &y);
                let backward = self.apply(Op::Implies, &y, &x);
                self.apply(Op::And, &forward, &backward)
            }
            Formula::Power(a, n) => {
                let x = self.value(a);
                self.iterate(Op::And, x, *n)
            }
            Formula::Multiple(n, a) => {
                let x = self.value(a);
                self.iterate(Op::Oplus, x, *n)
            }
        };
        self.formula_cache.insert(f.clone(), out.clone());
        out
    }

    fn binary_value(&mut self, op: Op, a: &Formula, b: &Formula) -> LinExpr {
        let x = self.value(a);
        let y = self.value(b);
        self.apply(op, &x, &y)
    }

    /// Adds `lhs cmp rhs`, relaxed whenever one of the active guards is
    /// switched off.
    fn require(&mut self, lhs: &LinExpr, comparator: Comparator, rhs: &LinExpr) {
        if self.guards.is_empty() {
            self.problem.constrain(lhs, comparator, rhs);
            return;
        }
        match comparator {
            Comparator::Le => self.require_nonpositive(lhs - rhs),
            Comparator::Ge => self.require_nonpositive(rhs - lhs),
            Comparator::Eq => {
                self.require_nonpositive(lhs - rhs);
                self.require_nonpositive(rhs - lhs);
            }
        }
    }

    /// `d ≤ M·Σ off` where `M` is the maximum of `d` over the unit box.
    fn require_nonpositive(&mut self, d: LinExpr) {
        let big_m = d
            .terms
            .values()
            .filter(|a| a.is_positive())
            .fold(d.constant.clone(), |acc, a| acc + a);
        if !big_m.is_positive() {
            return;
        }
        let mut slack = c(zero());
        for off in &self.guards {
            slack = &slack + &off.scale(&big_m);
        }
        self.problem.constrain(&d, Comparator::Le, &slack);
    }

    /// Asserts `a` or `b` through a selector binary, each side pushed down
    /// under its own guard.
    fn either(&mut self, a: &Formula, b: &Formula, truth: bool) {
        let s = self.binary();
        let assert = |enc: &mut Self, f: &Formula| {
            if truth {
                enc.assert_true(f)
            } else {
                enc.assert_false(f)
            }
        };
        self.guards.push(s.clone());
        assert(self, a);
        self.guards.pop();
        self.guards.push(&c(one()) - &s);
        assert(self, b);
        self.guards.pop();
    }

    /// Restricts the program to valuations giving `f` the value 1.
    pub fn assert_true(&mut self, f: &Formula) {
        self.register_variables(f);
        match f {
            Formula::Const(_) | Formula::Var(_) => {
                let x = self.value(f);
                self.require(&x, Comparator::Eq, &c(one()));
            }
            Formula::Neg(a) => self.assert_false(a),
            Formula::And(a, b) | Formula::Min(a, b) => {
                self.assert_true(a);
                self.assert_true(b);
            }
            Formula::Implies(a, b) => {
                let (x, y) = (self.value(a), self.value(b));
                self.require(&x, Comparator::Le, &y);
            }
            Formula::Equiv(a, b) => {
                let (x, y) = (self.value(a), self.value(b));
                self.require(&x, Comparator::Eq, &y);
            }
            Formula::Oplus(a, b) => {
                let (x, y) = (self.value(a), self.value(b));
                self.require(&(&x + &y), Comparator::Ge, &c(one()));
            }
            Formula::Max(a, b) => {
                if matches!(**a, Formula::Const(ref r) if r.is_one()) || matches!(**b, Formula::Const(ref r) if r.is_one()) {
                    return;
                }
                self.either(a, b, true);
            }
            Formula::Power(a, _) => self.assert_true(a),
            Formula::Multiple(n, a) => {
                let x = self.value(a);
                self.require(&x.scale(&int(*n)), Comparator::Ge, &c(one()));
            }
        }
    }

    /// Restricts the program to valuations giving `f` the value 0.
    pub fn assert_false(&mut self, f: &Formula) {
        self.register_variables(f);
        match f {
            Formula::Const(_) | Formula::Var(_) => {
                let x = self.value(f);
                self.require(&x, Comparator::Eq, &c(zero()));
            }
            Formula::Neg(a) => self.assert_true(a),
            Formula::And(a, b) => {
                let (x, y) = (self.value(a), self.value(b));
                self.require(&(&x + &y), Comparator::Le, &c(one()));
            }
            Formula::Implies(a, b) => {
                self.assert_true(a);
                self.assert_false(b);
            }
            Formula::Max(a, b) | Formula::Oplus(a, b) => {
                self.assert_false(a);
                self.assert_false(b);
            }
            Formula::Min(a, b) => {
                if matches!(**a, Formula::Const(ref r) if r.is_zero()) || matches!(**b, Formula::Const(ref r) if r.is_zero()) {
                    return;
                }
                self.either(a, b, false);
            }
            Formula::Equiv(a, b) => {
                // |x − y| = 1 forces {x, y} = {0, 1}
                let (x, y) = (self.value(a), self.value(b));
                let s = self.binary();
                self.require(&x, Comparator::Eq, &s);
                self.require(&y, Comparator::Eq, &(&c(one()) - &s));
            }
            Formula::Power(a, n) => {
                let x = self.value(a);
                self.require(&x.scale(&int(*n)), Comparator::Le, &c(int(*n) - one()));
            }
            Formula::Multiple(_, a) => self.assert_false(a),
        }
    }

    pub fn assert_theory(&mut self, theory: &Theory) {
        for axiom in theory {
            self.assert_true(axiom);
        }
    }

    pub fn finish(mut self, objective: LinExpr, direction: Direction) -> MilpProblem {
        self.problem.set_objective(objective, direction);
        self.problem
    }

    pub fn into_parts(mut self, objective: LinExpr, direction: Direction) -> (MilpProblem, EncodingStats) {
        self.problem.set_objective(objective, direction);
        (self.problem, self.stats)
    }
}

fn int(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact unit/zero laws that avoid introducing a variable.
fn identity(op: Op, x: &LinExpr, y: &LinExpr) -> Option<LinExpr> {
    let is = |e: &LinExpr, v: i32| {
        e.as_constant().is_some_and(|r| match v {
            0 => r.is_zero(),
            _ => r.is_one(),
        })
    };
    match op {
        Op::And | Op::Min => {
            if is(x, 1) {
                Some(y.clone())
            } else if is(y, 1) {
                Some(x.clone())
            } else if is(x, 0) || is(y, 0) {
                Some(c(zero()))
            } else if op == Op::Min && x == y {
                Some(x.clone())
            } else {
                None
            }
        }
        Op::Oplus | Op::Max => {
            if is(x, 0) {
                Some(y.clone())
            } else if is(y, 0) {
                Some(x.clone())
            } else if is(x, 1) || is(y, 1) {
                Some(c(one()))
            } else if op == Op::Max && x == y {
                Some(x.clone())
            } else {
                None
            }
        }
        Op::Implies => {
            if is(x, 0) || is(y, 1) || x == y {
                Some(c(one()))
            } else if is(x, 1) {
                Some(y.clone())
            } else if is(y, 0) {
                Some(&c(one()) - x)
            } else {
                None
            }
        }
    }
}

/// Program minimizing or maximizing the value of `objective` over the
/// standard models of `theory`.
pub fn encode(theory: &Theory, objective: &Formula, direction: Direction) -> MilpProblem {
    let mut enc = Encoder::new();
    enc.assert_theory(theory);
    let root = enc.value(objective);
    enc.finish(root, direction)
}

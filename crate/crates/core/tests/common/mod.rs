//! Generators, corpora and independent oracles shared by the integration
//! tests. Nothing here calls the solver.

#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use pavelka::formula::{Formula, Theory, Variable};
use pavelka::parser::parse_formula;
use pavelka::rational::{rat, Rational};
use pavelka::semantics::{evaluate, Valuation};
use pavelka::solver::{Comparator, Direction, Domain, LinExpr, MilpProblem, VarId};
use rand::Rng;

pub fn p(text: &str) -> Formula {
    parse_formula(text).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub fn theory(lines: &[&str]) -> Theory {
    lines.iter().map(|l| p(l)).collect()
}

/// Random formula with at most `size` nodes over `vars`; constant leaves have
/// denominators up to `max_den` (none when `max_den == 0`).
pub fn random_formula<R: Rng>(rng: &mut R, size: usize, vars: &[&str], max_den: i64) -> Formula {
    if size <= 1 {
        return random_leaf(rng, vars, max_den);
    }
    let unary = size == 2 || rng.gen_bool(0.3);
    if unary {
        let a = random_formula(rng, size - 1, vars, max_den);
        match rng.gen_range(0..4) {
            0 | 1 => a.neg(),
            2 => a.power(rng.gen_range(2..=3)),
            _ => a.multiple(rng.gen_range(2..=3)),
        }
    } else {
        let left = rng.gen_range(1..size - 1);
        let a = random_formula(rng, left, vars, max_den);
        let b = random_formula(rng, size - 1 - left, vars, max_den);
        match rng.gen_range(0..6) {
            0 => a.and(b),
            1 => a.implies(b),
            2 => a.min(b),
            3 => a.max(b),
            4 => a.oplus(b),
            _ => a.equiv(b),
        }
    }
}

fn random_leaf<R: Rng>(rng: &mut R, vars: &[&str], max_den: i64) -> Formula {
    if max_den == 0 || rng.gen_bool(0.6) {
        Formula::var(vars[rng.gen_range(0..vars.len())])
    } else {
        let n = rng.gen_range(1..=max_den);
        Formula::constant(rat(rng.gen_range(0..=n), n))
    }
}

/// Random valuation over `vars` with values on the chain of denominator `k`.
pub fn random_chain_valuation<R: Rng>(rng: &mut R, vars: &[&str], k: i64) -> Valuation {
    vars.iter()
        .map(|v| (Variable::plain(*v), rat(rng.gen_range(0..=k), k)))
        .collect()
}

/// Every valuation of `vars` on the chain `{0, 1/k, ..., 1}`.
pub fn chain_grid(vars: &[&str], k: i64) -> Vec<Valuation> {
    let mut out = vec![Valuation::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|base| (0..=k).map(move |i| base.clone().with(v, rat(i, k))))
            .collect();
    }
    out
}

/// A tiny 0-1 program in a shape the vertex oracle below can check.
pub fn random_tiny_milp<R: Rng>(rng: &mut R) -> MilpProblem {
    let mut problem = MilpProblem::new();
    let nc = rng.gen_range(1..=3);
    let nb = rng.gen_range(0..=2);
    let mut ids: Vec<VarId> = (0..nc).map(|i| problem.add_var(format!("x{i}"), Domain::Continuous)).collect();
    ids.extend((0..nb).map(|i| problem.add_var(format!("b{i}"), Domain::Binary)));
    let small = |rng: &mut R| rat(rng.gen_range(-3..=3), 1);
    for _ in 0..rng.gen_range(1..=6) {
        let mut lhs = LinExpr::default();
        for id in &ids {
            if rng.gen_bool(0.7) {
                lhs.add_term(*id, &small(rng));
            }
        }
        if lhs.terms.is_empty() {
            lhs.add_term(ids[0], &rat(1, 1));
        }
        let den = rng.gen_range(1..=4);
        let rhs = LinExpr::constant(rat(rng.gen_range(-2..=3 * den), den));
        let cmp = match rng.gen_range(0..5) {
            0 => Comparator::Eq,
            1 | 2 => Comparator::Le,
            _ => Comparator::Ge,
        };
        problem.constrain(&lhs, cmp, &rhs);
    }
    let mut objective = LinExpr::constant(rat(rng.gen_range(-2..=2), 2));
    for id in &ids {
        objective.add_term(*id, &small(rng));
    }
    let direction = if rng.gen_bool(0.5) { Direction::Minimize } else { Direction::Maximize };
    problem.set_objective(objective, direction);
    problem
}

/// Solves `a x = b` for square `a`; `None` when singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|r| !a[*r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
                let delta = &f * &b[col];
                b[r] -= delta;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

/// Optimal objective value by enumerating binary assignments and, for each,
/// every vertex of the continuous polytope. `None` when infeasible.
pub fn vertex_oracle(problem: &MilpProblem) -> Option<Rational> {
    if problem.trivially_infeasible {
        return None;
    }
    let n = problem.vars.len();
    let cont: Vec<usize> = (0..n).filter(|j| problem.vars[*j].domain == Domain::Continuous).collect();
    let bins: Vec<usize> = (0..n).filter(|j| problem.vars[*j].domain == Domain::Binary).collect();
    let mut best: Option<Rational> = None;
    for mask in 0..(1u32 << bins.len()) {
        let mut fixed = vec![BigRational::zero(); n];
        for (i, j) in bins.iter().enumerate() {
            if mask >> i & 1 == 1 {
                fixed[*j] = BigRational::one();
            }
        }
        // hyperplanes over the continuous variables: rows then box faces
        let mut planes: Vec<(Vec<Rational>, Rational)> = Vec::new();
        for c in &problem.constraints {
            let mut row = vec![BigRational::zero(); cont.len()];
            let mut rhs = c.bound.clone();
            for (v, a) in &c.coefficients {
                match cont.iter().position(|j| *j == v.0) {
                    Some(k) => row[k] = a.clone(),
                    None => rhs -= a * &fixed[v.0],
                }
            }
            planes.push((row, rhs));
        }
        for k in 0..cont.len() {
            for bound in [BigRational::zero(), BigRational::one()] {
                let mut row = vec![BigRational::zero(); cont.len()];
                row[k] = BigRational::one();
                planes.push((row, bound));
            }
        }
        for choice in combinations(planes.len(), cont.len()) {
            let a = choice.iter().map(|i| planes[*i].0.clone()).collect();
            let b = choice.iter().map(|i| planes[*i].1.clone()).collect();
            let Some(x) = solve_square(a, b) else { continue };
            let mut point = fixed.clone();
            for (k, j) in cont.iter().enumerate() {
                point[*j] = x[k].clone();
            }
            if !problem.is_feasible(&point) {
                continue;
            }
            let value = problem.objective.eval(&point);
            let better = match (&best, problem.direction) {
                (None, _) => true,
                (Some(b), Direction::Minimize) => value < *b,
                (Some(b), Direction::Maximize) => value > *b,
            };
            if better {
                best = Some(value);
            }
        }
    }
    best
}

/// Satisfiability corpus: `(formula, witness)` pairs whose witness gives the
/// formula value 1, and formulas that can never take value 1.
pub fn sat_corpus() -> (Vec<(Formula, Valuation)>, Vec<Formula>) {
    let half = rat(1, 2);
    let third = rat(1, 3);
    let sat_text: Vec<(&str, Vec<(&str, Rational)>)> = vec![
        ("x -> x", vec![("x", half.clone())]),
        ("x <-> ~x", vec![("x", half.clone())]),
        ("x <-> (~x)^2", vec![("x", third.clone())]),
        ("x <-> (~x)^3", vec![("x", rat(1, 4))]),
        ("x <-> (~x)^4", vec![("x", rat(1, 5))]),
        ("x \\/ ~x", vec![("x", rat(1, 1))]),
        ("x & y", vec![("x", rat(1, 1)), ("y", rat(1, 1))]),
        ("x (+) y", vec![("x", third.clone()), ("y", rat(2, 3))]),
        ("x <-> 3*y", vec![("x", rat(3, 4)), ("y", rat(1, 4))]),
        ("(x <-> ~x) & (y <-> x (+) x)", vec![("x", half.clone()), ("y", rat(1, 1))]),
        ("(x <-> ~y) & (y <-> ~x)", vec![("x", rat(1, 5)), ("y", rat(4, 5))]),
        ("~(x & ~x)", vec![("x", rat(2, 7))]),
        ("(x -> y) & (y -> z) & (z -> x)", vec![("x", third.clone()), ("y", third.clone()), ("z", third.clone())]),
        ("x^2 <-> y", vec![("x", rat(3, 4)), ("y", half.clone())]),
        ("(x /\\ y) <-> ~(x \\/ y)", vec![("x", half.clone()), ("y", half.clone())]),
        ("~(2*x) & ~(x (+) x (+) x)", vec![("x", rat(0, 1))]),
        ("(x <-> (~x)^2) & (y <-> x (+) x)", vec![("x", third.clone()), ("y", rat(2, 3))]),
        ("(x <-> ~x) & (y <-> x & x)", vec![("x", half.clone()), ("y", rat(0, 1))]),
        ("(x -> ~x) & (~x -> x)", vec![("x", half.clone())]),
        ("(x & y) <-> (x /\\ y)", vec![("x", rat(1, 1)), ("y", rat(1, 3))]),
        ("z <-> (x -> y)", vec![("x", rat(2, 3)), ("y", third.clone()), ("z", rat(2, 3))]),
        ("(x (+) y) & (x <-> y) & (x <-> ~y)", vec![("x", half.clone()), ("y", half.clone())]),
        ("(x <-> (~x)^5) & (y <-> 6*x)", vec![("x", rat(1, 6)), ("y", rat(1, 1))]),
        ("(~x)^2 <-> x", vec![("x", third.clone())]),
        ("(x <-> y) & (y <-> z) & (z <-> ~x)", vec![("x", half.clone()), ("y", half.clone()), ("z", half)]),
    ];
    let sat = sat_text
        .into_iter()
        .map(|(f, w)| {
            let v = w.into_iter().fold(Valuation::new(), |acc, (n, r)| acc.with(n, r));
            (p(f), v)
        })
        .collect();
    // each is identically below 1 or over-constrained
    let unsat = [
        "x & ~x",
        "(x & y) & ~(x /\\ y)",
        "(x <-> ~x) & (x <-> (~x)^2)",
        "(x <-> ~x) & (x -> 0)",
        "(x <-> ~x) & (~x)^2",
        "x^2 & ~x",
        "(x (+) y)^3 & ~(x (+) y)",
        "(x <-> (~x)^2) & (x <-> (~x)^4)",
        "(x <-> ~x) & (y <-> (~y)^2) & (x <-> y)",
        "((x -> y) & ~y) & x",
        "(x <-> ~x) & (x <-> 1)",
        "y & ~y & x",
        "(x \\/ y) & ~x & ~y",
        "(x /\\ ~x) & (x <-> ~x) & ~(x (+) x)",
        "(x <-> ~x) & (x <-> 3*x)",
        "(x <-> (~x)^2) & 2*x & ~(x (+) x)",
        "z & (z <-> x & ~x)",
        "(x -> 0) & (~x -> 0)",
        "(x <-> y) & (y <-> ~y) & (x <-> (~x)^3)",
        "(x & x) & ~x",
        "~(x -> x)",
        "(x <-> ~x) & (y <-> ~y) & ~(x <-> y)",
        "(x <-> (~x)^2) & (x (+) x (+) x) & ~(x (+) x)",
        "(x <-> 1) & (y <-> 0) & (x -> y)",
        "(x <-> ~x) & ~(x (+) x)",
    ]
    .iter()
    .map(|f| p(f))
    .collect();
    (sat, unsat)
}

/// Checks a satisfiability witness with the plain evaluator.
pub fn witness_checks(f: &Formula, v: &Valuation) -> bool {
    evaluate(f, v).is_ok_and(|r| r.is_one())
}

pub fn nonnegative(r: &Rational) -> bool {
    !r.is_negative()
}

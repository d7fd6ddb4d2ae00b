//! Depth-first branch and bound on the binary variables, with activity-based
//! bound propagation at every node and warm-started LP relaxations.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::semantics::Valuation;
use crate::solver::num::Num;
use crate::solver::problem::{Comparator, Direction, Domain, MilpProblem};
use crate::solver::simplex::{Lp, LpStatus, PivotBudget};

const PROPAGATION_ROUNDS: usize = 6;

/// Resource limits; exceeding either is reported as
/// [`Error::BudgetExceeded`], never as an answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SolverConfig {
    pub pivot_limit: u64,
    pub node_limit: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            pivot_limit: 20_000_000,
            node_limit: 2_000_000,
        }
    }
}

impl SolverConfig {
    /// Defaults overridden by `PAVELKA_PIVOT_LIMIT` / `PAVELKA_NODE_LIMIT`.
    pub fn from_env() -> Self {
        let mut cfg = SolverConfig::default();
        let read = |key: &str| std::env::var(key).ok().and_then(|v| v.trim().parse().ok());
        if let Some(v) = read("PAVELKA_PIVOT_LIMIT") {
            cfg.pivot_limit = v;
        }
        if let Some(v) = read("PAVELKA_NODE_LIMIT") {
            cfg.node_limit = v;
        }
        cfg
    }
}

/// What the search has to establish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// The exact optimum.
    Optimum,
    /// Any solution strictly better than the given objective value, or a
    /// proof that none exists.
    StrictlyBetter(Rational),
    /// Any feasible solution; the objective is ignored.
    AnyFeasible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    Infeasible,
    /// A solution meeting a [`Target::StrictlyBetter`] or
    /// [`Target::AnyFeasible`] request.
    Found,
    /// No solution strictly better than the requested value exists.
    NoImprovement,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveStats {
    pub nodes: u64,
    pub pivots: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OptimizationOutcome {
    pub status: Status,
    pub value: Option<Rational>,
    /// Values of all solver variables.
    pub solution: Option<Vec<Rational>>,
    /// Solution restricted to the formula variables.
    pub witness: Option<Valuation>,
    pub stats: SolveStats,
}

impl OptimizationOutcome {
    pub fn has_solution(&self) -> bool {
        self.solution.is_some()
    }
}

pub fn optimize(problem: &MilpProblem) -> Result<OptimizationOutcome> {
    optimize_with(problem, &SolverConfig::default(), Target::Optimum)
}

struct Node {
    lp: Lp,
    lower: Vec<Num>,
    upper: Vec<Num>,
}

/// A constraint as `Σ a·x ≤ b` in kernel numbers.
struct Half {
    terms: Vec<(usize, Num)>,
    bound: Num,
}

fn halves(problem: &MilpProblem) -> Vec<Half> {
    let mut out = Vec::new();
    for c in &problem.constraints {
        let senses: &[bool] = match c.comparator {
            Comparator::Le => &[true],
            Comparator::Ge => &[false],
            Comparator::Eq => &[true, false],
        };
        for &le in senses {
            let flip = |x: Num| if le { x } else { -x };
            out.push(Half {
                terms: c.coefficients.iter().map(|(v, a)| (v.0, flip(Num::from(a)))).collect(),
                bound: flip(Num::from(&c.bound)),
            });
        }
    }
    out
}

pub fn optimize_with(
    problem: &MilpProblem,
    config: &SolverConfig,
    target: Target,
) -> Result<OptimizationOutcome> {
    problem.validate().map_err(Error::Internal)?;
    let n = problem.vars.len();
    let mut stats = SolveStats::default();
    let none_found = |stats: SolveStats, target: &Target| OptimizationOutcome {
        status: match target {
            Target::StrictlyBetter(_) => Status::NoImprovement,
            _ => Status::Infeasible,
        },
        value: None,
        solution: None,
        witness: None,
        stats,
    };
    if problem.trivially_infeasible {
        return Ok(none_found(stats, &target));
    }

    // internal form: minimize sign·objective
    let sign = match problem.direction {
        Direction::Minimize => Num::ONE,
        Direction::Maximize => -Num::ONE,
    };
    let cost: BTreeMap<usize, Rational> = if target == Target::AnyFeasible {
        BTreeMap::new()
    } else {
        problem
            .objective
            .terms
            .iter()
            .map(|(v, c)| (v.0, (&Num::from(c) * &sign).to_rational()))
            .collect()
    };
    let internal_constant = &Num::from(&problem.objective.constant) * &sign;
    let mut cutoff: Option<Num> = match &target {
        Target::StrictlyBetter(t) => Some(&Num::from(t) * &sign),
        _ => None,
    };
    let rows = halves(problem);
    let binary: Vec<bool> = problem.vars.iter().map(|d| d.domain == Domain::Binary).collect();

    let binaries: Vec<usize> = (0..n)
        .filter(|j| problem.vars[*j].domain == Domain::Binary)
        .collect();
    let mut budget = PivotBudget {
        used: 0,
        limit: config.pivot_limit,
    };
    let mut best: Option<Vec<Num>> = None;
    let mut stack = vec![Node {
        lp: Lp::new(n, &problem.constraints, &cost),
        lower: vec![Num::ZERO; n],
        upper: vec![Num::ONE; n],
    }];

    while let Some(mut node) = stack.pop() {
        stats.nodes += 1;
        if stats.nodes > config.node_limit {
            return Err(Error::BudgetExceeded {
                what: "node",
                limit: config.node_limit,
            });
        }
        if !propagate(&rows, &binary, &mut node.lower, &mut node.upper) {
            continue;
        }
        for j in 0..n {
            let (lo, hi) = node.lp.bounds(j);
            if lo.as_ref() != Some(&node.lower[j]) || hi.as_ref() != Some(&node.upper[j]) {
                node.lp
                    .set_bounds(j, node.lower[j].clone(), node.upper[j].clone());
            }
        }
        if node.lp.solve(&mut budget)? == LpStatus::Infeasible {
            continue;
        }
        let bound = node.lp.objective() + &internal_constant;
        if cutoff.as_ref().is_some_and(|c| bound >= *c) {
            continue;
        }
        let values = node.lp.values();
        let half = Num::Small(1, 2);
        let branch_var = binaries
            .iter()
            .filter(|j| !values[**j].is_integer())
            .min_by(|a, b| {
                let da = (&values[**a] - &half).abs();
                let db = (&values[**b] - &half).abs();
                da.cmp(&db).then(a.cmp(b))
            })
            .copied();
        match branch_var {
            None => {
                let solution = values.to_vec();
                best = Some(solution);
                cutoff = Some(bound);
                if target != Target::Optimum {
                    break;
                }
            }
            Some(j) => {
                let preferred = if values[j] >= half { Num::ONE } else { Num::ZERO };
                let other = &Num::ONE - &preferred;
                let mut second = Node {
                    lp: node.lp.clone(),
                    lower: node.lower.clone(),
                    upper: node.upper.clone(),
                };
                second.lower[j] = other.clone();
                second.upper[j] = other;
                node.lower[j] = preferred.clone();
                node.upper[j] = preferred;
                stack.push(second);
                stack.push(node);
            }
        }
    }
    stats.pivots = budget.used;

    let Some(solution) = best else {
        return Ok(none_found(stats, &target));
    };
    let solution: Vec<Rational> = solution.iter().map(Num::to_rational).collect();
    if !problem.is_feasible(&solution) {
        return Err(Error::Internal("returned point violates the program".into()));
    }
    let value = problem.objective.eval(&solution);
    let witness = problem
        .formula_vars
        .iter()
        .map(|(v, id)| (v.clone(), solution[id.0].clone()))
        .collect();
    Ok(OptimizationOutcome {
        status: match target {
            Target::Optimum => Status::Optimal,
            _ => Status::Found,
        },
        value: Some(value),
        solution: Some(solution),
        witness: Some(witness),
        stats,
    })
}

/// Tightens variable bounds from constraint activities. Binaries are rounded
/// inward. Returns `false` when some constraint cannot be met.
fn propagate(rows: &[Half], binary: &[bool], lower: &mut [Num], upper: &mut [Num]) -> bool {
    for _ in 0..PROPAGATION_ROUNDS {
        let mut changed = false;
        for row in rows {
            let mut min_activity = Num::ZERO;
            for (j, a) in &row.terms {
                let x = if a.is_positive() { &lower[*j] } else { &upper[*j] };
                if !x.is_zero() {
                    min_activity += a * x;
                }
            }
            let slack = &row.bound - &min_activity;
            if slack.is_negative() {
                return false;
            }
            for (j, a) in &row.terms {
                let j = *j;
                if a.is_positive() {
                    let mut cap = &lower[j] + &(&slack / a);
                    if binary[j] && cap < Num::ONE && !cap.is_negative() {
                        cap = Num::ZERO;
                    }
                    if cap < upper[j] {
                        if cap < lower[j] {
                            return false;
                        }
                        upper[j] = cap;
                        changed = true;
                    }
                } else {
                    let mut floor = &upper[j] + &(&slack / a);
                    if binary[j] && floor.is_positive() && floor < Num::ONE {
                        floor = Num::ONE;
                    }
                    if floor > lower[j] {
                        if floor > upper[j] {
                            return false;
                        }
                        lower[j] = floor;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    true
}

//! Bounded-variable primal simplex over exact rationals.
//!
//! The tableau is kept row-wise in sparse form. Each row carries a unit
//! entry for its basic column. Nonbasic columns always sit at one of their
//! finite bounds; basic values are tracked explicitly and may be out of
//! bounds, in which case the composite phase one (minimize the sum of
//! infeasibilities) runs before the real objective is considered.
//!
//! Pricing is Dantzig's rule; after a run of degenerate pivots it falls back
//! to Bland's rule (lowest eligible index, lowest leaving index on ties),
//! which rules out cycling.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::solver::num::Num;
use crate::solver::problem::{Comparator, LinearConstraint};

type Row = Vec<(usize, Num)>;

const DEGENERATE_RUN_BEFORE_BLAND: u32 = 32;

/// Pivot budget shared across all LPs of one solve.
#[derive(Debug)]
pub(crate) struct PivotBudget {
    pub used: u64,
    pub limit: u64,
}

impl PivotBudget {
    fn spend(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.limit {
            return Err(Error::BudgetExceeded {
                what: "pivot",
                limit: self.limit,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Clone, Debug)]
pub(crate) struct Lp {
    structural: usize,
    rows: Vec<Row>,
    basis: Vec<usize>,
    row_of: Vec<Option<usize>>,
    lower: Vec<Option<Num>>,
    upper: Vec<Option<Num>>,
    value: Vec<Num>,
    cost: Vec<Num>,
}

fn entry(row: &Row, col: usize) -> Option<&Num> {
    row.binary_search_by_key(&col, |(c, _)| *c)
        .ok()
        .map(|i| &row[i].1)
}

/// `target − factor·source`, dropping zeros.
fn eliminate(target: &Row, factor: &Num, source: &Row) -> Row {
    let mut out = Vec::with_capacity(target.len() + source.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < source.len() {
        let take_target = j >= source.len() || (i < target.len() && target[i].0 < source[j].0);
        let take_source = i >= target.len() || (j < source.len() && source[j].0 < target[i].0);
        if take_target {
            out.push(target[i].clone());
            i += 1;
        } else if take_source {
            out.push((source[j].0, -(factor * &source[j].1)));
            j += 1;
        } else {
            let v = &target[i].1 - factor * &source[j].1;
            if !v.is_zero() {
                out.push((target[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl Lp {
    /// Columns `0..structural` are the problem variables with bounds
    /// `[0,1]`; one slack column per constraint follows.
    pub fn new(structural: usize, constraints: &[LinearConstraint], cost: &BTreeMap<usize, Rational>) -> Lp {
        let m = constraints.len();
        let ncols = structural + m;
        let mut lower = vec![Some(Num::ZERO); ncols];
        let mut upper = vec![Some(Num::ONE); ncols];
        let mut value = vec![Num::ZERO; ncols];
        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut row_of = vec![None; ncols];
        for (i, c) in constraints.iter().enumerate() {
            let slack = structural + i;
            let mut row: Row = c
                .coefficients
                .iter()
                .filter(|(_, a)| !a.is_zero())
                .map(|(v, a)| (v.0, Num::from(a)))
                .collect();
            row.push((slack, Num::ONE));
            rows.push(row);
            basis.push(slack);
            row_of[slack] = Some(i);
            match c.comparator {
                Comparator::Le => upper[slack] = None,
                Comparator::Ge => {
                    lower[slack] = None;
                    upper[slack] = Some(Num::ZERO);
                }
                Comparator::Eq => upper[slack] = Some(Num::ZERO),
            }
            // structurals start at 0, so the slack absorbs the whole bound
            value[slack] = Num::from(&c.bound);
        }
        let mut dense_cost = vec![Num::ZERO; ncols];
        for (j, c) in cost {
            dense_cost[*j] = Num::from(c);
        }
        Lp {
            structural,
            rows,
            basis,
            row_of,
            lower,
            upper,
            value,
            cost: dense_cost,
        }
    }

    pub fn values(&self) -> &[Num] {
        &self.value[..self.structural]
    }

    pub fn objective(&self) -> Num {
        self.cost
            .iter()
            .zip(&self.value)
            .filter(|(c, _)| !c.is_zero())
            .fold(Num::ZERO, |acc, (c, x)| acc + c * x)
    }

    pub fn bounds(&self, col: usize) -> (&Option<Num>, &Option<Num>) {
        (&self.lower[col], &self.upper[col])
    }

    fn column(&self, col: usize) -> Vec<(usize, Num)> {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| entry(r, col).map(|a| (i, a.clone())))
            .collect()
    }

    /// Moves a variable's bounds. Nonbasic variables are kept on a bound and
    /// the basic values are updated accordingly.
    pub fn set_bounds(&mut self, col: usize, lo: Num, hi: Num) {
        self.lower[col] = Some(lo.clone());
        self.upper[col] = Some(hi.clone());
        if self.row_of[col].is_some() {
            return;
        }
        let old = self.value[col].clone();
        let new = if old <= lo {
            lo
        } else if old >= hi {
            hi
        } else {
            lo
        };
        let delta = &new - &old;
        if delta.is_zero() {
            return;
        }
        self.value[col] = new;
        for (i, a) in self.column(col) {
            let b = self.basis[i];
            self.value[b] -= &a * &delta;
        }
    }

    fn is_below(&self, col: usize) -> bool {
        self.lower[col].as_ref().is_some_and(|l| self.value[col] < *l)
    }

    fn is_above(&self, col: usize) -> bool {
        self.upper[col].as_ref().is_some_and(|u| self.value[col] > *u)
    }

    fn can_increase(&self, col: usize) -> bool {
        self.upper[col].as_ref().is_none_or(|u| self.value[col] < *u)
    }

    fn can_decrease(&self, col: usize) -> bool {
        self.lower[col].as_ref().is_none_or(|l| self.value[col] > *l)
    }

    /// Reduced costs of nonbasic columns under the current phase.
    fn reduced_costs(&self, phase_one: bool) -> BTreeMap<usize, Num> {
        let mut d: BTreeMap<usize, Num> = BTreeMap::new();
        if phase_one {
            for (i, row) in self.rows.iter().enumerate() {
                let b = self.basis[i];
                let g = if self.is_below(b) {
                    -Num::ONE
                } else if self.is_above(b) {
                    Num::ONE
                } else {
                    continue;
                };
                for (j, a) in row {
                    if *j != b {
                        *d.entry(*j).or_insert(Num::ZERO) -= &g * a;
                    }
                }
            }
        } else {
            for (j, c) in self.cost.iter().enumerate() {
                if !c.is_zero() && self.row_of[j].is_none() {
                    d.insert(j, c.clone());
                }
            }
            for (i, row) in self.rows.iter().enumerate() {
                let b = self.basis[i];
                let cb = &self.cost[b];
                if cb.is_zero() {
                    continue;
                }
                for (j, a) in row {
                    if *j != b {
                        *d.entry(*j).or_insert(Num::ZERO) -= cb * a;
                    }
                }
            }
        }
        d
    }

    pub fn solve(&mut self, budget: &mut PivotBudget) -> Result<LpStatus> {
        let mut degenerate_run = 0u32;
        loop {
            let phase_one = (0..self.rows.len()).any(|i| {
                let b = self.basis[i];
                self.is_below(b) || self.is_above(b)
            });
            let d = self.reduced_costs(phase_one);
            let bland = degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND;
            let mut choice: Option<(usize, i8, Num)> = None;
            for (j, dj) in &d {
                let dir = if dj.is_negative() && self.can_increase(*j) {
                    1
                } else if dj.is_positive() && self.can_decrease(*j) {
                    -1
                } else {
                    continue;
                };
                let score = dj.abs();
                let better = match &choice {
                    None => true,
                    Some((_, _, best)) => !bland && score > *best,
                };
                if better {
                    choice = Some((*j, dir, score));
                }
                if bland {
                    break;
                }
            }
            let Some((enter, dir, _)) = choice else {
                return Ok(if phase_one {
                    LpStatus::Infeasible
                } else {
                    LpStatus::Optimal
                });
            };

            let col = self.column(enter);
            // (step, row index) of the tightest basic limit
            let mut limit: Option<(Num, usize)> = None;
            for (i, a) in &col {
                let b = self.basis[*i];
                let rate = if dir > 0 { -a.clone() } else { a.clone() };
                let x = &self.value[b];
                let bound_step = if self.is_below(b) {
                    rate.is_positive()
                        .then(|| (self.lower[b].as_ref().unwrap() - x) / &rate)
                } else if self.is_above(b) {
                    rate.is_negative()
                        .then(|| (x - self.upper[b].as_ref().unwrap()) / -&rate)
                } else if rate.is_negative() {
                    self.lower[b].as_ref().map(|l| (x - l) / -&rate)
                } else {
                    self.upper[b].as_ref().map(|u| (u - x) / &rate)
                };
                if let Some(step) = bound_step {
                    let tighter = match &limit {
                        None => true,
                        Some((best, bi)) => {
                            step < *best || (step == *best && b < self.basis[*bi])
                        }
                    };
                    if tighter {
                        limit = Some((step, *i));
                    }
                }
            }
            let own = if dir > 0 {
                self.upper[enter].as_ref().map(|u| u - &self.value[enter])
            } else {
                self.lower[enter].as_ref().map(|l| &self.value[enter] - l)
            };
            let (step, leaving) = match (own, limit) {
                (Some(o), Some((s, i))) => {
                    if o <= s {
                        (o, None)
                    } else {
                        (s, Some(i))
                    }
                }
                (Some(o), None) => (o, None),
                (None, Some((s, i))) => (s, Some(i)),
                (None, None) => {
                    return Err(Error::Internal(
                        "unbounded direction in a bounded program".into(),
                    ))
                }
            };

            budget.spend()?;
            if step.is_zero() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
                let signed = if dir > 0 { step.clone() } else { -step.clone() };
                self.value[enter] += &signed;
                for (i, a) in &col {
                    let b = self.basis[*i];
                    self.value[b] -= a * &signed;
                }
            }
            if let Some(r) = leaving {
                self.pivot(r, enter);
            }
        }
    }

    fn pivot(&mut self, r: usize, enter: usize) {
        let p = entry(&self.rows[r], enter).expect("pivot entry").clone();
        let inv = p.recip();
        for (_, a) in self.rows[r].iter_mut() {
            *a *= &inv;
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            if let Some(f) = entry(&self.rows[i], enter).cloned() {
                self.rows[i] = eliminate(&self.rows[i], &f, &pivot_row);
            }
        }
        self.rows[r] = pivot_row;
        let out = self.basis[r];
        self.row_of[out] = None;
        self.row_of[enter] = Some(r);
        self.basis[r] = enter;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::solver::problem::VarId;

    fn constraint(coeffs: &[(usize, Rational)], cmp: Comparator, bound: Rational) -> LinearConstraint {
        LinearConstraint {
            coefficients: coeffs.iter().map(|(v, c)| (VarId(*v), c.clone())).collect(),
            comparator: cmp,
            bound,
        }
    }

    fn budget() -> PivotBudget {
        PivotBudget {
            used: 0,
            limit: 10_000,
        }
    }

    #[test]
    fn one_variable_lower_bound() {
        let cs = vec![constraint(&[(0, rat(1, 1))], Comparator::Ge, rat(1, 3))];
        let cost = [(0, rat(1, 1))].into_iter().collect();
        let mut lp = Lp::new(1, &cs, &cost);
        assert_eq!(lp.solve(&mut budget()).unwrap(), LpStatus::Optimal);
        assert_eq!(lp.objective().to_rational(), rat(1, 3));
    }

    #[test]
    fn contradictory_equalities() {
        let cs = vec![
            constraint(&[(0, rat(1, 1))], Comparator::Eq, rat(1, 1)),
            constraint(&[(0, rat(1, 1))], Comparator::Eq, rat(0, 1)),
        ];
        let mut lp = Lp::new(1, &cs, &BTreeMap::new());
        assert_eq!(lp.solve(&mut budget()).unwrap(), LpStatus::Infeasible);
    }

    #[test]
    fn two_variable_program() {
        // max x + y s.t. x + 2y <= 1, 3x + y <= 1  -> x = 1/5, y = 2/5
        let cs = vec![
            constraint(&[(0, rat(1, 1)), (1, rat(2, 1))], Comparator::Le, rat(1, 1)),
            constraint(&[(0, rat(3, 1)), (1, rat(1, 1))], Comparator::Le, rat(1, 1)),
        ];
        let cost = [(0, rat(-1, 1)), (1, rat(-1, 1))].into_iter().collect();
        let mut lp = Lp::new(2, &cs, &cost);
        assert_eq!(lp.solve(&mut budget()).unwrap(), LpStatus::Optimal);
        assert_eq!(lp.values(), &[Num::from(&rat(1, 5)), Num::from(&rat(2, 5))]);
    }

    #[test]
    fn warm_start_after_bound_change() {
        let cs = vec![constraint(&[(0, rat(1, 1)), (1, rat(1, 1))], Comparator::Ge, rat(1, 1))];
        let cost = [(0, rat(2, 1)), (1, rat(1, 1))].into_iter().collect();
        let mut lp = Lp::new(2, &cs, &cost);
        let mut b = budget();
        assert_eq!(lp.solve(&mut b).unwrap(), LpStatus::Optimal);
        assert_eq!(lp.objective(), Num::ONE);
        lp.set_bounds(1, Num::ZERO, Num::Small(1, 2));
        assert_eq!(lp.solve(&mut b).unwrap(), LpStatus::Optimal);
        assert_eq!(lp.objective(), Num::Small(3, 2));
        lp.set_bounds(0, Num::ZERO, Num::ZERO);
        assert_eq!(lp.solve(&mut b).unwrap(), LpStatus::Infeasible);
    }

    #[test]
    fn budget_is_enforced() {
        let cs = vec![constraint(&[(0, rat(1, 1))], Comparator::Ge, rat(1, 3))];
        let cost = [(0, rat(1, 1))].into_iter().collect();
        let mut lp = Lp::new(1, &cs, &cost);
        let mut b = PivotBudget { used: 0, limit: 0 };
        assert!(matches!(lp.solve(&mut b), Err(Error::BudgetExceeded { .. })));
    }
}

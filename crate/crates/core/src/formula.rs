//! Formulas of Łukasiewicz logic and Rational Pavelka logic, theories, and
//! abbreviation expansion.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{fmt_rational, Rational};

/// Prefix of the reserved namespace for auxiliary variables: `aux<scope>_<label>`.
pub const AUX_PREFIX: &str = "aux";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    Plain,
    /// A variable standing for a rational truth constant, written `q<m/n>`.
    QConst(Rational),
    /// Auxiliary variable from a fresh pool; `scope` keeps pools disjoint.
    Auxiliary { scope: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    name: String,
    kind: VarKind,
}

impl Variable {
    /// A plain variable. Names in the `q<..>` or `aux<N>_` namespaces are
    /// classified accordingly.
    pub fn plain(name: impl Into<String>) -> Self {
        let name = name.into();
        match aux_scope_of(&name) {
            Some(scope) => Variable {
                name,
                kind: VarKind::Auxiliary { scope },
            },
            None => Variable {
                name,
                kind: VarKind::Plain,
            },
        }
    }

    pub fn q(value: Rational) -> Self {
        Variable {
            name: format!("q<{}>", fmt_rational(&value)),
            kind: VarKind::QConst(value),
        }
    }

    pub fn aux(scope: u32, label: &str) -> Self {
        Variable {
            name: format!("{AUX_PREFIX}{scope}_{label}"),
            kind: VarKind::Auxiliary { scope },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &VarKind {
        &self.kind
    }

    pub fn is_plain(&self) -> bool {
        matches!(self.kind, VarKind::Plain)
    }

    pub fn q_index(&self) -> Option<&Rational> {
        match &self.kind {
            VarKind::QConst(r) => Some(r),
            _ => None,
        }
    }

    pub fn aux_scope(&self) -> Option<u32> {
        match self.kind {
            VarKind::Auxiliary { scope } => Some(scope),
            _ => None,
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn aux_scope_of(name: &str) -> Option<u32> {
    let rest = name.strip_prefix(AUX_PREFIX)?;
    let digits_end = rest.find(|c: char| !c.is_ascii_digit())?;
    if digits_end == 0 || !rest[digits_end..].starts_with('_') {
        return None;
    }
    rest[..digits_end].parse().ok()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Const(Rational),
    Var(Variable),
    Neg(Box<Formula>),
    /// Strong conjunction `·` (the Łukasiewicz t-norm), written `&`.
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// Weak conjunction `∧`, written `/\`.
    Min(Box<Formula>, Box<Formula>),
    /// Weak disjunction `∨`, written `\/`.
    Max(Box<Formula>, Box<Formula>),
    /// Strong disjunction `⊕`, written `(+)`.
    Oplus(Box<Formula>, Box<Formula>),
    Equiv(Box<Formula>, Box<Formula>),
    /// `φ^n`, n ≥ 1.
    Power(Box<Formula>, u64),
    /// `nφ`, n ≥ 1.
    Multiple(u64, Box<Formula>),
}

impl Formula {
    pub fn constant(value: Rational) -> Self {
        Formula::Const(value)
    }

    pub fn zero() -> Self {
        Formula::Const(Rational::zero())
    }

    pub fn one() -> Self {
        Formula::Const(Rational::one())
    }

    pub fn var(name: &str) -> Self {
        Formula::Var(Variable::plain(name))
    }

    pub fn of(v: Variable) -> Self {
        Formula::Var(v)
    }

    pub fn q(value: Rational) -> Self {
        Formula::Var(Variable::q(value))
    }

    pub fn neg(self) -> Self {
        Formula::Neg(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Self {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn min(self, other: Formula) -> Self {
        Formula::Min(Box::new(self), Box::new(other))
    }

    pub fn max(self, other: Formula) -> Self {
        Formula::Max(Box::new(self), Box::new(other))
    }

    pub fn oplus(self, other: Formula) -> Self {
        Formula::Oplus(Box::new(self), Box::new(other))
    }

    pub fn equiv(self, other: Formula) -> Self {
        Formula::Equiv(Box::new(self), Box::new(other))
    }

    /// # Panics
    /// Panics if `n == 0`.
    pub fn power(self, n: u64) -> Self {
        assert!(n >= 1, "power exponent must be at least 1");
        Formula::Power(Box::new(self), n)
    }

    /// # Panics
    /// Panics if `n == 0`.
    pub fn multiple(self, n: u64) -> Self {
        assert!(n >= 1, "multiple must be at least 1");
        Formula::Multiple(n, Box::new(self))
    }

    /// Children in left-to-right order.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Const(_) | Formula::Var(_) => vec![],
            Formula::Neg(a) | Formula::Power(a, _) | Formula::Multiple(_, a) => vec![a],
            Formula::And(a, b)
            | Formula::Implies(a, b)
            | Formula::Min(a, b)
            | Formula::Max(a, b)
            | Formula::Oplus(a, b)
            | Formula::Equiv(a, b) => vec![a, b],
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Number of nodes after fully expanding powers and multiples into
    /// iterated `·` and `⊕` (saturating).
    pub fn expanded_size(&self) -> u128 {
        match self {
            Formula::Power(a, n) | Formula::Multiple(n, a) => {
                let n = *n as u128;
                a.expanded_size()
                    .saturating_mul(n)
                    .saturating_add(n - 1)
            }
            _ => self
                .children()
                .iter()
                .fold(1u128, |acc, c| acc.saturating_add(c.expanded_size())),
        }
    }

    /// True iff every constant is `0` or `1`.
    pub fn is_lukasiewicz(&self) -> bool {
        match self {
            Formula::Const(r) => r.is_zero() || r.is_one(),
            _ => self.children().iter().all(|c| c.is_lukasiewicz()),
        }
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.collect(&mut out, &mut BTreeSet::new());
        out
    }

    /// Constants other than `0` and `1`.
    pub fn constants(&self) -> BTreeSet<Rational> {
        let mut out = BTreeSet::new();
        self.collect(&mut BTreeSet::new(), &mut out);
        out
    }

    fn collect(&self, vars: &mut BTreeSet<Variable>, consts: &mut BTreeSet<Rational>) {
        match self {
            Formula::Var(v) => {
                vars.insert(v.clone());
            }
            Formula::Const(r) => {
                if !r.is_zero() && !r.is_one() {
                    consts.insert(r.clone());
                }
            }
            _ => {
                for c in self.children() {
                    c.collect(vars, consts);
                }
            }
        }
    }

    pub fn occurs(&self, v: &Variable) -> bool {
        match self {
            Formula::Var(w) => w == v,
            _ => self.children().iter().any(|c| c.occurs(v)),
        }
    }

    /// Rebuilds the formula bottom-up, letting `leaf` replace variable and
    /// constant nodes.
    pub fn map_leaves(&self, leaf: &mut impl FnMut(&Formula) -> Option<Formula>) -> Formula {
        if let Some(replacement) = leaf(self) {
            return replacement;
        }
        match self {
            Formula::Const(_) | Formula::Var(_) => self.clone(),
            Formula::Neg(a) => a.map_leaves(leaf).neg(),
            Formula::And(a, b) => a.map_leaves(leaf).and(b.map_leaves(leaf)),
            Formula::Implies(a, b) => a.map_leaves(leaf).implies(b.map_leaves(leaf)),
            Formula::Min(a, b) => a.map_leaves(leaf).min(b.map_leaves(leaf)),
            Formula::Max(a, b) => a.map_leaves(leaf).max(b.map_leaves(leaf)),
            Formula::Oplus(a, b) => a.map_leaves(leaf).oplus(b.map_leaves(leaf)),
            Formula::Equiv(a, b) => a.map_leaves(leaf).equiv(b.map_leaves(leaf)),
            Formula::Power(a, n) => a.map_leaves(leaf).power(*n),
            Formula::Multiple(n, a) => a.map_leaves(leaf).multiple(*n),
        }
    }

    pub fn rename(&self, from: &Variable, to: &Variable) -> Formula {
        self.map_leaves(&mut |node| match node {
            Formula::Var(v) if v == from => Some(Formula::Var(to.clone())),
            _ => None,
        })
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::render_formula(self))
    }
}

/// Free variables and the constants other than `0` and `1`.
pub fn signature_of(f: &Formula) -> (BTreeSet<Variable>, BTreeSet<Rational>) {
    (f.variables(), f.constants())
}

/// Target connective basis for [`expand_abbreviations`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpansionMode {
    /// Expands powers, multiples, `≡` and `⊕`; keeps `∧`/`∨`.
    SolverBasis,
    /// Expands everything to `{·, →, ¬}` and constants.
    Full,
}

pub fn expand_abbreviations(f: &Formula, mode: ExpansionMode) -> Formula {
    let go = |g: &Formula| expand_abbreviations(g, mode);
    match f {
        Formula::Const(_) | Formula::Var(_) => f.clone(),
        Formula::Neg(a) => go(a).neg(),
        Formula::And(a, b) => go(a).and(go(b)),
        Formula::Implies(a, b) => go(a).implies(go(b)),
        Formula::Min(a, b) => {
            let (a, b) = (go(a), go(b));
            match mode {
                ExpansionMode::SolverBasis => a.min(b),
                // a ∧ b = a·(a → b)
                ExpansionMode::Full => a.clone().and(a.implies(b)),
            }
        }
        Formula::Max(a, b) => {
            let (a, b) = (go(a), go(b));
            match mode {
                ExpansionMode::SolverBasis => a.max(b),
                // a ∨ b = (a → b) → b
                ExpansionMode::Full => a.implies(b.clone()).implies(b),
            }
        }
        Formula::Oplus(a, b) => oplus_basis(go(a), go(b)),
        Formula::Equiv(a, b) => {
            let (a, b) = (go(a), go(b));
            a.clone().implies(b.clone()).and(b.implies(a))
        }
        Formula::Power(a, n) => {
            let a = go(a);
            let mut acc = a.clone();
            for _ in 1..*n {
                acc = a.clone().and(acc);
            }
            acc
        }
        Formula::Multiple(n, a) => {
            let a = go(a);
            let mut acc = a.clone();
            for _ in 1..*n {
                acc = oplus_basis(a.clone(), acc);
            }
            acc
        }
    }
}

fn oplus_basis(a: Formula, b: Formula) -> Formula {
    a.neg().and(b.neg()).neg()
}

/// A finite, ordered list of axioms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Theory {
    pub axioms: Vec<Formula>,
    pub label: Option<String>,
}

impl Theory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_axioms(axioms: Vec<Formula>) -> Self {
        Theory {
            axioms,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn push(&mut self, axiom: Formula) {
        self.axioms.push(axiom);
    }

    pub fn extend(&mut self, other: &Theory) {
        self.axioms.extend(other.axioms.iter().cloned());
    }

    pub fn len(&self) -> usize {
        self.axioms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axioms.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Formula> {
        self.axioms.iter()
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.axioms.contains(f)
    }

    /// Left-nested strong conjunction of the axioms (`1` when empty). A
    /// valuation gives it value 1 exactly when it satisfies every axiom.
    pub fn conjunction(&self) -> Formula {
        let mut iter = self.axioms.iter().cloned();
        match iter.next() {
            None => Formula::one(),
            Some(first) => iter.fold(first, Formula::and),
        }
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        self.axioms.iter().flat_map(|a| a.variables()).collect()
    }

    pub fn constants(&self) -> BTreeSet<Rational> {
        self.axioms.iter().flat_map(|a| a.constants()).collect()
    }

    /// Serialized length in bytes of the theory-file rendering.
    pub fn serialized_size(&self) -> usize {
        self.axioms
            .iter()
            .map(|a| crate::parser::render_formula(a).len() + 1)
            .sum()
    }
}

impl<'a> IntoIterator for &'a Theory {
    type Item = &'a Formula;
    type IntoIter = std::slice::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.axioms.iter()
    }
}

impl FromIterator<Formula> for Theory {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        Theory::from_axioms(iter.into_iter().collect())
    }
}

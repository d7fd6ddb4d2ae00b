//! Defining systems for rational truth values, finite fragments of the
//! theory pinning every `q<m/n>` to `m/n`, and the translation of rational
//! constants into such variables.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{Formula, Theory, VarKind, Variable};
use crate::rational::{denom_u64, numer_u64, one, rat_u64, Rational};
use crate::solver::{self, Consequence, Extremum, SolverConfig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// One axiom per value, with the power or multiple kept as a node.
    #[default]
    Naive,
    /// Squaring and doubling chains of size polynomial in the bit-length.
    Poly,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(Mode::Naive),
            "poly" => Ok(Mode::Poly),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}` (naive|poly)"))),
        }
    }
}

/// Source of fresh auxiliary scopes. Each defining system draws its own.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxPool {
    next: u32,
}

impl Default for AuxPool {
    fn default() -> Self {
        AuxPool { next: 1 }
    }
}

impl AuxPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// A pool whose scopes avoid every auxiliary variable in `vars`.
    pub fn avoiding<'a>(vars: impl IntoIterator<Item = &'a Variable>) -> Self {
        let top = vars.into_iter().filter_map(Variable::aux_scope).max().unwrap_or(0);
        AuxPool { next: top + 1 }
    }

    pub fn fresh(&mut self) -> u32 {
        let s = self.next;
        self.next += 1;
        s
    }
}

/// A theory whose standard models all give `principal` the value `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefiningSystem {
    pub target: Rational,
    pub mode: Mode,
    pub theory: Theory,
    pub principal: Variable,
    pub auxiliaries: Vec<Variable>,
}

impl DefiningSystem {
    /// All axioms as one formula.
    pub fn formula(&self) -> Formula {
        self.theory.conjunction()
    }
}

fn bits(mut n: u64) -> Vec<u32> {
    let mut out = Vec::new();
    let mut i = 0;
    while n > 0 {
        if n & 1 == 1 {
            out.push(i);
        }
        n >>= 1;
        i += 1;
    }
    out
}

fn product(factors: impl IntoIterator<Item = Formula>, join: fn(Formula, Formula) -> Formula) -> Formula {
    let mut it = factors.into_iter();
    let first = it.next().expect("at least one factor");
    it.fold(first, join)
}

/// Defines `1/n` in `q<1/n>`.
pub fn define_unit_fraction(n: u64, mode: Mode, pool: &mut AuxPool) -> Result<DefiningSystem> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("unit fraction needs n >= 2, got {n}")));
    }
    let target = rat_u64(1, n);
    let x = Variable::q(target.clone());
    let fx = Formula::of(x.clone());
    let mut theory = Theory::new().with_label(format!("define 1/{n}"));
    let mut auxiliaries: Vec<Variable> = Vec::new();
    match mode {
        Mode::Naive => {
            let base = fx.clone().neg();
            let rhs = if n == 2 { base } else { base.power(n - 1) };
            theory.push(fx.equiv(rhs));
        }
        Mode::Poly => {
            let scope = pool.fresh();
            let set = bits(n - 1);
            let top = *set.last().expect("n - 1 >= 1");
            for i in 0..=top {
                let y = Variable::aux(scope, &format!("y{i}"));
                let rhs = if i == 0 {
                    fx.clone().neg()
                } else {
                    Formula::of(auxiliaries[i as usize - 1].clone()).power(2)
                };
                theory.push(Formula::of(y.clone()).equiv(rhs));
                auxiliaries.push(y);
            }
            let prod = product(
                set.iter().map(|i| Formula::of(auxiliaries[*i as usize].clone())),
                Formula::and,
            );
            theory.push(fx.equiv(prod));
        }
    }
    Ok(DefiningSystem {
        target,
        mode,
        theory,
        principal: x,
        auxiliaries,
    })
}

/// Axioms giving `q<m/n>` its value, assuming `q<1/n>` is already defined.
fn multiple_axioms(m: u64, n: u64, mode: Mode, pool: &mut AuxPool, aux: &mut Vec<Variable>) -> Vec<Formula> {
    let unit = Formula::q(rat_u64(1, n));
    let q = Formula::q(rat_u64(m, n));
    match mode {
        Mode::Naive => vec![q.equiv(unit.multiple(m))],
        Mode::Poly => {
            let scope = pool.fresh();
            let set = bits(m);
            let top = *set.last().expect("m >= 1");
            let mut axioms = Vec::new();
            let mut chain = vec![unit];
            for i in 1..=top {
                let w = Variable::aux(scope, &format!("w{i}"));
                let prev = chain[i as usize - 1].clone();
                axioms.push(Formula::of(w.clone()).equiv(prev.clone().oplus(prev)));
                chain.push(Formula::of(w.clone()));
                aux.push(w);
            }
            axioms.push(q.equiv(product(set.iter().map(|i| chain[*i as usize].clone()), Formula::oplus)));
            axioms
        }
    }
}

fn lowest_terms(m: u64, n: u64) -> Result<(u64, u64)> {
    if n == 0 {
        return Err(Error::InvalidArgument("denominator must be positive".into()));
    }
    if m > n {
        return Err(Error::InvalidArgument(format!("{m}/{n} exceeds 1")));
    }
    let r = rat_u64(m, n);
    Ok((numer_u64(&r)?, denom_u64(&r)?))
}

/// Defines `m/n` in `q<m/n>` (reduced to lowest terms).
pub fn define_rational(m: u64, n: u64, mode: Mode, pool: &mut AuxPool) -> Result<DefiningSystem> {
    let (m, n) = lowest_terms(m, n)?;
    let target = rat_u64(m, n);
    let principal = Variable::q(target.clone());
    let fp = Formula::of(principal.clone());
    if m == 0 || m == n {
        let value = if m == 0 { Formula::zero() } else { Formula::one() };
        return Ok(DefiningSystem {
            target,
            mode,
            theory: Theory::from_axioms(vec![fp.equiv(value)]),
            principal,
            auxiliaries: Vec::new(),
        });
    }
    let mut sys = define_unit_fraction(n, mode, pool)?;
    if m > 1 {
        let extra = multiple_axioms(m, n, mode, pool, &mut sys.auxiliaries);
        sys.theory.axioms.extend(extra);
        sys.auxiliaries.insert(0, sys.principal.clone());
        sys.principal = principal;
        sys.target = target;
    }
    sys.theory.label = Some(format!("define {m}/{n}"));
    Ok(sys)
}

/// The finite fragment of the q-variable theory covering `constants`. One
/// definition of `1/n` serves every `m/n` with that denominator; `0` and `1`
/// get `q<0> <-> 0` and `q<1> <-> 1`.
pub fn build_tq_fin(constants: &BTreeSet<Rational>, mode: Mode, pool: &mut AuxPool) -> Result<Theory> {
    let mut by_denominator: BTreeMap<u64, BTreeSet<u64>> = BTreeMap::new();
    let mut theory = Theory::new().with_label("tq-fin");
    for c in constants {
        if c.is_zero() {
            theory.push(Formula::q(c.clone()).equiv(Formula::zero()));
        } else if c.is_one() {
            theory.push(Formula::q(c.clone()).equiv(Formula::one()));
        } else if *c > Rational::zero() && *c < one() {
            by_denominator.entry(denom_u64(c)?).or_default().insert(numer_u64(c)?);
        } else {
            return Err(Error::InvalidArgument(format!(
                "constant {} is outside [0,1]",
                crate::rational::fmt_rational(c)
            )));
        }
    }
    for (n, numerators) in by_denominator {
        let unit = define_unit_fraction(n, mode, pool)?;
        theory.extend(&unit.theory);
        for m in numerators.into_iter().filter(|m| *m > 1) {
            let mut scratch = Vec::new();
            theory.axioms.extend(multiple_axioms(m, n, mode, pool, &mut scratch));
        }
    }
    Ok(theory)
}

/// Result of replacing rational constants by q-variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation {
    pub theory: Theory,
    pub formula: Formula,
    pub tq_fin: Theory,
}

impl Translation {
    /// Translated theory together with the q-variable definitions.
    pub fn premises(&self) -> Theory {
        let mut all = self.theory.clone();
        all.extend(&self.tq_fin);
        all
    }
}

fn star(f: &Formula) -> Formula {
    f.map_leaves(&mut |node| match node {
        Formula::Const(c) if !c.is_zero() && !c.is_one() => Some(Formula::q(c.clone())),
        _ => None,
    })
}

fn reject_reserved(vars: &BTreeSet<Variable>) -> Result<()> {
    match vars.iter().find(|v| !matches!(v.kind(), VarKind::Plain)) {
        Some(v) => Err(Error::NamespaceCollision(v.name().to_string())),
        None => Ok(()),
    }
}

/// Replaces every constant strictly between 0 and 1 in `theory` and `f` by
/// its q-variable and returns the definitions of exactly those variables.
pub fn star_translate(theory: &Theory, f: &Formula, mode: Mode) -> Result<Translation> {
    let mut vars = theory.variables();
    vars.extend(f.variables());
    reject_reserved(&vars)?;
    let mut constants = theory.constants();
    constants.extend(f.constants());
    let tq_fin = build_tq_fin(&constants, mode, &mut AuxPool::new())?;
    Ok(Translation {
        theory: Theory {
            axioms: theory.iter().map(star).collect(),
            label: theory.label.clone(),
        },
        formula: star(f),
        tq_fin,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Constants enter the program as fixed values.
    #[default]
    Direct,
    TranslatedNaive,
    TranslatedPoly,
}

impl Route {
    pub const ALL: [Route; 3] = [Route::Direct, Route::TranslatedNaive, Route::TranslatedPoly];
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Route::Direct),
            "naive" => Ok(Route::TranslatedNaive),
            "poly" => Ok(Route::TranslatedPoly),
            other => Err(Error::InvalidArgument(format!("unknown route `{other}` (direct|naive|poly)"))),
        }
    }
}

/// Consequence in Rational Pavelka logic. Countermodels are restricted to
/// the variables of `theory` and `f`.
pub fn decide_rpl(theory: &Theory, f: &Formula, route: Route, config: &SolverConfig) -> Result<Consequence> {
    let mut user_vars = theory.variables();
    user_vars.extend(f.variables());
    let verdict = match route {
        Route::Direct => solver::decide_consequence(theory, f, config)?,
        Route::TranslatedNaive | Route::TranslatedPoly => {
            let mode = if route == Route::TranslatedNaive { Mode::Naive } else { Mode::Poly };
            let t = star_translate(theory, f, mode)?;
            solver::decide_consequence(&t.premises(), &t.formula, config)?
        }
    };
    Ok(match verdict {
        Consequence::Countermodel { valuation, value } => Consequence::Countermodel {
            valuation: valuation.restrict(&user_vars),
            value,
        },
        holds => holds,
    })
}

/// Least value of `f` over the models of `theory` along a route, with the
/// witness restricted to the variables of `theory` and `f`.
pub fn rpl_minimum(theory: &Theory, f: &Formula, route: Route, config: &SolverConfig) -> Result<Option<Extremum>> {
    let mut user_vars = theory.variables();
    user_vars.extend(f.variables());
    let found = match route {
        Route::Direct => solver::minimize(theory, f, config)?,
        Route::TranslatedNaive | Route::TranslatedPoly => {
            let mode = if route == Route::TranslatedNaive { Mode::Naive } else { Mode::Poly };
            let t = star_translate(theory, f, mode)?;
            solver::minimize(&t.premises(), &t.formula, config)?
        }
    };
    Ok(found.map(|e| Extremum {
        value: e.value,
        witness: e.witness.restrict(&user_vars),
    }))
}

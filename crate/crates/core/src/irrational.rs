//! Finite cut fragments pinning a variable between rational brackets of an
//! irrational number, and the degree to which two such fragments entail
//! `i_a & i_a <-> i_b`.
//!
//! The infinitary theory is approximated: each fragment uses the single
//! bracket at precision `p`, and convergence is observed as `p` grows.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};

use crate::constants::{build_tq_fin, AuxPool, Mode};
use crate::error::{Error, Result};
use crate::formula::{Formula, Theory, Variable};
use crate::rational::{fmt_rational, max_rat, min_rat, one, parse_rational, Rational};
use crate::solver::{self, SolverConfig};

/// A real number in `(0,1)` known through nested rational brackets.
pub trait RealOracle {
    fn name(&self) -> &str;

    /// `(lo, hi)` with `lo < a < hi` and `hi - lo <= 2^-p`.
    fn bracket(&self, p: u32) -> Result<(Rational, Rational)>;
}

fn dyadic(numer: BigUint, p: u32) -> Rational {
    let denom = BigUint::one() << (p + 1);
    Rational::new(numer.into(), denom.into())
}

/// `√2/2`, bracketed on the grid `2^-(p+1)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sqrt2Over2;

impl RealOracle for Sqrt2Over2 {
    fn name(&self) -> &str {
        "sqrt2over2"
    }

    fn bracket(&self, p: u32) -> Result<(Rational, Rational)> {
        // lo < 2^(p+1)·√2/2 = √(2^(2p+1))
        let lo = (BigUint::one() << (2 * p + 1)).sqrt();
        Ok((dyadic(lo.clone(), p), dyadic(lo + 1u32, p)))
    }
}

/// `√2 - 1`, bracketed on the grid `2^-(p+1)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sqrt2Minus1;

impl RealOracle for Sqrt2Minus1 {
    fn name(&self) -> &str {
        "sqrt2minus1"
    }

    fn bracket(&self, p: u32) -> Result<(Rational, Rational)> {
        let scale = BigUint::one() << (p + 1);
        let lo = (BigUint::one() << (2 * p + 3)).sqrt() - &scale;
        Ok((dyadic(lo.clone(), p), dyadic(lo + 1u32, p)))
    }
}

/// Brackets read from a table of `p lo hi` lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableOracle {
    name: String,
    rows: BTreeMap<u32, (Rational, Rational)>,
}

impl TableOracle {
    /// Parses `p lo hi` lines; `#` comments and blank lines are skipped.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut rows = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::InvalidArgument(format!("bracket table line {}: expected `p lo hi`", i + 1));
            let [p, lo, hi] = fields[..] else {
                return Err(bad());
            };
            let p: u32 = p.parse().map_err(|_| bad())?;
            rows.insert(p, (parse_rational(lo)?, parse_rational(hi)?));
        }
        Ok(TableOracle { name: name.into(), rows })
    }
}

impl RealOracle for TableOracle {
    fn name(&self) -> &str {
        &self.name
    }

    fn bracket(&self, p: u32) -> Result<(Rational, Rational)> {
        self.rows.get(&p).cloned().ok_or_else(|| Error::OracleInvariant {
            name: self.name.clone(),
            precision: p,
            reason: "no bracket at this precision".into(),
        })
    }
}

/// Built-in oracle by CLI name.
pub fn builtin_oracle(name: &str) -> Option<Box<dyn RealOracle>> {
    match name {
        "sqrt2over2" => Some(Box::new(Sqrt2Over2)),
        "sqrt2minus1" => Some(Box::new(Sqrt2Minus1)),
        _ => None,
    }
}

/// The bracket at `p`, after checking width, order, range and nesting in
/// the bracket at `p - 1`.
pub fn checked_bracket(o: &dyn RealOracle, p: u32) -> Result<(Rational, Rational)> {
    let fail = |reason: String| Error::OracleInvariant {
        name: o.name().to_string(),
        precision: p,
        reason,
    };
    if p == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    let (lo, hi) = o.bracket(p)?;
    if lo >= hi {
        return Err(fail(format!("lo {} is not below hi {}", fmt_rational(&lo), fmt_rational(&hi))));
    }
    if lo.is_negative() || hi > one() {
        return Err(fail("bracket leaves [0,1]".into()));
    }
    let width = &hi - &lo;
    let limit = Rational::new(1.into(), (BigUint::one() << p).into());
    if width > limit {
        return Err(fail(format!("width {} exceeds 2^-{p}", fmt_rational(&width))));
    }
    if p > 1 {
        if let Ok((plo, phi)) = o.bracket(p - 1) {
            if lo < plo || hi > phi {
                return Err(fail("bracket is not nested in the previous one".into()));
            }
        }
    }
    Ok((lo, hi))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutFragment {
    pub oracle: String,
    pub precision: u32,
    pub bracket: (Rational, Rational),
    pub theory: Theory,
    pub cut_variable: Variable,
}

fn cut_axioms(i: &Variable, lo: &Rational, hi: &Rational) -> [Formula; 2] {
    let fi = Formula::of(i.clone());
    [Formula::q(lo.clone()).implies(fi.clone()), fi.implies(Formula::q(hi.clone()))]
}

/// Definitions of the bracket endpoints plus `q<lo> -> i_a` and
/// `i_a -> q<hi>`.
pub fn cut_fragment(o: &dyn RealOracle, p: u32) -> Result<CutFragment> {
    let (lo, hi) = checked_bracket(o, p)?;
    let cut_variable = Variable::plain("i_a");
    let constants: BTreeSet<Rational> = [lo.clone(), hi.clone()].into();
    let mut theory = build_tq_fin(&constants, Mode::Poly, &mut AuxPool::new())?
        .with_label(format!("cut {} at precision {p}", o.name()));
    theory.axioms.extend(cut_axioms(&cut_variable, &lo, &hi));
    Ok(CutFragment {
        oracle: o.name().to_string(),
        precision: p,
        bracket: (lo, hi),
        theory,
        cut_variable,
    })
}

/// Least and greatest value of the cut variable over the standard models of
/// the fragment.
pub fn confinement(frag: &CutFragment, config: &SolverConfig) -> Result<(Rational, Rational)> {
    let x = Formula::of(frag.cut_variable.clone());
    let missing = || Error::Internal("cut fragment has no standard model".into());
    let lo = solver::minimize(&frag.theory, &x, config)?.ok_or_else(missing)?;
    let hi = solver::maximize(&frag.theory, &x, config)?.ok_or_else(missing)?;
    Ok((lo.value, hi.value))
}

/// Checks that `b = a & a` is possible within the brackets at precision
/// `p`: the image of `a`'s open bracket under `max(0, 2a - 1)` meets `b`'s.
fn compatible_at(oa: &dyn RealOracle, ob: &dyn RealOracle, p: u32) -> Result<()> {
    let (la, ha) = checked_bracket(oa, p)?;
    let (lb, hb) = checked_bracket(ob, p)?;
    let image = |x: &Rational| max_rat(Rational::zero(), x * Rational::from_integer(2.into()) - one());
    let lower = max_rat(image(&la), lb);
    let upper = min_rat(image(&ha), hb);
    if lower >= upper {
        return Err(Error::IncompatiblePair {
            precision: p,
            reason: format!(
                "{} & {} cannot equal {}",
                oa.name(),
                oa.name(),
                ob.name()
            ),
        });
    }
    Ok(())
}

/// The pair theory: both cut fragments over shared q-variable definitions.
pub fn pair_theory(oa: &dyn RealOracle, ob: &dyn RealOracle, p: u32) -> Result<(Theory, Variable, Variable)> {
    let (la, ha) = checked_bracket(oa, p)?;
    let (lb, hb) = checked_bracket(ob, p)?;
    let (ia, ib) = (Variable::plain("i_a"), Variable::plain("i_b"));
    let constants: BTreeSet<Rational> = [la.clone(), ha.clone(), lb.clone(), hb.clone()].into();
    let mut theory = build_tq_fin(&constants, Mode::Poly, &mut AuxPool::new())?
        .with_label(format!("cuts {} and {} at precision {p}", oa.name(), ob.name()));
    theory.axioms.extend(cut_axioms(&ia, &la, &ha));
    theory.axioms.extend(cut_axioms(&ib, &lb, &hb));
    Ok((theory, ia, ib))
}

/// Truth degree of `i_a & i_a <-> i_b` over both fragments at precision
/// `p`, after validating the pair at every precision up to `p`.
pub fn product_pair_check(
    oa: &dyn RealOracle,
    ob: &dyn RealOracle,
    p: u32,
    config: &SolverConfig,
) -> Result<Rational> {
    if p == 0 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    for q in 1..=p {
        compatible_at(oa, ob, q)?;
    }
    let (theory, ia, ib) = pair_theory(oa, ob, p)?;
    let fa = Formula::of(ia);
    let goal = fa.clone().and(fa).equiv(Formula::of(ib));
    solver::truth_degree(&theory, &goal, config)
}

/// `1 - 3·2^-p`.
pub fn degree_floor(p: u32) -> Rational {
    one() - Rational::new(3.into(), (BigUint::one() << p).into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn builtin_brackets() {
        assert_eq!(Sqrt2Over2.bracket(3).unwrap(), (rat(11, 16), rat(12, 16)));
        assert_eq!(Sqrt2Minus1.bracket(1).unwrap(), (rat(1, 4), rat(1, 2)));
        for p in 1..=40 {
            checked_bracket(&Sqrt2Over2, p).unwrap();
            checked_bracket(&Sqrt2Minus1, p).unwrap();
        }
        assert!(checked_bracket(&Sqrt2Over2, 0).is_err());
    }

    #[test]
    fn fragment_confines_to_bracket() {
        let cfg = SolverConfig::default();
        let frag = cut_fragment(&Sqrt2Over2, 3).unwrap();
        assert_eq!(confinement(&frag, &cfg).unwrap(), (rat(11, 16), rat(3, 4)));
    }

    #[test]
    fn pair_degree_meets_floor() {
        let cfg = SolverConfig::default();
        let d = product_pair_check(&Sqrt2Over2, &Sqrt2Minus1, 4, &cfg).unwrap();
        assert!(d >= degree_floor(4), "{}", fmt_rational(&d));
        let err = product_pair_check(&Sqrt2Over2, &Sqrt2Over2, 3, &cfg).unwrap_err();
        assert!(matches!(err, Error::IncompatiblePair { .. }));
    }

    #[test]
    fn table_oracle_checks_invariants() {
        let ok = TableOracle::parse("t", "# third\n1 1/4 1/2\n2 1/4 3/8\n").unwrap();
        assert_eq!(checked_bracket(&ok, 2).unwrap(), (rat(1, 4), rat(3, 8)));
        let wide = TableOracle::parse("w", "2 0 1/2\n").unwrap();
        assert!(matches!(checked_bracket(&wide, 2), Err(Error::OracleInvariant { .. })));
        let unnested = TableOracle::parse("u", "1 0 1/2\n2 1/2 3/4\n").unwrap();
        assert!(matches!(checked_bracket(&unnested, 2), Err(Error::OracleInvariant { .. })));
        assert!(TableOracle::parse("x", "1 1/4\n").is_err());
    }
}

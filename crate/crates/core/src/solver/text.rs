//! Line-oriented text rendering of a program for cross-checking with
//! external solvers.
//!
//! ```text
//! # pavelka-milp 1
//! var v0 continuous x
//! var v1 binary b1
//! minimize v0 + 1/2
//! c0: v0 - v1 >= -1/3
//! ```
//!
//! Variables are named `v<i>` in objective and constraint lines; the
//! declaration line carries the original name. All variables lie in `[0,1]`.

use std::fmt::Write;

use crate::rational::fmt_rational;
use crate::solver::problem::{write_term, Direction, Domain, MilpProblem};

pub fn write_milp(problem: &MilpProblem) -> String {
    let mut out = String::from("# pavelka-milp 1\n");
    for (i, decl) in problem.vars.iter().enumerate() {
        let domain = match decl.domain {
            Domain::Continuous => "continuous",
            Domain::Binary => "binary",
        };
        let _ = writeln!(out, "var v{i} {domain} {}", decl.name);
    }
    let direction = match problem.direction {
        Direction::Minimize => "minimize",
        Direction::Maximize => "maximize",
    };
    let _ = writeln!(out, "{direction} {}", problem.objective);
    if problem.trivially_infeasible {
        out.push_str("infeasible\n");
    }
    for (i, c) in problem.constraints.iter().enumerate() {
        let _ = write!(out, "c{i}:");
        out.push(' ');
        let mut first = true;
        for (v, a) in &c.coefficients {
            let _ = write_term(&mut out, a, &format!("v{}", v.0), first);
            first = false;
        }
        let _ = writeln!(out, " {} {}", c.comparator.symbol(), fmt_rational(&c.bound));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Theory;
    use crate::parser::parse_formula;
    use crate::solver::encode;

    #[test]
    fn renders_strong_conjunction() {
        let problem = encode(&Theory::new(), &parse_formula("x & y").unwrap(), Direction::Minimize);
        let text = write_milp(&problem);
        let expected = "# pavelka-milp 1
var v0 continuous x
var v1 continuous y
var v2 continuous z2_and
var v3 binary b3
minimize v2
c0: -v0 - v1 + v2 >= -1
c1: -v0 - v1 + v2 - v3 <= -1
c2: v2 + v3 <= 1
";
        assert_eq!(text, expected);
    }
}

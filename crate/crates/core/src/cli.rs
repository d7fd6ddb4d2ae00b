//! Command-line front end. Every subcommand produces deterministic text or,
//! with `--json`, a JSON object whose rationals are `"p/q"` strings.
//!
//! Exit codes: 0 success (or "holds"), 1 "fails", 2 any error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::constants::{decide_rpl, define_rational, rpl_minimum, star_translate, AuxPool, Mode, Route};
use crate::definability::{def_check, reduce_dbar_to_def, reduce_sat_to_def, DefInstance, DefVerdict};
use crate::error::{Error, Result};
use crate::formula::{Formula, Theory, Variable};
use crate::irrational::{builtin_oracle, confinement, cut_fragment, degree_floor, product_pair_check, RealOracle, TableOracle};
use crate::parser::{parse_formula, render_formula};
use crate::rational::{denom_u64, fmt_rational, numer_u64, parse_unit_rational};
use crate::semantics::{evaluate, Valuation};
use crate::solver::{self, encode, write_milp, Consequence, Direction, SolverConfig};

#[derive(Debug, Parser)]
#[command(name = "pavelka", version, about = "Exact reasoning in Lukasiewicz and Rational Pavelka logic")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Simplex pivot limit (overrides PAVELKA_PIVOT_LIMIT).
    #[arg(long, global = true, value_name = "N")]
    pivot_limit: Option<u64>,
    /// Branch-and-bound node limit (overrides PAVELKA_NODE_LIMIT).
    #[arg(long, global = true, value_name = "N")]
    node_limit: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Logic {
    #[value(name = "L", alias = "l")]
    L,
    #[value(name = "RPL", alias = "rpl")]
    Rpl,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a formula and print it in normal form.
    Parse { formula: String },
    /// Evaluate a formula under an exact assignment.
    Eval {
        formula: String,
        /// `VAR=M/N`, repeatable.
        #[arg(long = "assign", value_name = "VAR=M/N")]
        assign: Vec<String>,
    },
    /// Decide whether a theory entails a formula (value 1 in every model).
    Decide {
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "L")]
        logic: Logic,
        /// direct | naive | poly (RPL only)
        #[arg(long, default_value = "direct", value_parser = parse_route)]
        route: Route,
        /// Write the minimization program to this file.
        #[arg(long, value_name = "FILE")]
        emit_milp: Option<PathBuf>,
        formula: String,
    },
    /// Exact truth degree: least value over the models of the theory.
    Degree {
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        emit_milp: Option<PathBuf>,
        formula: String,
    },
    /// Replace rational constants by defined q-variables.
    Translate {
        #[arg(long)]
        theory: Option<PathBuf>,
        #[arg(long, default_value = "naive", value_parser = parse_mode)]
        mode: Mode,
        formula: String,
    },
    /// Print a theory defining M/N.
    Define {
        value: String,
        #[arg(long, default_value = "naive", value_parser = parse_mode)]
        mode: Mode,
    },
    /// Does FORMULA implicitly define VALUE in VAR?
    DefCheck {
        formula: String,
        #[arg(long)]
        var: String,
        #[arg(long)]
        value: String,
    },
    /// Build DEF instances from SAT or from failure-condition instances.
    #[command(subcommand)]
    Reduce(Reduction),
    /// Cut fragment of a built-in oracle or a bracket table file.
    Irrational {
        oracle: String,
        #[arg(long)]
        precision: u32,
        /// Second oracle `b`; reports the degree of `i_a & i_a <-> i_b`.
        #[arg(long)]
        pair: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
enum Reduction {
    SatToDef {
        formula: String,
    },
    DbarToDef {
        formula: String,
        #[arg(long)]
        var: String,
        #[arg(long)]
        value: String,
    },
}

fn parse_route(s: &str) -> std::result::Result<Route, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

struct Report {
    text: String,
    json: Value,
    code: i32,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, code: 0 }
    }
}

/// Reads a theory file: one formula per line, `#` comments, blank lines
/// skipped.
pub fn read_theory(path: &Path) -> Result<Theory> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_theory(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn parse_theory(text: &str) -> Result<Theory> {
    let mut theory = Theory::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f = parse_formula(line).map_err(|e| Error::InvalidArgument(format!("line {}: {e}", i + 1)))?;
        theory.push(f);
    }
    Ok(theory)
}

fn load(path: &Option<PathBuf>) -> Result<Theory> {
    path.as_deref().map_or_else(|| Ok(Theory::new()), read_theory)
}

fn variable(name: &str) -> Result<Variable> {
    match parse_formula(name)? {
        Formula::Var(v) => Ok(v),
        _ => Err(Error::InvalidArgument(format!("`{name}` is not a variable"))),
    }
}

fn valuation_lines(v: &Valuation) -> String {
    v.iter()
        .map(|(x, r)| format!("{} = {}\n", x.name(), fmt_rational(r)))
        .collect()
}

fn theory_lines(t: &Theory) -> Vec<String> {
    t.iter().map(render_formula).collect()
}

fn block(lines: &[String]) -> String {
    lines.iter().map(|l| format!("{l}\n")).collect()
}

fn emit(path: &Option<PathBuf>, theory: &Theory, f: &Formula) -> Result<()> {
    if let Some(path) = path {
        let text = write_milp(&encode(theory, f, Direction::Minimize));
        std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn oracle(spec: &str) -> Result<Box<dyn RealOracle>> {
    if let Some(o) = builtin_oracle(spec) {
        return Ok(o);
    }
    let path = Path::new(spec);
    if !path.is_file() {
        return Err(Error::InvalidArgument(format!(
            "unknown oracle `{spec}` (sqrt2over2, sqrt2minus1, or a bracket table file)"
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{spec}: {e}")))?;
    let name = path.file_stem().map_or(spec.to_string(), |s| s.to_string_lossy().into_owned());
    Ok(Box::new(TableOracle::parse(name, &text)?))
}

fn execute(cli: &Cli) -> Result<Report> {
    let mut config = SolverConfig::from_env();
    if let Some(n) = cli.pivot_limit {
        config.pivot_limit = n;
    }
    if let Some(n) = cli.node_limit {
        config.node_limit = n;
    }
    match &cli.command {
        Command::Parse { formula } => {
            let out = render_formula(&parse_formula(formula)?);
            Ok(Report::ok(format!("{out}\n"), json!({ "formula": out })))
        }
        Command::Eval { formula, assign } => {
            let f = parse_formula(formula)?;
            let mut v = Valuation::new();
            for a in assign {
                let (name, value) = a
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidArgument(format!("assignment `{a}` is not VAR=M/N")))?;
                v.insert(variable(name.trim())?, parse_unit_rational(value.trim())?);
            }
            let value = fmt_rational(&evaluate(&f, &v)?);
            Ok(Report::ok(format!("{value}\n"), json!({ "value": value })))
        }
        Command::Decide {
            theory,
            logic,
            route,
            emit_milp,
            formula,
        } => {
            let t = load(theory)?;
            let f = parse_formula(formula)?;
            let (route, verdict) = match logic {
                Logic::L => {
                    if let Some(c) = t.constants().iter().chain(f.constants().iter()).next() {
                        return Err(Error::InvalidArgument(format!(
                            "constant {} is not in the language of L (use --logic RPL)",
                            fmt_rational(c)
                        )));
                    }
                    (Route::Direct, solver::decide_consequence(&t, &f, &config)?)
                }
                Logic::Rpl => (*route, decide_rpl(&t, &f, *route, &config)?),
            };
            emit(emit_milp, &t, &f)?;
            match verdict {
                Consequence::Holds => Ok(Report::ok("holds\n".into(), json!({ "verdict": "holds" }))),
                Consequence::Countermodel { .. } => {
                    let worst = rpl_minimum(&t, &f, route, &config)?
                        .ok_or_else(|| Error::Internal("countermodel vanished under minimization".into()))?;
                    let value = fmt_rational(&worst.value);
                    Ok(Report {
                        text: format!("fails\nvalue = {value}\n{}", valuation_lines(&worst.witness)),
                        json: json!({ "verdict": "fails", "value": value, "countermodel": worst.witness }),
                        code: 1,
                    })
                }
            }
        }
        Command::Degree {
            theory,
            emit_milp,
            formula,
        } => {
            let t = load(theory)?;
            let f = parse_formula(formula)?;
            emit(emit_milp, &t, &f)?;
            match solver::minimize(&t, &f, &config)? {
                Some(e) => {
                    let value = fmt_rational(&e.value);
                    Ok(Report::ok(
                        format!("{value}\n{}", valuation_lines(&e.witness)),
                        json!({ "degree": value, "witness": e.witness }),
                    ))
                }
                None => Ok(Report::ok(
                    "1\n# the theory has no standard model\n".into(),
                    json!({ "degree": "1", "witness": null }),
                )),
            }
        }
        Command::Translate { theory, mode, formula } => {
            let t = load(theory)?;
            let tr = star_translate(&t, &parse_formula(formula)?, *mode)?;
            let (th, fo, tq) = (theory_lines(&tr.theory), render_formula(&tr.formula), theory_lines(&tr.tq_fin));
            Ok(Report::ok(
                format!("# theory\n{}# formula\n{fo}\n# tq-fin\n{}", block(&th), block(&tq)),
                json!({ "theory": th, "formula": fo, "tq_fin": tq }),
            ))
        }
        Command::Define { value, mode } => {
            let a = parse_unit_rational(value)?;
            let sys = define_rational(numer_u64(&a)?, denom_u64(&a)?, *mode, &mut AuxPool::new())?;
            let lines = theory_lines(&sys.theory);
            let aux: Vec<&str> = sys.auxiliaries.iter().map(Variable::name).collect();
            Ok(Report::ok(
                block(&lines),
                json!({
                    "target": fmt_rational(&sys.target),
                    "mode": sys.mode,
                    "principal": sys.principal.name(),
                    "auxiliaries": aux,
                    "theory": lines,
                }),
            ))
        }
        Command::DefCheck { formula, var, value } => {
            let inst = DefInstance::new(parse_formula(formula)?, variable(var)?, parse_unit_rational(value)?)?;
            let verdict = def_check(&inst, &config)?;
            let text = match &verdict {
                DefVerdict::Leaks { witness } => format!("leaks\n{}", valuation_lines(witness)),
                other => format!("{}\n", other.label()),
            };
            Ok(Report::ok(text, serde_json::to_value(&verdict).expect("serializable verdict")))
        }
        Command::Reduce(r) => {
            let inst = match r {
                Reduction::SatToDef { formula } => reduce_sat_to_def(&parse_formula(formula)?),
                Reduction::DbarToDef { formula, var, value } => reduce_dbar_to_def(&DefInstance::new(
                    parse_formula(formula)?,
                    variable(var)?,
                    parse_unit_rational(value)?,
                )?)?,
            };
            Ok(Report::ok(
                format!("{inst}\n"),
                json!({
                    "formula": render_formula(&inst.formula),
                    "var": inst.var.name(),
                    "value": fmt_rational(&inst.value),
                    "record": inst.to_string(),
                }),
            ))
        }
        Command::Irrational { oracle: name, precision, pair } => {
            let o = oracle(name)?;
            let frag = cut_fragment(o.as_ref(), *precision)?;
            let (lo, hi) = confinement(&frag, &config)?;
            let (blo, bhi) = (fmt_rational(&frag.bracket.0), fmt_rational(&frag.bracket.1));
            let (lo, hi) = (fmt_rational(&lo), fmt_rational(&hi));
            let mut text = format!(
                "oracle {}\nprecision {precision}\nbracket {blo} {bhi}\nconfinement {lo} {hi}\n",
                o.name()
            );
            let mut out = json!({
                "oracle": o.name(),
                "precision": precision,
                "bracket": [blo, bhi],
                "confinement": [lo, hi],
            });
            if let Some(b) = pair {
                let ob = oracle(b)?;
                let degree = fmt_rational(&product_pair_check(o.as_ref(), ob.as_ref(), *precision, &config)?);
                let floor = fmt_rational(&degree_floor(*precision));
                text.push_str(&format!("pair {}\ndegree {degree}\nfloor {floor}\n", ob.name()));
                out["pair"] = json!({ "oracle": ob.name(), "degree": degree, "floor": floor });
            }
            Ok(Report::ok(text, out))
        }
    }
}

/// Runs one invocation; returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            let body = if cli.json {
                format!("{}\n", serde_json::to_string_pretty(&report.json).expect("serializable report"))
            } else {
                report.text
            };
            let _ = stdout.write_all(body.as_bytes());
            report.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

//! Argument parsing and command dispatch.
//!
//! Every invocation writes exactly one document to standard output (JSON, or
//! CSV with `--format csv`) unless it fails before producing one, in which case
//! the error goes to standard error. Exit codes: 0 pass, 1 property failure,
//! 2 parse error, 3 domain error.

use std::ffi::OsString;
use std::panic::{self, AssertUnwindSafe};

use clap::{Args, Parser, Subcommand, ValueEnum};
use divpair_core::curve::{self, CurveModel, CurvePoint};
use divpair_core::divisor::class_invariant;
use divpair_core::literal::{format_complex, format_point, parse_complex, parse_point, parse_point_list, PointLiteral};
use divpair_core::mvf;
use divpair_core::pairing::{check_weil_reciprocity, pairing_exponents, Formula, RationalFunctionData};
use divpair_core::strings::{momentum_divisors, string_pairing_factor};
use divpair_core::{Complex64, ComplexDivisor, MarkedCurve};
use serde_json::Value;

use crate::config::{curve_from, MomentumFile};
use crate::report::{complex, num, object, RunReport, Status};
use crate::selftest;
use crate::tolerance::Tolerances;
use crate::CliError;

/// Default `selftest --seed`.
pub const DEFAULT_SEED: u64 = 0xD1B1;
pub const DEFAULT_CASES: usize = 500;

#[derive(Debug, Parser)]
#[command(name = "divpair", version, about = "Complex divisors, Green kernels and pairing norms on the sphere and on tori")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveName {
    Sphere,
    Torus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormulaChoice {
    Ad,
    Adsym,
    Ad3,
    All,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(long, value_enum, default_value_t = CurveName::Sphere)]
    pub curve: CurveName,
    /// Period ratio of the torus (complex literal with positive imaginary part).
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    /// Comma-separated marked points, referenced as Q1, Q2, ... in divisors.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub marks: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the Green function of a degree-0 divisor at a point.
    Green {
        #[command(flatten)]
        curve: CurveArgs,
        /// Divisor such as "1@2,-1@-2" or "i@Q1,-i@Q2".
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
        /// Evaluation point (complex literal or "inf").
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Norm of the pairing of two disjoint degree-0 divisors.
    Pairing {
        #[command(flatten)]
        curve: CurveArgs,
        /// First divisor.
        #[arg(long, allow_hyphen_values = true)]
        d1: String,
        /// Second divisor, disjoint from the first.
        #[arg(long, allow_hyphen_values = true)]
        d2: String,
        #[arg(long, value_enum, default_value_t = FormulaChoice::All)]
        formula: FormulaChoice,
    },
    /// Check f(div g) = g(div f) for two rational or elliptic functions.
    Reciprocity {
        #[command(flatten)]
        curve: CurveArgs,
        /// Function as "zeros:a,b;poles:c,d[;const:k]"; write p^m for multiplicity m.
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        /// Second function, same grammar.
        #[arg(long, allow_hyphen_values = true)]
        g: String,
    },
    /// Class invariant and principality of a divisor.
    Class {
        #[command(flatten)]
        curve: CurveArgs,
        /// Divisor to classify.
        #[arg(long, allow_hyphen_values = true)]
        divisor: String,
        /// Compare classes with this divisor.
        #[arg(long, allow_hyphen_values = true)]
        other: Option<String>,
    },
    /// Pairing factor of an on-shell momentum configuration (TOML file).
    StringFactor {
        /// Path to the TOML configuration.
        #[arg(long)]
        config: std::path::PathBuf,
    },
    /// Run the property suite.
    Selftest {
        /// Decimal or 0x-prefixed hexadecimal.
        #[arg(long, value_parser = parse_seed, default_value = "0xD1B1")]
        seed: u64,
        /// Random instances per property.
        #[arg(long, default_value_t = DEFAULT_CASES)]
        cases: usize,
        /// Run only properties whose "module.name" contains this text.
        #[arg(long)]
        only: Option<String>,
    },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

/// What a run produced: the text for each stream and the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { stdout: String::new(), stderr: text, code: 2 }
            } else {
                Outcome { stdout: text, stderr: String::new(), code: 0 }
            };
        }
    };
    let tol = match Tolerances::from_env() {
        Ok(t) => t,
        Err(e) => return failure(&e),
    };
    let previous = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let result = panic::catch_unwind(AssertUnwindSafe(|| dispatch(&cli, &tol)));
    panic::set_hook(previous);
    match result {
        Ok(Ok(report)) => {
            let stdout = match cli.format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv(),
            };
            let code = match report.status {
                Status::Pass => 0,
                Status::Fail => 1,
                Status::Error => 3,
            };
            Outcome { stdout, stderr: String::new(), code }
        }
        Ok(Err(e)) => failure(&e),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown".into());
            Outcome { stdout: String::new(), stderr: format!("error: internal failure: {msg}\n"), code: 3 }
        }
    }
}

fn failure(e: &CliError) -> Outcome {
    Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: e.exit_code() }
}

fn dispatch(cli: &Cli, tol: &Tolerances) -> Result<RunReport, CliError> {
    let mut report = match &cli.command {
        Command::Green { curve, divisor, at } => cmd_green(curve, divisor, at),
        Command::Pairing { curve, d1, d2, formula } => cmd_pairing(curve, d1, d2, *formula, tol),
        Command::Reciprocity { curve, f, g } => cmd_reciprocity(curve, f, g, tol),
        Command::Class { curve, divisor, other } => cmd_class(curve, divisor, other.as_deref()),
        Command::StringFactor { config } => cmd_string_factor(config),
        Command::Selftest { seed, cases, only } => Ok(cmd_selftest(*seed, *cases, only.as_deref(), tol)),
    }?;
    report.meta("tolerances_overridden", tol.is_overridden());
    Ok(report)
}

struct Context {
    mc: MarkedCurve,
    echo: Vec<(&'static str, Value)>,
}

fn context(args: &CurveArgs) -> Result<Context, CliError> {
    let tau = args.tau.as_deref().map(parse_complex).transpose()?;
    let name = match args.curve {
        CurveName::Sphere => "sphere",
        CurveName::Torus => "torus",
    };
    let curve = curve_from(name, tau)?;
    let marks = parse_point_list(&args.marks)?
        .into_iter()
        .map(|p| match p {
            PointLiteral::Affine(z) => Ok(CurvePoint::Affine(z)),
            PointLiteral::Infinity => Ok(CurvePoint::Infinity),
            PointLiteral::Mark(_) => Err(CliError::Parse("marks must be coordinates".into())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mc = MarkedCurve::new(curve, marks)?;
    let mut echo = vec![("curve", Value::String(name.into()))];
    if let Some(t) = tau {
        echo.push(("tau", complex(t)));
    }
    echo.push((
        "marks",
        Value::Array(mc.marks().iter().map(|p| Value::String(point_text(*p))).collect()),
    ));
    Ok(Context { mc, echo })
}

fn point_text(p: CurvePoint) -> String {
    match p {
        CurvePoint::Affine(z) => format_point(&PointLiteral::Affine(z)),
        CurvePoint::Infinity => format_point(&PointLiteral::Infinity),
    }
}

fn resolve_point(mc: &MarkedCurve, text: &str) -> Result<CurvePoint, CliError> {
    let p = match parse_point(text)? {
        PointLiteral::Affine(z) => CurvePoint::Affine(z),
        PointLiteral::Infinity => CurvePoint::Infinity,
        PointLiteral::Mark(i) => mc.mark(i)?,
    };
    mc.curve().check_point(p)?;
    Ok(p)
}

fn start(name: &str, ctx: &Context) -> RunReport {
    let mut r = RunReport::new(name);
    for (k, v) in &ctx.echo {
        r.input(k, v.clone());
    }
    r
}

fn cmd_green(args: &CurveArgs, divisor: &str, at: &str) -> Result<RunReport, CliError> {
    let ctx = context(args)?;
    let d = ComplexDivisor::parse(&ctx.mc, divisor)?;
    let z = resolve_point(&ctx.mc, at)?;
    let value = curve::green_divisor(ctx.mc.curve(), &d, z)?;
    let mut r = start("green", &ctx);
    r.input("divisor", d.to_string()).input("at", point_text(z));
    r.output("value", complex(value));
    Ok(r)
}

fn cmd_pairing(
    args: &CurveArgs,
    d1: &str,
    d2: &str,
    choice: FormulaChoice,
    tol: &Tolerances,
) -> Result<RunReport, CliError> {
    let ctx = context(args)?;
    let d1 = ComplexDivisor::parse(&ctx.mc, d1)?;
    let d2 = ComplexDivisor::parse(&ctx.mc, d2)?;
    let e = pairing_exponents(ctx.mc.curve(), &d1, &d2)?;
    let mut r = start("pairing", &ctx);
    r.input("d1", d1.to_string()).input("d2", d2.to_string());
    let selected: Vec<Formula> = match choice {
        FormulaChoice::Ad => vec![Formula::Ad],
        FormulaChoice::Adsym => vec![Formula::AdSym],
        FormulaChoice::Ad3 => vec![Formula::Ad3],
        FormulaChoice::All => Formula::ALL.to_vec(),
    };
    r.input("formula", format!("{choice:?}").to_lowercase());
    let per_formula = selected
        .iter()
        .map(|&f| (f.name(), object([("exponent", num(e.get(f))), ("norm", num(e.get(f).exp()))])));
    r.output("formulas", object(per_formula));
    let primary = selected[0];
    r.output("norm", num(e.get(primary).exp())).output("exponent", num(e.get(primary)));
    r.output("hermitian_value", complex(e.hermitian));
    r.output("supported_on_marks", d1.is_supported_on_marks() && d2.is_supported_on_marks());
    if choice == FormulaChoice::All {
        let threshold = tol.get("formula_equivalence");
        r.output("max_discrepancy", num(e.max_discrepancy()));
        r.meta("discrepancy_threshold", num(threshold));
        if e.max_discrepancy().is_nan() || e.max_discrepancy() > threshold {
            r.status = Status::Fail;
        }
    }
    Ok(r)
}

/// `"zeros:a,b;poles:c^2[;const:k]"`.
fn parse_function(curve: CurveModel, text: &str) -> Result<(RationalFunctionData, Value), CliError> {
    let mut factors: Vec<(Complex64, i64)> = Vec::new();
    let mut constant = Complex64::new(1.0, 0.0);
    let mut seen = Vec::new();
    for section in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (key, body) = section
            .split_once(':')
            .ok_or_else(|| CliError::Parse(format!("expected key:values in {section:?}")))?;
        let key = key.trim();
        if seen.contains(&key) {
            return Err(CliError::Parse(format!("repeated section {key:?}")));
        }
        seen.push(key);
        match key {
            "zeros" | "poles" => {
                let sign = if key == "zeros" { 1 } else { -1 };
                for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let (point, mult) = match item.split_once('^') {
                        Some((p, m)) => (
                            p,
                            m.trim()
                                .parse::<i64>()
                                .ok()
                                .filter(|m| *m > 0)
                                .ok_or_else(|| CliError::Parse(format!("bad multiplicity in {item:?}")))?,
                        ),
                        None => (item, 1),
                    };
                    factors.push((parse_complex(point)?, sign * mult));
                }
            }
            "const" => constant = parse_complex(body)?,
            other => return Err(CliError::Parse(format!("unknown section {other:?}"))),
        }
    }
    let f = RationalFunctionData::new(curve, factors, constant)?;
    let divisor = f.divisor()?;
    let echo = object([
        ("constant", complex(f.constant())),
        ("divisor", Value::String(divisor.to_string())),
    ]);
    Ok((f, echo))
}

fn cmd_reciprocity(args: &CurveArgs, f: &str, g: &str, tol: &Tolerances) -> Result<RunReport, CliError> {
    let ctx = context(args)?;
    let (f, f_echo) = parse_function(*ctx.mc.curve(), f)?;
    let (g, g_echo) = parse_function(*ctx.mc.curve(), g)?;
    let check = check_weil_reciprocity(&f, &g)?;
    let mut r = start("reciprocity", &ctx);
    r.input("f", f_echo).input("g", g_echo);
    r.output("f_of_div_g", complex(check.f_of_div_g))
        .output("g_of_div_f", complex(check.g_of_div_f))
        .output("residual", num(check.residual));
    let threshold = tol.get("reciprocity");
    r.meta("residual_threshold", num(threshold));
    if check.residual.is_nan() || check.residual >= threshold {
        r.status = Status::Fail;
    }
    Ok(r)
}

fn descriptor_value(d: &divpair_core::ClassDescriptor) -> Value {
    object([
        ("degree", Value::from(d.degree)),
        ("jacobian", d.jacobian.map_or(Value::Null, complex)),
    ])
}

fn cmd_class(args: &CurveArgs, divisor: &str, other: Option<&str>) -> Result<RunReport, CliError> {
    let ctx = context(args)?;
    let d = ComplexDivisor::parse(&ctx.mc, divisor)?;
    let mut r = start("class", &ctx);
    r.input("divisor", d.to_string());
    let descriptor = class_invariant(&ctx.mc, &d)?;
    r.output("descriptor", descriptor_value(&descriptor));
    r.output("principal", principality(&ctx.mc, &d)?);
    if let Some(other) = other {
        let e = ComplexDivisor::parse(&ctx.mc, other)?;
        r.input("other", e.to_string());
        let other_descriptor = class_invariant(&ctx.mc, &e)?;
        r.output("other_descriptor", descriptor_value(&other_descriptor));
        r.output("same_class", descriptor.same_class(&other_descriptor));
        if d.degree() == e.degree() {
            r.output("difference_principal", principality(&ctx.mc, &d.sub(&e)?)?);
        }
    }
    Ok(r)
}

fn principality(mc: &MarkedCurve, d: &ComplexDivisor) -> Result<Value, CliError> {
    let p = mvf::is_principal(mc, d)?;
    let mut fields = vec![("principal", Value::Bool(p.principal))];
    if let Some(aj) = &p.abel_jacobi {
        fields.push(("abel_jacobi_sum", complex(aj.sum)));
    }
    if let Some(c) = &p.certificate {
        fields.push((
            "monodromy",
            object([
                ("a_period", complex(c.a_period)),
                ("b_period", complex(c.b_period)),
                ("a_defect", num(c.a_defect)),
                ("b_defect", num(c.b_defect)),
                ("trivial", Value::Bool(c.is_trivial())),
            ]),
        ));
    }
    Ok(object(fields))
}

fn cmd_string_factor(path: &std::path::Path) -> Result<RunReport, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let file = MomentumFile::parse(&text)?;
    let (mc, cfg) = (&file.marked_curve, &file.config);
    let factor = string_pairing_factor(mc, cfg)?;
    let divisors = momentum_divisors(mc, cfg)?;
    let mut r = RunReport::new("string-factor");
    r.input("config", path.display().to_string());
    r.input("curve", if mc.curve().genus() == 0 { "sphere" } else { "torus" });
    if let Some(t) = mc.curve().tau() {
        r.input("tau", complex(t));
    }
    r.input("marks", Value::Array(mc.marks().iter().map(|p| Value::String(point_text(*p))).collect()));
    r.input(
        "momenta",
        Value::Array(
            cfg.momenta()
                .iter()
                .map(|p| Value::Array(p.iter().map(|c| Value::String(format_complex(*c))).collect()))
                .collect(),
        ),
    );
    r.output("factor", num(factor.factor)).output("exponent", num(factor.exponent));
    r.output("per_component", Value::Array(factor.per_component.iter().map(|&x| num(x)).collect()));
    r.output("momentum_divisors", Value::Array(divisors.iter().map(|d| Value::String(d.to_string())).collect()));
    r.meta("diagonal_terms_omitted", factor.diagonal_omitted);
    Ok(r)
}

fn cmd_selftest(seed: u64, cases: usize, only: Option<&str>, tol: &Tolerances) -> RunReport {
    let results = selftest::run(seed, cases, tol, only);
    let mut r = RunReport::new("selftest");
    r.input("seed", seed).input("cases", cases as u64);
    if let Some(f) = only {
        r.input("only", f);
    }
    let failed = results.iter().filter(|p| !p.passed).count();
    let rows: Vec<Value> = results
        .iter()
        .map(|p| {
            object([
                ("module", Value::String(p.module.into())),
                ("property", Value::String(p.name.into())),
                ("cases", Value::from(p.cases as u64)),
                ("max_residual", num(p.max_residual)),
                ("tolerance", num(p.tolerance)),
                ("errors", Value::from(p.errors as u64)),
                ("first_error", p.first_error.clone().map_or(Value::Null, Value::String)),
                ("status", Value::String(if p.passed { "pass" } else { "fail" }.into())),
            ])
        })
        .collect();
    r.output("properties", Value::Array(rows.clone()));
    r.output("total", results.len() as u64).output("failed", failed as u64);
    r.meta("diagonal_terms_omitted", true);
    r.table = Some((
        ["module", "property", "cases", "max_residual", "tolerance", "errors", "status"].map(String::from).to_vec(),
        rows.iter()
            .map(|row| {
                ["module", "property", "cases", "max_residual", "tolerance", "errors", "status"]
                    .iter()
                    .map(|k| row[*k].clone())
                    .collect()
            })
            .collect(),
    ));
    if failed > 0 || results.is_empty() {
        r.status = Status::Fail;
    }
    r
}

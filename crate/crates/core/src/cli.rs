//! Command-line front end. The `nidx` binary is a thin wrapper around [`run`].
//!
//! Exit codes: 0 success, 1 a suite claim failed, 2 invalid input,
//! 3 numerical diagnostic (for example an ambiguous null space).

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Value};

use crate::constructions::{
    absolute_sum, ck_operator, ck_space, esum, example_t1, example_t2, lift_operator, random_gauge,
    shift_bound_check, shift_operator, ShiftDirection,
};
use crate::error::{Error, Result};
use crate::lie::{detect_components, lie_basis, DEFAULT_CONSTRAINTS_PER_ENTRY};
use crate::operator::{numerical_radius, op_norm, Estimate, Operator};
use crate::quotient::{
    estimate_index_with, estimate_second_index_with, index_ratio, quotient_norm_with, IndexEstimate,
    QuotientOptions, SearchOptions,
};
use crate::report::{num, Report, Table};
use crate::space::{Gauge2d, SpaceSpec};
use crate::suite::{run_suite, write_csv, Status, SuiteConfig};

#[derive(Debug, Parser)]
#[command(
    name = "nidx",
    version,
    about = "Numerical radius, skew-hermitian algebras and numerical index estimates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args, Clone)]
struct Output {
    /// Seed for every random stream
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

/// [`Output`] flags accepted after the construct subcommand as well.
#[derive(Debug, Args, Clone)]
struct GlobalOutput {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl From<&GlobalOutput> for Output {
    fn from(g: &GlobalOutput) -> Self {
        Self {
            seed: g.seed,
            format: g.format,
            out: g.out.clone(),
        }
    }
}

#[derive(Debug, Args, Clone)]
struct SpaceArg {
    /// Space spec file (JSON); `-` reads stdin
    #[arg(long)]
    space: String,
}

#[derive(Debug, Args, Clone)]
struct OperatorArgs {
    /// Space spec file; optional when the matrix file is an operator JSON
    #[arg(long)]
    space: Option<String>,
    /// Matrix file: operator JSON, a JSON array of rows, or CSV rows
    #[arg(long)]
    matrix: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a space spec and print its resolved form and dual
    Space {
        #[command(flatten)]
        space: SpaceArg,
        #[command(flatten)]
        out: Output,
    },
    /// Operator norm estimate (exact on l_1, l_2, l_inf, planar gauges)
    Opnorm {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Numerical radius lower estimate with its duality-pair witness
    Radius {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        /// Largest accepted duality gap 1 - x*(x)
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Basis of the skew-hermitian operators Z(X) and its coordinate components
    Lie {
        #[command(flatten)]
        space: SpaceArg,
        /// Constraint count; defaults to 40 per matrix entry
        #[arg(long)]
        budget: Option<usize>,
        #[command(flatten)]
        out: Output,
    },
    /// Quotient norm |T + Z(X)|
    Quotient {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, default_value_t = 20_000)]
        budget: usize,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Upper estimate of the numerical index n(X)
    Index(IndexArgs),
    /// Upper estimate of the second numerical index n'(X)
    Index2(IndexArgs),
    /// Build sums, operators and model spaces as JSON
    Construct {
        #[command(subcommand)]
        what: Construct,
        #[command(flatten)]
        out: GlobalOutput,
    },
    /// Check the shift-operator inequalities on a planar absolute norm
    ShiftCheck {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long, default_value_t = 4000)]
        budget: usize,
        /// Accepted negative margin
        #[arg(long, default_value_t = 2e-2)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Run the registered reproduction checks
    #[command(alias = "paper-suite")]
    Suite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Multiplies every sampling budget
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Comma-separated claim id prefixes
        #[arg(long)]
        filter: Option<String>,
        /// Directory receiving report.json and report.csv
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Debug, Args)]
struct IndexArgs {
    #[command(flatten)]
    space: SpaceArg,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 4000)]
    budget: usize,
    /// Allowed drift when the witness ratio is re-evaluated with a fresh seed
    #[arg(long, default_value_t = 3e-2)]
    tol: f64,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Subcommand)]
enum Construct {
    /// Absolute sum of two spaces under a planar outer norm
    Sum {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long)]
        outer: String,
    },
    /// Sum of several spaces under an absolute outer norm of matching dimension
    Esum {
        #[arg(long)]
        outer: String,
        #[arg(long, num_args = 1.., required = true)]
        summands: Vec<String>,
    },
    /// Operator (y1|y) y1 + sqrt2 w1*(w) y2 on a Euclidean block summed under l_inf
    T1 {
        #[command(flatten)]
        space: SpaceArg,
    },
    /// Operator (y1|y) y1 + sqrt2 (y2|y) w1 on a Euclidean block summed under l_1
    T2 {
        #[command(flatten)]
        space: SpaceArg,
    },
    /// Coordinate shift on a planar absolute norm
    Shift {
        #[command(flatten)]
        space: SpaceArg,
        /// 12 for e2* x e1, 21 for e1* x e2
        #[arg(long, default_value = "12")]
        direction: String,
    },
    /// Extend an operator on the first summand by zero
    Lift {
        #[command(flatten)]
        space: SpaceArg,
        #[arg(long)]
        matrix: String,
    },
    /// l_2^2-valued functions on m points with the sup norm
    CkSpace {
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
    /// The operator (f, g) -> (f, sqrt2 f(t2)) on the m-point model
    Ck {
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
    /// Planar gauge: an l_p table with --p, otherwise a random mixture from --seed
    Gauge {
        #[arg(long)]
        p: Option<f64>,
    },
}

/// Reads a file, `-` for stdin, or inline JSON starting with `{` or `[`.
struct Inputs<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
}

impl Inputs<'_> {
    fn read(&mut self, arg: &str) -> Result<String> {
        let t = arg.trim_start();
        if t.starts_with('{') || t.starts_with('[') {
            return Ok(arg.to_string());
        }
        if arg == "-" {
            if self.stdin_used {
                return Err(Error::InvalidArgument("stdin can only be read once".into()));
            }
            self.stdin_used = true;
            let mut s = String::new();
            self.stdin.read_to_string(&mut s)?;
            return Ok(s);
        }
        std::fs::read_to_string(arg).map_err(|e| Error::InvalidArgument(format!("cannot read `{arg}`: {e}")))
    }

    fn space(&mut self, arg: &str) -> Result<SpaceSpec> {
        let text = self.read(arg)?;
        parse_space(&text).map_err(|e| match e {
            Error::Json(j) => Error::InvalidSpace {
                field: format!("{arg}: line {}, column {}", j.line(), j.column()),
                reason: j.to_string(),
            },
            other => other,
        })
    }

    /// Matrix rows plus the space embedded in an operator JSON, if any.
    fn rows(&mut self, arg: &str) -> Result<(Vec<Vec<f64>>, Option<SpaceSpec>)> {
        let text = self.read(arg)?;
        let trimmed = text.trim_start();
        if !(trimmed.starts_with('{') || trimmed.starts_with('[')) {
            return Ok((parse_csv_rows(&text)?, None));
        }
        match unwrap_envelope(serde_json::from_str(&text)?) {
            v @ Value::Array(_) => Ok((serde_json::from_value(v)?, None)),
            Value::Object(o) if o.contains_key("matrix") => {
                let rows = serde_json::from_value(o["matrix"].clone())?;
                let s = o.get("space").map(|s| parse_space_value(s.clone())).transpose()?;
                Ok((rows, s))
            }
            _ => Err(Error::InvalidArgument(
                "matrix JSON must be an array of rows or an object with a `matrix` field".into(),
            )),
        }
    }

    fn operator(&mut self, op: &OperatorArgs) -> Result<Operator> {
        let space = op.space.as_deref().map(|s| self.space(s)).transpose()?;
        let (rows, embedded) = self.rows(&op.matrix)?;
        let space = space.or(embedded).ok_or_else(|| {
            Error::InvalidArgument("--space is required unless the matrix file embeds its space".into())
        })?;
        Operator::from_rows(&rows, space)
    }
}

/// Reports wrap their payload; accept either form as input.
fn unwrap_envelope(v: Value) -> Value {
    match v {
        Value::Object(mut o) if o.contains_key("schema") && o.contains_key("result") => {
            o.remove("result").expect("checked")
        }
        other => other,
    }
}

fn parse_space_value(v: Value) -> Result<SpaceSpec> {
    let v = unwrap_envelope(v);
    // operator and Lie outputs carry their space under `space`
    let v = match v {
        Value::Object(mut o) if !o.contains_key("kind") && o.contains_key("space") => {
            o.remove("space").expect("checked")
        }
        other => other,
    };
    let j: crate::space::SpaceJson = serde_json::from_value(v)?;
    j.to_spec()
}

fn parse_space(text: &str) -> Result<SpaceSpec> {
    let v: Value = serde_json::from_str(text)?;
    let plain = matches!(&v, Value::Object(o) if o.contains_key("kind"));
    if plain {
        // keeps line numbers in type errors
        SpaceSpec::from_json_str(text)
    } else {
        parse_space_value(v)
    }
}

fn parse_csv_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = vec![];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("matrix CSV line {}: `{c}` is not a number", i + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

struct Rendered {
    report: Report,
    table: Table,
    /// Exit code after a successful write.
    code: i32,
}

fn estimate_table(e: &Estimate) -> Table {
    let mut t = Table::new(&["value", "direction", "budget", "seed", "bracket_low", "bracket_high"]);
    let (lo, hi) = e.bracket.map_or((String::new(), String::new()), |[a, b]| (num(a), num(b)));
    t.push(vec![
        num(e.value),
        serde_json::to_value(e.direction)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default(),
        e.budget.to_string(),
        e.seed.to_string(),
        lo,
        hi,
    ]);
    t
}

fn flat(m: &DMatrix<f64>) -> String {
    (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| num(m[(i, j)]))
        .collect::<Vec<_>>()
        .join(";")
}

fn index_command(name: &str, a: &IndexArgs, inputs: &mut Inputs, second: bool) -> Result<Rendered> {
    let space = inputs.space(&a.space.space)?;
    if a.restarts == 0 {
        return Err(Error::InvalidArgument("--restarts must be at least 1".into()));
    }
    let opts = SearchOptions::new(a.restarts, a.budget, a.out.seed);
    let (est, basis): (IndexEstimate, _) = if second {
        let e = estimate_second_index_with(&space, &opts)?;
        let b = if e.exact.is_none() && e.lie_dimension.unwrap_or(0) > 0 {
            let n = space.dim();
            Some(lie_basis(&space, DEFAULT_CONSTRAINTS_PER_ENTRY * n * n, a.out.seed)?)
        } else {
            None
        };
        (e, b)
    } else {
        (estimate_index_with(&space, &opts)?, None)
    };
    // independent re-evaluation of the witness ratio
    let check_seed = a.out.seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let recheck = if est.exact.is_some() {
        est.value
    } else {
        index_ratio(&est.witness, basis.as_ref(), a.budget, check_seed, 20)?.0
    };
    let deviation = (recheck - est.value).abs();
    let ok = deviation <= a.tol;
    let config = json!({
        "space": space, "restarts": a.restarts, "budget": a.budget, "seed": a.out.seed,
        "tol": a.tol, "format": a.out.format,
    });
    let result = json!({
        "estimate": est,
        "witness_check": {"seed": check_seed, "value": recheck, "deviation": deviation, "ok": ok},
    });
    let mut table = Table::new(&[
        "value", "direction", "numerator", "denominator", "lie_dimension", "restarts", "budget", "seed",
        "recheck", "witness",
    ]);
    table.push(vec![
        num(est.value),
        "upper".into(),
        num(est.numerator),
        num(est.denominator),
        est.lie_dimension.map_or(String::new(), |d| d.to_string()),
        est.restarts.to_string(),
        est.inner_budget.to_string(),
        est.seed.to_string(),
        num(recheck),
        flat(est.witness.matrix()),
    ]);
    Ok(Rendered {
        report: Report::new(name, config, result)?,
        table,
        code: if ok { 0 } else { 3 },
    })
}

fn construct(what: &Construct, out: &Output, inputs: &mut Inputs) -> Result<Rendered> {
    let (kind, config, result): (&str, Value, Value) = match what {
        Construct::Sum { left, right, outer } => {
            let (l, r, o) = (inputs.space(left)?, inputs.space(right)?, inputs.space(outer)?);
            let s = absolute_sum(l, r, o)?;
            ("sum", json!({}), serde_json::to_value(&s)?)
        }
        Construct::Esum { outer, summands } => {
            let e = inputs.space(outer)?;
            let parts = summands.iter().map(|s| inputs.space(s)).collect::<Result<Vec<_>>>()?;
            ("esum", json!({}), serde_json::to_value(esum(e, parts)?)?)
        }
        Construct::T1 { space } => ("t1", json!({}), example_t1(&inputs.space(&space.space)?)?.to_json_value()),
        Construct::T2 { space } => ("t2", json!({}), example_t2(&inputs.space(&space.space)?)?.to_json_value()),
        Construct::Shift { space, direction } => {
            let d: ShiftDirection = direction.parse()?;
            let u = shift_operator(&inputs.space(&space.space)?, d)?;
            (
                "shift",
                json!({"direction": direction, "source": u.source, "target": u.target}),
                u.operator().to_json_value(),
            )
        }
        Construct::Lift { space, matrix } => {
            let sum = inputs.space(&space.space)?;
            let (_, parts) = sum
                .sum_parts()
                .ok_or_else(|| Error::InvalidArgument("lift needs a sum space".into()))?;
            let left = parts[0].clone();
            // the operator acts on the first summand, whatever space its file names
            let t = Operator::from_rows(&inputs.rows(matrix)?.0, left)?;
            ("lift", json!({}), lift_operator(&t, &sum)?.to_json_value())
        }
        Construct::CkSpace { m } => ("ck-space", json!({"m": m}), serde_json::to_value(ck_space(*m)?)?),
        Construct::Ck { m } => ("ck", json!({"m": m}), ck_operator(*m)?.to_json_value()),
        Construct::Gauge { p } => {
            let g = match p {
                Some(p) => Gauge2d::lp(*p, crate::space::gauge::DEFAULT_INTERVALS)?,
                None => random_gauge(out.seed),
            };
            ("gauge", json!({"p": p, "seed": out.seed}), serde_json::to_value(SpaceSpec::gauge2d(g))?)
        }
    };
    let mut table = Table::new(&["kind", "json"]);
    table.push(vec![kind.into(), serde_json::to_string(&result)?]);
    let mut config = config;
    config["what"] = json!(kind);
    config["seed"] = json!(out.seed);
    Ok(Rendered {
        report: Report::new("construct", config, result)?,
        table,
        code: 0,
    })
}

fn execute(cmd: &Command, inputs: &mut Inputs) -> Result<(Rendered, Output)> {
    let r = match cmd {
        Command::Space { space, out } => {
            let s = inputs.space(&space.space)?;
            let dual = s.build_dual();
            let result = json!({
                "space": s, "dim": s.dim(), "description": s.describe(),
                "absolute": s.is_absolute(), "euclidean": s.is_hilbert(),
                "dual": dual, "dual_description": dual.describe(),
            });
            let mut t = Table::new(&["description", "dim", "absolute", "euclidean", "dual"]);
            t.push(vec![
                s.describe(),
                s.dim().to_string(),
                s.is_absolute().to_string(),
                s.is_hilbert().to_string(),
                dual.describe(),
            ]);
            let config = json!({"space": space.space, "seed": out.seed, "format": out.format});
            (
                Rendered {
                    report: Report::new("space", config, result)?,
                    table: t,
                    code: 0,
                },
                out.clone(),
            )
        }
        Command::Opnorm { op, budget, out } => {
            let t = inputs.operator(op)?;
            let e = op_norm(&t, *budget, out.seed)?;
            let config = json!({"operator": t, "budget": budget, "seed": out.seed, "format": out.format});
            let table = estimate_table(&e);
            (
                Rendered {
                    report: Report::new("opnorm", config, e)?,
                    table,
                    code: 0,
                },
                out.clone(),
            )
        }
        Command::Radius { op, budget, delta, out } => {
            let t = inputs.operator(op)?;
            let e = numerical_radius(&t, *budget, out.seed, *delta)?;
            let config = json!({
                "operator": t, "budget": budget, "delta": delta, "seed": out.seed, "format": out.format,
            });
            let table = estimate_table(&e);
            (
                Rendered {
                    report: Report::new("radius", config, e)?,
                    table,
                    code: 0,
                },
                out.clone(),
            )
        }
        Command::Lie { space, budget, out } => {
            let s = inputs.space(&space.space)?;
            let n = s.dim();
            let budget = budget.unwrap_or(DEFAULT_CONSTRAINTS_PER_ENTRY * n * n);
            let b = lie_basis(&s, budget, out.seed)?;
            let components = detect_components(&s, &b)?;
            let mut t = Table::new(&["element", "residual", "entries"]);
            for (k, (e, r)) in b.elements.iter().zip(&b.residuals).enumerate() {
                t.push(vec![k.to_string(), num(*r), flat(e)]);
            }
            let config = json!({"space": s, "budget": budget, "seed": out.seed, "format": out.format});
            let result = json!({"basis": b, "components": components});
            (
                Rendered {
                    report: Report::new("lie", config, result)?,
                    table: t,
                    code: 0,
                },
                out.clone(),
            )
        }
        Command::Quotient { op, budget, restarts, out } => {
            let t = inputs.operator(op)?;
            let n = t.dim();
            let b = lie_basis(t.space(), DEFAULT_CONSTRAINTS_PER_ENTRY * n * n, out.seed)?;
            let opts = QuotientOptions {
                restarts: *restarts,
                ..Default::default()
            };
            let e = quotient_norm_with(&t, &b, *budget, out.seed, &opts)?;
            let config = json!({
                "operator": t, "budget": budget, "restarts": restarts, "seed": out.seed, "format": out.format,
            });
            let table = estimate_table(&e);
            let result = json!({"estimate": e, "lie_dimension": b.dimension()});
            (
                Rendered {
                    report: Report::new("quotient", config, result)?,
                    table,
                    code: 0,
                },
                out.clone(),
            )
        }
        Command::Index(a) => (index_command("index", a, inputs, false)?, a.out.clone()),
        Command::Index2(a) => (index_command("index2", a, inputs, true)?, a.out.clone()),
        Command::Construct { what, out } => {
            let out = Output::from(out);
            (construct(what, &out, inputs)?, out)
        }
        Command::ShiftCheck { space, budget, tol, out } => {
            let s = inputs.space(&space.space)?;
            let rep = shift_bound_check(&s, *budget, out.seed)?;
            let pass = rep.margin >= -tol && rep.l1_margin >= -tol;
            let mut t = Table::new(&["k", "lhs", "rhs", "margin", "xi", "l1_margin", "pass"]);
            t.push(vec![
                num(rep.k),
                num(rep.lhs),
                num(rep.rhs),
                num(rep.margin),
                num(rep.xi),
                num(rep.l1_margin),
                pass.to_string(),
            ]);
            let config = json!({"space": s, "budget": budget, "tol": tol, "seed": out.seed, "format": out.format});
            let result = json!({"report": rep, "pass": pass});
            (
                Rendered {
                    report: Report::new("shift-check", config, result)?,
                    table: t,
                    code: 0,
                },
                out.clone(),
            )
        }
        Command::Suite { .. } => unreachable!("handled separately"),
    };
    Ok(r)
}

fn emit(rendered: &Rendered, out: &Output, stdout: &mut dyn Write) -> Result<()> {
    let text = match out.format {
        Format::Json => rendered.report.to_json(),
        Format::Csv => rendered.table.to_csv(&rendered.report.command)?,
    };
    match &out.out {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn suite_command(
    seed: u64,
    scale: f64,
    filter: &Option<String>,
    dir: &Option<PathBuf>,
    format: Format,
    stdout: &mut dyn Write,
) -> Result<i32> {
    let config = SuiteConfig {
        seed,
        scale,
        filter: filter.clone(),
    };
    let results = run_suite(&config)?;
    let report = Report::new(
        "suite",
        json!({"seed": seed, "scale": scale, "filter": filter}),
        &results,
    )?;
    let json_text = report.to_json();
    let mut csv_bytes = vec![];
    write_csv(&results, &mut csv_bytes)?;
    if let Some(dir) = dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.json"), &json_text)?;
        std::fs::write(dir.join("report.csv"), &csv_bytes)?;
    }
    match format {
        Format::Json => stdout.write_all(json_text.as_bytes())?,
        Format::Csv => stdout.write_all(&csv_bytes)?,
    }
    Ok(if results.iter().any(|r| r.status == Status::Fail) { 1 } else { 0 })
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("NIDX_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::InvalidArgument(format!("NIDX_THREADS=`{v}` is not a positive integer")))?;
        // a pool built earlier in this process keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        2
    } else {
        match e {
            Error::Io(_) => 2,
            _ => 3,
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(stderr, "error: {e}");
        return 2;
    }
    let mut inputs = Inputs {
        stdin,
        stdin_used: false,
    };
    let outcome = match &cli.command {
        Command::Suite {
            seed,
            scale,
            filter,
            out,
            format,
        } => suite_command(*seed, *scale, filter, out, *format, stdout),
        cmd => execute(cmd, &mut inputs).and_then(|(r, out)| {
            emit(&r, &out, stdout)?;
            Ok(r.code)
        }),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

//! Argument handling and report formatting for the `elliptica` binary.
//!
//! [`run`] never touches the process: it returns the exit code together
//! with everything that would have been written, so the whole surface can be
//! tested in-process.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use elliptica::arithcond::{check_condition, Mode, SacReport};
use elliptica::bounds::{
    bounds_report, decompose_projective, hilali_verdict, inequality_suite, BoundsReport,
    HilaliVerdict, Inequality,
};
use elliptica::census::{enumerate_sac, summarize, CensusEntry};
use elliptica::mixedhodge::{
    mh_box_inequality, mh_box_threshold, mh_model, mh_pi_model, specialize, BoxVerdict, MHPoly,
    DEFAULT_MAX_DEPTH,
};
use elliptica::modelspace::{exponent_data, invariants, InvariantReport};
use elliptica::numfmt::parse_ratio;
use elliptica::stabilize::{stabilization_threshold_with, Strategy, ThresholdResult};
use elliptica::{BigRational, Error, ExponentData, RatPoly, SpaceExpr, SpaceProfile};
use serde::Serialize;
use serde_json::Value;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 2;
/// A would-be counterexample: a pure census entry failing the inequality,
/// or a threshold above 3 at `eps = 1` on data where it is verified.
pub const EXIT_ALARM: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    Json,
    Table,
}

#[derive(Parser, Debug)]
#[command(
    name = "elliptica",
    version,
    about = "Exact invariants of rationally elliptic spaces"
)]
struct Cli {
    /// JSON output (default).
    #[arg(long, global = true, conflicts_with = "table")]
    json: bool,
    /// Human-oriented table output.
    #[arg(long, global = true)]
    table: bool,
    /// Worker threads; falls back to ELLIPTICA_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Reserved; all computations are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
struct Input {
    /// Model expression such as "S4 x CP2^3".
    #[arg(long)]
    space: Option<String>,
    /// Exponent data such as "b=2,3;a=1,1".
    #[arg(long)]
    data: Option<String>,
    /// A JSON report (or bare exponent data) carrying a "data" field.
    #[arg(long = "from-json", value_name = "FILE")]
    from_json: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ModeArg {
    Ac,
    Sac,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum StrategyArg {
    Fast,
    Sturm,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum MhOp {
    Model,
    Pi,
    Box,
    Threshold,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimensions, Euler characteristics and formal dimension.
    Invariants {
        #[command(flatten)]
        input: Input,
    },
    /// Arithmetic condition (A.C.) or strong arithmetic condition (S.A.C.).
    Sac {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "sac")]
        mode: ModeArg,
    },
    /// Upper-bound ladder on the total Betti number.
    Bounds {
        #[command(flatten)]
        input: Input,
    },
    /// Verdict on dim pi <= dim H together with the inequality suite.
    Hilali {
        #[command(flatten)]
        input: Input,
    },
    /// All S.A.C. data with formal dimension up to a cap, one JSON line each.
    Census {
        #[arg(long = "max-dim")]
        max_dim: u32,
        /// Print only the summary.
        #[arg(long)]
        summary: bool,
    },
    /// Stabilization threshold of n P^pi < P^n on [eps, infinity).
    Threshold {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value = "1")]
        eps: String,
        #[arg(long, value_enum, default_value = "fast")]
        strategy: StrategyArg,
    },
    /// Factor a polynomial as a product of projective (and sphere) polynomials.
    Decompose {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        allow_spheres: bool,
    },
    /// Mixed Hodge polynomials of products of projective spaces.
    Mh {
        #[arg(long)]
        space: String,
        #[arg(long, value_enum, default_value = "model")]
        op: MhOp,
        /// Power for `--op box`.
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value = "1")]
        eps: String,
        #[arg(long, default_value = "2")]
        rmax: String,
        #[arg(long = "max-depth", default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: u32,
    },
}

/// Renders a report in the requested style.
pub fn format_report<T: Serialize>(report: &T, style: Style) -> String {
    let value = serde_json::to_value(report).expect("reports serialize");
    match style {
        Style::Json => {
            let mut s = serde_json::to_string(&value).expect("values serialize");
            s.push('\n');
            s
        }
        Style::Table => {
            let mut out = String::new();
            table(&mut out, &value, 0);
            out
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(if *b { "yes" } else { "no" }.into()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            Some(format!(
                "[{}]",
                items
                    .iter()
                    .filter_map(scalar)
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        }
        _ => None,
    }
}

fn table(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            let width = map.keys().map(String::len).max().unwrap_or(0);
            for (k, item) in map {
                if k == "per_n" {
                    if let Value::Object(per_n) = item {
                        let marks: Vec<String> = per_n
                            .iter()
                            .map(|(n, ok)| {
                                format!(
                                    "{n}:{}",
                                    if ok == &Value::Bool(true) {
                                        "✓"
                                    } else {
                                        "✗"
                                    }
                                )
                            })
                            .collect();
                        let _ = writeln!(out, "{pad}{k:<width$}  {}", marks.join(" "));
                        continue;
                    }
                }
                match scalar(item) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k:<width$}  {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        table(out, item, indent + 1);
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                match scalar(item) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}[{i}]");
                        table(out, item, indent + 1);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other).unwrap_or_default());
        }
    }
}

/// Where the exponent data of a command came from.
struct Resolved {
    data: ExponentData,
    space: Option<SpaceExpr>,
}

impl Resolved {
    fn profile(&self) -> Result<SpaceProfile, Error> {
        match &self.space {
            Some(e) => Ok(SpaceProfile::from_expr(e)),
            None => SpaceProfile::from_data(self.data.clone()),
        }
    }
}

fn resolve(input: &Input) -> Result<Resolved, Error> {
    if let Some(s) = &input.space {
        let e: SpaceExpr = s.parse()?;
        return Ok(Resolved {
            data: exponent_data(&e),
            space: Some(e),
        });
    }
    if let Some(s) = &input.data {
        return Ok(Resolved {
            data: s.parse()?,
            space: None,
        });
    }
    let path = input.from_json.as_ref().expect("clap enforces one input");
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Domain(format!("{}: {e}", path.display())))?;
    from_json_text(&text)
}

/// Accepts a single JSON value, or the first line of a newline-delimited
/// stream. The value is either bare exponent data or an object with a
/// "data" field; a "space" field, when present, is preferred.
fn from_json_text(text: &str) -> Result<Resolved, Error> {
    let value: Value = serde_json::from_str(text)
        .or_else(|_| {
            serde_json::from_str(text.lines().find(|l| !l.trim().is_empty()).unwrap_or(""))
        })
        .map_err(|e| Error::Domain(format!("invalid JSON: {e}")))?;
    let bad = |e: serde_json::Error| Error::Domain(format!("invalid exponent data: {e}"));
    if let Some(Value::String(s)) = value.get("space") {
        let e: SpaceExpr = s.parse()?;
        return Ok(Resolved {
            data: exponent_data(&e),
            space: Some(e),
        });
    }
    let data = match value.get("data") {
        Some(d) => serde_json::from_value(d.clone()).map_err(bad)?,
        None => serde_json::from_value(value).map_err(bad)?,
    };
    Ok(Resolved { data, space: None })
}

#[derive(Serialize)]
struct WithData<'a, T: Serialize> {
    data: &'a ExponentData,
    #[serde(skip_serializing_if = "Option::is_none")]
    space: Option<String>,
    #[serde(flatten)]
    report: T,
}

fn with_data<T: Serialize>(r: &Resolved, report: T) -> WithData<'_, T> {
    WithData {
        data: &r.data,
        space: r.space.as_ref().map(ToString::to_string),
        report,
    }
}

#[derive(Serialize)]
struct HilaliReport {
    verdict: HilaliVerdict,
    inequalities: Vec<Inequality>,
}

#[derive(Serialize)]
struct DecomposeReport {
    poly: String,
    palindromic: bool,
    factors: Option<Vec<String>>,
    product: Option<String>,
}

#[derive(Serialize)]
struct MhPolyReport {
    space: String,
    op: &'static str,
    specialized: String,
    #[serde(flatten)]
    poly: MHPoly,
}

#[derive(Serialize)]
struct MhBoxReport {
    space: String,
    n: u32,
    #[serde(with = "ratio")]
    eps: BigRational,
    #[serde(with = "ratio")]
    rmax: BigRational,
    max_depth: u32,
    #[serde(flatten)]
    verdict: BoxVerdict,
}

#[derive(Serialize)]
struct MhThresholdReport {
    space: String,
    #[serde(with = "ratio")]
    rmax: BigRational,
    max_depth: u32,
    #[serde(flatten)]
    result: ThresholdResult,
}

mod ratio {
    pub fn serialize<S: serde::Serializer>(
        r: &elliptica::BigRational,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.serialize_str(&elliptica::numfmt::ratio_to_string(r))
    }
}

struct Emitted {
    text: String,
    alarm: bool,
}

fn emit<T: Serialize>(report: &T, style: Style) -> Emitted {
    Emitted {
        text: format_report(report, style),
        alarm: false,
    }
}

fn execute(command: &Command, style: Style) -> Result<Emitted, Error> {
    match command {
        Command::Invariants { input } => {
            let r = resolve(input)?;
            let report: InvariantReport = invariants(&r.data)?;
            Ok(emit(&with_data(&r, report), style))
        }
        Command::Sac { input, mode } => {
            let r = resolve(input)?;
            let mode = match mode {
                ModeArg::Ac => Mode::Ac,
                ModeArg::Sac => Mode::Sac,
            };
            let report: SacReport = check_condition(&r.data, mode);
            Ok(emit(&with_data(&r, report), style))
        }
        Command::Bounds { input } => {
            let r = resolve(input)?;
            let report: BoundsReport = bounds_report(&r.data)?;
            Ok(emit(&with_data(&r, report), style))
        }
        Command::Hilali { input } => {
            let r = resolve(input)?;
            let verdict = hilali_verdict(&r.data);
            let alarm = matches!(verdict, HilaliVerdict::PureFail { .. });
            let report = HilaliReport {
                verdict,
                inequalities: inequality_suite(&r.data),
            };
            let mut out = emit(&with_data(&r, report), style);
            out.alarm = alarm;
            Ok(out)
        }
        Command::Census { max_dim, summary } => {
            let entries: Vec<CensusEntry> = enumerate_sac(*max_dim)?;
            let alarm = entries
                .iter()
                .any(|e| matches!(e.verdict, HilaliVerdict::PureFail { .. }));
            let text = if *summary {
                format_report(&summarize(*max_dim, &entries), style)
            } else {
                entries.iter().map(|e| format_report(e, style)).collect()
            };
            Ok(Emitted { text, alarm })
        }
        Command::Threshold {
            input,
            eps,
            strategy,
        } => {
            let r = resolve(input)?;
            let eps = parse_ratio(eps)?;
            let strategy = match strategy {
                StrategyArg::Fast => Strategy::Fast,
                StrategyArg::Sturm => Strategy::SturmOnly,
            };
            let result = stabilization_threshold_with(&r.profile()?, &eps, strategy)?;
            let alarm = result.threshold > 3
                && eps == BigRational::from_integer(1.into())
                && matches!(hilali_verdict(&r.data), HilaliVerdict::Verified { .. });
            let mut out = emit(&with_data(&r, result), style);
            out.alarm = alarm;
            Ok(out)
        }
        Command::Decompose {
            poly,
            allow_spheres,
        } => {
            let p: RatPoly = poly.parse()?;
            let d = decompose_projective(&p, *allow_spheres);
            let report = DecomposeReport {
                poly: p.to_string(),
                palindromic: d.palindromic,
                product: d
                    .factors
                    .as_ref()
                    .map(|f| SpaceExpr::Product(f.clone()).normalize().to_string()),
                factors: d
                    .factors
                    .map(|f| f.iter().map(ToString::to_string).collect()),
            };
            Ok(emit(&report, style))
        }
        Command::Mh {
            space,
            op,
            n,
            eps,
            rmax,
            max_depth,
        } => {
            let e: SpaceExpr = space.parse()?;
            let space = e.to_string();
            match op {
                MhOp::Model | MhOp::Pi => {
                    let (poly, name) = match op {
                        MhOp::Model => (mh_model(&e)?, "model"),
                        _ => (mh_pi_model(&e)?, "pi"),
                    };
                    let report = MhPolyReport {
                        space,
                        op: name,
                        specialized: specialize(&poly).to_string(),
                        poly,
                    };
                    Ok(emit(&report, style))
                }
                MhOp::Box => {
                    let (eps, rmax) = (parse_ratio(eps)?, parse_ratio(rmax)?);
                    let verdict = mh_box_inequality(&e, *n, &eps, &rmax, *max_depth)?;
                    let report = MhBoxReport {
                        space,
                        n: *n,
                        eps,
                        rmax,
                        max_depth: *max_depth,
                        verdict,
                    };
                    Ok(emit(&report, style))
                }
                MhOp::Threshold => {
                    let (eps, rmax) = (parse_ratio(eps)?, parse_ratio(rmax)?);
                    let result = mh_box_threshold(&e, &eps, &rmax, *max_depth)?;
                    let report = MhThresholdReport {
                        space,
                        rmax,
                        max_depth: *max_depth,
                        result,
                    };
                    Ok(emit(&report, style))
                }
            }
        }
    }
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Error> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("ELLIPTICA_THREADS") {
        Ok(s) if !s.trim().is_empty() => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::Domain(format!("ELLIPTICA_THREADS is not a count: {s}"))),
        _ => Ok(None),
    }
}

fn failure(e: impl std::fmt::Display) -> Output {
    Output {
        code: EXIT_ERROR,
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    }
}

/// Parses `argv` (including the program name) and runs one subcommand.
pub fn run<I, S>(argv: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code: EXIT_ERROR,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Output {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let _ = cli.seed;
    let style = if cli.table { Style::Table } else { Style::Json };
    let threads = match thread_count(cli.threads) {
        Ok(t) => t,
        Err(e) => return failure(e),
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => return failure(e),
    };
    match pool.install(|| execute(&cli.command, style)) {
        Ok(out) => Output {
            code: if out.alarm { EXIT_ALARM } else { EXIT_OK },
            stdout: out.text,
            stderr: String::new(),
        },
        Err(e) => failure(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use elliptica::numfmt::ratio_to_string;

    #[test]
    fn json_from_report_data_and_bare_data() {
        let r = from_json_text(r#"{"data":{"b":[2,3],"a":[1,1]},"q":2}"#).unwrap();
        assert_eq!(r.data, "b=2,3;a=1,1".parse().unwrap());
        let r = from_json_text(r#"{"b":[4],"a":[2]}"#).unwrap();
        assert_eq!(r.data.to_string(), "b=4;a=2");
        let r = from_json_text("{\"data\":{\"b\":[2],\"a\":[1]},\"space\":\"CP1\"}\n{\"x\":1}\n")
            .unwrap();
        assert_eq!(r.space, Some("CP1".parse().unwrap()));
        assert!(from_json_text("{\"data\":{\"b\":[1],\"a\":[]}}").is_err());
        assert!(from_json_text("nope").is_err());
    }

    #[test]
    fn table_marks_per_n() {
        let v = serde_json::json!({"threshold": 3, "per_n": {"1": false, "2": false, "3": true}});
        let t = format_report(&v, Style::Table);
        assert!(t.contains("1:✗ 2:✗ 3:✓"), "{t}");
        assert!(t.contains("threshold"));
    }

    #[test]
    fn ratio_strings() {
        assert_eq!(ratio_to_string(&parse_ratio("0.5").unwrap()), "1/2");
    }
}

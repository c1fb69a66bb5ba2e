//! `wordmap` command line: argument parsing, dispatch and reports.

mod commands;
mod scan;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use wordmap_core::chars::DEFAULT_CLASS_CAP;
use wordmap_core::grp::{DEFAULT_MAX_ORDER, DEFAULT_TABLE_THRESHOLD};
use wordmap_core::{Cache, EnumLimits, Error, GroupData, GroupSpec, ImageStrategy};

pub const REPORT_SCHEMA: &str = "wordmap-report/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;
pub const EXIT_CAP: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "wordmap", version, about = "Word maps on finite classical groups")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Bundle cache directory.
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Largest group order to enumerate.
    #[arg(long, global = true, value_name = "CAP", default_value_t = DEFAULT_MAX_ORDER)]
    max_order: u64,
    /// Largest class count for character tables.
    #[arg(long, global = true, value_name = "CAP", default_value_t = DEFAULT_CLASS_CAP)]
    class_cap: usize,
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, value_name = "S", default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Group-level facts.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Word images, surjectivity and width.
    #[command(subcommand)]
    Word(WordCmd),
    /// Products of two squares.
    #[command(subcommand)]
    Squares(SquaresCmd),
    /// Character table with its integrity report.
    Chartable {
        spec: String,
        /// Include the character values.
        #[arg(long)]
        values: bool,
    },
    /// Build or verify certificates.
    #[command(subcommand)]
    Cert(CertCmd),
    /// Explicit constructions.
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Random subset triples above the size bound multiply to the group.
    Gowers {
        spec: String,
        #[arg(long, default_value_t = 200)]
        trials: u64,
    },
    /// Batch certificates over parameter ranges, written as CSV.
    Scan(scan::ScanArgs),
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    /// Order, center, classes, quasisimplicity.
    Info { spec: String },
}

#[derive(Args, Debug)]
struct WordArgs {
    spec: String,
    word: String,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    strategy: StrategyArg,
    /// Bound on word evaluations for the brute strategy.
    #[arg(long, default_value_t = wordmap_core::words::DEFAULT_EVAL_CAP)]
    eval_cap: u64,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug)]
enum StrategyArg {
    Auto,
    Brute,
    ClassReduced,
}

impl From<StrategyArg> for ImageStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Auto => ImageStrategy::Auto,
            StrategyArg::Brute => ImageStrategy::Brute,
            StrategyArg::ClassReduced => ImageStrategy::ClassReduced,
        }
    }
}

#[derive(Subcommand, Debug)]
enum WordCmd {
    /// Image size with covered and missed classes.
    Image(WordArgs),
    /// Whether the word map is onto, with missed class representatives.
    Surjective(WordArgs),
    /// Least m with w(G)^m = G.
    Width {
        #[command(flatten)]
        args: WordArgs,
        #[arg(long, default_value_t = 8)]
        max: u32,
    },
}

#[derive(Subcommand, Debug)]
enum SquaresCmd {
    /// Criterion decision per class with the exact count cross-check.
    Check { spec: String },
}

#[derive(Subcommand, Debug)]
enum CertCmd {
    /// x^{2^a} y^{2^a} misses −I in SL(2,q).
    Sl2 {
        q: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// x^{p^a} y^{p^a} misses a central element of SL^ε(n,q) or GL^ε(n,q).
    Main2 {
        n: u64,
        q: u64,
        #[arg(allow_hyphen_values = true, value_parser = parse_eps)]
        eps: i8,
        p: u64,
        variant: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// x^{p^a} y^{p^a} with a = 2 (p odd) or 3 (p = 2) under congruences.
    Main3 {
        n: u64,
        q: u64,
        #[arg(allow_hyphen_values = true, value_parser = parse_eps)]
        eps: i8,
        p: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// x⁹y⁹ on SL^ε(n,q) (variant i) or x⁸y⁸ on Sp(2n,q) (variant ii).
    Main4 {
        variant: String,
        n: u64,
        q: u64,
        #[arg(allow_hyphen_values = true, value_parser = parse_eps, default_value = "+1")]
        eps: i8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build x²y² decompositions of every class.
    Squares {
        spec: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-run the verification embedded in a certificate file.
    Verify { file: PathBuf },
}

#[derive(Subcommand, Debug)]
enum WitnessCmd {
    /// x, y ∈ SL(n,q) with x²y² a generator of the 2-part of the center.
    Central {
        n: usize,
        q: u64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_eps, default_value = "+1")]
        eps: i8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub(crate) fn parse_eps(s: &str) -> Result<i8, String> {
    match s {
        "1" | "+1" | "+" => Ok(1),
        "-1" | "-" => Ok(-1),
        _ => Err(format!("ε must be +1 or -1, got {s:?}")),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: Vec<String>,
    pub group: Option<String>,
    pub timings_ms: BTreeMap<String, u64>,
    pub result: Value,
    pub warnings: Vec<String>,
    pub error: Option<ErrorInfo>,
}

impl Report {
    fn new(command: Vec<String>) -> Self {
        Report {
            schema: REPORT_SCHEMA.to_string(),
            command,
            group: None,
            timings_ms: BTreeMap::new(),
            result: Value::Null,
            warnings: Vec::new(),
            error: None,
        }
    }

    /// Plain-text rendering: one `key: value` line per result field.
    pub fn render_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command.join(" "));
        if let Some(g) = &self.group {
            out += &format!("group: {g}\n");
        }
        match &self.result {
            Value::Object(map) => {
                for (k, v) in map {
                    out += &format!("{k}: {}\n", scalar_text(v));
                }
            }
            Value::Null => {}
            v => out += &format!("result: {}\n", scalar_text(v)),
        }
        for w in &self.warnings {
            out += &format!("warning: {w}\n");
        }
        if let Some(e) = &self.error {
            out += &format!("error ({}): {}\n", e.kind, e.message);
        }
        let total: u64 = self.timings_ms.values().sum();
        out += &format!("time: {total} ms\n");
        out
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        v => v.to_string(),
    }
}

/// Outcome of one invocation.
pub struct Execution {
    pub code: i32,
    /// Absent when argument parsing fails or help was requested.
    pub report: Option<Report>,
    pub stdout: String,
    pub stderr: String,
}

/// Exit code for an engine error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } | Error::FieldTooLarge { .. } | Error::TooManyClasses { .. } => EXIT_CAP,
        Error::Verification(_) | Error::Inconsistency(_) => EXIT_VERIFICATION,
        _ => EXIT_ERROR,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match exit_code(e) {
        EXIT_CAP => "cap_exceeded",
        EXIT_VERIFICATION => "verification_failure",
        _ => "error",
    }
}

/// Failure inside a command: an engine error or a check that came out false.
pub(crate) enum Failure {
    Engine(Error),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Engine(Error::Io(e))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Engine(Error::Json(e))
    }
}

pub(crate) type CmdResult = Result<Value, Failure>;

/// Shared state for one invocation.
pub(crate) struct Ctx {
    global: Global,
    cache: Option<Cache>,
    report: Report,
}

impl Ctx {
    pub(crate) fn limits(&self) -> EnumLimits {
        EnumLimits { max_order: self.global.max_order, table_threshold: DEFAULT_TABLE_THRESHOLD }
    }

    pub(crate) fn time<T>(&mut self, label: &str, f: impl FnOnce(&mut Self) -> T) -> T {
        let start = Instant::now();
        let out = f(self);
        *self.report.timings_ms.entry(label.to_string()).or_default() += start.elapsed().as_millis() as u64;
        out
    }

    pub(crate) fn group(&mut self, spec: &str) -> Result<GroupData, Failure> {
        let spec: GroupSpec = spec.parse()?;
        self.group_spec(&spec)
    }

    pub(crate) fn group_spec(&mut self, spec: &GroupSpec) -> Result<GroupData, Failure> {
        self.report.group = Some(spec.to_string());
        let limits = self.limits();
        let data = self.time("enumerate", |ctx| GroupData::load_or_build(spec, limits, ctx.cache.as_ref()))?;
        Ok(data)
    }

    pub(crate) fn warn(&mut self, w: impl Into<String>) {
        self.report.warnings.push(w.into());
    }
}

/// Parses `argv` (program name first), runs the command and renders the report.
pub fn execute<I, T>(argv: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let (stdout, stderr) = if e.use_stderr() { (String::new(), text) } else { (text, String::new()) };
            return Execution { code, report: None, stdout, stderr };
        }
    };
    let command: Vec<String> = argv.iter().skip(1).map(|s| s.to_string_lossy().into_owned()).collect();
    let json = cli.global.json;
    let mut ctx = Ctx {
        cache: cli.global.cache.clone().map(Cache::new),
        global: cli.global.clone(),
        report: Report::new(command),
    };
    let outcome = match cli.global.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&mut ctx, cli.command)),
            Err(e) => Err(Failure::Engine(Error::Unsupported(format!("thread pool: {e}")))),
        },
        None => commands::dispatch(&mut ctx, cli.command),
    };
    let mut report = ctx.report;
    let (code, stderr) = match outcome {
        Ok(result) => {
            report.result = result;
            (EXIT_OK, String::new())
        }
        Err(failure) => {
            let (code, info) = match failure {
                Failure::Engine(e) => {
                    (exit_code(&e), ErrorInfo { kind: error_kind(&e).into(), message: e.to_string() })
                }
                Failure::Verification(message) => {
                    (EXIT_VERIFICATION, ErrorInfo { kind: "verification_failure".into(), message })
                }
            };
            let line = format!("wordmap: {}\n", info.message);
            report.error = Some(info);
            (code, line)
        }
    };
    let stdout = if json {
        serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
    } else {
        report.render_text()
    };
    Execution { code, report: Some(report), stdout, stderr }
}

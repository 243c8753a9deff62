//! The `wb` command line.
//!
//! Every subcommand prints one JSON envelope on stdout:
//!
//! ```json
//! { "tool": "wb", "version": "0.1.0", "command": "eval",
//!   "config": { ... }, "result": { ... } }
//! ```
//!
//! plus `"wall_time_s"` when `--timing` is given (it is off by default so
//! that reports are byte-for-byte reproducible). Failures print
//! `{"error": {"kind", "code", "message"}}` on stderr. Exit codes: 0 ok,
//! 1 input error, 2 budget exceeded, 3 only inconclusive results.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value as Json};
use thiserror::Error;

mod commands;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable capping every cell/tuple budget.
pub const BUDGET_ENV: &str = "WB_BUDGET_CELLS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 1,
            CliError::Budget(_) => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Budget(_) => "budget",
            CliError::Io(_) => "io",
        }
    }
}

pub(crate) fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "wb", version, about = "Definable sets, motivic integrals and transfer experiments over local fields")]
pub struct Cli {
    /// Add the wall time to the envelope (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Parse a formula or workbook and print its canonical form.
    Parse(ParseArgs),
    /// Evaluate a sentence (or a formula at an assignment).
    Eval(EvalArgs),
    /// List the points of a definable set inside the search box.
    Enumerate(EnumerateArgs),
    /// Integrate a motivic or exponential function.
    Integrate(IntegrateArgs),
    /// Run transfer experiments over Q_p and F_p((t)).
    Transfer(TransferArgs),
    /// Boundedness check, or fit of a uniform bound p^{a + b|λ|}.
    Bound(BoundArgs),
    /// Evaluate or bound a term sum.
    Zsum(ZsumArgs),
}

/// Search windows shared by the evaluating subcommands.
#[derive(Args, Clone, Debug, Serialize)]
pub struct BoxArgs {
    /// Valuation window `lo..hi` for valued-field quantifiers and cells.
    #[arg(long, default_value = "-3..9", value_parser = parse_range, allow_hyphen_values = true)]
    pub vrange: (i64, i64),
    /// Digits per valued-field cell.
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// Value-group window `lo..hi`.
    #[arg(long, default_value = "-12..12", value_parser = parse_range, allow_hyphen_values = true)]
    pub zwindow: (i64, i64),
    /// Cell budget (also capped by WB_BUDGET_CELLS).
    #[arg(long)]
    pub budget: Option<u64>,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct ParseArgs {
    pub file: PathBuf,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct EvalArgs {
    /// `Qp:p` or `FpT:p`, optionally `:N=precision`.
    #[arg(long)]
    pub field: String,
    /// Formula file: a bare formula or a workbook.
    #[arg(long)]
    pub formula: PathBuf,
    /// Named formula inside a workbook.
    #[arg(long)]
    pub name: Option<String>,
    /// Values of the free variables, e.g. `x=Qp(5){v=0;7}, k=3`.
    #[arg(long, default_value = "")]
    pub assign: String,
    #[command(flatten)]
    pub window: BoxArgs,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub field: String,
    #[arg(long)]
    pub formula: PathBuf,
    #[arg(long)]
    pub name: Option<String>,
    /// Variables held fixed.
    #[arg(long, default_value = "")]
    pub assign: String,
    /// Number of tuples listed in the report (all are counted).
    #[arg(long, default_value_t = 50)]
    pub limit: usize,
    #[command(flatten)]
    pub window: BoxArgs,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct IntegrateArgs {
    /// Workbook or block file.
    pub file: PathBuf,
    #[arg(long)]
    pub field: String,
    /// Block to integrate (default: the first one).
    #[arg(long)]
    pub name: Option<String>,
    /// `O` (unit polydisc), `all`, `@formula`, or formula text.
    #[arg(long, default_value = "all")]
    pub domain: String,
    /// Additive character twist `c` (ψ_c(x) = ψ(cx)).
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub twist: i64,
    /// Run the integrability heuristic instead of integrating.
    #[arg(long)]
    pub check: bool,
    #[command(flatten)]
    pub window: BoxArgs,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct TransferArgs {
    /// Statement workbook.
    pub file: PathBuf,
    /// Comma-separated primes.
    #[arg(long, default_value = "5,7,11,13", value_delimiter = ',')]
    pub primes: Vec<u32>,
    /// Run only this statement.
    #[arg(long)]
    pub statement: Option<String>,
    /// Also write the rows as CSV to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Relative precision of the fields.
    #[arg(long, default_value_t = wb_core::localfield::DEFAULT_PRECISION)]
    pub precision: usize,
    #[command(flatten)]
    pub window: BoxArgs,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct BoundArgs {
    pub file: PathBuf,
    /// Fields, comma-separated (`--fit` pools them).
    #[arg(long, value_delimiter = ',', required = true)]
    pub field: Vec<String>,
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, default_value = "all")]
    pub domain: String,
    /// Fit `|f| ≤ p^{a + b|λ|}` instead of a plain boundedness check.
    #[arg(long)]
    pub fit: bool,
    #[command(flatten)]
    pub window: BoxArgs,
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct ZsumArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub name: Option<String>,
    /// `q=5 L=2` (space or comma separated).
    #[arg(long)]
    pub eval: Option<String>,
    /// Certify exponents `(a, b)` with `|h| ≤ q^{a + b|λ|}` for `q ≥ q0`.
    #[arg(long)]
    pub bound: bool,
    #[arg(long, default_value_t = wb_core::zsums::DEFAULT_Q0)]
    pub q0: u64,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected `lo..hi`, got `{s}`"))?;
    let lo = a.trim().parse::<i64>().map_err(|e| format!("`{a}`: {e}"))?;
    let hi = b.trim().trim_start_matches('=').parse::<i64>().map_err(|e| format!("`{b}`: {e}"))?;
    if lo > hi {
        return Err(format!("empty range `{s}`"));
    }
    Ok((lo, hi))
}

/// A subcommand's result: the payload, and whether it is inconclusive.
pub(crate) struct Outcome {
    pub payload: Json,
    pub inconclusive: bool,
}

/// Runs `wb` with `args` (including the program name); returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            report_error(err, &CliError::Input(e.render().to_string().trim_end().to_string()));
            return 1;
        }
    };
    let start = Instant::now();
    let budget_cap = match std::env::var(BUDGET_ENV) {
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(n) => Some(n),
            Err(e) => {
                report_error(err, &CliError::Input(format!("{BUDGET_ENV}=`{v}`: {e}")));
                return 1;
            }
        },
        Err(_) => None,
    };
    match commands::dispatch(&cli.command, budget_cap) {
        Ok(outcome) => {
            let mut env = json!({
                "tool": "wb",
                "version": VERSION,
                "command": command_name(&cli.command),
                "config": config_echo(&cli.command, budget_cap),
                "result": outcome.payload,
            });
            if cli.timing {
                env["wall_time_s"] = json!(start.elapsed().as_secs_f64());
            }
            let text = serde_json::to_string_pretty(&env).expect("JSON values serialize") + "\n";
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text),
                None => out.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                report_error(err, &CliError::Io(e));
                return 1;
            }
            if outcome.inconclusive {
                3
            } else {
                0
            }
        }
        Err(e) => {
            report_error(err, &e);
            e.code()
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Parse(_) => "parse",
        Command::Eval(_) => "eval",
        Command::Enumerate(_) => "enumerate",
        Command::Integrate(_) => "integrate",
        Command::Transfer(_) => "transfer",
        Command::Bound(_) => "bound",
        Command::Zsum(_) => "zsum",
    }
}

fn config_echo(c: &Command, budget_cap: Option<u64>) -> Json {
    let mut v = serde_json::to_value(c).expect("arguments serialize");
    // Externally tagged: {"eval": {...}} → {...}.
    if let Json::Object(m) = &mut v {
        if let Some((_, inner)) = m.iter_mut().next() {
            v = inner.take();
        }
    }
    if let Json::Object(m) = &mut v {
        m.insert("budget_env".into(), json!(budget_cap));
    }
    v
}

fn report_error(err: &mut dyn Write, e: &CliError) {
    let body = json!({ "error": { "kind": e.kind(), "code": e.code(), "message": e.to_string() } });
    let _ = writeln!(err, "{body}");
}

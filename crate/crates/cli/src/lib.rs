//! Command-line front end: argument definitions, command dispatch and exit codes.

pub mod sweep;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fermat_pr_core::padic::PAdicParams;
use fermat_pr_core::{
    build_constraints, classify, enumerate_solutions, format_equation, parse_equation, rado_threshold_with,
    scan_params, search_constraints, verify_padic, Budget, EnumOptions, Equation, ParseError,
};
use serde::Serialize;
use serde_json::value::RawValue;

use sweep::{run_sweep, SweepSpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error at position {}: {}", .0.position, .0.message)]
    Parse(ParseError),
    #[error("{0}: {1}")]
    Io(String, #[source] io::Error),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error(transparent)]
    Core(fermat_pr_core::Error),
}

impl From<fermat_pr_core::Error> for CliError {
    fn from(err: fermat_pr_core::Error) -> Self {
        match err {
            fermat_pr_core::Error::OverflowDetected(what) => CliError::Overflow(what),
            fermat_pr_core::Error::Parse(p) => CliError::Parse(p),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Overflow(_) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fermat-pr", version, about = "Partition regularity of Fermat-like equations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Jsonl,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Constraints {
    /// Keep constant solutions (x_i all equal) as constraints.
    #[arg(long)]
    pub include_constant: bool,
    /// Only solutions with pairwise distinct values.
    #[arg(long)]
    pub distinct: bool,
}

impl Constraints {
    fn options(&self, max_n: u32) -> EnumOptions {
        EnumOptions {
            max_value: max_n as u64,
            exclude_constant: !self.include_constant,
            distinct_values: self.distinct,
        }
    }
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    #[arg(long)]
    pub budget_nodes: Option<u64>,
    #[arg(long)]
    pub budget_secs: Option<f64>,
}

impl BudgetArgs {
    fn budget(&self) -> Result<Budget, CliError> {
        let max_time = match self.budget_secs {
            Some(s) if !(s.is_finite() && s >= 0.0) => {
                return Err(CliError::Usage(format!("--budget-secs must be a nonnegative number, got {s}")))
            }
            Some(s) => Some(Duration::from_secs_f64(s)),
            None => None,
        };
        Ok(Budget { max_nodes: self.budget_nodes, max_time })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse an equation and print its canonical form.
    Parse {
        #[arg(long)]
        eq: String,
        #[command(flatten)]
        output: Output,
    },
    /// Certify partition regularity or its failure.
    Classify {
        #[arg(long)]
        eq: String,
        #[arg(long, env = "FERMATPR_PMAX", default_value_t = fermat_pr_core::DEFAULT_P_MAX)]
        pmax: u64,
        #[command(flatten)]
        output: Output,
    },
    /// List solutions with every value in [1..max-n].
    Solutions {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        max_n: u32,
        #[command(flatten)]
        constraints: Constraints,
        #[command(flatten)]
        output: Output,
    },
    /// Search for a coloring of [1..max-n] without monochromatic solutions.
    ColorSearch {
        #[arg(long)]
        eq: String,
        #[arg(long, default_value_t = 2)]
        colors: u32,
        #[arg(long)]
        max_n: u32,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        constraints: Constraints,
        #[command(flatten)]
        output: Output,
    },
    /// Smallest N ≤ max-n at which every coloring has a monochromatic solution.
    Rado {
        #[arg(long)]
        eq: String,
        #[arg(long, default_value_t = 2)]
        colors: u32,
        #[arg(long)]
        max_n: u32,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        constraints: Constraints,
        #[command(flatten)]
        output: Output,
    },
    /// Scan base-p colorings for ones avoiding monochromatic solutions.
    Padic {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        max_n: u32,
        /// Primes, as `a..b` or `a,b,c`.
        #[arg(long, default_value = "2,3,5,7")]
        p: String,
        /// Valuation moduli.
        #[arg(long = "m", default_value = "1..4")]
        m: String,
        /// Unit-residue depths.
        #[arg(long = "d", default_value = "0..2")]
        d: String,
        /// Check a single (p, M, D) and report the first violation.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Classify every instantiation of a template into a JSON Lines store.
    Sweep {
        /// Equation with `{name}` placeholders.
        #[arg(long)]
        template: String,
        /// `name=a..b` or `name=a,b,c`; repeat per placeholder.
        #[arg(long = "range", required = true)]
        ranges: Vec<String>,
        #[arg(long, env = "FERMATPR_PMAX", default_value_t = fermat_pr_core::DEFAULT_P_MAX)]
        pmax: u64,
        /// The store; existing records are kept and skipped.
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse(text: &str) -> Result<Equation, CliError> {
    parse_equation(text).map_err(CliError::Parse)
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::Io(p.display().to_string(), e))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)
}

/// One object for `json` and `jsonl`; CSV is not offered for nested records.
fn emit_object<T: Serialize>(output: &Output, value: &T) -> Result<(), CliError> {
    if output.format == Format::Csv {
        return Err(CliError::Usage("CSV output is not available for this command".into()));
    }
    let mut out = open_output(&output.out)?;
    write_json(&mut *out, value).and_then(|_| out.flush()).map_err(io_error(&output.out))
}

fn io_error(path: &Option<PathBuf>) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| {
        let name = path.as_ref().map_or("<stdout>".to_string(), |p| p.display().to_string());
        CliError::Io(name, e)
    }
}

fn csv_error(path: &Option<PathBuf>) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| io_error(path)(io::Error::other(e))
}

#[derive(Serialize)]
struct ParsedEquation<'a> {
    text: &'a str,
    formatted: String,
    equation: Box<RawValue>,
}

#[derive(Serialize)]
struct PadicCheck {
    #[serde(flatten)]
    params: PAdicParams,
    #[serde(rename = "N")]
    n: u32,
    valid: bool,
    violation: Option<Vec<u32>>,
}

fn parse_values<T: std::str::FromStr + TryFrom<i64>>(text: &str, what: &str) -> Result<Vec<T>, CliError> {
    sweep::parse_range(text)?
        .into_iter()
        .map(|v| T::try_from(v).map_err(|_| CliError::Usage(format!("{what} value {v} is out of range"))))
        .collect()
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Parse { eq, output } => {
            let equation = parse(&eq)?;
            let parsed = ParsedEquation {
                text: &eq,
                formatted: format_equation(&equation),
                equation: RawValue::from_string(equation.to_canonical_json()).expect("canonical JSON is valid"),
            };
            emit_object(&output, &parsed)
        }
        Command::Classify { eq, pmax, output } => {
            let cert = classify(&parse(&eq)?, pmax)?;
            if output.format != Format::Csv {
                return emit_object(&output, &cert);
            }
            let mut w = csv::Writer::from_writer(open_output(&output.out)?);
            let rules: Vec<&str> = cert.rules().iter().map(|r| r.name()).collect();
            let prime = cert.witness_prime().map(|p| p.to_string()).unwrap_or_default();
            w.write_record(["equation", "verdict", "rules", "prime"]).map_err(csv_error(&output.out))?;
            w.write_record([eq.as_str(), &cert.verdict.to_string(), &rules.join(";"), &prime])
                .map_err(csv_error(&output.out))?;
            w.flush().map_err(io_error(&output.out))
        }
        Command::Solutions { eq, max_n, constraints, output } => {
            let equation = parse(&eq)?;
            let solutions = enumerate_solutions(&equation, &constraints.options(max_n))?;
            match output.format {
                Format::Json => emit_object(&output, &solutions),
                Format::Jsonl => {
                    let mut out = open_output(&output.out)?;
                    solutions
                        .iter()
                        .try_for_each(|t| write_json(&mut *out, t))
                        .and_then(|_| out.flush())
                        .map_err(io_error(&output.out))
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(open_output(&output.out)?);
                    w.write_record(equation.variables()).map_err(csv_error(&output.out))?;
                    for t in &solutions {
                        w.write_record(t.values().map(|v| v.to_string())).map_err(csv_error(&output.out))?;
                    }
                    w.flush().map_err(io_error(&output.out))
                }
            }
        }
        Command::ColorSearch { eq, colors, max_n, budget, constraints, output } => {
            let equation = parse(&eq)?;
            let set = build_constraints(&equation, max_n, &constraints.options(max_n))?;
            let result = search_constraints(&set, colors, budget.budget()?)?;
            emit_object(&output, &result)
        }
        Command::Rado { eq, colors, max_n, budget, constraints, output } => {
            let equation = parse(&eq)?;
            let threshold =
                rado_threshold_with(&equation, colors, max_n, &constraints.options(max_n), budget.budget()?)?;
            emit_object(&output, &threshold)
        }
        Command::Padic { eq, max_n, p, m, d, verify, output } => {
            let equation = parse(&eq)?;
            let ps: Vec<u64> = parse_values(&p, "p")?;
            let ms: Vec<u32> = parse_values(&m, "M")?;
            let ds: Vec<u32> = parse_values(&d, "D")?;
            if verify {
                let ([p], [m], [d]) = (&ps[..], &ms[..], &ds[..]) else {
                    return Err(CliError::Usage("--verify needs a single value for each of --p, --m, --d".into()));
                };
                let params = PAdicParams::new(*p, *m, *d)?;
                let check = verify_padic(&equation, &params, max_n)?;
                let report = PadicCheck { params, n: max_n, valid: check.valid, violation: check.violation };
                return emit_object(&output, &report);
            }
            let invalid: Vec<u64> = ps.iter().copied().filter(|&p| PAdicParams::new(p, 1, 0).is_err()).collect();
            if !invalid.is_empty() {
                return Err(CliError::Usage(format!("not prime: {invalid:?}")));
            }
            let report = scan_params(&equation, &ps, &ms, &ds, max_n)?;
            match output.format {
                Format::Json => emit_object(&output, &report),
                Format::Jsonl => {
                    let mut out = open_output(&output.out)?;
                    report
                        .iter()
                        .try_for_each(|e| write_json(&mut *out, e))
                        .and_then(|_| out.flush())
                        .map_err(io_error(&output.out))
                }
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(open_output(&output.out)?);
                    report.iter().try_for_each(|e| w.serialize(e)).map_err(csv_error(&output.out))?;
                    w.flush().map_err(io_error(&output.out))
                }
            }
        }
        Command::Sweep { template, ranges, pmax, out } => {
            let spec = SweepSpec::new(&template, &ranges, pmax, out)?;
            let summary = run_sweep(&spec)?;
            print!("{}", summary.table());
            Ok(())
        }
    }
}

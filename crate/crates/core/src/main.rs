use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lpball::montecarlo::MCConfig;
use lpball::report::{self, Format, RowOptions};
use lpball::verify::{self, Suite, VerifyOptions};
use lpball::{Dimension, Error, Execution, Exponent, TruncationPolicy};

#[derive(Parser)]
#[command(name = "lpball", version, about = "Moment functional f(n, p) of unit p-balls: evaluate, scan, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one (n, p) cell.
    Eval {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        p: String,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a grid of cells.
    Scan {
        /// Dimensions: `4`, `2..5` (inclusive) or a comma list of either.
        #[arg(long)]
        n: String,
        /// Comma-separated exponents; decimals or `inf`.
        #[arg(long)]
        p: String,
        #[command(flatten)]
        common: Common,
    },
    /// Run verification suites.
    Verify {
        /// Suite name (same as --suite).
        #[arg(value_name = "SUITE")]
        name: Option<String>,
        #[arg(long)]
        suite: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Monte Carlo pairs; enables the Monte Carlo route for eval and scan.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    streams: u32,
    #[arg(long, default_value_t = 1_000_000)]
    max_terms: u64,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

impl Common {
    fn policy(&self) -> Result<TruncationPolicy, Error> {
        TruncationPolicy::new(self.max_terms, self.rel_tol, true)
    }

    fn mc(&self, default_samples: Option<u64>) -> Result<Option<MCConfig>, Error> {
        self.samples.or(default_samples).map(|s| MCConfig::new(s, self.seed, self.streams)).transpose()
    }

    fn format(&self) -> Format {
        match self.format {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
        }
    }
}

fn parse_dims(list: &str) -> Result<Vec<Dimension>, Error> {
    let bad = || Error::Argument(format!("cannot parse dimension list {list:?}"));
    let mut out = Vec::new();
    for part in list.split(',') {
        let part = part.trim();
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
            let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            for n in lo..=hi {
                out.push(Dimension::new(n)?);
            }
        } else {
            out.push(Dimension::new(part.parse().map_err(|_| bad())?)?);
        }
    }
    Ok(out)
}

fn parse_exponents(list: &str) -> Result<Vec<Exponent>, Error> {
    list.split(',').map(str::parse).collect()
}

enum Failure {
    Usage(Error),
    Verdict,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Eval { n, p, common } => {
            let opts = RowOptions { policy: common.policy()?, mc: common.mc(None)?, exec: Execution::default() };
            let row = report::evaluate_row(Dimension::new(n)?, p.parse()?, &opts);
            let _ = out.write_all(report::render(&[row], common.format()).as_bytes());
            if !row.passes() {
                return Err(Failure::Verdict);
            }
        }
        Command::Scan { n, p, common } => {
            let opts = RowOptions { policy: common.policy()?, mc: common.mc(None)?, exec: Execution::default() };
            let scan = report::scan(&parse_dims(&n)?, &parse_exponents(&p)?, &opts)?;
            let _ = out.write_all(report::render(&scan.rows, common.format()).as_bytes());
            for m in &scan.monotonicity {
                let side = match m.regime {
                    lpball::moments::Regime::Increasing => "[1,2] increasing",
                    lpball::moments::Regime::Decreasing => "[2,inf] decreasing",
                };
                eprintln!("monotonicity n={} {side} over {} points: {}", m.n, m.points, verdict(m.verdict));
            }
            if !scan.passes() {
                return Err(Failure::Verdict);
            }
        }
        Command::Verify { name, suite, common } => {
            let suite: Suite = match (name, suite) {
                (Some(a), Some(b)) if a != b => {
                    return Err(Error::Argument(format!("conflicting suites {a:?} and {b:?}")).into())
                }
                (Some(s), _) | (None, Some(s)) => s.parse()?,
                (None, None) => Suite::All,
            };
            let opts = VerifyOptions {
                policy: common.policy()?,
                mc: common.mc(Some(1_000_000))?.expect("default samples"),
                exec: Execution::default(),
            };
            let checks = verify::run(suite, &opts);
            let passed = checks.iter().filter(|c| c.passed).count();
            for c in &checks {
                let _ = writeln!(out, "{} [{}] {}: {}", verdict(c.passed), c.suite, c.name, c.detail);
            }
            let all = passed == checks.len();
            let _ = writeln!(out, "overall: {} ({passed}/{} checks)", verdict(all), checks.len());
            if !all {
                return Err(Failure::Verdict);
            }
        }
    }
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verdict) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chebyshev_auth::bench::{self, BenchError, BenchReport};
use chebyshev_auth::harness::{self, HarnessError};
use clap::{Parser, Subcommand};

const EXIT_FLAGS: u8 = 2;
const EXIT_ASSERTION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "chebauth",
    version,
    about = "Chebyshev authentication benchmarks and simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Median Chebyshev evaluation time per degree size.
    BenchCheb {
        /// Degree sizes in bits, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [128u64, 160, 256, 512])]
        bits: Vec<u64>,
        #[arg(long, default_value_t = 1000, value_parser = iterations)]
        iters: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u64).range(3..=4096))]
        modulus_bits: u64,
    },
    /// Per-party login and authentication time with operation counts.
    BenchProtocol {
        #[arg(long, default_value_t = 200, value_parser = iterations)]
        iters: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Message and session sizes in bits.
    ReportSizes {
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run adversary scenarios from a file and print one CSV row each.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// Seed for scenarios without a `seed` line.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn iterations(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < bench::MIN_ITERATIONS {
        return Err(format!("at least {} required", bench::MIN_ITERATIONS));
    }
    Ok(n)
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl ToString) -> Self {
        Failure {
            code,
            msg: msg.to_string(),
        }
    }
}

impl From<BenchError> for Failure {
    fn from(e: BenchError) -> Self {
        let code = match e {
            BenchError::Iterations(_) | BenchError::DegreeBits(_) | BenchError::NoSizes => {
                EXIT_FLAGS
            }
            BenchError::OpCountMismatch { .. } | BenchError::Protocol(_) => EXIT_ASSERTION,
            _ => 1,
        };
        Failure::new(code, e)
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let code = match e {
            HarnessError::Scenario { .. } | HarnessError::InvalidAction(_) => EXIT_FLAGS,
            _ => 1,
        };
        Failure::new(code, e)
    }
}

fn write_csv(path: &Path, report: &BenchReport) -> Result<(), Failure> {
    let file =
        File::create(path).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))?;
    report
        .write_csv(BufWriter::new(file))
        .map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))
}

fn emit(report: &BenchReport, csv: Option<&Path>) -> Result<(), Failure> {
    print!("{report}");
    if let Some(path) = csv {
        write_csv(path, report)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::BenchCheb {
            bits,
            iters,
            csv,
            seed,
            modulus_bits,
        } => emit(
            &bench::bench_cheb(&bits, iters, modulus_bits, seed)?,
            csv.as_deref(),
        ),
        Command::BenchProtocol { iters, csv, seed } => {
            emit(&bench::bench_protocol(iters, 256, seed)?, csv.as_deref())
        }
        Command::ReportSizes { csv } => emit(&bench::report_sizes(), csv.as_deref()),
        Command::Simulate { scenario, seed } => {
            let text = std::fs::read_to_string(&scenario)
                .map_err(|e| Failure::new(EXIT_FLAGS, format!("{}: {e}", scenario.display())))?;
            let specs = harness::parse_scenarios(&text)?;
            let results = specs
                .iter()
                .map(|s| harness::run_scenario(s, seed))
                .collect::<Result<Vec<_>, _>>()?;
            harness::write_outcomes_csv(io::stdout().lock(), &results)
                .map_err(|e| Failure::new(1, e))?;
            if let Some(bad) = results.iter().find(|r| r.outcome.keys_conflict()) {
                return Err(Failure::new(
                    EXIT_ASSERTION,
                    format!(
                        "scenario {}: parties finished with different keys",
                        bad.name
                    ),
                ));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

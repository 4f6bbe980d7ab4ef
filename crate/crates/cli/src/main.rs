//! `polyelim`: generate, eliminate, compare and validate linear inequality
//! systems with symbolic bounds.
//!
//! Exit codes: 0 success, 1 I/O error, 2 usage or parse error, 3 resource
//! limit exceeded, 4 disagreement (compare or validate), 5 oracle mismatch.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use polyelim::analysis::{remove_redundant, systems_equivalent, validate_projection};
use polyelim::fme::{fme_eliminate_all, FmeOptions};
use polyelim::hilbert::{
    brute_force_minimal_solutions, eliminate_by_duality, hilbert_basis, DiophantineMatrix, DualityOptions,
    HilbertLimits,
};
use polyelim::model::{canonicalize_system, parse_system, serialize_system};
use polyelim::ratereg::hk_system;
use polyelim::report::EliminationReport;
use polyelim::{Error, InequalitySystem};

#[derive(Parser)]
#[command(name = "polyelim", version, about = "Exact variable elimination for linear inequality systems")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Input file (system JSON, or a raw matrix for hilbert-raw).
    #[arg(long = "in", global = true, value_name = "PATH")]
    input: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Write the JSON report here instead of standard error.
    #[arg(long, global = true, value_name = "PATH")]
    report: Option<PathBuf>,
    /// Largest frontier the Hilbert basis search may hold.
    #[arg(long, global = true, default_value_t = HilbertLimits::default().max_frontier)]
    max_frontier: usize,
    /// Largest element norm the Hilbert basis search may reach.
    #[arg(long, global = true, default_value_t = HilbertLimits::default().max_norm)]
    max_norm: u32,
    /// Suppress reports on standard error.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Write the rate-splitting system for N senders.
    GenHk {
        #[arg(long)]
        senders: usize,
    },
    /// Project out the eliminate-set.
    Eliminate {
        #[arg(long, value_enum)]
        method: Method,
        /// Drop rows that hold for every nonnegative symbol assignment.
        #[arg(long)]
        drop_trivial: bool,
        /// Remove conically redundant rows from the result.
        #[arg(long)]
        remove_redundant: bool,
        /// Elimination order for fme, comma separated.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
        /// Remove redundant rows after every fme round.
        #[arg(long)]
        prune_each_round: bool,
    },
    /// Run both methods and check that they agree.
    Compare,
    /// Hilbert basis of the nonnegative integer solutions of aᵀB = 0.
    HilbertRaw {
        /// Also enumerate minimal solutions with entries up to N and compare.
        #[arg(long, value_name = "N")]
        oracle: Option<u32>,
    },
    /// Check a projection against the original by random sampling.
    Validate {
        /// Projected system; computed with --method when omitted.
        #[arg(long, value_name = "PATH")]
        projected: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Method::Hilbert)]
        method: Method,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Fme,
    Hilbert,
}

enum Failure {
    Io(String),
    Lib(Error),
    Disagree(String),
    Oracle(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Lib(Error::Resource { .. }) => 3,
            Failure::Lib(_) => 2,
            Failure::Disagree(_) => 4,
            Failure::Oracle(_) => 5,
        }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            let message = match &failure {
                Failure::Io(m) | Failure::Disagree(m) | Failure::Oracle(m) => m.clone(),
                Failure::Lib(e) => e.to_string(),
            };
            eprintln!("polyelim: {message}");
            ExitCode::from(failure.code())
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    match &cli.command {
        Command::GenHk { senders } => write_out(g, &serialize_system(&hk_system(*senders)?)),
        Command::Eliminate {
            method,
            drop_trivial,
            remove_redundant: prune,
            order,
            prune_each_round,
        } => {
            let system = read_system(g)?;
            if order.is_some() && matches!(method, Method::Hilbert) {
                return Err(Error::Usage("--order only applies to --method fme".into()).into());
            }
            let (mut projected, mut report) = match method {
                Method::Fme => {
                    let options = FmeOptions {
                        order: order.clone(),
                        drop_trivial: *drop_trivial,
                        prune_each_round: *prune_each_round,
                    };
                    let out = fme_eliminate_all(&system, &options)?;
                    (out.system, out.report)
                }
                Method::Hilbert => {
                    let options = DualityOptions {
                        drop_trivial: *drop_trivial,
                        limits: limits(g),
                    };
                    let out = eliminate_by_duality(&system, &options)?;
                    (out.system, out.report)
                }
            };
            if *prune {
                let start = Instant::now();
                let (kept, _) = remove_redundant(&projected);
                report.non_redundant_count = Some(kept.rows().len());
                report.elapsed += start.elapsed();
                projected = kept;
            }
            write_out(g, &serialize_system(&projected))?;
            emit_report(g, &report.to_json())
        }
        Command::Compare => compare(g),
        Command::HilbertRaw { oracle } => {
            let text = read_input(g)?;
            let matrix = DiophantineMatrix::parse_raw(&text)?;
            let basis = hilbert_basis(&matrix, limits(g))?;
            let listing: String = basis.iter().map(|h| format!("{h}\n")).collect();
            write_out(g, &listing)?;
            if let Some(bound) = oracle {
                let expected = brute_force_minimal_solutions(&matrix, *bound)?;
                let within: Vec<_> = basis
                    .iter()
                    .filter(|h| h.multipliers.iter().all(|k| k <= bound))
                    .cloned()
                    .collect();
                if within != expected || within.len() != basis.len() {
                    return Err(Failure::Oracle(format!(
                        "oracle at bound {bound} found {} minimal solutions, basis has {} ({} within the bound)",
                        expected.len(),
                        basis.len(),
                        within.len()
                    )));
                }
            }
            Ok(())
        }
        Command::Validate {
            projected,
            method,
            trials,
            seed,
        } => {
            let original = read_system(g)?;
            let projected = match projected {
                Some(path) => parse_system(&read_bytes(path)?)?,
                None => match method {
                    Method::Fme => fme_eliminate_all(&original, &FmeOptions::default())?.system,
                    Method::Hilbert => {
                        let options = DualityOptions {
                            drop_trivial: false,
                            limits: limits(g),
                        };
                        eliminate_by_duality(&original, &options)?.system
                    }
                },
            };
            let report = validate_projection(&original, &projected, *trials, *seed)?;
            write_out(g, &format!("{:#}\n", report.to_json()))?;
            if report.disagreements.is_empty() {
                Ok(())
            } else {
                Err(Failure::Disagree(format!(
                    "{} of {} trials disagree",
                    report.disagreements.len(),
                    report.trials
                )))
            }
        }
    }
}

fn compare(g: &Global) -> Outcome {
    let system = read_system(g)?;

    let start = Instant::now();
    let fme = fme_eliminate_all(&system, &FmeOptions::default())?;
    let (fme_kept, _) = remove_redundant(&fme.system);
    let fme_report = finish(fme.report, &fme_kept, start);

    let start = Instant::now();
    let options = DualityOptions {
        drop_trivial: false,
        limits: limits(g),
    };
    let duality = eliminate_by_duality(&system, &options)?;
    let (duality_kept, _) = remove_redundant(&duality.system);
    let duality_report = finish(duality.report, &duality_kept, start);

    write_out(g, &format!("{}\n{}\n", fme_report.csv_line(), duality_report.csv_line()))?;

    let same = canonicalize_system(&fme_kept) == canonicalize_system(&duality_kept);
    let verdict = systems_equivalent(&fme.system, &duality.system)?;
    emit_report(
        g,
        &json!({
            "fme": fme_report.to_json(),
            "hilbert": duality_report.to_json(),
            "canonical_equal": same,
            "equivalence": verdict.to_json(),
        }),
    )?;
    if same && verdict.equivalent {
        Ok(())
    } else {
        Err(Failure::Disagree(format!(
            "methods disagree: canonical sets equal = {same}, conically equivalent = {}",
            verdict.equivalent
        )))
    }
}

fn finish(mut report: EliminationReport, kept: &InequalitySystem, start: Instant) -> EliminationReport {
    report.non_redundant_count = Some(kept.rows().len());
    report.elapsed = start.elapsed();
    report
}

fn limits(g: &Global) -> HilbertLimits {
    HilbertLimits {
        max_frontier: g.max_frontier,
        max_norm: g.max_norm,
    }
}

fn input_path(g: &Global) -> std::result::Result<&Path, Failure> {
    g.input
        .as_deref()
        .ok_or_else(|| Failure::Lib(Error::Usage("--in is required".into())))
}

fn read_bytes(path: &Path) -> std::result::Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))
}

fn read_input(g: &Global) -> std::result::Result<String, Failure> {
    let bytes = read_bytes(input_path(g)?)?;
    String::from_utf8(bytes).map_err(|_| Failure::Lib(Error::MalformedMatrix("input is not UTF-8".into())))
}

fn read_system(g: &Global) -> std::result::Result<InequalitySystem, Failure> {
    Ok(parse_system(&read_bytes(input_path(g)?)?)?)
}

fn write_out(g: &Global, text: &str) -> Outcome {
    match &g.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Io(format!("cannot write standard output: {e}"))),
    }
}

fn emit_report(g: &Global, report: &serde_json::Value) -> Outcome {
    let text = format!("{report:#}\n");
    match &g.report {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None if g.quiet => Ok(()),
        None => {
            eprint!("{text}");
            Ok(())
        }
    }
}

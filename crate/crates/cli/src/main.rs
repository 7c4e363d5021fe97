//! Command line front end for the coordinated direct/relay simulator.
//!
//! Three subcommands: `two-user-sweep` tabulates per-scheme rates over a
//! prioritizing-factor grid, `multi-user-compare` tabulates mean session
//! throughput per scheduling discipline, and `validate` runs the library's
//! self-check battery. Results are emitted as CSV (default) or JSON lines,
//! to stdout or a file; identical flags and seed reproduce identical bytes.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 validation failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use cdr_core::scheduler::SchedulerKind;
use cdr_core::schemes::PriorityFactor;
use cdr_core::selfcheck::run_all;
use cdr_core::session::{
    lambda_sweep, run_monte_carlo, SessionConfig, SweepConfig, SweepRow,
};

// ======================================================================
// Arguments
// ======================================================================

#[derive(Parser)]
#[command(
    name = "cdrsim",
    version,
    about = "Monte Carlo simulator for coordinated direct/relay transmission in a relay-aided cell"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the prioritizing factor for one (relayed, direct) user pair.
    TwoUserSweep(SweepArgs),
    /// Compare scheduling disciplines on a cell with k users per side.
    MultiUserCompare(CompareArgs),
    /// Run the self-check battery and report each check.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Args)]
struct SweepArgs {
    /// Average link SNR in dB; noise power is 10^(-dB/10).
    #[arg(long, default_value_t = 10.0)]
    noise_db: f64,
    /// Channel draws averaged per grid point.
    #[arg(long, default_value_t = 10_000)]
    sessions: usize,
    /// Master seed for the channel draws.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Comma-separated prioritizing factors, each strictly inside (-1, 1).
    #[arg(
        long,
        value_delimiter = ',',
        num_args = 1..,
        default_values_t = [-0.8, -0.6, -0.4, -0.2, 0.0, 0.2, 0.4, 0.6, 0.8]
    )]
    lambda_grid: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Users per side (k direct and k relayed).
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Probability that a request is uplink.
    #[arg(long, default_value_t = 0.5)]
    pu: f64,
    /// Prioritizing factor, strictly inside (-1, 1).
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,
    /// Average link SNR in dB; noise power is 10^(-dB/10).
    #[arg(long, default_value_t = 10.0)]
    noise_db: f64,
    /// Sessions averaged per discipline.
    #[arg(long, default_value_t = 10_000)]
    sessions: usize,
    /// Master seed shared by all disciplines (common random numbers).
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Comma-separated disciplines to run; all six when omitted.
    #[arg(long, value_delimiter = ',', value_parser = parse_scheduler)]
    scheduler: Vec<SchedulerKind>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ValidateArgs {
    /// Master seed for the check battery.
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

fn parse_scheduler(s: &str) -> Result<SchedulerKind, String> {
    SchedulerKind::from_str(s)
}

// ======================================================================
// Entry point
// ======================================================================

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::TwoUserSweep(args) => two_user_sweep(args),
        Command::MultiUserCompare(args) => multi_user_compare(args),
        Command::Validate(args) => validate(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn db_to_noise(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ======================================================================
// Subcommands
// ======================================================================

fn two_user_sweep(args: SweepArgs) -> Result<u8, String> {
    let cfg = SweepConfig {
        noise: db_to_noise(args.noise_db),
        draws: args.sessions,
        seed: args.seed,
    };
    let rows = lambda_sweep(&cfg, &args.lambda_grid).map_err(|e| e.to_string())?;
    let text = match args.output.format {
        Format::Csv => sweep_csv(&rows),
        Format::Jsonl => sweep_jsonl(&rows),
    };
    emit(&args.output.out, &text)?;
    Ok(0)
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s =
        String::from("lambda,scheme,rate_relayed_mean,rate_direct_mean,sum_mean,std_err\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.lambda,
            r.scheme.label(),
            r.rate_relayed_mean,
            r.rate_direct_mean,
            r.sum_mean,
            r.std_err
        ));
    }
    s
}

fn sweep_jsonl(rows: &[SweepRow]) -> String {
    rows.iter()
        .map(|r| {
            serde_json::json!({
                "lambda": r.lambda,
                "scheme": r.scheme.label(),
                "rate_relayed_mean": r.rate_relayed_mean,
                "rate_direct_mean": r.rate_direct_mean,
                "sum_mean": r.sum_mean,
                "std_err": r.std_err,
            })
            .to_string()
                + "\n"
        })
        .collect()
}

fn multi_user_compare(args: CompareArgs) -> Result<u8, String> {
    let priority = PriorityFactor::new(args.lambda).map_err(|e| e.to_string())?;
    let kinds: Vec<SchedulerKind> = if args.scheduler.is_empty() {
        SchedulerKind::ALL.to_vec()
    } else {
        args.scheduler.clone()
    };
    let mut csv =
        String::from("scheduler,k,pu,lambda,snr_db,mean_throughput,std_err,sessions\n");
    let mut jsonl = String::new();
    for kind in kinds {
        let cfg = SessionConfig {
            users_per_side: args.k,
            uplink_probability: args.pu,
            noise: db_to_noise(args.noise_db),
            priority,
            scheduler: kind,
            sessions: args.sessions,
            seed: args.seed,
        };
        let stats = run_monte_carlo(&cfg).map_err(|e| e.to_string())?;
        match args.output.format {
            Format::Csv => csv.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                kind.label(),
                args.k,
                args.pu,
                args.lambda,
                args.noise_db,
                stats.mean_throughput,
                stats.std_error,
                stats.sessions
            )),
            Format::Jsonl => {
                jsonl.push_str(
                    &serde_json::json!({
                        "scheduler": kind.label(),
                        "k": args.k,
                        "pu": args.pu,
                        "lambda": args.lambda,
                        "snr_db": args.noise_db,
                        "mean_throughput": stats.mean_throughput,
                        "std_err": stats.std_error,
                        "sessions": stats.sessions,
                    })
                    .to_string(),
                );
                jsonl.push('\n');
            }
        }
    }
    let text = match args.output.format {
        Format::Csv => csv,
        Format::Jsonl => jsonl,
    };
    emit(&args.output.out, &text)?;
    Ok(0)
}

fn validate(args: ValidateArgs) -> Result<u8, String> {
    let outcomes = run_all(args.seed);
    let mut failed = 0usize;
    for o in &outcomes {
        let word = if o.passed { "PASS" } else { "FAIL" };
        println!("check {}: {} ({})", o.name, word, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("all {} checks passed", outcomes.len());
        Ok(0)
    } else {
        println!("{failed} of {} checks failed", outcomes.len());
        Ok(2)
    }
}

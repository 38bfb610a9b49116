use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use cocycle_cli::commands::{EXIT_FAIL, EXIT_USAGE};
use cocycle_cli::report::DEFAULT_PRECISION;
use cocycle_cli::{emit_report, exit_code, parse_config, run_command, Command, Format, RunError};
use cocycle_core::cocycle::rational_approximation;
use cocycle_core::par;

const COMMANDS: [&str; 9] = [
    "le",
    "profile",
    "accel",
    "zeros",
    "jensen",
    "verify-asymptotics",
    "verify-stratified",
    "verify-constants",
    "bounds",
];

/// Lyapunov exponents, accelerations and large-coupling asymptotics of
/// quasi-periodic Schrödinger cocycles.
#[derive(Parser, Debug)]
#[command(name = "cocycle", version)]
struct Cli {
    #[arg(value_parser = COMMANDS)]
    command: String,
    /// Campaign configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "COCYCLE_WORKERS")]
    workers: Option<usize>,
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
    /// Significant digits of floats in reports.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: Option<u8>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    ExitCode::from(run(cli) as u8)
}

fn run(cli: Cli) -> i32 {
    let command = Command::parse(&cli.command).expect("validated by clap");
    let text = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                return EXIT_USAGE;
            }
        },
        None => String::new(),
    };
    let cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprint!("error: {e}");
            if !e.to_string().ends_with('\n') {
                eprintln!();
            }
            return EXIT_USAGE;
        }
    };
    if let Some((p, q)) = rational_approximation(cfg.alpha, 1e-12, 1_000_000) {
        eprintln!("warning: alpha = {} is within rounding of {p}/{q}", cfg.alpha);
    }
    let format = cli
        .format
        .as_deref()
        .and_then(Format::parse)
        .or(cfg.format)
        .unwrap_or(Format::Csv);
    let precision = cli.precision.map(usize::from).or(cfg.precision).unwrap_or(DEFAULT_PRECISION);
    let dir = cli.out.clone().or(cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));

    let outcome = match par::with_workers(cli.workers, || run_command(command, &cfg)) {
        Ok(o) => o,
        Err(RunError::Usage(vs)) => {
            for v in vs {
                eprintln!("error: {v}");
            }
            return EXIT_USAGE;
        }
        Err(RunError::Compute(e)) => {
            eprintln!("error: {e}");
            return EXIT_FAIL;
        }
    };
    for line in &outcome.summary {
        println!("{} {line}", command.name());
    }
    match emit_report(&dir, command.name(), &outcome.table, format, precision, &text, outcome.status.as_str()) {
        Ok((report, _)) => println!("{}: {} -> {}", command.name(), outcome.status.as_str(), report.display()),
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAIL;
        }
    }
    exit_code(outcome.status)
}

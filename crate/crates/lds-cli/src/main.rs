//! `lds` — sparse spreading systems from the command line.
//!
//! Exit codes: 0 success, 1 failed fixture checks, 2 usage errors (from
//! clap), 3 invalid input (orders, files, configs), 4 runtime I/O failures.

use clap::{Parser, Subcommand, ValueEnum};
use lds_core::fixtures::{run_all_checks, CHECK_NAMES};
use lds_core::lds::{build_lds, export_csv, export_json};
use lds_core::metrics::{correlation_report, report_json, report_table};
use lds_sim::config::parse_config_file;
use lds_sim::sweep::{load_matrix, run_sweep, write_csv, write_gnuplot};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "lds",
    version,
    about = "Sparse spreading matrices: construction, exact analysis, BER simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Build the L x (L+2) spreading matrix of order q and write it out
    Generate {
        /// prime-power order: 2, 3, 4, 5 or 7
        #[arg(long)]
        q: u64,
        /// destination file
        #[arg(long)]
        out: PathBuf,
        /// interchange format
        #[arg(long, value_enum, default_value_t = FileFormat::Json)]
        format: FileFormat,
    },
    /// Exact correlation and distance analysis of a matrix file
    Analyze {
        /// matrix interchange file, JSON or CSV
        #[arg(long)]
        matrix: PathBuf,
        /// also write the report as JSON
        #[arg(long)]
        report_out: Option<PathBuf>,
    },
    /// Run the Monte Carlo BER sweep described by a config file
    Simulate {
        /// key=value run description (see docs/config.md)
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; a two-column gnuplot .dat lands next to it
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild all embedded reference data and compare against it
    CheckFixtures {
        /// print the check names without running them
        #[arg(long)]
        list: bool,
    },
}

enum Failure {
    Validation(String),
    Runtime(String),
}

fn validation(e: impl std::fmt::Display) -> Failure {
    Failure::Validation(e.to_string())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes)
        .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(4)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Generate { q, out, format } => generate(q, &out, format),
        Command::Analyze { matrix, report_out } => analyze(&matrix, report_out.as_deref()),
        Command::Simulate { config, out } => simulate(&config, &out),
        Command::CheckFixtures { list } => check_fixtures(list),
    }
}

fn generate(q: u64, out: &Path, format: FileFormat) -> Result<ExitCode, Failure> {
    let m = build_lds(q).map_err(validation)?;
    let text = match format {
        FileFormat::Json => export_json(&m),
        FileFormat::Csv => export_csv(&m),
    };
    write_file(out, text.as_bytes())?;
    let nonzero: usize = m
        .columns()
        .iter()
        .flat_map(|col| col.iter())
        .filter(|&&e| e != 0)
        .count();
    let total = m.l() * m.k();
    println!(
        "{}: {} chips x {} signatures, column weight {}, {nonzero}/{total} entries nonzero",
        m.id(),
        m.l(),
        m.k(),
        q + 1
    );
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn analyze(matrix: &Path, report_out: Option<&Path>) -> Result<ExitCode, Failure> {
    let m = load_matrix(matrix).map_err(validation)?;
    let report = correlation_report(&m);
    print!("{}", report_table(&report));
    if let Some(path) = report_out {
        write_file(path, report_json(&report).as_bytes())?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn simulate(config: &Path, out: &Path) -> Result<ExitCode, Failure> {
    if out.extension().is_some_and(|e| e == "dat") {
        return Err(Failure::Validation(
            "--out must not end in .dat; that name is reserved for the plot file".into(),
        ));
    }
    let cfg = parse_config_file(config).map_err(validation)?;
    let result = run_sweep(&cfg).map_err(validation)?;

    let mut csv = Vec::new();
    write_csv(&cfg, &result, &mut csv).expect("in-memory write");
    write_file(out, &csv)?;

    let dat_path = out.with_extension("dat");
    let mut dat = Vec::new();
    write_gnuplot(&result, &mut dat).expect("in-memory write");
    write_file(&dat_path, &dat)?;

    for p in &result.points {
        println!(
            "{:>7} dB: ber {:.6e}  ({} trials, {} bit errors)",
            p.eb_n0_db(),
            p.ber(),
            p.trials,
            p.bit_errors
        );
    }
    println!("wrote {} and {}", out.display(), dat_path.display());
    Ok(ExitCode::SUCCESS)
}

fn check_fixtures(list: bool) -> Result<ExitCode, Failure> {
    if list {
        for name in CHECK_NAMES {
            println!("{name}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let checks = run_all_checks();
    let mut all_passed = true;
    for check in &checks {
        let verdict = if check.passed { "PASS" } else { "FAIL" };
        all_passed &= check.passed;
        println!("{verdict} {}: {}", check.name, check.detail);
    }
    if all_passed {
        println!("{} checks passed", checks.len());
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use casimir_cli::config::{Format, ObservableKind};
use casimir_cli::{execute, parse_document, CliError, Row, Status};
use clap::Parser;

/// Casimir energies, forces and works of planar layered stacks.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    /// TOML run configuration.
    config: PathBuf,
    /// Replace the configured observable kind (energy, force, work, identity-check).
    #[arg(long)]
    observable: Option<ObservableKind>,
    /// Worker threads for sweep points and spectral integrals; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Relative quadrature tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Output file (standard output by default).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Table format: csv or tsv.
    #[arg(long)]
    format: Option<Format>,
    /// Add a value column in SI units.
    #[arg(long)]
    si_units: bool,
}

fn run(args: Args) -> Result<i32, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", args.config.display())))?;
    let mut config = parse_document(&text)?;
    if let Some(kind) = args.observable {
        config.observable.kind = kind;
    }
    if let Some(tol) = args.tolerance {
        config.quadrature.rel_tol = tol;
    }
    if let Some(path) = args.output {
        config.output.path = Some(path.to_string_lossy().into_owned());
    }
    if let Some(format) = args.format {
        config.output.format = format;
    }
    if args.si_units {
        config.output.si_units = true;
    }

    let report = execute(&config, args.threads)?;
    for (i, row) in report.rows.iter().enumerate() {
        warn(i, row);
    }
    let io_err = |e: io::Error| CliError::Io(format!("writing output: {e}"));
    match &config.output.path {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(format!("cannot create {path}: {e}")))?;
            let mut out = BufWriter::new(file);
            report.write_table(&mut out).map_err(io_err)?;
            out.flush().map_err(io_err)?;
        }
        None => {
            let stdout = io::stdout();
            let mut out = stdout.lock();
            report.write_table(&mut out).map_err(io_err)?;
            out.flush().map_err(io_err)?;
        }
    }
    Ok(report.exit_code())
}

fn warn(i: usize, row: &Row) {
    match &row.status {
        Status::Ok => {}
        Status::NotConverged => eprintln!("warning: row {i} ({}) did not converge", row.quantity),
        Status::Failed(msg) => eprintln!("error: row {i} ({}): {msg}", row.quantity),
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match run(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

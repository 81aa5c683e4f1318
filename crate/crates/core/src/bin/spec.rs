//! `spec run --config c.json --out dir/` and the single-operator commands
//! `spec jacobi|cmv|schrodinger --desc op.json`.
//!
//! Exit codes: 0 all reports PASS, 1 some report FAILED, 2 malformed input,
//! 3 unknown operator type, 4 IO.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use spectral_closure::harness::{self, csv, HarnessError, Operator, Status, Tolerances};
use spectral_closure::interval_sets::{parse_set_descriptor, AnySetDescriptor};

#[derive(Parser)]
#[command(name = "spec", about = "Weyl-Titchmarsh spectral data and ac-spectrum inclusion checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every operator of a config and write reports under `--out`.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    Jacobi(Single),
    Cmv(Single),
    Schrodinger(Single),
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Xi,
    Spectrum,
    Report,
}

#[derive(Args)]
struct Single {
    /// Operator descriptor JSON.
    #[arg(long)]
    desc: PathBuf,
    /// `a:b:n` (line) or `n` / `0:6.283185307179586:n` (circle).
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, value_enum, default_value = "report")]
    emit: Emit,
    /// Set descriptor for the inclusion check.
    #[arg(long)]
    e: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tolerances JSON (missing fields use module defaults).
    #[arg(long)]
    tolerances: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn single(kind: &str, args: &Single) -> Result<ExitCode, HarnessError> {
    let op = Operator::parse(&read(&args.desc)?)?;
    if op.kind() != kind {
        return Err(HarnessError::Malformed(format!(
            "descriptor has type {:?}, command is {kind:?}",
            op.kind()
        )));
    }
    let grid = match &args.grid {
        Some(g) => op.parse_grid(g)?,
        None => op.default_grid(),
    };
    let tol: Tolerances = match &args.tolerances {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| HarnessError::Malformed(e.to_string()))?,
        None => Tolerances::default(),
    };
    let e = match &args.e {
        None => None,
        Some(p) => {
            let d = parse_set_descriptor(&read(p)?).map_err(|e| HarnessError::Malformed(e.to_string()))?;
            let AnySetDescriptor::Finite(d) = d else {
                return Err(HarnessError::Malformed("E must be a finite set descriptor".into()));
            };
            let s = d.build().map_err(|e| HarnessError::Malformed(e.to_string()))?;
            if s.carrier() != op.carrier() {
                return Err(HarnessError::Malformed("E lives on the wrong carrier".into()));
            }
            Some(s)
        }
    };
    let report = harness::verify_inclusion(&op, e.as_ref(), &grid, &tol, args.seed).named(kind);
    match args.emit {
        Emit::Xi => print!("{}", csv::table(&op, &grid, &tol, &report)),
        Emit::Spectrum => println!(
            "{}",
            serde_json::to_string_pretty(&report.ac_spectrum).expect("json")
        ),
        Emit::Report => println!("{}", serde_json::to_string_pretty(&report).expect("json")),
    }
    Ok(if report.status == Status::Pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, out } => harness::run_config(config, out).map(|o| {
            for r in &o.reports {
                println!("{}: {}", r.name, serde_json::to_value(r.status).expect("json").as_str().unwrap_or("?"));
            }
            if o.all_pass() { ExitCode::SUCCESS } else { ExitCode::from(1) }
        }),
        Command::Jacobi(a) => single("jacobi", a),
        Command::Cmv(a) => single("cmv", a),
        Command::Schrodinger(a) => single("schrodinger", a),
    };
    match result {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

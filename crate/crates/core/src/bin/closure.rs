//! `closure sets --demo` and `closure essential --input s.json`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use spectral_closure::harness::emit_sets_demo;
use spectral_closure::interval_sets::{parse_set_descriptor, AnySet, AnySetDescriptor, GeneratedFatSet};

#[derive(Parser)]
#[command(name = "closure", about = "Essential closures of measurable sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Worked examples: a point appended to an interval, a null rational
    /// support, and the fat rational set.
    Sets {
        #[arg(long)]
        demo: bool,
        /// Print the full JSON record instead of the transcript.
        #[arg(long)]
        json: bool,
    },
    /// Essential closure of a set descriptor (finite or generated family).
    Essential {
        #[arg(long)]
        input: PathBuf,
        /// Grid for generated families.
        #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 1.5, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
    },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Sets { demo, json } => {
            if !demo {
                return fail(2, "nothing to do; pass --demo");
            }
            let d = emit_sets_demo();
            if json {
                println!("{}", serde_json::to_string_pretty(&d).expect("demo serializes"));
            } else {
                for l in &d.lines {
                    println!("{l}");
                }
            }
            ExitCode::SUCCESS
        }
        Command::Essential { input, lo, hi, step, eps } => {
            let text = match std::fs::read_to_string(&input) {
                Ok(t) => t,
                Err(e) => return fail(4, format!("{}: {e}", input.display())),
            };
            let desc = match parse_set_descriptor(&text) {
                Ok(d) => d,
                Err(e) => return fail(2, e),
            };
            match desc {
                AnySetDescriptor::Finite(d) => {
                    let s = match d.build() {
                        Ok(s) => s,
                        Err(e) => return fail(2, e),
                    };
                    let ess = s.essential_closure();
                    let out = json!({
                        "input": s.to_json(),
                        "measure": s.measure(),
                        "essential_closure": ess.to_json(),
                        "display": ess.to_string(),
                    });
                    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
                }
                AnySetDescriptor::Family(d) => {
                    let fat = match GeneratedFatSet::from_descriptor(&d) {
                        Ok(f) => f,
                        Err(e) => return fail(2, e),
                    };
                    let c = match fat.essential_closure_on_grid(lo, hi, step, eps) {
                        Ok(c) => c,
                        Err(e) => return fail(2, e),
                    };
                    let set = AnySet::Line(c.set.clone());
                    let out = json!({
                        "family": d,
                        "truncated_measure": fat.truncated_union().measure(),
                        "tail_measure_bound": fat.tail_measure_bound(),
                        "essential_closure": set.to_json(),
                        "display": set.to_string(),
                        "grid": c,
                    });
                    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
                }
            }
            ExitCode::SUCCESS
        }
    }
}

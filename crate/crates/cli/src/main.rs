//! `keller`: exact diagnostics, inversion and pairing for polynomial maps.
//!
//! Exit status is 0 when the command succeeds, 1 when the mathematics gives
//! a negative verdict and 2 when the input is malformed.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::Method;
use report::CliResult;

#[derive(Parser)]
#[command(name = "keller", version, about = "Exact algebra for polynomial maps F = X + H")]
struct Cli {
    /// Write the JSON report to this file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Print the JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Keller property, nilpotency of JH, power-linear shape, constant kernel.
    Check { mapfile: PathBuf },

    /// Invert a map and tabulate the inverse degree against known bounds.
    Invert {
        mapfile: PathBuf,
        /// Truncation degree for the formal search.
        #[arg(long)]
        bound: Option<u32>,
        #[arg(long, value_enum, default_value = "formal")]
        method: Method,
    },

    /// Lift a map to a power-linear GZ-paired map.
    #[command(name = "gz-lift")]
    GzLift {
        mapfile: PathBuf,
        /// Write f.txt, F.txt, B.txt and C.txt into this directory.
        #[arg(long)]
        save: Option<PathBuf>,
    },

    /// Reduce a map to dimension r along its constant kernel.
    #[command(name = "gz-reduce")]
    GzReduce {
        mapfile: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        save: Option<PathBuf>,
    },

    /// Append x_{n+1} + (B_i X)^d to a saved pair.
    Extend {
        pairdir: PathBuf,
        /// 1-based row of B.
        #[arg(long)]
        i: usize,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        save: Option<PathBuf>,
    },

    /// Scan principal minors of sizes lo..=hi; exits 1 on a non-vanishing one.
    Minors {
        matrixfile: PathBuf,
        #[arg(long)]
        lo: usize,
        #[arg(long)]
        hi: usize,
    },

    /// Compare F(a) = F(λa) with (I + D·JH(a))·a = 0.
    Lines {
        mapfile: PathBuf,
        /// Point as comma-separated rationals.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },

    /// Seeded scenario suite.
    Casebook {
        #[command(subcommand)]
        action: CasebookAction,
    },
}

#[derive(Subcommand)]
enum CasebookAction {
    Run {
        /// Only scenarios whose name contains this.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn dispatch(command: &Command) -> (&'static str, CliResult<report::Outcome>) {
    match command {
        Command::Check { mapfile } => ("check", commands::check(mapfile)),
        Command::Invert { mapfile, bound, method } => ("invert", commands::invert(mapfile, *bound, *method)),
        Command::GzLift { mapfile, save } => ("gz-lift", commands::lift(mapfile, save.as_ref())),
        Command::GzReduce { mapfile, r, save } => ("gz-reduce", commands::reduce(mapfile, *r, save.as_ref())),
        Command::Extend { pairdir, i, d, save } => ("extend", commands::extend(pairdir, *i, *d, save.as_ref())),
        Command::Minors { matrixfile, lo, hi } => ("minors", commands::minors(matrixfile, *lo, *hi)),
        Command::Lines { mapfile, a, lambda } => ("lines", commands::lines(mapfile, a, lambda)),
        Command::Casebook {
            action: CasebookAction::Run { filter, seed },
        } => ("casebook run", commands::casebook(filter.as_deref(), *seed)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, outcome) = dispatch(&cli.command);
    let (json, mut code) = report::report(name, &outcome);
    let pretty = serde_json::to_string_pretty(&json).expect("report serializes");
    if cli.json {
        println!("{pretty}");
    } else if let Ok(o) = &outcome {
        for line in &o.text {
            println!("{line}");
        }
    }
    match &outcome {
        Err(e) => eprintln!("error: {e}"),
        Ok(o) => {
            if let Some(m) = &o.negative {
                eprintln!("negative: {m}");
            }
        }
    }
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, format!("{pretty}\n")) {
            eprintln!("error: {}: {e}", path.display());
            code = 2;
        }
    }
    ExitCode::from(code)
}

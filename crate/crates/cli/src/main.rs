//! `hc`: handle-decomposition computations from the command line.

mod commands;
mod document;
mod exit;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hc_core::contact_homology::{DegreeWindow, Target};
use hc_core::word_combinatorics::{WordLemmaMode, DEFAULT_WORD_BUDGET};

use commands::{IndexArgs, Outcome, Route};
use exit::{Failure, PARSE};
use report::Format;

#[derive(Parser, Debug)]
#[command(name = "hc", version, about = "Reeb dynamics, Conley-Zehnder indices and contact homology of handle attachments")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "table")]
    format: Format,

    /// Seed for randomized computations; recorded in the output header.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Crossing-form index of a block-diagonal linear path.
    Index {
        /// Rotation block exp(ω t J); repeatable.
        #[arg(long = "rotation", value_name = "OMEGA", allow_negative_numbers = true)]
        rotations: Vec<f64>,
        /// Hyperbolic block diag(e^{a t}, e^{-b t}) given as `a,b`; repeatable.
        #[arg(long = "hyperbolic", value_name = "A,B", value_parser = parse_pair, allow_hyphen_values = true)]
        hyperbolic: Vec<(f64, f64)>,
        /// Number of constant identity blocks.
        #[arg(long, default_value_t = 0)]
        identity: usize,
        /// Path duration.
        #[arg(long = "T", value_name = "T")]
        duration: f64,
        /// Multiplicity used for the goodness check.
        #[arg(long, default_value_t = 1)]
        multiplicity: u64,
    },
    /// Periodic Reeb orbits of one handle below an action cutoff.
    Orbits {
        document: PathBuf,
        /// Critical point id the handle is attached at.
        #[arg(long)]
        handle: String,
        /// Action cutoff such as `pi`, `3/2pi` or `2.5`.
        #[arg(long, allow_hyphen_values = true)]
        cutoff: Option<String>,
    },
    /// Betti numbers of the Morse complex.
    Homology { document: PathBuf },
    /// Contact homology ranks of the boundary.
    Hc {
        document: PathBuf,
        #[arg(long, value_enum, default_value = "M")]
        target: TargetArg,
        #[arg(long, value_enum, default_value = "both")]
        route: RouteArg,
        /// Degree window `LO:HI`.
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<DegreeWindow>,
        /// Largest multiplicity kept in the complex.
        #[arg(long = "m-o")]
        m_o: Option<u64>,
    },
    /// Check that every jumpy word of the critical length contains a basin.
    Words {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: ModeArg,
        /// Number of words drawn in randomized mode.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        /// Enumeration budget in exhaustive mode.
        #[arg(long, default_value_t = DEFAULT_WORD_BUDGET)]
        cap: u64,
    },
    /// Compare ranks on M with ranks on M' shifted by two.
    Shift {
        document: PathBuf,
        #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
        window: Option<DegreeWindow>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TargetArg {
    #[value(name = "M")]
    M,
    #[value(name = "Mprime")]
    MPrime,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RouteArg {
    Chain,
    Closed,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Randomized,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `a,b`, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(a)?, num(b)?))
}

fn parse_window(s: &str) -> Result<DegreeWindow, String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected `LO:HI`, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
    Ok(DegreeWindow::new(num(lo)?, num(hi)?))
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Index {
            rotations,
            hyperbolic,
            identity,
            duration,
            multiplicity,
        } => {
            if !(duration.is_finite() && *duration > 0.0) {
                return Err(Failure::new(PARSE, "--T must be a positive number").into());
            }
            Ok(commands::index(&IndexArgs {
                rotations: rotations.clone(),
                hyperbolic: hyperbolic.clone(),
                identity: *identity,
                duration: *duration,
                multiplicity: *multiplicity,
            })?)
        }
        Command::Orbits { document, handle, cutoff } => commands::orbits(document, handle, cutoff.as_deref()),
        Command::Homology { document } => commands::homology(document),
        Command::Hc {
            document,
            target,
            route,
            window,
            m_o,
        } => {
            let target = match target {
                TargetArg::M => Target::M,
                TargetArg::MPrime => Target::MPrime,
            };
            let route = match route {
                RouteArg::Chain => Route::Chain,
                RouteArg::Closed => Route::Closed,
                RouteArg::Both => Route::Both,
            };
            commands::hc(document, target, route, *window, *m_o)
        }
        Command::Words { n, mode, samples, cap } => {
            let mode = match mode {
                ModeArg::Exhaustive => WordLemmaMode::Exhaustive { cap: *cap },
                ModeArg::Randomized => WordLemmaMode::Randomized {
                    samples: *samples,
                    seed: cli.seed.unwrap_or(0),
                },
            };
            Ok(commands::words(*n, mode)?)
        }
        Command::Shift { document, window } => commands::shift(document, *window),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { PARSE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Outcome { report, code }) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(report.render(cli.format).as_bytes());
            let _ = out.flush();
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<Failure>().map_or(1, |f| f.code);
            ExitCode::from(code)
        }
    }
}

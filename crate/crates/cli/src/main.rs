mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "sumrule",
    version,
    about = "Lattices, valuations and the sum rule"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Absolute tolerance for audits and certification.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// Seed for randomized batteries.
    #[arg(long, global = true, default_value_t = sumrule::exemplars::battery::DEFAULT_SEED)]
    seed: u64,

    /// Bisection depth of the regraduation ladder.
    #[arg(long, global = true, default_value_t = sumrule::regrad::DEFAULT_DEPTH)]
    depth: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify the order axioms, lattice existence, lattice laws and the
    /// consistency relation.
    Check { poset: PathBuf },
    /// Audit a valuation against a lattice.
    Audit { poset: PathBuf, valuation: PathBuf },
    /// Print the covering pairs.
    Hasse { poset: PathBuf },
    /// Greatest lower bound of two elements.
    Meet {
        poset: PathBuf,
        x: String,
        y: String,
    },
    /// Least upper bound of two elements.
    Join {
        poset: PathBuf,
        x: String,
        y: String,
    },
    /// Solve the associativity equation for an operator and print the knot
    /// table.
    Regraduate {
        /// Built-in operator (add, odds, pythagorean) or a table CSV with
        /// rows a,b,result.
        operator: String,
        /// Anchor with f(unit) = 1; defaults to the top of the domain.
        #[arg(long)]
        unit: Option<f64>,
        /// Points per axis of the verification grid.
        #[arg(long, default_value_t = sumrule::regrad::DEFAULT_GRID)]
        grid: usize,
    },
    /// Run an exemplar's fixture battery, or `all`.
    Demo {
        name: String,
        /// Joint distribution CSV (mutual-information) or slit CSV
        /// (three-slit) to evaluate instead of the battery.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
    };
    let settings = commands::Settings {
        tolerance: cli.tolerance,
        seed: cli.seed,
        depth: cli.depth,
    };
    let (name, result) = match &cli.command {
        Command::Check { poset } => ("check", commands::check(poset)),
        Command::Audit { poset, valuation } => {
            ("audit", commands::audit(poset, valuation, &settings))
        }
        Command::Hasse { poset } => ("hasse", commands::hasse(poset)),
        Command::Meet { poset, x, y } => (
            "meet",
            commands::bound(poset, x, y, commands::BoundKind::Meet),
        ),
        Command::Join { poset, x, y } => (
            "join",
            commands::bound(poset, x, y, commands::BoundKind::Join),
        ),
        Command::Regraduate {
            operator,
            unit,
            grid,
        } => (
            "regraduate",
            commands::regraduate(operator, *unit, *grid, &settings),
        ),
        Command::Demo { name, input } => {
            ("demo", commands::demo(name, input.as_deref(), &settings))
        }
    };
    ExitCode::from(output::emit(name, format, result))
}

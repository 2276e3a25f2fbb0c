//! `wrinkle`: command-line driver for the verification workbench.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod output;
mod svg;

use commands::Outcome;

#[derive(Debug, Parser)]
#[command(
    name = "wrinkle",
    version,
    about = "Verify near-symplectic forms, wrinkled fibration models and move scripts"
)]
struct Cli {
    #[command(flatten)]
    run: RunArgs,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Number of sampled points per check.
    #[arg(long, global = true, default_value_t = 10_000)]
    pub samples: usize,
    /// Radius of the excluded tube around the zero set, as p/q.
    #[arg(long, global = true, default_value = "1/20")]
    pub delta: String,
    /// Also write the JSON report to this path.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every claimed check for a catalog two-form.
    VerifyForm {
        form: String,
        /// Parameter binding name=p/q (repeatable).
        #[arg(long = "param", value_name = "NAME=P/Q")]
        params: Vec<String>,
    },
    /// Sample the critical-value curve of a model, optionally as SVG.
    Critset {
        model: String,
        #[arg(long = "param", value_name = "NAME=P/Q")]
        params: Vec<String>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Curve samples per piece.
        #[arg(long, default_value_t = 400)]
        points: usize,
    },
    /// Classify a critical point of a model.
    Classify {
        model: String,
        #[arg(long = "param", value_name = "NAME=P/Q")]
        params: Vec<String>,
        /// Point t,x,y,z with rational coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Branch points of the wrinkle's fibre cover, or a collision along a path.
    Cover {
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        s: f64,
        /// Base point w1,w2.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "path")]
        w: Option<String>,
        /// Trace a canonical path (real, upper, lower) or all of them (all).
        #[arg(long)]
        path: Option<String>,
        #[arg(long, default_value_t = 4000)]
        steps: usize,
    },
    /// Apply a product of Dehn twists to a homology class.
    Monodromy {
        #[arg(long, default_value = "torus2p")]
        surface: String,
        /// Twists such as "T(a+d),Tinv(b)", applied right to left.
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, allow_hyphen_values = true)]
        apply: String,
    },
    /// (1,1)-stability of a jet family at (a, b).
    Jet {
        #[arg(long)]
        family: String,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Move scripts on fibration diagrams.
    Moves {
        #[command(subcommand)]
        action: MovesAction,
    },
    /// Run the full acceptance table.
    Acceptance,
}

#[derive(Debug, Subcommand)]
enum MovesAction {
    /// Run `builtin:NAME` or a script file.
    Run {
        script: String,
        /// Write the final diagram here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Names of the built-in scripts.
    List,
}

fn dispatch(cli: Cli) -> Result<Outcome, commands::CliError> {
    let run = cli.run;
    match cli.command {
        Command::VerifyForm { form, params } => commands::verify_form(&run, &form, &params),
        Command::Critset {
            model,
            params,
            svg,
            points,
        } => commands::critset(&run, &model, &params, svg.as_deref(), points),
        Command::Classify {
            model,
            params,
            point,
        } => commands::classify(&run, &model, &params, &point),
        Command::Cover { s, w, path, steps } => {
            commands::cover(&run, s, w.as_deref(), path.as_deref(), steps)
        }
        Command::Monodromy {
            surface,
            word,
            apply,
        } => commands::monodromy(&run, &surface, &word, &apply),
        Command::Jet { family, a, b } => commands::jet(&run, &family, &a, &b),
        Command::Moves { action } => match action {
            MovesAction::Run { script, out } => commands::moves_run(&run, &script, out.as_deref()),
            MovesAction::List => commands::moves_list(),
        },
        Command::Acceptance => commands::acceptance(&run),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

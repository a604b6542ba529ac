use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use distill::cli::{self, Command, Options, DEFAULT_HORIZON, EXIT_PARSE};

/// Exact model checking of Markov chains as distribution transformers.
///
/// Exit codes: 0 success, 1 runtime failure, 2 malformed input or usage,
/// 3 precondition violation (e.g. a matrix that is not column-stochastic),
/// 4 non-homogeneous target given to `embed`.
#[derive(Parser)]
#[command(name = "distill", version)]
struct Args {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// Input instance document.
    file: PathBuf,
    /// Write the primary output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Sub {
    /// Spectral profile and stochastic validation of a Markov instance.
    Analyze(Common),
    /// Reduce a Markov instance to an LDS document plus certificate.
    Reduce(Common),
    /// Reduce, decide the self-contained fragments and classify the rest.
    Decide {
        #[command(flatten)]
        common: Common,
        /// Steps of exact simulation included in the report; 0 omits it.
        #[arg(long, default_value_t = DEFAULT_HORIZON)]
        horizon: usize,
    },
    /// Embed an LDS instance with homogeneous targets into an ergodic chain.
    Embed {
        #[command(flatten)]
        common: Common,
        /// JSON list of "p/q" strings; defaults to the uniform distribution.
        #[arg(long)]
        stationary: Option<PathBuf>,
    },
    /// Exact distributions and letters for the first steps.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 16)]
        steps: usize,
    },
}

fn options(args: Args) -> Options {
    let (command, common) = match &args.command {
        Sub::Analyze(c) => (Command::Analyze, c),
        Sub::Reduce(c) => (Command::Reduce, c),
        Sub::Decide { common, .. } => (Command::Decide, common),
        Sub::Embed { common, .. } => (Command::Embed, common),
        Sub::Simulate { common, .. } => (Command::Simulate, common),
    };
    let mut opts = Options::new(command, common.file.clone());
    opts.out = common.out.clone();
    match args.command {
        Sub::Decide { horizon, .. } => opts.horizon = horizon,
        Sub::Embed { stationary, .. } => opts.stationary = stationary,
        Sub::Simulate { steps, .. } => opts.steps = steps,
        Sub::Analyze(_) | Sub::Reduce(_) => {}
    }
    opts
}

fn main() -> ExitCode {
    let mut opts = options(Args::parse());
    if let Ok(v) = std::env::var("DISTILL_MCAP") {
        match v.trim().parse::<usize>() {
            Ok(cap) if cap > 0 => opts.mcap = Some(cap),
            _ => {
                eprintln!("error: DISTILL_MCAP must be a positive integer, got `{v}`");
                return ExitCode::from(EXIT_PARSE as u8);
            }
        }
    }
    let result = cli::run(&opts).and_then(|out| {
        cli::commit(&out)?;
        Ok(out)
    });
    match result {
        Ok(out) => {
            print!("{}", out.stdout);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

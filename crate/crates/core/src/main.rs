use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use riesz_prob::harness::report::{parse_structured, render_structured, render_text, SuiteReport};
use riesz_prob::harness::scenario::{load_scenario, resolve, Scenario};
use riesz_prob::harness::suite::{run_suite, SuiteOptions};
use riesz_prob::harness::{random::random_scenario, random_walk_scenario, TWO_COIN_SCENARIO};
use riesz_prob::Limits;

#[derive(Parser)]
#[command(name = "riesz-prob", version, about = "Exact conditional expectation, independence and Markov checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Omit the timing section so reports are byte-identical across runs.
    #[arg(long)]
    no_timings: bool,
    /// Maximum number of blocks any exhaustive enumeration may touch.
    #[arg(long, value_name = "N")]
    cap_blocks: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check of a scenario file.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run a built-in scenario.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
    /// Re-render a saved structured report.
    Report {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// Two fair coins on four atoms.
    TwoCoin {
        #[command(flatten)]
        run: RunArgs,
    },
    /// The Rademacher walk with `steps` increments.
    RandomWalk {
        #[arg(long)]
        steps: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// A seeded random scenario with the agreement checks.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        run: RunArgs,
    },
}

fn render(report: &SuiteReport, format: Format) -> String {
    match format {
        Format::Text => render_text(report),
        Format::Structured => render_structured(report),
    }
}

fn run(scenario: &Scenario, args: &RunArgs) -> ExitCode {
    let limits = match args.cap_blocks {
        Some(cap) => Limits::default().with_block_cap(cap),
        None => Limits::default(),
    };
    let options = SuiteOptions {
        limits,
        timings: !args.no_timings,
    };
    let report = run_suite(scenario, &options);
    print!("{}", render(&report, args.format));
    ExitCode::from(report.exit_code() as u8)
}

fn input_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { file, run: args } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => return input_error(format_args!("{}: {e}", file.display())),
            };
            match load_scenario(&text) {
                Ok(s) => run(&s, &args),
                Err(e) => input_error(format_args!("{}: {e}", file.display())),
            }
        }
        Command::Demo { which } => {
            let (loaded, args) = match which {
                Demo::TwoCoin { run } => (load_scenario(TWO_COIN_SCENARIO), run),
                Demo::RandomWalk { steps, run } => match random_walk_scenario(steps) {
                    Ok(doc) => (resolve(doc), run),
                    Err(e) if e.is_resource() => {
                        eprintln!("error: {e}");
                        return ExitCode::from(3);
                    }
                    Err(e) => return input_error(e),
                },
                Demo::Random { seed, run } => (resolve(random_scenario(seed)), run),
            };
            match loaded {
                Ok(s) => run(&s, &args),
                Err(e) => input_error(e),
            }
        }
        Command::Report { file, format } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => return input_error(format_args!("{}: {e}", file.display())),
            };
            match parse_structured(&text) {
                Ok(report) => {
                    print!("{}", render(&report, format));
                    ExitCode::from(report.exit_code() as u8)
                }
                Err(e) => input_error(format_args!("{}: {e}", file.display())),
            }
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use topoflow::commands::{self, Subset};
use topoflow::config::seed_from_env;
use topoflow::CliResult;

#[derive(Parser)]
#[command(name = "topoflow", version, about = "Decentralized learning over generated network topologies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SubsetArg {
    G1,
    Community,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph and write its edge list and summary.
    GenerateGraph {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment recipe.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Compute subset curves and reports for a finished run.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        subset: Option<SubsetArg>,
    },
    /// Render a CSV of (x, series, y) rows as an SVG line chart.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        title: Option<String>,
    },
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::GenerateGraph { spec, out } => commands::generate_graph(&spec, &out),
        Command::Run { config, out, threads } => {
            let (dir, output) = commands::run(&config, out.as_deref(), threads, seed_from_env()?)?;
            let last = output.timeline.last().unwrap_or(&[]);
            let mean = last.iter().sum::<f64>() / last.len().max(1) as f64;
            println!(
                "{} rounds, {} nodes, final mean accuracy {mean:.4}, written to {}",
                output.config.rounds,
                last.len(),
                dir.display()
            );
            Ok(())
        }
        Command::Analyze { input, subset } => {
            let subset = subset.map(|s| match s {
                SubsetArg::G1 => Subset::G1,
                SubsetArg::Community => Subset::Community,
            });
            for path in commands::analyze(&input, subset)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Plot { input, out, title } => commands::plot(&input, &out, title),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

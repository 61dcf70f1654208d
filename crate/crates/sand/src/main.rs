use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use sand::config::{load_config_file, ConfigOverrides, ExperimentConfig};
use sand::runner::{self, RunOptions, DEFAULT_FEATURE_COUNTS};
use sand::{netfile, output};
use sand_core::build_rank_table;

/// Device discovery simulator.
#[derive(Debug, Parser)]
#[command(name = "sand", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a network and write it in the network file format.
    Generate {
        #[command(flatten)]
        config: ConfigArgs,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one experiment.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        exec: ExecArgs,
    },
    /// Run the experiment for each feature-pool size on one topology.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        exec: ExecArgs,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_FEATURE_COUNTS)]
        feature_counts: Vec<u32>,
    },
    /// Merge result CSVs into one.
    Report {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the rank table of a saved network.
    Rank {
        network: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// TOML file with the same keys as the flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: ConfigOverrides,
}

impl ConfigArgs {
    fn resolve(self) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(path) => load_config_file(path)?,
            None => ConfigOverrides::default(),
        };
        Ok(ExperimentConfig::resolve(base.or(self.overrides))?)
    }
}

#[derive(Debug, Args)]
struct ExecArgs {
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    threads: Option<usize>,
    /// Log SAND token moves for this many leading requests.
    #[arg(long, default_value_t = 0)]
    trace: usize,
}

impl ExecArgs {
    fn options(self) -> RunOptions {
        RunOptions {
            out_dir: Some(self.out_dir),
            threads: self.threads,
            trace_requests: self.trace,
        }
    }
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Generate { config, out } => {
            let cfg = config.resolve()?;
            let net = runner::build_network(&cfg)?;
            netfile::save_network(&net, sink(out.as_deref())?)?;
        }
        Command::Run { config, exec } => {
            let cfg = config.resolve()?;
            eprintln!("run: {cfg}");
            let result = runner::run_experiment(&cfg, &exec.options())?;
            output::emit_csv(&result.summaries, io::stdout().lock())?;
        }
        Command::Sweep {
            config,
            exec,
            feature_counts,
        } => {
            let cfg = config.resolve()?;
            eprintln!("sweep: {cfg} feature-counts={feature_counts:?}");
            let rows = runner::sweep_features(&cfg, &feature_counts, &exec.options())?;
            output::emit_csv(&rows, io::stdout().lock())?;
        }
        Command::Report { inputs, out } => {
            let rows = runner::merge_reports(&inputs)?;
            output::emit_csv(&rows, sink(out.as_deref())?)?;
        }
        Command::Rank { network, out } => {
            let file = std::fs::File::open(&network)
                .with_context(|| format!("cannot open {}", network.display()))?;
            let net = netfile::load_network(io::BufReader::new(file))
                .with_context(|| format!("cannot load {}", network.display()))?;
            output::emit_rank_csv(&build_rank_table(&net), sink(out.as_deref())?)?;
        }
    }
    Ok(())
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain()
        .filter_map(|c| c.downcast_ref::<io::Error>())
        .any(|io| io.kind() == io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let text = e.to_string();
            eprintln!(
                "{}",
                text.lines().next().unwrap_or("error: invalid arguments")
            );
            return ExitCode::from(2);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

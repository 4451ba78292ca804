use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use evoqas::cli::{self, CliError, RunConfig};

#[derive(Parser)]
#[command(name = "evoqas", version, about = "Evolutionary search for high effective-dimension quantum circuits")]
struct Cli {
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the evolutionary search
    Evolve {
        #[command(flatten)]
        run: RunArgs,
        /// Suppress per-generation progress
        #[arg(long)]
        quiet: bool,
    },
    /// Effective dimension across data sizes
    EdSweep(RunArgs),
    /// Fisher eigenvalue spectra across qubit counts
    Spectrum(RunArgs),
    /// Print the number of distinct architectures
    Enumerate {
        #[arg(long, default_value_t = 1)]
        layers: usize,
    },
    /// Decode the configured model and print its circuit
    SampleCircuit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(config: &std::path::Path, seed: Option<u64>) -> Result<RunConfig, CliError> {
    let cfg = RunConfig::load(config).map_err(CliError::Config)?;
    Ok(match seed {
        Some(s) => cfg.with_seed(s),
        None => cfg,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Evolve { run, quiet } => {
            let cfg = load(&run.config, run.seed)?;
            let out = cli::resolve_out_dir(run.out.as_deref(), &cfg, "evolve", cfg.evolution.master_seed);
            cli::cmd_evolve(&cfg, &out, !quiet)?;
            println!("{}", out.display());
        }
        Command::EdSweep(run) => {
            let cfg = load(&run.config, run.seed)?;
            let out = cli::resolve_out_dir(run.out.as_deref(), &cfg, "ed-sweep", cfg.seed);
            cli::cmd_ed_sweep(&cfg, &out)?;
            println!("{}", out.display());
        }
        Command::Spectrum(run) => {
            let cfg = load(&run.config, run.seed)?;
            let out = cli::resolve_out_dir(run.out.as_deref(), &cfg, "spectrum", cfg.seed);
            cli::cmd_spectrum(&cfg, &out)?;
            println!("{}", out.display());
        }
        Command::Enumerate { layers } => println!("{}", cli::cmd_enumerate(layers)?),
        Command::SampleCircuit { config, seed, out } => {
            let cfg = load(&config, seed)?;
            print!("{}", cli::cmd_sample_circuit(&cfg, out.as_deref())?);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

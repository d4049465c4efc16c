//! `epi`: command-line front end for the epidemic simulator.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use episim::experiments::{
    self, output, ExperimentConfig, FinalTable, Results, RunManifest,
};
use episim::Error;

#[derive(Parser)]
#[command(name = "epi", version, about = "Spatial SIR epidemic simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Config file (`key = value` lines); a previous run's manifest.txt works too.
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Particle replicas: sampled trajectories and final sizes.
    Simulate(Common),
    /// Integrate the hydrodynamic system.
    Pde(Common),
    /// Solve for the final survivor density.
    Final(Common),
    /// Mean-field final size, peak and small-seed limit for each beta.
    Meanfield(Common),
    /// Infer beta and the initial infected profile from a final density table.
    Infer {
        #[command(flatten)]
        common: Common,
        /// CSV `site_index,rho0,rho1,rho_final`.
        #[arg(long)]
        input: PathBuf,
    },
    /// Particle vs PDE error across L.
    HydroSweep(Common),
    /// Final sizes under small seeding across beta and L.
    CriticalSweep(Common),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Pde(_) => "pde",
            Command::Final(_) => "final",
            Command::Meanfield(_) => "meanfield",
            Command::Infer { .. } => "infer",
            Command::HydroSweep(_) => "hydro-sweep",
            Command::CriticalSweep(_) => "critical-sweep",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Simulate(c)
            | Command::Pde(c)
            | Command::Final(c)
            | Command::Meanfield(c)
            | Command::HydroSweep(c)
            | Command::CriticalSweep(c) => c,
            Command::Infer { common, .. } => common,
        }
    }
}

fn load_config(common: &Common) -> episim::Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(out) = &common.out {
        config.out = out.clone();
    }
    Ok(config)
}

fn run(command: &Command) -> episim::Result<Vec<PathBuf>> {
    let start = Instant::now();
    let config = load_config(command.common())?;
    let mut manifest = RunManifest::new(command.name(), &config);
    let results = match command {
        Command::Simulate(_) => Results::Simulation(experiments::run_simulation(&config, &mut manifest)?),
        Command::Pde(_) => Results::Pde(experiments::run_pde(&config)?),
        Command::Final(_) => Results::Final(experiments::run_final(&config)?),
        Command::Meanfield(_) => {
            let rows = experiments::run_meanfield(&config)?;
            print!("{}", output::meanfield_csv(&rows));
            Results::MeanField(rows)
        }
        Command::Infer { input, .. } => {
            let table = FinalTable::read(input)?;
            manifest.record("input", input.display());
            Results::Infer(experiments::run_infer(&config, &table)?)
        }
        Command::HydroSweep(_) => Results::Hydro(experiments::run_hydro_sweep(&config, &mut manifest)?),
        Command::CriticalSweep(_) => {
            Results::Critical(experiments::run_critical_sweep(&config, &mut manifest)?)
        }
    };
    manifest.wall_ms = start.elapsed().as_millis();
    experiments::write_outputs(&results, &manifest, Path::new(&config.out))
}

fn exit_code(err: &Error) -> u8 {
    if err.is_numerical() {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(files) => {
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("epi {}: {err}", cli.command.name());
            ExitCode::from(exit_code(&err))
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use subthz_core::{DigitalScheme, Scheme, UpdateOrder};
use subthz_sim::output::{solver_trace, write_trace};
use subthz_sim::{
    load_config, run_campaign, write_channel_dumps, write_outputs, CampaignSpec, SimError,
};

#[derive(Parser)]
#[command(
    name = "subthz",
    version,
    about = "Subarray allocation and TTD/PS precoding campaigns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DigitalArg {
    ZfEqualPower,
    ZfCommonScale,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded Monte Carlo campaign and write its CSV files.
    Simulate {
        /// JSON config file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated subset of proposed_alg1, uniform_alg1, proposed_iasp.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "proposed_alg1,uniform_alg1,proposed_iasp"
        )]
        schemes: Vec<Scheme>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; results do not depend on it.
        #[arg(long, default_value_t = 1)]
        parallelism: usize,
        /// Use continuous delays instead of the TTD grid.
        #[arg(long)]
        unquantized: bool,
        /// Update all phase shifters from the previous iterate (Jacobi order).
        #[arg(long)]
        literal_step7: bool,
        /// Override the digital precoder of the config file.
        #[arg(long, value_enum)]
        digital: Option<DigitalArg>,
        /// Also write channels/trial_NNNNN.csv for every trial.
        #[arg(long)]
        dump_channels: bool,
        /// Also write trace.csv with the solver iterates of this trial.
        #[arg(long)]
        trace_trial: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), SimError> {
    let Command::Simulate {
        config,
        trials,
        seed,
        schemes,
        out,
        parallelism,
        unquantized,
        literal_step7,
        digital,
        dump_channels,
        trace_trial,
    } = cli.command;

    let mut cfg = load_config(&config)?;
    if unquantized {
        cfg.solver.quantize_delays = false;
    }
    if literal_step7 {
        cfg.solver.update_order = UpdateOrder::Jacobi;
    }
    match digital {
        Some(DigitalArg::ZfEqualPower) => cfg.digital = DigitalScheme::ZfEqualPower,
        Some(DigitalArg::ZfCommonScale) => cfg.digital = DigitalScheme::ZfCommonScale,
        None => {}
    }
    if let Some(t) = trace_trial {
        if t >= trials {
            return Err(SimError::InvalidCampaign(format!(
                "trace trial {t} is not below --trials {trials}"
            )));
        }
    }

    let spec = CampaignSpec {
        config: cfg,
        trials,
        master_seed: seed,
        schemes,
        parallelism,
    };
    let results = run_campaign(&spec)?;
    write_outputs(&results, &out)?;
    if dump_channels {
        write_channel_dumps(&results.trials, &out)?;
    }
    if let Some(t) = trace_trial {
        write_trace(&solver_trace(&spec.config, seed, t)?, &out)?;
    }

    for (trial, e) in &results.failures {
        eprintln!("warning: trial {trial} skipped: {e}");
    }
    for s in &results.summaries {
        println!(
            "{}: mean min-rate {:.6e}, median min-rate {:.6e}, median min-objective {:.6e}",
            s.scheme,
            s.mean_min_rate(),
            s.min_rate.median(),
            s.min_objective.median()
        );
    }
    Ok(())
}

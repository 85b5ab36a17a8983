use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use qoct_cli::{output, preset, run, selftest, CliError, ScenarioConfig};

/// OCT and quantum OCT interferogram simulator.
#[derive(Parser)]
#[command(name = "qoct", version)]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// Output directory
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Override the ensemble seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the number of delay points
    #[arg(long, global = true)]
    points: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file
    Run { config: PathBuf },
    /// Run a built-in scenario, or print it as a config file
    Preset {
        /// fig3, fig4 or hom
        name: String,
        #[arg(long)]
        emit_config: bool,
    },
    /// Run the built-in oracle checks
    Selftest,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match dispatch(&args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("qoct: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(args: &Args) -> Result<ExitCode, CliError> {
    match &args.command {
        Command::Run { config } => {
            let (config, text) = ScenarioConfig::load(config)?;
            execute(args, config, &text)
        }
        Command::Preset { name, emit_config } => {
            let config = preset::preset(name)?;
            let text = config.to_toml();
            if *emit_config {
                print!("{text}");
                return Ok(ExitCode::SUCCESS);
            }
            execute(args, config, &text)
        }
        Command::Selftest => {
            let checks = selftest::run_all();
            for c in &checks {
                println!(
                    "{} {}: {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            Ok(if checks.iter().all(|c| c.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
    }
}

fn execute(args: &Args, mut config: ScenarioConfig, text: &str) -> Result<ExitCode, CliError> {
    if let Some(n) = args.points {
        config.delay_axis.n_points = n;
    }
    if let (Some(seed), Some(ensemble)) = (args.seed, config.outputs.ensemble.as_mut()) {
        ensemble.seed = seed;
    }
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let result = run(&config, text, timestamp)?;
    output::write_run(&args.out, &result.files, &result.manifest)?;
    for (name, _) in &result.files {
        println!("{}", args.out.join(name).display());
    }
    println!("{}", args.out.join("manifest.json").display());
    Ok(ExitCode::SUCCESS)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use swtk::{cmd_flow, cmd_identities, cmd_screen, CliError, ConfigError, ExperimentConfig, EXIT_FAILURE};

#[derive(Parser)]
#[command(
    name = "swtk",
    version,
    about = "Seiberg–Witten experiments on a discretized flat 4-torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (flat `key = value` lines); defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed, overriding `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Parallel site sums; results are no longer bit-reproducible.
    #[arg(long, global = true)]
    parallel: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Run the identity and property suite.
    Identities,
    /// Minimize the energy from a seeded start.
    Flow,
    /// Enumerate admissible classes of an intersection form.
    Screen,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut c = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
                path: "--config".into(),
                message: format!("{}: {e}", path.display()),
            })?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &cli.out {
        c.out_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        c.seed = seed;
    }
    c.parallel |= cli.parallel;
    c.validate()?;
    Ok(c)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SWTK_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = load(&cli).and_then(|c| match cli.command {
        Command::Identities => cmd_identities(&c),
        Command::Flow => cmd_flow(&c),
        Command::Screen => cmd_screen(&c),
    });
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("swtk: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(u8::try_from(code).unwrap_or(EXIT_FAILURE as u8))
}

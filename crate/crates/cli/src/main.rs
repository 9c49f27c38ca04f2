use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use riesz_cli::config::{Overrides, ScenarioConfig};
use riesz_cli::presets;
use riesz_cli::run::{resolve_out_dir, run_scenario, CliError, OUT_ENV};

/// Pseudo-balayage, weighted equilibrium and capacity solvers for Riesz kernels.
///
/// Exit status: 0 on success, 1 on invalid input or a solver error,
/// 2 if some solve did not converge.
#[derive(Parser)]
#[command(name = "riesz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: OverrideArgs,
}

#[derive(Args)]
struct OverrideArgs {
    /// Riesz exponent, overrides kernel.alpha.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Ambient dimension, overrides kernel.dim.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Node count of the generator (per shell for annuli).
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Diagonal regularization factor, overrides kernel.reg_factor.
    #[arg(long, global = true)]
    reg_factor: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON config file.
    Run {
        config: PathBuf,
        /// Output directory; beats output.directory and RIESZ_OUT.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a bundled scenario.
    Preset {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the bundled scenarios.
    ListPresets,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = &cli.overrides;
    let overrides = Overrides {
        alpha: o.alpha,
        dim: o.dim,
        nodes: o.nodes,
        reg_factor: o.reg_factor,
    };
    let (text, base, out) = match cli.command {
        Command::ListPresets => {
            for line in presets::listing() {
                println!("{line}");
            }
            return ExitCode::SUCCESS;
        }
        Command::Run { config, out } => match std::fs::read_to_string(&config) {
            Ok(t) => {
                let base = config.parent().map(Path::to_path_buf).unwrap_or_default();
                (t, base, out)
            }
            Err(e) => {
                eprintln!("error: {}: {e}", config.display());
                return ExitCode::from(1);
            }
        },
        Command::Preset { name, out } => match presets::source(&name) {
            Some(t) => (t.to_string(), PathBuf::from("."), out),
            None => {
                eprintln!("error: unknown preset {name:?}; see `riesz list-presets`");
                return ExitCode::from(1);
            }
        },
    };
    match execute(&text, &base, out.as_deref(), &overrides) {
        Ok(converged) if converged => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("warning: at least one solve stopped at max_iters");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(text: &str, base: &Path, out: Option<&Path>, o: &Overrides) -> Result<bool, CliError> {
    let mut cfg = ScenarioConfig::from_json(text)?;
    cfg.apply(o)?;
    cfg.validate()?;
    let env = std::env::var_os(OUT_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    let dir = resolve_out_dir(out, &cfg, env);
    let outcome = run_scenario(&cfg, base, &dir)?;
    for line in &outcome.summaries {
        println!("{line}");
    }
    println!("artifacts in {}", outcome.out_dir.display());
    Ok(outcome.converged)
}

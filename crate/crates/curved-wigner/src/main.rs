use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use curved_wigner::cli_app::{
    run_and_persist, run_selfcheck, sweep_and_persist, OutputFormat, ScenarioConfig, SweepSpec,
};
use curved_wigner::error::CwError;

#[derive(Parser)]
#[command(
    name = "curved-wigner",
    version,
    about = "Local Wigner rotations and spin-curvature corrections on Schwarzschild orbits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario from a JSON config.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated subset of {csv, json} (overrides the config).
        #[arg(long, value_delimiter = ',')]
        format: Option<Vec<String>>,
    },
    /// Sweep one parameter of a scenario config over a range.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        param: String,
        #[arg(long)]
        start: f64,
        #[arg(long)]
        stop: f64,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        format: Option<Vec<String>>,
    },
    /// Run the full invariant suite and print one line per criterion.
    Selfcheck,
}

fn load_config(
    path: &PathBuf,
    out: Option<PathBuf>,
    format: Option<Vec<String>>,
) -> Result<ScenarioConfig, CwError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CwError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut config = ScenarioConfig::from_json(&text)?;
    if let Some(dir) = out {
        config.output.dir = dir;
    }
    if let Some(fmts) = format {
        let mut parsed = Vec::new();
        for f in fmts {
            match f.as_str() {
                "csv" => parsed.push(OutputFormat::Csv),
                "json" => parsed.push(OutputFormat::Json),
                other => return Err(CwError::Config(format!("unknown format '{other}'"))),
            }
        }
        config.output.formats = parsed;
    }
    Ok(config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            config,
            out,
            format,
        } => match load_config(&config, out, format).and_then(|c| run_and_persist(&c)) {
            Ok(manifest) => {
                for chk in &manifest.checks {
                    println!("{}", chk.line());
                }
                for path in &manifest.outputs {
                    println!("wrote {path}");
                }
                if manifest.all_pass() {
                    0
                } else {
                    4
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
        Command::Sweep {
            config,
            param,
            start,
            stop,
            count,
            out,
            format,
        } => {
            let spec = SweepSpec {
                param,
                start,
                stop,
                count,
            };
            match load_config(&config, out, format).and_then(|c| sweep_and_persist(&c, &spec)) {
                Ok(manifests) => {
                    let failures = manifests.iter().filter(|m| !m.all_pass()).count();
                    println!(
                        "sweep finished: {} points, {} with failing checks",
                        manifests.len(),
                        failures
                    );
                    if failures == 0 {
                        0
                    } else {
                        4
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Command::Selfcheck => run_selfcheck(),
    };
    ExitCode::from(code as u8)
}

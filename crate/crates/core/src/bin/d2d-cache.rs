use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use d2d_cache::experiments::{
    emit_results, largest_sizes, load_config, run_preset, ExperimentKind, ExperimentPreset, OutputFormat, PresetName,
};
use d2d_cache::Error;

/// Service success probability of cached D2D networks with mobile transmitters.
#[derive(Parser)]
#[command(name = "d2d-cache", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named preset or a TOML experiment file.
    Run {
        /// Preset name (see `list-presets`) or path to a config file.
        target: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        iterations: Option<u64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<OutputFormat>,
        /// Worker threads; all cores when omitted.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the built-in presets.
    ListPresets,
    /// Check a config file and print the resolved experiment.
    Validate { config: PathBuf },
}

fn resolve(target: &str) -> Result<ExperimentPreset, Error> {
    match target.parse::<PresetName>() {
        Ok(name) => Ok(ExperimentPreset::named(name)),
        Err(_) if Path::new(target).exists() => load_config(Path::new(target)),
        Err(_) => Err(Error::Config {
            path: target.to_owned(),
            message: "neither a preset name nor an existing file".into(),
        }),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run {
            target,
            seed,
            iterations,
            out,
            format,
            threads,
        } => {
            let mut preset = resolve(&target)?;
            if let Some(s) = seed {
                preset.seed = s;
            }
            if let Some(n) = iterations {
                preset.iterations = n;
            }
            if let Some(t) = threads {
                preset.threads = Some(t);
            }
            preset.out = out.or(preset.out);
            preset.format = format.unwrap_or(preset.format);
            preset.validate().map_err(|e| Error::Config {
                path: target.clone(),
                message: e.to_string(),
            })?;

            if preset.name == PresetName::OrderedComparison {
                for (variant, sizes) in largest_sizes(&preset, 5)? {
                    let gb: Vec<String> = sizes.iter().map(|z| format!("{:.2}", z / 1e9)).collect();
                    eprintln!("largest sizes [Gb] {variant:>12}: {}", gb.join(" "));
                }
            }
            // expected-metric runs ignore the catalogue sizes
            if preset.experiment == ExperimentKind::Total {
                for i in 0..preset.variants.len() {
                    if let Some(w) = preset.variant_scenario(i)?.truncation_warning()? {
                        eprintln!("warning: {w}");
                    }
                }
            }
            let rows = run_preset(&preset)?;
            let flagged = rows.iter().filter(|r| r.z_score() > 4.0).count();
            if flagged > 0 {
                eprintln!("warning: {flagged} rows differ from the closed form by more than 4 standard errors");
            }
            emit_results(&rows, preset.format, preset.out.as_deref())
        }
        Command::ListPresets => {
            for p in PresetName::ALL {
                println!("{:<20} {}", p.as_str(), p.description());
            }
            Ok(())
        }
        Command::Validate { config } => {
            let preset = load_config(&config)?;
            println!("{}", serde_json::to_string_pretty(&preset)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

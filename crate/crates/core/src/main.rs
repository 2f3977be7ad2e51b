use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cobot_trust::chart::{emit_svg_chart, Series};
use cobot_trust::config::{apply_override, parse_config, revalidate, ConfigError};
use cobot_trust::output::{emit_ensemble_json, emit_summary_json, emit_trajectory_csv};
use cobot_trust::report::{compare, table2, DEFAULT_ENSEMBLE_SEEDS};
use cobot_trust::sim::{run_ensemble, run_shift, ModelConfig, ModelVariant};

#[derive(Parser)]
#[command(
    name = "cobot-trust",
    version,
    about = "Human-cobot trust and fatigue shift simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set disruption.chance=0.2`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Directory for output files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a single shift.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        variant: Option<ModelVariant>,
        #[arg(long)]
        seed: Option<u64>,
        /// Formats to write into --out.
        #[arg(long, value_delimiter = ',', default_value = "csv,json,svg")]
        emit: Vec<Format>,
        /// Chart series.
        #[arg(long, value_delimiter = ',', default_value = "trust,fatigue")]
        series: Vec<Series>,
    },
    /// Run consecutive seeds and aggregate the KPIs.
    Ensemble {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        variant: Option<ModelVariant>,
        #[arg(long, default_value_t = DEFAULT_ENSEMBLE_SEEDS)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
    },
    /// KPI table for all four variants.
    Table2 {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_ENSEMBLE_SEEDS)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
    },
    /// Paired-seed comparison of v1.2 against v1.3.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = DEFAULT_ENSEMBLE_SEEDS)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        base_seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

enum Failure {
    Config(String),
    Io(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

fn load_config(
    common: &Common,
    variant: Option<ModelVariant>,
    seed: Option<u64>,
) -> Result<ModelConfig, Failure> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => ModelConfig::default(),
    };
    let mut seen = Vec::new();
    for (i, ov) in common.overrides.iter().enumerate() {
        let (key, value) = ov
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("--set expects KEY=VALUE, got `{ov}`")))?;
        // "line" numbers for overrides count the --set flags.
        apply_override(&mut cfg, key.trim(), value.trim(), i + 1)?;
        seen.push((key.trim().to_string(), i + 1));
    }
    if let Some(v) = variant {
        cfg.variant = v;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    revalidate(&cfg, &seen)?;
    Ok(cfg)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn sim_failure(e: cobot_trust::sim::SimError) -> Failure {
    Failure::Config(e.to_string())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run {
            common,
            variant,
            seed,
            emit,
            series,
        } => {
            let cfg = load_config(&common, variant, seed)?;
            let shift = run_shift(&cfg).map_err(sim_failure)?;
            let stem = format!("{}_seed{}", cfg.variant, cfg.seed);
            match &common.out {
                None => print!("{}", emit_summary_json(&shift.summary)),
                Some(dir) => {
                    if emit.contains(&Format::Csv) {
                        write_file(
                            dir,
                            &format!("{stem}.csv"),
                            &emit_trajectory_csv(&shift.records),
                        )?;
                    }
                    if emit.contains(&Format::Json) {
                        write_file(
                            dir,
                            &format!("{stem}.json"),
                            &emit_summary_json(&shift.summary),
                        )?;
                    }
                    if emit.contains(&Format::Svg) {
                        let title = format!("{} seed {}", cfg.variant, cfg.seed);
                        let svg = emit_svg_chart(&shift.records, &series, &title)
                            .map_err(|e| Failure::Config(e.to_string()))?;
                        write_file(dir, &format!("{stem}.svg"), &svg)?;
                    }
                }
            }
        }
        Command::Ensemble {
            common,
            variant,
            seeds,
            base_seed,
        } => {
            if seeds == 0 {
                return Err(Failure::Config("--seeds must be >= 1".into()));
            }
            let cfg = load_config(&common, variant, None)?;
            let e = run_ensemble(&cfg, seeds, base_seed).map_err(sim_failure)?;
            println!(
                "{} over {} seeds: mean productivity {:.3}, mean final trust {:.3}, mean final fatigue {:.3}",
                e.variant,
                e.n_seeds(),
                e.productivity.mean,
                e.final_trust.mean,
                e.final_fatigue.mean
            );
            println!(
                "runs with severe failure {}, censored recoveries {}",
                e.runs_with_severe(),
                e.censoring_count
            );
            if let Some(dir) = &common.out {
                write_file(
                    dir,
                    &format!("ensemble_{}.json", e.variant),
                    &emit_ensemble_json(&e),
                )?;
            }
        }
        Command::Table2 {
            common,
            seeds,
            base_seed,
        } => {
            if seeds == 0 {
                return Err(Failure::Config("--seeds must be >= 1".into()));
            }
            let cfg = load_config(&common, None, None)?;
            let t = table2(&cfg, seeds, base_seed).map_err(sim_failure)?;
            let text = t.render();
            print!("{text}");
            if let Some(dir) = &common.out {
                write_file(dir, "table2.txt", &text)?;
                for v in [ModelVariant::V1_0, ModelVariant::V1_1] {
                    let shift =
                        run_shift(&ModelConfig { variant: v, ..cfg }).map_err(sim_failure)?;
                    write_file(
                        dir,
                        &format!("{v}.csv"),
                        &emit_trajectory_csv(&shift.records),
                    )?;
                    let svg = emit_svg_chart(&shift.records, &Series::ALL, v.as_str())
                        .map_err(|e| Failure::Config(e.to_string()))?;
                    write_file(dir, &format!("{v}.svg"), &svg)?;
                }
            }
        }
        Command::Compare {
            common,
            seeds,
            base_seed,
        } => {
            if seeds < 2 {
                return Err(Failure::Config("--seeds must be >= 2".into()));
            }
            let cfg = load_config(&common, None, None)?;
            let c = compare(&cfg, seeds, base_seed).map_err(sim_failure)?;
            let text = c.render();
            print!("{text}");
            if let Some(dir) = &common.out {
                write_file(dir, "compare.txt", &text)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

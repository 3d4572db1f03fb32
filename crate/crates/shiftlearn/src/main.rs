use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shiftlearn::pipeline;
use shiftlearn::report;
use shiftlearn::synth::{GenSettings, Profile};
use shiftlearn::{CliError, RunConfig};
use shiftlearn_core::MonthId;

/// Learn rostering constraints from past months and solve new ones.
#[derive(Debug, Parser)]
#[command(name = "shiftlearn", version)]
struct Cli {
    /// Flat TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Data directory (overrides `data`).
    #[arg(long, global = true)]
    data: Option<PathBuf>,
    /// Output directory, relative to the data directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Mine with the margin and flexibility gates off.
    #[arg(long, global = true)]
    no_exclusion: bool,
    /// Seconds per month.
    #[arg(long, global = true)]
    time_budget: Option<u64>,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Restrict `solve` to one month, YYYY-MM.
    #[arg(long, global = true)]
    month: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic corpus with its ground-truth manifest.
    Gen {
        /// Generator settings as TOML; flags below override it.
        #[arg(long)]
        settings: Option<PathBuf>,
        #[arg(long, value_parser = ["facility", "long-runs"])]
        profile: Option<String>,
        #[arg(long)]
        months: Option<u32>,
        #[arg(long)]
        targets: Option<u32>,
        #[arg(long)]
        exceptions: Option<usize>,
    },
    /// Mine constraints from the history rosters.
    Extract,
    /// Solve target months through the relaxation ladder.
    Solve,
    /// Score a schedule, or compare two schedules of the same month.
    Evaluate { schedule: PathBuf, other: Option<PathBuf> },
    /// Print the effective configuration.
    Config,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref(), std::env::vars())?;
    if let Some(d) = cli.data {
        cfg.data = d;
    }
    if let Some(o) = cli.out {
        cfg.out = o;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.no_exclusion {
        cfg.exclusion = false;
    }
    if let Some(t) = cli.time_budget {
        cfg.time_budget = t;
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    cfg.validate()?;
    let month = cli
        .month
        .as_deref()
        .map(|m| {
            m.parse::<MonthId>()
                .map_err(|e| CliError::Config(format!("--month: {e}")))
        })
        .transpose()?;

    match cli.command {
        Command::Gen {
            settings,
            profile,
            months,
            targets,
            exceptions,
        } => {
            let mut s = match settings {
                Some(p) => {
                    let text =
                        std::fs::read_to_string(&p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
                    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
                }
                None => GenSettings::default(),
            };
            if let Some(p) = profile {
                s.profile = if p == "long-runs" {
                    Profile::LongRuns
                } else {
                    Profile::Facility
                };
                if s.profile == Profile::LongRuns && exceptions.is_none() {
                    s.exceptions = 1;
                }
            }
            if let Some(seed) = cli.seed {
                s.seed = seed;
            }
            if let Some(m) = months {
                s.history_months = m;
            }
            if let Some(t) = targets {
                s.target_months = t;
            }
            if let Some(e) = exceptions {
                s.exceptions = e;
            }
            let c = pipeline::cmd_gen(&s, &cfg.data)?;
            println!(
                "{} history months, {} target months, {} planted patterns, {} planted exceptions",
                c.history.len(),
                c.targets.len(),
                c.manifest.planted_patterns.len(),
                c.manifest.exceptions.len()
            );
        }
        Command::Extract => {
            let e = pipeline::cmd_extract(&cfg)?;
            println!(
                "{} constraints -> {}",
                e.constraints.len(),
                cfg.out_dir().join("constraints.txt").display()
            );
        }
        Command::Solve => {
            let solved = pipeline::cmd_solve(&cfg, month)?;
            let mut failed = 0;
            for s in &solved {
                println!(
                    "{} {} objective={} hard={} {} -> {}",
                    s.month,
                    s.schedule.status.label(),
                    s.schedule.objective,
                    s.schedule.hard_violations,
                    s.trace,
                    s.path.display()
                );
                if !s.schedule.status.is_ok() {
                    failed += 1;
                }
            }
            if failed > 0 {
                return Err(CliError::Infeasible(failed));
            }
        }
        Command::Evaluate { schedule, other } => {
            let (r, cmp) = pipeline::cmd_evaluate(&cfg, &schedule, other.as_deref())?;
            print!("{}", report::report_table(&r));
            if let Some(c) = cmp {
                print!("{}", report::comparison_table(&c));
            }
        }
        Command::Config => print!("{}", cfg.to_toml()),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shiftlearn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

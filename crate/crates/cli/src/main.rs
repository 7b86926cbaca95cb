use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use corptax::config::{ConfigError, RunConfig};
use corptax::registry::Overrides;
use corptax::{check, CliError};

/// Corporate tax reform simulator.
#[derive(Parser)]
#[command(name = "corptax", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Pre- and post-reform steady states of a scenario.
    SolveSs {
        scenario: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve a scenario's transition and write its result files.
    Run {
        scenario: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Write the distortion map and the marked tax codes.
    Grid {
        #[command(flatten)]
        common: Common,
    },
    /// Run the invariant suite.
    Check,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory [default: from config, else out/<scenario>].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Transition horizon in periods.
    #[arg(long)]
    horizon: Option<usize>,
    /// Transition Newton tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            horizon: self.horizon,
            tol: self.tol,
        }
    }

    /// The config file, with the scenario argument taking precedence.
    fn load(&self, scenario: Option<&str>, default: Option<&str>) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => corptax::read_config(p)?,
            None => match scenario.or(default) {
                Some(s) => RunConfig::for_scenario(s),
                None => {
                    return Err(ConfigError::single(
                        "scenario",
                        "a scenario argument or --config file",
                        None,
                    )
                    .into())
                }
            },
        };
        if let Some(s) = scenario {
            cfg.scenario = s.into();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn report(files: Vec<PathBuf>) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn dispatch(verb: Verb) -> Result<bool, CliError> {
    match verb {
        Verb::SolveSs { scenario, common } => {
            let cfg = common.load(scenario.as_deref(), None)?;
            let out = corptax::out_dir(common.out.as_deref(), &cfg);
            report(corptax::solve_ss(&cfg, &common.overrides(), &out)?);
        }
        Verb::Run { scenario, common } => {
            let cfg = common.load(scenario.as_deref(), None)?;
            let out = corptax::out_dir(common.out.as_deref(), &cfg);
            report(corptax::run(&cfg, &common.overrides(), &out)?);
        }
        Verb::Grid { common } => {
            let cfg = common.load(None, Some("fig10-grid"))?;
            let out = corptax::out_dir(common.out.as_deref(), &cfg);
            report(corptax::grid(&cfg, &common.overrides(), &out)?);
        }
        Verb::Check => {
            let mut ok = true;
            for o in check::run_all() {
                match o.result {
                    Ok(detail) => println!("PASS {}: {detail}", o.name),
                    Err(why) => {
                        ok = false;
                        println!("FAIL {}: {why}", o.name);
                    }
                }
            }
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.verb) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

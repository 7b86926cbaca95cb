//! Config files, scenario registry, result files and the command-line
//! driver around `corptax-core`.

pub mod check;
pub mod config;
pub mod emit;
pub mod registry;

use std::path::{Path, PathBuf};

use corptax_core::scenarios::{decompose_factors, run_scenario};
use corptax_core::steady::solve_steady_state;
use corptax_core::transition::{TAIL_GAP_TOL, TERMINAL_GAP_TOL};
use corptax_core::NewtonOptions;
use serde_json::{json, Value};

use config::{ConfigError, RunConfig};
use emit::RunDir;
use registry::{GridJob, Job, Overrides};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Model(#[from] corptax_core::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn io(context: String, source: std::io::Error) -> Self {
        CliError::Io { context, source }
    }

    /// 2 for configuration problems, 3 for solver failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use corptax_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Model(e) => {
                let mut e = e;
                while let E::Scenario { source, .. } = e {
                    e = source;
                }
                match e {
                    E::InvalidParameter { .. } | E::Restriction(_) => 2,
                    _ => 3,
                }
            }
            CliError::Io { .. } | CliError::Other(_) => 1,
        }
    }
}

pub fn read_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    Ok(config::parse_config(&text)?)
}

/// Output directory: flag, then config, then `out/<scenario>`.
pub fn out_dir(flag: Option<&Path>, cfg: &RunConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| Path::new("out").join(&cfg.scenario))
}

fn tolerances(transition_tol: f64) -> Value {
    json!({
        "steady_state": NewtonOptions::STEADY_STATE.tol,
        "transition": transition_tol,
        "terminal_gap": TERMINAL_GAP_TOL,
        "tail_gap": TAIL_GAP_TOL,
        "revenue_change_floor": corptax_core::scenarios::REVENUE_CHANGE_FLOOR,
    })
}

fn manifest(verb: &str, cfg: &RunConfig, o: &Overrides, body: Value) -> Value {
    let mut m = json!({
        "program": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "verb": verb,
        "scenario": cfg.scenario,
        "config": cfg.to_toml(),
        "flags": { "horizon": o.horizon, "tol": o.tol },
    });
    if let (Value::Object(m), Value::Object(b)) = (&mut m, body) {
        m.extend(b);
    }
    m
}

fn finish(mut dir: RunDir, verb: &str, cfg: &RunConfig, o: &Overrides, body: Value) -> Result<Vec<PathBuf>, CliError> {
    dir.write("config.toml", cfg.to_toml().as_bytes())?;
    let mut files = dir.files().to_vec();
    files.push("manifest.json".into());
    let mut body = body;
    body["files"] = json!(files);
    dir.write_json("manifest.json", &manifest(verb, cfg, o, body))?;
    dir.commit()
}

fn grid_files(dir: &mut RunDir, g: &GridJob) -> Result<Value, CliError> {
    emit::write_grid(dir, g)?;
    emit::write_policy_points(dir, g)?;
    Ok(json!({
        "tau": { "lo": g.tau.lo, "hi": g.tau.hi, "points": g.tau.points },
        "lambda": { "lo": g.lambda.lo, "hi": g.lambda.hi, "points": g.lambda.points },
        "alpha": g.alpha,
        "beta": g.beta,
    }))
}

/// `run`: solve the configured experiment and write its result files.
pub fn run(cfg: &RunConfig, o: &Overrides, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let job = registry::build(cfg, o)?;
    let mut dir = RunDir::create(out)?;
    let body = match job {
        Job::Reform(s) => {
            let r = run_scenario(&s)?;
            if cfg.emit_path() {
                emit::write_path(&mut dir, "path.csv", &r)?;
            }
            if cfg.emit_summary() {
                emit::write_summary(&mut dir, &r)?;
            }
            let grid = if cfg.emit_distortion_grid() {
                grid_files(&mut dir, &registry::grid_job(&cfg.grid))?
            } else {
                Value::Null
            };
            json!({
                "rate_cut": Value::Null,
                "new_investment_only": s.new_investment_only,
                "tolerances": tolerances(s.tol),
                "result": emit::reform_json(&r),
                "grid": grid,
            })
        }
        Job::Decomposition(exp) => {
            let d = decompose_factors(&exp)?;
            emit::write_decomposition(&mut dir, &d)?;
            if cfg.emit_path() {
                for (f, r) in &d.results {
                    emit::write_path(&mut dir, &format!("path-{}.csv", f.name()), r)?;
                }
            }
            json!({
                "rate_cut": exp.mode.name(),
                "cut": exp.cut,
                "tolerances": tolerances(exp.tol),
                "results": d.results.iter().map(|(_, r)| emit::reform_json(r)).collect::<Vec<_>>(),
            })
        }
        Job::Grid(g) => json!({ "rate_cut": Value::Null, "grid": grid_files(&mut dir, &g)? }),
    };
    finish(dir, "run", cfg, o, body)
}

/// `solve-ss`: pre- and post-reform steady states of a reform scenario.
pub fn solve_ss(cfg: &RunConfig, o: &Overrides, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let Job::Reform(s) = registry::build(cfg, o)? else {
        return Err(ConfigError::single(
            "scenario",
            "a reform scenario (not fig9-decomposition or fig10-grid) for solve-ss",
            Some(format!("{:?}", cfg.scenario)),
        )
        .into());
    };
    let pre = solve_steady_state(&s.pre, None)?;
    let post = solve_steady_state(&s.post(), Some(&pre.state))?;
    let mut dir = RunDir::create(out)?;
    emit::write_steady_states(&mut dir, &pre.state, &post.state)?;
    let side = |ss: &corptax_core::steady::SteadyState| {
        json!({
            "spec": emit::spec_json(&ss.spec),
            "wedge": { "lambda": ss.wedge.lambda_ss, "wedge": ss.wedge.wedge, "distortion": ss.wedge.distortion },
            "moments": {
                "profit": ss.moments.profit,
                "div": ss.moments.div,
                "tax_corp": ss.moments.tax_corp,
                "tax_indiv": ss.moments.tax_indiv,
            },
            "ccorp_share": ss.ccorp_share(),
            "solver": emit::stats_json(&ss.stats),
        })
    };
    let body = json!({
        "tolerances": tolerances(s.tol),
        "pre": side(&pre),
        "post": side(&post),
    });
    finish(dir, "solve-ss", cfg, o, body)
}

/// `grid`: distortion map and the marked tax codes.
pub fn grid(cfg: &RunConfig, o: &Overrides, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    let mut dir = RunDir::create(out)?;
    let g = grid_files(&mut dir, &registry::grid_job(&cfg.grid))?;
    finish(dir, "grid", cfg, o, json!({ "grid": g }))
}

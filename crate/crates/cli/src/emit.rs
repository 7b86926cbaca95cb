//! Result files.
//!
//! Everything for one run is first written to a hidden temporary directory
//! inside the output directory and only moved into place once every file
//! has been written, so a failed run leaves no partial output.
//!
//! Column sets:
//!
//! * `path.csv`: `t`, one column per model variable (`ALL_VARS` order), then
//!   the aggregate measures `gdp`, `investment`, `payout`, `corp_revenue`,
//!   `ccorp_investment`, `gdp_current_price`, `investment_current_price`.
//!   Two-good aggregates without a suffix are valued at the pre-reform
//!   relative price.
//! * `summary.csv`: `measure, long_run_change, multiplier, impact`. An empty
//!   multiplier means the revenue change was too small to divide by.
//! * `decomposition.csv`: `experiment` followed by the summary columns, for
//!   each factor run plus the `one-at-a-time-sum` and `interaction` rows.
//! * `distortion_grid.csv`: `tau, lambda, distortion`.
//! * `policy_points.csv`: `label, tau, rate_dbal, lambda, wedge, distortion`.
//! * `steady_state.csv`: `variable, pre, post`.
//!
//! Floats are written with 17 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use corptax_core::model::{ModelSpec, State, Var, ALL_VARS};
use corptax_core::scenarios::{FactorDecomposition, Measure, ReformResult};
use corptax_core::taxcode::{distortion_grid, wedge_report};
use corptax_core::SolveStats;
use serde_json::{json, Value};
use tempfile::TempDir;

use crate::registry::{GridJob, POLICY_POINTS};
use crate::CliError;

/// 17 significant digits, enough to round-trip any f64.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A run directory being filled.
pub struct RunDir {
    out: PathBuf,
    tmp: TempDir,
    files: Vec<String>,
}

impl RunDir {
    pub fn create(out: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(out).map_err(|e| CliError::io(format!("creating {}", out.display()), e))?;
        let tmp = tempfile::Builder::new()
            .prefix(".corptax-partial-")
            .tempdir_in(out)
            .map_err(|e| CliError::io(format!("creating a staging directory in {}", out.display()), e))?;
        Ok(RunDir {
            out: out.to_path_buf(),
            tmp,
            files: Vec::new(),
        })
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let p = self.tmp.path().join(name);
        fs::write(&p, bytes).map_err(|e| CliError::io(format!("writing {name}"), e))?;
        self.files.push(name.into());
        Ok(())
    }

    pub fn write_csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| CliError::Other(format!("formatting {name}: {e}"));
        w.write_record(header).map_err(csv_err)?;
        for r in rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Other(format!("formatting {name}: {e}")))?;
        self.write(name, &bytes)
    }

    pub fn write_json(&mut self, name: &str, v: &Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(v).expect("json values serialise");
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Moves every staged file into the output directory.
    pub fn commit(self) -> Result<Vec<PathBuf>, CliError> {
        let mut placed = Vec::with_capacity(self.files.len());
        for f in &self.files {
            let to = self.out.join(f);
            fs::rename(self.tmp.path().join(f), &to).map_err(|e| CliError::io(format!("moving {f} into place"), e))?;
            placed.push(to);
        }
        Ok(placed)
    }
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

pub fn path_columns() -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend(ALL_VARS.iter().map(|v| v.name().to_string()));
    h.extend(Measure::ALL.iter().map(|m| m.name().to_string()));
    h
}

pub fn write_path(dir: &mut RunDir, name: &str, r: &ReformResult) -> Result<(), CliError> {
    let p0 = r.baseline[Var::P];
    let rows: Vec<Vec<String>> = r
        .path
        .states
        .iter()
        .enumerate()
        .map(|(t, s)| {
            let mut row = vec![t.to_string()];
            row.extend(s.0.iter().map(|&x| num(x)));
            row.extend(Measure::ALL.iter().map(|m| num(m.eval(s, p0))));
            row
        })
        .collect();
    dir.write_csv(name, &path_columns(), &rows)
}

pub const SUMMARY_COLUMNS: [&str; 4] = ["measure", "long_run_change", "multiplier", "impact"];

fn summary_rows(r: &ReformResult) -> Vec<Vec<String>> {
    r.summary
        .iter()
        .map(|s| {
            vec![
                s.measure.name().to_string(),
                num(s.long_run_change),
                s.multiplier.map(num).unwrap_or_default(),
                num(s.impact),
            ]
        })
        .collect()
}

pub fn write_summary(dir: &mut RunDir, r: &ReformResult) -> Result<(), CliError> {
    dir.write_csv("summary.csv", &header(&SUMMARY_COLUMNS), &summary_rows(r))
}

pub fn write_decomposition(dir: &mut RunDir, d: &FactorDecomposition) -> Result<(), CliError> {
    let mut h = vec!["experiment".to_string()];
    h.extend(header(&SUMMARY_COLUMNS));
    let mut rows = Vec::new();
    for (f, r) in &d.results {
        for mut row in summary_rows(r) {
            row.insert(0, f.name().to_string());
            rows.push(row);
        }
    }
    for m in Measure::ALL {
        let sum_mult = d.multiplier_sum(m);
        let old_mult = d.result(corptax_core::scenarios::Factor::Old).multiplier(m);
        rows.push(vec![
            "one-at-a-time-sum".into(),
            m.name().into(),
            num(d.one_at_a_time_sum(m)),
            sum_mult.map(num).unwrap_or_default(),
            String::new(),
        ]);
        rows.push(vec![
            "interaction".into(),
            m.name().into(),
            num(d.interaction(m)),
            old_mult.zip(sum_mult).map(|(o, s)| num(o - s)).unwrap_or_default(),
            String::new(),
        ]);
    }
    dir.write_csv("decomposition.csv", &h, &rows)
}

pub fn write_grid(dir: &mut RunDir, g: &GridJob) -> Result<(), CliError> {
    let points = distortion_grid(g.tau, g.lambda, g.alpha)?;
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| vec![num(p.tau), num(p.lambda), num(p.distortion)])
        .collect();
    dir.write_csv("distortion_grid.csv", &header(&["tau", "lambda", "distortion"]), &rows)
}

pub fn write_policy_points(dir: &mut RunDir, g: &GridJob) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for &(label, tau, rate) in POLICY_POINTS {
        let w = wedge_report(tau, rate, g.beta, g.alpha)?;
        rows.push(vec![
            label.to_string(),
            num(tau),
            num(rate),
            num(w.lambda_ss),
            num(w.wedge),
            num(w.distortion),
        ]);
    }
    dir.write_csv(
        "policy_points.csv",
        &header(&["label", "tau", "rate_dbal", "lambda", "wedge", "distortion"]),
        &rows,
    )
}

pub fn write_steady_states(dir: &mut RunDir, pre: &State, post: &State) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = ALL_VARS
        .iter()
        .map(|&v| vec![v.name().to_string(), num(pre[v]), num(post[v])])
        .collect();
    dir.write_csv("steady_state.csv", &header(&["variable", "pre", "post"]), &rows)
}

pub fn spec_json(s: &ModelSpec) -> Value {
    use corptax_core::model::{Aggregator, LaborSupply, Utilization};
    let aggregator = match s.aggregator {
        Aggregator::CobbDouglas { gamma } => json!({ "kind": "cobb-douglas", "gamma": gamma }),
        Aggregator::Ces { eta, epsilon } => json!({ "kind": "ces", "eta": eta, "epsilon": epsilon }),
    };
    let labor = match s.labor {
        LaborSupply::Fixed { ccorp } => json!({ "kind": "fixed", "ccorp": ccorp }),
        LaborSupply::Elastic { phi } => json!({ "kind": "elastic", "phi": phi }),
    };
    let utilization = match s.utilization {
        Utilization::Pinned => json!({ "kind": "pinned" }),
        Utilization::Variable { delta2 } => json!({ "kind": "variable", "delta2": delta2 }),
    };
    json!({
        "beta": s.beta,
        "sigma": s.sigma,
        "alpha_c": s.alpha_c,
        "alpha_p": s.alpha_p,
        "delta_c": s.delta_c,
        "delta_p": s.delta_p,
        "aggregator": aggregator,
        "labor": labor,
        "utilization": utilization,
        "policy": {
            "tau_corp": s.policy.tau_corp,
            "rate_dbal": s.policy.sched.rate(),
            "tau_indiv": s.policy.tau_indiv,
            "theta_waste": s.policy.theta_waste,
        },
    })
}

pub fn stats_json(s: &SolveStats) -> Value {
    json!({ "iterations": s.iterations, "residual": s.residual, "trace": s.trace })
}

/// Inputs, steady states and solver diagnostics of one reform run.
pub fn reform_json(r: &ReformResult) -> Value {
    json!({
        "name": r.name,
        "pre": spec_json(&r.pre.spec),
        "post": spec_json(&r.post.spec),
        "horizon": r.path.states.len(),
        "cumulative_years": r.cumulative_years,
        "wedge": { "pre": r.pre.wedge.wedge, "post": r.post.wedge.wedge },
        "ccorp_share": { "pre": r.pre.ccorp_share(), "post": r.post.ccorp_share() },
        "solver": {
            "steady_state": { "pre": stats_json(&r.pre.stats), "post": stats_json(&r.post.stats) },
            "transition": stats_json(&r.path.stats),
            "terminal_gap": r.path.terminal_gap,
        },
    })
}

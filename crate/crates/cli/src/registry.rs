//! Named scenarios and the translation of a config into solver inputs.

use corptax_core::calibration::{self, ALPHA, BETA};
use corptax_core::model::{Aggregator, LaborSupply, ModelSpec, Utilization};
use corptax_core::scenarios::{builtin, FactorExperiment, RateCut, Scenario};
use corptax_core::steady::calibrate_eta;
use corptax_core::taxcode::{Axis, DepreciationSchedule, TaxPolicy};
use corptax_core::transition::DEFAULT_HORIZON;
use corptax_core::NewtonOptions;

use crate::config::{ConfigError, EconomyConfig, GridConfig, ReformConfig, RunConfig, Violation};
use crate::CliError;

pub const SCENARIOS: &[&str] = &[
    "tcja17",
    "kennedy",
    "tcja17-rate-only",
    "tcja17-bonus-only",
    "fig9-decomposition",
    "fig10-grid",
    "null",
    "custom",
];

pub const ECONOMY_BASES: &[&str] = &["extended-2017", "extended-1961", "baseline-2017"];

/// Tax codes marked on the distortion map: label, corporate rate and
/// declining-balance depreciation rate.
pub const POLICY_POINTS: &[(&str, f64, f64)] = &[
    ("1961", calibration::TAU_1961, calibration::RATE_DBAL_1961),
    ("1965", calibration::TAU_1965, calibration::RATE_DBAL_1965),
    ("2017", calibration::TAU_2017, calibration::RATE_DBAL_2017),
    ("2018", calibration::TAU_TCJA, calibration::RATE_DBAL_TCJA),
];

/// Command-line settings that take precedence over the config.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub horizon: Option<usize>,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridJob {
    pub tau: Axis,
    pub lambda: Axis,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Reform(Scenario),
    Decomposition(FactorExperiment),
    Grid(GridJob),
}

fn horizon(cfg: &RunConfig, o: &Overrides) -> usize {
    o.horizon.or(cfg.horizon).unwrap_or(DEFAULT_HORIZON)
}

fn tol(cfg: &RunConfig, o: &Overrides) -> f64 {
    o.tol.or(cfg.solver.tol).unwrap_or(NewtonOptions::TRANSITION.tol)
}

pub fn build(cfg: &RunConfig, o: &Overrides) -> Result<Job, CliError> {
    cfg.validate()?;
    if let Some(h) = o.horizon {
        if h < 2 {
            return Err(ConfigError::single("--horizon", "an integer >= 2", Some(h.to_string())).into());
        }
    }
    if let Some(t) = o.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(ConfigError::single("--tol", "a number > 0", Some(t.to_string())).into());
        }
    }
    let h = horizon(cfg, o);
    let years = cfg.cumulative_years.unwrap_or(corptax_core::scenarios::DEFAULT_CUMULATIVE_YEARS);
    if years > h {
        return Err(ConfigError::single(
            "cumulative_years",
            format!("an integer <= horizon ({h})"),
            Some(years.to_string()),
        )
        .into());
    }
    let tol = tol(cfg, o);
    Ok(match cfg.scenario.as_str() {
        "fig9-decomposition" => {
            let d = &cfg.decomposition;
            let mode = match d.rate_cut.as_deref() {
                Some("relative") => RateCut::Relative,
                _ => RateCut::PercentagePoints,
            };
            let std = FactorExperiment::standard(mode);
            Job::Decomposition(FactorExperiment {
                cut: d.cut.unwrap_or(std.cut),
                cumulative_years: years,
                horizon: h,
                tol,
                ..std
            })
        }
        "fig10-grid" => Job::Grid(grid_job(&cfg.grid)),
        name => {
            let s = reform_scenario(name, &cfg.economy, &cfg.reform)?;
            Job::Reform(Scenario {
                cumulative_years: years,
                horizon: h,
                tol,
                ..s
            })
        }
    })
}

pub fn grid_job(g: &GridConfig) -> GridJob {
    GridJob {
        tau: Axis::new(g.tau_lo.unwrap_or(0.0), g.tau_hi.unwrap_or(0.6), g.tau_points.unwrap_or(61)),
        lambda: Axis::new(g.lambda_lo.unwrap_or(0.0), g.lambda_hi.unwrap_or(1.0), g.lambda_points.unwrap_or(51)),
        alpha: g.alpha.unwrap_or(ALPHA),
        beta: BETA,
    }
}

fn base_economy(name: &str) -> ModelSpec {
    match name {
        "extended-1961" => calibration::extended_1961(),
        "baseline-2017" => calibration::baseline_2017(),
        _ => calibration::extended_2017(),
    }
}

fn reform_scenario(name: &str, e: &EconomyConfig, r: &ReformConfig) -> Result<Scenario, CliError> {
    let template = match name {
        "tcja17" => builtin::tcja17(),
        "kennedy" => builtin::kennedy(),
        "tcja17-rate-only" => builtin::tcja17_rate_only(),
        "tcja17-bonus-only" => builtin::tcja17_bonus_only(),
        "null" => builtin::null(),
        _ => {
            let pre = base_economy(e.base.as_deref().unwrap_or("extended-2017"));
            Scenario::new("custom", pre, pre.policy)
        }
    };
    let pre = apply_economy(template.pre, e)?;
    if template.null {
        return Ok(Scenario {
            name: template.name.clone(),
            ..Scenario::null(&template.name, pre)
        });
    }
    let post = apply_reform(carry_over(&template, &pre.policy)?, r)?;
    Ok(Scenario {
        pre,
        post_policy: post,
        new_investment_only: r.new_investment_only.unwrap_or(template.new_investment_only),
        ..template
    })
}

/// Post-reform policy for a possibly modified pre-reform economy: fields the
/// template reform changes keep their reform values, the rest follow `pre`.
fn carry_over(template: &Scenario, pre: &TaxPolicy) -> Result<TaxPolicy, CliError> {
    let (old, new) = (&template.pre.policy, &template.post_policy);
    let pick = |o: f64, n: f64, p: f64| if o == n { p } else { n };
    let rate = pick(old.sched.rate(), new.sched.rate(), pre.sched.rate());
    Ok(TaxPolicy::new(
        pick(old.tau_corp, new.tau_corp, pre.tau_corp),
        rate,
        pick(old.tau_indiv, new.tau_indiv, pre.tau_indiv),
        pick(old.theta_waste, new.theta_waste, pre.theta_waste),
    )?)
}

fn apply_policy(
    p: TaxPolicy,
    tau_corp: Option<f64>,
    rate_dbal: Option<f64>,
    tau_indiv: Option<f64>,
    theta_waste: Option<f64>,
) -> Result<TaxPolicy, CliError> {
    let sched = match rate_dbal {
        Some(r) => DepreciationSchedule::new(r)?,
        None => p.sched,
    };
    Ok(TaxPolicy::new(
        tau_corp.unwrap_or(p.tau_corp),
        sched.rate(),
        tau_indiv.unwrap_or(p.tau_indiv),
        theta_waste.unwrap_or(p.theta_waste),
    )?)
}

fn apply_reform(p: TaxPolicy, r: &ReformConfig) -> Result<TaxPolicy, CliError> {
    apply_policy(p, r.tau_corp, r.rate_dbal, r.tau_indiv, r.theta_waste)
}

fn apply_economy(mut s: ModelSpec, e: &EconomyConfig) -> Result<ModelSpec, CliError> {
    let mut mismatch = Vec::new();
    let mut needs = |key: &str, value: Option<f64>, ok: bool, what: &str| {
        if let (Some(v), false) = (value, ok) {
            mismatch.push(Violation {
                key: format!("economy.{key}"),
                expected: format!("only with {what}"),
                got: Some(v.to_string()),
            });
        }
    };
    let ces = matches!(s.aggregator, Aggregator::Ces { .. });
    let elastic = matches!(s.labor, LaborSupply::Elastic { .. });
    let variable = matches!(s.utilization, Utilization::Variable { .. });
    needs("epsilon", e.epsilon, ces, "a CES bundle");
    needs("phi", e.phi, elastic, "elastic labor");
    needs("labor_ccorp", e.labor_ccorp, !elastic, "fixed labor");
    needs("delta2", e.delta2, variable, "variable utilization");
    if !mismatch.is_empty() {
        return Err(ConfigError(mismatch).into());
    }

    s.beta = e.beta.unwrap_or(s.beta);
    s.sigma = e.sigma.unwrap_or(s.sigma);
    s.alpha_c = e.alpha_c.unwrap_or(s.alpha_c);
    s.alpha_p = e.alpha_p.unwrap_or(s.alpha_p);
    s.delta_c = e.delta_c.unwrap_or(s.delta_c);
    s.delta_p = e.delta_p.unwrap_or(s.delta_p);
    match &mut s.aggregator {
        Aggregator::Ces { eta, epsilon } => {
            *eta = e.eta.unwrap_or(*eta);
            *epsilon = e.epsilon.unwrap_or(*epsilon);
        }
        Aggregator::CobbDouglas { gamma } => *gamma = e.eta.unwrap_or(*gamma),
    }
    match &mut s.labor {
        LaborSupply::Elastic { phi } => *phi = e.phi.unwrap_or(*phi),
        LaborSupply::Fixed { ccorp } => *ccorp = e.labor_ccorp.unwrap_or(*ccorp),
    }
    if let Utilization::Variable { delta2 } = &mut s.utilization {
        *delta2 = e.delta2.unwrap_or(*delta2);
    }
    s.policy = apply_policy(s.policy, e.tau_corp, e.rate_dbal, e.tau_indiv, e.theta_waste)?;
    s.validate()?;
    if let Some(target) = e.share_target {
        s = s.with_eta(calibrate_eta(&s, target)?)?;
    }
    Ok(s)
}

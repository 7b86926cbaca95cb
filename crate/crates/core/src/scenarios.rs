//! Reform experiments: cumulative long-run changes, revenue multipliers and
//! the provision and factor decompositions.

use alloc::string::String;
use alloc::vec::Vec;

use crate::calibration;
use crate::error::{Error, Result};
use crate::model::{aggregates, aggregates_at_price, ModelSpec, State, Var};
use crate::newton::NewtonOptions;
use crate::steady::{solve_steady_state, SteadyState};
use crate::taxcode::TaxPolicy;
use crate::transition::{solve_transition_with, TransitionPath, TransitionProblem, DEFAULT_HORIZON};

/// Years summed for long-run changes and multipliers.
pub const DEFAULT_CUMULATIVE_YEARS: usize = 20;
/// Cumulative revenue changes below this fraction of baseline revenue leave
/// multipliers undefined.
pub const REVENUE_CHANGE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    /// Pre-reform economy, including its tax policy.
    pub pre: ModelSpec,
    pub post_policy: TaxPolicy,
    /// Whether a new depreciation schedule applies only to investment made
    /// after the reform.
    pub new_investment_only: bool,
    /// Marks a deliberate no-change experiment.
    pub null: bool,
    pub cumulative_years: usize,
    pub horizon: usize,
    pub tol: f64,
}

impl Scenario {
    pub fn new(name: &str, pre: ModelSpec, post_policy: TaxPolicy) -> Self {
        Scenario {
            name: name.into(),
            pre,
            post_policy,
            new_investment_only: true,
            null: false,
            cumulative_years: DEFAULT_CUMULATIVE_YEARS,
            horizon: DEFAULT_HORIZON,
            tol: NewtonOptions::TRANSITION.tol,
        }
    }

    /// A scenario whose post-reform policy equals the pre-reform one.
    pub fn null(name: &str, pre: ModelSpec) -> Self {
        Scenario {
            null: true,
            ..Scenario::new(name, pre, pre.policy)
        }
    }

    pub fn post(&self) -> ModelSpec {
        self.pre.with_policy(self.post_policy)
    }

    pub fn validate(&self) -> Result<()> {
        self.pre.validate()?;
        self.post().validate()?;
        if !self.null && self.pre.policy == self.post_policy {
            return Err(Error::Restriction(
                "reform leaves every policy parameter unchanged; mark it as a null scenario",
            ));
        }
        if self.null && self.pre.policy != self.post_policy {
            return Err(Error::Restriction("null scenario changes policy"));
        }
        if self.cumulative_years == 0 || self.cumulative_years > self.horizon {
            return Err(Error::invalid(
                "cumulative_years",
                self.cumulative_years as f64,
                "between 1 and the horizon",
            ));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol", self.tol, "positive"));
        }
        Ok(())
    }
}

/// Aggregate series reported for every experiment. Two-good aggregates are
/// valued at the pre-reform relative price; current-price variants are
/// reported alongside.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    /// `Y + p0 Y_pt`
    Gdp,
    /// `i + p0 i_pt`
    Investment,
    /// c-corporate dividends.
    Payout,
    CorpRevenue,
    CcorpInvestment,
    /// `Y + p_t Y_pt`
    GdpCurrentPrice,
    /// `i + p_t i_pt`
    InvestmentCurrentPrice,
}

impl Measure {
    pub const ALL: [Measure; 7] = [
        Measure::Gdp,
        Measure::Investment,
        Measure::Payout,
        Measure::CorpRevenue,
        Measure::CcorpInvestment,
        Measure::GdpCurrentPrice,
        Measure::InvestmentCurrentPrice,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Gdp => "gdp",
            Measure::Investment => "investment",
            Measure::Payout => "payout",
            Measure::CorpRevenue => "corp_revenue",
            Measure::CcorpInvestment => "ccorp_investment",
            Measure::GdpCurrentPrice => "gdp_current_price",
            Measure::InvestmentCurrentPrice => "investment_current_price",
        }
    }

    /// Value in state `s`; `p0` is the pre-reform relative price.
    pub fn eval(self, s: &State, p0: f64) -> f64 {
        match self {
            Measure::Gdp => aggregates_at_price(s, p0).gdp,
            Measure::Investment => aggregates_at_price(s, p0).investment,
            Measure::Payout => s[Var::Div],
            Measure::CorpRevenue => s[Var::TaxCorp],
            Measure::CcorpInvestment => s[Var::I],
            Measure::GdpCurrentPrice => aggregates(s).gdp,
            Measure::InvestmentCurrentPrice => aggregates(s).investment,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSummary {
    pub measure: Measure,
    /// `sum(reform) / sum(baseline) - 1` over the cumulative window.
    pub long_run_change: f64,
    /// Cumulative change per unit of cumulative corporate revenue lost;
    /// `None` when the revenue change is negligible.
    pub multiplier: Option<f64>,
    /// Percent deviation from baseline in the reform period.
    pub impact: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReformResult {
    pub name: String,
    pub pre: SteadyState,
    pub post: SteadyState,
    /// No-reform path: the pre-reform steady state held constant.
    pub baseline: State,
    pub path: TransitionPath,
    pub cumulative_years: usize,
    pub summary: Vec<MeasureSummary>,
}

impl ReformResult {
    pub fn get(&self, m: Measure) -> &MeasureSummary {
        self.summary
            .iter()
            .find(|s| s.measure == m)
            .expect("every measure is summarised")
    }

    pub fn long_run_change(&self, m: Measure) -> f64 {
        self.get(m).long_run_change
    }

    pub fn multiplier(&self, m: Measure) -> Option<f64> {
        self.get(m).multiplier
    }

    /// Percent deviation of `v` from baseline in period `t`; `None` when the
    /// baseline value is zero.
    pub fn deviation(&self, v: Var, t: usize) -> Option<f64> {
        let b = self.baseline[v];
        (b != 0.0).then(|| self.path.states[t][v] / b - 1.0)
    }

    /// Percent deviation of a measure from baseline in period `t`.
    pub fn measure_deviation(&self, m: Measure, t: usize) -> f64 {
        let p0 = self.baseline[Var::P];
        m.eval(&self.path.states[t], p0) / m.eval(&self.baseline, p0) - 1.0
    }
}

fn summarise(baseline: &State, path: &TransitionPath, years: usize) -> Vec<MeasureSummary> {
    let p0 = baseline[Var::P];
    let window = &path.states[..years];
    let revenue_base = Measure::CorpRevenue.eval(baseline, p0) * years as f64;
    let revenue_reform: f64 = window.iter().map(|s| s[Var::TaxCorp]).sum();
    let revenue_lost = revenue_base - revenue_reform;
    let defined = revenue_lost.abs() > REVENUE_CHANGE_FLOOR * revenue_base.abs().max(1.0);
    Measure::ALL
        .iter()
        .map(|&m| {
            let base = m.eval(baseline, p0) * years as f64;
            let reform: f64 = window.iter().map(|s| m.eval(s, p0)).sum();
            MeasureSummary {
                measure: m,
                long_run_change: reform / base - 1.0,
                multiplier: defined.then(|| (reform - base) / revenue_lost),
                impact: m.eval(&window[0], p0) / m.eval(baseline, p0) - 1.0,
            }
        })
        .collect()
}

pub fn run_scenario(s: &Scenario) -> Result<ReformResult> {
    run(s).map_err(|e| e.in_scenario(&s.name))
}

fn run(s: &Scenario) -> Result<ReformResult> {
    s.validate()?;
    let pre = solve_steady_state(&s.pre, None)?;
    let post = solve_steady_state(&s.post(), Some(&pre.state))?;
    let problem = TransitionProblem::unanticipated(&pre, &post, s.new_investment_only, s.horizon)?;
    let opts = NewtonOptions::TRANSITION.with_tol(s.tol);
    let path = solve_transition_with(&problem, &opts)?;
    let baseline = pre.state;
    let summary = summarise(&baseline, &path, s.cumulative_years);
    Ok(ReformResult {
        name: s.name.clone(),
        pre,
        post,
        baseline,
        path,
        cumulative_years: s.cumulative_years,
        summary,
    })
}

/// The rate cut and the depreciation change run separately and together.
#[derive(Debug, Clone, PartialEq)]
pub struct ProvisionDecomposition {
    pub rate_only: ReformResult,
    pub depreciation_only: ReformResult,
    pub combined: ReformResult,
}

impl ProvisionDecomposition {
    /// `combined - (rate_only + depreciation_only)` in long-run changes.
    pub fn interaction(&self, m: Measure) -> f64 {
        self.combined.long_run_change(m)
            - self.rate_only.long_run_change(m)
            - self.depreciation_only.long_run_change(m)
    }
}

/// Rate-only variant of a reform: the post-reform rate with the old schedule.
pub fn rate_only(base: &Scenario) -> Scenario {
    Scenario {
        name: base.name.clone() + "-rate-only",
        post_policy: TaxPolicy {
            sched: base.pre.policy.sched,
            ..base.post_policy
        },
        ..base.clone()
    }
}

/// Depreciation-only variant of a reform: the new schedule at the old rate.
pub fn depreciation_only(base: &Scenario) -> Scenario {
    Scenario {
        name: base.name.clone() + "-bonus-only",
        post_policy: TaxPolicy {
            tau_corp: base.pre.policy.tau_corp,
            ..base.post_policy
        },
        ..base.clone()
    }
}

pub fn decompose_provisions(base: &Scenario) -> Result<ProvisionDecomposition> {
    if base.pre.policy.tau_corp == base.post_policy.tau_corp
        || base.pre.policy.sched == base.post_policy.sched
    {
        return Err(Error::Restriction(
            "provision decomposition needs a reform that changes both the rate and the schedule",
        )
        .in_scenario(&base.name));
    }
    Ok(ProvisionDecomposition {
        rate_only: run_scenario(&rate_only(base))?,
        depreciation_only: run_scenario(&depreciation_only(base))?,
        combined: run_scenario(base)?,
    })
}

/// How a rate cut of size `x` is applied to a pre-reform rate `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateCut {
    /// `tau - x`
    PercentagePoints,
    /// `tau * (1 - x)`
    Relative,
}

impl RateCut {
    pub fn apply(self, tau: f64, size: f64) -> f64 {
        match self {
            RateCut::PercentagePoints => tau - size,
            RateCut::Relative => tau * (1.0 - size),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RateCut::PercentagePoints => "percentage-points",
            RateCut::Relative => "relative",
        }
    }
}

/// Pre-reform economies compared by the factor decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    /// Old calibration: old rate, schedule and pass-through share.
    Old,
    /// New calibration.
    New,
    /// New calibration with the old depreciation schedule.
    Depreciation,
    /// New calibration with the old corporate rate.
    Rate,
    /// New calibration with the old pass-through share.
    PassThroughShare,
}

impl Factor {
    pub const ALL: [Factor; 5] = [
        Factor::Old,
        Factor::New,
        Factor::Depreciation,
        Factor::Rate,
        Factor::PassThroughShare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Factor::Old => "calibration-1961",
            Factor::New => "calibration-2017",
            Factor::Depreciation => "2017-with-1961-depreciation",
            Factor::Rate => "2017-with-1961-rate",
            Factor::PassThroughShare => "2017-with-1961-share",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorExperiment {
    /// Economy before the reform, 1961 calibration.
    pub old: ModelSpec,
    /// Economy before the reform, 2017 calibration.
    pub new: ModelSpec,
    pub cut: f64,
    pub mode: RateCut,
    pub cumulative_years: usize,
    pub horizon: usize,
    pub tol: f64,
}

impl FactorExperiment {
    pub fn standard(mode: RateCut) -> Self {
        FactorExperiment {
            old: calibration::extended_1961(),
            new: calibration::extended_2017(),
            cut: 0.10,
            mode,
            cumulative_years: DEFAULT_CUMULATIVE_YEARS,
            horizon: DEFAULT_HORIZON,
            tol: NewtonOptions::TRANSITION.tol,
        }
    }

    /// Pre-reform economy for one counterfactual.
    pub fn economy(&self, f: Factor) -> Result<ModelSpec> {
        let new = self.new;
        Ok(match f {
            Factor::Old => self.old,
            Factor::New => new,
            Factor::Depreciation => {
                new.with_policy(TaxPolicy { sched: self.old.policy.sched, ..new.policy })
            }
            Factor::Rate => new.with_policy(new.policy.with_tau_corp(self.old.policy.tau_corp)?),
            Factor::PassThroughShare => new.with_eta(share_weight(&self.old))?,
        })
    }

    pub fn scenario(&self, f: Factor) -> Result<Scenario> {
        let pre = self.economy(f)?;
        let tau = self.mode.apply(pre.policy.tau_corp, self.cut);
        Ok(Scenario {
            cumulative_years: self.cumulative_years,
            horizon: self.horizon,
            tol: self.tol,
            ..Scenario::new(f.name(), pre, pre.policy.with_tau_corp(tau)?)
        })
    }
}

fn share_weight(spec: &ModelSpec) -> f64 {
    match spec.aggregator {
        crate::model::Aggregator::Ces { eta, .. } => eta,
        crate::model::Aggregator::CobbDouglas { gamma } => gamma,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorDecomposition {
    pub mode: RateCut,
    pub results: Vec<(Factor, ReformResult)>,
}

impl FactorDecomposition {
    pub fn result(&self, f: Factor) -> &ReformResult {
        &self
            .results
            .iter()
            .find(|(g, _)| *g == f)
            .expect("every factor is run")
            .1
    }

    /// New-calibration response plus each factor's one-at-a-time contribution.
    pub fn one_at_a_time_sum(&self, m: Measure) -> f64 {
        let base = self.result(Factor::New).long_run_change(m);
        base + [Factor::Depreciation, Factor::Rate, Factor::PassThroughShare]
            .iter()
            .map(|&f| self.result(f).long_run_change(m) - base)
            .sum::<f64>()
    }

    /// Old-calibration response minus the one-at-a-time sum.
    pub fn interaction(&self, m: Measure) -> f64 {
        self.result(Factor::Old).long_run_change(m) - self.one_at_a_time_sum(m)
    }

    pub fn multiplier_sum(&self, m: Measure) -> Option<f64> {
        let base = self.result(Factor::New).multiplier(m)?;
        let mut total = base;
        for f in [Factor::Depreciation, Factor::Rate, Factor::PassThroughShare] {
            total += self.result(f).multiplier(m)? - base;
        }
        Some(total)
    }
}

pub fn decompose_factors(exp: &FactorExperiment) -> Result<FactorDecomposition> {
    let results = Factor::ALL
        .iter()
        .map(|&f| Ok((f, run_scenario(&exp.scenario(f)?)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FactorDecomposition {
        mode: exp.mode,
        results,
    })
}

/// Scenarios shipped with the library.
pub mod builtin {
    use super::Scenario;
    use crate::calibration::*;

    /// 2017 reform on the extended economy: rate 35% to 21%, depreciation
    /// 0.4823 to 0.8305 on new investment.
    pub fn tcja17() -> Scenario {
        Scenario::new("tcja17", extended_2017(), policy_tcja())
    }

    /// The same reform on the baseline two-sector economy.
    pub fn tcja17_baseline() -> Scenario {
        Scenario::new("tcja17-baseline", baseline_2017(), policy_tcja())
    }

    /// 1960s reform: rate 52% to 48%, depreciation 0.10 to 0.1857 on new
    /// investment, with the 1961 pass-through share.
    pub fn kennedy() -> Scenario {
        Scenario::new("kennedy", extended_1961(), policy_1965())
    }

    pub fn tcja17_rate_only() -> Scenario {
        Scenario {
            name: "tcja17-rate-only".into(),
            ..super::rate_only(&tcja17())
        }
    }

    pub fn tcja17_bonus_only() -> Scenario {
        Scenario {
            name: "tcja17-bonus-only".into(),
            ..super::depreciation_only(&tcja17())
        }
    }

    pub fn null() -> Scenario {
        Scenario::null("null", extended_2017())
    }
}

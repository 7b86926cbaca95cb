//! The two-sector economy: parameters, per-period equilibrium conditions and
//! diagnostics evaluated on solved states.

mod equations;
mod spec;
mod vars;

pub use equations::{
    residuals_period, steady_state_residuals, InitialStocks, Lagged, Residuals,
};
pub(crate) use equations::{implied_next, residuals, Lag, SS_PERIOD};
pub use spec::{Aggregator, LaborSupply, ModelSpec, Utilization, Variant, VintagePolicy};
pub use vars::{Layout, State, Var, ALL_VARS, NVARS};


use crate::error::{Error, Result};

pub(crate) fn marginal_utility_f64(spec: &ModelSpec, single: bool, c: f64, c_pt: f64) -> f64 {
    equations::marginal_utility(spec, single, c, c_pt)
}
use crate::taxcode::steady_state_lambda;

/// Economy-wide aggregates in units of the c-corporate good.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregates {
    /// `Y + p Y_pt`
    pub gdp: f64,
    /// `i + p i_pt`
    pub investment: f64,
    /// c-corporate dividends
    pub payout: f64,
    /// corporate tax revenue
    pub corp_revenue: f64,
}

/// Aggregates valued at the period's own relative price.
pub fn aggregates(s: &State) -> Aggregates {
    aggregates_at_price(s, s[Var::P])
}

/// Aggregates valued at a fixed relative price (constant-price accounting).
pub fn aggregates_at_price(s: &State, p: f64) -> Aggregates {
    Aggregates {
        gdp: s[Var::Y] + p * s[Var::YPt],
        investment: s[Var::I] + p * s[Var::IPt],
        payout: s[Var::Div],
        corp_revenue: s[Var::TaxCorp],
    }
}

/// Household budget constraint residual. It is implied by the other
/// conditions, so it is not part of the solved system.
pub fn budget_residual(spec: &ModelSpec, s: &State) -> f64 {
    let income = s[Var::W] * s[Var::L] + s[Var::WPt] * s[Var::LPt] + s[Var::Div] + s[Var::DivPt];
    s[Var::C] + s[Var::P] * s[Var::CPt] - (1.0 - spec.policy.tau_indiv) * income - s[Var::Transfer]
}

/// `TB - (MPK k - ID)`: the corporate tax base read as a tax on capital
/// income net of deductions, valid when the wage equals the marginal product.
pub fn capital_tax_gap(spec: &ModelSpec, s: &State) -> f64 {
    let mpk_k = spec.alpha_c * s[Var::Y];
    s[Var::TaxBase] - (mpk_k - s[Var::Deduction])
}

/// Recomputes the schedule PDV along a solved path by direct discounted
/// summation (with the steady-state tail added in closed form) and returns
/// the largest deviation from one of the c-corp Euler equation written with
/// the corporate tax wedge.
pub fn euler_wedge_check(
    spec: &ModelSpec,
    vintage: &VintagePolicy,
    path: &[State],
    terminal: &State,
) -> Result<f64> {
    let Some(last) = path.last() else {
        return Err(Error::HorizonTooShort {
            variable: "path",
            gap: f64::INFINITY,
        });
    };
    for v in [Var::Mu, Var::K, Var::Y, Var::U] {
        let gap = ((last[v] - terminal[v]) / terminal[v]).abs();
        if gap > 1e-6 {
            return Err(Error::HorizonTooShort {
                variable: v.name(),
                gap,
            });
        }
    }
    let n = path.len();
    let beta = spec.beta;
    let tau = spec.policy.tau_corp;
    let mu = |j: usize| if j < n { path[j][Var::Mu] } else { terminal[Var::Mu] };
    let state = |j: usize| if j < n { &path[j] } else { terminal };

    let lambda = |t: usize| -> Result<f64> {
        let sched = if vintage.after_reform(t) {
            vintage.sched_after
        } else {
            vintage.sched_before
        };
        let d = sched.rate();
        let mut sum = 0.0;
        let mut disc = 1.0;
        let mut rem = 1.0;
        for j in t..n {
            sum += disc * mu(j) / mu(t) * rem * d;
            disc *= beta;
            rem *= 1.0 - d;
        }
        let tail = disc * mu(n) / mu(t) * rem * steady_state_lambda(d, beta)?;
        Ok(sum + tail)
    };

    let mut worst = 0.0f64;
    for t in 0..n {
        let lam_t = lambda(t)?;
        let lam_n = lambda(t + 1)?;
        let nx = state(t + 1);
        let sdf = beta * mu(t + 1) / mu(t);
        let mpk = spec.alpha_c * nx[Var::Y] / nx[Var::K];
        let dep = equations::depreciation(spec, nx[Var::U]);
        let carry = (1.0 - lam_n * tau) / (1.0 - lam_t * tau);
        let wedge = (1.0 - tau) / (1.0 - lam_t * tau);
        let dev = (1.0 - sdf * (carry * (1.0 - dep) + wedge * mpk)).abs();
        worst = worst.max(dev);
    }
    Ok(worst)
}

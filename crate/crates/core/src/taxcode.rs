//! Closed-form tax depreciation math: schedule present values, the inverse
//! mapping back to a declining-balance rate, bonus depreciation, and the
//! steady-state corporate tax wedge and output distortion.

use alloc::vec::Vec;
// Float methods without std; unused when the test harness links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("beta", beta, "0 < beta < 1"))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid("alpha", alpha, "0 < alpha < 1"))
    }
}

fn check_tau(name: &'static str, tau: f64) -> Result<()> {
    if (0.0..1.0).contains(&tau) {
        Ok(())
    } else {
        Err(Error::invalid(name, tau, "0 <= rate < 1"))
    }
}

/// Net rate of time preference `(1 - beta) / beta`.
pub fn time_preference(beta: f64) -> f64 {
    (1.0 - beta) / beta
}

/// Declining-balance tax depreciation: a constant fraction of the
/// undeducted stock is deducted each period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepreciationSchedule {
    rate_dbal: f64,
}

impl DepreciationSchedule {
    pub fn new(rate_dbal: f64) -> Result<Self> {
        if rate_dbal > 0.0 && rate_dbal <= 1.0 {
            Ok(DepreciationSchedule { rate_dbal })
        } else {
            Err(Error::invalid("rate_dbal", rate_dbal, "0 < rate_dbal <= 1"))
        }
    }

    pub fn full_expensing() -> Self {
        DepreciationSchedule { rate_dbal: 1.0 }
    }

    pub fn rate(&self) -> f64 {
        self.rate_dbal
    }

    /// Share of an investment deducted `lag` periods after it is made.
    pub fn weight(&self, lag: u32) -> f64 {
        self.rate_dbal * (1.0 - self.rate_dbal).powi(lag as i32)
    }

    pub fn pdv(&self, beta: f64) -> Result<f64> {
        pdv_of_schedule(self.rate_dbal, beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaxPolicy {
    /// Statutory corporate rate.
    pub tau_corp: f64,
    pub sched: DepreciationSchedule,
    /// Uniform individual income tax rate on wages, dividends and pass-through income.
    pub tau_indiv: f64,
    /// Share of revenue spent wastefully; the rest is rebated.
    pub theta_waste: f64,
}

impl TaxPolicy {
    pub fn new(tau_corp: f64, rate_dbal: f64, tau_indiv: f64, theta_waste: f64) -> Result<Self> {
        check_tau("tau_corp", tau_corp)?;
        check_tau("tau_indiv", tau_indiv)?;
        if !(0.0..=1.0).contains(&theta_waste) {
            return Err(Error::invalid("theta_waste", theta_waste, "0 <= theta <= 1"));
        }
        Ok(TaxPolicy {
            tau_corp,
            sched: DepreciationSchedule::new(rate_dbal)?,
            tau_indiv,
            theta_waste,
        })
    }

    pub fn with_tau_corp(mut self, tau_corp: f64) -> Result<Self> {
        check_tau("tau_corp", tau_corp)?;
        self.tau_corp = tau_corp;
        Ok(self)
    }

    pub fn with_rate_dbal(mut self, rate_dbal: f64) -> Result<Self> {
        self.sched = DepreciationSchedule::new(rate_dbal)?;
        Ok(self)
    }

    pub fn wedge_report(&self, beta: f64, alpha: f64) -> Result<WedgeReport> {
        wedge_report(self.tau_corp, self.sched.rate(), beta, alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeReport {
    pub lambda_ss: f64,
    pub wedge: f64,
    pub distortion: f64,
}

/// Steady-state PDV of a declining-balance schedule, `d / (1 - beta (1 - d))`.
pub fn pdv_of_schedule(rate_dbal: f64, beta: f64) -> Result<f64> {
    DepreciationSchedule::new(rate_dbal)?;
    check_beta(beta)?;
    Ok(rate_dbal / (1.0 - beta * (1.0 - rate_dbal)))
}

/// Declining-balance rate whose steady-state PDV equals `pdv`.
pub fn rate_from_pdv(pdv: f64, beta: f64) -> Result<f64> {
    if !(pdv > 0.0 && pdv <= 1.0) {
        return Err(Error::invalid("pdv", pdv, "0 < pdv <= 1"));
    }
    check_beta(beta)?;
    let rho = time_preference(beta);
    Ok((rho * pdv / (1.0 + rho - pdv)).min(1.0))
}

/// PDV after deducting `bonus_fraction` of new investment immediately and
/// the remainder on a schedule worth `base_pdv`.
pub fn apply_bonus(bonus_fraction: f64, base_pdv: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&bonus_fraction) {
        return Err(Error::invalid("bonus_fraction", bonus_fraction, "0 <= bonus <= 1"));
    }
    if !(0.0..=1.0).contains(&base_pdv) {
        return Err(Error::invalid("base_pdv", base_pdv, "0 <= pdv <= 1"));
    }
    Ok(bonus_fraction + (1.0 - bonus_fraction) * base_pdv)
}

/// `lambda_ss = d (1 + rho) / (rho + d)`; zero when nothing is ever deductible.
pub fn steady_state_lambda(rate_dbal: f64, beta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rate_dbal) {
        return Err(Error::invalid("rate_dbal", rate_dbal, "0 <= rate_dbal <= 1"));
    }
    check_beta(beta)?;
    let rho = time_preference(beta);
    Ok(rate_dbal * (1.0 + rho) / (rho + rate_dbal))
}

/// Corporate tax wedge `(1 - tau) / (1 - lambda tau)`.
pub fn wedge(tau_corp: f64, lambda: f64) -> f64 {
    (1.0 - tau_corp) / (1.0 - lambda * tau_corp)
}

/// Long-run output loss `1 - wedge^(alpha / (1 - alpha))`.
pub fn distortion(wedge: f64, alpha: f64) -> f64 {
    1.0 - wedge.powf(alpha / (1.0 - alpha))
}

/// Steady-state wedge report. Accepts `rate_dbal = 0` (no deductions),
/// which the dynamic model does not.
pub fn wedge_report(tau_corp: f64, rate_dbal: f64, beta: f64, alpha: f64) -> Result<WedgeReport> {
    check_tau("tau_corp", tau_corp)?;
    check_alpha(alpha)?;
    let lambda_ss = steady_state_lambda(rate_dbal, beta)?;
    let w = wedge(tau_corp, lambda_ss);
    Ok(WedgeReport {
        lambda_ss,
        wedge: w,
        distortion: distortion(w, alpha),
    })
}

/// Evenly spaced axis, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        Axis { lo, hi, points }
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points).map(move |k| {
            if k + 1 == self.points {
                self.hi
            } else {
                self.lo + step * k as f64
            }
        })
    }

    fn validate(&self, name: &'static str, max: f64, inclusive: bool) -> Result<()> {
        if self.points < 2 {
            return Err(Error::invalid(name, self.points as f64, "at least 2 grid points"));
        }
        let hi_ok = if inclusive { self.hi <= max } else { self.hi < max };
        if !(self.lo >= 0.0 && self.lo < self.hi && hi_ok) {
            return Err(Error::invalid(name, self.hi, "0 <= lo < hi within the unit interval"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub tau: f64,
    pub lambda: f64,
    pub distortion: f64,
}

/// Iso-distortion map over (corporate rate, schedule PDV); tau varies slowest.
pub fn distortion_grid(tau: Axis, lambda: Axis, alpha: f64) -> Result<Vec<GridPoint>> {
    tau.validate("tau_range", 1.0, false)?;
    lambda.validate("lambda_range", 1.0, true)?;
    check_alpha(alpha)?;
    let mut out = Vec::with_capacity(tau.points * lambda.points);
    for t in tau.values() {
        for l in lambda.values() {
            out.push(GridPoint {
                tau: t,
                lambda: l,
                distortion: distortion(wedge(t, l), alpha),
            });
        }
    }
    Ok(out)
}

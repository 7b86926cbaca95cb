use crate::error::{Error, Result};
use crate::taxcode::{DepreciationSchedule, TaxPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Cobb-Douglas bundle, fixed sectoral labor, full utilization.
    Baseline,
    /// Anything with a CES bundle, elastic labor or variable utilization.
    Extended,
}

/// Consumption bundle over the c-corporate and pass-through goods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Aggregator {
    CobbDouglas { gamma: f64 },
    /// `(eta c^eps + (1-eta) c_pt^eps)^(1/eps)`.
    Ces { eta: f64, epsilon: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LaborSupply {
    /// Inelastic supply of one unit, `ccorp` of it to c-corporations.
    Fixed { ccorp: f64 },
    /// Disutility `L^(1+phi) / (1+phi)` over total hours, single wage.
    Elastic { phi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Utilization {
    Pinned,
    /// `delta(u) = delta0 + delta1 (u-1) + delta2/2 (u-1)^2`, with `delta0`
    /// the c-corp depreciation rate and `delta1` implied by `beta`.
    Variable { delta2: f64 },
}

/// Structural parameters of one economy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub beta: f64,
    /// Utility curvature; 1 is log utility.
    pub sigma: f64,
    pub alpha_c: f64,
    pub alpha_p: f64,
    pub delta_c: f64,
    pub delta_p: f64,
    pub aggregator: Aggregator,
    pub labor: LaborSupply,
    pub utilization: Utilization,
    pub policy: TaxPolicy,
}

fn open_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, v, "a value in (0, 1)"))
    }
}

impl ModelSpec {
    pub fn variant(&self) -> Variant {
        match (self.aggregator, self.labor, self.utilization) {
            (Aggregator::CobbDouglas { .. }, LaborSupply::Fixed { .. }, Utilization::Pinned) => {
                Variant::Baseline
            }
            _ => Variant::Extended,
        }
    }

    /// Linear utilization-cost coefficient that makes `u = 1` optimal in any steady state.
    pub fn delta1(&self) -> f64 {
        1.0 / self.beta - (1.0 - self.delta_c)
    }

    /// Pass-through block absent: Cobb-Douglas weight one and all labor in c-corporations.
    pub fn single_sector(&self) -> bool {
        matches!(self.aggregator, Aggregator::CobbDouglas { gamma } if gamma == 1.0)
            && matches!(self.labor, LaborSupply::Fixed { ccorp } if ccorp == 1.0)
    }

    pub fn rho(&self) -> f64 {
        crate::taxcode::time_preference(self.beta)
    }

    pub fn with_policy(mut self, policy: TaxPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        match &mut self.aggregator {
            Aggregator::Ces { eta: e, .. } => *e = eta,
            Aggregator::CobbDouglas { gamma } => *gamma = eta,
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        open_unit("beta", self.beta)?;
        if !(self.sigma > 0.0) {
            return Err(Error::invalid("sigma", self.sigma, "sigma > 0"));
        }
        open_unit("alpha_c", self.alpha_c)?;
        open_unit("alpha_p", self.alpha_p)?;
        if !(self.delta_c > 0.0 && self.delta_c <= 1.0) {
            return Err(Error::invalid("delta_c", self.delta_c, "0 < delta <= 1"));
        }
        if !(self.delta_p > 0.0 && self.delta_p <= 1.0) {
            return Err(Error::invalid("delta_p", self.delta_p, "0 < delta <= 1"));
        }
        let single = self.single_sector();
        match self.aggregator {
            Aggregator::CobbDouglas { gamma } => {
                if !(gamma > 0.0 && (gamma < 1.0 || single)) {
                    return Err(Error::invalid("gamma", gamma, "0 < gamma < 1 (or 1 with l = 1)"));
                }
            }
            Aggregator::Ces { eta, epsilon } => {
                open_unit("eta", eta)?;
                if !(epsilon < 1.0) || epsilon == 0.0 {
                    return Err(Error::invalid(
                        "epsilon",
                        epsilon,
                        "epsilon < 1 and != 0 (use the Cobb-Douglas bundle for the limit)",
                    ));
                }
            }
        }
        match self.labor {
            LaborSupply::Fixed { ccorp } => {
                if !(ccorp > 0.0 && (ccorp < 1.0 || single)) {
                    return Err(Error::invalid("labor_c_fixed", ccorp, "0 < l < 1 (or 1 with gamma = 1)"));
                }
            }
            LaborSupply::Elastic { phi } => {
                if !(phi > 0.0) {
                    return Err(Error::invalid("phi", phi, "phi > 0"));
                }
            }
        }
        if let Utilization::Variable { delta2 } = self.utilization {
            if !(delta2 > 0.0) {
                return Err(Error::invalid("delta2", delta2, "delta2 > 0"));
            }
        }
        // re-run the policy checks in case fields were edited directly
        TaxPolicy::new(
            self.policy.tau_corp,
            self.policy.sched.rate(),
            self.policy.tau_indiv,
            self.policy.theta_waste,
        )?;
        Ok(())
    }
}

/// Which tax depreciation schedule applies to which investment: investment
/// made from `reform_period` on is deducted on `sched_after`, older
/// undeducted investment keeps `sched_before`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VintagePolicy {
    pub sched_before: DepreciationSchedule,
    pub sched_after: DepreciationSchedule,
    pub reform_period: usize,
}

impl VintagePolicy {
    /// One schedule throughout; all stocks live in the post-reform slot.
    pub fn steady(sched: DepreciationSchedule) -> Self {
        VintagePolicy {
            sched_before: sched,
            sched_after: sched,
            reform_period: 0,
        }
    }

    pub fn new_investment_only(before: DepreciationSchedule, after: DepreciationSchedule) -> Self {
        VintagePolicy {
            sched_before: before,
            sched_after: after,
            reform_period: 0,
        }
    }

    /// `D^A_t`.
    pub fn after_reform(&self, t: usize) -> bool {
        t >= self.reform_period
    }

    pub(crate) fn after_reform_prev(&self, t: usize) -> bool {
        t >= 1 && self.after_reform(t - 1)
    }
}

//! Calibrated parameter sets for the 2017 and 1961 economies and the
//! depreciation-schedule inputs behind them.

use crate::model::{Aggregator, LaborSupply, ModelSpec, Utilization};
use crate::taxcode::{DepreciationSchedule, TaxPolicy};

pub const BETA: f64 = 0.94;
pub const SIGMA: f64 = 1.0;
pub const DELTA: f64 = 0.10;
pub const ALPHA: f64 = 0.35;
/// C-corporate share of wages and of business receipts (baseline model).
pub const CCORP_SHARE_2017: f64 = 0.575;
pub const TAU_INDIV: f64 = 0.135;

pub const PHI: f64 = 4.0;
pub const EPSILON_CES: f64 = 0.33;
pub const DELTA2: f64 = 0.10;
pub const ETA_2017: f64 = 0.55;
pub const ETA_1961: f64 = 0.70;

pub const TAU_2017: f64 = 0.35;
pub const TAU_TCJA: f64 = 0.21;
pub const TAU_1961: f64 = 0.52;
pub const TAU_1965: f64 = 0.48;

/// Investment-weighted PDV of the regular (MACRS) schedules, 2017.
pub const MACRS_PDV_2017: f64 = 0.879;
pub const BONUS_2017: f64 = 0.50;
/// Bonus after the reform, below 100% to reflect asset eligibility limits.
pub const BONUS_TCJA: f64 = 0.90;
/// Equipment schedule PDV in 1960 (close to economic depreciation).
pub const PDV_1960: f64 = 0.647;
pub const PDV_1965: f64 = 0.726;
/// Investment tax credit added on top of the 1965 schedule PDV.
pub const ITC_1965: f64 = 0.0657;

pub const RATE_DBAL_2017: f64 = 0.4823;
pub const RATE_DBAL_TCJA: f64 = 0.8305;
pub const RATE_DBAL_1961: f64 = 0.10;
pub const RATE_DBAL_1965: f64 = 0.1857;

pub const CCORP_RECEIPTS_2017: f64 = 0.60;
pub const CCORP_RECEIPTS_1961: f64 = 0.75;

fn policy(tau: f64, rate_dbal: f64) -> TaxPolicy {
    TaxPolicy {
        tau_corp: tau,
        sched: DepreciationSchedule::new(rate_dbal).expect("calibrated rate in (0, 1]"),
        tau_indiv: TAU_INDIV,
        theta_waste: 0.0,
    }
}

pub fn policy_2017() -> TaxPolicy {
    policy(TAU_2017, RATE_DBAL_2017)
}

pub fn policy_tcja() -> TaxPolicy {
    policy(TAU_TCJA, RATE_DBAL_TCJA)
}

/// Individual income tax is held at its 2017 value.
pub fn policy_1961() -> TaxPolicy {
    policy(TAU_1961, RATE_DBAL_1961)
}

pub fn policy_1965() -> TaxPolicy {
    policy(TAU_1965, RATE_DBAL_1965)
}

/// Baseline economy before the 2017 reform.
pub fn baseline_2017() -> ModelSpec {
    ModelSpec {
        beta: BETA,
        sigma: SIGMA,
        alpha_c: ALPHA,
        alpha_p: ALPHA,
        delta_c: DELTA,
        delta_p: DELTA,
        aggregator: Aggregator::CobbDouglas {
            gamma: CCORP_SHARE_2017,
        },
        labor: LaborSupply::Fixed {
            ccorp: CCORP_SHARE_2017,
        },
        utilization: Utilization::Pinned,
        policy: policy_2017(),
    }
}

/// Elastic labor, CES bundle and variable utilization, 2017 tax code.
pub fn extended_2017() -> ModelSpec {
    ModelSpec {
        aggregator: Aggregator::Ces {
            eta: ETA_2017,
            epsilon: EPSILON_CES,
        },
        labor: LaborSupply::Elastic { phi: PHI },
        utilization: Utilization::Variable { delta2: DELTA2 },
        ..baseline_2017()
    }
}

/// The 2017 extended economy with the 1961 tax code and pass-through share.
pub fn extended_1961() -> ModelSpec {
    ModelSpec {
        aggregator: Aggregator::Ces {
            eta: ETA_1961,
            epsilon: EPSILON_CES,
        },
        policy: policy_1961(),
        ..extended_2017()
    }
}

/// Single-sector restriction used for the closed-form results.
pub fn single_sector(tau_corp: f64, rate_dbal: f64) -> ModelSpec {
    ModelSpec {
        aggregator: Aggregator::CobbDouglas { gamma: 1.0 },
        labor: LaborSupply::Fixed { ccorp: 1.0 },
        policy: TaxPolicy {
            tau_indiv: 0.0,
            ..policy(tau_corp, rate_dbal)
        },
        ..baseline_2017()
    }
}

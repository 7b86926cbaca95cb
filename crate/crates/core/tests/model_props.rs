//! Identities of the per-period system: Walras' law, the capital-tax
//! reading of the corporate base, vintage collapse and nesting limits.

use corptax_core::calibration::*;
use corptax_core::model::*;
use corptax_core::steady::*;
use proptest::prelude::*;

fn solved() -> Vec<SteadyState> {
    [baseline_2017(), extended_2017(), extended_1961(), extended_2017().with_policy(policy_tcja())]
        .iter()
        .map(|s| solve_steady_state(s, None).unwrap())
        .collect()
}

#[test]
fn household_budget_holds_at_solved_states() {
    for ss in solved() {
        let r = budget_residual(&ss.spec, &ss.state);
        assert!(r.abs() < 1e-9, "budget residual {r:e}");
    }
}

#[test]
fn corporate_base_equals_capital_income_less_deductions() {
    for ss in solved() {
        let gap = capital_tax_gap(&ss.spec, &ss.state);
        assert!(gap.abs() < 1e-10, "gap {gap:e}");
    }
}

#[test]
fn payout_plus_tax_is_profit() {
    for ss in solved() {
        let s = &ss.state;
        assert!((s[Var::Div] + s[Var::TaxCorp] - s[Var::Profit]).abs() < 1e-12);
    }
}

#[test]
fn investment_replaces_depreciation_in_steady_state() {
    for ss in solved() {
        let s = &ss.state;
        let spec = &ss.spec;
        assert!((s[Var::I] - spec.delta_c * s[Var::K]).abs() < 1e-9);
        assert!((s[Var::IPt] - spec.delta_p * s[Var::KPt]).abs() < 1e-9);
        assert!((s[Var::KpiA] - (1.0 - spec.policy.sched.rate()) * (s[Var::I] + s[Var::KpiA])).abs() < 1e-9);
    }
}

#[test]
fn steady_residuals_vanish() {
    for ss in solved() {
        let r = steady_state_residuals(&ss.spec, &ss.state).unwrap();
        assert!(r.max_abs() < 1e-10, "{:?}", r.worst());
    }
}

#[test]
fn ces_limit_matches_cobb_douglas_branch() {
    let cd = ModelSpec {
        aggregator: Aggregator::CobbDouglas { gamma: 0.575 },
        ..extended_2017()
    };
    let ces = ModelSpec {
        aggregator: Aggregator::Ces { eta: 0.575, epsilon: 1e-8 },
        ..extended_2017()
    };
    let a = solve_steady_state(&cd, None).unwrap();
    let b = solve_steady_state(&ces, Some(&a.state)).unwrap();
    for v in ALL_VARS {
        let scale = a.state[v].abs().max(1.0);
        assert!((a.state[v] - b.state[v]).abs() / scale < 1e-6, "{}", v.name());
    }
}

#[test]
fn extended_with_fixed_margins_is_baseline() {
    let base = solve_steady_state(&baseline_2017(), None).unwrap();
    let nested = ModelSpec {
        utilization: Utilization::Variable { delta2: 1e6 },
        ..baseline_2017()
    };
    let ext = solve_steady_state(&nested, None).unwrap();
    for v in ALL_VARS {
        let scale = base.state[v].abs().max(1.0);
        assert!((base.state[v] - ext.state[v]).abs() / scale < 1e-6, "{}", v.name());
    }
}

fn perturbed(base: &State, noise: &[f64]) -> State {
    let mut s = *base;
    for (v, e) in ALL_VARS.iter().zip(noise) {
        s[*v] *= 1.0 + e;
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// With one schedule for both vintages, splitting the undeducted stock
    /// changes nothing but the bookkeeping.
    #[test]
    fn vintage_split_collapses_to_single_stock(
        noise in prop::collection::vec(-0.05f64..0.05, NVARS * 3),
        share in 0.0f64..1.0,
    ) {
        let ss = solve_steady_state(&extended_2017(), None).unwrap();
        let spec = ss.spec;
        let sched = spec.policy.sched;
        let split = VintagePolicy::new_investment_only(sched, sched);
        let single = VintagePolicy::steady(sched);
        let mk = |k: usize| perturbed(&ss.state, &noise[k * NVARS..(k + 1) * NVARS]);
        let (prev, now, next) = (mk(0), mk(1), mk(2));
        let divide = |s: &State| {
            let mut d = *s;
            let total = s.kpi();
            d[Var::KpiB] = share * total;
            d[Var::KpiA] = (1.0 - share) * total;
            d
        };
        let lump = |s: &State| {
            let mut d = *s;
            d[Var::KpiA] = s.kpi();
            d[Var::KpiB] = 0.0;
            d
        };
        let t = 3;
        let a = residuals_period(&spec, &split, t, Lagged::State(&divide(&prev)), &divide(&now), &divide(&next)).unwrap();
        let b = residuals_period(&spec, &single, t, Lagged::State(&lump(&prev)), &lump(&now), &lump(&next)).unwrap();
        for v in ALL_VARS {
            if v == Var::KpiA || v == Var::KpiB {
                continue;
            }
            prop_assert!((a.get(v) - b.get(v)).abs() < 1e-12, "{}", v.name());
        }
        let sum_a = a.get(Var::KpiA) + a.get(Var::KpiB);
        let sum_b = b.get(Var::KpiA) + b.get(Var::KpiB);
        prop_assert!((sum_a - sum_b).abs() < 1e-12);
    }

    /// Untaxed single-sector economy: the capital condition reads
    /// `1 = beta (1 - delta + MPK)` scaled by marginal utility.
    #[test]
    fn untaxed_single_sector_euler(noise in prop::collection::vec(-0.1f64..0.1, NVARS)) {
        let spec = single_sector(0.0, 0.5);
        let ss = solve_steady_state(&spec, None).unwrap();
        let s = perturbed(&ss.state, &noise);
        let vintage = VintagePolicy::steady(spec.policy.sched);
        let r = residuals_period(&spec, &vintage, 1, Lagged::State(&s), &s, &s).unwrap();
        let mpk = spec.alpha_c * s[Var::Y] / s[Var::K];
        let expected = s[Var::Mu] * (1.0 - spec.beta * (1.0 - spec.delta_c + mpk));
        prop_assert!((r.get(Var::Mu) - expected).abs() < 1e-12);
    }
}

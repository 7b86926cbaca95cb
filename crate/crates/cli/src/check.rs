//! Invariant suite run by the `check` verb. Each check is quick; the full
//! property and acceptance suites live in the test targets.

use corptax_core::calibration::{self, BETA};
use corptax_core::model::{budget_residual, capital_tax_gap, steady_state_residuals, Var};
use corptax_core::scenarios::{builtin, run_scenario, Measure, Scenario};
use corptax_core::steady::{analytic_steady_state, solve_steady_state};
use corptax_core::taxcode::{pdv_of_schedule, rate_from_pdv};
use corptax_core::transition::{stacked_jacobian, stacked_residual, TransitionProblem};

pub struct Outcome {
    pub name: &'static str,
    /// `Ok(detail)` or `Err(reason)`.
    pub result: Result<String, String>,
}

type Check = fn() -> Result<String, String>;

const CHECKS: &[(&str, Check)] = &[
    ("schedule round trip", schedule_round_trip),
    ("closed-form steady state", closed_form_steady_state),
    ("steady-state identities", steady_identities),
    ("transition jacobian", transition_jacobian),
    ("null reform is flat", null_reform),
];

pub fn run_all() -> Vec<Outcome> {
    CHECKS
        .iter()
        .map(|&(name, f)| Outcome { name, result: f() })
        .collect()
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn bound(what: &str, value: f64, tol: f64) -> Result<String, String> {
    if value <= tol {
        Ok(format!("{what} {value:.2e} <= {tol:.0e}"))
    } else {
        Err(format!("{what} {value:.3e} exceeds {tol:.0e}"))
    }
}

fn schedule_round_trip() -> Result<String, String> {
    let mut worst = 0.0f64;
    for k in 1..=100 {
        let rate = k as f64 / 100.0;
        let back = rate_from_pdv(pdv_of_schedule(rate, BETA).map_err(err)?, BETA).map_err(err)?;
        worst = worst.max((back - rate).abs());
    }
    bound("largest round-trip error", worst, 1e-12)
}

fn closed_form_steady_state() -> Result<String, String> {
    let spec = calibration::single_sector(0.35, 0.4823);
    let exact = analytic_steady_state(&spec).map_err(err)?;
    let ss = solve_steady_state(&spec, None).map_err(err)?;
    let gap = [(ss.state[Var::Y], exact.y), (ss.state[Var::K], exact.k), (ss.state[Var::TaxCorp], exact.tax_corp)]
        .iter()
        .map(|(a, b)| ((a - b) / b).abs())
        .fold(0.0, f64::max);
    bound("relative gap to closed form", gap, 1e-8)
}

fn steady_identities() -> Result<String, String> {
    let mut worst = 0.0f64;
    for spec in [calibration::extended_2017(), calibration::extended_1961(), calibration::baseline_2017()] {
        let ss = solve_steady_state(&spec, None).map_err(err)?;
        let res = steady_state_residuals(&spec, &ss.state).map_err(err)?;
        worst = worst
            .max(res.max_abs())
            .max(budget_residual(&spec, &ss.state).abs())
            .max(capital_tax_gap(&spec, &ss.state).abs());
    }
    bound("largest residual, budget or tax-base gap", worst, 1e-8)
}

fn transition_jacobian() -> Result<String, String> {
    let s = builtin::tcja17();
    let pre = solve_steady_state(&s.pre, None).map_err(err)?;
    let post = solve_steady_state(&s.post(), Some(&pre.state)).map_err(err)?;
    let problem = TransitionProblem::unanticipated(&pre, &post, true, 4).map_err(err)?;
    let x = problem.initial_guess();
    let jac = stacked_jacobian(&problem, &x);
    let n = x.len();
    let mut worst = 0.0f64;
    for j in 0..n {
        let h = 1e-6 * x[j].abs().max(1e-3);
        let (mut up, mut dn) = (x.clone(), x.clone());
        up[j] += h;
        dn[j] -= h;
        let (ru, rd) = (stacked_residual(&problem, &up), stacked_residual(&problem, &dn));
        for i in 0..n {
            let fd = (ru[i] - rd[i]) / (2.0 * h);
            let exact = jac.entry(i, j);
            worst = worst.max((fd - exact).abs() / exact.abs().max(1.0));
        }
    }
    bound("largest scaled finite-difference gap", worst, 1e-5)
}

fn null_reform() -> Result<String, String> {
    let r = run_scenario(&Scenario {
        horizon: 40,
        ..builtin::null()
    })
    .map_err(err)?;
    let worst = Measure::ALL
        .iter()
        .map(|&m| r.long_run_change(m).abs())
        .fold(0.0, f64::max);
    bound("largest long-run change", worst, 1e-10)
}

//! Steady states: the closed form for the single-sector restriction and a
//! damped Newton solver for the full two-sector economy.

use alloc::vec;
use alloc::vec::Vec;
// Float methods without std; unused when the test harness links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::Lu;
use crate::model::{
    aggregates, Aggregator, LaborSupply, Layout, ModelSpec, State, Var, VintagePolicy, SS_PERIOD,
};
use crate::newton::{NewtonOptions, SolveStats};
use crate::system::{max_abs, LagRef, Lead, PeriodSystem};
use crate::taxcode::{self, WedgeReport};

/// Closed-form steady state of the single-sector restriction, with the
/// undistorted (no corporate tax) counterpart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticSS {
    pub y: f64,
    pub y_star: f64,
    pub k: f64,
    pub k_star: f64,
    pub wedge: f64,
    pub lambda_ss: f64,
    pub profit_star: f64,
    /// Equals profits in a steady state, since all investment is eventually deducted.
    pub tax_base: f64,
    pub tax_corp: f64,
    pub div: f64,
    pub distortion: f64,
}

/// Output, capital, corporate revenue and payouts of the single-sector
/// restriction (`gamma = l = 1`, no individual income tax) in closed form.
pub fn analytic_steady_state(spec: &ModelSpec) -> Result<AnalyticSS> {
    spec.validate()?;
    if !spec.single_sector() {
        return Err(Error::Restriction("analytic steady state needs gamma = l = 1"));
    }
    if spec.policy.tau_indiv != 0.0 {
        return Err(Error::Restriction("analytic steady state needs tau_indiv = 0"));
    }
    let alpha = spec.alpha_c;
    let delta = spec.delta_c;
    let rho = spec.rho();
    let tau = spec.policy.tau_corp;
    let report = spec.policy.wedge_report(spec.beta, alpha)?;
    let omega = report.wedge;
    let scale = omega.powf(alpha / (1.0 - alpha));

    let y_star = (alpha / (rho + delta)).powf(alpha / (1.0 - alpha));
    let k_star = alpha * y_star / (rho + delta);
    let y = y_star * scale;
    let k = alpha * omega * y / (rho + delta);
    let profit_star = alpha * y_star * rho / (rho + delta);
    let bracket = scale * (1.0 + delta / rho * (1.0 - omega));
    Ok(AnalyticSS {
        y,
        y_star,
        k,
        k_star,
        wedge: omega,
        lambda_ss: report.lambda_ss,
        profit_star,
        tax_base: profit_star * bracket,
        tax_corp: profit_star * tau * bracket,
        div: profit_star * (1.0 - tau) * bracket,
        distortion: 1.0 - y / y_star,
    })
}

/// Ratios to GDP (`Y + p Y_pt`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub profit: f64,
    pub div: f64,
    pub tax_corp: f64,
    pub tax_indiv: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub spec: ModelSpec,
    pub state: State,
    pub wedge: WedgeReport,
    pub moments: Moments,
    pub stats: SolveStats,
}

impl SteadyState {
    /// Share of total receipts produced by c-corporations, `Y / (Y + p Y_pt)`.
    pub fn ccorp_share(&self) -> f64 {
        self.state[Var::Y] / aggregates(&self.state).gdp
    }
}

struct SectorSS {
    k_per_l: f64,
    y_per_l: f64,
    i_per_l: f64,
}

fn sector(alpha: f64, delta: f64, rho: f64, wedge: f64) -> SectorSS {
    let k_per_l = (alpha * wedge / (rho + delta)).powf(1.0 / (1.0 - alpha));
    let y_per_l = k_per_l.powf(alpha);
    SectorSS {
        k_per_l,
        y_per_l,
        i_per_l: delta * k_per_l,
    }
}

/// Undistorted steady state of each sector scaled by the preference weights;
/// identities are then filled in under the actual tax policy.
pub fn default_guess(spec: &ModelSpec) -> State {
    let rho = spec.rho();
    let single = spec.single_sector();
    let cc = sector(spec.alpha_c, spec.delta_c, rho, 1.0);
    let pt = sector(spec.alpha_p, spec.delta_p, rho, 1.0);
    let w = (1.0 - spec.alpha_c) * cc.y_per_l;
    let w_pt_real = (1.0 - spec.alpha_p) * pt.y_per_l;
    let p = if single { 1.0 } else { w / w_pt_real };
    let a = cc.y_per_l - cc.i_per_l;
    let b = pt.y_per_l - pt.i_per_l;
    // c_pt / c implied by the intratemporal condition at price p
    let ratio = match spec.aggregator {
        Aggregator::CobbDouglas { gamma } => (1.0 - gamma) / (gamma * p),
        Aggregator::Ces { eta, epsilon } => (p * eta / (1.0 - eta)).powf(1.0 / (epsilon - 1.0)),
    };
    let (l, l_pt) = match spec.labor {
        LaborSupply::Fixed { ccorp } => (ccorp, 1.0 - ccorp),
        LaborSupply::Elastic { phi } => {
            let rel = if single { 0.0 } else { ratio * a / b };
            let s_c = 1.0 / (1.0 + rel);
            let s_p = 1.0 - s_c;
            let mu1 = crate::model::marginal_utility_f64(spec, single, s_c * a, s_p * b);
            let total = ((1.0 - spec.policy.tau_indiv) * w * mu1).powf(1.0 / (phi + spec.sigma));
            (total * s_c, total * s_p)
        }
    };
    let mut s = State::default();
    s[Var::L] = l;
    s[Var::K] = cc.k_per_l * l;
    s[Var::Y] = cc.y_per_l * l;
    s[Var::I] = cc.i_per_l * l;
    s[Var::C] = a * l;
    s[Var::W] = w;
    s[Var::U] = 1.0;
    s[Var::P] = p;
    if !single {
        s[Var::LPt] = l_pt;
        s[Var::KPt] = pt.k_per_l * l_pt;
        s[Var::YPt] = pt.y_per_l * l_pt;
        s[Var::IPt] = pt.i_per_l * l_pt;
        s[Var::CPt] = b * l_pt;
        s[Var::WPt] = p * w_pt_real;
    }
    s[Var::Mu] = crate::model::marginal_utility_f64(spec, single, s[Var::C], s[Var::CPt]);
    fill_identities(spec, &mut s);
    s
}

/// Completes accounting variables from quantities and prices in a steady state.
fn fill_identities(spec: &ModelSpec, s: &mut State) {
    let pol = &spec.policy;
    let d = pol.sched.rate();
    let lambda = taxcode::pdv_of_schedule(d, spec.beta).unwrap_or(1.0);
    s[Var::LambdaA] = lambda;
    s[Var::LambdaB] = lambda;
    s[Var::KpiB] = 0.0;
    s[Var::KpiA] = (1.0 - d) * s[Var::I] / d;
    s[Var::Deduction] = s[Var::I];
    s[Var::Profit] = s[Var::Y] - s[Var::W] * s[Var::L] - s[Var::I];
    s[Var::TaxBase] = s[Var::Profit];
    s[Var::TaxCorp] = pol.tau_corp * s[Var::TaxBase];
    s[Var::Div] = s[Var::Profit] - s[Var::TaxCorp];
    s[Var::ProfitPt] = s[Var::P] * (s[Var::YPt] - s[Var::IPt]) - s[Var::WPt] * s[Var::LPt];
    s[Var::DivPt] = s[Var::ProfitPt];
    s[Var::TaxIndiv] = pol.tau_indiv
        * (s[Var::W] * s[Var::L] + s[Var::WPt] * s[Var::LPt] + s[Var::Div] + s[Var::DivPt]);
    s[Var::TaxTotal] = s[Var::TaxCorp] + s[Var::TaxIndiv];
    s[Var::Gov] = pol.theta_waste * s[Var::TaxTotal];
    s[Var::Transfer] = (1.0 - pol.theta_waste) * s[Var::TaxTotal];
}

pub fn solve_steady_state(spec: &ModelSpec, guess: Option<&State>) -> Result<SteadyState> {
    solve_steady_state_with(spec, guess, &NewtonOptions::STEADY_STATE)
}

pub fn solve_steady_state_with(
    spec: &ModelSpec,
    guess: Option<&State>,
    opts: &NewtonOptions,
) -> Result<SteadyState> {
    spec.validate()?;
    let layout = Layout::new(spec.single_sector());
    let vintage = VintagePolicy::steady(spec.policy.sched);
    let sys = PeriodSystem {
        spec,
        vintage: &vintage,
        layout: &layout,
    };
    let start = match guess {
        Some(g) => *g,
        None => default_guess(spec),
    };
    let mut x = layout.pack(&start);
    if let Some(v) = sys.first_nonpositive(&x) {
        let s = layout.unpack(&x);
        return Err(Error::NonPositive {
            variable: v.name(),
            period: None,
            value: s[v],
        });
    }
    let eval = |x: &[f64]| sys.residual(SS_PERIOD, LagRef::State(x), x, Lead::State(x));
    let mut f = eval(&x);
    let mut norm = max_abs(&f);
    let mut trace = Vec::new();
    let mut iterations = 0;
    while !(norm < opts.tol) {
        trace.push(norm);
        if iterations == opts.max_iter {
            return Err(no_convergence(&layout, iterations, &f, trace));
        }
        iterations += 1;
        let jac = sys.steady_jacobian(SS_PERIOD, &x);
        let neg: Vec<f64> = f.iter().map(|v| -v).collect();
        let dx = Lu::factor(&jac)?.solve(&neg);
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + step * b).collect();
            if sys.first_nonpositive(&trial).is_none() {
                let ft = eval(&trial);
                let nt = max_abs(&ft);
                if nt < norm {
                    x = trial;
                    f = ft;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            trace.push(norm);
            return Err(no_convergence(&layout, iterations, &f, trace));
        }
    }
    trace.push(norm);
    let state = layout.unpack(&x);
    let agg = aggregates(&state);
    let gdp = agg.gdp;
    Ok(SteadyState {
        spec: *spec,
        state,
        wedge: spec.policy.wedge_report(spec.beta, spec.alpha_c)?,
        moments: Moments {
            profit: state[Var::Profit] / gdp,
            div: state[Var::Div] / gdp,
            tax_corp: state[Var::TaxCorp] / gdp,
            tax_indiv: state[Var::TaxIndiv] / gdp,
        },
        stats: SolveStats {
            iterations,
            residual: norm,
            trace,
        },
    })
}

fn no_convergence(layout: &Layout, iterations: usize, f: &[f64], trace: Vec<f64>) -> Error {
    let (k, r) = f
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (k, v)| if v.abs() > acc.1 { (k, v.abs()) } else { acc });
    Error::NoConvergence {
        iterations,
        residual: r,
        worst_equation: layout.vars()[k].equation(),
        worst_period: None,
        trace,
    }
}

/// Finds the consumption-bundle weight (`eta`, or `gamma` for Cobb-Douglas)
/// at which the c-corporate share of receipts equals `target_share`.
pub fn calibrate_eta(spec: &ModelSpec, target_share: f64) -> Result<f64> {
    if !(target_share > 0.0 && target_share < 1.0) {
        return Err(Error::invalid("target_share", target_share, "a share in (0, 1)"));
    }
    if spec.single_sector() {
        return Err(Error::Restriction("calibration needs both sectors"));
    }
    let mut warm: Option<State> = None;
    let mut gap = |eta: f64| -> Result<f64> {
        let s = spec.with_eta(eta)?;
        let ss = match solve_steady_state(&s, warm.as_ref()) {
            Ok(ss) => ss,
            Err(_) => solve_steady_state(&s, None)?,
        };
        warm = Some(ss.state);
        Ok(ss.ccorp_share() - target_share)
    };
    let (mut lo, mut hi) = (0.02, 0.98);
    let (mut f_lo, mut f_hi) = (gap(lo)?, gap(hi)?);
    if f_lo * f_hi > 0.0 {
        return Err(Error::Bracketing { lo, hi, f_lo, f_hi });
    }
    // Illinois false position
    let mut side = 0i8;
    let mut mid = lo;
    for _ in 0..200 {
        mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let f_mid = gap(mid)?;
        if f_mid.abs() < 1e-12 || (hi - lo) < 1e-14 {
            break;
        }
        if f_mid * f_hi > 0.0 {
            hi = mid;
            f_hi = f_mid;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        } else {
            lo = mid;
            f_lo = f_mid;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        }
    }
    Ok(mid)
}

/// Steady-state c-corporate share of receipts for each weight on a grid.
pub fn share_curve(spec: &ModelSpec, etas: &[f64]) -> Result<Vec<f64>> {
    let mut out = vec![0.0; etas.len()];
    for (o, &e) in out.iter_mut().zip(etas) {
        *o = solve_steady_state(&spec.with_eta(e)?, None)?.ccorp_share();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration;
    use crate::model::steady_state_residuals;

    #[test]
    fn baseline_2017_moments() {
        let ss = solve_steady_state(&calibration::baseline_2017(), None).unwrap();
        let m = ss.moments;
        assert!((m.profit - 0.08).abs() < 0.01, "{m:?}");
        assert!((m.div - 0.05).abs() < 0.01, "{m:?}");
        assert!((m.tax_corp - 0.03).abs() < 0.01, "{m:?}");
        assert!((m.tax_indiv - 0.10).abs() < 0.01, "{m:?}");
        let r = steady_state_residuals(&ss.spec, &ss.state).unwrap();
        assert!(r.max_abs() < 1e-10);
    }

    #[test]
    fn extended_solves() {
        for spec in [calibration::extended_2017(), calibration::extended_1961()] {
            let ss = solve_steady_state(&spec, None).unwrap();
            assert!(ss.stats.residual < 1e-10);
            assert!((ss.state[Var::U] - 1.0).abs() < 1e-8);
        }
    }
}

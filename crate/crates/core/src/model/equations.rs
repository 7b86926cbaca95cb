//! Per-period equilibrium conditions.
//!
//! Every variable owns one equation (see [`Var::equation`]), so a period's
//! residual vector has the same layout as its state. Conditions that look
//! forward read `next`; laws of motion read the lagged state or, in the
//! first period of a transition, the given initial stocks.

use crate::ad::Real;
use crate::error::{Error, Result};
use crate::model::spec::{Aggregator, LaborSupply, ModelSpec, Utilization, VintagePolicy};
use crate::model::vars::{Layout, State, Var, ALL_VARS, NVARS};

/// Predetermined stocks at the first period of a transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialStocks {
    pub k: f64,
    pub k_pt: f64,
    pub kpi_b: f64,
    pub kpi_a: f64,
}

impl InitialStocks {
    /// Stocks inherited from a steady state; all undeducted investment is
    /// assigned to the pre-reform vintage.
    pub fn from_steady_state(s: &State) -> Self {
        InitialStocks {
            k: s[Var::K],
            k_pt: s[Var::KPt],
            kpi_b: s.kpi(),
            kpi_a: 0.0,
        }
    }
}

#[derive(Clone, Copy)]
pub(crate) enum Lag<'a, R> {
    State(&'a [R; NVARS]),
    Initial(&'a InitialStocks),
}

/// Period used when evaluating the system at a steady state.
pub(crate) const SS_PERIOD: usize = 1;

pub(crate) fn marginal_utility<R: Real>(spec: &ModelSpec, single: bool, c: R, c_pt: R) -> R {
    let sigma = spec.sigma;
    if single {
        return c.powf(-sigma);
    }
    match spec.aggregator {
        Aggregator::CobbDouglas { gamma } => {
            let bundle = c.powf(gamma) * c_pt.powf(1.0 - gamma);
            bundle.powf(1.0 - sigma) * gamma / c
        }
        Aggregator::Ces { eta, epsilon } => {
            let inner = c.powf(epsilon) * eta + c_pt.powf(epsilon) * (1.0 - eta);
            let bundle = inner.powf(1.0 / epsilon);
            c.powf(epsilon - 1.0) * bundle.powf(1.0 - epsilon - sigma) * eta
        }
    }
}

pub(crate) fn depreciation<R: Real>(spec: &ModelSpec, u: R) -> R {
    match spec.utilization {
        Utilization::Pinned => R::cst(spec.delta_c),
        Utilization::Variable { delta2 } => {
            let gap = u - 1.0;
            gap * spec.delta1() + gap * gap * (0.5 * delta2) + spec.delta_c
        }
    }
}

fn depreciation_slope<R: Real>(spec: &ModelSpec, u: R) -> R {
    match spec.utilization {
        Utilization::Pinned => R::cst(0.0),
        Utilization::Variable { delta2 } => (u - 1.0) * delta2 + spec.delta1(),
    }
}

/// State one period after `x` when the horizon ends at `x`: stocks follow
/// their laws of motion from `x`, output combines them with the terminal
/// labor and utilization, and every other entry is taken from `terminal`.
pub(crate) fn implied_next<R: Real>(
    spec: &ModelSpec,
    vintage: &VintagePolicy,
    single: bool,
    t: usize,
    x: &[R; NVARS],
    terminal: &[f64; NVARS],
) -> [R; NVARS] {
    use Var::*;
    let g = |v: Var| x[v.index()];
    let mut xn = [R::cst(0.0); NVARS];
    for v in ALL_VARS {
        xn[v.index()] = R::cst(terminal[v.index()]);
    }
    let a = if vintage.after_reform(t) { 1.0 } else { 0.0 };
    let d_b = vintage.sched_before.rate();
    let d_a = vintage.sched_after.rate();
    let k = (R::cst(1.0) - depreciation(spec, g(U))) * g(K) + g(I);
    let u = terminal[U.index()];
    xn[K.index()] = k;
    xn[Y.index()] = (k * u).powf(spec.alpha_c) * terminal[L.index()].powf(1.0 - spec.alpha_c);
    xn[KpiB.index()] = (g(I) * (1.0 - a) + g(KpiB)) * (1.0 - d_b);
    xn[KpiA.index()] = (g(I) * a + g(KpiA)) * (1.0 - d_a);
    if !single {
        let k_pt = g(KPt) * (1.0 - spec.delta_p) + g(IPt);
        xn[KPt.index()] = k_pt;
        xn[YPt.index()] = k_pt.powf(spec.alpha_p) * terminal[LPt.index()].powf(1.0 - spec.alpha_p);
    }
    xn
}

/// Raw residuals; pass-through slots are zero in the single-sector layout.
pub(crate) fn residuals<R: Real>(
    spec: &ModelSpec,
    vintage: &VintagePolicy,
    single: bool,
    t: usize,
    prev: Lag<'_, R>,
    x: &[R; NVARS],
    xn: &[R; NVARS],
) -> [R; NVARS] {
    use Var::*;
    let g = |v: Var| x[v.index()];
    let gn = |v: Var| xn[v.index()];
    let zero = R::cst(0.0);
    let mut r = [zero; NVARS];
    let mut set = |v: Var, val: R| r[v.index()] = val;

    let pol = &spec.policy;
    let tau = pol.tau_corp;
    let tau_ii = pol.tau_indiv;
    let theta = pol.theta_waste;
    let beta = spec.beta;
    let (ac, ap) = (spec.alpha_c, spec.alpha_p);
    let d_b = vintage.sched_before.rate();
    let d_a = vintage.sched_after.rate();
    let now_a = if vintage.after_reform(t) { 1.0 } else { 0.0 };
    let prev_a = if vintage.after_reform_prev(t) { 1.0 } else { 0.0 };

    let lam_app = |s: &[R; NVARS], period: usize| {
        if vintage.after_reform(period) {
            s[LambdaA.index()]
        } else {
            s[LambdaB.index()]
        }
    };
    // Shadow value of installed c-corp capital: one minus the tax value of
    // the deductions generated by a marginal unit of investment.
    let q = R::cst(1.0) - lam_app(x, t) * tau;
    let qn = R::cst(1.0) - lam_app(xn, t + 1) * tau;

    let (c, c_pt, p, mu) = (g(C), g(CPt), g(P), g(Mu));
    let (w, w_pt, l, l_pt) = (g(W), g(WPt), g(L), g(LPt));
    let (k, k_pt, i, i_pt, u) = (g(K), g(KPt), g(I), g(IPt), g(U));
    let (y, y_pt) = (g(Y), g(YPt));

    set(C, mu - marginal_utility(spec, single, c, c_pt));
    set(
        Mu,
        mu * q
            - gn(Mu)
                * ((gn(Y) / gn(K)) * ((1.0 - tau) * ac) + qn * (R::cst(1.0) - depreciation(spec, gn(U))))
                * beta,
    );
    set(
        U,
        match spec.utilization {
            Utilization::Pinned => u - 1.0,
            Utilization::Variable { .. } => y * ((1.0 - tau) * ac) - q * depreciation_slope(spec, u) * u * k,
        },
    );
    set(W, w * l - y * (1.0 - ac));
    set(
        L,
        match spec.labor {
            LaborSupply::Fixed { ccorp } => l - ccorp,
            LaborSupply::Elastic { phi } => (l + l_pt).powf(phi) - w * mu * (1.0 - tau_ii),
        },
    );
    set(Y, y - (u * k).powf(ac) * l.powf(1.0 - ac));

    let gdp = y + p * y_pt;
    let gov = g(Gov);
    set(I, y - c - i - gov * y / gdp);

    match prev {
        Lag::State(xp) => {
            let gp = |v: Var| xp[v.index()];
            set(K, k - (R::cst(1.0) - depreciation(spec, gp(U))) * gp(K) - gp(I));
            set(KPt, k_pt - gp(KPt) * (1.0 - spec.delta_p) - gp(IPt));
            set(KpiB, g(KpiB) - (gp(I) * (1.0 - prev_a) + gp(KpiB)) * (1.0 - d_b));
            set(KpiA, g(KpiA) - (gp(I) * prev_a + gp(KpiA)) * (1.0 - d_a));
        }
        Lag::Initial(s) => {
            set(K, k - s.k);
            set(KPt, k_pt - s.k_pt);
            set(KpiB, g(KpiB) - s.kpi_b);
            set(KpiA, g(KpiA) - s.kpi_a);
        }
    }
    set(
        Deduction,
        g(Deduction) - (i * (1.0 - now_a) + g(KpiB)) * d_b - (i * now_a + g(KpiA)) * d_a,
    );
    set(TaxBase, g(TaxBase) - (y - w * l - g(Deduction)));
    set(TaxCorp, g(TaxCorp) - g(TaxBase) * tau);
    set(Profit, g(Profit) - (y - w * l - i));
    set(Div, g(Div) - (g(Profit) - g(TaxCorp)));
    set(
        TaxIndiv,
        g(TaxIndiv) - (w * l + w_pt * l_pt + g(Div) + g(DivPt)) * tau_ii,
    );
    set(TaxTotal, g(TaxTotal) - g(TaxCorp) - g(TaxIndiv));
    set(Gov, gov - g(TaxTotal) * theta);
    set(Transfer, g(Transfer) - g(TaxTotal) * (1.0 - theta));
    set(
        LambdaB,
        mu * g(LambdaB) - mu * d_b - gn(Mu) * gn(LambdaB) * (beta * (1.0 - d_b)),
    );
    set(
        LambdaA,
        mu * g(LambdaA) - mu * d_a - gn(Mu) * gn(LambdaA) * (beta * (1.0 - d_a)),
    );

    if !single {
        set(
            CPt,
            match spec.aggregator {
                Aggregator::CobbDouglas { gamma } => p * c_pt * gamma - c * (1.0 - gamma),
                Aggregator::Ces { eta, epsilon } => {
                    p * c.powf(epsilon - 1.0) * eta - c_pt.powf(epsilon - 1.0) * (1.0 - eta)
                }
            },
        );
        set(
            P,
            mu * p
                - gn(Mu) * gn(P) * ((gn(YPt) / gn(KPt)) * ap + (1.0 - spec.delta_p)) * beta,
        );
        set(WPt, w_pt * l_pt - p * y_pt * (1.0 - ap));
        set(
            LPt,
            match spec.labor {
                LaborSupply::Fixed { ccorp } => l_pt - (1.0 - ccorp),
                LaborSupply::Elastic { .. } => w_pt - w,
            },
        );
        set(YPt, y_pt - k_pt.powf(ap) * l_pt.powf(1.0 - ap));
        set(IPt, y_pt - c_pt - i_pt - gov * y_pt / gdp);
        set(ProfitPt, g(ProfitPt) - (p * y_pt - w_pt * l_pt - p * i_pt));
        set(DivPt, g(DivPt) - g(ProfitPt));
    }
    r
}

pub(crate) fn check_positive(
    layout: &Layout,
    s: &State,
    period: Option<usize>,
) -> Result<()> {
    for &v in layout.vars() {
        if v.must_be_positive() && !(s[v] > 0.0) {
            return Err(Error::NonPositive {
                variable: v.name(),
                period,
                value: s[v],
            });
        }
    }
    Ok(())
}

/// Residuals of one period's equilibrium conditions, indexed like [`State`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals(pub [f64; NVARS]);

impl Residuals {
    pub fn get(&self, v: Var) -> f64 {
        self.0[v.index()]
    }

    /// Largest absolute residual and the equation it belongs to.
    pub fn worst(&self) -> (Var, f64) {
        ALL_VARS
            .iter()
            .map(|&v| (v, self.0[v.index()].abs()))
            .fold((Var::C, 0.0), |acc, e| if e.1 > acc.1 { e } else { acc })
    }

    pub fn max_abs(&self) -> f64 {
        self.worst().1
    }
}

/// Lagged information for [`residuals_period`].
#[derive(Debug, Clone, Copy)]
pub enum Lagged<'a> {
    State(&'a State),
    Initial(&'a InitialStocks),
}

/// Evaluates period `t`'s conditions given the neighbouring states.
pub fn residuals_period(
    spec: &ModelSpec,
    vintage: &VintagePolicy,
    t: usize,
    prev: Lagged<'_>,
    now: &State,
    next: &State,
) -> Result<Residuals> {
    let layout = Layout::new(spec.single_sector());
    if let Lagged::State(p) = prev {
        check_positive(&layout, p, t.checked_sub(1))?;
    }
    check_positive(&layout, now, Some(t))?;
    check_positive(&layout, next, Some(t + 1))?;
    let lag = match prev {
        Lagged::State(p) => Lag::State(&p.0),
        Lagged::Initial(s) => Lag::Initial(s),
    };
    Ok(Residuals(residuals(
        spec,
        vintage,
        layout.single_sector(),
        t,
        lag,
        &now.0,
        &next.0,
    )))
}

/// Residuals with `prev = now = next = s`.
pub fn steady_state_residuals(spec: &ModelSpec, s: &State) -> Result<Residuals> {
    let vintage = VintagePolicy::steady(spec.policy.sched);
    residuals_period(spec, &vintage, SS_PERIOD, Lagged::State(s), s, s)
}

//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_GAPS` are still evaluated against their pinned
//! tolerances and reported as FAIL when they miss; they do not fail the run
//! unless `ACCEPTANCE_STRICT` is set. Any other failure exits non-zero.

use std::time::Instant;

use corptax_core::calibration::*;
use corptax_core::model::*;
use corptax_core::scenarios::*;
use corptax_core::steady::*;
use corptax_core::taxcode::*;
use corptax_core::transition::*;

// Tolerances.
const TOL_SCHEDULE_ANCHOR: f64 = 1e-3;
const TOL_ROUND_TRIP: f64 = 1e-12;
const TOL_WEDGE: f64 = 0.005;
const TOL_DISTORTION_1961: f64 = 0.003;
const TOL_DISTORTION_2017: f64 = 0.002;
const TOL_MOMENT: f64 = 0.01;
const TOL_REVENUE_POSITIVITY: f64 = 1e-8;
const TOL_ANALYTIC: f64 = 1e-8;
const TOL_NULL_FLAT: f64 = 1e-9;
const TOL_HORIZON_DOUBLING: f64 = 1e-6;
const TOL_JACOBIAN: f64 = 1e-6;
const TOL_VINTAGE_COLLAPSE: f64 = 1e-9;
const TCJA_GDP_MULTIPLIER: (f64, f64) = (0.6, 0.15);
const KENNEDY_GDP_MULTIPLIER: (f64, f64) = (2.5, 0.5);
const KENNEDY_INVESTMENT_MULTIPLIER: (f64, f64) = (1.85, 0.4);
const KENNEDY_TO_TCJA_MIN_RATIO: f64 = 3.0;
const KENNEDY_PAYOUT_MULTIPLIER_MAX: f64 = 0.5;
const KENNEDY_INVESTMENT_MULTIPLIER_MIN: f64 = 1.0;
const TRANSITORY_REVENUE_MAX: f64 = 0.25;
const PERMANENT_REVENUE_MIN: f64 = 0.5;
const SIMILAR_MAGNITUDE_RATIO: f64 = 3.0;
const FIG9_OLD_INVESTMENT: (f64, f64) = (0.1424, 0.015);
const FIG9_SUM_INVESTMENT: (f64, f64) = (0.0839, 0.015);

/// Criteria that miss their tolerance with this model; see the README.
const KNOWN_GAPS: &[(u32, &str)] = &[];

struct Check {
    label: String,
    ok: bool,
}

#[derive(Default)]
struct Report {
    checks: Vec<Check>,
}

impl Report {
    fn check(&mut self, ok: bool, label: impl Into<String>) {
        self.checks.push(Check { label: label.into(), ok });
    }

    fn within(&mut self, name: &str, value: f64, target: f64, tol: f64) {
        self.check((value - target).abs() <= tol, format!("{name} = {value:.6} (target {target} +/- {tol})"));
    }

    fn below(&mut self, name: &str, value: f64, bound: f64) {
        self.check(value < bound, format!("{name} = {value:.3e} (< {bound:e})"));
    }
}

fn c1(r: &mut Report) {
    let bonus = apply_bonus(BONUS_2017, MACRS_PDV_2017).unwrap();
    r.within("bonus PDV 2017", bonus, 0.9395, TOL_SCHEDULE_ANCHOR);
    r.within("rate from PDV 0.9879", rate_from_pdv(0.9879, BETA).unwrap(), 0.8305, TOL_SCHEDULE_ANCHOR);
    r.within("rate from PDV 0.7917", rate_from_pdv(0.7917, BETA).unwrap(), 0.1857, TOL_SCHEDULE_ANCHOR);
    r.within("PDV of rate 0.4823", pdv_of_schedule(RATE_DBAL_2017, BETA).unwrap(), 0.9395, TOL_SCHEDULE_ANCHOR);
    let mut worst = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let d = 0.01 + 0.99 * i as f64 / 9.0;
            let beta = 0.80 + 0.19 * j as f64 / 9.0;
            let back = rate_from_pdv(pdv_of_schedule(d, beta).unwrap(), beta).unwrap();
            worst = worst.max((back - d).abs());
        }
    }
    r.below("round-trip error over 100 pairs", worst, TOL_ROUND_TRIP);
}

fn c2(r: &mut Report) {
    let w = |tau, d| wedge_report(tau, d, BETA, ALPHA).unwrap().wedge;
    r.within("wedge 2017", w(TAU_2017, RATE_DBAL_2017), 0.97, TOL_WEDGE);
    r.within("wedge 1961", w(TAU_1961, RATE_DBAL_1961), 0.72, TOL_WEDGE);
    r.within("wedge 1965", w(TAU_1965, RATE_DBAL_1965), 0.84, TOL_WEDGE);
    let ss = solve_steady_state(&extended_2017(), None).unwrap();
    r.within("solved 2017 economy wedge", ss.wedge.wedge, 0.97, TOL_WEDGE);
}

fn c3(r: &mut Report) {
    let d = |tau, rate| analytic_steady_state(&single_sector(tau, rate)).unwrap().distortion;
    r.within("distortion 1961", d(TAU_1961, RATE_DBAL_1961), 0.16, TOL_DISTORTION_1961);
    r.within("distortion 2017", d(TAU_2017, RATE_DBAL_2017), 0.017, TOL_DISTORTION_2017);
    let num = solve_steady_state(&single_sector(TAU_1961, RATE_DBAL_1961), None).unwrap();
    let free = solve_steady_state(&single_sector(0.0, RATE_DBAL_1961), None).unwrap();
    let numeric = 1.0 - num.state[Var::Y] / free.state[Var::Y];
    r.within("numeric distortion 1961", numeric, 0.16, TOL_DISTORTION_1961);
}

fn c4(r: &mut Report) {
    let m = solve_steady_state(&baseline_2017(), None).unwrap().moments;
    r.within("profit/GDP", m.profit, 0.08, TOL_MOMENT);
    r.within("dividends/GDP", m.div, 0.05, TOL_MOMENT);
    r.within("corporate revenue/GDP", m.tax_corp, 0.03, TOL_MOMENT);
    r.within("individual revenue/GDP", m.tax_indiv, 0.10, TOL_MOMENT);
}

fn c5(r: &mut Report) {
    let mut worst = 0.0f64;
    let mut positive = true;
    for tau in [0.05, 0.21, 0.35, 0.52, 0.75, 0.95] {
        let spec = single_sector(tau, 1.0);
        let s = solve_steady_state(&spec, None).unwrap().state;
        let rk = spec.rho() * s[Var::K];
        worst = worst.max((s[Var::TaxBase] - rk).abs() / rk);
        positive &= s[Var::TaxCorp] > 0.0;
    }
    r.below("max |TB - rho k| / rho k under full expensing", worst, TOL_REVENUE_POSITIVITY);
    r.check(positive, "corporate revenue positive under full expensing");
}

fn c6(r: &mut Report) {
    let mut worst = 0.0f64;
    for tau in [0.0, 0.15, 0.30, 0.45, 0.60] {
        for d in [0.05, 0.20, 0.45, 0.75, 1.0] {
            let spec = single_sector(tau, d);
            let a = analytic_steady_state(&spec).unwrap();
            let s = solve_steady_state(&spec, None).unwrap().state;
            let mut pairs = vec![(s[Var::Y], a.y), (s[Var::K], a.k), (s[Var::Div], a.div)];
            if tau > 0.0 {
                pairs.push((s[Var::TaxCorp], a.tax_corp));
            }
            for (n, x) in pairs {
                worst = worst.max((n - x).abs() / x.abs());
            }
        }
    }
    r.below("max relative gap over the 5x5 grid", worst, TOL_ANALYTIC);
}

fn setup(pre: ModelSpec, post: ModelSpec, new_only: bool, horizon: usize) -> TransitionProblem {
    let a = solve_steady_state(&pre, None).unwrap();
    let b = solve_steady_state(&post, Some(&a.state)).unwrap();
    TransitionProblem::unanticipated(&a, &b, new_only, horizon).unwrap()
}

fn transition(pre: ModelSpec, post: ModelSpec, new_only: bool, horizon: usize) -> (TransitionProblem, TransitionPath) {
    let p = setup(pre, post, new_only, horizon);
    let path = solve_transition(&p).unwrap();
    (p, path)
}

fn max_gap(a: &State, b: &State, pool_vintages: bool) -> f64 {
    ALL_VARS
        .iter()
        .map(|&v| match v {
            Var::KpiA | Var::KpiB if pool_vintages => scaled_gap(a.kpi(), b.kpi()),
            _ => scaled_gap(a[v], b[v]),
        })
        .fold(0.0, f64::max)
}

fn c7(r: &mut Report) {
    let e17 = extended_2017();
    let tcja = e17.with_policy(policy_tcja());

    let (_, null) = transition(e17, e17, true, DEFAULT_HORIZON);
    let start = solve_steady_state(&e17, None).unwrap().state;
    let flat = null.states.iter().map(|s| max_gap(s, &start, true)).fold(0.0, f64::max);
    r.below("null reform max deviation", flat, TOL_NULL_FLAT);

    let (_, short) = transition(e17, tcja, true, DEFAULT_HORIZON);
    let (_, long) = transition(e17, tcja, true, 2 * DEFAULT_HORIZON);
    let doubling = (0..20).map(|t| max_gap(&short.states[t], &long.states[t], false)).fold(0.0, f64::max);
    r.below("horizon doubling, first 20 periods", doubling, TOL_HORIZON_DOUBLING);

    let p = setup(e17, tcja, true, 5);
    let x: Vec<f64> = p
        .initial_guess()
        .iter()
        .enumerate()
        .map(|(k, v)| v * (1.0 + 0.01 * ((k as f64) * 0.7).sin()))
        .collect();
    let jac = stacked_jacobian(&p, &x);
    let mut worst = 0.0f64;
    for j in 0..x.len() {
        let h = 1e-6 * x[j].abs().max(1e-2);
        let (mut xp, mut xm) = (x.clone(), x.clone());
        xp[j] += h;
        xm[j] -= h;
        let (fp, fm) = (stacked_residual(&p, &xp), stacked_residual(&p, &xm));
        for i in 0..x.len() {
            let fd = (fp[i] - fm[i]) / (2.0 * h);
            let ad = jac.entry(i, j);
            worst = worst.max((fd - ad).abs() / ad.abs().max(1.0));
        }
    }
    r.below("Jacobian vs central differences", worst, TOL_JACOBIAN);

    let rate_only = e17.with_policy(e17.policy.with_tau_corp(TAU_TCJA).unwrap());
    let (_, split) = transition(e17, rate_only, true, DEFAULT_HORIZON);
    let (_, pooled) = transition(e17, rate_only, false, DEFAULT_HORIZON);
    let collapse = split
        .states
        .iter()
        .zip(&pooled.states)
        .flat_map(|(a, b)| {
            ALL_VARS.iter().map(move |&v| match v {
                Var::KpiA | Var::KpiB => (a.kpi() - b.kpi()).abs(),
                _ => (a[v] - b[v]).abs(),
            })
        })
        .fold(0.0, f64::max);
    r.below("vintage collapse", collapse, TOL_VINTAGE_COLLAPSE);
}

fn c8(r: &mut Report, tcja: &ReformResult, kennedy: &ReformResult) {
    let m = |x: &ReformResult, k| x.multiplier(k).unwrap_or(f64::NAN);
    let t_gdp = m(tcja, Measure::Gdp);
    let k_gdp = m(kennedy, Measure::Gdp);
    r.within("TCJA GDP multiplier", t_gdp, TCJA_GDP_MULTIPLIER.0, TCJA_GDP_MULTIPLIER.1);
    r.within("Kennedy GDP multiplier", k_gdp, KENNEDY_GDP_MULTIPLIER.0, KENNEDY_GDP_MULTIPLIER.1);
    r.within(
        "Kennedy investment multiplier",
        m(kennedy, Measure::Investment),
        KENNEDY_INVESTMENT_MULTIPLIER.0,
        KENNEDY_INVESTMENT_MULTIPLIER.1,
    );
    r.check(
        k_gdp > KENNEDY_TO_TCJA_MIN_RATIO * t_gdp,
        format!("Kennedy/TCJA GDP multiplier ratio = {:.3} (> {KENNEDY_TO_TCJA_MIN_RATIO})", k_gdp / t_gdp),
    );
    for (name, x) in [("TCJA", tcja), ("Kennedy", kennedy)] {
        r.check(
            true,
            format!(
                "info: {name} multipliers gdp {:.3}, investment {:.3}, payout {:.3}; at current prices gdp {:.3}, investment {:.3}",
                m(x, Measure::Gdp),
                m(x, Measure::Investment),
                m(x, Measure::Payout),
                m(x, Measure::GdpCurrentPrice),
                m(x, Measure::InvestmentCurrentPrice)
            ),
        );
    }
}

fn revenue_gap(x: &ReformResult, t: usize) -> f64 {
    x.baseline[Var::TaxCorp] - x.path.states[t][Var::TaxCorp]
}

fn c9(r: &mut Report, tcja: &ReformResult, kennedy: &ReformResult, provisions: &ProvisionDecomposition) {
    let payout = tcja.deviation(Var::Div, 0).unwrap();
    let invest = tcja.deviation(Var::I, 0).unwrap();
    r.check(
        payout > invest,
        format!("TCJA year-1 c-corp payout {:+.4} > investment {:+.4}", payout, invest),
    );
    let kp = kennedy.multiplier(Measure::Payout).unwrap();
    let ki = kennedy.multiplier(Measure::Investment).unwrap();
    r.check(
        kp.abs() < KENNEDY_PAYOUT_MULTIPLIER_MAX && ki > KENNEDY_INVESTMENT_MULTIPLIER_MIN,
        format!("Kennedy payout multiplier {kp:.3} near zero, investment multiplier {ki:.3} large"),
    );
    let interaction = provisions.interaction(Measure::CcorpInvestment);
    r.check(interaction < 0.0, format!("provision interaction on c-corp investment {interaction:+.5} < 0"));
    let ri = provisions.rate_only.long_run_change(Measure::CcorpInvestment);
    let bi = provisions.depreciation_only.long_run_change(Measure::CcorpInvestment);
    let ratio = ri / bi;
    r.check(
        ri > 0.0 && bi > 0.0 && (1.0 / SIMILAR_MAGNITUDE_RATIO..=SIMILAR_MAGNITUDE_RATIO).contains(&ratio),
        format!("rate-only {ri:+.4} and bonus-only {bi:+.4} investment effects positive and similar"),
    );
    let last = provisions.combined.path.states.len() - 1;
    let persistence = |x: &ReformResult| revenue_gap(x, last) / revenue_gap(x, 0);
    let b = persistence(&provisions.depreciation_only);
    let rt = persistence(&provisions.rate_only);
    r.check(
        b.abs() < TRANSITORY_REVENUE_MAX && rt >= PERMANENT_REVENUE_MIN,
        format!("revenue loss persistence: bonus-only {b:.3}, rate-only {rt:.3}"),
    );
}

fn c10(r: &mut Report) {
    for mode in [RateCut::PercentagePoints, RateCut::Relative] {
        let d = decompose_factors(&FactorExperiment::standard(mode)).unwrap();
        let old = d.result(Factor::Old).long_run_change(Measure::Investment);
        let sum = d.one_at_a_time_sum(Measure::Investment);
        let label = mode.name();
        if mode == RateCut::PercentagePoints {
            r.within(&format!("[{label}] 1961 long-run investment"), old, FIG9_OLD_INVESTMENT.0, FIG9_OLD_INVESTMENT.1);
            r.within(&format!("[{label}] one-at-a-time sum"), sum, FIG9_SUM_INVESTMENT.0, FIG9_SUM_INVESTMENT.1);
        } else {
            r.check(
                true,
                format!("info: [{label}] 1961 long-run investment {old:.4}, one-at-a-time sum {sum:.4}, interaction {:.4}", d.interaction(Measure::Investment)),
            );
        }
        let share = d.result(Factor::PassThroughShare).multiplier(Measure::Gdp).unwrap();
        let base = d.result(Factor::New).multiplier(Measure::Gdp).unwrap();
        r.check(true, format!("info: [{label}] GDP multiplier 2017 {base:.3}, with 1961 share {share:.3}, interaction {:.4}", d.interaction(Measure::Investment)));
    }
}

fn main() {
    let strict = std::env::var_os("ACCEPTANCE_STRICT").is_some();
    let t0 = Instant::now();
    let tcja = run_scenario(&builtin::tcja17()).unwrap();
    let kennedy = run_scenario(&builtin::kennedy()).unwrap();
    let provisions = decompose_provisions(&builtin::tcja17()).unwrap();
    let shared = t0.elapsed();

    let criteria: Vec<(u32, &str, Box<dyn Fn(&mut Report)>)> = vec![
        (1, "depreciation closed forms", Box::new(c1)),
        (2, "wedge anchors", Box::new(c2)),
        (3, "distortion anchors", Box::new(c3)),
        (4, "untargeted moments", Box::new(c4)),
        (5, "revenue positivity under full expensing", Box::new(c5)),
        (6, "analytic vs numeric steady state", Box::new(c6)),
        (7, "transition solver properties", Box::new(c7)),
        (8, "multiplier reproduction", Box::new(|r: &mut Report| c8(r, &tcja, &kennedy))),
        (9, "qualitative orderings", Box::new(|r: &mut Report| c9(r, &tcja, &kennedy, &provisions))),
        (10, "factor decomposition anchors", Box::new(c10)),
    ];

    let mut blocking = 0;
    for (id, title, run) in &criteria {
        let start = Instant::now();
        let mut report = Report::default();
        run(&mut report);
        let ok = report.checks.iter().all(|c| c.ok);
        let gap = KNOWN_GAPS.iter().find(|(g, _)| g == id);
        let status = match (ok, gap) {
            (true, _) => "PASS".to_string(),
            (false, Some((_, why))) => format!("FAIL (known gap: {why})"),
            (false, None) => "FAIL".to_string(),
        };
        println!("criterion {id:>2} {title}: {status} [{:.2?}]", start.elapsed());
        for c in &report.checks {
            println!("    {} {}", if c.ok { "ok  " } else { "MISS" }, c.label);
        }
        if !ok && (gap.is_none() || strict) {
            blocking += 1;
        }
        if ok && gap.is_some() {
            println!("    note: criterion listed as a known gap now passes");
        }
    }
    println!("shared scenario runs: {shared:.2?}; total {:.2?}", t0.elapsed());
    if blocking > 0 {
        println!("{blocking} blocking criterion failure(s)");
        std::process::exit(1);
    }
}

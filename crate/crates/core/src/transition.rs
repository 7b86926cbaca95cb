//! Perfect-foresight transitions after an unanticipated permanent reform.
//!
//! The per-period conditions are stacked over a finite horizon and solved
//! jointly by damped Newton. Each period couples only to its neighbours, so
//! the Jacobian is block tridiagonal and is factored block by block.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::BlockTridiagonal;
use crate::model::{InitialStocks, Layout, ModelSpec, State, Var, VintagePolicy, ALL_VARS};
use crate::newton::{NewtonOptions, SolveStats};
use crate::steady::SteadyState;
use crate::system::{max_abs, LagRef, Lead, PeriodSystem, Pos};
use crate::taxcode::pdv_of_schedule;

pub const DEFAULT_HORIZON: usize = 300;
/// Periods over which the initial guess moves from the old to the new steady state.
pub const GUESS_RAMP: usize = 50;
/// Largest admissible gap between the last period and the terminal steady state.
pub const TERMINAL_GAP_TOL: f64 = 1e-7;
/// Largest admissible gap over the final tenth of the horizon.
pub const TAIL_GAP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionProblem {
    /// Post-reform economy, in force from period 0.
    pub spec: ModelSpec,
    pub vintage: VintagePolicy,
    pub initial: InitialStocks,
    /// Pre-reform steady state; only used to build the initial guess.
    pub start: State,
    pub terminal: State,
    pub horizon: usize,
}

impl TransitionProblem {
    /// Reform announced and effective at `t = 0`, starting from `pre`.
    /// With `new_investment_only`, undeducted pre-reform investment keeps
    /// the old schedule; otherwise it moves to the new one.
    pub fn unanticipated(
        pre: &SteadyState,
        post: &SteadyState,
        new_investment_only: bool,
        horizon: usize,
    ) -> Result<Self> {
        let after = post.spec.policy.sched;
        let before = if new_investment_only {
            pre.spec.policy.sched
        } else {
            after
        };
        let vintage = VintagePolicy::new_investment_only(before, after);
        let mut initial = InitialStocks::from_steady_state(&pre.state);
        if !new_investment_only {
            initial.kpi_a = initial.kpi_b;
            initial.kpi_b = 0.0;
        }
        let beta = post.spec.beta;
        let mut terminal = post.state;
        terminal[Var::LambdaB] = pdv_of_schedule(before.rate(), beta)?;
        terminal[Var::LambdaA] = pdv_of_schedule(after.rate(), beta)?;
        let mut start = pre.state;
        start[Var::KpiB] = initial.kpi_b;
        start[Var::KpiA] = initial.kpi_a;
        start[Var::LambdaB] = pdv_of_schedule(before.rate(), pre.spec.beta)?;
        start[Var::LambdaA] = pdv_of_schedule(after.rate(), pre.spec.beta)?;
        if horizon < 2 {
            return Err(Error::invalid("horizon", horizon as f64, "at least 2 periods"));
        }
        Ok(TransitionProblem {
            spec: post.spec,
            vintage,
            initial,
            start,
            terminal,
            horizon,
        })
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn layout(&self) -> Layout {
        Layout::new(self.spec.single_sector())
    }

    /// Linear interpolation over the first [`GUESS_RAMP`] periods, flat after.
    pub fn initial_guess(&self) -> Vec<f64> {
        let layout = self.layout();
        let a = layout.pack(&self.start);
        let b = layout.pack(&self.terminal);
        let mut x = Vec::with_capacity(self.horizon * layout.len());
        for t in 0..self.horizon {
            let w = if t >= GUESS_RAMP {
                1.0
            } else {
                (t + 1) as f64 / GUESS_RAMP as f64
            };
            x.extend(a.iter().zip(&b).map(|(u, v)| u + w * (v - u)));
        }
        x
    }
}

/// Sparsity of the stacked Jacobian: row block `t` has nonzero column
/// blocks `t-1`, `t`, `t+1` only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JacobianStructure {
    pub blocks: usize,
    pub block_size: usize,
    /// `(row block, column block)` pairs that may be nonzero.
    pub nonzero_blocks: Vec<(usize, usize)>,
}

impl JacobianStructure {
    pub fn diagonal_blocks(&self) -> usize {
        self.nonzero_blocks.iter().filter(|(r, c)| r == c).count()
    }

    pub fn off_diagonal_blocks(&self) -> usize {
        self.nonzero_blocks.len() - self.diagonal_blocks()
    }
}

pub fn jacobian_structure(problem: &TransitionProblem) -> JacobianStructure {
    let t_max = problem.horizon;
    let mut nonzero_blocks = Vec::with_capacity(3 * t_max);
    for t in 0..t_max {
        if t > 0 {
            nonzero_blocks.push((t, t - 1));
        }
        nonzero_blocks.push((t, t));
        if t + 1 < t_max {
            nonzero_blocks.push((t, t + 1));
        }
    }
    JacobianStructure {
        blocks: t_max,
        block_size: problem.layout().len(),
        nonzero_blocks,
    }
}

struct Stacked<'a> {
    sys: PeriodSystem<'a>,
    problem: &'a TransitionProblem,
}

impl Stacked<'_> {
    fn n(&self) -> usize {
        self.sys.n()
    }

    fn parts<'x>(&'x self, x: &'x [f64], t: usize) -> (LagRef<'x>, &'x [f64], Lead<'x>) {
        let n = self.n();
        let lag = if t == 0 {
            LagRef::Initial(&self.problem.initial)
        } else {
            LagRef::State(&x[(t - 1) * n..t * n])
        };
        let now = &x[t * n..(t + 1) * n];
        let next = if t + 1 < self.problem.horizon {
            Lead::State(&x[(t + 1) * n..(t + 2) * n])
        } else {
            Lead::Terminal(&self.problem.terminal.0)
        };
        (lag, now, next)
    }

    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(x.len());
        for t in 0..self.problem.horizon {
            let (lag, now, next) = self.parts(x, t);
            out.extend(self.sys.residual(t, lag, now, next));
        }
        out
    }

    fn jacobian(&self, x: &[f64]) -> BlockTridiagonal {
        let t_max = self.problem.horizon;
        let mut jac = BlockTridiagonal::zeros(t_max, self.n());
        for t in 0..t_max {
            let (lag, now, next) = self.parts(x, t);
            if t > 0 {
                jac.lower[t] = self.sys.block(t, lag, now, next, Pos::Prev);
            }
            jac.diag[t] = self.sys.block(t, lag, now, next, Pos::Now);
            if t + 1 < t_max {
                jac.upper[t] = self.sys.block(t, lag, now, next, Pos::Next);
            }
        }
        jac
    }

    fn admissible(&self, x: &[f64]) -> bool {
        x.chunks(self.n())
            .all(|s| self.sys.first_nonpositive(s).is_none())
    }
}

fn with_stacked<T>(problem: &TransitionProblem, f: impl FnOnce(&Stacked<'_>) -> T) -> T {
    let layout = problem.layout();
    let sys = PeriodSystem {
        spec: &problem.spec,
        vintage: &problem.vintage,
        layout: &layout,
    };
    let st = Stacked {
        sys,
        problem,
    };
    f(&st)
}

/// Stacked residual vector at `x` (periods concatenated in layout order).
pub fn stacked_residual(problem: &TransitionProblem, x: &[f64]) -> Vec<f64> {
    with_stacked(problem, |st| st.residual(x))
}

/// Exact stacked Jacobian at `x`.
pub fn stacked_jacobian(problem: &TransitionProblem, x: &[f64]) -> BlockTridiagonal {
    with_stacked(problem, |st| st.jacobian(x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionPath {
    pub spec: ModelSpec,
    pub vintage: VintagePolicy,
    /// Periods `0..horizon`.
    pub states: Vec<State>,
    pub terminal: State,
    pub stats: SolveStats,
    /// Largest scaled gap between the last period and the terminal steady state.
    pub terminal_gap: f64,
}

impl TransitionPath {
    pub fn series(&self, v: Var) -> impl Iterator<Item = f64> + '_ {
        self.states.iter().map(move |s| s[v])
    }
}

pub fn solve_transition(problem: &TransitionProblem) -> Result<TransitionPath> {
    solve_transition_with(problem, &NewtonOptions::TRANSITION)
}

pub fn solve_transition_with(
    problem: &TransitionProblem,
    opts: &NewtonOptions,
) -> Result<TransitionPath> {
    problem.spec.validate()?;
    if problem.horizon < 2 {
        return Err(Error::invalid("horizon", problem.horizon as f64, "at least 2 periods"));
    }
    with_stacked(problem, |st| {
        let n = st.n();
        let mut x = problem.initial_guess();
        let mut f = st.residual(&x);
        let mut norm = max_abs(&f);
        let mut trace = Vec::new();
        let mut iterations = 0;
        while !(norm < opts.tol) {
            trace.push(norm);
            if iterations == opts.max_iter {
                return Err(no_convergence(st, iterations, &f, trace));
            }
            iterations += 1;
            let jac = st.jacobian(&x);
            let neg: Vec<f64> = f.iter().map(|v| -v).collect();
            let dx = jac.solve(&neg)?;
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..=opts.max_halvings {
                let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + step * b).collect();
                if st.admissible(&trial) {
                    let ft = st.residual(&trial);
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
                return Err(no_convergence(st, iterations, &f, trace));
            }
        }
        trace.push(norm);

        let layout = st.sys.layout;
        let states: Vec<State> = x.chunks(n).map(|c| layout.unpack(c)).collect();
        let last = states.last().expect("horizon >= 2");
        let (worst, gap) = terminal_gap(last, &problem.terminal);
        if !(gap <= TERMINAL_GAP_TOL) {
            return Err(Error::HorizonTooShort {
                variable: worst.name(),
                gap,
            });
        }
        let tail_start = problem.horizon - problem.horizon.div_ceil(10);
        for s in &states[tail_start..] {
            let (worst, gap) = terminal_gap(s, &problem.terminal);
            if !(gap <= TAIL_GAP_TOL) {
                return Err(Error::HorizonTooShort {
                    variable: worst.name(),
                    gap,
                });
            }
        }
        Ok(TransitionPath {
            spec: problem.spec,
            vintage: problem.vintage,
            states,
            terminal: problem.terminal,
            stats: SolveStats {
                iterations,
                residual: norm,
                trace,
            },
            terminal_gap: gap,
        })
    })
}

/// Gap scaled by the terminal magnitude (floored at 0.01 so that variables
/// whose terminal value is zero are measured in levels).
pub fn scaled_gap(a: f64, terminal: f64) -> f64 {
    (a - terminal).abs() / terminal.abs().max(1e-2)
}

fn terminal_gap(last: &State, terminal: &State) -> (Var, f64) {
    ALL_VARS
        .iter()
        .map(|&v| (v, scaled_gap(last[v], terminal[v])))
        .fold((Var::C, 0.0), |acc, e| if e.1 > acc.1 { e } else { acc })
}

fn no_convergence(st: &Stacked<'_>, iterations: usize, f: &[f64], trace: Vec<f64>) -> Error {
    let n = st.n();
    let (k, r) = f
        .iter()
        .enumerate()
        .fold((0, 0.0f64), |acc, (k, v)| if v.abs() > acc.1 { (k, v.abs()) } else { acc });
    Error::NoConvergence {
        iterations,
        residual: r,
        worst_equation: st.sys.layout.vars()[k % n].equation(),
        worst_period: Some(k / n),
        trace,
    }
}

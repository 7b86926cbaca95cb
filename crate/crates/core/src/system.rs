//! Compact (layout-ordered) evaluation of one period's conditions and their
//! exact Jacobian blocks via dual numbers.

use alloc::vec::Vec;

use crate::ad::{Dual, Real};
use crate::linalg::Mat;
use crate::model::{implied_next, residuals, InitialStocks, Lag, Layout, ModelSpec, Var, VintagePolicy, NVARS};

#[derive(Clone, Copy)]
pub(crate) enum LagRef<'a> {
    State(&'a [f64]),
    Initial(&'a InitialStocks),
}

/// The period after the one being evaluated: either a free state or, at the
/// end of the horizon, the terminal steady state reached from the current stocks.
#[derive(Clone, Copy)]
pub(crate) enum Lead<'a> {
    State(&'a [f64]),
    Terminal(&'a [f64; NVARS]),
}

/// Which neighbour a Jacobian block differentiates against.
#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Pos {
    Prev,
    Now,
    Next,
}

pub(crate) struct PeriodSystem<'a> {
    pub spec: &'a ModelSpec,
    pub vintage: &'a VintagePolicy,
    pub layout: &'a Layout,
}

impl PeriodSystem<'_> {
    pub fn n(&self) -> usize {
        self.layout.len()
    }

    fn full<R: Real>(&self, x: &[f64], seed: Option<usize>) -> [R; NVARS] {
        let mut out = [R::cst(0.0); NVARS];
        if self.layout.single_sector() {
            out[Var::P.index()] = R::cst(1.0);
        }
        for (k, v) in self.layout.vars().iter().enumerate() {
            out[v.index()] = R::cst(x[k]);
        }
        if let Some(k) = seed {
            let v = self.layout.vars()[k];
            out[v.index()] = R::seeded(x[k]);
        }
        out
    }

    fn compact<R: Real>(&self, full: &[R; NVARS]) -> Vec<R> {
        self.layout.vars().iter().map(|v| full[v.index()]).collect()
    }

    fn eval<R: Real>(&self, t: usize, lag: LagRef<'_>, now: &[f64], lead: Lead<'_>, seed: Option<(Pos, usize)>) -> Vec<R> {
        let at = |p: Pos| seed.filter(|s| s.0 == p).map(|s| s.1);
        let single = self.layout.single_sector();
        let x = self.full::<R>(now, at(Pos::Now));
        let xn = match lead {
            Lead::State(next) => self.full::<R>(next, at(Pos::Next)),
            Lead::Terminal(term) => implied_next(self.spec, self.vintage, single, t, &x, term),
        };
        let r = match lag {
            LagRef::State(p) => {
                let xp = self.full::<R>(p, at(Pos::Prev));
                residuals(self.spec, self.vintage, single, t, Lag::State(&xp), &x, &xn)
            }
            LagRef::Initial(s) => residuals(self.spec, self.vintage, single, t, Lag::Initial(s), &x, &xn),
        };
        self.compact(&r)
    }

    pub fn residual(&self, t: usize, lag: LagRef<'_>, now: &[f64], lead: Lead<'_>) -> Vec<f64> {
        self.eval(t, lag, now, lead, None)
    }

    /// Derivative of period `t`'s residuals with respect to one neighbour.
    pub fn block(&self, t: usize, lag: LagRef<'_>, now: &[f64], lead: Lead<'_>, pos: Pos) -> Mat {
        let n = self.n();
        let mut m = Mat::zeros(n);
        for j in 0..n {
            let r = self.eval::<Dual>(t, lag, now, lead, Some((pos, j)));
            for (i, ri) in r.into_iter().enumerate() {
                m[(i, j)] = ri.eps;
            }
        }
        m
    }

    /// Jacobian of `x -> residual(x, x, x)`.
    pub fn steady_jacobian(&self, t: usize, x: &[f64]) -> Mat {
        let n = self.n();
        let mut m = Mat::zeros(n);
        for j in 0..n {
            let xd = self.full::<Dual>(x, Some(j));
            let r = residuals(self.spec, self.vintage, self.layout.single_sector(), t, Lag::State(&xd), &xd, &xd);
            for (i, ri) in self.compact(&r).into_iter().enumerate() {
                m[(i, j)] = ri.eps;
            }
        }
        m
    }

    /// Index of the first variable that must be positive but is not.
    pub fn first_nonpositive(&self, x: &[f64]) -> Option<Var> {
        self.layout
            .vars()
            .iter()
            .zip(x)
            .find(|(v, val)| v.must_be_positive() && !(**val > 0.0))
            .map(|(v, _)| *v)
    }
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(x.abs()) })
}

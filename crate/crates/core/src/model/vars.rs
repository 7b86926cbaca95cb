use core::ops::{Index, IndexMut};

use alloc::vec::Vec;

/// Endogenous variables, one slot each per period. `_pt` names refer to the
/// pass-through sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    C,
    CPt,
    P,
    Mu,
    W,
    WPt,
    L,
    LPt,
    K,
    KPt,
    I,
    IPt,
    U,
    Y,
    YPt,
    Profit,
    ProfitPt,
    Div,
    DivPt,
    TaxBase,
    TaxCorp,
    TaxIndiv,
    TaxTotal,
    Transfer,
    Gov,
    LambdaB,
    LambdaA,
    KpiB,
    KpiA,
    Deduction,
}

pub const NVARS: usize = 30;

pub const ALL_VARS: [Var; NVARS] = [
    Var::C,
    Var::CPt,
    Var::P,
    Var::Mu,
    Var::W,
    Var::WPt,
    Var::L,
    Var::LPt,
    Var::K,
    Var::KPt,
    Var::I,
    Var::IPt,
    Var::U,
    Var::Y,
    Var::YPt,
    Var::Profit,
    Var::ProfitPt,
    Var::Div,
    Var::DivPt,
    Var::TaxBase,
    Var::TaxCorp,
    Var::TaxIndiv,
    Var::TaxTotal,
    Var::Transfer,
    Var::Gov,
    Var::LambdaB,
    Var::LambdaA,
    Var::KpiB,
    Var::KpiA,
    Var::Deduction,
];

impl Var {
    pub const fn index(self) -> usize {
        self as usize
    }

    /// Column name used in emitted files.
    pub const fn name(self) -> &'static str {
        match self {
            Var::C => "c",
            Var::CPt => "c_pt",
            Var::P => "p",
            Var::Mu => "mu",
            Var::W => "w",
            Var::WPt => "w_pt",
            Var::L => "l",
            Var::LPt => "l_pt",
            Var::K => "k",
            Var::KPt => "k_pt",
            Var::I => "i",
            Var::IPt => "i_pt",
            Var::U => "u",
            Var::Y => "y",
            Var::YPt => "y_pt",
            Var::Profit => "profit",
            Var::ProfitPt => "profit_pt",
            Var::Div => "div",
            Var::DivPt => "div_pt",
            Var::TaxBase => "tax_base",
            Var::TaxCorp => "tax_corp",
            Var::TaxIndiv => "tax_indiv",
            Var::TaxTotal => "tax_total",
            Var::Transfer => "transfer",
            Var::Gov => "gov",
            Var::LambdaB => "lambda_b",
            Var::LambdaA => "lambda_a",
            Var::KpiB => "kpi_b",
            Var::KpiA => "kpi_a",
            Var::Deduction => "deduction",
        }
    }

    /// The equation paired with this variable in the square system.
    pub const fn equation(self) -> &'static str {
        match self {
            Var::C => "marginal utility definition",
            Var::CPt => "intratemporal condition",
            Var::P => "pass-through capital Euler",
            Var::Mu => "c-corp capital Euler",
            Var::W => "c-corp wage",
            Var::WPt => "pass-through wage",
            Var::L => "labor supply",
            Var::LPt => "labor allocation",
            Var::K => "c-corp capital law of motion",
            Var::KPt => "pass-through capital law of motion",
            Var::I => "c-corp goods market",
            Var::IPt => "pass-through goods market",
            Var::U => "utilization condition",
            Var::Y => "c-corp technology",
            Var::YPt => "pass-through technology",
            Var::Profit => "c-corp cash flow",
            Var::ProfitPt => "pass-through cash flow",
            Var::Div => "dividend",
            Var::DivPt => "pass-through income",
            Var::TaxBase => "corporate tax base",
            Var::TaxCorp => "corporate tax bill",
            Var::TaxIndiv => "individual tax bill",
            Var::TaxTotal => "total revenue",
            Var::Transfer => "transfer",
            Var::Gov => "wasteful spending",
            Var::LambdaB => "pre-reform schedule PDV recursion",
            Var::LambdaA => "post-reform schedule PDV recursion",
            Var::KpiB => "pre-reform undeducted stock",
            Var::KpiA => "post-reform undeducted stock",
            Var::Deduction => "investment deduction",
        }
    }

    pub const fn is_pass_through(self) -> bool {
        matches!(
            self,
            Var::CPt
                | Var::P
                | Var::WPt
                | Var::LPt
                | Var::KPt
                | Var::IPt
                | Var::YPt
                | Var::ProfitPt
                | Var::DivPt
        )
    }

    /// Enters a log, a fractional power or a denominator.
    pub const fn must_be_positive(self) -> bool {
        matches!(
            self,
            Var::C
                | Var::CPt
                | Var::P
                | Var::Mu
                | Var::L
                | Var::LPt
                | Var::K
                | Var::KPt
                | Var::U
                | Var::Y
                | Var::YPt
        )
    }
}

/// All endogenous variables for one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State(pub [f64; NVARS]);

impl Default for State {
    fn default() -> Self {
        State([0.0; NVARS])
    }
}

impl Index<Var> for State {
    type Output = f64;
    fn index(&self, v: Var) -> &f64 {
        &self.0[v.index()]
    }
}

impl IndexMut<Var> for State {
    fn index_mut(&mut self, v: Var) -> &mut f64 {
        &mut self.0[v.index()]
    }
}

impl State {
    /// Total undeducted investment across both vintages.
    pub fn kpi(&self) -> f64 {
        self[Var::KpiB] + self[Var::KpiA]
    }
}

/// Which variables are unknowns. The single-sector restriction drops the
/// pass-through block and its relative price.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    single_sector: bool,
    vars: Vec<Var>,
    slot: [Option<usize>; NVARS],
}

impl Layout {
    pub fn new(single_sector: bool) -> Self {
        let vars: Vec<Var> = ALL_VARS
            .iter()
            .copied()
            .filter(|v| !(single_sector && v.is_pass_through()))
            .collect();
        let mut slot = [None; NVARS];
        for (k, v) in vars.iter().enumerate() {
            slot[v.index()] = Some(k);
        }
        Layout {
            single_sector,
            vars,
            slot,
        }
    }

    pub fn single_sector(&self) -> bool {
        self.single_sector
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn slot(&self, v: Var) -> Option<usize> {
        self.slot[v.index()]
    }

    pub fn pack(&self, s: &State) -> Vec<f64> {
        self.vars.iter().map(|&v| s[v]).collect()
    }

    /// Absent variables are zero, except the relative price which is one.
    pub fn unpack(&self, x: &[f64]) -> State {
        let mut s = State::default();
        if self.single_sector {
            s[Var::P] = 1.0;
        }
        for (v, val) in self.vars.iter().zip(x) {
            s[*v] = *val;
        }
        s
    }
}

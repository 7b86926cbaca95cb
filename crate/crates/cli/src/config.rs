//! Run configuration.
//!
//! A config is a TOML document with a strict schema. Unknown keys, wrong
//! types and out-of-range values are all reported together; each violation
//! names the key, what was expected and what was found.
//!
//! ```toml
//! scenario = "tcja17"        # required: a registry name or "custom"
//! out = "results/tcja17"     # output directory
//! horizon = 300              # transition periods (>= 2)
//! cumulative_years = 20      # window for long-run changes and multipliers
//!
//! [solver]
//! tol = 1e-9                 # transition residual max-norm (> 0)
//!
//! [emit]
//! path = true                # path.csv
//! summary = true             # summary.csv
//! distortion_grid = false    # distortion_grid.csv next to the results
//!
//! [economy]                  # overrides of the pre-reform economy
//! base = "extended-2017"     # "custom" only: extended-2017, extended-1961, baseline-2017
//! beta = 0.94
//! sigma = 1.0
//! alpha_c = 0.35
//! alpha_p = 0.35
//! delta_c = 0.10
//! delta_p = 0.10
//! eta = 0.55                 # CES weight, or Cobb-Douglas share for the baseline bundle
//! epsilon = 0.33             # CES bundles only
//! phi = 4.0                  # elastic labor only
//! labor_ccorp = 0.575        # fixed labor only
//! delta2 = 0.10              # variable utilization only
//! share_target = 0.60        # calibrate eta to this c-corp receipts share instead
//! tau_corp = 0.35
//! rate_dbal = 0.4823         # declining-balance tax depreciation rate
//! tau_indiv = 0.135
//! theta_waste = 0.0
//!
//! [reform]                   # post-reform policy; required for "custom", not allowed for "null"
//! tau_corp = 0.21
//! rate_dbal = 0.8305
//! tau_indiv = 0.135
//! theta_waste = 0.0
//! new_investment_only = true
//!
//! [decomposition]            # "fig9-decomposition" only
//! rate_cut = "percentage-points"   # or "relative"
//! cut = 0.10
//!
//! [grid]                     # distortion grid axes
//! tau_lo = 0.0
//! tau_hi = 0.6
//! tau_points = 61
//! lambda_lo = 0.0
//! lambda_hi = 1.0
//! lambda_points = 51
//! alpha = 0.35
//! ```
//!
//! Integers are accepted wherever a number is expected.

use std::fmt;

use toml::{Table, Value};

use crate::registry::{ECONOMY_BASES, SCENARIOS};

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub key: String,
    pub expected: String,
    /// `None` when the key is missing.
    pub got: Option<String>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.got {
            Some(got) => write!(f, "`{}`: expected {}, got {}", self.key, self.expected, got),
            None => write!(f, "`{}`: required key missing; expected {}", self.key, self.expected),
        }
    }
}

/// Every schema violation found in one config.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub Vec<Violation>);

impl ConfigError {
    pub fn single(key: &str, expected: impl Into<String>, got: Option<String>) -> Self {
        ConfigError(vec![Violation {
            key: key.into(),
            expected: expected.into(),
            got,
        }])
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration ({} problem(s))", self.0.len())?;
        for v in &self.0 {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// Admissible values of one field.
#[derive(Debug, Clone, Copy)]
enum Check {
    Any,
    /// Interval with inclusive flags.
    Range(f64, bool, f64, bool),
    Positive,
    AtLeast(usize),
    OneOf(&'static [&'static str]),
    /// `x < 1` and `x != 0`.
    CesExponent,
}

const OPEN_UNIT: Check = Check::Range(0.0, false, 1.0, false);
const RATE: Check = Check::Range(0.0, true, 1.0, false);
const DEPRECIATION: Check = Check::Range(0.0, false, 1.0, true);
const SHARE: Check = Check::Range(0.0, true, 1.0, true);

impl Check {
    fn describe(self, ty: &str) -> String {
        match self {
            Check::Any => ty.into(),
            Check::Range(lo, li, hi, hi_inc) => format!(
                "{ty} in {}{lo}, {hi}{}",
                if li { "[" } else { "(" },
                if hi_inc { "]" } else { ")" }
            ),
            Check::Positive => format!("{ty} > 0"),
            Check::AtLeast(n) => format!("{ty} >= {n}"),
            Check::OneOf(opts) => format!("{ty}, one of {}", opts.join(", ")),
            Check::CesExponent => format!("{ty} < 1 and != 0"),
        }
    }
}

/// A value type that can appear in a config.
trait Field: Sized + Clone {
    const TYPE: &'static str;
    fn read(v: &Value) -> Option<Self>;
    fn satisfies(&self, c: Check) -> bool;
    fn to_value(&self) -> Value;
}

impl Field for f64 {
    const TYPE: &'static str = "a number";
    fn read(v: &Value) -> Option<f64> {
        match v {
            Value::Float(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => None,
        }
    }
    fn satisfies(&self, c: Check) -> bool {
        let x = *self;
        if !x.is_finite() {
            return false;
        }
        match c {
            Check::Range(lo, li, hi, hi_inc) => {
                (if li { x >= lo } else { x > lo }) && (if hi_inc { x <= hi } else { x < hi })
            }
            Check::Positive => x > 0.0,
            Check::CesExponent => x < 1.0 && x != 0.0,
            _ => true,
        }
    }
    fn to_value(&self) -> Value {
        Value::Float(*self)
    }
}

impl Field for usize {
    const TYPE: &'static str = "an integer";
    fn read(v: &Value) -> Option<usize> {
        match v {
            Value::Integer(i) => usize::try_from(*i).ok(),
            _ => None,
        }
    }
    fn satisfies(&self, c: Check) -> bool {
        match c {
            Check::AtLeast(n) => *self >= n,
            _ => true,
        }
    }
    fn to_value(&self) -> Value {
        Value::Integer(*self as i64)
    }
}

impl Field for bool {
    const TYPE: &'static str = "a boolean";
    fn read(v: &Value) -> Option<bool> {
        v.as_bool()
    }
    fn satisfies(&self, _: Check) -> bool {
        true
    }
    fn to_value(&self) -> Value {
        Value::Boolean(*self)
    }
}

impl Field for String {
    const TYPE: &'static str = "a string";
    fn read(v: &Value) -> Option<String> {
        v.as_str().map(Into::into)
    }
    fn satisfies(&self, c: Check) -> bool {
        match c {
            Check::OneOf(opts) => opts.contains(&self.as_str()),
            _ => true,
        }
    }
    fn to_value(&self) -> Value {
        Value::String(self.clone())
    }
}

struct Reader {
    violations: Vec<Violation>,
}

impl Reader {
    fn push(&mut self, key: String, expected: String, got: Option<String>) {
        self.violations.push(Violation { key, expected, got });
    }

    fn field<T: Field>(&mut self, table: &Table, prefix: &str, name: &str, check: Check) -> Option<T> {
        let v = table.get(name)?;
        let key = qualified(prefix, name);
        match T::read(v) {
            Some(x) if x.satisfies(check) => Some(x),
            _ => {
                self.push(key, check.describe(T::TYPE), Some(v.to_string()));
                None
            }
        }
    }

    fn unknown_keys(&mut self, table: &Table, prefix: &str, known: &[&str]) {
        for (k, v) in table {
            if !known.contains(&k.as_str()) {
                self.push(
                    qualified(prefix, k),
                    format!("no such key; allowed: {}", known.join(", ")),
                    Some(v.to_string()),
                );
            }
        }
    }

    /// A sub-table; `None` when absent or not a table.
    fn section<'a>(&mut self, root: &'a Table, name: &str) -> Option<&'a Table> {
        match root.get(name)? {
            Value::Table(t) => Some(t),
            other => {
                self.push(name.into(), "a table".into(), Some(other.to_string()));
                None
            }
        }
    }
}

fn qualified(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.into()
    } else {
        format!("{prefix}.{name}")
    }
}

/// Declares a config section: a struct of optional fields plus its reader
/// and writer.
macro_rules! section {
    ($(#[$m:meta])* $name:ident, $key:literal { $($field:ident : $ty:ty = $check:expr),* $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Default, PartialEq)]
        pub struct $name {
            $(pub $field: Option<$ty>,)*
        }

        impl $name {
            pub const KEYS: &'static [&'static str] = &[$(stringify!($field)),*];

            fn read(r: &mut Reader, table: &Table) -> Self {
                r.unknown_keys(table, $key, Self::KEYS);
                $name {
                    $($field: r.field::<$ty>(table, $key, stringify!($field), $check),)*
                }
            }

            fn write(&self, out: &mut Table) {
                $(if let Some(x) = &self.$field {
                    out.insert(stringify!($field).into(), Field::to_value(x));
                })*
            }

            pub fn is_empty(&self) -> bool {
                true $(&& self.$field.is_none())*
            }
        }
    };
}

section!(SolverConfig, "solver" {
    tol: f64 = Check::Positive,
});

section!(EmitConfig, "emit" {
    path: bool = Check::Any,
    summary: bool = Check::Any,
    distortion_grid: bool = Check::Any,
});

section!(
    /// Overrides applied to the scenario's pre-reform economy.
    EconomyConfig, "economy" {
    base: String = Check::OneOf(ECONOMY_BASES),
    beta: f64 = OPEN_UNIT,
    sigma: f64 = Check::Positive,
    alpha_c: f64 = OPEN_UNIT,
    alpha_p: f64 = OPEN_UNIT,
    delta_c: f64 = DEPRECIATION,
    delta_p: f64 = DEPRECIATION,
    eta: f64 = OPEN_UNIT,
    epsilon: f64 = Check::CesExponent,
    phi: f64 = Check::Positive,
    labor_ccorp: f64 = OPEN_UNIT,
    delta2: f64 = Check::Positive,
    share_target: f64 = OPEN_UNIT,
    tau_corp: f64 = RATE,
    rate_dbal: f64 = DEPRECIATION,
    tau_indiv: f64 = RATE,
    theta_waste: f64 = SHARE,
});

section!(
    /// Overrides applied to the post-reform policy.
    ReformConfig, "reform" {
    tau_corp: f64 = RATE,
    rate_dbal: f64 = DEPRECIATION,
    tau_indiv: f64 = RATE,
    theta_waste: f64 = SHARE,
    new_investment_only: bool = Check::Any,
});

section!(DecompositionConfig, "decomposition" {
    rate_cut: String = Check::OneOf(RATE_CUT_MODES),
    cut: f64 = OPEN_UNIT,
});

section!(GridConfig, "grid" {
    tau_lo: f64 = RATE,
    tau_hi: f64 = OPEN_UNIT,
    tau_points: usize = Check::AtLeast(2),
    lambda_lo: f64 = SHARE,
    lambda_hi: f64 = DEPRECIATION,
    lambda_points: usize = Check::AtLeast(2),
    alpha: f64 = OPEN_UNIT,
});

pub const RATE_CUT_MODES: &[&str] = &["percentage-points", "relative"];

const TOP_KEYS: &[&str] = &[
    "scenario",
    "out",
    "horizon",
    "cumulative_years",
    "solver",
    "emit",
    "economy",
    "reform",
    "decomposition",
    "grid",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    pub out: Option<String>,
    pub horizon: Option<usize>,
    pub cumulative_years: Option<usize>,
    pub solver: SolverConfig,
    pub emit: EmitConfig,
    pub economy: EconomyConfig,
    pub reform: ReformConfig,
    pub decomposition: DecompositionConfig,
    pub grid: GridConfig,
}

impl RunConfig {
    /// A config naming only a scenario.
    pub fn for_scenario(name: &str) -> Self {
        RunConfig {
            scenario: name.into(),
            ..Default::default()
        }
    }

    pub fn emit_path(&self) -> bool {
        self.emit.path.unwrap_or(true)
    }

    pub fn emit_summary(&self) -> bool {
        self.emit.summary.unwrap_or(true)
    }

    pub fn emit_distortion_grid(&self) -> bool {
        self.emit.distortion_grid.unwrap_or(false)
    }

    /// Checks that depend on more than one key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut v = Vec::new();
        let mut bad = |key: &str, expected: &str, got: Option<String>| {
            v.push(Violation {
                key: key.into(),
                expected: expected.into(),
                got,
            })
        };
        let s = self.scenario.as_str();
        if !SCENARIOS.contains(&s) {
            bad("scenario", &Check::OneOf(SCENARIOS).describe(String::TYPE), Some(format!("{s:?}")));
        }
        let reform_scenario = !matches!(s, "fig9-decomposition" | "fig10-grid");
        if !reform_scenario && !self.economy.is_empty() {
            bad("economy", &format!("no [economy] section with scenario {s:?}"), Some("a table".into()));
        }
        if !reform_scenario && !self.reform.is_empty() {
            bad("reform", &format!("no [reform] section with scenario {s:?}"), Some("a table".into()));
        }
        if s == "null" && !self.reform.is_empty() {
            bad("reform", "no [reform] section with the null scenario", Some("a table".into()));
        }
        if s == "custom" && self.reform.is_empty() {
            bad("reform", "a [reform] section changing at least one key with scenario \"custom\"", None);
        }
        if s != "fig9-decomposition" && !self.decomposition.is_empty() {
            bad(
                "decomposition",
                "no [decomposition] section unless scenario = \"fig9-decomposition\"",
                Some("a table".into()),
            );
        }
        if let Some(base) = &self.economy.base {
            if s != "custom" {
                bad("economy.base", "no base economy unless scenario = \"custom\"", Some(format!("{base:?}")));
            }
        }
        if let (Some(_), Some(t)) = (self.economy.eta, self.economy.share_target) {
            bad("economy.share_target", "either eta or share_target, not both", Some(t.to_string()));
        }
        if let (Some(h), Some(c)) = (self.horizon, self.cumulative_years) {
            if c > h {
                bad("cumulative_years", &format!("an integer <= horizon ({h})"), Some(c.to_string()));
            }
        }
        let g = &self.grid;
        if let (Some(lo), Some(hi)) = (g.tau_lo, g.tau_hi) {
            if lo >= hi {
                bad("grid.tau_hi", &format!("a number > grid.tau_lo ({lo})"), Some(hi.to_string()));
            }
        }
        if let (Some(lo), Some(hi)) = (g.lambda_lo, g.lambda_hi) {
            if lo >= hi {
                bad("grid.lambda_hi", &format!("a number > grid.lambda_lo ({lo})"), Some(hi.to_string()));
            }
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError(v))
        }
    }

    /// TOML text that parses back to `self`.
    pub fn to_toml(&self) -> String {
        let mut root = Table::new();
        root.insert("scenario".into(), Value::String(self.scenario.clone()));
        if let Some(out) = &self.out {
            root.insert("out".into(), Value::String(out.clone()));
        }
        if let Some(h) = self.horizon {
            root.insert("horizon".into(), h.to_value());
        }
        if let Some(c) = self.cumulative_years {
            root.insert("cumulative_years".into(), c.to_value());
        }
        let mut put = |name: &str, write: &dyn Fn(&mut Table)| {
            let mut t = Table::new();
            write(&mut t);
            if !t.is_empty() {
                root.insert(name.into(), Value::Table(t));
            }
        };
        put("solver", &|t| self.solver.write(t));
        put("emit", &|t| self.emit.write(t));
        put("economy", &|t| self.economy.write(t));
        put("reform", &|t| self.reform.write(t));
        put("decomposition", &|t| self.decomposition.write(t));
        put("grid", &|t| self.grid.write(t));
        toml::to_string(&root).expect("a table of plain values always serialises")
    }
}

/// Parses and validates a config, reporting every violation found.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::single("<document>", "valid TOML", Some(e.message().into())))?;
    let mut r = Reader { violations: Vec::new() };
    r.unknown_keys(&root, "", TOP_KEYS);

    let scenario = match root.get("scenario") {
        None => {
            r.push("scenario".into(), Check::OneOf(SCENARIOS).describe(String::TYPE), None);
            None
        }
        Some(_) => r.field::<String>(&root, "", "scenario", Check::Any),
    };
    let mut section = |name: &str| r.section(&root, name).cloned().unwrap_or_default();
    let (solver, emit, economy, reform, decomposition, grid) = (
        section("solver"),
        section("emit"),
        section("economy"),
        section("reform"),
        section("decomposition"),
        section("grid"),
    );
    let cfg = RunConfig {
        scenario: scenario.clone().unwrap_or_default(),
        out: r.field(&root, "", "out", Check::Any),
        horizon: r.field(&root, "", "horizon", Check::AtLeast(2)),
        cumulative_years: r.field(&root, "", "cumulative_years", Check::AtLeast(1)),
        solver: SolverConfig::read(&mut r, &solver),
        emit: EmitConfig::read(&mut r, &emit),
        economy: EconomyConfig::read(&mut r, &economy),
        reform: ReformConfig::read(&mut r, &reform),
        decomposition: DecompositionConfig::read(&mut r, &decomposition),
        grid: GridConfig::read(&mut r, &grid),
    };
    let mut violations = r.violations;
    if scenario.is_some() {
        if let Err(ConfigError(more)) = cfg.validate() {
            violations.extend(more);
        }
    }
    if violations.is_empty() {
        Ok(cfg)
    } else {
        Err(ConfigError(violations))
    }
}

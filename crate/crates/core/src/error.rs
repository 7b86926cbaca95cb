use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter fell outside its admissible range.
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    /// A quantity that enters a log or fractional power was not strictly positive.
    NonPositive {
        variable: &'static str,
        period: Option<usize>,
        value: f64,
    },
    /// Newton iteration stopped without reaching tolerance.
    NoConvergence {
        iterations: usize,
        residual: f64,
        worst_equation: &'static str,
        worst_period: Option<usize>,
        trace: Vec<f64>,
    },
    SingularMatrix {
        block: usize,
    },
    /// The final period of a transition is not close enough to the terminal steady state.
    HorizonTooShort {
        variable: &'static str,
        gap: f64,
    },
    Bracketing {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    Restriction(&'static str),
    Scenario {
        name: String,
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, value: f64, expected: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            expected,
        }
    }

    pub(crate) fn in_scenario(self, name: &str) -> Self {
        Error::Scenario {
            name: name.into(),
            source: Box::new(self),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                expected,
            } => write!(f, "parameter `{name}` = {value} is invalid: expected {expected}"),
            Error::NonPositive {
                variable,
                period,
                value,
            } => match period {
                Some(t) => write!(f, "`{variable}` must be positive, got {value} in period {t}"),
                None => write!(f, "`{variable}` must be positive, got {value}"),
            },
            Error::NoConvergence {
                iterations,
                residual,
                worst_equation,
                worst_period,
                trace,
            } => {
                write!(
                    f,
                    "Newton did not converge after {iterations} iterations: residual {residual:.3e}, worst equation `{worst_equation}`"
                )?;
                if let Some(t) = worst_period {
                    write!(f, " in period {t}")?;
                }
                if !trace.is_empty() {
                    write!(f, "; residual trace:")?;
                    for r in trace {
                        write!(f, " {r:.2e}")?;
                    }
                }
                Ok(())
            }
            Error::SingularMatrix { block } => write!(f, "singular Jacobian block {block}"),
            Error::HorizonTooShort { variable, gap } => write!(
                f,
                "horizon too short: `{variable}` is {gap:.3e} away from its terminal value in the last period"
            ),
            Error::Bracketing { lo, hi, f_lo, f_hi } => write!(
                f,
                "root not bracketed on [{lo}, {hi}]: f(lo) = {f_lo:.4e}, f(hi) = {f_hi:.4e}"
            ),
            Error::Restriction(msg) => write!(f, "model restriction not satisfied: {msg}"),
            Error::Scenario { name, source } => write!(f, "scenario `{name}`: {source}"),
        }
    }
}

impl core::error::Error for Error {}

//! Two-sector general-equilibrium engine for corporate tax policy:
//! c-corporations and pass-through businesses, declining-balance tax
//! depreciation, steady states and perfect-foresight transitions.
//!
//! The crate is `no_std` and needs only `alloc`. File formats and the
//! command-line driver live in the `corptax` crate.
#![no_std]

extern crate alloc;

pub mod ad;
pub mod calibration;
pub mod error;
pub mod linalg;
pub mod model;
pub mod newton;
pub mod scenarios;
pub mod steady;
mod system;
pub mod taxcode;
pub mod transition;

pub use error::{Error, Result};
pub use newton::{NewtonOptions, SolveStats};

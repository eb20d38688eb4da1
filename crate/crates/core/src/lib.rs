//! One-sided real arithmetic over the rationals, absolute values on the
//! integers and rationals, and the correspondence between absolute values
//! on Z and pairs (prime ideal, upper-real exponent).

pub mod absval;
pub mod error;
pub mod exact_arith;
pub mod onesided;
pub mod ostrowski;
pub mod spectra;
pub mod suites;
mod wire;

pub use error::{Error, Result};

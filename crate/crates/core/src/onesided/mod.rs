//! Upper, lower and Dedekind reals over the exact rationals.
//!
//! Every real is a memoized, stage-indexed stream of rational bounds; the
//! stage is a precision budget. Operations are monotone (upper reals can be
//! added, multiplied when non-negative, and have arbitrary infima, but cannot
//! be subtracted or divided).

mod dedekind;
mod exp_log;
mod stream;
mod upper;

pub use dedekind::{ded_div, ded_mul, DedekindReal, LowerReal};
pub use exp_log::{approx_f64, ded_log, ded_pow_rat, ded_powq, upper_exp, upper_log};
pub use upper::{
    upper_add, upper_from_rational, upper_inf, upper_inf_scheduled, upper_max, upper_min,
    upper_mul, BoundEntry, UpperReal,
};

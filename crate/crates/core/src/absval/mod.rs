//! Absolute values on Z: standard closed forms, evaluation, and
//! budget-bounded checks of the axioms and of the subclass predicates.

mod checks;
mod closed_form;
mod value;

pub use checks::{
    check_axioms, check_subtractive, check_ultrametric, detect_na, CheckReport, NaDetection,
    Verdict, Window,
};
pub use closed_form::{prime_power, ClosedForm, Exponent};
pub use value::{av_eval, dedekindize, extend_to_q, make_standard, AbsValue};

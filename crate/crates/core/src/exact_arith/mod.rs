//! Exact integer/rational arithmetic and number-theoretic primitives.

mod ext;
mod number_theory;
mod power;

pub use ext::{parse_rational, ExtRational};
pub use number_theory::{
    factorize, gcd_bezout, is_prime, least_prime_factor, ord_p, primes_upto, Factorization,
};
pub(crate) use number_theory::ord_unchecked;
pub(crate) use power::log2_approx;
pub use power::{
    ceil_to_grid, exact_pow, floor_to_grid, log_lower, log_upper, pow_cmp, pow_interval,
    pow_lower, pow_upper, two_pow,
};

pub use num_bigint::BigInt;
pub use num_rational::BigRational as Rational;

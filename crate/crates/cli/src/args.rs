use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ostrowski", version, about = "Absolute values on Z and Q, computed with one-sided exact reals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Approximation stage: bounds are read at precision about 2^-stage
    #[arg(long, global = true, default_value_t = 20)]
    pub stage: u32,

    /// Search budget for witnesses and primes
    #[arg(long, global = true, default_value_t = 100)]
    pub budget: u64,

    /// Seed for sampled checks
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Trivial,
    Euclid,
    Padic,
    Pchar,
    Power,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InnerArg {
    Euclid,
    Padic,
}

#[derive(Debug, Args)]
pub struct KindArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,

    /// Prime for padic, pchar and power-of-padic kinds
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<String>,

    /// Exponent for the power kind: a rational a/b or -inf
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,

    #[arg(long, value_enum)]
    pub inner: Option<InnerArg>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Upper bound of |n| at the stage
    Eval {
        #[command(flatten)]
        kind: KindArgs,
        /// Integer to evaluate at
        #[arg(long, allow_hyphen_values = true)]
        n: String,
    },
    /// Prime ideal and exponent of an absolute value on Z
    Classify {
        #[command(flatten)]
        kind: KindArgs,
    },
    /// Absolute value built from an ideal and an exponent
    Reconstruct {
        /// 0 or a prime p
        #[arg(long)]
        ideal: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        /// Integers to evaluate at (default 0..=10)
        #[arg(long, allow_hyphen_values = true, num_args = 1..)]
        n: Vec<String>,
    },
    /// Classify, reconstruct and compare on a window
    Roundtrip {
        #[command(flatten)]
        kind: KindArgs,
        /// Half-width of the window [-w, w]
        #[arg(long, default_value_t = 50)]
        window: u32,
    },
    /// Place of Q an absolute value with a closed form belongs to
    ClassifyQ {
        #[command(flatten)]
        kind: KindArgs,
    },
    /// Prime factorization
    Factor {
        #[arg(long, allow_hyphen_values = true)]
        n: String,
    },
    /// Exponent of the prime p in n
    Ord {
        #[arg(long)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        n: String,
    },
    /// Generator of the prime ideal containing the given integers
    ExtractPrime {
        #[arg(required = true, allow_hyphen_values = true)]
        elements: Vec<String>,
    },
    /// Run a named property suite
    Suite {
        #[arg(value_enum)]
        name: SuiteArg,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Axioms,
    Ultrametric,
    Subtractive,
    Roundtrip,
    Fundamental,
    Exponents,
}

pub fn usage() -> String {
    Cli::command().render_usage().to_string()
}

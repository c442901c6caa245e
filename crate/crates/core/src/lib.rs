//! Exact distribution of distances between local maxima of i.i.d. continuous
//! sequences, and tooling to audit random streams against it.
//!
//! The law is distribution-free: `f_m(d) = 3 · 2^d · (d-1)(d+2) / (d+3)!` for
//! `d >= 2`, with mean exactly 3. [`operator`] derives it symbolically from
//! up/down operator words, [`oracle`] re-derives small cases by brute force,
//! and [`extrema`], [`rng`] and [`stats`] compare real streams with it.

pub mod error;
pub mod exact;
pub mod extrema;
pub mod operator;
pub mod oracle;
pub mod rng;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use exact::{
    format_exact, rat_normalize, rat_to_decimal, rat_to_double_string, rat_to_f64, BigRational,
    RationalPolynomial,
};
pub use extrema::{
    detect_extrema, distances, histogram_chunked, histogram_of, summarize, DistanceHistogram,
    ExtremumKind, SampleSummary, StreamAnalyzer, TiePolicy,
};
pub use operator::{
    cdf, eval_word, moments, p_max, pmf_closed_form, pmf_symbolic, pmf_table, words_for_distance,
    MomentSummary, OperatorWord, PmfEntry, Step,
};
pub use oracle::{count_pattern_perms, oracle_pmax, oracle_pmf};
pub use rng::{ingest_file, lcg48_next, randu_next, GeneratorFamily, GeneratorSpec, InputFormat};
pub use special::chi_square_sf;
pub use stats::{chi_square_gof, ks_test, mean_z_test, TestReport, Verdict};

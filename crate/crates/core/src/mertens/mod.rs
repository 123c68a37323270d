//! Mertens-type sums, products and constants, with the checks that tie them
//! to their asymptotic statements.

pub mod constants;
pub mod envelope;
pub mod gamma;
pub mod report;
pub mod sums;

pub use constants::{c_1, c_2, c_3, c_m, constants_report, i_integral, lemma3_lhs, ConstantsReport};
pub use envelope::{error_envelope, fit_residual_model, EnvelopeFamily, ErrorEnvelope, ResidualFit};
pub use gamma::euler_gamma;
pub use report::{zhang_report, Check, Tolerances, ZhangReport};
pub use sums::{lambda_partial_sum, prime_power_sum_exact, MertensTables, PartialSum, ProductValue};

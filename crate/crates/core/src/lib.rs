//! Additive arithmetical semigroups: exact counts, normalization, Mertens-type
//! constants, and Meissel-type series.

pub mod catalog;
pub mod error;
pub mod json;
pub mod meissel;
pub mod mertens;
pub mod normalization;
pub mod quadrature;
pub mod real;
pub mod semigroup;
pub mod seqio;

pub use catalog::{CountMode, Instance, InstanceCounts, Perturbation, SemigroupKind, SemigroupSpec};
pub use error::{Error, Result};
pub use normalization::{AMethod, AxiomAEstimate, NormalizedSemigroup, QEstimate};
pub use real::{format_real, to_f64, Bounded, Precision, Real};
pub use semigroup::{ElementCounts, GeneratorCounts};
pub use meissel::{AlphaScan, MeisselContext, MeisselEvaluation};
pub use mertens::{ConstantsReport, ErrorEnvelope, MertensTables, Tolerances, ZhangReport};

//! Convergence, complexity and memory studies for the `fastcaputo` schemes.
//!
//! The binary `fastcaputo` wraps these functions in a command-line front end.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod probe;
pub mod reference;
pub mod report;
pub mod study;

pub use error::{BenchError, Result};
pub use probe::{min_seconds, timing_and_memory_probe, Probe};
pub use reference::{
    cache_reference, compute_reference, load_reference, read_header, save_reference, Provenance,
    Reference, ReferenceKey,
};
pub use report::{rates, ConvergenceReport, ConvergenceRow};
pub use study::{
    compute_error, run_convergence_study, run_single, Example, ReferenceSpec, StudyConfig, Sweep,
};

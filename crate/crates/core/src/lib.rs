//! Finite-matrix workbench for photon spin and orbital angular momentum in
//! covariant (Lorenz-gauge) quantization.
//!
//! The electromagnetic field is represented on truncated, indefinite-metric
//! Fock spaces; every operator identity is checked as an exact sparse-matrix
//! statement on the subspace where truncation does not interfere.

// Index loops mirror the tensor notation; `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod algebra;
pub mod config;
pub mod constraints;
pub mod decomposition;
pub mod dirac;
pub mod error;
pub mod fields;
pub mod fock;
pub mod matrix;
pub mod mode_space;
pub mod operators;
pub mod report;
pub mod verify;

pub use num_complex::Complex64 as C64;

pub use error::{Error, Result};
pub use fock::{build_fock, channels_for, Channel, FockOptions, FockSpace, Ladder, QuadraticForm, StateVector, Term};
pub use matrix::OperatorMatrix;
pub use config::SuiteConfig;
pub use report::{render_report, CheckKind, CheckRecord, OutputFormat, VerificationReport};
pub use verify::run_suite;
pub use mode_space::{
    build_cartesian_modeset, build_shell_modeset, orbital_matrices, polarization_frame, spin_matrices,
    MetricSignature, ModeLabel, ModeSet, PolarizationFrame, WaveVector,
};

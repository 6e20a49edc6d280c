//! Numerical core for continuous-variable GHZ Bell tests.
//!
//! The crate builds N-mode Gaussian GHZ states as covariance matrices,
//! evaluates Wigner functions and displaced-parity correlations, expands
//! N-party Mermin-Klyshko combinations with exact dyadic coefficients,
//! evaluates the resulting Bell quantities with cancellation control, and
//! maximizes them over displacement settings. A truncated Fock-space
//! simulator provides an independent validation path for small systems.
//!
//! `no_std` + `alloc`; all floating-point math goes through [`math`].

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod bellval;
pub mod correlation;
pub mod dyadic;
pub mod error;
pub mod expansion;
pub mod fock;
pub mod gaussian;
pub mod highprec;
pub mod linalg;
pub mod math;
pub mod optimize;
pub mod point;

pub use bellval::{
    bell_asymptotic, bell_value_equal_settings, bell_value_general, bell_zero_squeezing,
    pi_by_class, BellValue, ClassTable,
};
pub use correlation::{pi_closed_form, pi_from_state, CorrelationValue};
pub use error::{Error, Result};
pub use expansion::{
    class_coefficients, mk_expand, BellTerm, ClassCoefficients, SettingsTable,
};
pub use fock::{
    displaced_parity_expectation, fock_beamsplitter_apply, fock_ghz_auto, fock_ghz_state,
    fock_squeezed_vacuum, fock_tensor, quadrature_covariance, TruncatedState,
    DEFAULT_FOCK_BUDGET_BYTES,
};
pub use gaussian::{
    beamsplitter, build_ghz_state, ghz_exponent_matrix, quadratic_form_of, squeeze_mode,
    vacuum_state, wigner_at, GaussianState, SqueezeAxis, SqueezingParameter, SymplecticOp,
};
pub use optimize::{
    maximize_asymptotic, maximize_over_displacement, optimize_phases, scan_surface,
    OptimizationResult,
};
pub use point::PhasePoint;

//! Height distribution of the continuum cascade model.
//!
//! The height `H(x)` of the continuum cascade tree on `[0, x]` has the
//! distribution `P_n(x) = P(H(x) <= n)`, generated by
//!
//! ```text
//! P_0(x) = exp(-x)
//! P_n(x) = exp(-x + ∫_0^x P_{n-1}(y) dy)
//! ```
//!
//! This crate iterates that recursion on a grid ([`recursion`]), measures the
//! traveling front it develops ([`front`]), cross-checks it against direct
//! Monte Carlo of the killed branching Poisson process and of the discrete
//! cascade random graph ([`sim`]), and probes the boundary-case branching
//! random walk behind the front asymptotics ([`brw`]).

pub mod brw;
pub mod error;
pub mod front;
pub mod quadrature;
pub mod recursion;
pub mod rng;
pub mod sim;
pub mod sum;

pub use error::{Error, ErrorKind, Result};
pub use front::{
    alpha_scan, front_constancy_probe, front_position, log_correction_fit, richardson_velocity,
    velocity_estimate, wave_shape_collapse, AlphaScanResult, FrontFit, FrontTrace,
};
pub use recursion::{
    closed_form_p1, init_p0, iterate_step, run_recursion, run_recursion_with, GridFunction,
    Quadrature, RecursionConfig, RecursionResult,
};

/// Formats a float with 17 significant digits, independent of locale.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

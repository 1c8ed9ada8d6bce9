//! Simulation and optimization library for links aided by stacked intelligent
//! metasurfaces (SIM).
//!
//! The crate is organised bottom-up:
//!
//! * [`config`] holds the [`LinkScenario`] and seed plumbing shared by everything else.
//! * [`geometry`] computes atom positions, every distance inside both stacks and the
//!   fixed transmission delay.
//! * [`channel`] builds the diffraction coefficient matrices, the correlated Rician
//!   fading channel, the end-to-end matrix `H = Y G X` and the achievable rate.
//! * [`snc`] implements the stochastic-network-calculus delay bounds, min-plus
//!   convolution and a FIFO queue simulator used to check the queueing bound.
//! * [`sdp`] solves the unit-diagonal semidefinite programs produced by the relaxation.
//! * [`optimizer`] runs block coordinate descent over metasurface layers plus the
//!   closed-form propagation-delay update, and a per-atom grid-search baseline.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod optimizer;
pub mod sdp;
pub mod seed;
pub mod snc;

pub use config::LinkScenario;
pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

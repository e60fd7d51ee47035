//! Simulation library for IRS-assisted secure uplinks and Gas-oriented
//! computation offloading to MEC servers.
//!
//! The crate is organised bottom-up:
//!
//! - [`channel`]: Rayleigh channel realizations and link budgets.
//! - [`manifold`]: Riemannian conjugate-gradient phase optimization on the
//!   complex circle manifold.
//! - [`special`] and [`quadrature`]: numerical kernels (log-gamma, incomplete
//!   gamma, adaptive Gauss–Kronrod).
//! - [`secrecy`]: Gamma fit of the wiretap gain, ergodic and effective
//!   secrecy rates, adaptive coding-rate selection.
//! - [`allocation`]: energy model, Gas ranking, masked cost matrices,
//!   Kuhn–Munkres matching and the baseline schemes.
//! - [`ledger`]: hash-chained record of task/result contracts.
//! - [`harness`]: seeded Monte Carlo experiments emitting CSV tables.

pub mod allocation;
pub mod channel;
pub mod error;
pub mod harness;
pub mod ledger;
pub mod manifold;
pub mod quadrature;
pub mod rng;
pub mod secrecy;
pub mod special;

pub use error::{Error, Result};

//! Certification and simulation of discrete-time switched linear systems
//! whose switching is constrained by a labeled automaton.
//!
//! * [`l1cert`]: ℓ1-gain certificates for positive systems from a linear program.
//! * [`l2cert`]: ℓ2-gain certificates for general systems from LMIs.
//! * [`simulate`]: trajectories, Lyapunov-decrease checks and brute-force gain oracles.
//! * [`io`] and [`cli`]: JSON/CSV files and the `conecert` command.
//!
//! The numerical kernels ([`linalg`], [`lp`]) are small dense routines written
//! for desk-scale problems.

pub mod automaton;
pub mod cli;
pub mod cone;
pub mod error;
pub mod io;
pub mod l1cert;
pub mod l2cert;
pub mod linalg;
pub mod lp;
pub mod models;
pub mod report;
pub mod simulate;
pub mod tolerances;

pub use error::{Error, Result};

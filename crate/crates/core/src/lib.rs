//! Projection-free saddle-point solvers built on linear minimization oracles.
//!
//! The crate solves `min_{x ∈ X} max_{y ∈ Y} L(x, y)` for smooth
//! convex-concave `L` with three Frank-Wolfe variants:
//!
//! - [`solver::run_spfw`]: plain saddle-point Frank-Wolfe,
//! - [`solver::run_spafw`]: away-step variant with per-block active sets,
//! - [`solver::run_sppfw`]: pairwise variant.
//!
//! Each run yields a [`solver::SolverTrace`] holding the gap certificates of
//! every iterate. [`constants`] turns problem primitives into step-size and
//! rate constants.

pub mod config;
pub mod constants;
pub mod domains;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod objectives;
pub mod oracles;
pub mod rng;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};

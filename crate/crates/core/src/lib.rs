//! Numerical exploration of weighted backward shifts on sequence spaces.
//!
//! - [`seqcore`]: weight sequences and exact base-2 range products
//! - [`vectors`]: finitely supported vectors and their norms
//! - [`operators`]: the shift, its formal right inverse and a dense oracle
//! - [`orbitstats`]: Cesàro averages of orbit norms and set densities
//! - [`classify`]: finite-horizon trichotomy verdicts and criteria checks
//! - [`cli`]: the `shiftdyn` command-line front end

pub mod classify;
pub mod cli;
pub mod error;
pub mod operators;
pub mod orbitstats;
pub mod seqcore;
pub mod vectors;

pub use error::{Error, Result};
pub use operators::{OrbitNorms, RightInverse, ShiftOperator};
pub use seqcore::{block_bounds, BlockBounds, DyadicLog, Side, WeightSpec};
pub use vectors::{SpaceTag, SupportedVector};

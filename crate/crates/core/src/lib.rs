//! Rumin complex of the (2,3,5) nilpotent Lie algebra and its relatives.
//!
//! Symbolic layer: [`graded_lie`], [`enveloping`], [`rumin`] (exact arithmetic
//! over ℚ(√2)(i)). Numeric layer: [`reps`], [`spectral`], [`zeta`], [`heat`].

pub mod cli;
pub mod cohomology;
pub mod enveloping;
pub mod error;
pub mod exact_matrix;
pub mod graded_lie;
pub mod heat;
pub mod metric;
pub mod output;
pub mod reps;
pub mod rumin;
pub mod scalar;
pub mod spectral;
pub mod special;
pub mod zeta;

pub use error::{Error, Result};

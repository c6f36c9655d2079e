//! SU(n) generators, structure constants and bilinear quantum stochastic
//! differential equations built on them.

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod forms;
pub mod json;
pub mod linalg;
pub mod realization;
pub mod report;
pub mod sampling;
pub mod theta;
pub mod verify;

pub use error::{Error, Result};

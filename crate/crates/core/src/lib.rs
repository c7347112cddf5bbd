//! Adaptive camera trajectory planning.
//!
//! Semantic difference maps between an input view and its depth slices are
//! lifted into a weighted block grid; a closed camera orbit is then chosen
//! from a discrete family so that the cumulative weight of visible blocks is
//! as large as possible.

pub mod blocks;
pub mod coverage;
pub mod diffmap;
pub mod error;
pub mod geometry;
pub mod io;
pub mod losses;
pub mod mesh;
pub mod pipeline;
pub mod planner;

pub use error::{Error, Result};

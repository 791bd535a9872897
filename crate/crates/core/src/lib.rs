//! Extraspecial groups built from forms over finite fields, their matrix
//! representations, Weil extensions to isometry groups, and extraspecial towers.

pub mod error;
pub mod extraspecial;
pub mod forms;
pub mod gf;
pub mod group;
pub mod isometry;
pub mod matrix;
pub mod reps;
pub mod tower;
pub mod weil;

pub use error::{Error, Result};

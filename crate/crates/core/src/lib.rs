pub mod cli;
pub mod comass;
pub mod error;
pub mod exterior;
pub mod geometry;
pub mod lp;
pub mod obstruction;
pub mod report;

pub use error::{Error, Result};

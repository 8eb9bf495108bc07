pub mod artifact;
pub mod cli;
pub mod error;
pub mod ingest;
pub mod io;
pub mod manifest;
pub mod parallel;
pub mod report;

pub use error::{Error, Result};

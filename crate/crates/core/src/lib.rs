pub mod art2;
pub mod config;
pub mod error;
pub mod experiments;
pub mod phoneme;
pub mod pipeline;
pub mod representation;
pub mod som;
pub mod stats;

pub use error::{Error, Result};

pub mod decoder;
pub mod error;
pub mod grammar;
pub mod lattice;
pub mod morph;
pub mod parser;
pub mod phonology;
pub mod pipeline;
pub mod sample;
pub mod table;

pub use error::{Error, Result};

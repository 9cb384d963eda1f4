pub mod error;
pub mod specfun;
pub mod system;
pub mod beamsplitter;
pub mod coherent;
pub mod observables;
pub mod cli;

pub use error::{Error, Result};

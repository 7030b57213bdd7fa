pub mod error;
pub mod numerics;
pub mod channels;
pub mod symmetrizability;
pub mod capacity;
pub mod zero_error;
pub mod coding_sim;

pub use error::{Error, Result};

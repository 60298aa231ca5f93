pub mod error;
pub mod freqmap;
pub mod horn;
pub mod matkit;
pub mod nbody;
pub mod p2;

pub use error::{Error, Result};

pub mod algebra;
pub mod cli;
pub mod error;
pub mod expr;
pub mod holo;
pub mod krein;
pub mod multimode;
pub mod pcf;
pub mod scalar;
pub mod sl2;

pub use error::{Error, Result};

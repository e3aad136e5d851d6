pub mod arith;
pub mod asymptotics;
pub mod census;
pub mod engine;
pub mod error;
pub mod family;
pub mod tropical;

pub use error::{Error, Result};

//! Day-ahead unit commitment under wind uncertainty.

pub mod decomposition;
pub mod error;
pub mod forecast;
pub mod io;
pub mod market;
pub mod scenario;
pub mod system;
pub mod uc;

pub use error::{Error, Result};

#![allow(clippy::needless_range_loop)]

pub mod bench;
pub mod boys;
pub mod compress;
pub mod error;
pub mod kernel;
pub mod oracle;
pub mod perf;
pub mod rys;
pub mod sample;
pub mod shell;
pub mod wire;

pub use error::{EriError, Result};

//! Successive cancellation ordered search (SCOS) decoding of modified
//! G_N-coset codes, with SC, SCL and DSCF reference decoders, a brute-force
//! maximum-likelihood oracle and a biAWGN Monte Carlo harness.

// Phase loops index several parallel per-phase arrays at once.
#![allow(clippy::needless_range_loop)]

pub mod baseline;
pub mod bench;
pub mod channel;
pub mod codes;
pub mod crc;
pub mod engine;
pub mod error;
pub mod scos;

pub use codes::CodeSpec;
pub use crc::CrcSpec;
pub use error::{Error, Result};

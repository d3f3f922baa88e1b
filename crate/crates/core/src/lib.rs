//! CRC-aided convolutional codes.
//!
//! The crate covers the full design and evaluation loop for a CRC concatenated
//! with a rate-1/ω feedforward convolutional code, terminated either by a zero
//! tail (ZT) or by tail-biting (TB):
//!
//! - [`gf2poly`]: binary polynomials, CRC encoding and checking, hex/octal formats.
//! - [`convcode`]: code specification, trellis, encoding and BPSK mapping.
//! - [`slvd`]: serial list Viterbi decoding with CRC termination.
//! - [`dso`]: irreducible error events, path reconstruction, distance spectra
//!   and the distance-spectrum-optimal CRC search.
//! - [`bounds`]: union bounds, low-SNR limits and saddlepoint RCU/MC bounds.
//! - [`listrank`]: expected list rank models.
//! - [`complexity`]: closed-form decoding complexity.
//! - [`sim`]: seeded Monte Carlo harness.

pub mod bounds;
pub mod complexity;
pub mod convcode;
pub mod dso;
mod error;
pub mod gf2poly;
pub mod listrank;
pub mod numeric;
pub mod sim;
pub mod slvd;

pub use error::{Error, Result};

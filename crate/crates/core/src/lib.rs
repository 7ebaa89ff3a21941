//! Exact capacity regions, coding schemes and zero-error simulation for the
//! symmetric linear deterministic butterfly network with relay-source feedback.
//!
//! The crate is organised bottom-up:
//!
//! - [`gf2signal`]: GF(2) vectors, the shift channel and signal layouts.
//! - [`rate_region`]: the outer bound, the per-regime achievable regions and
//!   exact 2-D polytope algebra.
//! - [`fourier_motzkin`]: exact projection of component-rate systems onto
//!   `(R1, R2)` plus a brute-force integer oracle.
//! - [`schemes`]: constraint systems, integer allocation and the bit-exact
//!   encoder/decoder plans for each regime.
//! - [`simulator`]: runs a scheme over `N + delta` channel uses and checks
//!   every decoded block.
//! - [`cli`]: the command implementations behind the `ldbfn` binary.

pub mod cli;
pub mod error;
pub mod fourier_motzkin;
pub mod gf2signal;
pub mod rate_region;
pub mod schemes;
pub mod simulator;

pub use error::{Error, Result};
pub use gf2signal::{BitVector, ChannelParams};
pub use rate_region::{Halfspace, RatePoint, RateRegion, Regime};

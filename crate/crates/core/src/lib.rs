//! Permutation-polynomial interleavers over Z_N.
//!
//! * [`poly`]: polynomials over Z_N, the quadratic permutation criterion,
//!   composition and inversion.
//! * [`interleave`]: explicit permutations, contention-free and maximum
//!   contention-free verification, spread factor, S-random baseline.
//! * [`turbo`]: rate-1/3 turbo codec with log-MAP decoding and FER
//!   simulation.
//! * [`parwin`]: windowed multi-processor decoding harness that routes
//!   extrinsic exchange through per-window memory banks.

pub mod arith;
mod error;
pub mod interleave;
pub mod parwin;
pub mod poly;
pub mod turbo;

pub use arith::{factorize, Factorization};
pub use error::{Error, Result};
pub use interleave::{Direction, Interleaver, WindowConfig};
pub use poly::PolySpec;

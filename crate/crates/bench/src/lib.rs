//! Shared fixtures for the criterion benches.

use qpp_core::poly::materialize;
use qpp_core::turbo::{awgn_channel, encode, FrameLlrs, RscSpec};
use qpp_core::{Interleaver, PolySpec};

/// The four reference QPPs as `(N, f1, f2)`.
pub const REFERENCE_QPPS: [(u64, u64, u64); 4] = [(256, 159, 64), (1024, 31, 64), (4096, 2113, 128), (15120, 11, 210)];

pub fn qpp(n: u64, f1: u64, f2: u64) -> Interleaver {
    materialize(&PolySpec::quadratic(n, f1, f2).expect("valid coefficients")).expect("permutation")
}

/// Channel LLRs of a pseudo-random info word sent through AWGN.
pub fn noisy_frame(pi: &Interleaver, ebn0_db: f64, seed: u64) -> FrameLlrs {
    let spec = RscSpec::umts();
    let info: Vec<u8> = (0..pi.len())
        .map(|i| ((i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 63) as u8)
        .collect();
    let frame = encode(&info, pi, &spec).expect("matching lengths");
    awgn_channel(&frame, ebn0_db, frame.rate(), seed)
}

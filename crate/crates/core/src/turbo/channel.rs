//! BPSK over AWGN and the channel LLR layout consumed by the decoder.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::encoder::CodeFrame;
use crate::error::{domain, Result};

/// Magnitude used for every LLR when the channel is noiseless
/// (`Eb/N0 = +inf`).
pub const NOISELESS_LLR: f64 = 20.0;

/// Independent generator for `(seed, tags...)`. The same inputs always give
/// the same stream, regardless of which thread draws from it.
pub fn substream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut h = 0x9E37_79B9_7F4A_7C15u64;
    for &t in tags {
        h = splitmix64(h ^ t);
    }
    rng.set_stream(h);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE5_E4B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `sigma^2 = 1 / (2 R 10^(Eb/N0 / 10))` for unit-energy BPSK.
pub fn noise_variance(ebn0_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))
}

/// Channel LLRs `ln P(0)/P(1)` in the same layout as [`CodeFrame`].
#[derive(Debug, Clone, PartialEq)]
pub struct FrameLlrs {
    pub systematic: Vec<f64>,
    pub parity1: Vec<f64>,
    pub parity2: Vec<f64>,
    pub tail1_sys: Vec<f64>,
    pub tail1_par: Vec<f64>,
    pub tail2_sys: Vec<f64>,
    pub tail2_par: Vec<f64>,
}

impl FrameLlrs {
    pub fn info_len(&self) -> usize {
        self.systematic.len()
    }

    /// Flattened in the order of [`CodeFrame::to_bits`].
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.systematic);
        out.extend_from_slice(&self.parity1);
        out.extend_from_slice(&self.parity2);
        for (x, z) in self.tail1_sys.iter().zip(&self.tail1_par) {
            out.push(*x);
            out.push(*z);
        }
        for (x, z) in self.tail2_sys.iter().zip(&self.tail2_par) {
            out.push(*x);
            out.push(*z);
        }
        out
    }

    /// Inverse of [`FrameLlrs::to_flat`] for an `n`-bit frame with `memory`
    /// tail steps per encoder.
    pub fn from_flat(flat: &[f64], n: usize, memory: usize) -> Result<Self> {
        if flat.len() != 3 * n + 4 * memory {
            return domain(format!(
                "LLR sequence length {} does not match 3*{n} + {}",
                flat.len(),
                4 * memory
            ));
        }
        let tail = &flat[3 * n..];
        let pick = |offset: usize, which: usize| -> Vec<f64> {
            (0..memory).map(|i| tail[offset + 2 * i + which]).collect()
        };
        Ok(Self {
            systematic: flat[..n].to_vec(),
            parity1: flat[n..2 * n].to_vec(),
            parity2: flat[2 * n..3 * n].to_vec(),
            tail1_sys: pick(0, 0),
            tail1_par: pick(0, 1),
            tail2_sys: pick(2 * memory, 0),
            tail2_par: pick(2 * memory, 1),
        })
    }

    /// Zero-information LLRs for an `n`-bit frame.
    pub fn erased(n: usize, memory: usize) -> Self {
        Self::from_flat(&vec![0.0; 3 * n + 4 * memory], n, memory).expect("consistent length")
    }
}

/// Transmits the frame over BPSK/AWGN (`0 -> +1`, `1 -> -1`) and returns
/// channel LLRs `2y / sigma^2`. `ebn0_db = +inf` gives the noiseless channel.
pub fn awgn_channel(frame: &CodeFrame, ebn0_db: f64, rate: f64, seed: u64) -> FrameLlrs {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    awgn_channel_with(frame, ebn0_db, rate, &mut rng)
}

pub fn awgn_channel_with<R: Rng>(frame: &CodeFrame, ebn0_db: f64, rate: f64, rng: &mut R) -> FrameLlrs {
    let bits = frame.to_bits();
    let llrs: Vec<f64> = if ebn0_db == f64::INFINITY {
        bits.iter()
            .map(|&b| if b == 0 { NOISELESS_LLR } else { -NOISELESS_LLR })
            .collect()
    } else {
        let var = noise_variance(ebn0_db, rate);
        let sigma = var.sqrt();
        bits.iter()
            .map(|&b| {
                let x = 1.0 - 2.0 * b as f64;
                let noise: f64 = rng.sample(StandardNormal);
                2.0 * (x + sigma * noise) / var
            })
            .collect()
    };
    FrameLlrs::from_flat(&llrs, frame.info_len(), frame.tail1.len()).expect("frame layout")
}

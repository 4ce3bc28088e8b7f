use serde::Serialize;

use super::rsc::{RscEncoder, RscSpec, Trellis};
use crate::error::{domain, Result};
use crate::interleave::Interleaver;

/// Output of the rate-1/3 parallel concatenated encoder.
///
/// Each constituent encoder is terminated on its own; its tail contributes
/// `memory` systematic and `memory` parity bits. Serialized order (see
/// [`CodeFrame::to_bits`]) is systematic, parity 1, parity 2, then the tail
/// of encoder 1 and the tail of encoder 2, each tail as
/// `x_1 z_1 x_2 z_2 x_3 z_3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeFrame {
    pub systematic: Vec<u8>,
    pub parity1: Vec<u8>,
    pub parity2: Vec<u8>,
    pub tail1: Vec<(u8, u8)>,
    pub tail2: Vec<(u8, u8)>,
}

impl CodeFrame {
    pub fn info_len(&self) -> usize {
        self.systematic.len()
    }

    pub fn coded_len(&self) -> usize {
        3 * self.systematic.len() + 2 * (self.tail1.len() + self.tail2.len())
    }

    pub fn rate(&self) -> f64 {
        self.info_len() as f64 / self.coded_len() as f64
    }

    pub fn to_bits(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.coded_len());
        out.extend_from_slice(&self.systematic);
        out.extend_from_slice(&self.parity1);
        out.extend_from_slice(&self.parity2);
        for &(x, z) in self.tail1.iter().chain(&self.tail2) {
            out.push(x);
            out.push(z);
        }
        out
    }

    pub fn weight(&self) -> usize {
        self.to_bits().iter().map(|&b| b as usize).sum()
    }
}

/// True code rate `N / (3N + 4m)` including termination.
pub fn code_rate(info_len: usize, spec: &RscSpec) -> f64 {
    info_len as f64 / (3 * info_len + 2 * spec.tail_bits()) as f64
}

/// Turbo-encodes `info`. Encoder 2 sees `info[pi(k)]` at time `k`.
pub fn encode(info: &[u8], pi: &Interleaver, spec: &RscSpec) -> Result<CodeFrame> {
    let trellis = Trellis::new(spec)?;
    encode_with(info, pi, &trellis, spec.memory)
}

pub(crate) fn encode_with(
    info: &[u8],
    pi: &Interleaver,
    trellis: &Trellis,
    memory: usize,
) -> Result<CodeFrame> {
    if info.len() != pi.len() {
        return domain(format!(
            "info length {} does not match interleaver length {}",
            info.len(),
            pi.len()
        ));
    }
    if let Some(i) = info.iter().position(|&b| b > 1) {
        return domain(format!("info[{i}] = {} is not a bit", info[i]));
    }
    let mut enc1 = RscEncoder::new(trellis, memory);
    let mut enc2 = RscEncoder::new(trellis, memory);
    let parity1 = info.iter().map(|&b| enc1.push(b)).collect();
    let parity2 = pi.as_slice().iter().map(|&y| enc2.push(info[y])).collect();
    Ok(CodeFrame {
        systematic: info.to_vec(),
        parity1,
        parity2,
        tail1: enc1.terminate(),
        tail2: enc2.terminate(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_zero_frame() {
        let pi = Interleaver::identity(16);
        let f = encode(&[0; 16], &pi, &RscSpec::umts()).unwrap();
        assert!(f.to_bits().iter().all(|&b| b == 0));
    }

    #[test]
    fn coded_length_256() {
        let pi = Interleaver::identity(256);
        let f = encode(&vec![1; 256], &pi, &RscSpec::umts()).unwrap();
        assert_eq!(f.coded_len(), 780);
        assert_eq!(f.to_bits().len(), 780);
        assert!((code_rate(256, &RscSpec::umts()) - 256.0 / 780.0).abs() < 1e-15);
    }

    #[test]
    fn identity_interleaver_gives_equal_parities() {
        let pi = Interleaver::identity(8);
        let mut info = [0u8; 8];
        info[0] = 1;
        let f = encode(&info, &pi, &RscSpec::umts()).unwrap();
        assert_eq!(f.parity1, f.parity2);
        assert_eq!(f.tail1, f.tail2);
    }

    #[test]
    fn length_mismatch() {
        let pi = Interleaver::identity(8);
        assert!(encode(&[0; 7], &pi, &RscSpec::umts()).is_err());
        assert!(encode(&[2; 8], &pi, &RscSpec::umts()).is_err());
    }
}

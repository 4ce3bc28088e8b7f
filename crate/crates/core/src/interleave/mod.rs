//! Interleavers as explicit permutations, their contention-free
//! verification, spread factor and baseline generators.

mod contention;
mod io;
mod spread;
mod srandom;

pub use contention::{
    is_contention_free, is_contention_free_pairwise, is_mcf, window_residue_map, CfReport,
    Direction, McfReport, Violation, WindowConfig,
};
pub use io::{read_interleaver, write_interleaver};
pub use spread::{spread_factor, spread_factor_exhaustive, spread_upper_bound};
pub use srandom::{generate_s_random, satisfies_s_constraint};

use crate::error::{Error, Result};

/// A permutation `pi` of `{0, ..., N-1}`; `pi[x]` is the read address for
/// position `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interleaver {
    map: Vec<usize>,
}

impl Interleaver {
    /// Validates that `map` is a bijection on `0..map.len()`.
    pub fn new(map: Vec<usize>) -> Result<Self> {
        if map.is_empty() {
            return Err(Error::InvalidInterleaver("empty permutation".into()));
        }
        let n = map.len();
        let mut seen = vec![usize::MAX; n];
        for (x, &y) in map.iter().enumerate() {
            if y >= n {
                return Err(Error::InvalidInterleaver(format!(
                    "pi({x}) = {y} out of range for length {n}"
                )));
            }
            if seen[y] != usize::MAX {
                return Err(Error::InvalidInterleaver(format!(
                    "value {y} appears at positions {} and {x}",
                    seen[y]
                )));
            }
            seen[y] = x;
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    /// Tiles `block` over a frame of `n` positions: `pi(kB + r) = kB + block(r)`.
    pub fn direct_sum(block: &Interleaver, n: usize) -> Result<Self> {
        let b = block.len();
        if n % b != 0 {
            return Err(Error::Domain(format!("block length {b} does not divide {n}")));
        }
        let map = (0..n).map(|x| (x / b) * b + block.get(x % b)).collect();
        Ok(Self { map })
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y] = x;
        }
        Self { map: inv }
    }

    /// `out[k] = data[pi(k)]`.
    pub fn permute<T: Copy>(&self, data: &[T]) -> Vec<T> {
        debug_assert_eq!(data.len(), self.len());
        self.map.iter().map(|&y| data[y]).collect()
    }

    /// Inverse of [`Interleaver::permute`]: `out[pi(k)] = data[k]`.
    pub fn unpermute<T: Copy + Default>(&self, data: &[T]) -> Vec<T> {
        debug_assert_eq!(data.len(), self.len());
        let mut out = vec![T::default(); data.len()];
        for (k, &y) in self.map.iter().enumerate() {
            out[y] = data[k];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bijections() {
        assert!(Interleaver::new(vec![]).is_err());
        assert!(Interleaver::new(vec![0, 0]).is_err());
        assert!(Interleaver::new(vec![0, 2]).is_err());
        assert!(Interleaver::new(vec![1, 0]).is_ok());
    }

    #[test]
    fn permute_roundtrip() {
        let pi = Interleaver::new(vec![0, 3, 2, 5, 4, 7, 6, 1]).unwrap();
        let data: Vec<f64> = (0..8).map(|x| x as f64 * 0.5 - 1.25).collect();
        let there = pi.permute(&data);
        assert_eq!(there[1], data[3]);
        assert_eq!(pi.unpermute(&there), data);
        assert_eq!(pi.inverse().inverse(), pi);
    }

    #[test]
    fn direct_sum_tiles_block() {
        let block = Interleaver::new(vec![0, 2, 1, 3]).unwrap();
        let big = Interleaver::direct_sum(&block, 12).unwrap();
        assert_eq!(big.as_slice(), &[0, 2, 1, 3, 4, 6, 5, 7, 8, 10, 9, 11]);
        assert!(Interleaver::direct_sum(&block, 10).is_err());
    }
}

//! Upper bound on the turbo code minimum distance by enumerating every
//! low-weight input pattern.
//!
//! A constituent encoder fed only zeros walks a fixed cycle of states, so
//! the parity weight of a zero run of any length is a table lookup. That
//! makes the codeword weight of a weight-`w` input an O(w) computation,
//! and partial weights of encoder 1 prune the search.

use serde::Serialize;

use super::rsc::{RscSpec, Trellis};
use crate::error::{domain, Result};
use crate::interleave::Interleaver;

pub const MAX_INPUT_WEIGHT: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DminBound {
    /// Smallest codeword weight found.
    pub weight: usize,
    /// Info positions of a codeword achieving it.
    pub positions: Vec<usize>,
    pub max_input_weight: usize,
}

struct ZeroRuns {
    trellis: Trellis,
    memory: usize,
    orbit_of: Vec<usize>,
    index_in_orbit: Vec<usize>,
    orbits: Vec<Vec<usize>>,
    /// `prefix[s][r]`: parity weight of `r` zero-input steps from state `s`,
    /// for `r` up to one full cycle.
    prefix: Vec<Vec<usize>>,
    tail_weight: Vec<usize>,
}

impl ZeroRuns {
    fn new(spec: &RscSpec) -> Result<Self> {
        let trellis = Trellis::new(spec)?;
        let ns = trellis.num_states();
        let mut orbit_of = vec![usize::MAX; ns];
        let mut index_in_orbit = vec![0; ns];
        let mut orbits = Vec::new();
        for start in 0..ns {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let mut orbit = Vec::new();
            let mut s = start;
            while orbit_of[s] == usize::MAX {
                orbit_of[s] = orbits.len();
                index_in_orbit[s] = orbit.len();
                orbit.push(s);
                s = trellis.next(s, 0);
            }
            debug_assert_eq!(s, start, "zero-input map must be a permutation");
            orbits.push(orbit);
        }
        let prefix = (0..ns)
            .map(|s| {
                let len = orbits[orbit_of[s]].len();
                let mut acc = vec![0; len + 1];
                let mut st = s;
                for r in 0..len {
                    acc[r + 1] = acc[r] + trellis.parity(st, 0) as usize;
                    st = trellis.next(st, 0);
                }
                acc
            })
            .collect();
        let tail_weight = (0..ns)
            .map(|s| {
                let mut st = s;
                let mut w = 0;
                for _ in 0..spec.memory {
                    let u = trellis.tail_input(st);
                    w += u as usize + trellis.parity(st, u) as usize;
                    st = trellis.next(st, u);
                }
                w
            })
            .collect();
        Ok(Self {
            trellis,
            memory: spec.memory,
            orbit_of,
            index_in_orbit,
            orbits,
            prefix,
            tail_weight,
        })
    }

    /// Parity weight and end state of `len` zero-input steps from `state`.
    #[inline]
    fn run(&self, state: usize, len: usize) -> (usize, usize) {
        let orbit = &self.orbits[self.orbit_of[state]];
        let period = orbit.len();
        let full = len / period;
        let rest = len % period;
        let weight = full * self.prefix[state][period] + self.prefix[state][rest];
        let end = orbit[(self.index_in_orbit[state] + len) % period];
        (weight, end)
    }

    /// Parity plus tail weight of a terminated frame of length `n` whose
    /// ones sit at the sorted `positions`.
    fn encoder_weight(&self, positions: &[usize], n: usize) -> usize {
        let mut state = 0;
        let mut pos = 0;
        let mut weight = 0;
        for &p in positions {
            let (w, s) = self.run(state, p - pos);
            weight += w + self.trellis.parity(s, 1) as usize;
            state = self.trellis.next(s, 1);
            pos = p + 1;
        }
        let (w, s) = self.run(state, n - pos);
        weight + w + self.tail_weight[s]
    }
}

struct Search<'a> {
    runs: &'a ZeroRuns,
    inv: Vec<usize>,
    n: usize,
    max_weight: usize,
    best: usize,
    best_positions: Vec<usize>,
    chosen: Vec<usize>,
    scratch: Vec<usize>,
}

impl Search<'_> {
    fn leaf(&mut self, state: usize, pos: usize, acc: usize) {
        let (w, s) = self.runs.run(state, self.n - pos);
        let first = acc + w + self.runs.tail_weight[s];
        if first >= self.best {
            return;
        }
        self.scratch.clear();
        self.scratch.extend(self.chosen.iter().map(|&i| self.inv[i]));
        self.scratch.sort_unstable();
        let total = first + self.runs.encoder_weight(&self.scratch, self.n);
        if total < self.best {
            self.best = total;
            self.best_positions = self.chosen.clone();
        }
    }

    /// `acc` counts systematic ones plus encoder 1 parity up to `pos`.
    fn descend(&mut self, state: usize, pos: usize, acc: usize) {
        if !self.chosen.is_empty() {
            self.leaf(state, pos, acc);
        }
        if self.chosen.len() == self.max_weight {
            return;
        }
        let trellis = &self.runs.trellis;
        for p in pos..self.n {
            let (w, s) = self.runs.run(state, p - pos);
            // Zero-run weight only grows with p.
            if acc + w + 1 >= self.best {
                break;
            }
            let next_acc = acc + w + 1 + trellis.parity(s, 1) as usize;
            if next_acc >= self.best {
                continue;
            }
            let next_state = trellis.next(s, 1);
            self.chosen.push(p);
            self.descend(next_state, p + 1, next_acc);
            self.chosen.pop();
        }
    }
}

/// Minimum weight over all nonzero codewords whose info weight is at most
/// `max_input_weight`. This is an upper bound on the true minimum distance.
pub fn dmin_upper_bound(pi: &Interleaver, spec: &RscSpec, max_input_weight: usize) -> Result<DminBound> {
    if max_input_weight == 0 || max_input_weight > MAX_INPUT_WEIGHT {
        return domain(format!(
            "max input weight {max_input_weight} outside 1..={MAX_INPUT_WEIGHT}"
        ));
    }
    let runs = ZeroRuns::new(spec)?;
    debug_assert_eq!(runs.memory, spec.memory);
    let mut search = Search {
        runs: &runs,
        inv: pi.inverse().as_slice().to_vec(),
        n: pi.len(),
        max_weight: max_input_weight,
        best: usize::MAX,
        best_positions: Vec::new(),
        chosen: Vec::with_capacity(max_input_weight),
        scratch: Vec::with_capacity(max_input_weight),
    };
    search.descend(0, 0, 0);
    Ok(DminBound {
        weight: search.best,
        positions: search.best_positions,
        max_input_weight,
    })
}

/// Codeword weight for an info word with ones at `positions`, via the
/// zero-run tables. Exposed for cross-checking against direct encoding.
pub fn codeword_weight(pi: &Interleaver, spec: &RscSpec, positions: &[usize]) -> Result<usize> {
    let runs = ZeroRuns::new(spec)?;
    let n = pi.len();
    let mut p1: Vec<usize> = positions.to_vec();
    p1.sort_unstable();
    p1.dedup();
    if p1.len() != positions.len() || p1.last().is_some_and(|&p| p >= n) {
        return domain("positions must be distinct and inside the frame");
    }
    let inv = pi.inverse();
    let mut p2: Vec<usize> = p1.iter().map(|&i| inv.get(i)).collect();
    p2.sort_unstable();
    Ok(p1.len() + runs.encoder_weight(&p1, n) + runs.encoder_weight(&p2, n))
}

//! Recursive systematic convolutional constituent code and its trellis.

use serde::Serialize;

use crate::error::{domain, Result};

/// Generator description of a rate-1/2 RSC code.
///
/// Polynomials use the usual octal convention: the most significant of the
/// `memory + 1` bits is the coefficient of `D^0`. The default is the
/// 8-state UMTS/3GPP constituent code, feedback `1 + D^2 + D^3` (13) and
/// feedforward `1 + D + D^3` (15).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RscSpec {
    pub memory: usize,
    pub feedback: u32,
    pub feedforward: u32,
}

impl Default for RscSpec {
    fn default() -> Self {
        Self::umts()
    }
}

impl RscSpec {
    pub const fn umts() -> Self {
        Self {
            memory: 3,
            feedback: 0o13,
            feedforward: 0o15,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.memory;
        if m == 0 || m > 8 {
            return domain(format!("memory {m} outside 1..=8"));
        }
        if self.feedback >> m != 1 || self.feedback & 1 != 1 {
            return domain(format!(
                "feedback polynomial {:o} must have degree exactly {m} and a D^0 term",
                self.feedback
            ));
        }
        if self.feedforward >> (m + 1) != 0 || self.feedforward == 0 {
            return domain(format!("feedforward polynomial {:o} out of range", self.feedforward));
        }
        Ok(())
    }

    pub fn num_states(&self) -> usize {
        1 << self.memory
    }

    /// Coded bits appended per constituent encoder for termination
    /// (systematic and parity for each of `memory` tail steps).
    pub fn tail_bits(&self) -> usize {
        2 * self.memory
    }

    fn tap(poly: u32, memory: usize, i: usize) -> u8 {
        ((poly >> (memory - i)) & 1) as u8
    }
}

/// Precomputed state transitions. State bit `i - 1` holds the register
/// value `a_{k-i}`.
#[derive(Debug, Clone)]
pub struct Trellis {
    num_states: usize,
    next: Vec<[u8; 2]>,
    parity: Vec<[u8; 2]>,
    tail_input: Vec<u8>,
    /// For each state, its two `(previous state, input)` predecessors.
    prev: Vec<[(u8, u8); 2]>,
}

impl Trellis {
    pub fn new(spec: &RscSpec) -> Result<Self> {
        spec.validate()?;
        let m = spec.memory;
        let s_count = spec.num_states();
        let mut next = vec![[0u8; 2]; s_count];
        let mut parity = vec![[0u8; 2]; s_count];
        let mut tail_input = vec![0u8; s_count];
        let mut prev: Vec<Vec<(u8, u8)>> = vec![Vec::with_capacity(2); s_count];
        for s in 0..s_count {
            let reg = |i: usize| ((s >> (i - 1)) & 1) as u8;
            let fb = (1..=m).fold(0u8, |acc, i| acc ^ (RscSpec::tap(spec.feedback, m, i) & reg(i)));
            let ff = (1..=m).fold(0u8, |acc, i| acc ^ (RscSpec::tap(spec.feedforward, m, i) & reg(i)));
            tail_input[s] = fb;
            for u in 0..2u8 {
                let a = u ^ fb;
                let ns = ((s << 1) | a as usize) & (s_count - 1);
                next[s][u as usize] = ns as u8;
                parity[s][u as usize] = (RscSpec::tap(spec.feedforward, m, 0) & a) ^ ff;
                prev[ns].push((s as u8, u));
            }
        }
        let prev = prev
            .into_iter()
            .map(|p| {
                debug_assert_eq!(p.len(), 2);
                [p[0], p[1]]
            })
            .collect();
        Ok(Self {
            num_states: s_count,
            next,
            parity,
            tail_input,
            prev,
        })
    }

    #[inline]
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn memory(&self) -> usize {
        self.num_states.trailing_zeros() as usize
    }

    #[inline]
    pub fn next(&self, state: usize, input: u8) -> usize {
        self.next[state][input as usize] as usize
    }

    #[inline]
    pub fn parity(&self, state: usize, input: u8) -> u8 {
        self.parity[state][input as usize]
    }

    /// Input that feeds a zero into the register from `state`.
    #[inline]
    pub fn tail_input(&self, state: usize) -> u8 {
        self.tail_input[state]
    }

    #[inline]
    pub fn predecessors(&self, state: usize) -> &[(u8, u8); 2] {
        &self.prev[state]
    }
}

/// Stateful encoder for one constituent code.
#[derive(Debug, Clone)]
pub struct RscEncoder<'t> {
    trellis: &'t Trellis,
    memory: usize,
    state: usize,
}

impl<'t> RscEncoder<'t> {
    pub fn new(trellis: &'t Trellis, memory: usize) -> Self {
        Self {
            trellis,
            memory,
            state: 0,
        }
    }

    pub fn state(&self) -> usize {
        self.state
    }

    /// Encodes one info bit, returning the parity bit.
    pub fn push(&mut self, bit: u8) -> u8 {
        let p = self.trellis.parity(self.state, bit);
        self.state = self.trellis.next(self.state, bit);
        p
    }

    /// Drives the register back to zero; returns `(systematic, parity)` per tail step.
    pub fn terminate(&mut self) -> Vec<(u8, u8)> {
        (0..self.memory)
            .map(|_| {
                let u = self.trellis.tail_input(self.state);
                (u, self.push(u))
            })
            .collect()
    }
}

//! Contention-free checks for windowed parallel access.
//!
//! With `N = W * M`, processor `t` handles window `t` and at step `j` touches
//! position `j + tW`. The interleaver is contention-free for `W` when, at
//! every offset `j`, the `M` targets `pi(j + tW)` land in `M` distinct
//! windows `floor(pi(j + tW) / W)`. The check must hold for the interleaver
//! and for its inverse.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::Interleaver;
use crate::arith::divisors;
use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WindowConfig {
    pub n: usize,
    pub window: usize,
    pub processors: usize,
}

impl WindowConfig {
    pub fn from_window(n: usize, window: usize) -> Result<Self> {
        if window == 0 || n == 0 || n % window != 0 {
            return domain(format!("window size {window} does not divide length {n}"));
        }
        Ok(Self {
            n,
            window,
            processors: n / window,
        })
    }

    pub fn from_processors(n: usize, processors: usize) -> Result<Self> {
        if processors == 0 || n == 0 || n % processors != 0 {
            return domain(format!("processor count {processors} does not divide length {n}"));
        }
        Ok(Self {
            n,
            window: n / processors,
            processors,
        })
    }

    /// Position handled by processor `t` at offset `j`.
    #[inline]
    pub fn position(&self, j: usize, t: usize) -> usize {
        j + t * self.window
    }

    /// Window (memory bank) that holds `index`.
    #[inline]
    pub fn bank(&self, index: usize) -> usize {
        index / self.window
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Interleave,
    Deinterleave,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Interleave => "interleave",
            Direction::Deinterleave => "deinterleave",
        })
    }
}

/// Offending triple: windows `t < v` collide at offset `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub direction: Direction,
    pub j: usize,
    pub t: usize,
    pub v: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CfReport {
    pub window: usize,
    pub passed: bool,
    pub violation: Option<Violation>,
}

fn first_violation(map: &Interleaver, cfg: &WindowConfig, direction: Direction) -> Option<Violation> {
    let m = cfg.processors;
    // owner[q] = window that claimed bank q at the current offset (stamped by j).
    let mut stamp = vec![usize::MAX; m];
    let mut owner = vec![0usize; m];
    for j in 0..cfg.window {
        for t in 0..m {
            let q = cfg.bank(map.get(cfg.position(j, t)));
            if stamp[q] == j {
                return Some(Violation {
                    direction,
                    j,
                    t: owner[q],
                    v: t,
                });
            }
            stamp[q] = j;
            owner[q] = t;
        }
    }
    None
}

/// Bucket-counting check of both directions for one window size.
pub fn is_contention_free(pi: &Interleaver, window: usize) -> Result<CfReport> {
    let cfg = WindowConfig::from_window(pi.len(), window)?;
    let violation = first_violation(pi, &cfg, Direction::Interleave)
        .or_else(|| first_violation(&pi.inverse(), &cfg, Direction::Deinterleave));
    Ok(CfReport {
        window,
        passed: violation.is_none(),
        violation,
    })
}

/// Direct pairwise comparison of window quotients; slower reference for
/// [`is_contention_free`].
pub fn is_contention_free_pairwise(pi: &Interleaver, window: usize) -> Result<CfReport> {
    let cfg = WindowConfig::from_window(pi.len(), window)?;
    let inv = pi.inverse();
    for (direction, map) in [(Direction::Interleave, pi), (Direction::Deinterleave, &inv)] {
        for j in 0..window {
            for v in 0..cfg.processors {
                for t in 0..v {
                    let qt = map.get(j + t * window) / window;
                    let qv = map.get(j + v * window) / window;
                    if qt == qv {
                        let violation = Some(Violation { direction, j, t, v });
                        return Ok(CfReport {
                            window,
                            passed: false,
                            violation,
                        });
                    }
                }
            }
        }
    }
    Ok(CfReport {
        window,
        passed: true,
        violation: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct McfReport {
    pub n: usize,
    pub reports: BTreeMap<usize, CfReport>,
}

impl McfReport {
    /// Maximum contention-free: every divisor passed.
    pub fn passed(&self) -> bool {
        self.reports.values().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CfReport> {
        self.reports.values().filter(|r| !r.passed)
    }
}

/// Runs [`is_contention_free`] for every window size dividing N.
pub fn is_mcf(pi: &Interleaver) -> McfReport {
    let n = pi.len();
    let inv = pi.inverse();
    let reports = divisors(n as u64)
        .into_iter()
        .map(|w| {
            let w = w as usize;
            let cfg = WindowConfig::from_window(n, w).expect("divisor");
            let violation = first_violation(pi, &cfg, Direction::Interleave)
                .or_else(|| first_violation(&inv, &cfg, Direction::Deinterleave));
            (
                w,
                CfReport {
                    window: w,
                    passed: violation.is_none(),
                    violation,
                },
            )
        })
        .collect();
    McfReport { n, reports }
}

/// `j -> pi(j) mod W` restricted to one window. For a permutation
/// polynomial this is itself a permutation of `0..W`.
pub fn window_residue_map(pi: &Interleaver, window: usize) -> Result<Vec<usize>> {
    WindowConfig::from_window(pi.len(), window)?;
    Ok((0..window).map(|j| pi.get(j) % window).collect())
}

//! Parallel-window decoding harness.
//!
//! `M` processors each own one window of `W = N / M` positions and one
//! memory bank. At logical step `j` processor `t` reads or writes position
//! `j + tW`. Producers store their extrinsics in their own bank (address =
//! offset); consumers then fetch through the interleaver, and two
//! processors hitting the same bank at the same step is a contention.
//!
//! Only the exchange is windowed. Each SISO pass still runs full-frame
//! forward/backward recursions (tail steps included), so the decoded output
//! is bit-identical to [`turbo_decode`](crate::turbo::turbo_decode).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interleave::{Direction, Interleaver, WindowConfig};
use crate::turbo::{turbo_decode_with, ExtrinsicExchange, FrameLlrs, TurboConfig, TurboOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Access {
    pub proc: usize,
    pub bank: usize,
    pub addr: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub j: usize,
    pub accesses: Vec<Access>,
}

/// Two or more processors reading one bank in the same step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContentionEvent {
    pub step: usize,
    pub direction: Direction,
    /// Decoder iteration; 0 for static traces.
    pub iteration: usize,
    pub bank: usize,
    pub processors: Vec<usize>,
}

impl std::fmt::Display for ContentionEvent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} step {} iteration {}: processors {:?} on bank {}",
            self.direction, self.step, self.iteration, self.processors, self.bank
        )
    }
}

/// Read pattern of one exchange direction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BankAccessTrace {
    #[serde(rename = "M")]
    pub processors: usize,
    #[serde(rename = "W")]
    pub window: usize,
    pub direction: Direction,
    pub steps: Vec<Step>,
    pub contentions: Vec<ContentionEvent>,
}

impl BankAccessTrace {
    pub fn is_contention_free(&self) -> bool {
        self.contentions.is_empty()
    }

    /// Rebuilds the read map `position -> bank * W + addr`.
    pub fn reconstruct(&self) -> Vec<usize> {
        let mut map = vec![0; self.processors * self.window];
        for step in &self.steps {
            for a in &step.accesses {
                map[step.j + a.proc * self.window] = a.bank * self.window + a.addr;
            }
        }
        map
    }

    /// Whether every step touches each bank exactly once.
    pub fn exactly_once_per_step(&self) -> bool {
        let mut hits = vec![0usize; self.processors];
        self.steps.iter().all(|step| {
            hits.iter_mut().for_each(|h| *h = 0);
            step.accesses.iter().for_each(|a| hits[a.bank] += 1);
            hits.iter().all(|&h| h == 1)
        })
    }
}

fn step_contentions(step: &Step, direction: Direction, iteration: usize, m: usize, out: &mut Vec<ContentionEvent>) {
    let mut by_bank: Vec<Vec<usize>> = vec![Vec::new(); m];
    for a in &step.accesses {
        by_bank[a.bank].push(a.proc);
    }
    for (bank, procs) in by_bank.into_iter().enumerate() {
        if procs.len() > 1 {
            out.push(ContentionEvent {
                step: step.j,
                direction,
                iteration,
                bank,
                processors: procs,
            });
        }
    }
}

/// Bank accesses of `M` lock-step processors for one exchange direction.
/// Interleaving reads through `pi`, deinterleaving through its inverse.
pub fn trace_access(pi: &Interleaver, m: usize, direction: Direction) -> Result<BankAccessTrace> {
    let cfg = WindowConfig::from_processors(pi.len(), m)?;
    let inv;
    let map = match direction {
        Direction::Interleave => pi,
        Direction::Deinterleave => {
            inv = pi.inverse();
            &inv
        }
    };
    let steps: Vec<Step> = (0..cfg.window)
        .map(|j| Step {
            j,
            accesses: (0..m)
                .map(|t| {
                    let idx = map.get(cfg.position(j, t));
                    Access {
                        proc: t,
                        bank: cfg.bank(idx),
                        addr: idx % cfg.window,
                    }
                })
                .collect(),
        })
        .collect();
    let mut contentions = Vec::new();
    for step in &steps {
        step_contentions(step, direction, 0, m, &mut contentions);
    }
    Ok(BankAccessTrace {
        processors: m,
        window: cfg.window,
        direction,
        steps,
        contentions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Enforcement {
    /// Contention aborts decoding with [`Error::Contention`].
    #[default]
    Strict,
    /// Contention is recorded and decoding continues.
    Record,
}

/// Extrinsic exchange routed through `M` banks of `W` words.
pub struct BankedExchange {
    cfg: WindowConfig,
    banks: Vec<Vec<f64>>,
    traces: [BankAccessTrace; 2],
    enforcement: Enforcement,
    events: Vec<ContentionEvent>,
}

impl BankedExchange {
    pub fn new(pi: &Interleaver, m: usize, enforcement: Enforcement) -> Result<Self> {
        let cfg = WindowConfig::from_processors(pi.len(), m)?;
        Ok(Self {
            cfg,
            banks: vec![vec![0.0; cfg.window]; m],
            traces: [
                trace_access(pi, m, Direction::Interleave)?,
                trace_access(pi, m, Direction::Deinterleave)?,
            ],
            enforcement,
            events: Vec::new(),
        })
    }

    pub fn traces(&self) -> &[BankAccessTrace; 2] {
        &self.traces
    }

    pub fn events(&self) -> &[ContentionEvent] {
        &self.events
    }

    fn exchange(&mut self, direction: Direction, iteration: usize, src: &[f64], out: &mut [f64]) -> Result<()> {
        let w = self.cfg.window;
        // Write phase: processor t stores its own window into bank t.
        for j in 0..w {
            for (t, bank) in self.banks.iter_mut().enumerate() {
                bank[j] = src[j + t * w];
            }
        }
        // Read phase, one lock-step offset at a time.
        let trace = &self.traces[direction as usize];
        for step in &trace.steps {
            let before = self.events.len();
            step_contentions(step, direction, iteration, self.cfg.processors, &mut self.events);
            if self.enforcement == Enforcement::Strict && self.events.len() > before {
                return Err(Error::Contention(Box::new(self.events[before].clone())));
            }
            for a in &step.accesses {
                out[step.j + a.proc * w] = self.banks[a.bank][a.addr];
            }
        }
        Ok(())
    }
}

impl ExtrinsicExchange for BankedExchange {
    fn interleave(&mut self, iteration: usize, natural: &[f64], out: &mut [f64]) -> Result<()> {
        self.exchange(Direction::Interleave, iteration, natural, out)
    }

    fn deinterleave(&mut self, iteration: usize, interleaved: &[f64], out: &mut [f64]) -> Result<()> {
        self.exchange(Direction::Deinterleave, iteration, interleaved, out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelOutput {
    pub output: TurboOutput,
    /// Interleave and deinterleave read patterns.
    pub traces: [BankAccessTrace; 2],
    /// Contentions observed during decoding, in logical-time order.
    pub contentions: Vec<ContentionEvent>,
}

pub fn parallel_turbo_decode(
    llrs: &FrameLlrs,
    pi: &Interleaver,
    m: usize,
    iterations: usize,
    enforcement: Enforcement,
) -> Result<ParallelOutput> {
    parallel_turbo_decode_with(llrs, pi, m, iterations, enforcement, &TurboConfig::default())
}

pub fn parallel_turbo_decode_with(
    llrs: &FrameLlrs,
    pi: &Interleaver,
    m: usize,
    iterations: usize,
    enforcement: Enforcement,
    config: &TurboConfig,
) -> Result<ParallelOutput> {
    let mut exchange = BankedExchange::new(pi, m, enforcement)?;
    let output = turbo_decode_with(llrs, pi, iterations, config, &mut exchange)?;
    Ok(ParallelOutput {
        output,
        traces: exchange.traces,
        contentions: exchange.events,
    })
}

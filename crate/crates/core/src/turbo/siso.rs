//! Log-domain BCJR over a terminated RSC trellis.
//!
//! Inputs are LLRs `ln P(0)/P(1)`. A bit `b` with LLR `L` contributes
//! `+L/2` to a branch metric when `b = 0` and `-L/2` when `b = 1`. The final
//! `memory` trellis steps are the tail: only the zero-feeding branch leaves
//! each state, and the backward recursion starts in state 0.

use serde::Serialize;

use super::rsc::Trellis;
use crate::error::{domain, Error, Result};

/// Extrinsic values are clipped to `[-EXTRINSIC_CLIP, EXTRINSIC_CLIP]`.
pub const EXTRINSIC_CLIP: f64 = 50.0;

const NEG: f64 = -1.0e30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    /// Exact Jacobian logarithm `max(a, b) + ln(1 + e^{-|a - b|})`.
    #[default]
    LogMap,
    /// Drops the correction term.
    MaxLogMap,
}

impl DecoderKind {
    #[inline(always)]
    fn max_star(self, a: f64, b: f64) -> f64 {
        match self {
            DecoderKind::LogMap => {
                let (hi, lo) = if a > b { (a, b) } else { (b, a) };
                let d = lo - hi;
                if d < -40.0 {
                    hi
                } else {
                    hi + d.exp().ln_1p()
                }
            }
            DecoderKind::MaxLogMap => a.max(b),
        }
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "log-map" | "logmap" => Ok(DecoderKind::LogMap),
            "max-log-map" | "maxlogmap" => Ok(DecoderKind::MaxLogMap),
            other => Err(Error::Parse(format!("unknown decoder kind {other:?}"))),
        }
    }
}

/// Soft input for one constituent decoder.
///
/// `systematic` and `parity` cover `N + memory` trellis steps (tail
/// included); `apriori` covers the `N` info steps.
#[derive(Debug, Clone, Copy)]
pub struct SisoInput<'a> {
    pub systematic: &'a [f64],
    pub parity: &'a [f64],
    pub apriori: &'a [f64],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SisoOutput {
    /// Clipped `APP - apriori - systematic`.
    pub extrinsic: Vec<f64>,
    /// A-posteriori LLRs of the info bits.
    pub app: Vec<f64>,
}

/// Forward/backward metrics, normalized per step. `*_offset[k]` is the
/// running sum of what was subtracted, so `alpha[k][s] + alpha_offset[k]`
/// is the unnormalized metric.
struct Lattice {
    steps: usize,
    states: usize,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    alpha_offset: Vec<f64>,
    beta_offset: Vec<f64>,
}

fn check_input(input: &SisoInput<'_>, n: usize, memory: usize) -> Result<()> {
    if input.apriori.len() != n {
        return domain(format!("apriori length {} != {n}", input.apriori.len()));
    }
    if input.systematic.len() != n + memory || input.parity.len() != n + memory {
        return domain(format!(
            "channel LLR lengths ({}, {}) != {}",
            input.systematic.len(),
            input.parity.len(),
            n + memory
        ));
    }
    let all = input
        .apriori
        .iter()
        .chain(input.systematic)
        .chain(input.parity)
        .enumerate();
    for (i, v) in all {
        if !v.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
    }
    Ok(())
}

/// `gamma[u][c]` at step `k` for input bit `u` and parity bit `c`.
#[inline(always)]
fn branch_metrics(sys: f64, par: f64, apri: f64) -> [[f64; 2]; 2] {
    let u = 0.5 * (sys + apri);
    let p = 0.5 * par;
    [[u + p, u - p], [-u + p, -u - p]]
}

fn run_lattice(trellis: &Trellis, kind: DecoderKind, input: &SisoInput<'_>, n: usize) -> Lattice {
    let ns = trellis.num_states();
    let steps = input.systematic.len();
    let mut alpha = vec![NEG; (steps + 1) * ns];
    let mut beta = vec![NEG; (steps + 1) * ns];
    let mut alpha_offset = vec![0.0; steps + 1];
    let mut beta_offset = vec![0.0; steps + 1];

    alpha[0] = 0.0;
    for k in 0..steps {
        let apri = if k < n { input.apriori[k] } else { 0.0 };
        let g = branch_metrics(input.systematic[k], input.parity[k], apri);
        let (cur, next) = alpha.split_at_mut((k + 1) * ns);
        let cur = &cur[k * ns..];
        let next = &mut next[..ns];
        if k < n {
            for (s2, slot) in next.iter_mut().enumerate() {
                let [(p0, u0), (p1, u1)] = *trellis.predecessors(s2);
                let (p0, p1) = (p0 as usize, p1 as usize);
                let m0 = cur[p0] + g[u0 as usize][trellis.parity(p0, u0) as usize];
                let m1 = cur[p1] + g[u1 as usize][trellis.parity(p1, u1) as usize];
                *slot = kind.max_star(m0, m1);
            }
        } else {
            for (s, &a) in cur.iter().enumerate() {
                let u = trellis.tail_input(s);
                let m = a + g[u as usize][trellis.parity(s, u) as usize];
                let s2 = trellis.next(s, u);
                next[s2] = kind.max_star(next[s2], m);
            }
        }
        let norm = next.iter().copied().fold(NEG, f64::max);
        next.iter_mut().for_each(|a| *a -= norm);
        alpha_offset[k + 1] = alpha_offset[k] + norm;
    }

    beta[steps * ns] = 0.0;
    for k in (0..steps).rev() {
        let apri = if k < n { input.apriori[k] } else { 0.0 };
        let g = branch_metrics(input.systematic[k], input.parity[k], apri);
        let (cur, next) = beta.split_at_mut((k + 1) * ns);
        let cur = &mut cur[k * ns..];
        let next = &next[..ns];
        for (s, slot) in cur.iter_mut().enumerate() {
            *slot = if k < n {
                let m0 = next[trellis.next(s, 0)] + g[0][trellis.parity(s, 0) as usize];
                let m1 = next[trellis.next(s, 1)] + g[1][trellis.parity(s, 1) as usize];
                kind.max_star(m0, m1)
            } else {
                let u = trellis.tail_input(s);
                next[trellis.next(s, u)] + g[u as usize][trellis.parity(s, u) as usize]
            };
        }
        let norm = cur.iter().copied().fold(NEG, f64::max);
        cur.iter_mut().for_each(|b| *b -= norm);
        beta_offset[k] = beta_offset[k + 1] + norm;
    }

    Lattice {
        steps,
        states: ns,
        alpha,
        beta,
        alpha_offset,
        beta_offset,
    }
}

/// Normalized log-metrics of the `u = 0` and `u = 1` branch sets at info step `k`.
#[inline]
fn branch_sums(
    trellis: &Trellis,
    kind: DecoderKind,
    lat: &Lattice,
    input: &SisoInput<'_>,
    k: usize,
) -> (f64, f64) {
    let ns = lat.states;
    let g = branch_metrics(input.systematic[k], input.parity[k], input.apriori[k]);
    let a = &lat.alpha[k * ns..(k + 1) * ns];
    let b = &lat.beta[(k + 1) * ns..(k + 2) * ns];
    let mut sum = [NEG; 2];
    for s in 0..ns {
        for u in 0..2u8 {
            let m = a[s] + g[u as usize][trellis.parity(s, u) as usize] + b[trellis.next(s, u)];
            sum[u as usize] = kind.max_star(sum[u as usize], m);
        }
    }
    (sum[0], sum[1])
}

/// One SISO pass over an `N`-bit frame.
pub fn siso_decode(trellis: &Trellis, kind: DecoderKind, input: &SisoInput<'_>) -> Result<SisoOutput> {
    let n = input.apriori.len();
    check_input(input, n, trellis.memory())?;
    let lat = run_lattice(trellis, kind, input, n);
    let mut extrinsic = Vec::with_capacity(n);
    let mut app = Vec::with_capacity(n);
    for k in 0..n {
        let (l0, l1) = branch_sums(trellis, kind, &lat, input, k);
        let l = l0 - l1;
        app.push(l);
        let e = l - input.apriori[k] - input.systematic[k];
        extrinsic.push(e.clamp(-EXTRINSIC_CLIP, EXTRINSIC_CLIP));
    }
    Ok(SisoOutput { extrinsic, app })
}

/// Per info bit, `(ln P(u=0 | y), ln P(u=1 | y))` relative to the total
/// path metric of the terminated trellis. Exponentiated pairs sum to one
/// under exact log-MAP; used to check forward/backward consistency.
pub fn app_log_probabilities(
    trellis: &Trellis,
    kind: DecoderKind,
    input: &SisoInput<'_>,
) -> Result<Vec<(f64, f64)>> {
    let n = input.apriori.len();
    check_input(input, n, trellis.memory())?;
    let lat = run_lattice(trellis, kind, input, n);
    let ns = lat.states;
    let total = lat.alpha[lat.steps * ns] + lat.alpha_offset[lat.steps];
    Ok((0..n)
        .map(|k| {
            let (l0, l1) = branch_sums(trellis, kind, &lat, input, k);
            let shift = lat.alpha_offset[k] + lat.beta_offset[k + 1] - total;
            (l0 + shift, l1 + shift)
        })
        .collect())
}

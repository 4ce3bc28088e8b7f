//! Iterative turbo decoding.
//!
//! Decoder 1 works in natural order, decoder 2 in interleaved order. Each
//! iteration moves decoder 1's extrinsic into decoder 2's a-priori slot
//! (interleave, `la2[k] = e1[pi(k)]`) and back (deinterleave,
//! `la1[pi(k)] = e2[k]`). The move itself is delegated to an
//! [`ExtrinsicExchange`] so that the parallel harness can route it through
//! banked memory while the arithmetic stays identical.

use super::channel::FrameLlrs;
use super::rsc::{RscSpec, Trellis};
use super::siso::{siso_decode, DecoderKind, SisoInput};
use crate::error::{domain, Result};
use crate::interleave::Interleaver;

pub trait ExtrinsicExchange {
    /// `out[k] = natural[pi(k)]`.
    fn interleave(&mut self, iteration: usize, natural: &[f64], out: &mut [f64]) -> Result<()>;
    /// `out[pi(k)] = interleaved[k]`.
    fn deinterleave(&mut self, iteration: usize, interleaved: &[f64], out: &mut [f64]) -> Result<()>;
}

/// Plain array indexing.
pub struct SerialExchange<'a> {
    pi: &'a Interleaver,
}

impl<'a> SerialExchange<'a> {
    pub fn new(pi: &'a Interleaver) -> Self {
        Self { pi }
    }
}

impl ExtrinsicExchange for SerialExchange<'_> {
    fn interleave(&mut self, _iteration: usize, natural: &[f64], out: &mut [f64]) -> Result<()> {
        for (o, &y) in out.iter_mut().zip(self.pi.as_slice()) {
            *o = natural[y];
        }
        Ok(())
    }

    fn deinterleave(&mut self, _iteration: usize, interleaved: &[f64], out: &mut [f64]) -> Result<()> {
        for (&v, &y) in interleaved.iter().zip(self.pi.as_slice()) {
            out[y] = v;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TurboConfig {
    pub rsc: RscSpec,
    pub kind: DecoderKind,
}

/// Extrinsic arrays produced during one iteration: decoder 1's in natural
/// order and decoder 2's in interleaved order.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub extrinsic1: Vec<f64>,
    pub extrinsic2: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TurboOutput {
    pub bits: Vec<u8>,
    /// Final a-posteriori LLRs in natural order.
    pub app: Vec<f64>,
    pub iterations: Vec<IterationRecord>,
}

/// Log-MAP turbo decoding with the default constituent code.
pub fn turbo_decode(llrs: &FrameLlrs, pi: &Interleaver, iterations: usize) -> Result<TurboOutput> {
    turbo_decode_with(llrs, pi, iterations, &TurboConfig::default(), &mut SerialExchange::new(pi))
}

pub fn turbo_decode_with<X: ExtrinsicExchange>(
    llrs: &FrameLlrs,
    pi: &Interleaver,
    iterations: usize,
    config: &TurboConfig,
    exchange: &mut X,
) -> Result<TurboOutput> {
    let trellis = Trellis::new(&config.rsc)?;
    decode_frame(llrs, pi, iterations, &trellis, config.kind, exchange)
}

pub(crate) fn decode_frame<X: ExtrinsicExchange>(
    llrs: &FrameLlrs,
    pi: &Interleaver,
    iterations: usize,
    trellis: &Trellis,
    kind: DecoderKind,
    exchange: &mut X,
) -> Result<TurboOutput> {
    let n = llrs.info_len();
    if iterations == 0 {
        return domain("iterations must be at least 1");
    }
    if pi.len() != n {
        return domain(format!("interleaver length {} != frame length {n}", pi.len()));
    }
    let m = trellis.memory();
    if llrs.tail1_sys.len() != m || llrs.tail2_sys.len() != m || llrs.parity1.len() != n || llrs.parity2.len() != n {
        return domain("LLR frame layout does not match the constituent code");
    }

    let sys1: Vec<f64> = llrs.systematic.iter().chain(&llrs.tail1_sys).copied().collect();
    let par1: Vec<f64> = llrs.parity1.iter().chain(&llrs.tail1_par).copied().collect();
    let mut sys2 = pi.permute(&llrs.systematic);
    sys2.extend(&llrs.tail2_sys);
    let par2: Vec<f64> = llrs.parity2.iter().chain(&llrs.tail2_par).copied().collect();

    let mut la1 = vec![0.0; n];
    let mut la2 = vec![0.0; n];
    let mut records = Vec::with_capacity(iterations);
    let mut e1 = Vec::new();
    for it in 0..iterations {
        e1 = siso_decode(
            trellis,
            kind,
            &SisoInput {
                systematic: &sys1,
                parity: &par1,
                apriori: &la1,
            },
        )?
        .extrinsic;
        exchange.interleave(it, &e1, &mut la2)?;
        let e2 = siso_decode(
            trellis,
            kind,
            &SisoInput {
                systematic: &sys2,
                parity: &par2,
                apriori: &la2,
            },
        )?
        .extrinsic;
        exchange.deinterleave(it, &e2, &mut la1)?;
        records.push(IterationRecord {
            extrinsic1: e1.clone(),
            extrinsic2: e2,
        });
    }

    let app: Vec<f64> = (0..n).map(|i| llrs.systematic[i] + e1[i] + la1[i]).collect();
    let bits = app.iter().map(|&l| (l < 0.0) as u8).collect();
    Ok(TurboOutput {
        bits,
        app,
        iterations: records,
    })
}

//! Monte-Carlo frame error rate simulation.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::channel::{awgn_channel_with, substream};
use super::decoder::{decode_frame, SerialExchange};
use super::encoder::{code_rate, encode_with};
use super::rsc::{RscSpec, Trellis};
use super::siso::DecoderKind;
use crate::error::{domain, Result};
use crate::interleave::Interleaver;

/// Frames decoded between stop-criterion checks. Fixed so that results do
/// not depend on the thread count.
const BATCH: u64 = 16;

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub interleaver: Interleaver,
    /// Eb/N0 grid in dB; `f64::INFINITY` simulates the noiseless channel.
    pub ebn0_db: Vec<f64>,
    pub max_frames: u64,
    pub target_frame_errors: u64,
    pub iterations: usize,
    pub seed: u64,
    pub kind: DecoderKind,
    pub rsc: RscSpec,
}

impl SimConfig {
    pub fn new(interleaver: Interleaver, ebn0_db: Vec<f64>) -> Self {
        Self {
            interleaver,
            ebn0_db,
            max_frames: 100_000,
            target_frame_errors: 100,
            iterations: 8,
            seed: 1,
            kind: DecoderKind::LogMap,
            rsc: RscSpec::umts(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return domain("iterations must be at least 1");
        }
        if self.target_frame_errors == 0 {
            return domain("target frame errors must be at least 1");
        }
        if self.max_frames == 0 {
            return domain("max frames must be at least 1");
        }
        if self.ebn0_db.iter().any(|x| x.is_nan()) {
            return domain("Eb/N0 grid contains NaN");
        }
        self.rsc.validate()
    }

    pub fn rate(&self) -> f64 {
        code_rate(self.interleaver.len(), &self.rsc)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FerPoint {
    pub ebn0_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub fer: f64,
    pub ber: f64,
    /// Normal-approximation 95% half-width of the FER estimate.
    pub ci95: f64,
}

impl FerPoint {
    fn from_tally(ebn0_db: f64, frames: u64, frame_errors: u64, bit_errors: u64, n: usize) -> Self {
        let fer = frame_errors as f64 / frames as f64;
        let ber = bit_errors as f64 / (frames as f64 * n as f64);
        let ci95 = 1.96 * (fer * (1.0 - fer) / frames as f64).sqrt();
        Self {
            ebn0_db,
            frames,
            frame_errors,
            bit_errors,
            fer,
            ber,
            ci95,
        }
    }

    pub fn lower(&self) -> f64 {
        (self.fer - self.ci95).max(0.0)
    }

    pub fn upper(&self) -> f64 {
        (self.fer + self.ci95).min(1.0)
    }
}

/// Bit errors of one simulated frame. Info bits and channel noise both
/// come from the `(seed, point, frame)` substream.
fn simulate_frame(config: &SimConfig, trellis: &Trellis, point: usize, frame: u64) -> Result<u64> {
    let pi = &config.interleaver;
    let n = pi.len();
    let mut rng = substream(config.seed, &[point as u64, frame]);
    let info: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    let coded = encode_with(&info, pi, trellis, config.rsc.memory)?;
    let llrs = awgn_channel_with(&coded, config.ebn0_db[point], config.rate(), &mut rng);
    let out = decode_frame(
        &llrs,
        pi,
        config.iterations,
        trellis,
        config.kind,
        &mut SerialExchange::new(pi),
    )?;
    Ok(out.bits.iter().zip(&info).filter(|(a, b)| a != b).count() as u64)
}

/// One FER point per Eb/N0 value. Each point runs until the target number
/// of frame errors or `max_frames`, checked every batch of frames.
pub fn run_fer(config: &SimConfig) -> Result<Vec<FerPoint>> {
    config.validate()?;
    let trellis = Trellis::new(&config.rsc)?;
    let n = config.interleaver.len();
    let mut points = Vec::with_capacity(config.ebn0_db.len());
    for (p, &ebn0) in config.ebn0_db.iter().enumerate() {
        let (mut frames, mut frame_errors, mut bit_errors) = (0u64, 0u64, 0u64);
        while frames < config.max_frames && frame_errors < config.target_frame_errors {
            let end = (frames + BATCH).min(config.max_frames);
            let errs: Vec<u64> = (frames..end)
                .into_par_iter()
                .map(|f| simulate_frame(config, &trellis, p, f))
                .collect::<Result<_>>()?;
            for e in errs {
                bit_errors += e;
                frame_errors += (e > 0) as u64;
            }
            frames = end;
        }
        points.push(FerPoint::from_tally(ebn0, frames, frame_errors, bit_errors, n));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{materialize, PolySpec};

    fn ex1() -> Interleaver {
        materialize(&PolySpec::quadratic(256, 159, 64).unwrap()).unwrap()
    }

    #[test]
    fn saturated_regime_stops_at_target() {
        let mut cfg = SimConfig::new(ex1(), vec![-5.0]);
        cfg.target_frame_errors = 20;
        cfg.iterations = 2;
        let r = run_fer(&cfg).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].frame_errors >= 20);
        assert!(r[0].frames <= 32);
        assert!(r[0].fer > 0.9);
    }

    #[test]
    fn noiseless_point_is_error_free() {
        let mut cfg = SimConfig::new(ex1(), vec![f64::INFINITY]);
        cfg.max_frames = 40;
        let r = run_fer(&cfg).unwrap();
        assert_eq!(r[0].frames, 40);
        assert_eq!(r[0].frame_errors, 0);
        assert_eq!(r[0].fer, 0.0);
        assert_eq!(r[0].ci95, 0.0);
    }

    #[test]
    fn same_seed_same_tallies() {
        let mut cfg = SimConfig::new(ex1(), vec![0.4, 0.8]);
        cfg.max_frames = 48;
        cfg.target_frame_errors = 10;
        cfg.iterations = 4;
        cfg.seed = 99;
        assert_eq!(run_fer(&cfg).unwrap(), run_fer(&cfg).unwrap());
    }

    #[test]
    fn fer_invariants() {
        let p = FerPoint::from_tally(1.0, 200, 50, 700, 256);
        assert_eq!(p.fer, 0.25);
        assert!(p.lower() < p.fer && p.fer < p.upper());
        assert!((p.ber - 700.0 / 51200.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = SimConfig::new(ex1(), vec![1.0]);
        cfg.iterations = 0;
        assert!(run_fer(&cfg).is_err());
        let mut cfg = SimConfig::new(ex1(), vec![f64::NAN]);
        cfg.max_frames = 1;
        assert!(run_fer(&cfg).is_err());
    }
}

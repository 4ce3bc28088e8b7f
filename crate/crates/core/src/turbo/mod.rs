//! Rate-1/3 parallel concatenated turbo code: two terminated 8-state RSC
//! encoders, BPSK/AWGN channel, iterative log-MAP decoding and Monte-Carlo
//! FER measurement.

pub mod channel;
mod decoder;
mod dmin;
mod encoder;
pub mod rsc;
mod siso;
mod sim;

pub use channel::{awgn_channel, noise_variance, FrameLlrs, NOISELESS_LLR};
pub use decoder::{
    turbo_decode, turbo_decode_with, ExtrinsicExchange, IterationRecord, SerialExchange,
    TurboConfig, TurboOutput,
};
pub use dmin::{codeword_weight, dmin_upper_bound, DminBound, MAX_INPUT_WEIGHT};
pub use encoder::{code_rate, encode, CodeFrame};
pub use rsc::{RscEncoder, RscSpec, Trellis};
pub use sim::{run_fer, FerPoint, SimConfig};
pub use siso::{app_log_probabilities, siso_decode, DecoderKind, SisoInput, SisoOutput, EXTRINSIC_CLIP};

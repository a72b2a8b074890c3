//! Telemetry link coding for a sounding-rocket downlink: GF(256)/GF(2)
//! arithmetic, Reed-Solomon and Hamming block codes, a sliding-window
//! fountain code, wire framing, a region-scheduled BSC channel, the four
//! end-to-end schemes and a Monte Carlo campaign runner.

pub mod block_codes;
pub mod channel;
pub mod fountain;
pub mod framing;
pub mod galois;
pub mod pipeline;
pub mod simulator;

pub use block_codes::{BlockCodeError, ReedSolomon, RsParams};
pub use channel::{Channel, ChannelConfig, ChannelError, Region, RegionSchedule};
pub use fountain::{CombinationDescriptor, FountainDecoder, FountainEncoder, FountainError};
pub use framing::{Frame, FramingError};
pub use galois::{BitVector, Eliminator, GaloisError, Gf256};
pub use pipeline::{FlightDecoder, FlightEncoder, FlightRecovery, PipelineError, RateBudget, Scheme};
pub use simulator::{run_campaign, run_trial, CampaignConfig, SimError, SimReport};

//! Four-region flight channel.
//!
//! Every byte crosses the telemetry link as a Hamming (12,8) word over a
//! binary symmetric channel whose crossover probability comes from the
//! region's SNR under hard-decision antipodal signaling:
//! `p = Q(sqrt(2 · 10^(snr_db / 10)))`. The reentry region is a total
//! blackout. Region transitions are fixed times.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::block_codes::{hamming_decode, hamming_encode};
use crate::framing::{legacy_pack, legacy_unpack, LEGACY_DATA_LEN};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("invalid region schedule: {0}")]
    InvalidSchedule(String),
    #[error("target packet-error rate {0} must lie strictly between 0 and 1")]
    InvalidTarget(f64),
    #[error(
        "target PER {target} not bracketed: PER spans [{per_high_snr}, {per_low_snr}] over [{low_db}, {high_db}] dB"
    )]
    NonBracketing {
        target: f64,
        low_db: f64,
        high_db: f64,
        per_low_snr: f64,
        per_high_snr: f64,
    },
    #[error("calibration converged at {snr_db} dB with PER {achieved}, more than 0.02 from target {target}")]
    ToleranceNotMet { target: f64, achieved: f64, snr_db: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Powered ascent, one ground station.
    Ascent,
    /// Both stations online; includes the microgravity period.
    Coast,
    /// Reentry communications blackout.
    Blackout,
    /// Descent until loss of synchronism.
    Descent,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::Ascent, Region::Coast, Region::Blackout, Region::Descent];

    pub fn index(self) -> usize {
        self as usize
    }

    /// 1-based region number as used in flight reports.
    pub fn number(self) -> usize {
        self.index() + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Region::Ascent => "ascent",
            Region::Coast => "coast",
            Region::Blackout => "blackout",
            Region::Descent => "descent",
        }
    }

    pub fn is_blackout(self) -> bool {
        self == Region::Blackout
    }
}

/// Deterministic flight timeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSchedule {
    /// Start second of each region; the first must be 0.
    pub boundaries: [u32; 4],
    /// Flight end (exclusive), seconds.
    pub end: u32,
    pub snr_db: [f64; 4],
}

impl Default for RegionSchedule {
    fn default() -> Self {
        RegionSchedule {
            boundaries: [0, 63, 465, 504],
            end: 586,
            snr_db: [4.75, 5.10, -1.60, 3.65],
        }
    }
}

impl RegionSchedule {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.boundaries[0] != 0 {
            return Err(ChannelError::InvalidSchedule("first region must start at 0".into()));
        }
        let mut edges = self.boundaries.to_vec();
        edges.push(self.end);
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ChannelError::InvalidSchedule(format!(
                "boundaries {:?} and end {} must be strictly increasing",
                self.boundaries, self.end
            )));
        }
        if self.end > u16::MAX as u32 {
            return Err(ChannelError::InvalidSchedule("flight longer than 65535 s".into()));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(ChannelError::InvalidSchedule("non-finite SNR".into()));
        }
        Ok(())
    }

    pub fn duration(&self) -> u32 {
        self.end
    }

    /// Region containing second `t`; `None` past the end of flight.
    pub fn region_at(&self, t: u32) -> Option<Region> {
        if t >= self.end {
            return None;
        }
        let idx = self.boundaries.iter().rposition(|&b| b <= t).unwrap();
        Some(Region::ALL[idx])
    }

    pub fn seconds_in(&self, region: Region) -> u32 {
        let i = region.index();
        let next = if i == 3 { self.end } else { self.boundaries[i + 1] };
        next - self.boundaries[i]
    }

    pub fn seconds(&self, region: Region) -> std::ops::Range<u32> {
        let start = self.boundaries[region.index()];
        start..start + self.seconds_in(region)
    }

    pub fn snr(&self, region: Region) -> f64 {
        self.snr_db[region.index()]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub schedule: RegionSchedule,
    /// Added to every non-blackout region SNR (0, -0.5, ... -2.0 in campaigns).
    pub snr_offset_db: f64,
    pub rng_seed: u64,
    /// Two-station selection; only used by the legacy-packet calibration model.
    pub diversity: bool,
}

impl ChannelConfig {
    pub fn new(schedule: RegionSchedule, snr_offset_db: f64, rng_seed: u64) -> Self {
        ChannelConfig {
            schedule,
            snr_offset_db,
            rng_seed,
            diversity: false,
        }
    }

    /// SNR in effect during `region`, or `None` for the blackout.
    pub fn effective_snr(&self, region: Region) -> Option<f64> {
        if region.is_blackout() {
            None
        } else {
            Some(self.schedule.snr(region) + self.snr_offset_db)
        }
    }
}

/// Gaussian tail `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Channel-bit error probability for antipodal hard-decision AWGN.
pub fn ber_from_snr(snr_db: f64) -> f64 {
    let ratio = 10f64.powf(snr_db / 10.0);
    q_function((2.0 * ratio).sqrt())
}

/// Residual byte-error rate after Hamming (12,8) single-error correction,
/// counting every pattern of two or more flips as an error.
pub fn hamming_residual_byte_error(p: f64) -> f64 {
    1.0 - (1.0 - p).powi(12) - 12.0 * p * (1.0 - p).powi(11)
}

/// Hamming-encodes each byte, flips each of its 12 bits with probability
/// `p`, and decodes in place. Skips between flips are drawn geometrically.
pub fn corrupt_bytes<R: Rng + ?Sized>(rng: &mut R, buf: &mut [u8], p: f64) {
    if p.is_nan() || p <= 0.0 || buf.is_empty() {
        return;
    }
    let total_bits = buf.len() as u64 * 12;
    let gap = Geometric::new(p.min(1.0)).expect("valid probability");
    let mut bit = gap.sample(rng);
    let mut current = usize::MAX;
    let mut pattern = 0u16;
    while bit < total_bits {
        let byte = (bit / 12) as usize;
        if byte != current {
            if current != usize::MAX {
                apply_pattern(&mut buf[current], pattern);
            }
            current = byte;
            pattern = 0;
        }
        pattern ^= 1 << (bit % 12);
        bit = bit.saturating_add(1).saturating_add(gap.sample(rng));
    }
    if current != usize::MAX {
        apply_pattern(&mut buf[current], pattern);
    }
}

#[inline]
fn apply_pattern(b: &mut u8, pattern: u16) {
    let word = hamming_encode(*b);
    *b = hamming_decode(crate::block_codes::HammingWord(word.0 ^ pattern));
}

/// One trial's view of the flight channel.
#[derive(Clone, Debug)]
pub struct Channel {
    config: ChannelConfig,
    rng: ChaCha8Rng,
}

impl Channel {
    pub fn new(config: ChannelConfig) -> Self {
        let rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        Channel { config, rng }
    }

    pub fn config(&self) -> &ChannelConfig {
        &self.config
    }

    /// Crossover probability at second `t`; `None` during blackout or after the flight.
    pub fn bit_error_prob(&self, t: u32) -> Option<f64> {
        let region = self.config.schedule.region_at(t)?;
        self.config.effective_snr(region).map(ber_from_snr)
    }

    /// Sends `bytes` at second `t`. `None` means everything was dropped.
    pub fn transmit(&mut self, bytes: &[u8], t: u32) -> Option<Vec<u8>> {
        let mut buf = bytes.to_vec();
        self.transmit_in_place(&mut buf, t).then_some(buf)
    }

    /// In-place variant of [`Channel::transmit`]; returns `false` if dropped.
    pub fn transmit_in_place(&mut self, buf: &mut [u8], t: u32) -> bool {
        match self.bit_error_prob(t) {
            None => false,
            Some(p) => {
                corrupt_bytes(&mut self.rng, buf, p);
                true
            }
        }
    }
}

/// Post-detection selection between two receptions of the same packet:
/// the first that passed its checksum wins; if neither did, the first failure.
pub fn diversity_select<T, E>(rx_a: Result<T, E>, rx_b: Result<T, E>) -> Result<T, E> {
    match (rx_a, rx_b) {
        (Ok(a), _) => Ok(a),
        (Err(_), Ok(b)) => Ok(b),
        (Err(e), Err(_)) => Err(e),
    }
}

/// Legacy 44-byte packet experiment used for SNR calibration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PacketModel {
    pub packets: usize,
    pub seed: u64,
    pub diversity: bool,
}

impl Default for PacketModel {
    fn default() -> Self {
        PacketModel {
            packets: 20_000,
            seed: 0x5EED,
            diversity: false,
        }
    }
}

/// Simulated legacy-packet loss rate at a constant SNR. The same model seed
/// reuses the same data and noise stream at every SNR.
pub fn simulate_legacy_per(snr_db: f64, model: &PacketModel) -> f64 {
    let p = ber_from_snr(snr_db);
    let mut data_rng = ChaCha8Rng::seed_from_u64(model.seed);
    let mut noise_a = ChaCha8Rng::seed_from_u64(model.seed.wrapping_add(1));
    let mut noise_b = ChaCha8Rng::seed_from_u64(model.seed.wrapping_add(2));
    let mut lost = 0usize;
    for _ in 0..model.packets {
        let data: [u8; LEGACY_DATA_LEN] = data_rng.random();
        let tx = legacy_pack(&data).unwrap();
        let mut a = tx;
        corrupt_bytes(&mut noise_a, &mut a, p);
        let rx_a = legacy_unpack(&a);
        let rx = if model.diversity {
            let mut b = tx;
            corrupt_bytes(&mut noise_b, &mut b, p);
            diversity_select(rx_a, legacy_unpack(&b))
        } else {
            rx_a
        };
        // an undetected error is still a lost packet
        if rx.ok() != Some(data) {
            lost += 1;
        }
    }
    lost as f64 / model.packets.max(1) as f64
}

pub const CALIBRATION_LOW_DB: f64 = -2.0;
pub const CALIBRATION_HIGH_DB: f64 = 15.0;
pub const CALIBRATION_TOLERANCE: f64 = 0.02;

/// Bisects for the SNR whose simulated legacy PER matches `target_per`.
pub fn calibrate_snr(target_per: f64, model: &PacketModel) -> Result<f64, ChannelError> {
    calibrate_snr_in(target_per, model, CALIBRATION_LOW_DB, CALIBRATION_HIGH_DB)
}

/// [`calibrate_snr`] over an explicit SNR bracket in dB.
pub fn calibrate_snr_in(target_per: f64, model: &PacketModel, low_db: f64, high_db: f64) -> Result<f64, ChannelError> {
    if !(target_per > 0.0 && target_per < 1.0) {
        return Err(ChannelError::InvalidTarget(target_per));
    }
    let (mut lo, mut hi) = (low_db, high_db);
    let per_lo = simulate_legacy_per(lo, model);
    let per_hi = simulate_legacy_per(hi, model);
    if !(per_hi <= target_per && target_per <= per_lo) {
        return Err(ChannelError::NonBracketing {
            target: target_per,
            low_db: lo,
            high_db: hi,
            per_low_snr: per_lo,
            per_high_snr: per_hi,
        });
    }
    for _ in 0..24 {
        let mid = 0.5 * (lo + hi);
        if simulate_legacy_per(mid, model) > target_per {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let snr = 0.5 * (lo + hi);
    let achieved = simulate_legacy_per(snr, model);
    if (achieved - target_per).abs() > CALIBRATION_TOLERANCE {
        return Err(ChannelError::ToleranceNotMet {
            target: target_per,
            achieved,
            snr_db: snr,
        });
    }
    Ok(snr)
}

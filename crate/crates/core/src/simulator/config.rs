use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::SimError;
use crate::channel::RegionSchedule;
use crate::pipeline::Scheme;

pub const DEFAULT_OFFSETS_DB: [f64; 5] = [0.0, -0.5, -1.0, -1.5, -2.0];
pub const DEFAULT_TRIALS: u32 = 250;
pub const DEFAULT_BASE_SEED: u64 = 0x00C0_FFEE_2016_0003;

/// Full description of a Monte Carlo campaign, loadable from TOML.
///
/// ```toml
/// schemes = ["uncoded", "rs255_111", "rs223_df12", "rs191_df47"]
/// offsets_db = [0.0, -0.5, -1.0, -1.5, -2.0]
/// trials = 250
/// base_seed = 1
/// output_dir = "results"
///
/// [schedule]
/// boundaries = [0, 63, 465, 504]
/// end = 586
/// snr_db = [4.75, 5.10, -1.60, 3.65]
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub schemes: Vec<Scheme>,
    pub offsets_db: Vec<f64>,
    pub trials: u32,
    pub base_seed: u64,
    pub schedule: RegionSchedule,
    pub output_dir: PathBuf,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            schemes: Scheme::ALL.to_vec(),
            offsets_db: DEFAULT_OFFSETS_DB.to_vec(),
            trials: DEFAULT_TRIALS,
            base_seed: DEFAULT_BASE_SEED,
            schedule: RegionSchedule::default(),
            output_dir: PathBuf::from("results"),
        }
    }
}

#[derive(Serialize)]
struct HashedFields<'a> {
    schemes: &'a [Scheme],
    offsets_db: &'a [f64],
    trials: u32,
    base_seed: u64,
    schedule: &'a RegionSchedule,
}

impl CampaignConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, SimError> {
        let cfg: CampaignConfig = toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = fs::read_to_string(path).map_err(|source| SimError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            SimError::Config(msg) => SimError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("campaign config always serializes")
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.trials == 0 {
            return Err(SimError::Config("trials must be at least 1".into()));
        }
        if self.schemes.is_empty() {
            return Err(SimError::Config("no schemes selected".into()));
        }
        if self.offsets_db.is_empty() {
            return Err(SimError::Config("no SNR offsets given".into()));
        }
        for (i, s) in self.schemes.iter().enumerate() {
            if self.schemes[..i].contains(s) {
                return Err(SimError::Config(format!("scheme {s} listed twice")));
            }
        }
        for (i, o) in self.offsets_db.iter().enumerate() {
            if !o.is_finite() {
                return Err(SimError::Config(format!("offset {o} is not finite")));
            }
            if self.offsets_db[..i].contains(o) {
                return Err(SimError::Config(format!("offset {o} listed twice")));
            }
        }
        self.schedule.validate().map_err(|e| SimError::Config(e.to_string()))
    }

    /// SHA-256 over the fields that determine results (not `output_dir`).
    pub fn hash(&self) -> String {
        let fields = HashedFields {
            schemes: &self.schemes,
            offsets_db: &self.offsets_db,
            trials: self.trials,
            base_seed: self.base_seed,
            schedule: &self.schedule,
        };
        let canonical = serde_json::to_vec(&fields).expect("hashed fields serialize");
        hex::encode(Sha256::digest(&canonical))
    }

    pub fn combinations(&self) -> usize {
        self.schemes.len() * self.offsets_db.len()
    }
}

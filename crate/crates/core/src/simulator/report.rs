use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{SimError, TrialOutcome};
use crate::channel::{Region, RegionSchedule};
use crate::pipeline::{rate_budget, Scheme};

pub const SCHEMA: &str = "flightfec.results/v1";
pub const RESULTS_FILE: &str = "results.json";
pub const OVERALL_FILE: &str = "overall_fer.csv";
pub const REGION_FILE: &str = "region_fer.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

/// Aggregate over all trials of one (scheme, offset) pair.
///
/// Units are 33-byte sub-packets for the uncoded scheme and frames otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComboResult {
    pub scheme: Scheme,
    pub offset_db: f64,
    pub trials: u32,
    pub overall_fer: f64,
    pub region_fer: [f64; 4],
    pub units_recovered: [u64; 4],
    pub units_total: [u64; 4],
    /// Standard error of the per-trial overall FER (sample s.d. / sqrt(trials)).
    /// Reported as an extension.
    pub fer_std_error: f64,
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl ComboResult {
    pub fn aggregate(scheme: Scheme, offset_db: f64, trials: &[TrialOutcome]) -> Self {
        let mut recovered = [0u64; 4];
        let mut total = [0u64; 4];
        for t in trials {
            for r in 0..4 {
                recovered[r] += t.recovered[r];
                total[r] += t.total[r];
            }
        }
        let region_fer = std::array::from_fn(|r| fer(recovered[r], total[r]));
        let n = trials.len() as f64;
        let std_error = if trials.len() > 1 {
            let mean = trials.iter().map(TrialOutcome::fer).sum::<f64>() / n;
            let var = trials.iter().map(|t| (t.fer() - mean).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        ComboResult {
            scheme,
            offset_db,
            trials: trials.len() as u32,
            overall_fer: fer(recovered.iter().sum(), total.iter().sum()),
            region_fer,
            units_recovered: recovered,
            units_total: total,
            fer_std_error: std_error,
            wall_time_s: 0.0,
        }
    }

    pub fn units_lost(&self) -> u64 {
        self.units_total.iter().sum::<u64>() - self.units_recovered.iter().sum::<u64>()
    }

    pub fn region(&self, region: Region) -> f64 {
        self.region_fer[region.index()]
    }
}

fn fer(recovered: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        (total - recovered) as f64 / total as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub schema: String,
    pub base_seed: u64,
    pub config_hash: String,
    pub trials: u32,
    pub schedule: RegionSchedule,
    pub combos: Vec<ComboResult>,
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl SimReport {
    pub fn combo(&self, scheme: Scheme, offset_db: f64) -> Option<&ComboResult> {
        self.combos
            .iter()
            .find(|c| c.scheme == scheme && c.offset_db == offset_db)
    }

    /// Overall FER must equal the unit-weighted mean of the region FERs.
    pub fn check_weighted_identity(&self) -> Result<(), String> {
        for c in &self.combos {
            let total: u64 = c.units_total.iter().sum();
            let weighted: f64 = (0..4).map(|r| c.region_fer[r] * c.units_total[r] as f64).sum::<f64>() / total as f64;
            if (weighted - c.overall_fer).abs() > 1e-12 {
                return Err(format!(
                    "{} at {} dB: overall FER {} but weighted regions give {}",
                    c.scheme, c.offset_db, c.overall_fer, weighted
                ));
            }
            let upf = c.scheme.units_per_frame() as u64 * c.trials as u64;
            for region in Region::ALL {
                let expected = self.schedule.seconds_in(region) as u64 * upf;
                if c.units_total[region.index()] != expected {
                    return Err(format!(
                        "{} at {} dB: {} units in {}, expected {expected}",
                        c.scheme,
                        c.offset_db,
                        c.units_total[region.index()],
                        region.name()
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let report: SimReport = serde_json::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        if report.schema != SCHEMA {
            return Err(SimError::Config(format!(
                "results schema {:?}, expected {SCHEMA:?}",
                report.schema
            )));
        }
        Ok(report)
    }

    pub fn overall_csv(&self) -> String {
        let mut s = String::from("scheme,offset_db,fer\n");
        for c in &self.combos {
            writeln!(s, "{},{:.2},{:.6}", c.scheme, c.offset_db, c.overall_fer).unwrap();
        }
        s
    }

    pub fn region_csv(&self) -> String {
        let mut s = String::from("scheme,offset_db,region,fer\n");
        for c in &self.combos {
            for region in Region::ALL {
                writeln!(
                    s,
                    "{},{:.2},{},{:.6}",
                    c.scheme,
                    c.offset_db,
                    region.number(),
                    c.region(region)
                )
                .unwrap();
            }
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        writeln!(s, "flightfec campaign ({SCHEMA})").unwrap();
        writeln!(s, "base seed   {}", self.base_seed).unwrap();
        writeln!(s, "config hash {}", self.config_hash).unwrap();
        writeln!(s, "trials      {} per combination", self.trials).unwrap();
        let secs: Vec<String> = Region::ALL
            .iter()
            .map(|&r| format!("{}={}s", r.name(), self.schedule.seconds_in(r)))
            .collect();
        writeln!(s, "regions     {}", secs.join(" ")).unwrap();
        writeln!(s).unwrap();
        writeln!(
            s,
            "{:<22} {:>7} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
            "scheme", "offset", "overall", "region1", "region2", "region3", "region4", "stderr"
        )
        .unwrap();
        for c in &self.combos {
            writeln!(
                s,
                "{:<22} {:>7.2} {:>9.6} {:>9.6} {:>9.6} {:>9.6} {:>9.6} {:>9.6}",
                c.scheme.label(),
                c.offset_db,
                c.overall_fer,
                c.region_fer[0],
                c.region_fer[1],
                c.region_fer[2],
                c.region_fer[3],
                c.fer_std_error
            )
            .unwrap();
        }
        writeln!(s).unwrap();
        writeln!(s, "stderr: standard error of per-trial overall FER (extension)").unwrap();
        writeln!(s).unwrap();
        writeln!(
            s,
            "{:<22} {:>12} {:>12} {:>9}",
            "link budget", "bytes/s", "framed", "capacity"
        )
        .unwrap();
        let mut schemes: Vec<Scheme> = self.combos.iter().map(|c| c.scheme).collect();
        schemes.dedup();
        for scheme in schemes {
            let b = rate_budget(scheme);
            writeln!(
                s,
                "{:<22} {:>12.1} {:>12.1} {:>9}",
                scheme.label(),
                b.wire_rate,
                b.framed_wire_rate,
                if b.over_capacity() { "OVER" } else { "ok" }
            )
            .unwrap();
        }
        s
    }
}

/// Writes the results file, both plot tables and the summary into `dir`.
pub fn emit_results(report: &SimReport, dir: &Path) -> Result<(), SimError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| SimError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io(dir))?;
    for (name, contents) in [
        (RESULTS_FILE, report.to_json()),
        (OVERALL_FILE, report.overall_csv()),
        (REGION_FILE, report.region_csv()),
        (SUMMARY_FILE, report.summary()),
    ] {
        let path = dir.join(name);
        fs::write(&path, contents).map_err(io(&path))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(rec: [u64; 4], total: [u64; 4]) -> TrialOutcome {
        TrialOutcome { recovered: rec, total }
    }

    fn sample_report() -> SimReport {
        let schedule = RegionSchedule::default();
        let full = [63, 402, 39, 82];
        let mut combos = Vec::new();
        for scheme in Scheme::ALL {
            for (i, off) in [0.0, -0.5, -1.0, -1.5, -2.0].into_iter().enumerate() {
                let upf = scheme.units_per_frame() as u64;
                let total = full.map(|n| n * upf);
                let lost = i as u64 * upf;
                let trials = [
                    outcome([total[0], total[1] - lost, 0, total[3]], total),
                    outcome([total[0], total[1], 0, total[3] - lost / 2], total),
                ];
                combos.push(ComboResult::aggregate(scheme, off, &trials));
            }
        }
        SimReport {
            schema: SCHEMA.into(),
            base_seed: 1,
            config_hash: "ab".repeat(32),
            trials: 2,
            schedule,
            combos,
            wall_time_s: 1.5,
        }
    }

    #[test]
    fn aggregation_and_identity() {
        let c = ComboResult::aggregate(
            Scheme::Rs255_111,
            0.0,
            &[
                outcome([63, 402, 0, 82], [63, 402, 39, 82]),
                outcome([63, 400, 0, 80], [63, 402, 39, 82]),
            ],
        );
        assert_eq!(c.region_fer[2], 1.0);
        assert_eq!(c.region_fer[0], 0.0);
        assert!((c.region_fer[1] - 2.0 / 804.0).abs() < 1e-15);
        assert_eq!(c.units_lost(), 82);
        assert!((c.overall_fer - 82.0 / 1172.0).abs() < 1e-15);
        // per-trial FERs 39/586 and 43/586: s.d. = 4/586/sqrt(2), over sqrt(2)
        let se = 2.0 / 586.0;
        assert!((c.fer_std_error - se).abs() < 1e-12, "{} vs {se}", c.fer_std_error);
        sample_report().check_weighted_identity().unwrap();
    }

    #[test]
    fn identity_catches_inconsistency() {
        let mut r = sample_report();
        r.combos[3].overall_fer += 0.01;
        assert!(r.check_weighted_identity().is_err());
        let mut r = sample_report();
        r.combos[0].units_total[1] += 1;
        assert!(r.check_weighted_identity().is_err());
    }

    #[test]
    fn plot_tables_have_grid_rows() {
        let r = sample_report();
        assert_eq!(r.overall_csv().lines().count(), 1 + 20);
        assert_eq!(r.region_csv().lines().count(), 1 + 80);
        assert!(r.region_csv().contains("rs223_df12,-1.50,3,1.000000"));
    }

    #[test]
    fn json_round_trips_and_skips_timing() {
        let r = sample_report();
        let text = r.to_json();
        assert!(!text.contains("wall_time"));
        assert!(text.contains(SCHEMA));
        let back = SimReport::from_json(&text).unwrap();
        assert_eq!(back.overall_csv(), r.overall_csv());
        assert_eq!(back.region_csv(), r.region_csv());
        assert_eq!(back.wall_time_s, 0.0);

        let wrong = text.replace(SCHEMA, "flightfec.results/v0");
        assert!(SimReport::from_json(&wrong).is_err());
    }

    #[test]
    fn emission_is_byte_stable() {
        let r = sample_report();
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        emit_results(&r, a.path()).unwrap();
        let mut again = r.clone();
        again.wall_time_s = 99.0;
        emit_results(&again, b.path()).unwrap();
        for name in [RESULTS_FILE, OVERALL_FILE, REGION_FILE, SUMMARY_FILE] {
            assert_eq!(
                fs::read(a.path().join(name)).unwrap(),
                fs::read(b.path().join(name)).unwrap(),
                "{name}"
            );
        }
    }

    #[test]
    fn unwritable_directory_reports_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, b"x").unwrap();
        let target = blocker.join("sub");
        match emit_results(&sample_report(), &target) {
            Err(SimError::Io { path, .. }) => assert_eq!(path, target),
            other => panic!("{other:?}"),
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flightfec::channel::{calibrate_snr, simulate_legacy_per, PacketModel, Region};
use flightfec::pipeline::{rate_budget, Scheme};
use flightfec::simulator::{
    campaign_trial_seed, emit_results, reanchor_schedule, run_campaign, run_trial, CampaignConfig, ComboResult,
    SimError, SimReport, SCHEMA,
};

const EXIT_CONFIG: u8 = 1;
const EXIT_IO: u8 = 2;

#[derive(Parser)]
#[command(
    name = "flightfec",
    version,
    about = "Telemetry FEC simulator for a four-region rocket flight"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full scheme x offset grid and write results
    Campaign(CommonArgs),
    /// Run one scheme at one offset and print every trial
    Trial(CommonArgs),
    /// Find the SNR giving a legacy-packet error rate
    Calibrate(CalibrateArgs),
    /// Print the link budget of each scheme
    Rates(CommonArgs),
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// TOML campaign file; flags below override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated schemes: uncoded, rs255_111, rs223_df12, rs191_df47
    #[arg(long, value_delimiter = ',')]
    schemes: Option<Vec<String>>,
    /// Comma-separated SNR offsets in dB, e.g. 0,-0.5,-1
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    offsets: Option<Vec<f64>>,
    /// Trials per combination
    #[arg(long)]
    trials: Option<u32>,
    /// Base seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available cores)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Clone)]
struct CalibrateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Target packet-error rate; without it every region is re-anchored
    #[arg(long)]
    target: Option<f64>,
    /// Packets simulated per PER estimate
    #[arg(long, default_value_t = 20_000)]
    packets: usize,
    /// Model two-station selection diversity
    #[arg(long)]
    diversity: bool,
}

impl CommonArgs {
    fn resolve(&self) -> Result<CampaignConfig, SimError> {
        let mut cfg = match &self.config {
            Some(path) => CampaignConfig::load(path)?,
            None => CampaignConfig::default(),
        };
        if let Some(names) = &self.schemes {
            cfg.schemes = names
                .iter()
                .map(|n| n.parse::<Scheme>().map_err(|e| SimError::Config(e.to_string())))
                .collect::<Result<_, _>>()?;
        }
        if let Some(offsets) = &self.offsets {
            cfg.offsets_db = offsets.clone();
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(seed) = self.seed {
            cfg.base_seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn workers(&self) -> Result<usize, SimError> {
        match self.workers {
            Some(0) => Err(SimError::Config("--workers must be at least 1".into())),
            Some(n) => Ok(n),
            None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }
}

fn campaign(args: &CommonArgs) -> Result<(), SimError> {
    let cfg = args.resolve()?;
    let workers = args.workers()?;
    eprintln!(
        "running {} combinations x {} trials on {workers} workers",
        cfg.combinations(),
        cfg.trials
    );
    let report = run_campaign(&cfg, workers)?;
    print!("{}", report.summary());
    println!();
    println!("wall time {:.1} s", report.wall_time_s);
    println!("results written to {}", cfg.output_dir.display());
    Ok(())
}

fn trial(args: &CommonArgs) -> Result<(), SimError> {
    let mut args = args.clone();
    if args.trials.is_none() {
        args.trials = Some(1);
    }
    let mut cfg = args.resolve()?;
    if args.schemes.is_none() {
        cfg.schemes = vec![Scheme::Rs223Df12];
    }
    if args.offsets.is_none() {
        cfg.offsets_db = vec![0.0];
    }
    if cfg.schemes.len() != 1 || cfg.offsets_db.len() != 1 {
        return Err(SimError::Config("trial takes exactly one scheme and one offset".into()));
    }
    let (scheme, offset) = (cfg.schemes[0], cfg.offsets_db[0]);
    println!(
        "{} at offset {offset:+.2} dB, base seed {}",
        scheme.label(),
        cfg.base_seed
    );
    let mut outcomes = Vec::new();
    for t in 0..cfg.trials {
        let seed = campaign_trial_seed(&cfg, scheme, offset, t);
        let out = run_trial(scheme, &cfg.schedule, offset, seed);
        let regions: Vec<String> = Region::ALL
            .iter()
            .map(|r| format!("{}/{}", out.recovered[r.index()], out.total[r.index()]))
            .collect();
        println!(
            "trial {t:>4}  seed {seed:016x}  recovered {}  FER {:.6}",
            regions.join(" "),
            out.fer()
        );
        outcomes.push(out);
    }
    let combo = ComboResult::aggregate(scheme, offset, &outcomes);
    println!(
        "overall FER {:.6}  regions {:.6} {:.6} {:.6} {:.6}",
        combo.overall_fer, combo.region_fer[0], combo.region_fer[1], combo.region_fer[2], combo.region_fer[3]
    );
    if args.out.is_some() {
        let report = SimReport {
            schema: SCHEMA.to_string(),
            base_seed: cfg.base_seed,
            config_hash: cfg.hash(),
            trials: cfg.trials,
            schedule: cfg.schedule.clone(),
            combos: vec![combo],
            wall_time_s: 0.0,
        };
        emit_results(&report, &cfg.output_dir)?;
        println!("results written to {}", cfg.output_dir.display());
    }
    Ok(())
}

fn calibrate(args: &CalibrateArgs) -> Result<(), SimError> {
    let cfg = args.common.resolve()?;
    if args.packets == 0 {
        return Err(SimError::Config("--packets must be at least 1".into()));
    }
    let model = PacketModel {
        packets: args.packets,
        seed: args.common.seed.unwrap_or(PacketModel::default().seed),
        diversity: args.diversity,
    };
    match args.target {
        Some(target) => {
            let snr = calibrate_snr(target, &model)?;
            println!(
                "target PER {target:.4} -> SNR {snr:.3} dB (achieved {:.4})",
                simulate_legacy_per(snr, &model)
            );
        }
        None => {
            let (_, anchors) = reanchor_schedule(&cfg.schedule, &model)?;
            println!(
                "{:<10} {:>10} {:>12} {:>12}",
                "region", "SNR dB", "legacy PER", "calibrated"
            );
            for a in anchors {
                println!(
                    "{:<10} {:>10.2} {:>12.4} {:>12.3}",
                    a.region.name(),
                    a.nominal_snr_db,
                    a.induced_per,
                    a.calibrated_snr_db
                );
            }
        }
    }
    Ok(())
}

fn rates(args: &CommonArgs) -> Result<(), SimError> {
    let cfg = args.resolve()?;
    println!(
        "{:<22} {:>10} {:>10} {:>8} {:>10} {:>6}",
        "scheme", "bytes/s", "framed", "kbps", "capacity", "use"
    );
    for scheme in cfg.schemes {
        let b = rate_budget(scheme);
        println!(
            "{:<22} {:>10.1} {:>10.1} {:>8.2} {:>10.0} {:>5.1}%{}",
            scheme.label(),
            b.wire_rate,
            b.framed_wire_rate,
            b.wire_kbps(),
            b.link_capacity,
            100.0 * b.utilization(),
            if b.over_capacity() { "  OVER CAPACITY" } else { "" }
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Campaign(a) => campaign(a),
        Command::Trial(a) => trial(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Rates(a) => rates(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                SimError::Io { .. } => EXIT_IO,
                SimError::Config(_) | SimError::Channel(_) => EXIT_CONFIG,
            })
        }
    }
}

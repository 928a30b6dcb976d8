use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use oamlis_cli::{run, ExperimentConfig, Kind};

/// Near-field OAM link experiments written as CSV files.
#[derive(Parser)]
#[command(name = "oamlis", version, about)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy)]
enum Verb {
    /// Singular-value and OAM coupling spectra for one link.
    Spectrum,
    /// Number of well-coupled modes against link distance.
    Dof,
    /// Path gain against link distance.
    Pathgain,
    /// Bit error rate against SNR per mode and detector.
    Ber,
    /// Energy-detection bit error rate against threshold-to-noise ratio.
    Tnr,
    /// Transmit phase and received amplitude and phase maps.
    Profiles,
}

impl From<Verb> for Kind {
    fn from(v: Verb) -> Kind {
        match v {
            Verb::Spectrum => Kind::Spectrum,
            Verb::Dof => Kind::Dof,
            Verb::Pathgain => Kind::PathGain,
            Verb::Ber => Kind::Ber,
            Verb::Tnr => Kind::Tnr,
            Verb::Profiles => Kind::Profiles,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Monte Carlo seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Wavelength in metres.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Transmit radius in wavelengths.
    #[arg(long = "T", global = true)]
    t: Option<f64>,
    /// Receive radius in wavelengths.
    #[arg(long = "R", global = true)]
    r: Option<f64>,
    /// Link distance in wavelengths.
    #[arg(long = "D", global = true)]
    d: Option<f64>,
    /// Mode-count threshold in dB below the strongest mode.
    #[arg(long, global = true, allow_hyphen_values = true)]
    threshold_db: Option<f64>,
    /// Monte Carlo trials per point.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Surface sizes preset: equal, downlink or uplink.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Any config key, as KEY=VALUE. May be repeated.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Print the resolved config and exit.
    #[arg(long, global = true)]
    print_config: bool,
}

fn resolve(kind: Kind, c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::defaults(kind);
    if let Some(path) = &c.config {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        cfg.apply_text(&text)
            .with_context(|| format!("in config {}", path.display()))?;
    }
    if let Some(p) = &c.preset {
        cfg.apply("preset", p)?;
    }
    let flags = [
        ("seed", c.seed.map(|v| v.to_string())),
        ("out", c.out.as_ref().map(|p| p.display().to_string())),
        ("lambda", c.lambda.map(|v| v.to_string())),
        ("T", c.t.map(|v| v.to_string())),
        ("R", c.r.map(|v| v.to_string())),
        ("D", c.d.map(|v| v.to_string())),
        ("threshold_db", c.threshold_db.map(|v| v.to_string())),
        ("trials", c.trials.map(|v| v.to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.apply(key, &v)?;
        }
    }
    for kv in &c.set {
        let (k, v) = kv
            .split_once('=')
            .with_context(|| format!("--set expects KEY=VALUE, got '{kv}'"))?;
        cfg.apply(k, v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let cfg = resolve(cli.verb.into(), &cli.common)?;
    if cli.common.print_config {
        print!("{}", cfg.to_text());
        return Ok(());
    }
    let files = run(&cfg)?;
    println!("{}", oamlis_cli::run::describe(&cfg.out, &files));
    Ok(())
}

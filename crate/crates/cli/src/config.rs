//! Flat `key = value` experiment configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use oamlis_core::export::fmt_f64;
use oamlis_core::{DetectorConfig, Preset, TopologicalCharge};

/// Experiment selected by the CLI verb.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Spectrum,
    Dof,
    PathGain,
    Ber,
    Tnr,
    Profiles,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::Spectrum,
        Kind::Dof,
        Kind::PathGain,
        Kind::Ber,
        Kind::Tnr,
        Kind::Profiles,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Spectrum => "spectrum",
            Kind::Dof => "dof",
            Kind::PathGain => "pathgain",
            Kind::Ber => "ber",
            Kind::Tnr => "tnr",
            Kind::Profiles => "profiles",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| anyhow!("unknown experiment kind '{s}'"))
    }
}

/// A list of values, written either as `a,b,c` or as `start:stop:step`.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Sweep::List(ref v) => v.clone(),
            Sweep::Range { start, stop, step } => {
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n)
                    .map(|i| {
                        let v = start + i as f64 * step;
                        format!("{v:.12e}").parse().unwrap_or(v)
                    })
                    .collect()
            }
        }
    }
}

impl fmt::Display for Sweep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sweep::List(v) => {
                let parts: Vec<String> = v.iter().map(|x| fmt_f64(*x)).collect();
                f.write_str(&parts.join(","))
            }
            Sweep::Range { start, stop, step } => {
                write!(f, "{}:{}:{}", fmt_f64(*start), fmt_f64(*stop), fmt_f64(*step))
            }
        }
    }
}

impl FromStr for Sweep {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains(':') {
            let parts: Vec<f64> = s.split(':').map(parse_f64).collect::<Result<_>>()?;
            let [start, stop, step] = parts[..] else {
                bail!("range '{s}' must be start:stop:step");
            };
            if !(step > 0.0) || stop < start {
                bail!("range '{s}' needs step > 0 and stop >= start");
            }
            Ok(Sweep::Range { start, stop, step })
        } else {
            let v: Vec<f64> = s.split(',').map(parse_f64).collect::<Result<_>>()?;
            Ok(Sweep::List(v))
        }
    }
}

/// Detector variant requested for a BER run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetectorSpec {
    pub name: &'static str,
}

impl DetectorSpec {
    const NAMES: [&'static str; 5] = ["mf", "id", "id+smart", "ed", "ed+smart"];

    pub fn config(self, equalize: bool, drop_db: f64) -> DetectorConfig {
        let mut cfg = match self.name {
            "mf" => DetectorConfig::matched_filter(),
            "id" => DetectorConfig::integrate_dump(false, equalize),
            "id+smart" => DetectorConfig::integrate_dump(true, equalize),
            "ed" => DetectorConfig::energy_detection(false, None),
            _ => DetectorConfig::energy_detection(true, None),
        };
        cfg.drop_db = drop_db;
        cfg
    }

    /// File-name friendly form, e.g. `id-smart`.
    pub fn slug(self) -> String {
        self.name.replace('+', "-")
    }
}

impl FromStr for DetectorSpec {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        DetectorSpec::NAMES
            .into_iter()
            .find(|n| *n == s)
            .map(|name| DetectorSpec { name })
            .ok_or_else(|| anyhow!("unknown detector '{s}', expected one of {:?}", DetectorSpec::NAMES))
    }
}

/// Fully resolved experiment parameters. Lengths `T`, `R`, `D`, the SVD
/// grid spacing and the radial detection step are in wavelengths.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub lambda: f64,
    pub t: f64,
    pub r: f64,
    pub d: f64,
    pub presets: Vec<Preset>,
    pub distances: Sweep,
    pub threshold_db: f64,
    pub n_modes: usize,
    pub spacing: f64,
    pub focused: bool,
    pub charges: Vec<i32>,
    pub detectors: Vec<DetectorSpec>,
    pub equalize: bool,
    pub drop_db: f64,
    pub radial_step: f64,
    pub snr_db: Sweep,
    pub tnr_db: Sweep,
    pub trials: u64,
    pub seed: u64,
    pub resolution: usize,
    pub out: PathBuf,
}

const KEYS: [&str; 22] = [
    "kind",
    "lambda",
    "T",
    "R",
    "D",
    "presets",
    "distances",
    "threshold_db",
    "n_modes",
    "spacing",
    "focused",
    "charges",
    "detectors",
    "equalize",
    "drop_db",
    "radial_step",
    "snr_db",
    "tnr_db",
    "trials",
    "seed",
    "resolution",
    "out",
];

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .with_context(|| format!("'{s}' is not a number"))
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => bail!("'{other}' is not a boolean"),
    }
}

fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    s.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|e| anyhow!("'{}': {e}", p.trim())))
        .collect()
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Defaults for each experiment, matching the reference setups.
    pub fn defaults(kind: Kind) -> Self {
        let mut c = Self {
            kind,
            lambda: oamlis_core::geometry::DEFAULT_WAVELENGTH,
            t: 10.0,
            r: 10.0,
            d: 50.0,
            presets: Preset::ALL.to_vec(),
            distances: Sweep::Range {
                start: 50.0,
                stop: 500.0,
                step: 50.0,
            },
            threshold_db: -5.0,
            n_modes: 51,
            spacing: 0.5,
            focused: true,
            charges: vec![0, 1, 2, 3, 4],
            detectors: ["mf", "id", "id+smart"]
                .iter()
                .map(|n| n.parse().unwrap())
                .collect(),
            equalize: true,
            drop_db: oamlis_core::detect::DEFAULT_DROP_DB,
            radial_step: 0.25,
            snr_db: Sweep::Range {
                start: 0.0,
                stop: 20.0,
                step: 1.0,
            },
            tnr_db: Sweep::Range {
                start: 15.0,
                stop: 35.0,
                step: 0.25,
            },
            trials: 100_000,
            seed: 1,
            resolution: 128,
            out: PathBuf::from("out"),
        };
        match kind {
            Kind::PathGain => {
                c.distances = Sweep::Range {
                    start: 50.0,
                    stop: 500.0,
                    step: 10.0,
                }
            }
            Kind::Ber => c.d = 100.0,
            Kind::Tnr => {
                c.d = 100.0;
                c.snr_db = Sweep::List(vec![19.0]);
            }
            Kind::Profiles => {
                c.t = 5.0;
                c.r = 5.0;
                c.d = 20.0;
                c.charges = vec![0, 1, 3];
            }
            _ => {}
        }
        c
    }

    /// Sets one key. `preset` is accepted as shorthand for `T` and `R`.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let ctx = || format!("invalid value for '{key}'");
        match key.trim() {
            "kind" => {
                let k: Kind = v.parse()?;
                if k != self.kind {
                    bail!("config is for '{k}' but the '{}' experiment was requested", self.kind);
                }
            }
            "preset" => {
                let (t, r) = v.parse::<Preset>()?.sizes();
                self.t = t;
                self.r = r;
            }
            "lambda" => self.lambda = parse_f64(v).with_context(ctx)?,
            "T" => self.t = parse_f64(v).with_context(ctx)?,
            "R" => self.r = parse_f64(v).with_context(ctx)?,
            "D" => self.d = parse_f64(v).with_context(ctx)?,
            "presets" => self.presets = parse_list(v).with_context(ctx)?,
            "distances" => self.distances = v.parse().with_context(ctx)?,
            "threshold_db" => self.threshold_db = parse_f64(v).with_context(ctx)?,
            "n_modes" => self.n_modes = v.parse().with_context(ctx)?,
            "spacing" => self.spacing = parse_f64(v).with_context(ctx)?,
            "focused" => self.focused = parse_bool(v).with_context(ctx)?,
            "charges" => self.charges = parse_list(v).with_context(ctx)?,
            "detectors" => self.detectors = parse_list(v).with_context(ctx)?,
            "equalize" => self.equalize = parse_bool(v).with_context(ctx)?,
            "drop_db" => self.drop_db = parse_f64(v).with_context(ctx)?,
            "radial_step" => self.radial_step = parse_f64(v).with_context(ctx)?,
            "snr_db" => self.snr_db = v.parse().with_context(ctx)?,
            "tnr_db" => self.tnr_db = v.parse().with_context(ctx)?,
            "trials" => self.trials = v.parse().with_context(ctx)?,
            "seed" => self.seed = v.parse().with_context(ctx)?,
            "resolution" => self.resolution = v.parse().with_context(ctx)?,
            "out" => self.out = PathBuf::from(v),
            other => bail!("unknown config key '{other}', expected one of {KEYS:?} or 'preset'"),
        }
        Ok(())
    }

    /// Applies every `key = value` line of a config file. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", no + 1))?;
            self.apply(key, value)
                .with_context(|| format!("line {}", no + 1))?;
        }
        Ok(())
    }

    /// Builds the config for `kind` from defaults and config-file text.
    pub fn parse(kind: Kind, text: &str) -> Result<Self> {
        let mut c = Self::defaults(kind);
        c.apply_text(text)?;
        Ok(c)
    }

    fn value(&self, key: &str) -> String {
        match key {
            "kind" => self.kind.to_string(),
            "lambda" => fmt_f64(self.lambda),
            "T" => fmt_f64(self.t),
            "R" => fmt_f64(self.r),
            "D" => fmt_f64(self.d),
            "presets" => join(&self.presets),
            "distances" => self.distances.to_string(),
            "threshold_db" => fmt_f64(self.threshold_db),
            "n_modes" => self.n_modes.to_string(),
            "spacing" => fmt_f64(self.spacing),
            "focused" => self.focused.to_string(),
            "charges" => join(&self.charges),
            "detectors" => self.detectors.iter().map(|d| d.name).collect::<Vec<_>>().join(","),
            "equalize" => self.equalize.to_string(),
            "drop_db" => fmt_f64(self.drop_db),
            "radial_step" => fmt_f64(self.radial_step),
            "snr_db" => self.snr_db.to_string(),
            "tnr_db" => self.tnr_db.to_string(),
            "trials" => self.trials.to_string(),
            "seed" => self.seed.to_string(),
            "resolution" => self.resolution.to_string(),
            _ => self.out.display().to_string(),
        }
    }

    /// Every key on its own `key = value` line, in a fixed order.
    pub fn lines(&self) -> Vec<String> {
        KEYS.iter().map(|k| format!("{k} = {}", self.value(k))).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = self.lines().join("\n");
        s.push('\n');
        s
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            bail!("lambda must be positive");
        }
        for (name, v) in [("T", self.t), ("R", self.r), ("D", self.d), ("spacing", self.spacing), ("radial_step", self.radial_step)] {
            if !(v > 0.0) || !v.is_finite() {
                bail!("{name} must be positive");
            }
        }
        if self.trials == 0 {
            bail!("trials must be positive");
        }
        if self.n_modes == 0 {
            bail!("n_modes must be positive");
        }
        if self.kind == Kind::PathGain && self.n_modes.is_multiple_of(2) {
            bail!("path gain needs an odd n_modes, got {}", self.n_modes);
        }
        if self.charges.is_empty() {
            bail!("charges must not be empty");
        }
        for &l in &self.charges {
            TopologicalCharge::new(l)?;
        }
        if self.presets.is_empty() {
            bail!("presets must not be empty");
        }
        if self.detectors.is_empty() {
            bail!("detectors must not be empty");
        }
        for sweep in [&self.distances, &self.snr_db, &self.tnr_db] {
            if sweep.values().iter().any(|v| !v.is_finite()) {
                bail!("sweep values must be finite");
            }
        }
        if self.distances.values().iter().any(|d| *d <= 0.0) {
            bail!("distances must be positive");
        }
        if self.resolution < 32 {
            bail!("resolution must be at least 32");
        }
        Ok(())
    }
}

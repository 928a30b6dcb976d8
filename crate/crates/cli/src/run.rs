//! Experiment drivers. Each writes CSV files into the configured output
//! directory and returns the paths it wrote.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use oamlis_core::detect::{ber_monte_carlo, tnr_sweep, Detector, DetectorConfig, Link};
use oamlis_core::export::{fmt_f64, write_metadata};
use oamlis_core::geometry::analytic_dof;
use oamlis_core::modes::{svd_mode_spectrum, DEFAULT_MEMORY_BUDGET};
use oamlis_core::oam::{emit_profile_grids, mode_index, oam_mode_spectrum, path_gain, ProfileGrid};
use oamlis_core::{ModeSpectrum, Preset, Scenario, TopologicalCharge};

use crate::config::{ExperimentConfig, Kind};

pub fn run(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out)
        .with_context(|| format!("cannot create output directory {}", cfg.out.display()))?;
    match cfg.kind {
        Kind::Spectrum => run_spectrum(cfg),
        Kind::Dof => run_dof(cfg),
        Kind::PathGain => run_path_gain(cfg),
        Kind::Ber => run_ber(cfg),
        Kind::Tnr => run_tnr(cfg),
        Kind::Profiles => run_profiles(cfg),
    }
}

fn scenario(cfg: &ExperimentConfig) -> Result<Scenario> {
    Ok(Scenario::normalized(cfg.t, cfg.r, cfg.d, cfg.lambda)?)
}

/// Opens `name` in the output directory and writes the metadata header.
fn create(cfg: &ExperimentConfig, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    let path = cfg.out.join(name);
    let file = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
    let mut w = BufWriter::new(file);
    let mut meta = vec![format!("oamlis {}", env!("CARGO_PKG_VERSION"))];
    meta.extend(cfg.lines());
    write_metadata(&mut w, &meta)?;
    Ok((path, w))
}

fn finish(path: PathBuf, mut w: BufWriter<File>) -> Result<PathBuf> {
    w.flush().with_context(|| format!("cannot write {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

fn charge_tag(l: i32) -> String {
    if l == 0 {
        "l0".to_string()
    } else {
        format!("l{l:+}")
    }
}

fn indices(cfg: &ExperimentConfig) -> Result<Vec<(i32, usize)>> {
    cfg.charges
        .iter()
        .map(|&l| Ok((l, mode_index(TopologicalCharge::new(l)?))))
        .collect()
}

fn link(cfg: &ExperimentConfig, s: &Scenario) -> Result<Link> {
    Ok(Link::with_options(s, cfg.focused, cfg.n_modes, cfg.radial_step * cfg.lambda)?)
}

fn svd_spectrum(cfg: &ExperimentConfig, s: &Scenario) -> Result<ModeSpectrum> {
    Ok(svd_mode_spectrum(s, cfg.spacing * cfg.lambda, DEFAULT_MEMORY_BUDGET)?)
}

fn run_spectrum(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let s = scenario(cfg)?;
    let svd = svd_spectrum(cfg, &s)?;
    let unfocused = oam_mode_spectrum(&s, cfg.n_modes, false)?;
    let focused = oam_mode_spectrum(&s, cfg.n_modes, true)?;
    let (path, mut w) = create(cfg, "spectrum.csv")?;
    writeln!(
        w,
        "index,svd_db,oam_unfocused_db,oam_focused_db,svd_gain,oam_unfocused_gain,oam_focused_gain,oam_charge"
    )?;
    for i in 0..cfg.n_modes {
        let (svd_db, svd_gain) = if i < svd.len() {
            (fmt_f64(svd.relative_db(i)), fmt_f64(svd.values()[i].powi(2)))
        } else {
            (String::new(), String::new())
        };
        writeln!(
            w,
            "{},{svd_db},{},{},{svd_gain},{},{},{}",
            i + 1,
            fmt_f64(unfocused.relative_db(i)),
            fmt_f64(focused.relative_db(i)),
            fmt_f64(unfocused.values()[i]),
            fmt_f64(focused.values()[i]),
            unfocused.labels()[i]
        )?;
    }
    println!(
        "modes above {} dB: svd {}, unfocused OAM {}, focused OAM {}",
        fmt_f64(cfg.threshold_db),
        svd.count_modes(cfg.threshold_db),
        unfocused.count_modes(cfg.threshold_db),
        focused.count_modes(cfg.threshold_db)
    );
    Ok(vec![finish(path, w)?])
}

fn run_dof(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let (path, mut w) = create(cfg, "dof.csv")?;
    writeln!(w, "preset,T,R,D,analytic,analytic_floor,svd,oam_unfocused,oam_focused")?;
    for preset in &cfg.presets {
        for d in cfg.distances.values() {
            let s = preset.scenario(d, cfg.lambda)?;
            let analytic = analytic_dof(&s);
            let svd = svd_spectrum(cfg, &s)?.count_modes(cfg.threshold_db);
            let unfocused = oam_mode_spectrum(&s, cfg.n_modes, false)?.count_modes(cfg.threshold_db);
            let focused = oam_mode_spectrum(&s, cfg.n_modes, true)?.count_modes(cfg.threshold_db);
            let (t, r) = preset.sizes();
            writeln!(
                w,
                "{preset},{},{},{},{},{},{svd},{unfocused},{focused}",
                fmt_f64(t),
                fmt_f64(r),
                fmt_f64(d),
                fmt_f64(analytic),
                analytic.floor()
            )?;
        }
    }
    Ok(vec![finish(path, w)?])
}

fn run_path_gain(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let (path, mut w) = create(cfg, "pathgain.csv")?;
    writeln!(w, "preset,T,R,D,eta_unfocused,eta_focused,eta_unfocused_db,eta_focused_db")?;
    for preset in &cfg.presets {
        for d in cfg.distances.values() {
            let s = Preset::scenario(*preset, d, cfg.lambda)?;
            let un = path_gain(&s, cfg.n_modes, false)?;
            let fo = path_gain(&s, cfg.n_modes, true)?;
            let (t, r) = preset.sizes();
            writeln!(
                w,
                "{preset},{},{},{},{},{},{},{}",
                fmt_f64(t),
                fmt_f64(r),
                fmt_f64(d),
                fmt_f64(un),
                fmt_f64(fo),
                fmt_f64(10.0 * un.log10()),
                fmt_f64(10.0 * fo.log10())
            )?;
        }
    }
    Ok(vec![finish(path, w)?])
}

/// Writes one BER curve with its exact error probability next to it.
fn write_curve(
    cfg: &ExperimentConfig,
    name: &str,
    axis: &str,
    curve: &oamlis_core::BerCurve,
    exact: &[f64],
) -> Result<PathBuf> {
    let (path, mut w) = create(cfg, name)?;
    writeln!(w, "{axis},ber,errors,trials,ci95,exact")?;
    for (i, p) in exact.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_f64(curve.axis_db()[i]),
            fmt_f64(curve.ber(i)),
            curve.errors()[i],
            curve.trials()[i],
            fmt_f64(curve.ci95(i)),
            fmt_f64(*p)
        )?;
    }
    finish(path, w)
}

fn stream_seed(seed: u64, index: usize, variant: usize) -> u64 {
    seed.wrapping_mul(1_000_003)
        .wrapping_add((index as u64) << 8)
        .wrapping_add(variant as u64)
}

fn run_ber(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let s = scenario(cfg)?;
    let link = link(cfg, &s)?;
    let snr = cfg.snr_db.values();
    let mut written = Vec::new();
    for (l, n) in indices(cfg)? {
        let channel = link.channel(n)?;
        for (v, det) in cfg.detectors.iter().enumerate() {
            let dc = det.config(cfg.equalize, cfg.drop_db);
            let curve = ber_monte_carlo(&link, n, &dc, &snr, cfg.trials, stream_seed(cfg.seed, n, v))?;
            let detector = Detector::new(&channel, dc)?;
            let exact: Vec<f64> = snr.iter().map(|x| detector.error_probability(link.n0(*x))).collect();
            let name = format!("ber_{}_{}.csv", charge_tag(l), det.slug());
            written.push(write_curve(cfg, &name, "snr_db", &curve, &exact)?);
        }
    }
    Ok(written)
}

fn run_tnr(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let s = scenario(cfg)?;
    let link = link(cfg, &s)?;
    let tnr = cfg.tnr_db.values();
    let mut written = Vec::new();
    for snr in cfg.snr_db.values() {
        let n0 = link.n0(snr);
        for (l, n) in indices(cfg)? {
            let channel = link.channel(n)?;
            for (v, smart) in [false, true].into_iter().enumerate() {
                let seed = stream_seed(cfg.seed, n, v);
                let curve = tnr_sweep(&link, n, snr, &tnr, smart, cfg.trials, seed)?;
                let detector = Detector::new(&channel, DetectorConfig::energy_detection(smart, None))?;
                let exact: Vec<f64> = tnr
                    .iter()
                    .map(|t| detector.error_probability_at(n0, n0 * 10f64.powf(t / 10.0)))
                    .collect();
                let name = format!(
                    "tnr_snr{}_{}_{}.csv",
                    fmt_f64(snr),
                    charge_tag(l),
                    if smart { "ed-smart" } else { "ed" }
                );
                written.push(write_curve(cfg, &name, "tnr_db", &curve, &exact)?);
            }
        }
    }
    Ok(written)
}

fn write_grid(cfg: &ExperimentConfig, name: &str, grid: &ProfileGrid) -> Result<PathBuf> {
    let (path, mut w) = create(cfg, name)?;
    grid.write_csv(&mut w)?;
    finish(path, w)
}

fn run_profiles(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let s = scenario(cfg)?;
    let mut written = Vec::new();
    for (l, n) in indices(cfg)? {
        for focused in [false, true] {
            let g = emit_profile_grids(n, &s, focused, cfg.resolution)?;
            let stem = format!(
                "profile_{}_{}",
                charge_tag(l),
                if focused { "focused" } else { "unfocused" }
            );
            for (part, grid) in [
                ("tx_phase", &g.tx_phase),
                ("rx_amplitude", &g.rx_amplitude),
                ("rx_phase", &g.rx_phase),
            ] {
                written.push(write_grid(cfg, &format!("{stem}_{part}.csv"), grid)?);
            }
        }
    }
    Ok(written)
}

/// Output directory as given, for messages.
pub fn describe(out: &Path, files: &[PathBuf]) -> String {
    format!("{} file(s) in {}", files.len(), out.display())
}

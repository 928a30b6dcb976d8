//! Link-level bookkeeping and Monte Carlo error-rate estimation.

use std::f64::consts::{PI, SQRT_2};
use std::ops::Range;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::stats::{ed_error_probability, ed_optimal_threshold, q_function, smart_window_of};
use super::{
    BerCurve, DetectorConfig, Modulation, NoiseModel, RadialGrid, RadialWindow, Strategy,
};
use crate::error::{Error, Result};
use crate::geometry::Scenario;
use crate::oam::{
    default_radial_grid, field_quadrature, mode_energies, rx_fields_radial, RadialField,
    RadialLaw, TopologicalCharge, DEFAULT_RADIAL_SAMPLES,
};

/// Modes sharing the transmit power when the link SNR is defined.
pub const DEFAULT_LINK_MODES: usize = 51;

/// Fewest Monte Carlo trials accepted per point.
pub const MIN_TRIALS: u64 = 10_000;

const CHUNK: u64 = 2048;

/// A link with `n_modes` equal-power OAM modes. The SNR is `E_s/N₀` with
/// `E_s = Σ E_n` over those modes.
#[derive(Debug, Clone)]
pub struct Link {
    scenario: Scenario,
    focused: bool,
    spacing: f64,
    energies: Vec<f64>,
}

impl Link {
    /// 51 modes, radial detection step `λ/4`.
    pub fn new(scenario: &Scenario, focused: bool) -> Result<Self> {
        Self::with_options(scenario, focused, DEFAULT_LINK_MODES, scenario.wavelength() / 4.0)
    }

    pub fn with_options(scenario: &Scenario, focused: bool, n_modes: usize, spacing: f64) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::config("a link needs at least one mode"));
        }
        RadialGrid::new(scenario.rx_radius(), spacing)?;
        let q_tx = field_quadrature(scenario.tx_radius(), scenario);
        let q_rx = field_quadrature(scenario.rx_radius(), scenario);
        let indices: Vec<usize> = (1..=n_modes).collect();
        let energies = mode_energies(
            scenario,
            &RadialLaw::from_focused(focused),
            &indices,
            &q_tx,
            &q_rx,
        )?;
        Ok(Self {
            scenario: *scenario,
            focused,
            spacing,
            energies,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }
    pub fn focused(&self) -> bool {
        self.focused
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn n_modes(&self) -> usize {
        self.energies.len()
    }

    /// `E_n` for `n` in `1..=n_modes`.
    pub fn mode_energy(&self, index: usize) -> Result<f64> {
        index
            .checked_sub(1)
            .and_then(|i| self.energies.get(i).copied())
            .ok_or_else(|| Error::config(format!("mode {index} is not part of the link")))
    }

    pub fn symbol_energy(&self) -> f64 {
        self.energies.iter().sum()
    }

    /// `N₀ = E_s / SNR`.
    pub fn n0(&self, snr_db: f64) -> f64 {
        self.symbol_energy() / 10f64.powf(snr_db / 10.0)
    }

    /// Received radial field of mode `index` on the detection grid and on
    /// the fine default grid.
    pub fn channel(&self, index: usize) -> Result<ModeChannel> {
        self.mode_energy(index)?;
        let grid = RadialGrid::new(self.scenario.rx_radius(), self.spacing)?;
        let law = RadialLaw::from_focused(self.focused);
        let q = field_quadrature(self.scenario.tx_radius(), &self.scenario);
        let psi = rx_fields_radial(&self.scenario, &law, &[index], grid.radii(), &q)?.remove(0);
        let radii = default_radial_grid(self.scenario.rx_radius(), DEFAULT_RADIAL_SAMPLES);
        let fine = rx_fields_radial(&self.scenario, &law, &[index], &radii, &q)?.remove(0);
        let k = self.scenario.wavenumber();
        let z = self.scenario.distance();
        let compensation = grid
            .radii()
            .iter()
            .map(|r| Complex64::from_polar(1.0, k * r * r / (2.0 * z)))
            .collect();
        Ok(ModeChannel {
            grid,
            psi: psi.samples().to_vec(),
            compensation,
            fine,
        })
    }
}

/// One demultiplexed branch: `y_i = 2π x ψ(ρ_i) + n_i`.
#[derive(Debug, Clone)]
pub struct ModeChannel {
    grid: RadialGrid,
    psi: Vec<Complex64>,
    compensation: Vec<Complex64>,
    fine: RadialField,
}

impl ModeChannel {
    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }
    /// `ψ^ρ` at the detection grid.
    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }
    pub fn fine_field(&self) -> &RadialField {
        &self.fine
    }
    pub fn index(&self) -> usize {
        self.fine.index()
    }
    pub fn charge(&self) -> TopologicalCharge {
        self.fine.charge()
    }

    /// Noise-free branch output for symbol amplitude `x`.
    pub fn noiseless(&self, x: f64) -> Vec<Complex64> {
        self.psi.iter().map(|v| v * (2.0 * PI * x)).collect()
    }

    /// Receive-side quadratic phase correction `exp(+jκρ²/2z)`.
    pub fn compensation(&self) -> &[Complex64] {
        &self.compensation
    }
}

/// A detector bound to one branch.
#[derive(Debug, Clone)]
pub struct Detector<'a> {
    channel: &'a ModeChannel,
    config: DetectorConfig,
    window: RadialWindow,
    cells: Range<usize>,
    gain: Complex64,
}

impl<'a> Detector<'a> {
    pub fn new(channel: &'a ModeChannel, config: DetectorConfig) -> Result<Self> {
        config.validate()?;
        let grid = channel.grid();
        let window = if config.smart && config.strategy != Strategy::MatchedFilter {
            smart_window_of(&channel.fine, config.drop_db)?.snapped(grid)
        } else {
            RadialWindow::full(grid.rx_radius())
        };
        let cells = if config.strategy == Strategy::MatchedFilter {
            0..grid.len()
        } else {
            grid.cells(&window)
        };
        if cells.is_empty() {
            return Err(Error::config("integration window holds no radial samples"));
        }
        let mut det = Self {
            channel,
            config,
            window,
            cells,
            gain: Complex64::new(0.0, 0.0),
        };
        det.gain = det.correlate(&channel.noiseless(1.0));
        Ok(det)
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }
    pub fn window(&self) -> RadialWindow {
        self.window
    }
    pub fn cells(&self) -> Range<usize> {
        self.cells.clone()
    }

    /// Noise-free linear statistic for `x = 1` (MF and ID).
    pub fn gain(&self) -> Complex64 {
        self.gain
    }

    fn template(&self, i: usize) -> Complex64 {
        match self.config.strategy {
            Strategy::MatchedFilter => self.channel.psi[i],
            _ => self.channel.compensation[i].conj(),
        }
    }

    fn correlate(&self, y: &[Complex64]) -> Complex64 {
        let grid = self.channel.grid();
        self.cells
            .clone()
            .map(|i| y[i] * self.template(i).conj() * grid.weight(i))
            .sum()
    }

    fn energy(&self, y: &[Complex64]) -> f64 {
        let grid = self.channel.grid();
        self.cells.clone().map(|i| y[i].norm_sqr() * grid.weight(i)).sum()
    }

    /// Variance of the complex linear statistic under noise density `n0`.
    pub fn noise_variance(&self, n0: f64) -> f64 {
        let grid = self.channel.grid();
        2.0 * PI
            * n0
            * self
                .cells
                .clone()
                .map(|i| self.template(i).norm_sqr() * grid.weight(i))
                .sum::<f64>()
    }

    /// Amplitude of the "1" symbol.
    pub fn on_amplitude(&self) -> f64 {
        match self.config.modulation {
            Modulation::Bpsk => 1.0,
            Modulation::Ook => SQRT_2,
        }
    }

    /// Amplitude of the "0" symbol.
    pub fn off_amplitude(&self) -> f64 {
        match self.config.modulation {
            Modulation::Bpsk => -1.0,
            Modulation::Ook => 0.0,
        }
    }

    /// Received energy of a "1" in the window (energy detection).
    pub fn signal_energy(&self) -> f64 {
        self.energy(&self.channel.noiseless(self.on_amplitude()))
    }

    /// Real decision metric; "1" is decided when it reaches the threshold.
    pub fn metric(&self, y: &[Complex64]) -> f64 {
        match (self.config.strategy, self.config.equalize) {
            (Strategy::EnergyDetection, _) => self.energy(y),
            (Strategy::IntegrateDump, true) => {
                (self.correlate(y) * self.gain.conj() / self.gain.norm()).re
            }
            (Strategy::IntegrateDump, false) => {
                let sign = if self.gain.re < 0.0 { -1.0 } else { 1.0 };
                sign * self.correlate(y).re
            }
            (Strategy::MatchedFilter, _) => self.correlate(y).re,
        }
    }

    /// Decision threshold at noise density `n0`.
    pub fn threshold(&self, n0: f64) -> f64 {
        match self.config.strategy {
            Strategy::EnergyDetection => self.config.threshold.unwrap_or_else(|| {
                let unit = 2.0 * PI * n0;
                ed_optimal_threshold(self.cells.len(), self.signal_energy() / unit).0 * unit
            }),
            _ => 0.0,
        }
    }

    /// Exact bit error probability at noise density `n0` with threshold
    /// `zeta` (ignored for antipodal signalling).
    pub fn error_probability_at(&self, n0: f64, zeta: f64) -> f64 {
        match (self.config.strategy, self.config.equalize) {
            (Strategy::EnergyDetection, _) => {
                let unit = 2.0 * PI * n0;
                ed_error_probability(self.cells.len(), self.signal_energy() / unit, zeta / unit)
            }
            (Strategy::IntegrateDump, false) => {
                q_function((2.0 * self.gain.re.powi(2) / self.noise_variance(n0)).sqrt())
            }
            _ => q_function((2.0 * self.gain.norm_sqr() / self.noise_variance(n0)).sqrt()),
        }
    }

    pub fn error_probability(&self, n0: f64) -> f64 {
        self.error_probability_at(n0, self.threshold(n0))
    }

    /// Error counts for `trials` symbols at each threshold, sharing every
    /// noise draw across thresholds.
    fn count_errors(&self, n0: f64, thresholds: &[f64], trials: u64, seed: u64, point: u64) -> Result<Vec<u64>> {
        let noise = NoiseModel::new(n0, self.channel.grid().clone())?;
        let sample_range = match self.config.strategy {
            Strategy::MatchedFilter => 0..self.channel.grid().len(),
            _ => self.cells.clone(),
        };
        let on = self.channel.noiseless(self.on_amplitude());
        let off = self.channel.noiseless(self.off_amplitude());
        let chunks = trials.div_ceil(CHUNK);
        let counts = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream((point << 32) | c);
                let mut errors = vec![0u64; thresholds.len()];
                let mut y = vec![Complex64::new(0.0, 0.0); on.len()];
                for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                    let bit = t % 2 == 0;
                    noise.sample_into(&mut rng, sample_range.clone(), &mut y);
                    let clean = if bit { &on } else { &off };
                    for i in sample_range.clone() {
                        y[i] += clean[i];
                    }
                    let m = self.metric(&y);
                    for (e, &z) in errors.iter_mut().zip(thresholds) {
                        *e += u64::from((m >= z) != bit);
                    }
                }
                errors
            })
            .reduce(
                || vec![0u64; thresholds.len()],
                |mut a, b| {
                    a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                    a
                },
            );
        Ok(counts)
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials < MIN_TRIALS {
        return Err(Error::config(format!(
            "Monte Carlo needs at least {MIN_TRIALS} trials per point, got {trials}"
        )));
    }
    Ok(())
}

/// BER of mode `index` against link SNR (`E_s/N₀`, dB). Trials are split
/// into fixed chunks, each with its own ChaCha8 stream derived from `seed`,
/// so results do not depend on the thread count.
pub fn ber_monte_carlo(
    link: &Link,
    index: usize,
    config: &DetectorConfig,
    snr_db: &[f64],
    trials: u64,
    seed: u64,
) -> Result<BerCurve> {
    check_trials(trials)?;
    let channel = link.channel(index)?;
    let det = Detector::new(&channel, *config)?;
    let mut errors = Vec::with_capacity(snr_db.len());
    for (p, &snr) in snr_db.iter().enumerate() {
        let n0 = link.n0(snr);
        errors.push(det.count_errors(n0, &[det.threshold(n0)], trials, seed, p as u64)?[0]);
    }
    BerCurve::new(snr_db.to_vec(), errors, vec![trials; snr_db.len()])
}

/// Energy-detection BER of mode `index` at a fixed SNR against the
/// threshold-to-noise ratio `ζ/N₀` (dB). All thresholds see the same noise.
pub fn tnr_sweep(
    link: &Link,
    index: usize,
    snr_db: f64,
    tnr_db: &[f64],
    smart: bool,
    trials: u64,
    seed: u64,
) -> Result<BerCurve> {
    check_trials(trials)?;
    let channel = link.channel(index)?;
    let det = Detector::new(&channel, DetectorConfig::energy_detection(smart, None))?;
    let n0 = link.n0(snr_db);
    let thresholds: Vec<f64> = tnr_db.iter().map(|t| n0 * 10f64.powf(t / 10.0)).collect();
    let errors = det.count_errors(n0, &thresholds, trials, seed, 0)?;
    BerCurve::new(tnr_db.to_vec(), errors, vec![trials; tnr_db.len()])
}

/// Link SNR (dB) at which the exact error probability of mode `index`
/// equals `target`.
pub fn required_snr_db(link: &Link, index: usize, config: &DetectorConfig, target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 0.5) {
        return Err(Error::config("target BER must lie in (0, 0.5)"));
    }
    if config.threshold.is_some() {
        return Err(Error::config("a fixed OOK threshold has no monotone SNR curve"));
    }
    let channel = link.channel(index)?;
    let det = Detector::new(&channel, *config)?;
    let pe = |snr: f64| det.error_probability(link.n0(snr));
    let (floor, ceiling, step) = (-40.0, 100.0, 5.0);
    let mut hi = floor;
    while pe(hi) > target {
        hi += step;
        if hi > ceiling {
            return Err(Error::domain(format!("BER {target} is not reached below {ceiling} dB")));
        }
    }
    if hi == floor {
        return Err(Error::domain(format!("BER {target} is already beaten at {floor} dB")));
    }
    let mut lo = hi - step;
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if pe(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn link() -> Link {
        let s = Scenario::normalized(10.0, 10.0, 100.0, 0.1).unwrap();
        Link::new(&s, true).unwrap()
    }

    #[test]
    fn mf_gain_is_the_mode_energy() {
        let l = link();
        let ch = l.channel(1).unwrap();
        let det = Detector::new(&ch, DetectorConfig::matched_filter()).unwrap();
        let e = l.mode_energy(1).unwrap();
        assert!((det.gain().re - e).abs() < 1e-3 * e);
        assert!(det.gain().im.abs() < 1e-12 * e);
        let n0 = 1e-3;
        assert!((det.noise_variance(n0) - n0 * det.gain().re).abs() < 1e-12 * n0 * e);
    }

    #[test]
    fn id_full_window_variance() {
        let l = link();
        let ch = l.channel(3).unwrap();
        let det = Detector::new(&ch, DetectorConfig::integrate_dump(false, true)).unwrap();
        let r = l.scenario().rx_radius();
        assert!((det.noise_variance(2.0) - PI * 2.0 * r * r).abs() < 1e-12 * r * r);
    }

    #[test]
    fn mf_monte_carlo_matches_closed_form() {
        let l = link();
        let cfg = DetectorConfig::matched_filter();
        let curve = ber_monte_carlo(&l, 2, &cfg, &[0.0, 4.0], 20_000, 5).unwrap();
        let ch = l.channel(2).unwrap();
        let det = Detector::new(&ch, cfg).unwrap();
        for i in 0..curve.len() {
            let p = det.error_probability(l.n0(curve.axis_db()[i]));
            let sd = (p * (1.0 - p) / 20_000.0).sqrt();
            assert!((curve.ber(i) - p).abs() < 3.5 * sd, "{} vs {p}", curve.ber(i));
        }
    }

    #[test]
    fn monte_carlo_is_deterministic_and_seed_sensitive() {
        let l = link();
        let cfg = DetectorConfig::integrate_dump(true, true);
        let a = ber_monte_carlo(&l, 1, &cfg, &[-5.0], 10_000, 11).unwrap();
        let b = ber_monte_carlo(&l, 1, &cfg, &[-5.0], 10_000, 11).unwrap();
        let c = ber_monte_carlo(&l, 1, &cfg, &[-5.0], 10_000, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.errors(), c.errors());
    }

    #[test]
    fn tnr_limits() {
        let l = link();
        let c = tnr_sweep(&l, 1, 19.0, &[-20.0, 60.0], false, 10_000, 3).unwrap();
        assert_eq!(c.ber(0), 0.5);
        assert_eq!(c.ber(1), 0.5);
    }

    #[test]
    fn rejects_bad_requests() {
        let l = link();
        let cfg = DetectorConfig::matched_filter();
        assert!(ber_monte_carlo(&l, 1, &cfg, &[0.0], 0, 1).is_err());
        assert!(ber_monte_carlo(&l, 1, &cfg, &[0.0], 9_999, 1).is_err());
        assert!(ber_monte_carlo(&l, 52, &cfg, &[0.0], 10_000, 1).is_err());
        let mut bad = cfg;
        bad.modulation = Modulation::Ook;
        assert!(ber_monte_carlo(&l, 1, &bad, &[0.0], 10_000, 1).is_err());
        assert!(required_snr_db(&l, 1, &cfg, 0.7).is_err());
    }

    #[test]
    fn required_snr_hits_the_target() {
        let l = link();
        for cfg in [
            DetectorConfig::matched_filter(),
            DetectorConfig::integrate_dump(true, true),
            DetectorConfig::energy_detection(true, None),
        ] {
            let snr = required_snr_db(&l, 1, &cfg, 1e-3).unwrap();
            let ch = l.channel(1).unwrap();
            let p = Detector::new(&ch, cfg).unwrap().error_probability(l.n0(snr));
            assert!((p - 1e-3).abs() < 1e-6, "{cfg:?}: {p}");
        }
    }
}

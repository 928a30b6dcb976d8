//! Receiver chain: angular demultiplexing, radial decision statistics,
//! smart integration windows, noise synthesis and Monte Carlo error rates.

mod sim;
mod stats;

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};
use std::ops::Range;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::export::fmt_f64;

pub use sim::{
    ber_monte_carlo, required_snr_db, tnr_sweep, Detector, Link, ModeChannel, DEFAULT_LINK_MODES,
    MIN_TRIALS,
};
pub use stats::{
    demultiplex, ed_error_probability, ed_optimal_threshold, ed_statistic, id_statistic,
    mf_statistic, ook_decide, q_function, smart_window, smart_window_of, DEFAULT_ANGULAR_SAMPLES,
    DEFAULT_DROP_DB,
};

/// Radial samples at cell midpoints `ρ_i = (i + 1/2) Δρ` covering `[0, R_R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    spacing: f64,
    radii: Vec<f64>,
    rx_radius: f64,
}

impl RadialGrid {
    pub fn new(rx_radius: f64, spacing: f64) -> Result<Self> {
        if !(rx_radius > 0.0 && spacing > 0.0) {
            return Err(Error::config("radial grid needs positive radius and spacing"));
        }
        let cells = (rx_radius / spacing + 1e-9).floor() as usize;
        if cells == 0 {
            return Err(Error::config(format!(
                "radial spacing {spacing} exceeds the receive radius {rx_radius}"
            )));
        }
        Ok(Self {
            spacing,
            radii: (0..cells).map(|i| (i as f64 + 0.5) * spacing).collect(),
            rx_radius,
        })
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
    pub fn len(&self) -> usize {
        self.radii.len()
    }
    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
    pub fn rx_radius(&self) -> f64 {
        self.rx_radius
    }

    /// Integration weight `ρ_i Δρ` of sample `i`.
    pub fn weight(&self, i: usize) -> f64 {
        self.radii[i] * self.spacing
    }

    /// Samples whose midpoint lies in `[start, end)`.
    pub fn cells(&self, window: &RadialWindow) -> Range<usize> {
        let index = |r: f64| ((r / self.spacing - 0.5).ceil().max(0.0) as usize).min(self.len());
        index(window.start)..index(window.end)
    }
}

/// Radial integration interval `[start, end]` in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialWindow {
    start: f64,
    end: f64,
}

impl RadialWindow {
    pub fn new(start: f64, end: f64, rx_radius: f64) -> Result<Self> {
        if !(start >= 0.0 && start <= end && end <= rx_radius * (1.0 + 1e-12)) {
            return Err(Error::config(format!(
                "window [{start}, {end}] is not an interval within [0, {rx_radius}]"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn full(rx_radius: f64) -> Self {
        Self {
            start: 0.0,
            end: rx_radius,
        }
    }

    pub fn start(&self) -> f64 {
        self.start
    }
    pub fn end(&self) -> f64 {
        self.end
    }
    pub fn width(&self) -> f64 {
        self.end - self.start
    }

    /// Smallest union of grid cells containing the window.
    pub fn snapped(&self, grid: &RadialGrid) -> Self {
        let h = grid.spacing();
        let extent = grid.len() as f64 * h;
        Self {
            start: ((self.start / h).floor() * h).min(extent),
            end: ((self.end / h).ceil() * h).min(extent),
        }
    }
}

/// Post-demultiplexing white noise: independent circular complex Gaussian
/// samples with `E|n_i|² = 2πN₀ / (ρ_i Δρ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    n0: f64,
    grid: RadialGrid,
}

impl NoiseModel {
    pub fn new(n0: f64, grid: RadialGrid) -> Result<Self> {
        if !(n0.is_finite() && n0 > 0.0) {
            return Err(Error::config(format!("noise density must be > 0, got {n0}")));
        }
        Ok(Self { n0, grid })
    }

    pub fn n0(&self) -> f64 {
        self.n0
    }
    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn variance(&self, i: usize) -> f64 {
        2.0 * PI * self.n0 / self.grid.weight(i)
    }

    /// Draws samples for the cells in `range` into `out[range]`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, range: Range<usize>, out: &mut [Complex64]) {
        for i in range {
            let s = (0.5 * self.variance(i)).sqrt();
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            out[i] = Complex64::new(re * s, im * s);
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        self.sample_into(rng, 0..self.grid.len(), &mut out);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    MatchedFilter,
    IntegrateDump,
    EnergyDetection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    Bpsk,
    Ook,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::MatchedFilter => "mf",
            Strategy::IntegrateDump => "id",
            Strategy::EnergyDetection => "ed",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mf" => Ok(Strategy::MatchedFilter),
            "id" => Ok(Strategy::IntegrateDump),
            "ed" => Ok(Strategy::EnergyDetection),
            other => Err(Error::config(format!("unknown detection strategy '{other}'"))),
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modulation::Bpsk => "bpsk",
            Modulation::Ook => "ook",
        })
    }
}

impl FromStr for Modulation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bpsk" => Ok(Modulation::Bpsk),
            "ook" => Ok(Modulation::Ook),
            other => Err(Error::config(format!("unknown modulation '{other}'"))),
        }
    }
}

/// Detector settings for one receive branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub strategy: Strategy,
    pub modulation: Modulation,
    /// Restrict integration to the mode's smart window.
    pub smart: bool,
    /// Drop below the field peak that bounds the smart window, dB.
    pub drop_db: f64,
    /// Single-tap phase equalization (integrate-and-dump only).
    pub equalize: bool,
    /// OOK threshold `ζ` in energy units; `None` selects the optimum.
    pub threshold: Option<f64>,
}

impl DetectorConfig {
    pub fn matched_filter() -> Self {
        Self {
            strategy: Strategy::MatchedFilter,
            modulation: Modulation::Bpsk,
            smart: false,
            drop_db: DEFAULT_DROP_DB,
            equalize: false,
            threshold: None,
        }
    }

    pub fn integrate_dump(smart: bool, equalize: bool) -> Self {
        Self {
            strategy: Strategy::IntegrateDump,
            smart,
            equalize,
            ..Self::matched_filter()
        }
    }

    pub fn energy_detection(smart: bool, threshold: Option<f64>) -> Self {
        Self {
            strategy: Strategy::EnergyDetection,
            modulation: Modulation::Ook,
            smart,
            threshold,
            ..Self::matched_filter()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.strategy, self.modulation) {
            (Strategy::EnergyDetection, Modulation::Ook) => {}
            (Strategy::MatchedFilter | Strategy::IntegrateDump, Modulation::Bpsk) => {}
            (s, m) => {
                return Err(Error::config(format!("strategy {s} cannot demodulate {m}")));
            }
        }
        if !(self.drop_db > 0.0) {
            return Err(Error::config("smart-window drop must be > 0 dB"));
        }
        if let Some(z) = self.threshold {
            if !(z >= 0.0 && z.is_finite()) {
                return Err(Error::config("OOK threshold must be finite and >= 0"));
            }
            if self.strategy != Strategy::EnergyDetection {
                return Err(Error::config("a threshold only applies to energy detection"));
            }
        }
        if self.equalize && self.strategy != Strategy::IntegrateDump {
            return Err(Error::config("equalization only applies to integrate-and-dump"));
        }
        Ok(())
    }
}

/// Bit error rate estimates along an SNR or TNR axis.
#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    axis_db: Vec<f64>,
    errors: Vec<u64>,
    trials: Vec<u64>,
}

impl BerCurve {
    pub fn new(axis_db: Vec<f64>, errors: Vec<u64>, trials: Vec<u64>) -> Result<Self> {
        if axis_db.len() != errors.len() || axis_db.len() != trials.len() {
            return Err(Error::config("BER curve columns differ in length"));
        }
        if trials.iter().zip(&errors).any(|(t, e)| *t == 0 || e > t) {
            return Err(Error::config("every BER point needs trials >= errors and trials > 0"));
        }
        Ok(Self {
            axis_db,
            errors,
            trials,
        })
    }

    pub fn axis_db(&self) -> &[f64] {
        &self.axis_db
    }
    pub fn errors(&self) -> &[u64] {
        &self.errors
    }
    pub fn trials(&self) -> &[u64] {
        &self.trials
    }
    pub fn len(&self) -> usize {
        self.axis_db.len()
    }
    pub fn is_empty(&self) -> bool {
        self.axis_db.is_empty()
    }

    pub fn ber(&self, i: usize) -> f64 {
        self.errors[i] as f64 / self.trials[i] as f64
    }

    /// Binomial standard deviation of the estimate at point `i`.
    pub fn sigma(&self, i: usize) -> f64 {
        let p = self.ber(i);
        (p * (1.0 - p) / self.trials[i] as f64).sqrt()
    }

    /// Normal-approximation 95% half-width.
    pub fn ci95(&self, i: usize) -> f64 {
        1.96 * self.sigma(i)
    }

    /// Index of the smallest BER (first one on ties).
    pub fn argmin(&self) -> usize {
        (0..self.len()).fold(0, |best, i| if self.ber(i) < self.ber(best) { i } else { best })
    }

    /// CSV with columns `axis_db,ber,trials,ci95`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "axis_db,ber,trials,ci95")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_f64(self.axis_db[i]),
                fmt_f64(self.ber(i)),
                self.trials[i],
                fmt_f64(self.ci95(i))
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_midpoints() {
        let g = RadialGrid::new(1.0, 0.025).unwrap();
        assert_eq!(g.len(), 40);
        assert!((g.radii()[0] - 0.0125).abs() < 1e-15);
        assert!((g.radii()[39] - 0.9875).abs() < 1e-12);
        assert!(RadialGrid::new(0.01, 0.025).is_err());
        let total: f64 = (0..g.len()).map(|i| g.weight(i)).sum();
        assert!((total - 0.5).abs() < 1e-12);
    }

    #[test]
    fn window_cells() {
        let g = RadialGrid::new(1.0, 0.1).unwrap();
        assert_eq!(g.cells(&RadialWindow::full(1.0)), 0..10);
        let w = RadialWindow::new(0.3, 0.3, 1.0).unwrap();
        assert!(g.cells(&w).is_empty());
        let w = RadialWindow::new(0.22, 0.41, 1.0).unwrap();
        assert_eq!(g.cells(&w), 2..4);
        assert_eq!(g.cells(&w.snapped(&g)), 2..5);
        assert!(RadialWindow::new(0.5, 0.4, 1.0).is_err());
        assert!(RadialWindow::new(0.0, 1.5, 1.0).is_err());
    }

    #[test]
    fn noise_energy_mean_per_cell() {
        let g = RadialGrid::new(1.0, 0.05).unwrap();
        let n0 = 0.3;
        let model = NoiseModel::new(n0, g.clone()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let draws = 20_000;
        let mut mean = 0.0;
        for _ in 0..draws {
            let n = model.sample(&mut rng);
            mean += (0..g.len()).map(|i| n[i].norm_sqr() * g.weight(i)).sum::<f64>();
        }
        mean /= draws as f64;
        let want = 2.0 * PI * n0 * g.len() as f64;
        // each weighted term is exponential with mean 2πN₀
        let sd = want / (g.len() as f64 * draws as f64).sqrt();
        assert!((mean - want).abs() < 4.0 * sd, "{mean} vs {want}");
        assert!(NoiseModel::new(0.0, g).is_err());
    }

    #[test]
    fn config_pairings() {
        assert!(DetectorConfig::matched_filter().validate().is_ok());
        assert!(DetectorConfig::integrate_dump(true, true).validate().is_ok());
        assert!(DetectorConfig::energy_detection(true, Some(1.0)).validate().is_ok());
        let mut c = DetectorConfig::energy_detection(false, None);
        c.modulation = Modulation::Bpsk;
        assert!(c.validate().is_err());
        let mut c = DetectorConfig::matched_filter();
        c.modulation = Modulation::Ook;
        assert!(c.validate().is_err());
        let mut c = DetectorConfig::integrate_dump(true, false);
        c.drop_db = 0.0;
        assert!(c.validate().is_err());
        assert!(DetectorConfig::energy_detection(false, Some(-1.0)).validate().is_err());
        for s in ["mf", "id", "ed"] {
            assert_eq!(s.parse::<Strategy>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn ber_curve_statistics() {
        let c = BerCurve::new(vec![0.0, 3.0], vec![100, 0], vec![10_000, 10_000]).unwrap();
        assert!((c.ber(0) - 0.01).abs() < 1e-15);
        assert!((c.ci95(0) - 1.96 * (0.01f64 * 0.99 / 1e4).sqrt()).abs() < 1e-15);
        assert_eq!(c.ci95(1), 0.0);
        assert_eq!(c.argmin(), 1);
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("axis_db,ber,trials,ci95\n0,0.01,10000,"));
        assert!(BerCurve::new(vec![0.0], vec![2], vec![1]).is_err());
    }
}

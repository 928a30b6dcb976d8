//! Decision statistics and closed-form error probabilities.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use super::{RadialGrid, RadialWindow};
use crate::error::{Error, Result};
use crate::geometry::Scenario;
use crate::oam::{default_radial_grid, rx_field_radial, RadialField, TopologicalCharge};
use crate::oam::DEFAULT_RADIAL_SAMPLES;

pub const DEFAULT_ANGULAR_SAMPLES: usize = 256;
pub const DEFAULT_DROP_DB: f64 = 10.0;

/// Correlates a received field sampler with `exp(-jℓφ)` over a uniform
/// azimuth grid: `y(ρ) = ∫ ψ(ρ, φ) exp(-jℓφ) dφ`.
pub fn demultiplex<F>(
    field: F,
    charge: TopologicalCharge,
    radii: &[f64],
    angular_samples: usize,
) -> Result<Vec<Complex64>>
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    if angular_samples == 0 {
        return Err(Error::config("angular sample count must be > 0"));
    }
    let dphi = 2.0 * PI / angular_samples as f64;
    let l = charge.value() as f64;
    let rotors: Vec<(f64, Complex64)> = (0..angular_samples)
        .map(|k| {
            let phi = k as f64 * dphi;
            (phi, Complex64::from_polar(dphi, -l * phi))
        })
        .collect();
    Ok(radii
        .par_iter()
        .map(|&rho| rotors.iter().map(|&(phi, r)| field(rho, phi) * r).sum())
        .collect())
}

fn check_len(y: &[Complex64], grid: &RadialGrid) -> Result<()> {
    if y.len() != grid.len() {
        return Err(Error::config(format!(
            "signal has {} samples but the radial grid has {}",
            y.len(),
            grid.len()
        )));
    }
    Ok(())
}

/// `Σ y_i f_i* ρ_i Δρ` over the whole grid.
pub fn mf_statistic(y: &[Complex64], template: &[Complex64], grid: &RadialGrid) -> Result<Complex64> {
    check_len(y, grid)?;
    check_len(template, grid)?;
    Ok((0..grid.len())
        .map(|i| y[i] * template[i].conj() * grid.weight(i))
        .sum())
}

/// `Σ y_i ρ_i Δρ` over the cells of `window`.
pub fn id_statistic(y: &[Complex64], grid: &RadialGrid, window: &RadialWindow) -> Result<Complex64> {
    check_len(y, grid)?;
    Ok(grid.cells(window).map(|i| y[i] * grid.weight(i)).sum())
}

/// `Σ |y_i|² ρ_i Δρ` over the cells of `window`.
pub fn ed_statistic(y: &[Complex64], grid: &RadialGrid, window: &RadialWindow) -> Result<f64> {
    check_len(y, grid)?;
    Ok(grid
        .cells(window)
        .map(|i| y[i].norm_sqr() * grid.weight(i))
        .sum())
}

/// Contiguous interval around the peak of `|ψ|` where the field stays within
/// `drop_db` of the peak.
pub fn smart_window_of(field: &RadialField, drop_db: f64) -> Result<RadialWindow> {
    if !(drop_db > 0.0) {
        return Err(Error::config("smart-window drop must be > 0 dB"));
    }
    let (peak_at, peak) = field.peak();
    if !(peak > 0.0) {
        return Err(Error::DegenerateField(format!(
            "mode {} has no received field to window",
            field.index()
        )));
    }
    let floor = peak * 10f64.powf(-drop_db / 20.0);
    let mag: Vec<f64> = field.samples().iter().map(|v| v.norm()).collect();
    let mut lo = peak_at;
    while lo > 0 && mag[lo - 1] >= floor {
        lo -= 1;
    }
    let mut hi = peak_at;
    while hi + 1 < mag.len() && mag[hi + 1] >= floor {
        hi += 1;
    }
    let radii = field.radii();
    let rx_radius = radii[radii.len() - 1];
    RadialWindow::new(radii[lo], radii[hi], rx_radius)
}

/// Smart window of mode `index`, located on the default 1024-sample field.
pub fn smart_window(index: usize, scenario: &Scenario, focused: bool, drop_db: f64) -> Result<RadialWindow> {
    let radii = default_radial_grid(scenario.rx_radius(), DEFAULT_RADIAL_SAMPLES);
    smart_window_of(&rx_field_radial(index, scenario, focused, &radii)?, drop_db)
}

/// OOK decision: 1 when `y >= ζ`.
pub fn ook_decide(y: f64, zeta: f64) -> u8 {
    u8::from(y >= zeta)
}

/// Gaussian tail probability `Q(x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / 2f64.sqrt())
}

/// Error probability of equiprobable OOK energy detection over `cells`
/// noise samples.
///
/// `mu` is the signal energy of a "1" and `u` the threshold, both in units
/// of `2πN₀`. Under "0" the statistic is `Gamma(cells, 1)`; under "1" it is a
/// Poisson(`mu`) mixture of `Gamma(cells + k, 1)`.
pub fn ed_error_probability(cells: usize, mu: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.5;
    }
    let m = cells as f64;
    let false_alarm = gamma_ur(m, u);
    let spread = mu.sqrt();
    let k_lo = (mu - 12.0 * spread - 10.0).max(0.0).floor() as u64;
    // Gamma(a) mass below u is negligible once a exceeds u by many sd
    let k_hi = (mu + 12.0 * spread + 20.0)
        .min(u - m + 12.0 * (u + 1.0).sqrt() + 20.0)
        .ceil()
        .max(0.0) as u64;
    let miss: f64 = (k_lo..=k_hi)
        .map(|k| {
            let kf = k as f64;
            let log_p = if mu > 0.0 {
                -mu + kf * mu.ln() - ln_gamma(kf + 1.0)
            } else if k == 0 {
                0.0
            } else {
                f64::NEG_INFINITY
            };
            log_p.exp() * gamma_lr(m + kf, u)
        })
        .sum();
    0.5 * (false_alarm + miss.min(1.0))
}

/// Threshold (in units of `2πN₀`) minimising [`ed_error_probability`], and
/// the minimum.
pub fn ed_optimal_threshold(cells: usize, mu: f64) -> (f64, f64) {
    let upper = 4.0 * (cells as f64 + mu);
    let f = |u: f64| ed_error_probability(cells, mu, u);
    let scan = 400;
    let step = upper / scan as f64;
    let best = (0..=scan)
        .map(|i| (i, f(i as f64 * step)))
        .fold((0usize, f64::INFINITY), |b, (i, v)| if v < b.1 { (i, v) } else { b });
    let (mut a, mut b) = (
        (best.0.saturating_sub(1)) as f64 * step,
        ((best.0 + 1).min(scan)) as f64 * step,
    );
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-10 * upper {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let u = 0.5 * (a + b);
    (u, f(u))
}

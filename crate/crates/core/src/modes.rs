//! Optimum communication modes by brute force: sample both disks, build the
//! Green coupling matrix between the samples and take its singular values.

use std::f64::consts::PI;
use std::fmt;
use std::io::{self, Write};

use faer::Mat;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::export::fmt_f64;
use crate::geometry::Scenario;
use crate::numerics::{svd_spectrum, ComplexMatrix};

/// Default budget for the dense coupling matrix and SVD workspace.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

/// Samples of a disk at `z = const`, with per-sample area weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGrid {
    points: Vec<[f64; 2]>,
    weights: Vec<f64>,
    radius: f64,
}

impl SurfaceGrid {
    pub fn new(points: Vec<[f64; 2]>, weights: Vec<f64>, radius: f64) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::config("grid needs one weight per point and at least one point"));
        }
        let slack = radius * (1.0 + 1e-12);
        if let Some(p) = points.iter().find(|p| p[0].hypot(p[1]) > slack) {
            return Err(Error::config(format!(
                "point ({}, {}) lies outside the disk of radius {radius}",
                p[0], p[1]
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::config("area weights must be finite and positive"));
        }
        Ok(Self {
            points,
            weights,
            radius,
        })
    }

    /// Square lattice of pitch `spacing` through the origin, clipped to the
    /// disk, every sample weighted by `spacing²`.
    pub fn disk_lattice(radius: f64, spacing: f64) -> Result<Self> {
        if !(radius > 0.0 && spacing > 0.0) {
            return Err(Error::config("radius and spacing must be > 0"));
        }
        let n = (radius / spacing).floor() as i64;
        let r2 = radius * radius * (1.0 + 1e-12);
        let mut points = Vec::new();
        for i in -n..=n {
            for j in -n..=n {
                let (x, y) = (i as f64 * spacing, j as f64 * spacing);
                if x * x + y * y <= r2 {
                    points.push([x, y]);
                }
            }
        }
        let weights = vec![spacing * spacing; points.len()];
        Self::new(points, weights, radius)
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Relative deviation of the summed weights from `πR²`.
    pub fn area_error(&self) -> f64 {
        let area = PI * self.radius * self.radius;
        (self.weights.iter().sum::<f64>() - area).abs() / area
    }

    /// Same grid with every weight multiplied by `factor`.
    pub fn scaled_weights(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.points.clone(),
            self.weights.iter().map(|w| w * factor).collect(),
            self.radius,
        )
    }
}

/// Scalar free-space Green function `exp(-jκr) / (4πr)`.
pub fn green(point_t: [f64; 3], point_r: [f64; 3], wavenumber: f64) -> Result<Complex64> {
    let r = distance3(point_t, point_r);
    if r == 0.0 {
        return Err(Error::Singularity {
            distance: 0.0,
            limit: 0.0,
        });
    }
    Ok(green_at(r, wavenumber))
}

#[inline]
fn green_at(r: f64, wavenumber: f64) -> Complex64 {
    Complex64::from_polar(1.0 / (4.0 * PI * r), -wavenumber * r)
}

#[inline]
fn distance3(a: [f64; 3], b: [f64; 3]) -> f64 {
    let (dx, dy, dz) = (a[0] - b[0], a[1] - b[1], a[2] - b[2]);
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Coupling matrix between a transmitting grid at `z = 0` and a receiving
/// grid at `z = distance`. Row `i` is receive sample `i`, column `j` is
/// transmit sample `j`; the entry is `G(r_i, s_j) √(w_i w_j)`.
///
/// Pairs closer than a hundredth of a wavelength are rejected.
pub fn coupling_matrix(
    grid_t: &SurfaceGrid,
    grid_r: &SurfaceGrid,
    distance: f64,
    wavenumber: f64,
) -> Result<ComplexMatrix> {
    let limit = 2.0 * PI / wavenumber / 100.0;
    let rows = grid_r.len();
    let columns: Vec<(Vec<Complex64>, f64)> = grid_t
        .points
        .par_iter()
        .zip(grid_t.weights.par_iter())
        .map(|(s, &ws)| {
            let s3 = [s[0], s[1], 0.0];
            let mut min_r = f64::INFINITY;
            let col = grid_r
                .points
                .iter()
                .zip(&grid_r.weights)
                .map(|(r, &wr)| {
                    let d = distance3(s3, [r[0], r[1], distance]);
                    min_r = min_r.min(d);
                    green_at(d, wavenumber) * (ws * wr).sqrt()
                })
                .collect();
            (col, min_r)
        })
        .collect();
    let min_r = columns.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    if min_r < limit {
        return Err(Error::Singularity {
            distance: min_r,
            limit,
        });
    }
    Ok(Mat::from_fn(rows, grid_t.len(), |i, j| columns[j].0[i]))
}

/// How a spectrum's entries convert to decibels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumScale {
    /// Field-like values (singular values): `20 log10`.
    Amplitude,
    /// Energy-like values (mode energies): `10 log10`.
    Energy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeLabel {
    /// Position in a singular spectrum, 1-based.
    Index(usize),
    /// OAM topological charge.
    Charge(i32),
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeLabel::Index(n) => write!(f, "n={n}"),
            ModeLabel::Charge(l) => write!(f, "l={l:+}"),
        }
    }
}

/// Coupling intensities in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    values: Vec<f64>,
    labels: Vec<ModeLabel>,
    scale: SpectrumScale,
}

impl ModeSpectrum {
    /// Sorts `values` (and their labels) descending.
    pub fn new(values: Vec<f64>, labels: Vec<ModeLabel>, scale: SpectrumScale) -> Result<Self> {
        if values.is_empty() || values.len() != labels.len() {
            return Err(Error::config("spectrum needs one label per value and at least one value"));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::domain("spectrum values must be finite and non-negative"));
        }
        let mut pairs: Vec<(f64, ModeLabel)> = values.into_iter().zip(labels).collect();
        // stable: degenerate pairs keep their input order
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (values, labels) = pairs.into_iter().unzip();
        Ok(Self {
            values,
            labels,
            scale,
        })
    }

    /// Singular values labelled by their 1-based rank.
    pub fn from_singular_values(values: Vec<f64>) -> Result<Self> {
        let labels = (1..=values.len()).map(ModeLabel::Index).collect();
        Self::new(values, labels, SpectrumScale::Amplitude)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn labels(&self) -> &[ModeLabel] {
        &self.labels
    }
    pub fn scale(&self) -> SpectrumScale {
        self.scale
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The largest entry; every dB value is relative to it.
    pub fn reference(&self) -> f64 {
        self.values[0]
    }

    /// Entry `i` relative to the reference on the energy scale, in dB.
    pub fn relative_db(&self, i: usize) -> f64 {
        let ratio = self.values[i] / self.reference();
        match self.scale {
            SpectrumScale::Amplitude => 20.0 * ratio.log10(),
            SpectrumScale::Energy => 10.0 * ratio.log10(),
        }
    }

    /// Energy-scale linear value relative to the reference.
    pub fn relative_energy(&self, i: usize) -> f64 {
        let ratio = self.values[i] / self.reference();
        match self.scale {
            SpectrumScale::Amplitude => ratio * ratio,
            SpectrumScale::Energy => ratio,
        }
    }

    /// Entries within `threshold_db` (<= 0) of the reference.
    pub fn count_modes(&self, threshold_db: f64) -> usize {
        (0..self.len())
            .filter(|&i| self.relative_db(i) >= threshold_db)
            .count()
    }

    /// CSV with columns `index,value_linear,value_db_energy_scale,label`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "index,value_linear,value_db_energy_scale,label")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{},{},{},{}",
                i + 1,
                fmt_f64(self.values[i]),
                fmt_f64(self.relative_db(i)),
                self.labels[i]
            )?;
        }
        Ok(())
    }
}

/// Rough peak memory of assembling and decomposing a `rows x cols` matrix.
pub fn svd_memory_estimate(rows: usize, cols: usize) -> u64 {
    // assembly buffer + matrix + decomposition workspace
    3 * 16 * rows as u64 * cols as u64
}

/// Singular spectrum of the link with both disks sampled on a square lattice
/// of pitch `spacing`.
pub fn svd_mode_spectrum(s: &Scenario, spacing: f64, memory_budget: u64) -> Result<ModeSpectrum> {
    let grid_t = SurfaceGrid::disk_lattice(s.tx_radius(), spacing)?;
    let grid_r = SurfaceGrid::disk_lattice(s.rx_radius(), spacing)?;
    let required = svd_memory_estimate(grid_r.len(), grid_t.len());
    if required > memory_budget {
        let factor = (required as f64 / memory_budget as f64).powf(0.25);
        return Err(Error::Resource {
            required_bytes: required,
            budget_bytes: memory_budget,
            suggested_spacing: spacing * factor * 1.01,
        });
    }
    let m = coupling_matrix(&grid_t, &grid_r, s.distance(), s.wavenumber())?;
    ModeSpectrum::from_singular_values(svd_spectrum(&m)?)
}

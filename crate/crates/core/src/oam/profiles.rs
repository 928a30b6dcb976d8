//! Cartesian amplitude and phase maps of the transmit and receive surfaces.

use std::f64::consts::PI;
use std::io::{self, Write};

use super::field::{field_quadrature, rx_fields_radial};
use super::{RadialLaw, TopologicalCharge, TxProfile};
use crate::error::{Error, Result};
use crate::export::fmt_f64;
use crate::geometry::Scenario;

/// Row-major samples on a square Cartesian grid. Cells outside the disk hold
/// `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileGrid {
    axis: Vec<f64>,
    values: Vec<f64>,
}

impl ProfileGrid {
    fn cell_centers(radius: f64, resolution: usize) -> Vec<f64> {
        let h = 2.0 * radius / resolution as f64;
        (0..resolution).map(|i| -radius + (i as f64 + 0.5) * h).collect()
    }

    /// Cell-centre coordinates, shared by both axes.
    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    /// Value at column `ix` (x) and row `iy` (y).
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.axis.len() + ix]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// First row holds the x coordinates; every following row starts with
    /// its y coordinate.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        write!(w, "y\\x")?;
        for x in &self.axis {
            write!(w, ",{}", fmt_f64(*x))?;
        }
        writeln!(w)?;
        for (iy, y) in self.axis.iter().enumerate() {
            write!(w, "{}", fmt_f64(*y))?;
            for ix in 0..self.axis.len() {
                write!(w, ",{}", fmt_f64(self.get(ix, iy)))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Transmit phase plus receive amplitude and phase for one mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileGrids {
    pub index: usize,
    pub charge: TopologicalCharge,
    pub focused: bool,
    pub tx_phase: ProfileGrid,
    pub rx_amplitude: ProfileGrid,
    pub rx_phase: ProfileGrid,
}

fn wrap(phase: f64) -> f64 {
    let p = (phase + PI).rem_euclid(2.0 * PI) - PI;
    if p == -PI {
        PI
    } else {
        p
    }
}

/// Maps of mode `index` on `resolution x resolution` grids over each disk.
pub fn emit_profile_grids(
    index: usize,
    scenario: &Scenario,
    focused: bool,
    resolution: usize,
) -> Result<ProfileGrids> {
    if resolution < 32 {
        return Err(Error::config(format!("profile resolution must be >= 32, got {resolution}")));
    }
    let law = RadialLaw::from_focused(focused);
    let tx = TxProfile::new(index, scenario, law.clone())?;

    let tx_axis = ProfileGrid::cell_centers(scenario.tx_radius(), resolution);
    let mut tx_phase = Vec::with_capacity(resolution * resolution);
    for &y in &tx_axis {
        for &x in &tx_axis {
            let rho = x.hypot(y);
            tx_phase.push(if rho <= scenario.tx_radius() {
                wrap(tx.phase(rho, y.atan2(x)))
            } else {
                f64::NAN
            });
        }
    }

    let rx_axis = ProfileGrid::cell_centers(scenario.rx_radius(), resolution);
    let mut radii: Vec<f64> = rx_axis
        .iter()
        .flat_map(|&y| rx_axis.iter().map(move |&x| x.hypot(y)))
        .filter(|&r| r <= scenario.rx_radius())
        .collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let q = field_quadrature(scenario.tx_radius(), scenario);
    let field = rx_fields_radial(scenario, &law, &[index], &radii, &q)?.remove(0);

    let mut rx_amplitude = Vec::with_capacity(resolution * resolution);
    let mut rx_phase = Vec::with_capacity(resolution * resolution);
    for &y in &rx_axis {
        for &x in &rx_axis {
            let rho = x.hypot(y);
            match radii.binary_search_by(|r| r.total_cmp(&rho)) {
                Ok(i) => {
                    let v = field.full(i, y.atan2(x));
                    rx_amplitude.push(v.norm());
                    rx_phase.push(wrap(v.arg()));
                }
                Err(_) => {
                    rx_amplitude.push(f64::NAN);
                    rx_phase.push(f64::NAN);
                }
            }
        }
    }

    Ok(ProfileGrids {
        index,
        charge: tx.charge(),
        focused,
        tx_phase: ProfileGrid {
            axis: tx_axis,
            values: tx_phase,
        },
        rx_amplitude: ProfileGrid {
            axis: rx_axis.clone(),
            values: rx_amplitude,
        },
        rx_phase: ProfileGrid {
            axis: rx_axis,
            values: rx_phase,
        },
    })
}

//! OAM transmit bases (uniform disk, optionally focused), their Fresnel-zone
//! propagation to the receiving disk, mode energies and path gain.

mod energy;
mod field;
mod profiles;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Scenario;
use crate::numerics::MAX_ORDER;

pub use energy::{
    mode_energies, mode_energy, oam_mode_spectrum, path_gain, path_gain_with_quadrature,
};
pub use field::{
    airy_field, default_radial_grid, field_quadrature, rx_field_exact, rx_field_radial, rx_fields_radial,
    RadialField, DEFAULT_RADIAL_SAMPLES,
};
pub use profiles::{emit_profile_grids, ProfileGrid, ProfileGrids};

/// Signed OAM charge `ℓ` with `|ℓ| <= 64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TopologicalCharge(i32);

impl TopologicalCharge {
    pub fn new(l: i32) -> Result<Self> {
        if l.unsigned_abs() > MAX_ORDER {
            return Err(Error::UnsupportedOrder {
                order: l as i64,
                max: MAX_ORDER,
            });
        }
        Ok(Self(l))
    }

    pub fn value(self) -> i32 {
        self.0
    }

    /// `j^ℓ`, exact for every integer `ℓ`.
    pub fn j_power(self) -> Complex64 {
        match self.0.rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl fmt::Display for TopologicalCharge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.0)
    }
}

/// Charge carried by mode index `n >= 1`: `0, +1, -1, +2, -2, ...`.
pub fn topological_charge(n: usize) -> Result<TopologicalCharge> {
    if n == 0 {
        return Err(Error::config("mode indices start at 1"));
    }
    let l = if n.is_multiple_of(2) {
        (n / 2) as i64
    } else {
        -((n - 1) as i64 / 2)
    };
    let l = i32::try_from(l).map_err(|_| Error::UnsupportedOrder {
        order: l,
        max: MAX_ORDER,
    })?;
    TopologicalCharge::new(l)
}

/// Mode index carrying `charge`; inverse of [`topological_charge`].
pub fn mode_index(charge: TopologicalCharge) -> usize {
    let l = charge.value();
    match l {
        0 => 1,
        l if l > 0 => 2 * l as usize,
        l => 2 * l.unsigned_abs() as usize + 1,
    }
}

/// Charges of modes `1..=count`.
pub fn charges(count: usize) -> Result<Vec<TopologicalCharge>> {
    (1..=count).map(topological_charge).collect()
}

/// Radial phase imposed on the transmit disk on top of the helical term.
#[derive(Clone)]
pub enum RadialLaw {
    /// Constant phase.
    Uniform,
    /// `exp(jκρ²/2z)`, focusing on the receiver axis at the link distance.
    Focused,
    /// Arbitrary phase `θ(ρ)` in radians.
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl RadialLaw {
    pub fn from_focused(focused: bool) -> Self {
        if focused {
            RadialLaw::Focused
        } else {
            RadialLaw::Uniform
        }
    }

    pub fn is_focused(&self) -> bool {
        matches!(self, RadialLaw::Focused)
    }

    /// Phase in radians at radius `rho` for a link of the given scenario.
    pub fn phase(&self, rho: f64, s: &Scenario) -> f64 {
        match self {
            RadialLaw::Uniform => 0.0,
            RadialLaw::Focused => s.wavenumber() * rho * rho / (2.0 * s.distance()),
            RadialLaw::Custom(f) => f(rho),
        }
    }
}

impl fmt::Debug for RadialLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RadialLaw::Uniform => "Uniform",
            RadialLaw::Focused => "Focused",
            RadialLaw::Custom(_) => "Custom",
        })
    }
}

/// Unit-energy transmit basis function
/// `φ(ρ, φ) = Π(ρ/R_T) / R_T · exp(jθ(ρ)) · exp(jℓφ) / √π`.
#[derive(Debug, Clone)]
pub struct TxProfile {
    index: usize,
    charge: TopologicalCharge,
    law: RadialLaw,
    scenario: Scenario,
}

impl TxProfile {
    pub fn new(index: usize, scenario: &Scenario, law: RadialLaw) -> Result<Self> {
        Ok(Self {
            index,
            charge: topological_charge(index)?,
            law,
            scenario: *scenario,
        })
    }

    pub fn index(&self) -> usize {
        self.index
    }
    pub fn charge(&self) -> TopologicalCharge {
        self.charge
    }
    pub fn law(&self) -> &RadialLaw {
        &self.law
    }
    pub fn is_focused(&self) -> bool {
        self.law.is_focused()
    }

    /// Amplitude inside the disk, `1 / (R_T √π)`.
    pub fn amplitude(&self) -> f64 {
        1.0 / (self.scenario.tx_radius() * PI.sqrt())
    }

    /// Radial factor including the `1/√π` constant; zero outside the disk.
    pub fn radial(&self, rho: f64) -> Complex64 {
        if !(0.0..=self.scenario.tx_radius()).contains(&rho) {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.amplitude(), self.law.phase(rho, &self.scenario))
    }

    pub fn value(&self, rho: f64, phi: f64) -> Complex64 {
        self.radial(rho) * Complex64::from_polar(1.0, self.charge.value() as f64 * phi)
    }

    /// Transmit phase in radians, unwrapped.
    pub fn phase(&self, rho: f64, phi: f64) -> f64 {
        self.charge.value() as f64 * phi + self.law.phase(rho, &self.scenario)
    }
}

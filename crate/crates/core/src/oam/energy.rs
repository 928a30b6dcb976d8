//! Received mode energies and path gain.

use std::f64::consts::PI;

use super::field::{field_quadrature, rx_fields_radial};
use super::{charges, RadialLaw};
use crate::error::{Error, Result};
use crate::geometry::Scenario;
use crate::modes::{ModeLabel, ModeSpectrum, SpectrumScale};
use crate::numerics::Quadrature;

/// `E_n = 2π ∫_0^{R_R} |ψ_n^ρ|² ρ dρ` for every mode in `indices`.
pub fn mode_energies(
    scenario: &Scenario,
    law: &RadialLaw,
    indices: &[usize],
    q_tx: &Quadrature,
    q_rx: &Quadrature,
) -> Result<Vec<f64>> {
    let nodes = q_rx
        .nodes(0.0, scenario.rx_radius())
        .ok_or_else(|| Error::config("mode energies need a fixed-node receive quadrature"))?;
    let radii: Vec<f64> = nodes.iter().map(|n| n.0).collect();
    let fields = rx_fields_radial(scenario, law, indices, &radii, q_tx)?;
    Ok(fields
        .iter()
        .map(|f| {
            2.0 * PI
                * f.samples()
                    .iter()
                    .zip(&nodes)
                    .map(|(v, &(rho, w))| v.norm_sqr() * rho * w)
                    .sum::<f64>()
        })
        .collect())
}

fn default_quadratures(s: &Scenario) -> (Quadrature, Quadrature) {
    (
        field_quadrature(s.tx_radius(), s),
        field_quadrature(s.rx_radius(), s),
    )
}

/// Received energy of mode `index` with the default quadratures.
pub fn mode_energy(index: usize, scenario: &Scenario, focused: bool) -> Result<f64> {
    let (qt, qr) = default_quadratures(scenario);
    Ok(mode_energies(scenario, &RadialLaw::from_focused(focused), &[index], &qt, &qr)?[0])
}

/// `η = Σ E_n / N` over modes `1..=n_modes` of unit-energy bases.
pub fn path_gain(scenario: &Scenario, n_modes: usize, focused: bool) -> Result<f64> {
    let (qt, qr) = default_quadratures(scenario);
    path_gain_with_quadrature(scenario, n_modes, focused, &qt, &qr)
}

pub fn path_gain_with_quadrature(
    scenario: &Scenario,
    n_modes: usize,
    focused: bool,
    q_tx: &Quadrature,
    q_rx: &Quadrature,
) -> Result<f64> {
    if n_modes == 0 || n_modes.is_multiple_of(2) {
        return Err(Error::config(format!(
            "path gain needs an odd, symmetric set of modes, got N = {n_modes}"
        )));
    }
    let indices: Vec<usize> = (1..=n_modes).collect();
    let e = mode_energies(scenario, &RadialLaw::from_focused(focused), &indices, q_tx, q_rx)?;
    Ok(e.iter().sum::<f64>() / n_modes as f64)
}

/// Energies of modes `1..=n_modes` as an energy-scale spectrum labelled by
/// charge.
pub fn oam_mode_spectrum(scenario: &Scenario, n_modes: usize, focused: bool) -> Result<ModeSpectrum> {
    let (qt, qr) = default_quadratures(scenario);
    let indices: Vec<usize> = (1..=n_modes).collect();
    let e = mode_energies(scenario, &RadialLaw::from_focused(focused), &indices, &qt, &qr)?;
    let labels = charges(n_modes)?
        .into_iter()
        .map(|c| ModeLabel::Charge(c.value()))
        .collect();
    ModeSpectrum::new(e, labels, SpectrumScale::Energy)
}

//! Received radial fields in the Fresnel zone, a closed-form Airy reference
//! and an exact-Green propagation path for validation.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use super::{RadialLaw, TopologicalCharge, TxProfile};
use crate::error::{Error, Result};
use crate::export::fmt_f64;
use crate::geometry::{point_distance, Scenario};
use crate::numerics::{bessel_j, bessel_j_orders, signed_from_table, Quadrature};

/// Samples on the default receive radial grid.
pub const DEFAULT_RADIAL_SAMPLES: usize = 1024;

/// `samples` uniform radii from 0 to `radius` inclusive.
pub fn default_radial_grid(radius: f64, samples: usize) -> Vec<f64> {
    if samples < 2 {
        return vec![radius];
    }
    let step = radius / (samples - 1) as f64;
    (0..samples)
        .map(|i| if i + 1 == samples { radius } else { i as f64 * step })
        .collect()
}

/// Radial part `ψ^ρ` of one received OAM mode; the full field is
/// `ψ^ρ(ρ) · exp(jℓφ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    radii: Vec<f64>,
    samples: Vec<Complex64>,
    index: usize,
    charge: TopologicalCharge,
    focused: bool,
}

impl RadialField {
    pub fn new(
        radii: Vec<f64>,
        samples: Vec<Complex64>,
        index: usize,
        charge: TopologicalCharge,
        focused: bool,
    ) -> Result<Self> {
        let mut samples = samples;
        for v in &mut samples {
            v.re += 0.0;
            v.im += 0.0;
        }
        if radii.is_empty() || radii.len() != samples.len() {
            return Err(Error::config("radial field needs one sample per radius"));
        }
        if samples.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::domain("radial field contains non-finite samples"));
        }
        Ok(Self {
            radii,
            samples,
            index,
            charge,
            focused,
        })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }
    pub fn index(&self) -> usize {
        self.index
    }
    pub fn charge(&self) -> TopologicalCharge {
        self.charge
    }
    pub fn is_focused(&self) -> bool {
        self.focused
    }
    pub fn len(&self) -> usize {
        self.radii.len()
    }
    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Position and value of the largest `|ψ^ρ|`.
    pub fn peak(&self) -> (usize, f64) {
        self.samples
            .iter()
            .map(|v| v.norm())
            .enumerate()
            .fold((0, 0.0), |best, (i, a)| if a > best.1 { (i, a) } else { best })
    }

    /// Full field at `(ρ_i, φ)`.
    pub fn full(&self, i: usize, phi: f64) -> Complex64 {
        self.samples[i] * Complex64::from_polar(1.0, self.charge.value() as f64 * phi)
    }

    /// CSV with columns `radius,re,im,abs,phase`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "radius,re,im,abs,phase")?;
        for (r, v) in self.radii.iter().zip(&self.samples) {
            writeln!(
                w,
                "{},{},{},{},{}",
                fmt_f64(*r),
                fmt_f64(v.re),
                fmt_f64(v.im),
                fmt_f64(v.norm()),
                fmt_f64(v.arg())
            )?;
        }
        Ok(())
    }
}

fn validate_radii(radii: &[f64], limit: f64) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::config("radial grid is empty"));
    }
    if radii[0] < 0.0 || radii[radii.len() - 1] > limit * (1.0 + 1e-12) {
        return Err(Error::config(format!("radial grid must lie within [0, {limit}]")));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config("radial grid must be strictly increasing"));
    }
    Ok(())
}

/// Gauss-Legendre rule over `[0, length]` whose panels resolve both the
/// wavelength and the oscillation of the Fresnel kernel between the disks.
pub fn field_quadrature(length: f64, scenario: &Scenario) -> Quadrature {
    let span = scenario.tx_radius() + scenario.rx_radius();
    let kernel = scenario.wavelength() * scenario.distance() / (2.0 * span);
    let width = (0.5 * scenario.wavelength()).min(kernel);
    Quadrature::radial(length, 2.0 * width)
}

/// `ψ^ρ` of every mode in `indices` at `radii`, sharing one Bessel table per
/// `(ρ_R, ρ_T)` pair across modes.
///
/// `ψ^ρ(ρ_R) = j^ℓ / (2 z R_T √π) · exp(-jκρ_R²/2z) · exp(-jκz)
///           · ∫_0^{R_T} ρ_T exp(-jκρ_T²/2z) exp(jθ(ρ_T)) J_ℓ(κρ_Rρ_T/z) dρ_T`
pub fn rx_fields_radial(
    scenario: &Scenario,
    law: &RadialLaw,
    indices: &[usize],
    radii: &[f64],
    q: &Quadrature,
) -> Result<Vec<RadialField>> {
    validate_radii(radii, scenario.rx_radius())?;
    let profiles: Vec<TxProfile> = indices
        .iter()
        .map(|&n| TxProfile::new(n, scenario, law.clone()))
        .collect::<Result<_>>()?;
    let charges: Vec<i32> = profiles.iter().map(|p| p.charge().value()).collect();
    let top = charges.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0) as usize;

    let k = scenario.wavenumber();
    let z = scenario.distance();
    let rt = scenario.tx_radius();
    let aperture = |rho: f64| {
        Complex64::from_polar(rho, -k * rho * rho / (2.0 * z) + law.phase(rho, scenario))
    };

    let integrals: Vec<Vec<Complex64>> = match q.nodes(0.0, rt) {
        Some(nodes) => {
            let weighted: Vec<(f64, Complex64)> =
                nodes.iter().map(|&(r, w)| (r, aperture(r) * w)).collect();
            radii
                .par_iter()
                .map(|&rho_r| {
                    let mut table = vec![0.0; top + 1];
                    let mut acc = vec![Complex64::new(0.0, 0.0); charges.len()];
                    for &(rho_t, c) in &weighted {
                        bessel_j_orders(k * rho_r * rho_t / z, &mut table);
                        for (a, &l) in acc.iter_mut().zip(&charges) {
                            *a += c * signed_from_table(&table, l);
                        }
                    }
                    Ok(acc)
                })
                .collect::<Result<_>>()?
        }
        None => radii
            .par_iter()
            .map(|&rho_r| {
                charges
                    .iter()
                    .map(|&l| {
                        q.integrate(
                            |rho_t| {
                                let j = bessel_j(l, k * rho_r * rho_t / z).unwrap_or(f64::NAN);
                                aperture(rho_t) * j
                            },
                            0.0,
                            rt,
                        )
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?,
    };

    let scale = 1.0 / (2.0 * z * rt * PI.sqrt());
    profiles
        .iter()
        .enumerate()
        .map(|(m, p)| {
            let lead = p.charge().j_power() * scale;
            let samples = radii
                .iter()
                .zip(&integrals)
                .map(|(&rho, acc)| {
                    lead * Complex64::from_polar(1.0, -k * rho * rho / (2.0 * z) - k * z) * acc[m]
                })
                .collect();
            RadialField::new(
                radii.to_vec(),
                samples,
                p.index(),
                p.charge(),
                law.is_focused(),
            )
        })
        .collect()
}

/// `ψ^ρ` of mode `index` at `radii` with the default transmit quadrature.
pub fn rx_field_radial(
    index: usize,
    scenario: &Scenario,
    focused: bool,
    radii: &[f64],
) -> Result<RadialField> {
    let q = field_quadrature(scenario.tx_radius(), scenario);
    let mut v = rx_fields_radial(scenario, &RadialLaw::from_focused(focused), &[index], radii, &q)?;
    Ok(v.remove(0))
}

/// Closed-form focused `ℓ = 0` field: the Airy pattern of the transmit disk,
/// `R_T J_1(u) / (2 z √π u) · exp(-jκρ²/2z) · exp(-jκz)` with `u = κρR_T/z`.
pub fn airy_field(scenario: &Scenario, rho: f64) -> Complex64 {
    let k = scenario.wavenumber();
    let z = scenario.distance();
    let rt = scenario.tx_radius();
    let u = k * rho * rt / z;
    let jinc = if u.abs() < 1e-6 {
        0.5 - u * u / 16.0
    } else {
        bessel_j(1, u).unwrap_or(f64::NAN) / u
    };
    Complex64::from_polar(rt * jinc / (2.0 * z * PI.sqrt()), -k * rho * rho / (2.0 * z) - k * z)
}

/// Full received field at `(ρ_R, φ_R)` by direct integration of the exact
/// spherical Green function over the transmit disk: `q` in radius,
/// `angular_samples` uniform points in azimuth.
pub fn rx_field_exact(
    index: usize,
    scenario: &Scenario,
    law: &RadialLaw,
    rho_r: f64,
    phi_r: f64,
    q: &Quadrature,
    angular_samples: usize,
) -> Result<Complex64> {
    if angular_samples == 0 {
        return Err(Error::config("angular sample count must be > 0"));
    }
    let nodes = q
        .nodes(0.0, scenario.tx_radius())
        .ok_or_else(|| Error::config("exact propagation needs a fixed-node quadrature rule"))?;
    let p = TxProfile::new(index, scenario, law.clone())?;
    let k = scenario.wavenumber();
    let z = scenario.distance();
    let dphi = 2.0 * PI / angular_samples as f64;
    let total = (0..angular_samples)
        .into_par_iter()
        .map(|a| {
            let phi_t = a as f64 * dphi;
            nodes
                .iter()
                .map(|&(rho_t, w)| {
                    let d = point_distance(rho_t, phi_t, rho_r, phi_r, z);
                    let g = Complex64::from_polar(1.0 / (4.0 * PI * d), -k * d);
                    p.value(rho_t, phi_t) * g * rho_t * w
                })
                .sum::<Complex64>()
        })
        .sum::<Complex64>();
    Ok(total * dphi)
}

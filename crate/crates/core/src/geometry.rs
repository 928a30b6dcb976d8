//! Link geometry: two coaxial, parallel circular surfaces.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Default carrier wavelength, meters.
pub const DEFAULT_WAVELENGTH: f64 = 0.1;

/// Paraxial link between a transmitting disk of radius `tx_radius` and a
/// receiving disk of radius `rx_radius`, `distance` apart. Lengths in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    wavelength: f64,
    tx_radius: f64,
    rx_radius: f64,
    distance: f64,
}

impl Scenario {
    pub fn new(wavelength: f64, tx_radius: f64, rx_radius: f64, distance: f64) -> Result<Self> {
        for (name, v) in [
            ("wavelength", wavelength),
            ("tx radius", tx_radius),
            ("rx radius", rx_radius),
            ("distance", distance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        let s = Self {
            wavelength,
            tx_radius,
            rx_radius,
            distance,
        };
        if !s.is_paraxial() {
            log::warn!(
                "link distance {distance} m is below the surface radius; \
                 the mode-count formula and Fresnel kernels lose accuracy"
            );
        }
        Ok(s)
    }

    /// Scenario from wavelength-normalised sizes `T = R_T/λ`, `R = R_R/λ`,
    /// `D = z/λ`.
    pub fn normalized(t: f64, r: f64, d: f64, wavelength: f64) -> Result<Self> {
        Self::new(wavelength, t * wavelength, r * wavelength, d * wavelength)
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }
    pub fn tx_radius(&self) -> f64 {
        self.tx_radius
    }
    pub fn rx_radius(&self) -> f64 {
        self.rx_radius
    }
    pub fn distance(&self) -> f64 {
        self.distance
    }

    /// κ = 2π/λ.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }

    pub fn t(&self) -> f64 {
        self.tx_radius / self.wavelength
    }
    pub fn r(&self) -> f64 {
        self.rx_radius / self.wavelength
    }
    pub fn d(&self) -> f64 {
        self.distance / self.wavelength
    }

    /// Whether the distance exceeds both radii.
    pub fn is_paraxial(&self) -> bool {
        self.distance >= self.tx_radius.max(self.rx_radius)
    }

    /// Same surfaces at another distance.
    pub fn with_distance(&self, distance: f64) -> Result<Self> {
        Self::new(self.wavelength, self.tx_radius, self.rx_radius, distance)
    }

    /// Same geometry with transmitter and receiver swapped.
    pub fn reversed(&self) -> Self {
        Self {
            tx_radius: self.rx_radius,
            rx_radius: self.tx_radius,
            ..*self
        }
    }
}

/// Named surface-size presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// T = R = 10.
    Equal,
    /// T = 25, R = 5.
    Downlink,
    /// T = 5, R = 25.
    Uplink,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Equal, Preset::Downlink, Preset::Uplink];

    /// Normalised `(T, R)`.
    pub fn sizes(self) -> (f64, f64) {
        match self {
            Preset::Equal => (10.0, 10.0),
            Preset::Downlink => (25.0, 5.0),
            Preset::Uplink => (5.0, 25.0),
        }
    }

    pub fn scenario(self, d: f64, wavelength: f64) -> Result<Scenario> {
        let (t, r) = self.sizes();
        Scenario::normalized(t, r, d, wavelength)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Equal => "equal",
            Preset::Downlink => "downlink",
            Preset::Uplink => "uplink",
        })
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "equal" => Ok(Preset::Equal),
            "downlink" => Ok(Preset::Downlink),
            "uplink" => Ok(Preset::Uplink),
            other => Err(Error::config(format!("unknown geometry preset '{other}'"))),
        }
    }
}

/// Exact distance between `(ρ_T, φ_T, 0)` and `(ρ_R, φ_R, z)`.
pub fn point_distance(rho_t: f64, phi_t: f64, rho_r: f64, phi_r: f64, z: f64) -> f64 {
    let d2 = rho_t * rho_t + rho_r * rho_r - 2.0 * rho_t * rho_r * (phi_r - phi_t).cos() + z * z;
    d2.max(0.0).sqrt()
}

/// Second-order (Fresnel) expansion of [`point_distance`].
pub fn fresnel_distance_approx(rho_t: f64, rho_r: f64, phi_t: f64, phi_r: f64, z: f64) -> f64 {
    z + rho_t * rho_t / (2.0 * z) + rho_r * rho_r / (2.0 * z)
        - rho_t * rho_r * (phi_r - phi_t).cos() / z
}

/// Number of well-coupled modes predicted in closed form, `π²R²T²/D²`.
/// Not rounded.
pub fn analytic_dof(s: &Scenario) -> f64 {
    let x = PI * s.r() * s.t() / s.d();
    x * x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FraunhoferDistance {
    pub meters: f64,
    /// In wavelengths, `8T²`.
    pub normalized: f64,
}

/// Near/far-field boundary of the transmitting surface, `8R_T²/λ`.
pub fn fraunhofer_distance(s: &Scenario) -> FraunhoferDistance {
    let meters = 8.0 * s.tx_radius * s.tx_radius / s.wavelength;
    FraunhoferDistance {
        meters,
        normalized: meters / s.wavelength,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn point_distance_examples() {
        assert_eq!(point_distance(0.0, 0.0, 0.0, 0.0, 5.0), 5.0);
        assert!((point_distance(1.0, 0.0, 1.0, 0.0, 1e-4) - 1e-4).abs() < 1e-15);
        // Cartesian: (3,0,0) to (-4,0,12)
        let cart = ((3.0f64 + 4.0).powi(2) + 144.0).sqrt();
        let got = point_distance(3.0, 0.0, 4.0, PI, 12.0);
        assert!((got - cart).abs() < 1e-12);
        assert!((got - 193f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn fresnel_examples() {
        assert_eq!(fresnel_distance_approx(0.0, 0.0, 0.0, 0.0, 7.0), 7.0);
        assert!((fresnel_distance_approx(1.0, 0.0, 0.0, 0.0, 100.0) - 100.005).abs() < 1e-12);
        let exact = point_distance(1.0, 0.0, 1.0, 0.0, 50.0);
        let approx = fresnel_distance_approx(1.0, 1.0, 0.0, 0.0, 50.0);
        assert!((approx - exact).abs() < 1e-5 * 50.0);
    }

    #[test]
    fn analytic_dof_examples() {
        let l = DEFAULT_WAVELENGTH;
        let s = Scenario::normalized(10.0, 10.0, 50.0, l).unwrap();
        assert!((analytic_dof(&s) - 4.0 * PI * PI).abs() < 1e-9);
        let s = Scenario::normalized(25.0, 5.0, 50.0, l).unwrap();
        assert!((analytic_dof(&s) - PI * PI * 625.0 * 25.0 / 2500.0).abs() < 1e-9);
        assert!((analytic_dof(&s) - 61.685).abs() < 1e-3);
        let s = Scenario::normalized(1.0, 1.0, PI, l).unwrap();
        assert!((analytic_dof(&s) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fraunhofer_examples() {
        for (t, want) in [(10.0, 800.0), (1.0, 8.0), (25.0, 5000.0)] {
            let s = Scenario::normalized(t, 5.0, 50.0, DEFAULT_WAVELENGTH).unwrap();
            let ff = fraunhofer_distance(&s);
            assert!((ff.normalized - want).abs() < 1e-9);
            assert!((ff.meters - want * DEFAULT_WAVELENGTH).abs() < 1e-9);
        }
    }

    #[test]
    fn scenario_validation_and_wavenumber() {
        assert!(Scenario::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(Scenario::new(0.1, -1.0, 1.0, 1.0).is_err());
        assert!(Scenario::new(0.1, 1.0, 1.0, f64::NAN).is_err());
        let s = Scenario::new(0.37, 1.0, 2.0, 3.0).unwrap();
        assert!((s.wavenumber() * s.wavelength() - 2.0 * PI).abs() < 1e-12);
        assert!(s.is_paraxial());
        let close = Scenario::new(0.1, 1.0, 2.0, 1.5).unwrap();
        assert!(!close.is_paraxial());
    }

    #[test]
    fn presets_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.to_string().parse::<Preset>().unwrap(), p);
        }
        assert_eq!(Preset::Downlink.sizes(), (25.0, 5.0));
        assert!("sideways".parse::<Preset>().is_err());
    }

    proptest! {
        #[test]
        fn distance_bounds_and_symmetry(
            rt in 0.0..10.0f64, pt in 0.0..6.3f64, rr in 0.0..10.0f64, pr in 0.0..6.3f64, z in 0.1..100.0f64
        ) {
            let d = point_distance(rt, pt, rr, pr, z);
            prop_assert!(d >= z * (1.0 - 1e-15));
            prop_assert!((d - point_distance(rr, pr, rt, pt, z)).abs() < 1e-12 * d);
        }

        #[test]
        fn dof_symmetry_and_scaling(t in 0.5..30.0f64, r in 0.5..30.0f64, d in 1.0..500.0f64) {
            let a = Scenario::normalized(t, r, d, 0.1).unwrap();
            let b = Scenario::normalized(r, t, d, 0.1).unwrap();
            let far = Scenario::normalized(t, r, 2.0 * d, 0.1).unwrap();
            prop_assert!((analytic_dof(&a) - analytic_dof(&b)).abs() <= 1e-12 * analytic_dof(&a));
            prop_assert!((analytic_dof(&a) - 4.0 * analytic_dof(&far)).abs() <= 1e-12 * analytic_dof(&a));
        }
    }
}

//! Special functions, quadrature and dense linear algebra shared by the
//! physics modules.

mod bessel;
mod quadrature;
mod svd;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use bessel::{bessel_j, bessel_j_orders, MAX_ORDER};
pub(crate) use bessel::signed_from_table;
pub use quadrature::{gauss_legendre_nodes, integrate_radial, Quadrature, Rule, DEFAULT_TOLERANCE};
pub use svd::{svd_spectrum, ComplexMatrix};

/// A complex field value with finite components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSample(Complex64);

impl ComplexSample {
    pub fn new(value: Complex64) -> Result<Self> {
        if value.re.is_finite() && value.im.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::domain(format!("field sample {value} is not finite")))
        }
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl From<ComplexSample> for Complex64 {
    fn from(s: ComplexSample) -> Self {
        s.0
    }
}

//! Degrees of freedom and OAM multiplexing between two coaxial circular
//! apertures: singular-value mode counting, OAM radial fields, path gain and
//! detector error rates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod detect;
pub mod error;
pub mod export;
pub mod geometry;
pub mod modes;
pub mod numerics;
pub mod oam;

pub use error::{Error, Result};
pub use geometry::{Preset, Scenario};
pub use modes::{ModeLabel, ModeSpectrum, SpectrumScale, SurfaceGrid};
pub use numerics::{ComplexMatrix, ComplexSample, Quadrature};
pub use oam::{RadialField, RadialLaw, TopologicalCharge, TxProfile};
pub use detect::{BerCurve, DetectorConfig, Link, Modulation, NoiseModel, RadialGrid, RadialWindow, Strategy};

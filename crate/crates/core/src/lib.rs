//! Lateral and normal Casimir forces between a sinusoidally corrugated plate
//! and a corrugated sphere, including finite-conductivity corrections, and
//! the analysis chain used to turn lateral-force scans into amplitudes,
//! separations, power-law slopes and confidence intervals.
//!
//! All quantities are SI: meters, newtons, joules, volts.

pub mod electrostatics;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod io;
pub mod lateral;
pub mod lsq;
pub mod pipeline;
pub mod quadrature;
pub mod verify;

pub use electrostatics::{
    calibrate_from_sweep, electrostatic_force, synthetic_sweep, CalibrationResult,
    CalibrationSample,
};
pub use energy::{
    conductivity_coefficients, ideal_plate_energy, ideal_plate_pressure, plate_energy,
    Material, PhysicalConstants, PlateEnergy, CONSTANTS,
};
pub use error::{Error, ErrorKind, Result};
pub use geometry::{CorrugationPair, Corrugations, EffectiveCorrugation};
pub use lateral::{
    corrugated_energy, lateral_amplitude, lateral_coefficients, lateral_force_closed,
    lateral_force_numeric, normal_force_pft, sphere_plate_energy, LateralAmplitude,
    LateralForceResult, SphereGeometry, ValidityFlags,
};
pub use pipeline::{
    confidence_interval, fit_power_law, fit_sine, invert_separation, per_scan_amplitudes,
    simulate_scan,
    ConfidenceInterval, PowerLawFit, ScanConfig, ScanSet, SineFit,
};

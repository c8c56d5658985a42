use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::fit::fit_sine;
use crate::energy::Material;
use crate::error::{Error, Result};
use crate::geometry::Corrugations;
use crate::lateral::{lateral_force_closed, SphereGeometry, ValidityFlags};

/// Lateral-scan protocol: the plate moves in fixed steps, the lateral force is
/// recorded at each step, and the scan is repeated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    /// Lateral step, m.
    pub step: f64,
    pub n_steps: usize,
    pub n_scans: usize,
    /// Gaussian noise per sample, N.
    pub noise_sigma: f64,
    /// Change of separation per unit lateral displacement.
    pub tilt_slope: f64,
    /// Hold the separation constant against the tilt.
    pub z_correction_enabled: bool,
    pub rng_seed: u64,
}

impl ScanConfig {
    pub const DEFAULT_STEP: f64 = 0.46e-9;
    pub const DEFAULT_N_SCANS: usize = 60;
    /// Gives a standard error of the mean amplitude near 1.5e-14 N with the
    /// default step count and 60 scans.
    pub const DEFAULT_NOISE_SIGMA: f64 = 6e-12;

    /// Steps needed to cover two corrugation periods.
    pub fn steps_for_two_periods(period: f64, step: f64) -> usize {
        (2.0 * period / step).ceil() as usize
    }

    pub fn for_period(period: f64) -> Self {
        Self {
            step: Self::DEFAULT_STEP,
            n_steps: Self::steps_for_two_periods(period, Self::DEFAULT_STEP),
            n_scans: Self::DEFAULT_N_SCANS,
            noise_sigma: Self::DEFAULT_NOISE_SIGMA,
            tilt_slope: 0.0,
            z_correction_enabled: true,
            rng_seed: 0,
        }
    }

    /// Every violated constraint, not just the first.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.step > 0.0 && self.step.is_finite()) {
            out.push(format!("scan step must be positive, got {:e}", self.step));
        }
        if self.n_scans < 1 {
            out.push("scan count must be at least 1".to_string());
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            out.push(format!("noise sigma must be non-negative, got {:e}", self.noise_sigma));
        }
        if !self.tilt_slope.is_finite() {
            out.push("tilt slope must be finite".to_string());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self::for_period(1.2e-6)
    }
}

/// Lateral force versus displacement, one row per repeated scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSet {
    displacements: Vec<f64>,
    forces: Vec<Vec<f64>>,
    mean_force: Vec<f64>,
    flags: ValidityFlags,
}

impl ScanSet {
    pub fn new(displacements: Vec<f64>, forces: Vec<Vec<f64>>) -> Result<Self> {
        if let Some((i, row)) = forces
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != displacements.len())
        {
            return Err(Error::Domain(format!(
                "scan {i} has {} samples, expected {}",
                row.len(),
                displacements.len()
            )));
        }
        let n = forces.len().max(1) as f64;
        let mean_force = (0..displacements.len())
            .map(|j| forces.iter().map(|r| r[j]).sum::<f64>() / n)
            .collect();
        Ok(Self {
            displacements,
            forces,
            mean_force,
            flags: ValidityFlags::default(),
        })
    }

    pub fn displacements(&self) -> &[f64] {
        &self.displacements
    }

    /// Row-major: `forces()[scan][step]`.
    pub fn forces(&self) -> &[Vec<f64>] {
        &self.forces
    }

    pub fn mean_force(&self) -> &[f64] {
        &self.mean_force
    }

    pub fn n_scans(&self) -> usize {
        self.forces.len()
    }

    pub fn n_steps(&self) -> usize {
        self.displacements.len()
    }

    /// Union of the validity flags met along the scan.
    pub fn flags(&self) -> ValidityFlags {
        self.flags
    }
}

/// Generates repeated lateral scans at mean separation `z` from the closed-form
/// force plus Gaussian noise. Deterministic for a given seed.
pub fn simulate_scan(
    config: &ScanConfig,
    corrugations: &Corrugations,
    z: f64,
    sphere: &SphereGeometry,
    material: &Material,
) -> Result<ScanSet> {
    config.validate()?;
    let displacements: Vec<f64> = (0..config.n_steps).map(|i| i as f64 * config.step).collect();

    let mut flags = ValidityFlags::default();
    let mut curve = Vec::with_capacity(config.n_steps);
    for (i, &x) in displacements.iter().enumerate() {
        let local_z = if config.z_correction_enabled {
            z
        } else {
            z + config.tilt_slope * x
        };
        let phase = corrugations.phase_for_displacement(x);
        let pair = corrugations.at(phase, local_z).map_err(|e| match e {
            Error::Geometry(_) => Error::TiltContact {
                step: i,
                separation: local_z,
            },
            Error::Domain(_) if local_z <= 0.0 => Error::TiltContact {
                step: i,
                separation: local_z,
            },
            other => other,
        })?;
        let r = lateral_force_closed(&pair, sphere, material)?;
        flags = flags.merge(r.flags);
        curve.push(r.force);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let noise = Normal::new(0.0, config.noise_sigma)
        .map_err(|e| Error::Domain(format!("noise distribution: {e}")))?;
    let forces: Vec<Vec<f64>> = (0..config.n_scans)
        .map(|_| {
            if config.noise_sigma == 0.0 {
                curve.clone()
            } else {
                curve.iter().map(|f| f + noise.sample(&mut rng)).collect()
            }
        })
        .collect();

    let mut set = ScanSet::new(displacements, forces)?;
    set.flags = flags;
    Ok(set)
}

/// Sine-fit amplitude of every scan row.
pub fn per_scan_amplitudes(scans: &ScanSet, period: f64) -> Result<Vec<f64>> {
    scans
        .forces()
        .iter()
        .map(|row| Ok(fit_sine(scans.displacements(), row, period)?.amplitude))
        .collect()
}

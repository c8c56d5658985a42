//! Electrostatic sphere–plate force and the voltage-sweep calibration of the
//! cantilever spring constant and the residual potential.

use std::f64::consts::PI;

use crate::energy::CONSTANTS;
use crate::error::{Error, Result};
use crate::geometry::CorrugationPair;
use crate::lateral::SphereGeometry;
use crate::lsq::least_squares;

/// Normal electrostatic force between the corrugated sphere and plate, N.
///
/// `z` is the distance between the zero corrugation levels, the same mean
/// separation the Casimir formulas use. Pass smooth corrugations for the
/// plain sphere–plate case.
pub fn electrostatic_force(
    pair: &CorrugationPair,
    applied_voltage: f64,
    residual_potential: f64,
    sphere: &SphereGeometry,
) -> f64 {
    let dv = applied_voltage - residual_potential;
    let beta = pair.effective().beta;
    -PI * sphere.radius() * CONSTANTS.epsilon0 * dv * dv / pair.separation()
        / (1.0 - beta * beta).sqrt()
}

/// `πRε₀ / (z √(1 − β²))`: the force per squared volt, magnitude only.
fn force_per_volt_squared(pair: &CorrugationPair, sphere: &SphereGeometry) -> f64 {
    -electrostatic_force(pair, 1.0, 0.0, sphere)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationSample {
    pub voltage: f64,
    /// Cantilever deflection in meters; `force / k`, sign carried by the force.
    pub deflection: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationResult {
    /// N/m.
    pub spring_constant: f64,
    /// V.
    pub residual_potential: f64,
    /// RMS of the parabola residuals, in deflection units.
    pub fit_residual: f64,
}

/// Voltages used by the synthetic sweep unless told otherwise: ±0.5 V in 11 steps.
pub fn default_sweep_voltages() -> Vec<f64> {
    (0..11).map(|i| -0.5 + 0.1 * i as f64).collect()
}

/// Noiseless sweep for a cantilever with the given spring constant.
pub fn synthetic_sweep(
    spring_constant: f64,
    residual_potential: f64,
    voltages: &[f64],
    pair: &CorrugationPair,
    sphere: &SphereGeometry,
) -> Vec<CalibrationSample> {
    voltages
        .iter()
        .map(|&v| CalibrationSample {
            voltage: v,
            deflection: electrostatic_force(pair, v, residual_potential, sphere) / spring_constant,
        })
        .collect()
}

/// Fits `deflection = a V² + b V + c` and reads off the spring constant from
/// the curvature and the residual potential from the vertex.
pub fn calibrate_from_sweep(
    samples: &[CalibrationSample],
    pair: &CorrugationPair,
    sphere: &SphereGeometry,
) -> Result<CalibrationResult> {
    let mut distinct: Vec<f64> = samples.iter().map(|s| s.voltage).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::Underdetermined(format!(
            "calibration needs at least 3 distinct voltages, got {}",
            distinct.len()
        )));
    }
    if samples
        .iter()
        .any(|s| !s.voltage.is_finite() || !s.deflection.is_finite())
    {
        return Err(Error::Domain("calibration samples must be finite".into()));
    }

    let design: Vec<[f64; 3]> = samples
        .iter()
        .map(|s| [s.voltage * s.voltage, s.voltage, 1.0])
        .collect();
    let targets: Vec<f64> = samples.iter().map(|s| s.deflection).collect();
    let [a, b, c] = least_squares(&design, &targets)?;
    // attraction makes the parabola open downward
    if a >= 0.0 {
        return Err(Error::InconsistentData(format!(
            "deflection parabola curvature {a:e} is not negative; the data are not an attractive electrostatic response"
        )));
    }
    let sse: f64 = samples
        .iter()
        .map(|s| {
            let model = (a * s.voltage + b) * s.voltage + c;
            (s.deflection - model).powi(2)
        })
        .sum();
    Ok(CalibrationResult {
        spring_constant: force_per_volt_squared(pair, sphere) / -a,
        residual_potential: -b / (2.0 * a),
        fit_residual: (sse / samples.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Corrugations;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    const NM: f64 = 1e-9;

    fn sphere() -> SphereGeometry {
        SphereGeometry::new(100e-6).unwrap()
    }

    fn smooth(z: f64) -> CorrugationPair {
        Corrugations::smooth(1.2e-6).unwrap().at(0.0, z).unwrap()
    }

    fn corrugated(phi: f64, z: f64) -> CorrugationPair {
        Corrugations::new(1.2e-6, 59.0 * NM, 8.0 * NM)
            .unwrap()
            .at(phi, z)
            .unwrap()
    }

    #[test]
    fn force_values() {
        assert_eq!(electrostatic_force(&smooth(1e-6), -0.135, -0.135, &sphere()), 0.0);
        // π · 1e-4 · ε₀ / 1e-6
        let f = electrostatic_force(&smooth(1e-6), 1.0, 0.0, &sphere());
        assert!((f - -2.781_625_1e-9).abs() < 1e-15, "{f:e}");
        let flat = electrostatic_force(&smooth(221.0 * NM), 0.3, 0.0, &sphere());
        let corr = electrostatic_force(&corrugated(PI, 221.0 * NM), 0.3, 0.0, &sphere());
        let beta: f64 = 67.0 / 221.0;
        assert!(((corr / flat) - 1.0 / (1.0 - beta * beta).sqrt()).abs() < 1e-14);
        assert!(((corr / flat) - 1.049).abs() < 1e-3);
    }

    #[test]
    fn force_scaling() {
        let p = corrugated(1.0, 300.0 * NM);
        let base = electrostatic_force(&p, 0.2, -0.1, &sphere());
        let tripled = electrostatic_force(&p, 0.8, -0.1, &sphere());
        assert!((tripled / base - 9.0).abs() < 1e-13);
        let big = SphereGeometry::new(250e-6).unwrap();
        assert!((electrostatic_force(&p, 0.2, -0.1, &big) / base - 2.5).abs() < 1e-13);
    }

    #[test]
    fn inverse_first_power_in_separation() {
        let zs = [200.0, 400.0, 800.0, 1600.0].map(|z| z * NM);
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for z in zs {
            let x = z.ln();
            let y = electrostatic_force(&smooth(z), 0.5, 0.0, &sphere()).abs().ln();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        let n = zs.len() as f64;
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!((slope + 1.0).abs() < 1e-6);
    }

    #[test]
    fn torsional_round_trip() {
        let pair = corrugated(PI / 2.0, 221.0 * NM);
        let sweep = synthetic_sweep(0.138, -0.135, &default_sweep_voltages(), &pair, &sphere());
        let r = calibrate_from_sweep(&sweep, &pair, &sphere()).unwrap();
        assert!(((r.spring_constant - 0.138) / 0.138).abs() < 5e-7);
        assert!(((r.residual_potential + 0.135) / 0.135).abs() < 5e-7);
        assert!(r.fit_residual < 1e-20);
    }

    #[test]
    fn bending_round_trip() {
        let pair = smooth(1e-6);
        let sweep = synthetic_sweep(0.0052, 0.0, &default_sweep_voltages(), &pair, &sphere());
        let r = calibrate_from_sweep(&sweep, &pair, &sphere()).unwrap();
        assert!(((r.spring_constant - 0.0052) / 0.0052).abs() < 1e-10);
        assert!(r.residual_potential.abs() < 1e-10);
    }

    #[test]
    fn identical_voltages_rejected() {
        let pair = smooth(1e-6);
        let sweep = synthetic_sweep(0.1, 0.0, &[0.3; 6], &pair, &sphere());
        assert!(matches!(
            calibrate_from_sweep(&sweep, &pair, &sphere()),
            Err(Error::Underdetermined(_))
        ));
        let two = synthetic_sweep(0.1, 0.0, &[0.1, 0.2], &pair, &sphere());
        assert!(matches!(
            calibrate_from_sweep(&two, &pair, &sphere()),
            Err(Error::Underdetermined(_))
        ));
    }

    #[test]
    fn repulsive_data_rejected() {
        let pair = smooth(1e-6);
        let sweep: Vec<_> = synthetic_sweep(0.1, 0.0, &default_sweep_voltages(), &pair, &sphere())
            .into_iter()
            .map(|s| CalibrationSample {
                deflection: -s.deflection,
                ..s
            })
            .collect();
        assert!(matches!(
            calibrate_from_sweep(&sweep, &pair, &sphere()),
            Err(Error::InconsistentData(_))
        ));
    }

    #[test]
    fn noisy_recovery_converges_as_inverse_sqrt_n() {
        let pair = smooth(1e-6);
        let spread = |repeat: usize, seed: u64| -> f64 {
            let voltages: Vec<f64> = (0..11 * repeat).map(|i| -0.5 + 0.1 * (i % 11) as f64).collect();
            let clean = synthetic_sweep(0.0052, 0.05, &voltages, &pair, &sphere());
            let noise = Normal::new(0.0, 2e-9).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let ks: Vec<f64> = (0..400)
                .map(|_| {
                    let noisy: Vec<_> = clean
                        .iter()
                        .map(|s| CalibrationSample {
                            deflection: s.deflection + noise.sample(&mut rng),
                            ..*s
                        })
                        .collect();
                    calibrate_from_sweep(&noisy, &pair, &sphere()).unwrap().spring_constant
                })
                .collect();
            let mean = ks.iter().sum::<f64>() / ks.len() as f64;
            (ks.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / (ks.len() - 1) as f64).sqrt()
        };
        let ratio = spread(1, 7) / spread(16, 8);
        assert!((ratio / 4.0 - 1.0).abs() < 0.25, "ratio {ratio}");
    }

    proptest! {
        #[test]
        fn noiseless_round_trip(k in 1e-3f64..1.0, v0 in -1.0f64..1.0, phi in 0.0f64..6.28) {
            let pair = corrugated(phi, 250.0 * NM);
            let sweep = synthetic_sweep(k, v0, &default_sweep_voltages(), &pair, &sphere());
            let r = calibrate_from_sweep(&sweep, &pair, &sphere()).unwrap();
            prop_assert!(((r.spring_constant - k) / k).abs() < 1e-9);
            prop_assert!((r.residual_potential - v0).abs() < 1e-9 * v0.abs().max(1e-2));
        }
    }
}

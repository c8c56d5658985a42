//! Parallel-plate Casimir energy and pressure, for an ideal metal and with
//! plasma-wavelength corrections up to fourth order in `λ_p / (2π z)`.

use std::f64::consts::PI;

use crate::error::{ensure_positive, Error, Result};

/// The two constants every formula in the crate needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// ħc in J·m.
    pub hbar_c: f64,
    /// Vacuum permittivity in F/m.
    pub epsilon0: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar_c: 3.161_526_77e-26,
    epsilon0: 8.854_187_812_8e-12,
};

/// Boundary metal, characterized by its plasma wavelength.
///
/// `plasma_wavelength == 0` is the ideal (perfectly conducting) metal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    plasma_wavelength: f64,
}

impl Material {
    /// Plasma wavelength used for gold unless configured otherwise.
    pub const DEFAULT_GOLD_PLASMA_WAVELENGTH: f64 = 136e-9;

    pub fn new(plasma_wavelength: f64) -> Result<Self> {
        if plasma_wavelength >= 0.0 && plasma_wavelength.is_finite() {
            Ok(Self { plasma_wavelength })
        } else {
            Err(Error::Domain(format!(
                "plasma wavelength must be non-negative and finite, got {plasma_wavelength:e}"
            )))
        }
    }

    pub const fn ideal() -> Self {
        Self {
            plasma_wavelength: 0.0,
        }
    }

    pub const fn gold() -> Self {
        Self {
            plasma_wavelength: Self::DEFAULT_GOLD_PLASMA_WAVELENGTH,
        }
    }

    pub fn plasma_wavelength(&self) -> f64 {
        self.plasma_wavelength
    }

    pub fn is_ideal(&self) -> bool {
        self.plasma_wavelength == 0.0
    }

    /// Expansion parameter `λ_p / (2π z)`.
    pub fn expansion_ratio(&self, z: f64) -> f64 {
        self.plasma_wavelength / (2.0 * PI * z)
    }

    /// The correction series is only accurate to 1–2% for `z ≥ λ_p`.
    pub fn is_below_plasma_wavelength(&self, z: f64) -> bool {
        z < self.plasma_wavelength
    }
}

impl Default for Material {
    fn default() -> Self {
        Self::gold()
    }
}

/// Energy per unit area of two ideal-metal plates at separation `z`, in J/m².
pub fn ideal_plate_energy(z: f64) -> Result<f64> {
    ensure_positive("separation", z)?;
    Ok(ideal_energy_unchecked(z))
}

/// Normal pressure between two ideal-metal plates, `−∂U/∂z`, in Pa.
pub fn ideal_plate_pressure(z: f64) -> Result<f64> {
    ensure_positive("separation", z)?;
    Ok(-PI * PI * CONSTANTS.hbar_c / (240.0 * z.powi(4)))
}

pub(crate) fn ideal_energy_unchecked(z: f64) -> f64 {
    -PI * PI * CONSTANTS.hbar_c / (720.0 * z.powi(3))
}

/// Finite-conductivity coefficients `(c₁, c₂, c₃, c₄)`.
pub fn conductivity_coefficients() -> [f64; 4] {
    let pi2 = PI * PI;
    [
        -4.0,
        72.0 / 5.0,
        -(320.0 / 7.0) * (1.0 - pi2 / 210.0),
        (400.0 / 3.0) * (1.0 - 163.0 * pi2 / 7350.0),
    ]
}

/// `1 + Σ cₙ rⁿ`, evaluated by Horner's rule.
pub(crate) fn correction_bracket(coefficients: &[f64; 4], ratio: f64) -> f64 {
    let tail = coefficients
        .iter()
        .rev()
        .fold(0.0, |acc, &c| (acc + c) * ratio);
    1.0 + tail
}

/// Plate energy with its validity indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateEnergy {
    /// J/m².
    pub energy: f64,
    /// `1 + Σ cₙ (λ_p/2πz)ⁿ`.
    pub bracket_factor: f64,
    /// `z < λ_p`: the value is outside the stated 1–2% accuracy.
    pub below_plasma_wavelength: bool,
}

/// Parallel-plate energy per unit area including conductivity corrections.
///
/// Separations below the plasma wavelength are evaluated but flagged.
pub fn plate_energy(z: f64, material: &Material) -> Result<PlateEnergy> {
    let ideal = ideal_plate_energy(z)?;
    let bracket_factor = if material.is_ideal() {
        1.0
    } else {
        correction_bracket(&conductivity_coefficients(), material.expansion_ratio(z))
    };
    Ok(PlateEnergy {
        energy: ideal * bracket_factor,
        bracket_factor,
        below_plasma_wavelength: material.is_below_plasma_wavelength(z),
    })
}

/// Raw `E_pp(s)` for use inside quadrature loops.
pub(crate) fn plate_energy_unchecked(s: f64, coefficients: &[f64; 4], lambda_p: f64) -> f64 {
    let bracket = if lambda_p == 0.0 {
        1.0
    } else {
        correction_bracket(coefficients, lambda_p / (2.0 * PI * s))
    };
    ideal_energy_unchecked(s) * bracket
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn ideal_energy_at_one_micron() {
        // -π²·ħc/720 at z = 1e-6, evaluated by hand: -4.33375257e-10
        let e = ideal_plate_energy(1e-6).unwrap();
        assert!(rel(e, -4.333_752_57e-10) < 1e-8, "{e:e}");
        assert!(e < 0.0);
    }

    #[test]
    fn ideal_energy_cubic_scaling() {
        let e1 = ideal_plate_energy(1e-6).unwrap();
        assert!(rel(ideal_plate_energy(2e-6).unwrap(), e1 / 8.0) < 1e-14);
        assert!(rel(ideal_plate_energy(0.5e-6).unwrap(), 8.0 * e1) < 1e-14);
    }

    #[test]
    fn ideal_pressure_values() {
        let p = ideal_plate_pressure(1e-6).unwrap();
        assert!(rel(p, -1.300_125_77e-3) < 1e-8, "{p:e}");
        let z = 3.7e-7;
        let e = ideal_plate_energy(z).unwrap();
        assert!(rel(ideal_plate_pressure(z).unwrap(), 3.0 * e / z) < 1e-14);
        let pz = ideal_plate_pressure(z).unwrap();
        assert!(rel(ideal_plate_pressure(2.0 * z).unwrap(), pz / 16.0) < 1e-14);
    }

    #[test]
    fn non_positive_separation_rejected() {
        for z in [0.0, -1e-9, f64::NAN] {
            assert!(matches!(ideal_plate_energy(z), Err(Error::Domain(_))));
            assert!(matches!(ideal_plate_pressure(z), Err(Error::Domain(_))));
            assert!(matches!(plate_energy(z, &Material::gold()), Err(Error::Domain(_))));
        }
        assert!(Material::new(-1e-9).is_err());
    }

    #[test]
    fn coefficients() {
        let c = conductivity_coefficients();
        assert_eq!(c[0], -4.0);
        assert!((c[1] - 14.4).abs() < 1e-14);
        assert!((c[2] - -43.565_80).abs() < 1e-4, "{}", c[2]);
        assert!((c[3] - 104.149_7).abs() < 1e-3, "{}", c[3]);
    }

    #[test]
    fn bracket_at_plasma_wavelength() {
        let c = conductivity_coefficients();
        let t = 1.0 / (2.0 * PI);
        let expected = 1.0 + c[0] * t + c[1] * t * t + c[2] * t.powi(3) + c[3] * t.powi(4);
        let lp = 136e-9;
        let pe = plate_energy(lp, &Material::new(lp).unwrap()).unwrap();
        assert!(rel(pe.bracket_factor, expected) < 1e-14);
        assert!(!pe.below_plasma_wavelength);
    }

    #[test]
    fn bracket_at_paper_separation() {
        // brute-force term sum at r = 136/(2π·221)
        let r: f64 = 136.0 / (2.0 * PI * 221.0);
        let c = conductivity_coefficients();
        let mut sum = 1.0;
        for (n, cn) in c.iter().enumerate() {
            let mut p = 1.0;
            for _ in 0..=n {
                p *= r;
            }
            sum += cn * p;
        }
        assert!((r - 0.097_94).abs() < 1e-5);
        assert!((sum - 0.715_02).abs() < 1e-5, "{sum}");
        let pe = plate_energy(221e-9, &Material::gold()).unwrap();
        assert!(rel(pe.bracket_factor, sum) < 1e-13);
    }

    #[test]
    fn below_plasma_wavelength_is_flagged_not_rejected() {
        let pe = plate_energy(100e-9, &Material::gold()).unwrap();
        assert!(pe.below_plasma_wavelength);
        assert!(pe.energy.is_finite());
    }

    #[test]
    fn pressure_matches_finite_difference() {
        for z in [50e-9, 221e-9, 1e-6, 4.9e-6] {
            let h = z * 1e-5;
            let fd = -(ideal_plate_energy(z + h).unwrap() - ideal_plate_energy(z - h).unwrap())
                / (2.0 * h);
            assert!(rel(fd, ideal_plate_pressure(z).unwrap()) < 1e-6);
        }
    }

    #[test]
    fn energy_increasing_above_plasma_wavelength() {
        let m = Material::gold();
        let lp = m.plasma_wavelength();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=2000 {
            let z = lp * (1.0 + 9.0 * i as f64 / 2000.0);
            let e = plate_energy(z, &m).unwrap().energy;
            assert!(e < 0.0);
            assert!(e > prev);
            prev = e;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn ideal_material_reduces_exactly(z in 50e-9f64..5e-6) {
            let pe = plate_energy(z, &Material::ideal()).unwrap();
            prop_assert_eq!(pe.energy, ideal_plate_energy(z).unwrap());
            prop_assert_eq!(pe.bracket_factor, 1.0);
        }
    }

    proptest! {
        #[test]
        fn cubic_scaling_law(z in 50e-9f64..5e-6, k in 0.01f64..100.0) {
            let lhs = ideal_plate_energy(k * z).unwrap();
            let rhs = ideal_plate_energy(z).unwrap() / k.powi(3);
            prop_assert!(rel(lhs, rhs) < 1e-13);
        }
    }
}

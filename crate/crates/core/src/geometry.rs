//! Sinusoidal corrugation profiles on the plate and the sphere, and their
//! reduction to a single cosine `z + b cos(2πx/Λ − α)`.

use std::f64::consts::TAU;

use crate::error::{ensure_positive, Error, Result};

/// Corrugation period and amplitudes, without a relative phase or separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Corrugations {
    period: f64,
    amplitude_plate: f64,
    amplitude_sphere: f64,
}

impl Corrugations {
    pub fn new(period: f64, amplitude_plate: f64, amplitude_sphere: f64) -> Result<Self> {
        ensure_positive("corrugation period", period)?;
        for (name, a) in [
            ("plate amplitude", amplitude_plate),
            ("sphere amplitude", amplitude_sphere),
        ] {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(Error::Domain(format!(
                    "{name} must be non-negative and finite, got {a:e}"
                )));
            }
        }
        Ok(Self {
            period,
            amplitude_plate,
            amplitude_sphere,
        })
    }

    /// Flat surfaces with the given nominal period.
    pub fn smooth(period: f64) -> Result<Self> {
        Self::new(period, 0.0, 0.0)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn amplitude_plate(&self) -> f64 {
        self.amplitude_plate
    }

    pub fn amplitude_sphere(&self) -> f64 {
        self.amplitude_sphere
    }

    /// Smallest mean separation at which the surfaces cannot touch.
    pub fn contact_separation(&self) -> f64 {
        self.amplitude_plate + self.amplitude_sphere
    }

    /// Phase shift produced by a lateral displacement `dx`.
    pub fn phase_for_displacement(&self, dx: f64) -> f64 {
        TAU * dx / self.period
    }

    pub fn at(self, phase: f64, separation: f64) -> Result<CorrugationPair> {
        CorrugationPair::new(self, phase, separation)
    }
}

/// Two aligned corrugated surfaces at mean separation `z` with phase shift `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrugationPair {
    corrugations: Corrugations,
    phase: f64,
    separation: f64,
}

impl CorrugationPair {
    /// Fails with a geometry error unless `z > A₁ + A₂`. The phase is stored
    /// reduced to `[0, 2π)`.
    pub fn new(corrugations: Corrugations, phase: f64, separation: f64) -> Result<Self> {
        ensure_positive("mean separation", separation)?;
        if !phase.is_finite() {
            return Err(Error::Domain(format!("phase must be finite, got {phase}")));
        }
        let contact = corrugations.contact_separation();
        if separation <= contact {
            return Err(Error::Geometry(format!(
                "mean separation {separation:e} m does not exceed A1 + A2 = {contact:e} m"
            )));
        }
        Ok(Self {
            corrugations,
            phase: reduce_phase(phase),
            separation,
        })
    }

    pub fn corrugations(&self) -> &Corrugations {
        &self.corrugations
    }

    pub fn period(&self) -> f64 {
        self.corrugations.period
    }

    pub fn amplitude_plate(&self) -> f64 {
        self.corrugations.amplitude_plate
    }

    pub fn amplitude_sphere(&self) -> f64 {
        self.corrugations.amplitude_sphere
    }

    /// Phase in `[0, 2π)`.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn with_phase(&self, phase: f64) -> Result<Self> {
        Self::new(self.corrugations, phase, self.separation)
    }

    pub fn with_separation(&self, separation: f64) -> Result<Self> {
        Self::new(self.corrugations, self.phase, separation)
    }

    /// `z₁(x) = A₁ sin(2πx/Λ)`.
    pub fn profile_lower(&self, x: f64) -> f64 {
        self.amplitude_plate() * (TAU * x / self.period()).sin()
    }

    /// `z₂(x) = z + A₂ sin(2πx/Λ + φ)`.
    pub fn profile_upper(&self, x: f64) -> f64 {
        self.separation + self.amplitude_sphere() * (TAU * x / self.period() + self.phase).sin()
    }

    pub fn effective(&self) -> EffectiveCorrugation {
        let a1 = self.amplitude_plate();
        let a2 = self.amplitude_sphere();
        let (sin_phi, cos_phi) = self.phase.sin_cos();
        let along = a2 * sin_phi;
        let across = a2 * cos_phi - a1;
        let b = along.hypot(across);
        let alpha = if b == 0.0 { 0.0 } else { across.atan2(along) };
        EffectiveCorrugation {
            b,
            alpha,
            beta: b / self.separation,
        }
    }

    /// Local gap `z + b cos(2πx/Λ − α)`; always positive.
    pub fn separation_at(&self, x: f64) -> f64 {
        let eff = self.effective();
        self.separation + eff.b * (TAU * x / self.period() - eff.alpha).cos()
    }
}

/// Single-cosine form of the gap between the two profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCorrugation {
    /// Amplitude of the gap modulation, m.
    pub b: f64,
    /// Phase of the gap modulation in `(−π, π]`.
    pub alpha: f64,
    /// `b / z`, always in `[0, 1)`.
    pub beta: f64,
}

/// Effective amplitude, phase and `β` for a pair.
pub fn effective_params(pair: &CorrugationPair) -> EffectiveCorrugation {
    pair.effective()
}

fn reduce_phase(phase: f64) -> f64 {
    let r = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use proptest::prelude::*;

    const NM: f64 = 1e-9;

    fn paper() -> Corrugations {
        Corrugations::new(1.2e-6, 59.0 * NM, 8.0 * NM).unwrap()
    }

    #[test]
    fn profiles() {
        let p = paper().at(0.0, 221.0 * NM).unwrap();
        let lambda = p.period();
        assert_eq!(p.profile_lower(0.0), 0.0);
        assert!((p.profile_lower(lambda / 4.0) - 59.0 * NM).abs() < 1e-22);
        assert!(p.profile_lower(lambda).abs() < 1e-20);
        assert!((p.profile_lower(0.3e-6 + lambda) - p.profile_lower(0.3e-6)).abs() < 1e-20);
        assert_eq!(p.profile_upper(0.0), 221.0 * NM);
        let q = p.with_phase(PI / 2.0).unwrap();
        assert!((q.profile_upper(0.0) - 229.0 * NM).abs() < 1e-20);
        assert!((q.profile_upper(0.1e-6 + lambda) - q.profile_upper(0.1e-6)).abs() < 1e-20);
    }

    #[test]
    fn effective_amplitude_cases() {
        let z = 221.0 * NM;
        let e0 = paper().at(0.0, z).unwrap().effective();
        assert!((e0.b - 51.0 * NM).abs() < 1e-20);
        let epi = paper().at(PI, z).unwrap().effective();
        assert!((epi.b - 67.0 * NM).abs() < 1e-20);
        assert!((epi.beta - 0.303).abs() < 1e-3, "{}", epi.beta);
        let ehalf = paper().at(PI / 2.0, z).unwrap().effective();
        assert!((ehalf.b - 3545f64.sqrt() * NM).abs() < 1e-20);
        assert!((ehalf.b - 59.54 * NM).abs() < 0.01 * NM);
    }

    #[test]
    fn touching_surfaces_rejected() {
        assert!(matches!(paper().at(0.0, 67.0 * NM), Err(Error::Geometry(_))));
        assert!(matches!(paper().at(0.0, 60.0 * NM), Err(Error::Geometry(_))));
        assert!(paper().at(0.0, 67.1 * NM).is_ok());
        assert!(matches!(paper().at(0.0, -1.0), Err(Error::Domain(_))));
        assert!(Corrugations::new(0.0, 1e-9, 1e-9).is_err());
        assert!(Corrugations::new(1e-6, -1e-9, 1e-9).is_err());
    }

    #[test]
    fn phase_is_reduced() {
        let p = paper().at(-PI / 2.0, 300.0 * NM).unwrap();
        assert!((p.phase() - 1.5 * PI).abs() < 1e-15);
        let p = paper().at(-1e-300, 300.0 * NM).unwrap();
        assert!(p.phase() >= 0.0 && p.phase() < TAU);
        let p = paper().at(5.0 * TAU + 0.25, 300.0 * NM).unwrap();
        assert!((p.phase() - 0.25).abs() < 1e-13);
    }

    #[test]
    fn identical_corrugations_in_phase_cancel() {
        let c = Corrugations::new(1e-6, 30.0 * NM, 30.0 * NM).unwrap();
        let p = c.at(0.0, 100.0 * NM).unwrap();
        let e = p.effective();
        assert_eq!(e.b, 0.0);
        assert_eq!(e.alpha, 0.0);
        for i in 0..100 {
            let x = i as f64 * 1e-8;
            assert_eq!(p.separation_at(x), 100.0 * NM);
        }
    }

    #[test]
    fn gap_averages_to_mean_separation() {
        let p = paper().at(1.0, 221.0 * NM).unwrap();
        let n = 64;
        let mean: f64 = (0..n)
            .map(|i| p.separation_at(p.period() * i as f64 / n as f64))
            .sum::<f64>()
            / n as f64;
        assert!((mean - 221.0 * NM).abs() < 1e-12 * 221.0 * NM);
    }

    proptest! {
        #[test]
        fn gap_identity(
            a1 in 0.0f64..100e-9,
            a2 in 0.0f64..100e-9,
            phi in -10.0f64..10.0,
            extra in 1e-9f64..1e-6,
        ) {
            let c = Corrugations::new(1.2e-6, a1, a2).unwrap();
            let z = a1 + a2 + extra;
            let p = c.at(phi, z).unwrap();
            for i in 0..200 {
                let x = p.period() * i as f64 / 200.0;
                let direct = p.profile_upper(x) - p.profile_lower(x);
                prop_assert!((p.separation_at(x) - direct).abs() < 1e-12 * z);
                prop_assert!(p.separation_at(x) > 0.0);
            }
        }

        #[test]
        fn alpha_branch(a1 in 0.0f64..100e-9, a2 in 0.0f64..100e-9, phi in -10.0f64..10.0) {
            let c = Corrugations::new(1e-6, a1, a2).unwrap();
            let p = c.at(phi, 300e-9).unwrap();
            let e = p.effective();
            let scale = (a1 + a2).max(f64::MIN_POSITIVE);
            prop_assert!((e.b * e.alpha.cos() - a2 * phi.sin()).abs() < 1e-12 * scale);
            prop_assert!((e.b * e.alpha.sin() - (a2 * phi.cos() - a1)).abs() < 1e-12 * scale);
            prop_assert!(e.alpha > -PI && e.alpha <= PI);
            prop_assert!(e.b >= (a1 - a2).abs() * (1.0 - 1e-12) && e.b <= (a1 + a2) * (1.0 + 1e-12));
            prop_assert!(e.beta >= 0.0 && e.beta < 1.0);
        }

        #[test]
        fn b_even_and_periodic(a1 in 0.0f64..100e-9, a2 in 0.0f64..100e-9, phi in -5.0f64..5.0) {
            let c = Corrugations::new(1e-6, a1, a2).unwrap();
            let b = |p: f64| c.at(p, 300e-9).unwrap().effective().b;
            let tol = 1e-12 * (a1 + a2 + 1e-30);
            prop_assert!((b(phi) - b(-phi)).abs() <= tol);
            prop_assert!((b(phi) - b(phi + TAU)).abs() <= tol);
        }
    }
}

//! Casimir energy of corrugated plates, the sphere–plate normal force, and the
//! lateral force, both in closed form and from the defining double integral.

use std::f64::consts::{PI, TAU};

use crate::energy::{
    conductivity_coefficients, correction_bracket, plate_energy_unchecked, Material, CONSTANTS,
};
use crate::error::{ensure_positive, Error, Result};
use crate::geometry::{CorrugationPair, Corrugations};
use crate::quadrature::PeriodicTrapezoid;

/// Relative accuracy of the proximity-force step for the reference geometry.
pub const PFT_RELATIVE_ACCURACY: f64 = 0.002;
/// Relative accuracy of the conductivity-corrected plate energy for `z ≥ λ_p`.
pub const PLATE_ENERGY_RELATIVE_ACCURACY: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereGeometry {
    radius: f64,
}

impl SphereGeometry {
    pub fn new(radius: f64) -> Result<Self> {
        ensure_positive("sphere radius", radius)?;
        Ok(Self { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The proximity approximation needs `R ≫ z` and `R ≫ Λ`; this flags
    /// `R < 10·max(z, Λ)`.
    pub fn is_pft_marginal(&self, separation: f64, period: f64) -> bool {
        self.radius < 10.0 * separation.max(period)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ValidityFlags {
    pub below_plasma_wavelength: bool,
    pub pft_marginal: bool,
}

impl ValidityFlags {
    pub fn evaluate(pair: &CorrugationPair, sphere: &SphereGeometry, material: &Material) -> Self {
        Self {
            below_plasma_wavelength: material.is_below_plasma_wavelength(pair.separation()),
            pft_marginal: sphere.is_pft_marginal(pair.separation(), pair.period()),
        }
    }

    pub fn is_clean(&self) -> bool {
        !self.below_plasma_wavelength && !self.pft_marginal
    }

    pub fn names(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.below_plasma_wavelength {
            out.push("below_plasma_wavelength");
        }
        if self.pft_marginal {
            out.push("pft_marginal");
        }
        out
    }

    /// Inverse of [`names`](Self::names).
    pub fn from_names<'a>(names: impl IntoIterator<Item = &'a str>) -> std::result::Result<Self, String> {
        let mut flags = Self::default();
        for name in names {
            match name {
                "below_plasma_wavelength" => flags.below_plasma_wavelength = true,
                "pft_marginal" => flags.pft_marginal = true,
                other => return Err(format!("unknown flag `{other}`")),
            }
        }
        Ok(flags)
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            below_plasma_wavelength: self.below_plasma_wavelength || other.below_plasma_wavelength,
            pft_marginal: self.pft_marginal || other.pft_marginal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LateralForceResult {
    /// Lateral force on the sphere, N.
    pub force: f64,
    /// Ideal-metal force, N; `force == ideal_force * bracket_factor`.
    pub ideal_force: f64,
    pub beta: f64,
    /// `1 + Σ c_{n,x} (λ_p/2πz)ⁿ`. May be negative deep below `λ_p`.
    pub bracket_factor: f64,
    pub flags: ValidityFlags,
}

/// Plate energy averaged over one corrugation period, J/m².
pub fn corrugated_energy(pair: &CorrugationPair, material: &Material) -> Result<f64> {
    let coefficients = conductivity_coefficients();
    let lambda_p = material.plasma_wavelength();
    let z = pair.separation();
    let eff = pair.effective();
    if eff.b == 0.0 {
        return Ok(plate_energy_unchecked(z, &coefficients, lambda_p));
    }
    // the gap z + b cos(θ − α) averaged over θ; α only shifts the period
    let q = PeriodicTrapezoid::default()
        .mean(|theta| plate_energy_unchecked(z + eff.b * theta.cos(), &coefficients, lambda_p))?;
    Ok(q.mean)
}

/// Normal Casimir force on the sphere from the proximity force theorem, N.
/// Negative means attractive.
pub fn normal_force_pft(
    pair: &CorrugationPair,
    sphere: &SphereGeometry,
    material: &Material,
) -> Result<f64> {
    Ok(TAU * sphere.radius() * corrugated_energy(pair, material)?)
}

/// Coefficients `c_{n,x}(β)` of the lateral-force correction series.
pub fn lateral_coefficients(beta: f64) -> Result<[f64; 4]> {
    lateral_coefficients_with(beta, &conductivity_coefficients())
}

/// As [`lateral_coefficients`], scaling an arbitrary set of plate coefficients.
pub fn lateral_coefficients_with(beta: f64, plate: &[f64; 4]) -> Result<[f64; 4]> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::Domain(format!("beta must lie in [0, 1), got {beta}")));
    }
    let s = beta * beta;
    let d = 1.0 - s;
    Ok([
        (4.0 + s) / (3.0 * d) * plate[0],
        5.0 * (4.0 + 3.0 * s) / (12.0 * d * d) * plate[1],
        (8.0 + 12.0 * s + s * s) / (4.0 * d.powi(3)) * plate[2],
        7.0 * (8.0 + 20.0 * s + 5.0 * s * s) / (24.0 * d.powi(4)) * plate[3],
    ])
}

/// Closed-form lateral Casimir force on the sphere.
pub fn lateral_force_closed(
    pair: &CorrugationPair,
    sphere: &SphereGeometry,
    material: &Material,
) -> Result<LateralForceResult> {
    lateral_force_closed_with(pair, sphere, material, &conductivity_coefficients())
}

/// Closed form with caller-supplied plate coefficients. Only the verification
/// suite passes anything other than [`conductivity_coefficients`].
pub fn lateral_force_closed_with(
    pair: &CorrugationPair,
    sphere: &SphereGeometry,
    material: &Material,
    plate_coefficients: &[f64; 4],
) -> Result<LateralForceResult> {
    let z = pair.separation();
    let beta = pair.effective().beta;
    let d = 1.0 - beta * beta;
    let ideal_force = PI.powi(4) * sphere.radius() * CONSTANTS.hbar_c / (120.0 * z.powi(4))
        * pair.amplitude_plate()
        * pair.amplitude_sphere()
        * pair.phase().sin()
        / (pair.period() * d * d * d.sqrt());
    let bracket_factor = if material.is_ideal() {
        1.0
    } else {
        let cx = lateral_coefficients_with(beta, plate_coefficients)?;
        correction_bracket(&cx, material.expansion_ratio(z))
    };
    Ok(LateralForceResult {
        force: ideal_force * bracket_factor,
        ideal_force,
        beta,
        bracket_factor,
        flags: ValidityFlags::evaluate(pair, sphere, material),
    })
}

/// Sphere–plate interaction energy `2πR ∫_z^∞ E_cor(y) dy`, J.
///
/// The `y` integral is done term by term in closed form over the pure powers
/// of the plate energy; the period average is done by quadrature on the raw
/// profile difference `z₂(x) − z₁(x)`.
pub fn sphere_plate_energy(
    pair: &CorrugationPair,
    sphere: &SphereGeometry,
    material: &Material,
) -> Result<f64> {
    let scale = material.plasma_wavelength() / TAU;
    let c = conductivity_coefficients();
    // weights of s^-(3+n) in the plate energy, n = 0..4
    let mut weights = [1.0, 0.0, 0.0, 0.0, 0.0];
    let mut power = 1.0;
    for n in 0..4 {
        power *= scale;
        weights[n + 1] = c[n] * power;
    }
    let prefactor = -PI * PI * CONSTANTS.hbar_c / 720.0;
    let q = PeriodicTrapezoid::default().mean_over_period(pair.period(), |x| {
        let gap = pair.profile_upper(x) - pair.profile_lower(x);
        debug_assert!(gap > 0.0);
        let inv = 1.0 / gap;
        // ∫_z^∞ (y + d)^-(3+n) dy = (z + d)^-(2+n) / (2+n)
        let mut acc = 0.0;
        let mut p = inv * inv;
        for (n, w) in weights.iter().enumerate() {
            acc += w * p / (2 + n) as f64;
            p *= inv;
        }
        acc
    })?;
    Ok(TAU * sphere.radius() * prefactor * q.mean)
}

/// Lateral force from the defining integral: `−(2π/Λ) ∂U/∂φ`, with the phase
/// derivative taken by central differences (step 1e-3 rad) and one level of
/// Richardson extrapolation. Independent of the closed-form coefficients.
pub fn lateral_force_numeric(
    pair: &CorrugationPair,
    sphere: &SphereGeometry,
    material: &Material,
) -> Result<f64> {
    const STEP: f64 = 1e-3;
    let phi = pair.phase();
    let energy_at = |p: f64| sphere_plate_energy(&pair.with_phase(p)?, sphere, material);
    let central = |h: f64| -> Result<f64> { Ok((energy_at(phi + h)? - energy_at(phi - h)?) / (2.0 * h)) };
    let coarse = central(STEP)?;
    let fine = central(STEP / 2.0)?;
    let derivative = (4.0 * fine - coarse) / 3.0;
    Ok(-TAU / pair.period() * derivative)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LateralAmplitude {
    /// Largest `|F_lat|` over the phase, N.
    pub amplitude: f64,
    pub phase_at_max: f64,
}

/// Maximum of `|F_lat(φ)|` over `φ ∈ (0, π)` by golden-section search.
pub fn lateral_amplitude(
    corrugations: &Corrugations,
    separation: f64,
    sphere: &SphereGeometry,
    material: &Material,
) -> Result<LateralAmplitude> {
    const TOL: f64 = 1e-6;
    let base = corrugations.at(PI / 2.0, separation)?;
    let magnitude = |phi: f64| -> Result<f64> {
        Ok(lateral_force_closed(&base.with_phase(phi)?, sphere, material)?
            .force
            .abs())
    };
    let inv_golden = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, PI);
    let mut x1 = hi - inv_golden * (hi - lo);
    let mut x2 = lo + inv_golden * (hi - lo);
    let mut f1 = magnitude(x1)?;
    let mut f2 = magnitude(x2)?;
    while hi - lo > TOL {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_golden * (hi - lo);
            f2 = magnitude(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_golden * (hi - lo);
            f1 = magnitude(x1)?;
        }
    }
    let phase_at_max = 0.5 * (lo + hi);
    Ok(LateralAmplitude {
        amplitude: magnitude(phase_at_max)?,
        phase_at_max,
    })
}

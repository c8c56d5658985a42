use crate::energy::Material;
use crate::error::{Error, Result};
use crate::geometry::Corrugations;
use crate::lateral::{lateral_amplitude, SphereGeometry};

/// Upper end of the separation search interval, m.
pub const SEARCH_UPPER_SEPARATION: f64 = 2e-6;
/// Gap kept above contact at the lower end, m.
const CONTACT_MARGIN: f64 = 1e-9;
/// Bisection stops once the bracket is narrower than this, m.
const TOLERANCE: f64 = 1e-12;

/// Separation at which the lateral-force amplitude equals `measured_amplitude`.
///
/// The amplitude decreases monotonically with separation, so the root is
/// unique and bisection on `[A₁ + A₂ + 1 nm, 2 µm]` finds it.
pub fn invert_separation(
    measured_amplitude: f64,
    corrugations: &Corrugations,
    sphere: &SphereGeometry,
    material: &Material,
) -> Result<f64> {
    if !(measured_amplitude > 0.0 && measured_amplitude.is_finite()) {
        return Err(Error::Domain(format!(
            "amplitude must be positive, got {measured_amplitude:e}"
        )));
    }
    let amplitude = |z: f64| -> Result<f64> {
        Ok(lateral_amplitude(corrugations, z, sphere, material)?.amplitude)
    };
    let mut lo = corrugations.contact_separation() + CONTACT_MARGIN;
    let mut hi = SEARCH_UPPER_SEPARATION;
    if lo >= hi {
        return Err(Error::NoSolution(
            "corrugation amplitudes leave no separation range to search".into(),
        ));
    }
    let (max_amp, min_amp) = (amplitude(lo)?, amplitude(hi)?);
    if measured_amplitude > max_amp || measured_amplitude < min_amp {
        return Err(Error::NoSolution(format!(
            "amplitude {measured_amplitude:e} N outside attainable range [{min_amp:e}, {max_amp:e}] N"
        )));
    }
    while hi - lo > TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if amplitude(mid)? > measured_amplitude {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

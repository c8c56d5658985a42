use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::lsq::least_squares;

/// `amplitude · sin(2πx/Λ + phase) + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineFit {
    pub amplitude: f64,
    pub phase: f64,
    pub offset: f64,
    pub rms_residual: f64,
}

impl SineFit {
    pub fn evaluate(&self, x: f64, period: f64) -> f64 {
        self.amplitude * (TAU * x / period + self.phase).sin() + self.offset
    }
}

/// Least-squares sine of known period through `(x, y)`.
pub fn fit_sine(displacements: &[f64], values: &[f64], period: f64) -> Result<SineFit> {
    if displacements.len() != values.len() {
        return Err(Error::Domain(format!(
            "{} displacements but {} values",
            displacements.len(),
            values.len()
        )));
    }
    if displacements.len() < 3 {
        return Err(Error::Underdetermined(format!(
            "sine fit needs at least 3 samples, got {}",
            displacements.len()
        )));
    }
    if !(period > 0.0) {
        return Err(Error::Domain(format!("period must be positive, got {period:e}")));
    }
    let design: Vec<[f64; 3]> = displacements
        .iter()
        .map(|&x| {
            let (s, c) = (TAU * x / period).sin_cos();
            [s, c, 1.0]
        })
        .collect();
    let [a, b, c] = least_squares(&design, values)?;
    let sse: f64 = design
        .iter()
        .zip(values)
        .map(|(row, y)| (y - (a * row[0] + b * row[1] + c)).powi(2))
        .sum();
    Ok(SineFit {
        amplitude: a.hypot(b),
        phase: b.atan2(a),
        offset: c,
        rms_residual: (sse / values.len() as f64).sqrt(),
    })
}

/// `ln |F| = intercept − slope · ln z`; `slope` is the positive decay exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

impl PowerLawFit {
    pub fn evaluate(&self, z: f64) -> f64 {
        (self.intercept - self.slope * z.ln()).exp()
    }
}

/// Ordinary least squares on the log-log data.
pub fn fit_power_law(separations: &[f64], amplitudes: &[f64]) -> Result<PowerLawFit> {
    if separations.len() != amplitudes.len() {
        return Err(Error::Domain(format!(
            "{} separations but {} amplitudes",
            separations.len(),
            amplitudes.len()
        )));
    }
    if let Some(bad) = separations
        .iter()
        .chain(amplitudes)
        .find(|v| !(**v > 0.0 && v.is_finite()))
    {
        return Err(Error::Domain(format!(
            "power-law fit needs positive finite data, got {bad:e}"
        )));
    }
    let n = separations.len();
    if n < 2 {
        return Err(Error::Underdetermined(format!(
            "power-law fit needs at least 2 points, got {n}"
        )));
    }
    let xs: Vec<f64> = separations.iter().map(|z| z.ln()).collect();
    let ys: Vec<f64> = amplitudes.iter().map(|a| a.ln()).collect();
    let design: Vec<[f64; 2]> = xs.iter().map(|&x| [x, 1.0]).collect();
    let [slope, intercept] = least_squares(&design, &ys)?;

    let slope_stderr = if n > 2 {
        let mean_x = xs.iter().sum::<f64>() / n as f64;
        let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
        let ssr: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
            .sum();
        (ssr / (n - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Ok(PowerLawFit {
        slope: -slope,
        intercept,
        slope_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const PERIOD: f64 = 1.2e-6;

    fn steps(n: usize) -> Vec<f64> {
        (0..n).map(|i| i as f64 * 0.46e-9).collect()
    }

    #[test]
    fn recovers_reference_amplitude() {
        let xs = steps(5218);
        let ys: Vec<f64> = xs.iter().map(|x| 3.2e-13 * (TAU * x / PERIOD).sin()).collect();
        let fit = fit_sine(&xs, &ys, PERIOD).unwrap();
        assert!(((fit.amplitude - 3.2e-13) / 3.2e-13).abs() < 1e-9);
        assert!(fit.offset.abs() < 1e-9 * 3.2e-13);
        assert!(fit.phase.abs() < 1e-9);
    }

    #[test]
    fn constant_input() {
        let xs = steps(1000);
        let fit = fit_sine(&xs, &vec![-7e-14; 1000], PERIOD).unwrap();
        assert!(fit.amplitude < 1e-12 * 7e-14);
        assert!((fit.offset + 7e-14).abs() < 1e-12 * 7e-14);
    }

    #[test]
    fn degenerate_designs() {
        let xs = [0.0, PERIOD / 2.0, PERIOD, 1.5 * PERIOD];
        assert!(matches!(
            fit_sine(&xs, &[1.0, 2.0, 3.0, 4.0], PERIOD),
            Err(Error::Underdetermined(_))
        ));
        assert!(matches!(
            fit_sine(&[0.0, 1e-7], &[1.0, 2.0], PERIOD),
            Err(Error::Underdetermined(_))
        ));
        assert!(fit_sine(&[0.0, 1e-7, 2e-7], &[1.0, 2.0], PERIOD).is_err());
    }

    #[test]
    fn power_law_cases() {
        let zs = [221e-9, 233e-9, 245e-9, 257e-9];
        let quartic: Vec<f64> = zs.iter().map(|z: &f64| 1e-40 * z.powi(-4)).collect();
        let fit = fit_power_law(&zs, &quartic).unwrap();
        assert!((fit.slope - 4.0).abs() < 1e-10);
        assert!(fit.slope_stderr < 1e-10);
        assert!(((fit.evaluate(240e-9) - 1e-40 * 240e-9f64.powi(-4)) / fit.evaluate(240e-9)).abs() < 1e-10);
        let square: Vec<f64> = zs.iter().map(|z: &f64| 1e-20 * z.powi(-2)).collect();
        assert!((fit_power_law(&zs, &square).unwrap().slope - 2.0).abs() < 1e-10);
        assert!(matches!(fit_power_law(&zs[..1], &quartic[..1]), Err(Error::Underdetermined(_))));
        assert!(matches!(fit_power_law(&[1.0, -1.0], &[1.0, 1.0]), Err(Error::Domain(_))));
        assert!(matches!(fit_power_law(&[1.0, 2.0], &[0.0, 1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn power_law_stderr_from_scatter() {
        // residuals ±e around slope 4: stderr = sqrt(4e²/2 / Sxx)
        let zs = [1.0f64, 2.0, 3.0, 4.0];
        let e = 0.01;
        let signs = [1.0, -1.0, -1.0, 1.0];
        let amps: Vec<f64> = zs
            .iter()
            .zip(signs)
            .map(|(z, s)| (-4.0 * z.ln() + s * e).exp())
            .collect();
        let fit = fit_power_law(&zs, &amps).unwrap();
        let xs: Vec<f64> = zs.iter().map(|z| z.ln()).collect();
        let mx = xs.iter().sum::<f64>() / 4.0;
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        // recompute the OLS residuals independently
        let sxy: f64 = xs.iter().zip(&amps).map(|(x, a)| (x - mx) * a.ln()).sum();
        let b = sxy / sxx;
        let my = amps.iter().map(|a| a.ln()).sum::<f64>() / 4.0;
        let ssr: f64 = xs.iter().zip(&amps).map(|(x, a)| (a.ln() - (my + b * (x - mx))).powi(2)).sum();
        assert!((fit.slope + b).abs() < 1e-12);
        assert!((fit.slope_stderr - (ssr / 2.0 / sxx).sqrt()).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn exact_on_any_sinusoid(
            a in -1e-12f64..1e-12,
            b in -1e-12f64..1e-12,
            c in -1e-12f64..1e-12,
            n in 3usize..400,
            start in 0.0f64..1e-6,
        ) {
            let xs: Vec<f64> = (0..n).map(|i| start + i as f64 * PERIOD / n as f64 * 0.9).collect();
            let ys: Vec<f64> = xs
                .iter()
                .map(|x| {
                    let (s, co) = (TAU * x / PERIOD).sin_cos();
                    a * s + b * co + c
                })
                .collect();
            let fit = fit_sine(&xs, &ys, PERIOD).unwrap();
            let scale = a.abs() + b.abs() + c.abs();
            prop_assert!(fit.rms_residual <= 1e-12 * scale);
            prop_assert!((fit.amplitude - a.hypot(b)).abs() <= 1e-11 * scale);
            prop_assert!((fit.offset - c).abs() <= 1e-11 * scale);
        }
    }
}

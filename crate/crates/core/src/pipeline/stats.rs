use crate::error::{Error, Result};

/// Student coefficient for 95% confidence with about 60 samples.
pub const DEFAULT_STUDENT_T: f64 = 2.0;
pub const DEFAULT_CONFIDENCE_LEVEL: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfidenceInterval {
    pub mean_amplitude: f64,
    /// Standard error of the mean amplitude.
    pub sigma_mean: f64,
    /// Absolute systematic error.
    pub systematic: f64,
    pub student_t: f64,
    /// `student_t · sigma_mean + systematic`.
    pub delta_total: f64,
    pub confidence_level: f64,
}

impl ConfidenceInterval {
    /// Combines the random and systematic parts linearly.
    pub fn from_summary(
        mean_amplitude: f64,
        sigma_mean: f64,
        systematic_fraction: f64,
        student_t: f64,
        confidence_level: f64,
    ) -> Result<Self> {
        if !(systematic_fraction >= 0.0) {
            return Err(Error::Domain(format!(
                "systematic fraction must be non-negative, got {systematic_fraction}"
            )));
        }
        if !(sigma_mean >= 0.0) {
            return Err(Error::Domain(format!(
                "standard error must be non-negative, got {sigma_mean:e}"
            )));
        }
        let systematic = systematic_fraction * mean_amplitude.abs();
        Ok(Self {
            mean_amplitude,
            sigma_mean,
            systematic,
            student_t,
            delta_total: student_t * sigma_mean + systematic,
            confidence_level,
        })
    }

    /// `delta_total / mean_amplitude`.
    pub fn relative_precision(&self) -> f64 {
        self.delta_total / self.mean_amplitude.abs()
    }
}

/// Confidence interval of the mean of per-scan amplitude estimates.
pub fn confidence_interval(
    per_scan_amplitudes: &[f64],
    systematic_fraction: f64,
    student_t: f64,
    confidence_level: f64,
) -> Result<ConfidenceInterval> {
    let n = per_scan_amplitudes.len();
    if n < 2 {
        return Err(Error::InsufficientData(format!(
            "confidence interval needs at least 2 amplitudes, got {n}"
        )));
    }
    let mean = per_scan_amplitudes.iter().sum::<f64>() / n as f64;
    let var = per_scan_amplitudes
        .iter()
        .map(|a| (a - mean).powi(2))
        .sum::<f64>()
        / (n - 1) as f64;
    ConfidenceInterval::from_summary(
        mean,
        (var / n as f64).sqrt(),
        systematic_fraction,
        student_t,
        confidence_level,
    )
}

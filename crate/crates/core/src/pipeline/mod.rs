//! Synthetic lateral-scan data and the analysis chain applied to it.

mod fit;
mod inversion;
mod scan;
mod stats;

pub use fit::{fit_power_law, fit_sine, PowerLawFit, SineFit};
pub use inversion::{invert_separation, SEARCH_UPPER_SEPARATION};
pub use scan::{per_scan_amplitudes, simulate_scan, ScanConfig, ScanSet};
pub use stats::{confidence_interval, ConfidenceInterval, DEFAULT_CONFIDENCE_LEVEL, DEFAULT_STUDENT_T};

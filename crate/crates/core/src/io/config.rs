//! Run configuration: TOML with flat dotted keys, one value per line and `#`
//! comments. Every field has a default, so an empty file is a valid config.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::energy::Material;
use crate::error::{Error, Result};
use crate::geometry::Corrugations;
use crate::lateral::SphereGeometry;
use crate::pipeline::{ScanConfig, DEFAULT_CONFIDENCE_LEVEL, DEFAULT_STUDENT_T};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MaterialSection {
    pub lambda_p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SphereSection {
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrugationSection {
    pub period: f64,
    pub amplitude_plate: f64,
    pub amplitude_sphere: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    pub step: f64,
    pub n_steps: usize,
    pub n_scans: usize,
    pub noise_sigma: f64,
    pub tilt_slope: f64,
    pub z_correction: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub systematic_fraction: f64,
    pub student_t: f64,
    pub confidence_level: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub material: MaterialSection,
    pub sphere: SphereSection,
    pub corrugation: CorrugationSection,
    /// Mean separations, m.
    pub separations: Vec<f64>,
    pub scan: ScanSection,
    pub analysis: AnalysisSection,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for MaterialSection {
    fn default() -> Self {
        Self {
            lambda_p: Material::DEFAULT_GOLD_PLASMA_WAVELENGTH,
        }
    }
}

impl Default for SphereSection {
    fn default() -> Self {
        Self { radius: 1.0e-4 }
    }
}

impl Default for CorrugationSection {
    fn default() -> Self {
        Self {
            period: 1.2e-6,
            amplitude_plate: 5.9e-8,
            amplitude_sphere: 8e-9,
        }
    }
}

impl Default for ScanSection {
    fn default() -> Self {
        let s = ScanConfig::for_period(CorrugationSection::default().period);
        Self {
            step: s.step,
            n_steps: s.n_steps,
            n_scans: s.n_scans,
            noise_sigma: s.noise_sigma,
            tilt_slope: s.tilt_slope,
            z_correction: s.z_correction_enabled,
        }
    }
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            systematic_fraction: 0.05,
            student_t: DEFAULT_STUDENT_T,
            confidence_level: DEFAULT_CONFIDENCE_LEVEL,
        }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            material: MaterialSection::default(),
            sphere: SphereSection::default(),
            corrugation: CorrugationSection::default(),
            separations: vec![221e-9, 233e-9, 245e-9, 257e-9],
            scan: ScanSection::default(),
            analysis: AnalysisSection::default(),
            seed: 0,
            output_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    /// Parses and validates.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() as u64 + 1)
                .unwrap_or(0);
            Error::Parse {
                line,
                column: String::new(),
                message: e.message().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Flat `key = value` echo that [`RunConfig::from_toml_str`] reads back
    /// to an identical config.
    pub fn to_text(&self) -> String {
        let f = |v: f64| format!("{v:?}");
        let seps: Vec<String> = self.separations.iter().map(|&v| f(v)).collect();
        let lines = [
            format!("material.lambda_p = {}", f(self.material.lambda_p)),
            format!("sphere.radius = {}", f(self.sphere.radius)),
            format!("corrugation.period = {}", f(self.corrugation.period)),
            format!("corrugation.amplitude_plate = {}", f(self.corrugation.amplitude_plate)),
            format!("corrugation.amplitude_sphere = {}", f(self.corrugation.amplitude_sphere)),
            format!("separations = [{}]", seps.join(", ")),
            format!("scan.step = {}", f(self.scan.step)),
            format!("scan.n_steps = {}", self.scan.n_steps),
            format!("scan.n_scans = {}", self.scan.n_scans),
            format!("scan.noise_sigma = {}", f(self.scan.noise_sigma)),
            format!("scan.tilt_slope = {}", f(self.scan.tilt_slope)),
            format!("scan.z_correction = {}", self.scan.z_correction),
            format!(
                "analysis.systematic_fraction = {}",
                f(self.analysis.systematic_fraction)
            ),
            format!("analysis.student_t = {}", f(self.analysis.student_t)),
            format!("analysis.confidence_level = {}", f(self.analysis.confidence_level)),
            format!("seed = {}", self.seed),
            format!(
                "output_dir = {}",
                toml::Value::String(self.output_dir.to_string_lossy().into_owned())
            ),
        ];
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }

    /// Every violated invariant, in a stable order.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let lp = self.material.lambda_p;
        if !(lp >= 0.0 && lp.is_finite()) {
            v.push(format!("material.lambda_p must be >= 0, got {lp:e}"));
        }
        if !(self.sphere.radius > 0.0 && self.sphere.radius.is_finite()) {
            v.push(format!("sphere.radius must be > 0, got {:e}", self.sphere.radius));
        }
        let c = &self.corrugation;
        if !(c.period > 0.0 && c.period.is_finite()) {
            v.push(format!("corrugation.period must be > 0, got {:e}", c.period));
        }
        if !(c.amplitude_plate >= 0.0 && c.amplitude_plate.is_finite()) {
            v.push(format!(
                "corrugation.amplitude_plate must be >= 0, got {:e}",
                c.amplitude_plate
            ));
        }
        if !(c.amplitude_sphere >= 0.0 && c.amplitude_sphere.is_finite()) {
            v.push(format!(
                "corrugation.amplitude_sphere must be >= 0, got {:e}",
                c.amplitude_sphere
            ));
        }
        let contact = c.amplitude_plate + c.amplitude_sphere;
        for (i, z) in self.separations.iter().enumerate() {
            if !(*z > contact && z.is_finite()) {
                v.push(format!(
                    "separations[{i}] = {z:e} must exceed amplitude_plate + amplitude_sphere = {contact:e}"
                ));
            }
        }
        v.extend(
            self.scan_config(0)
                .violations()
                .into_iter()
                .map(|m| format!("scan: {m}")),
        );
        let a = &self.analysis;
        if !(a.systematic_fraction >= 0.0) {
            v.push(format!(
                "analysis.systematic_fraction must be >= 0, got {}",
                a.systematic_fraction
            ));
        }
        if !(a.student_t > 0.0) {
            v.push(format!("analysis.student_t must be > 0, got {}", a.student_t));
        }
        if !(a.confidence_level > 0.0 && a.confidence_level < 1.0) {
            v.push(format!(
                "analysis.confidence_level must lie in (0, 1), got {}",
                a.confidence_level
            ));
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(v))
        }
    }

    pub fn material(&self) -> Result<Material> {
        Material::new(self.material.lambda_p)
    }

    pub fn sphere(&self) -> Result<SphereGeometry> {
        SphereGeometry::new(self.sphere.radius)
    }

    pub fn corrugations(&self) -> Result<Corrugations> {
        Corrugations::new(
            self.corrugation.period,
            self.corrugation.amplitude_plate,
            self.corrugation.amplitude_sphere,
        )
    }

    pub fn scan_config(&self, rng_seed: u64) -> ScanConfig {
        ScanConfig {
            step: self.scan.step,
            n_steps: self.scan.n_steps,
            n_scans: self.scan.n_scans,
            noise_sigma: self.scan.noise_sigma,
            tilt_slope: self.scan.tilt_slope,
            z_correction_enabled: self.scan.z_correction,
            rng_seed,
        }
    }
}

/// Sub-seed for a labeled consumer of randomness: the first eight bytes of
/// SHA-256 over the seed and the label.
pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update(label.as_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_reference_geometry() {
        let c = RunConfig::default();
        assert_eq!(c.material.lambda_p, 1.36e-7);
        assert_eq!(c.sphere.radius, 1e-4);
        assert_eq!(c.corrugation.period, 1.2e-6);
        assert_eq!(c.corrugation.amplitude_plate, 5.9e-8);
        assert_eq!(c.corrugation.amplitude_sphere, 8e-9);
        assert_eq!(c.separations, vec![221e-9, 233e-9, 245e-9, 257e-9]);
        assert_eq!(c.scan.n_scans, 60);
        assert!(c.validate().is_ok());
        assert_eq!(RunConfig::from_toml_str("").unwrap(), c);
    }

    #[test]
    fn echo_round_trip() {
        let mut c = RunConfig::default();
        c.seed = 12345;
        c.material.lambda_p = 0.1 + 0.2;
        c.scan.tilt_slope = -1.5e-3;
        c.output_dir = PathBuf::from("out dir/\"quoted\"");
        let text = c.to_text();
        let back = RunConfig::from_toml_str(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn flat_keys_and_comments() {
        let text = "# reference run\nmaterial.lambda_p = 0.0 # ideal\nseparations = [3e-7]\nscan.n_scans = 5\n";
        let c = RunConfig::from_toml_str(text).unwrap();
        assert_eq!(c.material.lambda_p, 0.0);
        assert_eq!(c.separations, vec![3e-7]);
        assert_eq!(c.scan.n_scans, 5);
    }

    #[test]
    fn lists_every_violation() {
        let text = "sphere.radius = -1.0\ncorrugation.period = 0.0\nseparations = [5e-8, 3e-7]\nscan.n_scans = 0\n";
        match RunConfig::from_toml_str(text) {
            Err(Error::Config(v)) => {
                assert_eq!(v.len(), 4, "{v:?}");
                assert!(v[0].starts_with("sphere.radius"));
                assert!(v[2].starts_with("separations[0]"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_key_is_a_parse_error() {
        match RunConfig::from_toml_str("seed = 1\nsphere.radus = 1e-4\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn seeds_are_labeled_and_stable() {
        assert_eq!(derive_seed(7, "scan"), derive_seed(7, "scan"));
        assert_ne!(derive_seed(7, "scan"), derive_seed(7, "scan2"));
        assert_ne!(derive_seed(7, "scan"), derive_seed(8, "scan"));
    }
}

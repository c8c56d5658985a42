//! Self-check suite and run report.
//!
//! Each check evaluates one invariant or reference value and reports the
//! measured error next to its pinned tolerance. The report also carries the
//! scan analysis for every configured separation.

use std::f64::consts::{PI, TAU};
use std::fmt::Write;

use crate::electrostatics::{calibrate_from_sweep, default_sweep_voltages, synthetic_sweep};
use crate::energy::{
    conductivity_coefficients, ideal_plate_energy, ideal_plate_pressure, plate_energy, Material,
};
use crate::error::Result;
use crate::geometry::{CorrugationPair, Corrugations};
use crate::io::config::{derive_seed, RunConfig};
use crate::lateral::{
    lateral_amplitude, lateral_force_closed, lateral_force_closed_with, lateral_force_numeric,
    normal_force_pft, sphere_plate_energy, SphereGeometry, ValidityFlags,
};
use crate::pipeline::{
    confidence_interval, fit_power_law, fit_sine, invert_separation, per_scan_amplitudes,
    simulate_scan, ConfidenceInterval, PowerLawFit, ScanConfig,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod tolerance {
    /// Central difference of the plate energy against the analytic pressure.
    pub const PRESSURE_FD: f64 = 1e-6;
    /// Gap identity and α branch, relative to the geometry scale.
    pub const GAP_IDENTITY: f64 = 1e-12;
    /// Quadrature oracle against the closed-form lateral force.
    pub const ORACLE: f64 = 1e-4;
    /// Separation derivative of the sphere–plate energy against the PFT force.
    pub const ENERGY_CONSISTENCY: f64 = 1e-4;
    /// Odd symmetry and periodicity of the closed form, relative to the amplitude.
    pub const SYMMETRY: f64 = 1e-12;
    pub const SINE_FIT: f64 = 1e-12;
    /// Six significant digits.
    pub const CALIBRATION: f64 = 5e-7;
    pub const CONFIDENCE: f64 = 1e-12;
    /// Round trip of amplitude inversion, m.
    pub const INVERSION_ROUND_TRIP: f64 = 0.01e-9;
    /// Reference lateral-force amplitudes, relative.
    pub const REFERENCE_AMPLITUDE: f64 = 0.05;
    /// Reference separations recovered from amplitudes, m.
    pub const REFERENCE_SEPARATION: f64 = 2e-9;
    pub const BETA: f64 = 1e-3;
    pub const SLOPE_RANGE: (f64, f64) = (3.9, 4.3);
}

/// Values reported for the reference configuration.
pub mod reference {
    pub const RADIUS: f64 = 100e-6;
    pub const PERIOD: f64 = 1.2e-6;
    pub const AMPLITUDE_PLATE: f64 = 59e-9;
    pub const AMPLITUDE_SPHERE: f64 = 8e-9;
    pub const SEPARATIONS: [f64; 2] = [221e-9, 233e-9];
    pub const LATERAL_AMPLITUDES: [f64; 2] = [3.2e-13, 2.6e-13];
    pub const MAX_BETA: f64 = 0.303;
    pub const K_TORSION: f64 = 0.138;
    pub const K_BENDING: f64 = 0.0052;
    pub const RESIDUAL_POTENTIAL: f64 = -0.135;
    pub const SIGMA_MEAN: f64 = 0.15e-13;
    pub const SYSTEMATIC: f64 = 0.16e-13;
    pub const DELTA_TOTAL: f64 = 0.46e-13;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

impl CheckStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skip => "SKIP",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: CheckStatus,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckOutcome {
    fn within(name: &'static str, measured: f64, tolerance: f64, detail: String) -> Self {
        let ok = measured.is_finite() && measured <= tolerance;
        Self {
            name,
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            measured,
            tolerance,
            detail,
        }
    }

    fn skip(name: &'static str, why: &str) -> Self {
        Self {
            name,
            status: CheckStatus::Skip,
            measured: f64::NAN,
            tolerance: f64::NAN,
            detail: why.to_string(),
        }
    }

    fn failed(name: &'static str, tolerance: f64, err: impl std::fmt::Display) -> Self {
        Self {
            name,
            status: CheckStatus::Fail,
            measured: f64::NAN,
            tolerance,
            detail: format!("error: {err}"),
        }
    }
}

/// Knobs used to exercise the suite itself.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyOptions {
    /// Replace `c₃` in the closed-form lateral force; the oracle keeps the
    /// true coefficient, so the equivalence check must fail.
    pub corrupt_c3: Option<f64>,
}

struct Setup {
    material: Material,
    sphere: SphereGeometry,
    corrugations: Corrugations,
    separations: Vec<f64>,
    reference_geometry: bool,
}

impl Setup {
    fn new(config: &RunConfig) -> Result<Self> {
        config.validate()?;
        let corrugations = config.corrugations()?;
        let sphere = config.sphere()?;
        let reference_geometry = sphere.radius() == reference::RADIUS
            && corrugations.period() == reference::PERIOD
            && corrugations.amplitude_plate() == reference::AMPLITUDE_PLATE
            && corrugations.amplitude_sphere() == reference::AMPLITUDE_SPHERE;
        Ok(Self {
            material: config.material()?,
            sphere,
            corrugations,
            separations: config.separations.clone(),
            reference_geometry,
        })
    }

    /// Smallest configured separation, or a default clear of contact.
    fn base_separation(&self) -> f64 {
        match self.separations.iter().cloned().reduce(f64::min) {
            Some(z) => z,
            None => 200e-9_f64.max(1.5 * self.corrugations.contact_separation()),
        }
    }

    fn pair(&self, phase: f64, z: f64) -> Result<CorrugationPair> {
        self.corrugations.at(phase, z)
    }
}

fn relative(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

/// Runs every check against the configured geometry.
pub fn run_checks(config: &RunConfig, options: &VerifyOptions) -> Result<Vec<CheckOutcome>> {
    let s = Setup::new(config)?;
    let checks: Vec<fn(&Setup, &VerifyOptions) -> CheckOutcome> = vec![
        check_pressure_derivative,
        check_ideal_reduction,
        check_gap_identity,
        check_alpha_branch,
        check_beta,
        check_oracle_equivalence,
        check_odd_symmetry,
        check_ideal_bracket,
        check_energy_consistency,
        check_sine_fit,
        check_calibration,
        check_confidence,
        check_determinism,
        check_inversion_round_trip,
        check_reference_amplitudes,
        check_reference_inversion,
        check_slope,
    ];
    Ok(checks.into_iter().map(|c| c(&s, options)).collect())
}

fn check_pressure_derivative(s: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "ideal pressure equals -dU/dz";
    let z = s.base_separation();
    let h = z * 1e-5;
    let worst = [z, 2.0 * z, 10.0 * z]
        .iter()
        .map(|&z| -> Result<f64> {
            let fd = -(ideal_plate_energy(z + h)? - ideal_plate_energy(z - h)?) / (2.0 * h);
            Ok(relative(fd, ideal_plate_pressure(z)?))
        })
        .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)));
    match worst {
        Ok(e) => CheckOutcome::within(NAME, e, tolerance::PRESSURE_FD, "central difference, h = z*1e-5".into()),
        Err(e) => CheckOutcome::failed(NAME, tolerance::PRESSURE_FD, e),
    }
}

fn check_ideal_reduction(s: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "plate energy with lambda_p = 0 equals ideal energy";
    let z0 = s.base_separation();
    let mut worst = 0.0f64;
    for k in 0..100 {
        let z = z0 * (0.5 + 0.05 * k as f64);
        match (plate_energy(z, &Material::ideal()), ideal_plate_energy(z)) {
            (Ok(a), Ok(b)) => worst = worst.max((a.energy - b).abs() / b.abs()),
            (Err(e), _) | (_, Err(e)) => return CheckOutcome::failed(NAME, 0.0, e),
        }
    }
    CheckOutcome::within(NAME, worst, 0.0, "100 separations".into())
}

fn identity_pairs(s: &Setup) -> Vec<CorrugationPair> {
    let z = s.base_separation();
    (0..16)
        .filter_map(|k| s.pair(-7.0 + 0.9 * k as f64, z * (1.0 + 0.1 * (k % 4) as f64)).ok())
        .collect()
}

fn check_gap_identity(s: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "gap identity z2 - z1 = z + b cos(2 pi x / L - alpha)";
    let mut worst = 0.0f64;
    for pair in identity_pairs(s) {
        for i in 0..256 {
            let x = pair.period() * i as f64 / 256.0;
            let direct = pair.profile_upper(x) - pair.profile_lower(x);
            worst = worst.max((pair.separation_at(x) - direct).abs() / pair.separation());
        }
    }
    CheckOutcome::within(NAME, worst, tolerance::GAP_IDENTITY, "16 pairs x 256 points, relative to z".into())
}

fn check_alpha_branch(s: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "alpha branch reproduces both projections";
    let scale = s.corrugations.contact_separation();
    if scale == 0.0 {
        return CheckOutcome::skip(NAME, "smooth surfaces");
    }
    let mut worst = 0.0f64;
    for k in 0..64 {
        let phi = TAU * k as f64 / 64.0;
        let Ok(pair) = s.pair(phi, s.base_separation()) else { continue };
        let e = pair.effective();
        let (a1, a2) = (pair.amplitude_plate(), pair.amplitude_sphere());
        worst = worst
            .max((e.b * e.alpha.cos() - a2 * phi.sin()).abs() / scale)
            .max((e.b * e.alpha.sin() - (a2 * phi.cos() - a1)).abs() / scale);
    }
    CheckOutcome::within(NAME, worst, tolerance::GAP_IDENTITY, "64 phases".into())
}

fn check_beta(s: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "beta at phi = pi, z = 221 nm";
    if !s.reference_geometry {
        return CheckOutcome::skip(NAME, "non-reference geometry");
    }
    match s.pair(PI, reference::SEPARATIONS[0]) {
        Ok(p) => {
            let beta = p.effective().beta;
            CheckOutcome::within(
                NAME,
                (beta - reference::MAX_BETA).abs(),
                tolerance::BETA,
                format!("beta = {beta:.6}"),
            )
        }
        Err(e) => CheckOutcome::failed(NAME, tolerance::BETA, e),
    }
}

/// Separations for the oracle grid: five steps of 10% from the base.
fn oracle_separations(s: &Setup) -> Vec<f64> {
    let z = s.base_separation();
    (0..5).map(|k| z * (1.0 + 0.1 * k as f64)).collect()
}

pub fn oracle_grid_error(
    corrugations: &Corrugations,
    separations: &[f64],
    sphere: &SphereGeometry,
    material: &Material,
    plate_coefficients: &[f64; 4],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for &z in separations {
        let mut max_force = 0.0f64;
        let mut max_diff = 0.0f64;
        for k in 0..8 {
            let phi = (2 * k + 1) as f64 * PI / 8.0;
            let pair = corrugations.at(phi, z)?;
            let closed = lateral_force_closed_with(&pair, sphere, material, plate_coefficients)?.force;
            let numeric = lateral_force_numeric(&pair, sphere, material)?;
            max_force = max_force.max(closed.abs());
            max_diff = max_diff.max((numeric - closed).abs());
        }
        if max_force > 0.0 {
            worst = worst.max(max_diff / max_force);
        }
    }
    Ok(worst)
}

fn check_oracle_equivalence(s: &Setup, opts: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "quadrature oracle matches closed-form lateral force";
    let mut coefficients = conductivity_coefficients();
    if let Some(c3) = opts.corrupt_c3 {
        coefficients[2] = c3;
    }
    let mut materials = vec![Material::ideal()];
    if !s.material.is_ideal() {
        materials.push(s.material);
    }
    let zs = oracle_separations(s);
    let mut worst = 0.0f64;
    for m in &materials {
        match oracle_grid_error(&s.corrugations, &zs, &s.sphere, m, &coefficients) {
            Ok(e) => worst = worst.max(e),
            Err(e) => return CheckOutcome::failed(NAME, tolerance::ORACLE, e),
        }
    }
    CheckOutcome::within(
        NAME,
        worst,
        tolerance::ORACLE,
        format!("5 separations x 8 phases x {} materials", materials.len()),
    )
}

fn check_odd_symmetry(s: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "closed form is odd and 2 pi periodic in phase";
    let z = s.base_separation();
    let run = || -> Result<f64> {
        let amp = lateral_amplitude(&s.corrugations, z, &s.sphere, &s.material)?.amplitude;
        let mut worst = 0.0f64;
        for k in 0..32 {
            let phi = 0.1 + 0.19 * k as f64;
            let f = |p: f64| -> Result<f64> {
                Ok(lateral_force_closed(&s.pair(p, z)?, &s.sphere, &s.material)?.force)
            };
            let base = f(phi)?;
            worst = worst.max((base + f(-phi)?).abs()).max((base - f(phi + TAU)?).abs());
        }
        Ok(if amp > 0.0 { worst / amp } else { worst })
    };
    match run() {
        Ok(e) => CheckOutcome::within(NAME, e, tolerance::SYMMETRY, "32 phases".into()),
        Err(e) => CheckOutcome::failed(NAME, tolerance::SYMMETRY, e),
    }
}

fn check_ideal_bracket(s: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "ideal metal has unit correction bracket";
    let mut worst = 0.0f64;
    for z in oracle_separations(s) {
        match s
            .pair(1.0, z)
            .and_then(|p| lateral_force_closed(&p, &s.sphere, &Material::ideal()))
        {
            Ok(r) => worst = worst.max((r.bracket_factor - 1.0).abs()),
            Err(e) => return CheckOutcome::failed(NAME, 0.0, e),
        }
    }
    CheckOutcome::within(NAME, worst, 0.0, "exact".into())
}

fn check_energy_consistency(s: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "-dU/dz of sphere-plate energy equals PFT normal force";
    let run = || -> Result<f64> {
        let mut worst = 0.0f64;
        for z in oracle_separations(s) {
            let pair = s.pair(1.2, z)?;
            let h = z * 1e-4;
            let u = |zz: f64| sphere_plate_energy(&pair.with_separation(zz)?, &s.sphere, &s.material);
            let fd = -(u(z + h)? - u(z - h)?) / (2.0 * h);
            worst = worst.max(relative(fd, normal_force_pft(&pair, &s.sphere, &s.material)?));
        }
        Ok(worst)
    };
    match run() {
        Ok(e) => CheckOutcome::within(NAME, e, tolerance::ENERGY_CONSISTENCY, "5 separations".into()),
        Err(e) => CheckOutcome::failed(NAME, tolerance::ENERGY_CONSISTENCY, e),
    }
}

fn check_sine_fit(s: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "sine fit is exact on a sinusoid";
    let period = s.corrugations.period();
    let xs: Vec<f64> = (0..997).map(|i| i as f64 * period / 413.0).collect();
    let (a, b, c) = (2.1e-13, -1.3e-13, 0.4e-13);
    let ys: Vec<f64> = xs
        .iter()
        .map(|x| {
            let (sn, cs) = (TAU * x / period).sin_cos();
            a * sn + b * cs + c
        })
        .collect();
    match fit_sine(&xs, &ys, period) {
        Ok(fit) => {
            let scale = a.hypot(b);
            let e = (fit.rms_residual / scale)
                .max(relative(fit.amplitude, scale))
                .max((fit.offset - c).abs() / scale);
            CheckOutcome::within(NAME, e, tolerance::SINE_FIT, "997 samples".into())
        }
        Err(e) => CheckOutcome::failed(NAME, tolerance::SINE_FIT, e),
    }
}

fn check_calibration(s: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "calibration round trip (k_tor, V0, k_ben)";
    let run = || -> Result<f64> {
        let voltages = default_sweep_voltages();
        let pair = s.pair(PI / 2.0, s.base_separation())?;
        let sweep = synthetic_sweep(reference::K_TORSION, reference::RESIDUAL_POTENTIAL, &voltages, &pair, &s.sphere);
        let tor = calibrate_from_sweep(&sweep, &pair, &s.sphere)?;
        let smooth = Corrugations::smooth(s.corrugations.period())?.at(0.0, s.base_separation())?;
        let sweep = synthetic_sweep(reference::K_BENDING, reference::RESIDUAL_POTENTIAL, &voltages, &smooth, &s.sphere);
        let ben = calibrate_from_sweep(&sweep, &smooth, &s.sphere)?;
        Ok(relative(tor.spring_constant, reference::K_TORSION)
            .max(relative(tor.residual_potential, reference::RESIDUAL_POTENTIAL))
            .max(relative(ben.spring_constant, reference::K_BENDING))
            .max(relative(ben.residual_potential, reference::RESIDUAL_POTENTIAL)))
    };
    match run() {
        Ok(e) => CheckOutcome::within(NAME, e, tolerance::CALIBRATION, "noiseless 11-point sweeps".into()),
        Err(e) => CheckOutcome::failed(NAME, tolerance::CALIBRATION, e),
    }
}

fn check_confidence(_: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "confidence interval arithmetic";
    match ConfidenceInterval::from_summary(
        reference::LATERAL_AMPLITUDES[0],
        reference::SIGMA_MEAN,
        0.05,
        2.0,
        0.95,
    ) {
        Ok(ci) => CheckOutcome::within(
            NAME,
            relative(ci.systematic, reference::SYSTEMATIC).max(relative(ci.delta_total, reference::DELTA_TOTAL)),
            tolerance::CONFIDENCE,
            format!("delta_total = {:.3e} N", ci.delta_total),
        ),
        Err(e) => CheckOutcome::failed(NAME, tolerance::CONFIDENCE, e),
    }
}

fn check_determinism(s: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "seeded scans and fits are reproducible";
    let cfg = ScanConfig {
        n_steps: 400,
        n_scans: 5,
        step: s.corrugations.period() / 200.0,
        rng_seed: 99,
        ..ScanConfig::for_period(s.corrugations.period())
    };
    let run = || -> Result<bool> {
        let z = s.base_separation();
        let a = simulate_scan(&cfg, &s.corrugations, z, &s.sphere, &s.material)?;
        let b = simulate_scan(&cfg, &s.corrugations, z, &s.sphere, &s.material)?;
        let fa = fit_sine(a.displacements(), a.mean_force(), s.corrugations.period())?;
        let fb = fit_sine(b.displacements(), b.mean_force(), s.corrugations.period())?;
        Ok(a == b && fa == fb)
    };
    match run() {
        Ok(same) => CheckOutcome::within(NAME, if same { 0.0 } else { 1.0 }, 0.0, "bitwise".into()),
        Err(e) => CheckOutcome::failed(NAME, 0.0, e),
    }
}

fn check_inversion_round_trip(s: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "separation inversion undoes the amplitude curve";
    let lo = 200e-9_f64.max(s.corrugations.contact_separation() + 5e-9);
    let hi = 400e-9_f64.max(lo + 50e-9);
    let run = || -> Result<f64> {
        let mut worst = 0.0f64;
        for k in 0..5 {
            let z = lo + (hi - lo) * k as f64 / 4.0;
            let amp = lateral_amplitude(&s.corrugations, z, &s.sphere, &s.material)?.amplitude;
            worst = worst.max((invert_separation(amp, &s.corrugations, &s.sphere, &s.material)? - z).abs());
        }
        Ok(worst)
    };
    if s.corrugations.amplitude_plate() * s.corrugations.amplitude_sphere() == 0.0 {
        return CheckOutcome::skip(NAME, "no lateral force without two corrugations");
    }
    match run() {
        Ok(e) => CheckOutcome::within(NAME, e, tolerance::INVERSION_ROUND_TRIP, format!("5 separations in [{lo:.3e}, {hi:.3e}] m")),
        Err(e) => CheckOutcome::failed(NAME, tolerance::INVERSION_ROUND_TRIP, e),
    }
}

fn reference_skip(s: &Setup) -> Option<&'static str> {
    if !s.reference_geometry {
        Some("non-reference geometry")
    } else if s.material.is_ideal() {
        Some("conductivity-dependent; lambda_p = 0")
    } else {
        None
    }
}

fn check_reference_amplitudes(s: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "lateral force at 221 nm and 233 nm (phi = pi/2)";
    if let Some(why) = reference_skip(s) {
        return CheckOutcome::skip(NAME, why);
    }
    let run = || -> Result<(f64, String)> {
        let mut worst = 0.0f64;
        let mut detail = Vec::new();
        for (z, want) in reference::SEPARATIONS.iter().zip(reference::LATERAL_AMPLITUDES) {
            let f = lateral_force_closed(&s.pair(PI / 2.0, *z)?, &s.sphere, &s.material)?.force;
            worst = worst.max(relative(f, want));
            detail.push(format!("{f:.4e} N"));
        }
        Ok((worst, detail.join(", ")))
    };
    match run() {
        Ok((e, d)) => CheckOutcome::within(NAME, e, tolerance::REFERENCE_AMPLITUDE, d),
        Err(e) => CheckOutcome::failed(NAME, tolerance::REFERENCE_AMPLITUDE, e),
    }
}

fn check_reference_inversion(s: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "3.2e-13 N and 2.6e-13 N invert to 221 nm and 233 nm";
    if let Some(why) = reference_skip(s) {
        return CheckOutcome::skip(NAME, why);
    }
    let run = || -> Result<(f64, String)> {
        let mut worst = 0.0f64;
        let mut detail = Vec::new();
        for (z, amp) in reference::SEPARATIONS.iter().zip(reference::LATERAL_AMPLITUDES) {
            let found = invert_separation(amp, &s.corrugations, &s.sphere, &s.material)?;
            worst = worst.max((found - z).abs());
            detail.push(format!("{:.2} nm", found * 1e9));
        }
        Ok((worst, detail.join(", ")))
    };
    match run() {
        Ok((e, d)) => CheckOutcome::within(NAME, e, tolerance::REFERENCE_SEPARATION, d),
        Err(e) => CheckOutcome::failed(NAME, tolerance::REFERENCE_SEPARATION, e),
    }
}

fn check_slope(s: &Setup, _: &VerifyOptions) -> CheckOutcome {
    const NAME: &str = "power-law slope of closed-form amplitudes";
    if let Some(why) = reference_skip(s) {
        return CheckOutcome::skip(NAME, why);
    }
    if s.separations.len() < 2 {
        return CheckOutcome::skip(NAME, "fewer than 2 separations");
    }
    let run = || -> Result<f64> {
        let amps = s
            .separations
            .iter()
            .map(|&z| Ok(lateral_amplitude(&s.corrugations, z, &s.sphere, &s.material)?.amplitude))
            .collect::<Result<Vec<f64>>>()?;
        Ok(fit_power_law(&s.separations, &amps)?.slope)
    };
    let (lo, hi) = tolerance::SLOPE_RANGE;
    match run() {
        Ok(slope) => {
            let ok = (lo..=hi).contains(&slope);
            CheckOutcome {
                name: NAME,
                status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
                measured: slope,
                tolerance: hi,
                detail: format!("slope {slope:.4}, accepted range [{lo}, {hi}]"),
            }
        }
        Err(e) => CheckOutcome::failed(NAME, hi, e),
    }
}

/// Scan analysis at one separation.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationSummary {
    pub separation: f64,
    /// Largest closed-form `|F_lat|` over the phase, N.
    pub closed_amplitude: f64,
    /// Sine-fit amplitude of the averaged simulated scan, N.
    pub fitted_amplitude: f64,
    /// Separation recovered from the fitted amplitude, if attainable.
    pub inverted_separation: Option<f64>,
    pub confidence: ConfidenceInterval,
    pub flags: ValidityFlags,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub tool_version: String,
    pub config_echo: String,
    pub separations: Vec<SeparationSummary>,
    pub power_law: Option<PowerLawFit>,
    pub checks: Vec<CheckOutcome>,
}

/// Simulates and analyzes one scan per configured separation.
pub fn analyze_separations(config: &RunConfig) -> Result<Vec<SeparationSummary>> {
    let s = Setup::new(config)?;
    let period = s.corrugations.period();
    s.separations
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let scan_cfg = config.scan_config(derive_seed(config.seed, &format!("scan/{i}")));
            let scans = simulate_scan(&scan_cfg, &s.corrugations, z, &s.sphere, &s.material)?;
            let fit = fit_sine(scans.displacements(), scans.mean_force(), period)?;
            let per_scan = per_scan_amplitudes(&scans, period)?;
            let confidence = if per_scan.len() >= 2 {
                confidence_interval(
                    &per_scan,
                    config.analysis.systematic_fraction,
                    config.analysis.student_t,
                    config.analysis.confidence_level,
                )?
            } else {
                ConfidenceInterval::from_summary(
                    fit.amplitude,
                    0.0,
                    config.analysis.systematic_fraction,
                    config.analysis.student_t,
                    config.analysis.confidence_level,
                )?
            };
            Ok(SeparationSummary {
                separation: z,
                closed_amplitude: lateral_amplitude(&s.corrugations, z, &s.sphere, &s.material)?.amplitude,
                fitted_amplitude: fit.amplitude,
                inverted_separation: invert_separation(fit.amplitude, &s.corrugations, &s.sphere, &s.material).ok(),
                confidence,
                flags: scans.flags(),
            })
        })
        .collect()
}

pub fn build_report(config: &RunConfig, options: &VerifyOptions) -> Result<RunReport> {
    let checks = run_checks(config, options)?;
    let separations = analyze_separations(config)?;
    let power_law = if separations.len() >= 2 {
        let zs: Vec<f64> = separations.iter().map(|s| s.separation).collect();
        let amps: Vec<f64> = separations.iter().map(|s| s.fitted_amplitude).collect();
        fit_power_law(&zs, &amps).ok()
    } else {
        None
    };
    Ok(RunReport {
        tool_version: TOOL_VERSION.to_string(),
        config_echo: config.to_text(),
        separations,
        power_law,
        checks,
    })
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# casimir run report");
        let _ = writeln!(out, "tool_version = {}", self.tool_version);
        let _ = writeln!(out, "\n## config");
        out.push_str(&self.config_echo);
        let _ = writeln!(out, "\n## separations");
        let _ = writeln!(
            out,
            "z_m,closed_amplitude_n,fitted_amplitude_n,inverted_z_m,sigma_mean_n,systematic_n,delta_total_n,flags"
        );
        for s in &self.separations {
            let _ = writeln!(
                out,
                "{:.6e},{:.6e},{:.6e},{},{:.6e},{:.6e},{:.6e},{}",
                s.separation,
                s.closed_amplitude,
                s.fitted_amplitude,
                s.inverted_separation
                    .map(|z| format!("{z:.6e}"))
                    .unwrap_or_else(|| "none".into()),
                s.confidence.sigma_mean,
                s.confidence.systematic,
                s.confidence.delta_total,
                s.flags.names().join(";"),
            );
        }
        let _ = writeln!(out, "\n## power law");
        match &self.power_law {
            Some(p) => {
                let _ = writeln!(out, "slope = {:.6}\nslope_stderr = {:.6}\nintercept = {:.6}", p.slope, p.slope_stderr, p.intercept);
            }
            None => {
                let _ = writeln!(out, "not fitted");
            }
        }
        let _ = writeln!(out, "\n## checks");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "[{}] {}: measured {} (tolerance {}) {}",
                c.status.label(),
                c.name,
                fmt_metric(c.measured),
                fmt_metric(c.tolerance),
                c.detail
            );
        }
        let failed = self.checks.iter().filter(|c| c.status == CheckStatus::Fail).count();
        let skipped = self.checks.iter().filter(|c| c.status == CheckStatus::Skip).count();
        let _ = writeln!(
            out,
            "\nresult = {} ({} checks, {} failed, {} skipped)",
            if failed == 0 { "PASS" } else { "FAIL" },
            self.checks.len(),
            failed,
            skipped
        );
        out
    }
}

fn fmt_metric(v: f64) -> String {
    if v.is_nan() {
        "-".into()
    } else {
        format!("{v:.3e}")
    }
}

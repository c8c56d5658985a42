//! Python bindings for `casimir_core`.

use casimir_core as core;
use casimir_core::io::RunConfig;
use casimir_core::verify::{build_report, VerifyOptions};
use casimir_core::ErrorKind;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: core::Error) -> PyErr {
    match e.kind() {
        ErrorKind::Validation => PyValueError::new_err(e.to_string()),
        ErrorKind::Io => PyOSError::new_err(e.to_string()),
        ErrorKind::Numerical | ErrorKind::Fit => PyRuntimeError::new_err(e.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// Metal described by its plasma wavelength; 0 selects an ideal metal.
#[pyclass(name = "Material", frozen)]
struct PyMaterial(core::Material);

#[pymethods]
impl PyMaterial {
    #[new]
    #[pyo3(signature = (lambda_p = core::Material::DEFAULT_GOLD_PLASMA_WAVELENGTH))]
    fn new(lambda_p: f64) -> PyResult<Self> {
        core::Material::new(lambda_p).py().map(Self)
    }

    #[staticmethod]
    fn ideal() -> Self {
        Self(core::Material::ideal())
    }

    #[getter]
    fn lambda_p(&self) -> f64 {
        self.0.plasma_wavelength()
    }

    fn __repr__(&self) -> String {
        format!("Material(lambda_p={:e})", self.0.plasma_wavelength())
    }
}

#[pyclass(name = "SphereGeometry", frozen)]
struct PySphere(core::SphereGeometry);

#[pymethods]
impl PySphere {
    #[new]
    fn new(radius: f64) -> PyResult<Self> {
        core::SphereGeometry::new(radius).py().map(Self)
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.0.radius()
    }
}

/// Shared period and amplitudes of the two corrugations.
#[pyclass(name = "Corrugations", frozen)]
struct PyCorrugations(core::Corrugations);

#[pymethods]
impl PyCorrugations {
    #[new]
    fn new(period: f64, amplitude_plate: f64, amplitude_sphere: f64) -> PyResult<Self> {
        core::Corrugations::new(period, amplitude_plate, amplitude_sphere).py().map(Self)
    }

    /// Places the surfaces at phase shift `phase` and mean separation `z`.
    fn at(&self, phase: f64, z: f64) -> PyResult<PyCorrugationPair> {
        self.0.at(phase, z).py().map(PyCorrugationPair)
    }

    #[getter]
    fn period(&self) -> f64 {
        self.0.period()
    }
}

#[pyclass(name = "CorrugationPair", frozen)]
struct PyCorrugationPair(core::CorrugationPair);

#[pymethods]
impl PyCorrugationPair {
    #[new]
    fn new(period: f64, amplitude_plate: f64, amplitude_sphere: f64, phase: f64, separation: f64) -> PyResult<Self> {
        core::Corrugations::new(period, amplitude_plate, amplitude_sphere)
            .and_then(|c| c.at(phase, separation))
            .py()
            .map(Self)
    }

    #[getter]
    fn phase(&self) -> f64 {
        self.0.phase()
    }

    #[getter]
    fn separation(&self) -> f64 {
        self.0.separation()
    }

    /// `(b, alpha, beta)` of the gap profile.
    fn effective(&self) -> (f64, f64, f64) {
        let e = self.0.effective();
        (e.b, e.alpha, e.beta)
    }

    fn separation_at(&self, x: f64) -> f64 {
        self.0.separation_at(x)
    }
}

#[pyclass(name = "LateralForceResult", frozen, get_all)]
struct PyLateralForce {
    force: f64,
    ideal_force: f64,
    beta: f64,
    bracket_factor: f64,
    flags: Vec<&'static str>,
}

#[pyfunction]
fn plate_energy(z: f64, material: PyRef<'_, PyMaterial>) -> PyResult<(f64, f64, bool)> {
    let e = core::plate_energy(z, &material.0).py()?;
    Ok((e.energy, e.bracket_factor, e.below_plasma_wavelength))
}

#[pyfunction]
fn lateral_force_closed(
    pair: PyRef<'_, PyCorrugationPair>,
    sphere: PyRef<'_, PySphere>,
    material: PyRef<'_, PyMaterial>,
) -> PyResult<PyLateralForce> {
    let r = core::lateral_force_closed(&pair.0, &sphere.0, &material.0).py()?;
    Ok(PyLateralForce {
        force: r.force,
        ideal_force: r.ideal_force,
        beta: r.beta,
        bracket_factor: r.bracket_factor,
        flags: r.flags.names(),
    })
}

#[pyfunction]
fn lateral_force_numeric(
    pair: PyRef<'_, PyCorrugationPair>,
    sphere: PyRef<'_, PySphere>,
    material: PyRef<'_, PyMaterial>,
) -> PyResult<f64> {
    core::lateral_force_numeric(&pair.0, &sphere.0, &material.0).py()
}

#[pyfunction]
fn normal_force(
    pair: PyRef<'_, PyCorrugationPair>,
    sphere: PyRef<'_, PySphere>,
    material: PyRef<'_, PyMaterial>,
) -> PyResult<f64> {
    core::normal_force_pft(&pair.0, &sphere.0, &material.0).py()
}

/// `(amplitude, phase_at_max)` of the lateral force over the phase.
#[pyfunction]
fn lateral_amplitude(
    corrugations: PyRef<'_, PyCorrugations>,
    z: f64,
    sphere: PyRef<'_, PySphere>,
    material: PyRef<'_, PyMaterial>,
) -> PyResult<(f64, f64)> {
    let a = core::lateral_amplitude(&corrugations.0, z, &sphere.0, &material.0).py()?;
    Ok((a.amplitude, a.phase_at_max))
}

#[pyfunction]
fn invert_separation(
    amplitude: f64,
    corrugations: PyRef<'_, PyCorrugations>,
    sphere: PyRef<'_, PySphere>,
    material: PyRef<'_, PyMaterial>,
) -> PyResult<f64> {
    core::invert_separation(amplitude, &corrugations.0, &sphere.0, &material.0).py()
}

/// `(amplitude, phase, offset, rms_residual)`.
#[pyfunction]
fn fit_sine(displacements: Vec<f64>, values: Vec<f64>, period: f64) -> PyResult<(f64, f64, f64, f64)> {
    let f = core::fit_sine(&displacements, &values, period).py()?;
    Ok((f.amplitude, f.phase, f.offset, f.rms_residual))
}

/// `(slope, intercept, slope_stderr)`; the slope is the positive decay exponent.
#[pyfunction]
fn fit_power_law(separations: Vec<f64>, amplitudes: Vec<f64>) -> PyResult<(f64, f64, f64)> {
    let f = core::fit_power_law(&separations, &amplitudes).py()?;
    Ok((f.slope, f.intercept, f.slope_stderr))
}

/// `(mean, sigma_mean, systematic, delta_total)`.
#[pyfunction]
#[pyo3(signature = (amplitudes, systematic_fraction = 0.05, student_t = 2.0, confidence_level = 0.95))]
fn confidence_interval(
    amplitudes: Vec<f64>,
    systematic_fraction: f64,
    student_t: f64,
    confidence_level: f64,
) -> PyResult<(f64, f64, f64, f64)> {
    let ci = core::confidence_interval(&amplitudes, systematic_fraction, student_t, confidence_level).py()?;
    Ok((ci.mean_amplitude, ci.sigma_mean, ci.systematic, ci.delta_total))
}

#[pyfunction]
fn synthetic_sweep(
    spring_constant: f64,
    residual_potential: f64,
    voltages: Vec<f64>,
    pair: PyRef<'_, PyCorrugationPair>,
    sphere: PyRef<'_, PySphere>,
) -> Vec<(f64, f64)> {
    core::synthetic_sweep(spring_constant, residual_potential, &voltages, &pair.0, &sphere.0)
        .into_iter()
        .map(|s| (s.voltage, s.deflection))
        .collect()
}

/// `(spring_constant, residual_potential, fit_residual)` from `(voltage, deflection)` pairs.
#[pyfunction]
fn calibrate(
    samples: Vec<(f64, f64)>,
    pair: PyRef<'_, PyCorrugationPair>,
    sphere: PyRef<'_, PySphere>,
) -> PyResult<(f64, f64, f64)> {
    let samples: Vec<_> = samples
        .into_iter()
        .map(|(voltage, deflection)| core::CalibrationSample { voltage, deflection })
        .collect();
    let r = core::calibrate_from_sweep(&samples, &pair.0, &sphere.0).py()?;
    Ok((r.spring_constant, r.residual_potential, r.fit_residual))
}

type ScanArrays = (Vec<f64>, Vec<Vec<f64>>, Vec<f64>);

/// Simulated scans as `(displacements, forces, mean_force)`.
#[pyfunction]
#[pyo3(signature = (corrugations, z, sphere, material, seed = 0, n_scans = None, noise_sigma = None))]
fn simulate_scan(
    corrugations: PyRef<'_, PyCorrugations>,
    z: f64,
    sphere: PyRef<'_, PySphere>,
    material: PyRef<'_, PyMaterial>,
    seed: u64,
    n_scans: Option<usize>,
    noise_sigma: Option<f64>,
) -> PyResult<ScanArrays> {
    let mut cfg = core::ScanConfig::for_period(corrugations.0.period());
    cfg.rng_seed = seed;
    if let Some(n) = n_scans {
        cfg.n_scans = n;
    }
    if let Some(s) = noise_sigma {
        cfg.noise_sigma = s;
    }
    let s = core::simulate_scan(&cfg, &corrugations.0, z, &sphere.0, &material.0).py()?;
    Ok((s.displacements().to_vec(), s.forces().to_vec(), s.mean_force().to_vec()))
}

/// Runs the self-check suite; returns `(passed, report_text)`.
#[pyfunction]
#[pyo3(signature = (config_toml = None, lambda_p = None))]
fn verify(config_toml: Option<&str>, lambda_p: Option<f64>) -> PyResult<(bool, String)> {
    let mut cfg = match config_toml {
        Some(text) => RunConfig::from_toml_str(text).py()?,
        None => RunConfig::default(),
    };
    if let Some(lp) = lambda_p {
        cfg.material.lambda_p = lp;
    }
    let report = build_report(&cfg, &VerifyOptions::default()).py()?;
    Ok((report.passed(), report.render()))
}

#[pymodule]
fn casimir_lateral(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMaterial>()?;
    m.add_class::<PySphere>()?;
    m.add_class::<PyCorrugations>()?;
    m.add_class::<PyCorrugationPair>()?;
    m.add_class::<PyLateralForce>()?;
    m.add_function(wrap_pyfunction!(plate_energy, m)?)?;
    m.add_function(wrap_pyfunction!(lateral_force_closed, m)?)?;
    m.add_function(wrap_pyfunction!(lateral_force_numeric, m)?)?;
    m.add_function(wrap_pyfunction!(normal_force, m)?)?;
    m.add_function(wrap_pyfunction!(lateral_amplitude, m)?)?;
    m.add_function(wrap_pyfunction!(invert_separation, m)?)?;
    m.add_function(wrap_pyfunction!(fit_sine, m)?)?;
    m.add_function(wrap_pyfunction!(fit_power_law, m)?)?;
    m.add_function(wrap_pyfunction!(confidence_interval, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_scan, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

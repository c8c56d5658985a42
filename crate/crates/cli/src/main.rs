use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use casimir_core::io::csv::{
    calibration_record, power_law_record, read_calibration_samples, scan_fit_record,
    write_amplitudes, write_force_curve, write_record, write_scan_set, ForceCurveRow,
};
use casimir_core::io::svg::{Plot, Style};
use casimir_core::io::{derive_seed, RunConfig};
use casimir_core::verify::{build_report, VerifyOptions};
use casimir_core::{
    calibrate_from_sweep, confidence_interval, fit_power_law, fit_sine, invert_separation,
    lateral_amplitude, lateral_force_closed, per_scan_amplitudes, simulate_scan, ConfidenceInterval,
    Corrugations, Error, ErrorKind,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

const EXIT_VALIDATION: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;
const EXIT_IO: u8 = 5;
const EXIT_FIT: u8 = 6;
const EXIT_VERIFY_FAILED: u8 = 7;

#[derive(Parser)]
#[command(name = "casimir", version, about = "Lateral Casimir force between corrugated surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write an SVG plot.
    #[arg(long)]
    svg: bool,
    #[arg(long)]
    seed: Option<u64>,
    /// Plasma wavelength in meters; 0 selects an ideal metal.
    #[arg(long = "lambda-p")]
    lambda_p: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the closed-form lateral force over separations.
    ForceCurve {
        #[command(flatten)]
        common: Common,
        /// Phase shift between the corrugations, rad.
        #[arg(long, default_value_t = PI / 2.0)]
        phi: f64,
        /// Start of a uniform separation grid, m. Without it the configured separations are used.
        #[arg(long, requires = "z_max")]
        z_min: Option<f64>,
        #[arg(long, requires = "z_min")]
        z_max: Option<f64>,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Simulate a displacement scan at one separation and fit it.
    LateralScan {
        #[command(flatten)]
        common: Common,
        /// Separation, m; defaults to the first configured separation.
        #[arg(long)]
        z: Option<f64>,
        /// Disable measurement noise.
        #[arg(long)]
        noiseless: bool,
    },
    /// Fit the power law of the amplitude over the configured separations.
    Slope {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = AmplitudeSource::Closed)]
        source: AmplitudeSource,
        #[arg(long, hide = true)]
        exact_power: bool,
    },
    /// Recover spring constant and residual potential from a voltage sweep.
    Calibrate {
        #[command(flatten)]
        common: Common,
        /// CSV with header `v1_volts,deflection`.
        #[arg(long)]
        input: PathBuf,
        /// Separation of the sweep, m; defaults to the first configured separation.
        #[arg(long)]
        z: Option<f64>,
        #[arg(long, default_value_t = PI / 2.0)]
        phi: f64,
        /// Sweep taken against a smooth sphere.
        #[arg(long)]
        smooth: bool,
    },
    /// Run the self-check suite and write the run report.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, hide = true, allow_negative_numbers = true)]
        corrupt_c3: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AmplitudeSource {
    /// Maximum over phase of the closed-form force.
    Closed,
    /// Sine-fit amplitudes of simulated scans.
    Scan,
}

enum Failure {
    Core(Error),
    VerifyFailed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Validation => EXIT_VALIDATION,
                ErrorKind::Numerical => EXIT_NUMERICAL,
                ErrorKind::Io => EXIT_IO,
                ErrorKind::Fit => EXIT_FIT,
            })
        }
        Err(Failure::VerifyFailed(report)) => {
            print!("{report}");
            eprintln!("error: verification failed");
            ExitCode::from(EXIT_VERIFY_FAILED)
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig, Error> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &common.out {
        cfg.output_dir = dir.clone();
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(lp) = common.lambda_p {
        cfg.material.lambda_p = lp;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> Result<(), Error>) -> Result<Vec<u8>, Error> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn first_separation(cfg: &RunConfig, z: Option<f64>) -> Result<f64, Error> {
    z.or_else(|| cfg.separations.first().copied())
        .ok_or_else(|| Error::Domain("no separation given and none configured".into()))
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::ForceCurve { common, phi, z_min, z_max, points } => {
            force_curve(&common, phi, z_min.zip(z_max), points)
        }
        Command::LateralScan { common, z, noiseless } => lateral_scan(&common, z, noiseless),
        Command::Slope { common, source, exact_power } => slope(&common, source, exact_power),
        Command::Calibrate { common, input, z, phi, smooth } => {
            calibrate(&common, &input, z, phi, smooth)
        }
        Command::Verify { common, corrupt_c3 } => verify(&common, corrupt_c3),
    }
}

fn force_curve(common: &Common, phi: f64, range: Option<(f64, f64)>, points: usize) -> CmdResult {
    let cfg = load_config(common)?;
    let zs: Vec<f64> = match range {
        Some((lo, hi)) => {
            if !(lo > 0.0 && hi >= lo) {
                return Err(Error::Domain(format!("invalid separation range [{lo:e}, {hi:e}]")).into());
            }
            match points {
                0 => vec![],
                1 => vec![lo],
                n => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
            }
        }
        None => cfg.separations.clone(),
    };
    let (material, sphere, corr) = (cfg.material()?, cfg.sphere()?, cfg.corrugations()?);
    let rows = zs
        .iter()
        .map(|&z| {
            let r = lateral_force_closed(&corr.at(phi, z)?, &sphere, &material)?;
            Ok(ForceCurveRow {
                z,
                force: r.force,
                bracket_factor: r.bracket_factor,
                beta: r.beta,
                flags: r.flags,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    write_file(&cfg.output_dir, "force_curve.csv", &csv_bytes(|b| write_force_curve(b, &rows))?)?;
    if common.svg {
        let points = rows.iter().map(|r| (r.z, r.force.abs())).collect();
        let plot = Plot::new("Lateral Casimir force", "z (m)", "|F_lat| (N)")
            .log_log()
            .with_series("closed form", points, Style::Line, "#1f77b4");
        write_file(&cfg.output_dir, "force_curve.svg", plot.render().as_bytes())?;
    }
    Ok(())
}

fn lateral_scan(common: &Common, z: Option<f64>, noiseless: bool) -> CmdResult {
    let cfg = load_config(common)?;
    let z = first_separation(&cfg, z)?;
    let (material, sphere, corr) = (cfg.material()?, cfg.sphere()?, cfg.corrugations()?);
    let mut scan_cfg = cfg.scan_config(derive_seed(cfg.seed, "lateral-scan"));
    if noiseless {
        scan_cfg.noise_sigma = 0.0;
    }
    let scans = simulate_scan(&scan_cfg, &corr, z, &sphere, &material)?;
    let period = corr.period();
    let fit = fit_sine(scans.displacements(), scans.mean_force(), period)?;
    let inverted = invert_separation(fit.amplitude, &corr, &sphere, &material).unwrap_or(f64::NAN);
    let per_scan = per_scan_amplitudes(&scans, period)?;
    let a = &cfg.analysis;
    let ci = if per_scan.len() >= 2 {
        confidence_interval(&per_scan, a.systematic_fraction, a.student_t, a.confidence_level)?
    } else {
        ConfidenceInterval::from_summary(
            fit.amplitude,
            0.0,
            a.systematic_fraction,
            a.student_t,
            a.confidence_level,
        )?
    };
    let dir = &cfg.output_dir;
    write_file(dir, "lateral_scan.csv", &csv_bytes(|b| write_scan_set(b, &scans))?)?;
    write_file(
        dir,
        "lateral_scan_fit.csv",
        &csv_bytes(|b| write_record(b, &scan_fit_record(&fit, inverted, &ci)))?,
    )?;
    if common.svg {
        let xs = scans.displacements();
        let data = xs.iter().zip(scans.mean_force()).map(|(x, f)| (*x, *f)).collect();
        let model = xs.iter().map(|&x| (x, fit.evaluate(x, period))).collect();
        let plot = Plot::new("Mean lateral force over displacement", "x (m)", "F_lat (N)")
            .with_series("mean of scans", data, Style::Markers, "#7f7f7f")
            .with_series("sine fit", model, Style::Line, "#d62728");
        write_file(dir, "lateral_scan.svg", plot.render().as_bytes())?;
    }
    Ok(())
}

fn slope(common: &Common, source: AmplitudeSource, exact_power: bool) -> CmdResult {
    let cfg = load_config(common)?;
    let zs = cfg.separations.clone();
    let (material, sphere, corr) = (cfg.material()?, cfg.sphere()?, cfg.corrugations()?);
    let amps: Vec<f64> = if exact_power {
        zs.iter().map(|z| (z / 1e-7).powi(-4) * 1e-13).collect()
    } else {
        match source {
            AmplitudeSource::Closed => zs
                .iter()
                .map(|&z| Ok(lateral_amplitude(&corr, z, &sphere, &material)?.amplitude))
                .collect::<Result<_, Error>>()?,
            AmplitudeSource::Scan => scan_amplitudes(&cfg, &corr, &zs)?,
        }
    };
    let fit = fit_power_law(&zs, &amps)?;
    let dir = &cfg.output_dir;
    write_file(dir, "slope.csv", &csv_bytes(|b| write_amplitudes(b, &zs, &amps))?)?;
    write_file(dir, "slope_fit.csv", &csv_bytes(|b| write_record(b, &power_law_record(&fit)))?)?;
    if common.svg {
        let data = zs.iter().zip(&amps).map(|(z, a)| (*z, *a)).collect();
        let (lo, hi) = zs.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &z| (l.min(z), h.max(z)));
        let line = (0..=20)
            .map(|i| lo * (hi / lo).powf(i as f64 / 20.0))
            .map(|z| (z, fit.evaluate(z)))
            .collect();
        let plot = Plot::new(
            &format!("Amplitude power law, slope {:.3}", fit.slope),
            "z (m)",
            "amplitude (N)",
        )
        .log_log()
        .with_series("amplitudes", data, Style::Markers, "#1f77b4")
        .with_series("fit", line, Style::Line, "#d62728");
        write_file(dir, "slope.svg", plot.render().as_bytes())?;
    }
    Ok(())
}

fn scan_amplitudes(cfg: &RunConfig, corr: &Corrugations, zs: &[f64]) -> Result<Vec<f64>, Error> {
    let (material, sphere) = (cfg.material()?, cfg.sphere()?);
    zs.iter()
        .enumerate()
        .map(|(i, &z)| {
            let scan_cfg = cfg.scan_config(derive_seed(cfg.seed, &format!("scan/{i}")));
            let scans = simulate_scan(&scan_cfg, corr, z, &sphere, &material)?;
            Ok(fit_sine(scans.displacements(), scans.mean_force(), corr.period())?.amplitude)
        })
        .collect()
}

fn calibrate(common: &Common, input: &Path, z: Option<f64>, phi: f64, smooth: bool) -> CmdResult {
    let cfg = load_config(common)?;
    let z = first_separation(&cfg, z)?;
    let text = fs::read_to_string(input).map_err(|e| Error::Io(format!("{}: {e}", input.display())))?;
    let samples = read_calibration_samples(&text)?;
    let corr = if smooth {
        Corrugations::smooth(cfg.corrugation.period)?
    } else {
        cfg.corrugations()?
    };
    let result = calibrate_from_sweep(&samples, &corr.at(phi, z)?, &cfg.sphere()?)?;
    write_file(
        &cfg.output_dir,
        "calibration.csv",
        &csv_bytes(|b| write_record(b, &calibration_record(&result)))?,
    )?;
    Ok(())
}

fn verify(common: &Common, corrupt_c3: Option<f64>) -> CmdResult {
    let cfg = load_config(common)?;
    let report = build_report(&cfg, &VerifyOptions { corrupt_c3 })?;
    let text = report.render();
    write_file(&cfg.output_dir, "report.txt", text.as_bytes())?;
    if report.passed() {
        print!("{text}");
        Ok(())
    } else {
        Err(Failure::VerifyFailed(text))
    }
}

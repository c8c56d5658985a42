use casimir_core::io::csv::{read_scan_set, write_scan_set};
use casimir_core::io::RunConfig;
use casimir_core::{
    confidence_interval, fit_sine, invert_separation, per_scan_amplitudes, simulate_scan,
    ScanConfig,
};

fn short_scan(cfg: &RunConfig, seed: u64) -> ScanConfig {
    ScanConfig {
        step: 4e-9,
        n_steps: 600,
        n_scans: 12,
        ..cfg.scan_config(seed)
    }
}

#[test]
fn scan_survives_csv_and_fits_to_the_same_amplitude() {
    let cfg = RunConfig::default();
    let (corr, sphere, gold) = (cfg.corrugations().unwrap(), cfg.sphere().unwrap(), cfg.material().unwrap());
    let scans = simulate_scan(&short_scan(&cfg, 5), &corr, 233e-9, &sphere, &gold).unwrap();

    let mut buf = Vec::new();
    write_scan_set(&mut buf, &scans).unwrap();
    let back = read_scan_set(std::str::from_utf8(&buf).unwrap()).unwrap();
    assert_eq!(back, scans);

    let a = fit_sine(scans.displacements(), scans.mean_force(), corr.period()).unwrap();
    let b = fit_sine(back.displacements(), back.mean_force(), corr.period()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn noiseless_chain_recovers_separation() {
    let cfg = RunConfig::default();
    let (corr, sphere, gold) = (cfg.corrugations().unwrap(), cfg.sphere().unwrap(), cfg.material().unwrap());
    for &z in &cfg.separations {
        let scan_cfg = ScanConfig {
            noise_sigma: 0.0,
            ..short_scan(&cfg, 1)
        };
        let scans = simulate_scan(&scan_cfg, &corr, z, &sphere, &gold).unwrap();
        let fit = fit_sine(scans.displacements(), scans.mean_force(), corr.period()).unwrap();
        let found = invert_separation(fit.amplitude, &corr, &sphere, &gold).unwrap();
        assert!((found - z).abs() < 2e-9, "{z:e} -> {found:e}");
    }
}

#[test]
fn noisy_confidence_interval_covers_truth() {
    let cfg = RunConfig::default();
    let (corr, sphere, gold) = (cfg.corrugations().unwrap(), cfg.sphere().unwrap(), cfg.material().unwrap());
    let truth = casimir_core::lateral_amplitude(&corr, 245e-9, &sphere, &gold).unwrap().amplitude;
    let scan_cfg = ScanConfig {
        noise_sigma: 2e-13,
        ..short_scan(&cfg, 9)
    };
    let scans = simulate_scan(&scan_cfg, &corr, 245e-9, &sphere, &gold).unwrap();
    let amps = per_scan_amplitudes(&scans, corr.period()).unwrap();
    let ci = confidence_interval(&amps, 0.05, 2.0, 0.95).unwrap();
    assert!((ci.mean_amplitude - truth).abs() < ci.delta_total, "{ci:?} vs {truth:e}");
}

#[test]
fn config_echo_round_trips() {
    let mut cfg = RunConfig::default();
    cfg.seed = 42;
    cfg.material.lambda_p = 0.0;
    cfg.separations = vec![2.5e-7, 3e-7];
    let again = RunConfig::from_toml_str(&cfg.to_text()).unwrap();
    assert_eq!(again, cfg);
}

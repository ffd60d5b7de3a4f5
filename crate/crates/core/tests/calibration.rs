use dualphase::metrics::{fit_eta, model_curve, SimParams, FIT_ETA_LIMIT};
use dualphase::retrieval::{beta_samples, SweepResult};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ETAS: [f64; 5] = [0.05, 0.09, 0.22, 0.5, 0.73];

#[test]
fn fit_recovers_generating_eta() {
    let betas = beta_samples(64);
    for cell in [1, 4, 10] {
        let sim = SimParams::for_calibration(cell);
        for eta in ETAS {
            let measured = model_curve(&betas, cell, eta, &sim).unwrap();
            let fit = fit_eta(&measured, cell, (0.0, FIT_ETA_LIMIT), &sim).unwrap();
            assert!((fit.eta_hat - eta).abs() <= 0.02, "cell {cell}, eta {eta}: {fit:?}");
            assert!(fit.fit_rmse < 0.005, "cell {cell}, eta {eta}: {fit:?}");
        }
    }
}

#[test]
fn fit_tolerates_measurement_noise() {
    let betas = beta_samples(64);
    let sim = SimParams::for_calibration(4);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let clean = model_curve(&betas, 4, 0.22, &sim).unwrap();
    let noisy: Vec<f64> = clean
        .irradiance
        .iter()
        .map(|v| (v + rng.gen_range(-0.02..=0.02)).clamp(0.0, 1.0))
        .collect();
    let measured = SweepResult::new(betas, noisy).unwrap();
    let fit = fit_eta(&measured, 4, (0.0, FIT_ETA_LIMIT), &sim).unwrap();
    assert!(fit.fit_rmse < 0.05, "{fit:?}");
    assert!((fit.eta_hat - 0.22).abs() < 0.05, "{fit:?}");
}

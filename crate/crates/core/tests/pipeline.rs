use dualphase::encoder::EncodingConfig;
use dualphase::metrics::{rmse_amplitude, rmse_phase, support_from_amplitude};
use dualphase::optics::OpticalTrain;
use dualphase::retrieval::encode_retrieve_pipeline;
use dualphase::slm::{fringe_eta, CrosstalkModel};
use dualphase::testfields::band_limited_field;
use dualphase::{AmplitudeMap, GridSize, PhaseElement};

fn test_pair(n: usize, radius: f64, seed: u64) -> (AmplitudeMap, PhaseElement) {
    band_limited_field(GridSize::new(n, n), radius, 1.0, 0.6, seed).unwrap()
}

/// Returns (amplitude rmse %, phase rmse % of 2π).
fn retrieve(amp: &AmplitudeMap, phase: &PhaseElement, cell: usize, eta: f64, upsample: usize) -> (f64, f64) {
    let cfg = EncodingConfig::new(cell).with_m3(true);
    let model = CrosstalkModel::new(eta, upsample).unwrap();
    let out = encode_retrieve_pipeline(amp, phase, &cfg, &model, &OpticalTrain::new(upsample)).unwrap();
    let support = support_from_amplitude(amp.grid(), 0.05).unwrap();
    (
        rmse_amplitude(amp.grid(), &out.amplitude).unwrap(),
        rmse_phase(phase, &out.phase, &support).unwrap(),
    )
}

#[test]
fn ideal_device_retrieves_band_limited_field() {
    let (amp, phase) = test_pair(240, 0.02, 3);
    for cell in [1, 2, 5] {
        let (a, p) = retrieve(&amp, &phase, cell, 0.0, 1);
        assert!(a < 2.0 && p < 2.0, "cell {cell}: amplitude {a}%, phase {p}%");
    }
}

#[test]
fn blazed_carrier_does_not_change_the_retrieval() {
    let (amp, phase) = test_pair(120, 0.03, 8);
    let plain = EncodingConfig::new(1).with_m3(true);
    let blazed = plain.with_blazed(4, dualphase::encoder::Axis::Horizontal);
    let model = CrosstalkModel::ideal(1).unwrap();
    let train = OpticalTrain::new(1);
    let a = encode_retrieve_pipeline(&amp, &phase, &plain, &model, &train).unwrap();
    let b = encode_retrieve_pipeline(&amp, &phase, &blazed, &model, &train).unwrap();
    let support = support_from_amplitude(amp.grid(), 0.05).unwrap();
    assert!(rmse_amplitude(&a.amplitude, &b.amplitude).unwrap() < 0.5);
    assert!(rmse_phase(&a.phase, &b.phase, &support).unwrap() < 0.5);
}

#[test]
fn fitted_crosstalk_schedule_favours_larger_cells() {
    let (amp, phase) = test_pair(240, 0.02, 7);
    let results: Vec<(f64, f64)> = [1, 2, 5]
        .iter()
        .map(|&cell| retrieve(&amp, &phase, cell, fringe_eta(cell), 4))
        .collect();
    for w in results.windows(2) {
        assert!(w[1].0 < w[0].0, "amplitude rmse not decreasing: {results:?}");
    }
    for (a, p) in &results {
        assert!(p < a, "{results:?}");
    }
}

#[test]
fn phase_degrades_less_than_amplitude() {
    let (amp, phase) = test_pair(160, 0.05, 1);
    let runs: Vec<(f64, f64)> = [0.0, 0.2, 0.4, 0.73]
        .iter()
        .map(|&eta| retrieve(&amp, &phase, 1, eta, 16))
        .collect();
    let (a0, p0) = runs[0];
    for &(a, p) in &runs[1..] {
        assert!(a > a0 && p > p0, "{runs:?}");
        assert!(p - p0 < a - a0, "{runs:?}");
        assert!(p < a, "{runs:?}");
    }
}

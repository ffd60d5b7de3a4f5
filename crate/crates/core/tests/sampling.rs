//! Band-limited fields survive encoding, rendering and filtering.

use dualphase::encoder::{encode, EncodingConfig};
use dualphase::field::field_from_polar;
use dualphase::optics::{default_cutoff, propagate, FilterSpec, OpticalTrain};
use dualphase::slm::{render, CrosstalkModel};
use dualphase::testfields::band_limited_field;
use dualphase::{Complex64, GridSize};

fn relative_l2(reference: &[Complex64], test: &[Complex64]) -> f64 {
    let num: f64 = reference.iter().zip(test).map(|(a, b)| (a - b).norm_sqr()).sum();
    let den: f64 = reference.iter().map(|a| a.norm_sqr()).sum();
    (num / den).sqrt()
}

#[test]
fn filtered_hologram_reproduces_band_limited_field() {
    let size = GridSize::new(200, 200);
    for cell in [1, 2, 4, 5, 10] {
        let cutoff = default_cutoff(cell, false);
        let (amp, phase) = band_limited_field(size, 0.8 * cutoff, 1.0, 0.6, 11).unwrap();
        let alpha = encode(&amp, &phase, &EncodingConfig::new(cell)).unwrap();
        let slm = render(&alpha, cell, &CrosstalkModel::ideal(1).unwrap()).unwrap();
        let out = propagate(&slm, &FilterSpec::new(cutoff), &OpticalTrain::new(1)).unwrap();

        // Each pair of cells sums two unit waves, so the zero order carries half the field.
        let expected: Vec<Complex64> = field_from_polar(&amp, &phase)
            .unwrap()
            .as_slice()
            .iter()
            .map(|z| z * 0.5)
            .collect();
        let err = relative_l2(&expected, out.as_slice());
        assert!(err < 0.01, "cell {cell}: relative error {err}");
    }
}

#[test]
fn upsampled_render_gives_the_same_zero_order() {
    let size = GridSize::new(64, 64);
    let cell = 2;
    let cutoff = default_cutoff(cell, false);
    let (amp, phase) = band_limited_field(size, 0.8 * cutoff, 1.0, 0.5, 5).unwrap();
    let alpha = encode(&amp, &phase, &EncodingConfig::new(cell)).unwrap();
    let coarse = propagate(
        &render(&alpha, cell, &CrosstalkModel::ideal(1).unwrap()).unwrap(),
        &FilterSpec::new(cutoff),
        &OpticalTrain::new(1),
    )
    .unwrap();
    let fine = propagate(
        &render(&alpha, cell, &CrosstalkModel::ideal(4).unwrap()).unwrap(),
        &FilterSpec::new(cutoff),
        &OpticalTrain::new(4),
    )
    .unwrap();
    // Block means undo the upsampling up to the pixel aperture's mild low-pass.
    let fine_means: Vec<Complex64> = (0..64)
        .flat_map(|r| (0..64).map(move |c| (r, c)))
        .map(|(r, c)| {
            let mut acc = Complex64::default();
            for dr in 0..4 {
                for dc in 0..4 {
                    acc += fine.get(4 * r + dr, 4 * c + dc);
                }
            }
            acc / 16.0
        })
        .collect();
    let err = relative_l2(coarse.as_slice(), &fine_means);
    assert!(err < 0.02, "relative error {err}");
}

//! Deterministic synthetic test images, seeded with ChaCha8.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure, Result};
use crate::fft::{ifft2, signed_bin};
use crate::field::{AmplitudeMap, Grid, GridSize, PhaseElement, A_MAX};

/// Zero-mean complex field whose spectrum is confined to a disk of
/// `radius` cycles/pixel, scaled to a peak modulus of 1.
pub fn band_limited_noise(size: GridSize, radius: f64, seed: u64) -> Result<Grid<Complex64>> {
    ensure!(size.width >= 2 && size.height >= 2, "test field must be at least 2x2");
    ensure!(radius > 0.0, "band radius must be positive");
    let (w, h) = (size.width, size.height);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spectrum = vec![Complex64::default(); w * h];
    let mut any = false;
    for row in 0..h {
        let v = signed_bin(row, h) as f64 / h as f64;
        for col in 0..w {
            let u = signed_bin(col, w) as f64 / w as f64;
            // Draw for every bin so the sequence does not depend on the radius.
            let z = Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(-PI..PI));
            let r2 = u * u + v * v;
            if r2 > 0.0 && r2 < radius * radius {
                spectrum[row * w + col] = z;
                any = true;
            }
        }
    }
    ensure!(any, "band radius {radius} admits no non-DC frequency on a {w}x{h} grid");
    ifft2(&mut spectrum, w, h);
    let peak = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Grid::from_vec(w, h, spectrum.into_iter().map(|z| z / peak).collect())
}

/// Band-limited complex field `mean + depth·n(x, y)` split into amplitude and phase.
///
/// With `depth < mean` the amplitude stays within `[mean − depth, mean + depth]`.
pub fn band_limited_field(
    size: GridSize,
    radius: f64,
    mean: f64,
    depth: f64,
    seed: u64,
) -> Result<(AmplitudeMap, PhaseElement)> {
    ensure!(
        mean + depth <= A_MAX && depth >= 0.0 && mean >= 0.0,
        "mean {mean} + depth {depth} exceeds the encodable range"
    );
    let noise = band_limited_noise(size, radius, seed)?;
    let field = noise.map(|z| mean + depth * z);
    let amplitude = AmplitudeMap::new(field.map(|z| z.norm().min(A_MAX)))?;
    let phase = PhaseElement::from_grid(field.map(|z| z.arg()))?;
    Ok((amplitude, phase))
}

/// Amplitude test chart: a few low-frequency periodic gratings and rings,
/// mapped into `[0.1·A_max, 0.9·A_max]`. Every component is an exact DFT
/// harmonic with radius below `radius` cycles/pixel.
pub fn amplitude_chart(size: GridSize, radius: f64, seed: u64) -> Result<AmplitudeMap> {
    let noise = band_limited_noise(size, radius, seed)?;
    let (w, h) = (size.width, size.height);
    let fx = ((radius * 0.5 * w as f64).floor().max(1.0)) / w as f64;
    let fy = ((radius * 0.5 * h as f64).floor().max(1.0)) / h as f64;
    let raw = Grid::from_fn(w, h, |r, c| {
        let bars = (TAU * fx * c as f64).cos() * (TAU * fy * r as f64).cos();
        0.6 * bars + 0.4 * noise.get(r, c).re
    });
    let (lo, hi) = raw
        .as_slice()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    AmplitudeMap::new(raw.map(|&v| A_MAX * (0.1 + 0.8 * (v - lo) / (hi - lo))))
}

/// Smooth phase pattern: a gentle tilt plus two Gaussian blobs, within `(-π, π]`.
pub fn phase_chart(size: GridSize, seed: u64) -> Result<PhaseElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let (w, h) = (size.width as f64, size.height as f64);
    let blobs: Vec<(f64, f64, f64, f64)> = (0..2)
        .map(|k| {
            let sign = if k == 0 { 1.0 } else { -1.0 };
            (
                rng.gen_range(0.25..0.75) * h,
                rng.gen_range(0.25..0.75) * w,
                rng.gen_range(0.08..0.15) * w.min(h),
                sign * rng.gen_range(0.8..1.4),
            )
        })
        .collect();
    PhaseElement::from_fn(size.width, size.height, |r, c| {
        let tilt = 0.8 * ((TAU * c as f64 / w).sin() + (TAU * r as f64 / h).cos()) / 2.0;
        let bumps: f64 = blobs
            .iter()
            .map(|&(br, bc, sigma, height)| {
                let d2 = (r as f64 - br).powi(2) + (c as f64 - bc).powi(2);
                height * (-d2 / (2.0 * sigma * sigma)).exp()
            })
            .sum();
        tilt + bumps
    })
}

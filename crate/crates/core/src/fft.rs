//! Two-dimensional FFTs over row-major complex buffers, backed by `rustfft`.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

/// Unnormalized forward 2-D DFT, in place.
pub fn fft2(data: &mut [Complex64], width: usize, height: usize) {
    transform(data, width, height, FftDirection::Forward);
}

/// Inverse 2-D DFT normalized by `1 / (width·height)`, in place.
pub fn ifft2(data: &mut [Complex64], width: usize, height: usize) {
    transform(data, width, height, FftDirection::Inverse);
    let scale = 1.0 / (width * height) as f64;
    data.par_iter_mut().for_each(|z| *z *= scale);
}

/// Signed frequency index of DFT bin `k` on an axis of length `n`.
pub fn signed_bin(k: usize, n: usize) -> i64 {
    if k < n.div_ceil(2) {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

fn transform(data: &mut [Complex64], width: usize, height: usize, direction: FftDirection) {
    assert_eq!(data.len(), width * height, "buffer does not match {width}x{height}");
    let mut planner = FftPlanner::new();
    let rows = planner.plan_fft(width, direction);
    let cols = planner.plan_fft(height, direction);

    data.par_chunks_mut(width).for_each_init(
        || vec![Complex64::default(); rows.get_inplace_scratch_len()],
        |scratch, row| rows.process_with_scratch(row, scratch),
    );

    let mut transposed = transpose(data, width, height);
    transposed.par_chunks_mut(height).for_each_init(
        || vec![Complex64::default(); cols.get_inplace_scratch_len()],
        |scratch, col| cols.process_with_scratch(col, scratch),
    );
    let back = transpose(&transposed, height, width);
    data.copy_from_slice(&back);
}

fn transpose(data: &[Complex64], width: usize, height: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); data.len()];
    out.par_chunks_mut(height).enumerate().for_each(|(col, dst)| {
        for (row, d) in dst.iter_mut().enumerate() {
            *d = data[row * width + col];
        }
    });
    out
}

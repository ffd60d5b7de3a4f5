//! 4f imaging train: forward spectrum, hard circular iris, inverse spectrum.
//!
//! Frequencies are expressed in cycles per SLM pixel so that iris sizes do
//! not depend on the sub-pixel upsampling used for rendering.

use std::f64::consts::SQRT_2;

use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::fft::{fft2, ifft2, signed_bin};
use crate::field::{ComplexField, Grid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    /// Iris radius, cycles per SLM pixel.
    pub cutoff: f64,
    /// Iris centre along the column axis, cycles per SLM pixel.
    pub center_u: f64,
    /// Iris centre along the row axis, cycles per SLM pixel.
    pub center_v: f64,
}

impl FilterSpec {
    pub fn new(cutoff: f64) -> Self {
        Self {
            cutoff,
            center_u: 0.0,
            center_v: 0.0,
        }
    }

    pub fn centered_at(mut self, u: f64, v: f64) -> Self {
        self.center_u = u;
        self.center_v = v;
        self
    }

    /// Largest meaningful radius: the corner of the sub-pixel spectrum.
    pub fn max_cutoff(upsample: usize) -> f64 {
        0.5 * SQRT_2 * upsample as f64
    }

    pub fn validate(&self, upsample: usize) -> Result<()> {
        let max = Self::max_cutoff(upsample);
        ensure!(
            self.cutoff > 0.0 && self.cutoff <= max,
            "cutoff {} outside (0, {max}] cycles/pixel for upsample {upsample}",
            self.cutoff
        );
        ensure!(
            self.center_u.is_finite() && self.center_v.is_finite(),
            "iris centre must be finite"
        );
        Ok(())
    }

    pub fn passes(&self, u: f64, v: f64) -> bool {
        let (du, dv) = (u - self.center_u, v - self.center_v);
        du * du + dv * dv <= self.cutoff * self.cutoff
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpticalTrain {
    /// Sub-pixels per SLM pixel; must match the renderer.
    pub upsample: usize,
    /// Point-reflect the output image, as a physical 4f system does.
    pub flip_output: bool,
}

impl OpticalTrain {
    pub fn new(upsample: usize) -> Self {
        Self {
            upsample,
            flip_output: false,
        }
    }
}

/// Iris radius that passes the zero order and blocks the first order of the
/// finest multiplex grating: half of its fundamental frequency.
pub fn default_cutoff(cell: usize, m3_active: bool) -> f64 {
    let period = if m3_active { 4 * cell } else { 2 * cell };
    0.5 / period as f64
}

/// Low-pass the field through the iris and return the image-plane field.
pub fn propagate(field: &ComplexField, filter: &FilterSpec, train: &OpticalTrain) -> Result<ComplexField> {
    ensure!(train.upsample >= 1, "upsample must be >= 1");
    ensure!(
        field.width() >= 4 && field.height() >= 4,
        "propagate needs at least a 4x4 field, got {}x{}",
        field.width(),
        field.height()
    );
    filter.validate(train.upsample)?;

    let (w, h) = (field.width(), field.height());
    let up = train.upsample as f64;
    let mut data = field.as_slice().to_vec();
    fft2(&mut data, w, h);

    data.par_chunks_mut(w).enumerate().for_each(|(row, spectrum)| {
        let v = signed_bin(row, h) as f64 * up / h as f64;
        for (col, z) in spectrum.iter_mut().enumerate() {
            let u = signed_bin(col, w) as f64 * up / w as f64;
            if !filter.passes(u, v) {
                *z = Default::default();
            }
        }
    });
    ifft2(&mut data, w, h);

    if train.flip_output {
        let flipped = Grid::from_fn(w, h, |r, c| data[((h - r) % h) * w + (w - c) % w]);
        return ComplexField::new(flipped);
    }
    ComplexField::new(Grid::from_vec(w, h, data)?)
}

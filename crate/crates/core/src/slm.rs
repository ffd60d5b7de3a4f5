//! Phase-only SLM rendering with a two-zone pixel crosstalk model.
//!
//! Each multiplex cell of `cell × cell` SLM pixels is drawn on a sub-pixel
//! grid with `L = cell·upsample` samples per side. A concentric central
//! square of side `s = round(L·sqrt(1 − η))` shows the programmed phase; the
//! surrounding frame shows `border_factor` times that phase.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::field::{ComplexField, Grid, PhaseElement};

pub const DEFAULT_UPSAMPLE: usize = 16;
pub const DEFAULT_BORDER_FACTOR: f64 = 0.5;

/// Crosstalk ratios fitted for 1-, 4- and 10-pixel cells.
pub const FITTED_ETAS: [(usize, f64); 3] = [(1, 0.73), (4, 0.22), (10, 0.09)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrosstalkModel {
    /// Border area divided by total cell area, in `[0, 1)`.
    pub eta: f64,
    /// Sub-pixels per SLM pixel side.
    pub upsample: usize,
    /// Multiplier applied to the phase in the border frame.
    pub border_factor: f64,
}

impl CrosstalkModel {
    pub fn new(eta: f64, upsample: usize) -> Result<Self> {
        Self::with_border_factor(eta, upsample, DEFAULT_BORDER_FACTOR)
    }

    pub fn with_border_factor(eta: f64, upsample: usize, border_factor: f64) -> Result<Self> {
        ensure!((0.0..1.0).contains(&eta), "eta must lie in [0, 1), got {eta}");
        ensure!(upsample >= 1, "upsample must be >= 1");
        ensure!(
            (0.0..=1.0).contains(&border_factor),
            "border factor must lie in [0, 1], got {border_factor}"
        );
        Ok(Self {
            eta,
            upsample,
            border_factor,
        })
    }

    /// Crosstalk-free device.
    pub fn ideal(upsample: usize) -> Result<Self> {
        Self::new(0.0, upsample)
    }
}

/// Geometry of one rendered cell, in sub-pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellZones {
    /// Cell side `L`.
    pub side: usize,
    /// Central square side `s`.
    pub center: usize,
    /// Offset of the central square from the cell's top/left edge.
    pub offset: usize,
}

impl CellZones {
    pub fn new(cell: usize, model: &CrosstalkModel) -> Result<Self> {
        ensure!(cell >= 1, "cell must be >= 1");
        let side = cell * model.upsample;
        if model.eta == 0.0 {
            return Ok(Self {
                side,
                center: side,
                offset: 0,
            });
        }
        ensure!(
            side >= 2,
            "eta = {} needs at least 2 sub-pixels per cell side, got cell {cell} x upsample {}",
            model.eta,
            model.upsample
        );
        let center = (side as f64 * (1.0 - model.eta).sqrt() + 0.5).floor() as usize;
        ensure!(
            center >= 1,
            "eta = {} leaves no central zone in a {side}-sub-pixel cell",
            model.eta
        );
        let center = center.min(side);
        // Odd leftovers go to the right/bottom border.
        Ok(Self {
            side,
            center,
            offset: (side - center) / 2,
        })
    }

    pub fn in_center(&self, local_row: usize, local_col: usize) -> bool {
        let range = self.offset..self.offset + self.center;
        range.contains(&local_row) && range.contains(&local_col)
    }

    /// Border area fraction actually drawn.
    pub fn realized_eta(&self) -> f64 {
        1.0 - (self.center * self.center) as f64 / (self.side * self.side) as f64
    }
}

/// Border fraction actually drawn by [`render`] after rounding the central square.
pub fn realized_eta(cell: usize, model: &CrosstalkModel) -> Result<f64> {
    Ok(CellZones::new(cell, model)?.realized_eta())
}

/// Draw `α` on the sub-pixel grid with the two-zone crosstalk response.
///
/// The output is `(width·upsample) × (height·upsample)` with unit modulus everywhere.
pub fn render(alpha: &PhaseElement, cell: usize, model: &CrosstalkModel) -> Result<ComplexField> {
    let zones = CellZones::new(cell, model)?;
    ensure!(
        alpha.width().is_multiple_of(cell) && alpha.height().is_multiple_of(cell),
        "grid {}x{} is not a multiple of cell {cell}",
        alpha.width(),
        alpha.height()
    );
    let up = model.upsample;
    let (w, h) = (alpha.width() * up, alpha.height() * up);
    ensure!(w >= 2 && h >= 2, "rendered grid {w}x{h} is too small");

    let center: Vec<Complex64> = alpha.as_slice().iter().map(|&a| Complex64::cis(a)).collect();
    let border: Vec<Complex64> = alpha
        .as_slice()
        .iter()
        .map(|&a| Complex64::cis(model.border_factor * a))
        .collect();
    let slm_width = alpha.width();

    let mut data = vec![Complex64::default(); w * h];
    data.par_chunks_mut(w).enumerate().for_each(|(row, out)| {
        let slm_row = row / up;
        let local_row = row % zones.side;
        for (col, value) in out.iter_mut().enumerate() {
            let idx = slm_row * slm_width + col / up;
            *value = if zones.in_center(local_row, col % zones.side) {
                center[idx]
            } else {
                border[idx]
            };
        }
    });
    Ok(ComplexField::from_grid_unchecked(Grid::from_vec(w, h, data)?))
}

/// Crosstalk ratio for a cell size, assuming a fringe of fixed physical width.
///
/// The fitted ratios for 1-, 4- and 10-pixel cells all correspond to a
/// border strip of about 0.24 pixel per side; other cell sizes use that strip
/// width, fitted cell sizes return the fitted value.
pub fn fringe_eta(cell: usize) -> f64 {
    if let Some(&(_, eta)) = FITTED_ETAS.iter().find(|(c, _)| *c == cell) {
        return eta;
    }
    let strip = (1.0 - (1.0 - FITTED_ETAS[0].1).sqrt()) / 2.0;
    let inner = (1.0 - 2.0 * strip / cell as f64).max(0.0);
    1.0 - inner * inner
}

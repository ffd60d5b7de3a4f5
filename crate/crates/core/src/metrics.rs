//! Image quality metrics and crosstalk calibration from irradiance sweeps.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{ensure, Result};
use crate::field::{wrap, BinaryMask, Grid, GridSize, PhaseElement};
use crate::optics::{default_cutoff, FilterSpec};
use crate::retrieval::{flat_sweep, SweepResult};
use crate::slm::{CrosstalkModel, DEFAULT_BORDER_FACTOR, DEFAULT_UPSAMPLE};

/// Least-squares scale `s*` minimizing `Σ(a_ref − s·a_test)²`.
pub fn least_squares_scale(a_ref: &[f64], a_test: &[f64]) -> f64 {
    let num: f64 = a_ref.iter().zip(a_test).map(|(r, t)| r * t).sum();
    let den: f64 = a_test.iter().map(|t| t * t).sum();
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Amplitude rmse in percent of the reference dynamic range, after
/// least-squares rescaling of `a_test`.
pub fn rmse_amplitude(a_ref: &Grid<f64>, a_test: &Grid<f64>) -> Result<f64> {
    a_ref.same_size(a_test, "rmse_amplitude")?;
    let (lo, hi) = a_ref
        .as_slice()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    ensure!(hi - lo > 0.0, "reference amplitude is constant; rmse is undefined");
    let s = least_squares_scale(a_ref.as_slice(), a_test.as_slice());
    let mse = a_ref
        .as_slice()
        .iter()
        .zip(a_test.as_slice())
        .map(|(r, t)| (r - s * t).powi(2))
        .sum::<f64>()
        / a_ref.as_slice().len() as f64;
    Ok(mse.sqrt() / (hi - lo) * 100.0)
}

/// Circular mean of `wrap(p_test − p_ref)` over the support.
pub fn phase_piston(p_ref: &PhaseElement, p_test: &PhaseElement, support: &BinaryMask) -> Result<f64> {
    p_ref.grid().same_size(p_test.grid(), "phase_piston")?;
    p_ref.grid().same_size(support.bits(), "phase_piston")?;
    ensure!(support.count_ones() > 0, "phase support is empty");
    let sum: Complex64 = p_ref
        .as_slice()
        .iter()
        .zip(p_test.as_slice())
        .zip(support.bits().as_slice())
        .filter(|(_, &inside)| inside)
        .map(|((r, t), _)| Complex64::cis(t - r))
        .sum();
    Ok(sum.arg())
}

/// Phase rmse in percent of `2π`, after removing the circular-mean piston.
pub fn rmse_phase(p_ref: &PhaseElement, p_test: &PhaseElement, support: &BinaryMask) -> Result<f64> {
    let piston = phase_piston(p_ref, p_test, support)?;
    let (sum, n) = p_ref
        .as_slice()
        .iter()
        .zip(p_test.as_slice())
        .zip(support.bits().as_slice())
        .filter(|(_, &inside)| inside)
        .fold((0.0, 0usize), |(sum, n), ((r, t), _)| {
            let d = wrap(wrap(t - r) - piston);
            (sum + d * d, n + 1)
        });
    Ok((sum / n as f64).sqrt() / TAU * 100.0)
}

/// Pixels where the reference amplitude exceeds `floor`.
pub fn support_from_amplitude(amplitude: &Grid<f64>, floor: f64) -> Result<BinaryMask> {
    BinaryMask::new(amplitude.map(|&a| a > floor), 1)
}

/// Shift `p_test` by the piston that best aligns it with `p_ref`.
pub fn align_phase(p_ref: &PhaseElement, p_test: &PhaseElement, support: &BinaryMask) -> Result<PhaseElement> {
    let piston = phase_piston(p_ref, p_test, support)?;
    PhaseElement::from_grid(p_test.grid().map(|&p| p - piston))
}

/// Root-mean-square difference of two curves sampled at the same points.
pub fn curve_rmse(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64).sqrt()
}

/// Simulation settings for model curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimParams {
    pub grid: GridSize,
    pub upsample: usize,
    pub border_factor: f64,
    /// Iris radius in cycles/pixel; `None` uses [`default_cutoff`].
    pub cutoff: Option<f64>,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            grid: GridSize::new(512, 512),
            upsample: DEFAULT_UPSAMPLE,
            border_factor: DEFAULT_BORDER_FACTOR,
            cutoff: None,
        }
    }
}

impl SimParams {
    /// Upsampling fine enough that one sub-pixel of rounding moves the
    /// realized crosstalk ratio by well under 0.02.
    pub fn for_calibration(cell: usize) -> Self {
        Self {
            upsample: calibration_upsample(cell),
            ..Self::default()
        }
    }

    pub fn filter(&self, cell: usize) -> FilterSpec {
        FilterSpec::new(self.cutoff.unwrap_or_else(|| default_cutoff(cell, false)))
    }
}

/// At least [`DEFAULT_UPSAMPLE`], and at least 128 sub-pixels per cell side.
pub fn calibration_upsample(cell: usize) -> usize {
    DEFAULT_UPSAMPLE.max(128usize.div_ceil(cell.max(1)))
}

/// Simulated sweep for a given crosstalk ratio.
pub fn model_curve(betas: &[f64], cell: usize, eta: f64, sim: &SimParams) -> Result<SweepResult> {
    let model = CrosstalkModel::with_border_factor(eta, sim.upsample, sim.border_factor)?;
    flat_sweep(betas, cell, &model, &sim.filter(cell), sim.grid)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub eta_hat: f64,
    /// Rmse between the fitted model and the data, normalized irradiance units.
    pub fit_rmse: f64,
    pub evaluations: usize,
}

/// Coarse step of the initial grid scan.
pub const FIT_GRID_STEP: f64 = 0.01;
/// Final bracket width of the golden-section refinement.
pub const FIT_TOLERANCE: f64 = 1e-3;
/// Largest crosstalk ratio the fit may explore.
pub const FIT_ETA_LIMIT: f64 = 0.95;

/// Fit the crosstalk ratio to a measured sweep: grid scan then golden section.
pub fn fit_eta(measured: &SweepResult, cell: usize, search: (f64, f64), sim: &SimParams) -> Result<FitResult> {
    ensure!(!measured.is_empty(), "measured sweep is empty");
    let (lo, hi) = search;
    ensure!(
        0.0 <= lo && lo <= hi && hi <= FIT_ETA_LIMIT,
        "search interval [{lo}, {hi}] must lie within [0, {FIT_ETA_LIMIT}]"
    );
    let objective = |eta: f64| -> Result<f64> {
        let model = model_curve(&measured.betas, cell, eta, sim)?;
        Ok(curve_rmse(&model.irradiance, &measured.irradiance))
    };

    let steps = ((hi - lo) / FIT_GRID_STEP).round() as usize;
    let grid: Vec<f64> = (0..=steps).map(|k| (lo + k as f64 * FIT_GRID_STEP).min(hi)).collect();
    let scores: Vec<f64> = grid.par_iter().map(|&eta| objective(eta)).collect::<Result<_>>()?;
    let mut evaluations = grid.len();
    let (best_idx, &best_score) = scores
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid scan has at least one point");

    let a = (grid[best_idx] - FIT_GRID_STEP).max(lo);
    let b = (grid[best_idx] + FIT_GRID_STEP).min(hi);
    let (x, fx, n) = golden_section(objective, a, b, FIT_TOLERANCE)?;
    evaluations += n;

    let (eta_hat, fit_rmse) = if fx < best_score {
        (x, fx)
    } else {
        (grid[best_idx], best_score)
    };
    Ok(FitResult {
        eta_hat,
        fit_rmse,
        evaluations,
    })
}

/// Golden-section minimization on `[a, b]` until the bracket is narrower than `tol`.
///
/// Returns `(x_min, f_min, evaluations)`.
pub fn golden_section(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64, usize)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    if b - a < tol {
        let x = 0.5 * (a + b);
        return Ok((x, f(x)?, 1));
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut evals = 2;
    while b - a >= tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
        evals += 1;
    }
    Ok(if f1 <= f2 { (x1, f1, evals) } else { (x2, f2, evals) })
}

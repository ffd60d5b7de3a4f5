//! Camera model, flat-amplitude sweeps and four-step phase-shifting retrieval.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::encoder::{add_blazed, add_piston, carve_reference, decompose, multiplex, EncodingConfig};
use crate::error::{ensure, Result};
use crate::field::{make_checkerboard, wrap, AmplitudeMap, ComplexField, Grid, GridSize, Parity, PhaseElement};
use crate::optics::{default_cutoff, propagate, FilterSpec, OpticalTrain};
use crate::slm::{render, CellZones, CrosstalkModel};

/// Fewest grating periods a sweep grid must hold along each side.
pub const MIN_SWEEP_PERIODS: usize = 8;

/// Default number of β samples across `[0, π]`.
pub const DEFAULT_BETA_SAMPLES: usize = 64;

/// Camera frame at SLM resolution together with the piston used to record it.
#[derive(Debug, Clone, PartialEq)]
pub struct Interferogram {
    irradiance: Grid<f64>,
    piston: f64,
}

impl Interferogram {
    pub fn new(irradiance: Grid<f64>, piston: f64) -> Result<Self> {
        ensure!(
            irradiance.as_slice().iter().all(|&i| i >= 0.0 && i.is_finite()),
            "interferogram irradiance must be finite and non-negative"
        );
        ensure!(piston.is_finite(), "piston must be finite");
        Ok(Self { irradiance, piston })
    }

    pub fn irradiance(&self) -> &Grid<f64> {
        &self.irradiance
    }

    pub fn piston(&self) -> f64 {
        self.piston
    }
}

/// Normalized on-axis irradiance against the flat-amplitude parameter β.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub betas: Vec<f64>,
    pub irradiance: Vec<f64>,
}

impl SweepResult {
    pub fn new(betas: Vec<f64>, irradiance: Vec<f64>) -> Result<Self> {
        ensure!(
            betas.len() == irradiance.len(),
            "sweep has {} betas but {} irradiance values",
            betas.len(),
            irradiance.len()
        );
        ensure!(
            betas.iter().chain(&irradiance).all(|x| x.is_finite()),
            "sweep contains non-finite values"
        );
        ensure!(
            irradiance.iter().all(|&i| i >= 0.0),
            "sweep irradiance must be non-negative"
        );
        Ok(Self { betas, irradiance })
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }
}

/// `n` evenly spaced samples of `[0, π]`, endpoints included.
pub fn beta_samples(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| PI * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Energy-averaging detector: each output pixel is the mean of `|u|²`
/// over its `upsample × upsample` block.
pub fn camera_image(field: &ComplexField, upsample: usize) -> Result<Grid<f64>> {
    ensure!(upsample >= 1, "upsample must be >= 1");
    ensure!(
        field.width().is_multiple_of(upsample) && field.height().is_multiple_of(upsample),
        "field {}x{} is not divisible by upsample {upsample}",
        field.width(),
        field.height()
    );
    let (w, h) = (field.width() / upsample, field.height() / upsample);
    let src = field.as_slice();
    let fw = field.width();
    let norm = 1.0 / (upsample * upsample) as f64;
    let mut out = vec![0.0; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(row, dst)| {
        for (col, d) in dst.iter_mut().enumerate() {
            let mut acc = 0.0;
            for sr in row * upsample..(row + 1) * upsample {
                let base = sr * fw + col * upsample;
                acc += src[base..base + upsample].iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
            *d = acc * norm;
        }
    });
    Grid::from_vec(w, h, out)
}

/// Half-open `[start, end)` range covering the central half of an axis.
pub fn central_window(len: usize) -> std::ops::Range<usize> {
    let start = len / 4;
    let span = (len / 2).max(1);
    start..(start + span).min(len)
}

/// Uniform flat-amplitude hologram: `+β` on the even cells, `-β` on the odd ones.
pub fn flat_hologram(size: GridSize, cell: usize, beta: f64) -> Result<PhaseElement> {
    let plus = PhaseElement::uniform(size.width, size.height, beta)?;
    let minus = PhaseElement::uniform(size.width, size.height, -beta)?;
    multiplex(&plus, &minus, cell)
}

/// Simulate the flat-amplitude β sweep on `grid` and return the central-window
/// irradiance normalized to its maximum over the sweep.
///
/// The grid is cropped to a whole number of multiplex periods (`2·cell`),
/// which makes the hologram exactly periodic on the DFT grid. The optics are
/// therefore evaluated on the smallest periodic tile and read back modulo the
/// tile; this gives the same image as simulating the whole grid.
///
/// A flat hologram rendered with crosstalk is a sum of four zone indicators
/// (centre and border of the `+β` and `-β` cells) weighted by unit phasors.
/// Each indicator is filtered once; every β then reduces to a 4×4 Hermitian
/// form over the camera window.
pub fn flat_sweep(
    betas: &[f64],
    cell: usize,
    model: &CrosstalkModel,
    filter: &FilterSpec,
    grid: GridSize,
) -> Result<SweepResult> {
    ensure!(cell >= 1, "cell must be >= 1");
    ensure!(
        betas.iter().all(|b| (0.0..=PI).contains(b)),
        "sweep betas must lie in [0, π]"
    );
    filter.validate(model.upsample)?;
    let zones = CellZones::new(cell, model)?;
    let period = 2 * cell;
    let cropped = grid.floor_to_multiple(period);
    ensure!(
        cropped.width / period >= MIN_SWEEP_PERIODS && cropped.height / period >= MIN_SWEEP_PERIODS,
        "grid {}x{} holds fewer than {MIN_SWEEP_PERIODS} periods of a {cell}-pixel cell grating",
        grid.width,
        grid.height
    );
    let up = model.upsample;
    let tile = if period * up >= 4 { period } else { 2 * period };
    let m1 = make_checkerboard(tile, tile, cell, Parity::Even)?;
    let train = OpticalTrain::new(up);
    let n = tile * up;

    // Zone order: (+β, centre), (+β, border), (−β, centre), (−β, border).
    let basis: Vec<ComplexField> = (0..4)
        .into_par_iter()
        .map(|k| {
            let indicator = ComplexField::from_fn(n, n, |r, c| {
                let plus = m1.get(r / up, c / up);
                let center = zones.in_center(r % zones.side, c % zones.side);
                let zone = 2 * usize::from(!plus) + usize::from(!center);
                if zone == k {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::default()
                }
            })?;
            propagate(&indicator, filter, &train)
        })
        .collect::<Result<_>>()?;

    // How often each tile pixel is visited by the central window.
    let rows = central_window(cropped.height);
    let cols = central_window(cropped.width);
    let mut row_hits = vec![0.0; tile];
    let mut col_hits = vec![0.0; tile];
    rows.clone().for_each(|r| row_hits[r % tile] += 1.0);
    cols.clone().for_each(|c| col_hits[c % tile] += 1.0);
    let norm = (up * up * rows.len() * cols.len()) as f64;

    let mut gram = [[Complex64::default(); 4]; 4];
    for r in 0..n {
        for c in 0..n {
            let weight = row_hits[r / up] * col_hits[c / up] / norm;
            if weight == 0.0 {
                continue;
            }
            let g: [Complex64; 4] = std::array::from_fn(|k| basis[k].get(r, c));
            for k in 0..4 {
                for l in 0..4 {
                    gram[k][l] += g[k].conj() * g[l] * weight;
                }
            }
        }
    }

    let raw: Vec<f64> = betas
        .iter()
        .map(|&beta| {
            let (plus, minus) = (wrap(beta), wrap(-beta));
            let coeff = [
                Complex64::cis(plus),
                Complex64::cis(model.border_factor * plus),
                Complex64::cis(minus),
                Complex64::cis(model.border_factor * minus),
            ];
            let mut acc = Complex64::default();
            for k in 0..4 {
                for l in 0..4 {
                    acc += coeff[k].conj() * gram[k][l] * coeff[l];
                }
            }
            acc.re.max(0.0)
        })
        .collect();

    let peak = raw.iter().copied().fold(0.0, f64::max);
    let irradiance = if peak > 0.0 {
        raw.iter().map(|v| v / peak).collect()
    } else {
        raw
    };
    SweepResult::new(betas.to_vec(), irradiance)
}

/// Pistons the four interferograms must carry, in order.
pub const FOUR_STEP_PISTONS: [f64; 4] = [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2];

/// Object field relative to a unit flat reference:
/// `O = [(I0 − I2) + i·(I3 − I1)] / 4`.
pub fn four_step_retrieve(frames: &[Interferogram; 4]) -> Result<ComplexField> {
    for (k, (frame, expected)) in frames.iter().zip(FOUR_STEP_PISTONS).enumerate() {
        ensure!(
            wrap(frame.piston - expected).abs() < 1e-9,
            "interferogram {k} has piston {} but {expected} is required",
            frame.piston
        );
        frames[0]
            .irradiance
            .same_size(&frame.irradiance, "four_step_retrieve")?;
    }
    let [i0, i1, i2, i3] = frames.each_ref().map(|f| f.irradiance.as_slice());
    let data = (0..i0.len())
        .map(|k| Complex64::new(i0[k] - i2[k], i3[k] - i1[k]) * 0.25)
        .collect();
    let size = frames[0].irradiance.size();
    ComplexField::new(Grid::from_vec(size.width, size.height, data)?)
}

/// Output of the encode → filter → phase-shifting chain, at SLM resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Retrieved {
    pub field: ComplexField,
    pub amplitude: Grid<f64>,
    pub phase: PhaseElement,
}

fn pipeline_filter(cfg: &EncodingConfig, m3_active: bool) -> FilterSpec {
    let (u, v) = cfg.carrier_frequency();
    FilterSpec::new(default_cutoff(cfg.cell, m3_active)).centered_at(u, v)
}

fn check_stack(cfg: &EncodingConfig, model: &CrosstalkModel, train: &OpticalTrain) -> Result<()> {
    cfg.validate()?;
    ensure!(
        model.upsample == train.upsample,
        "renderer upsample {} differs from optical train upsample {}",
        model.upsample,
        train.upsample
    );
    Ok(())
}

fn image_through_train(
    alpha: &PhaseElement,
    cfg: &EncodingConfig,
    model: &CrosstalkModel,
    train: &OpticalTrain,
    filter: &FilterSpec,
) -> Result<Grid<f64>> {
    let alpha = if cfg.blazed_period > 0 {
        add_blazed(alpha, cfg.blazed_period, cfg.blazed_axis)?
    } else {
        alpha.clone()
    };
    let field = render(&alpha, cfg.cell, model)?;
    let image = propagate(&field, filter, train)?;
    camera_image(&image, train.upsample)
}

/// Record the four phase-shifted interferograms of a carved hologram.
pub fn record_interferograms(
    carved: &PhaseElement,
    m3: &crate::field::BinaryMask,
    cfg: &EncodingConfig,
    model: &CrosstalkModel,
    train: &OpticalTrain,
    filter: &FilterSpec,
) -> Result<[Interferogram; 4]> {
    check_stack(cfg, model, train)?;
    let frames: Vec<Interferogram> = FOUR_STEP_PISTONS
        .par_iter()
        .map(|&delta| {
            let shifted = add_piston(carved, m3, delta)?;
            let camera = image_through_train(&shifted, cfg, model, train, filter)?;
            Interferogram::new(camera, delta)
        })
        .collect::<Result<_>>()?;
    Ok(frames.try_into().expect("four pistons yield four frames"))
}

/// Encode a complex field, carve the reference grating, record four
/// phase-shifted interferograms through the filtered 4f train and invert them.
pub fn encode_retrieve_pipeline(
    amplitude: &AmplitudeMap,
    phase: &PhaseElement,
    cfg: &EncodingConfig,
    model: &CrosstalkModel,
    train: &OpticalTrain,
) -> Result<Retrieved> {
    encode_retrieve_pipeline_with_filter(amplitude, phase, cfg, model, train, None)
}

/// As [`encode_retrieve_pipeline`], with an optional iris override.
pub fn encode_retrieve_pipeline_with_filter(
    amplitude: &AmplitudeMap,
    phase: &PhaseElement,
    cfg: &EncodingConfig,
    model: &CrosstalkModel,
    train: &OpticalTrain,
    filter: Option<FilterSpec>,
) -> Result<Retrieved> {
    check_stack(cfg, model, train)?;
    ensure!(
        cfg.m3_enabled,
        "phase-shifting retrieval requires the reference grating (m3)"
    );
    let filter = filter.unwrap_or_else(|| pipeline_filter(cfg, true));
    let (theta, vartheta) = decompose(amplitude, phase)?;
    let alpha = multiplex(&theta, &vartheta, cfg.cell)?;
    let (carved, m3) = carve_reference(&alpha, cfg.cell)?;
    let frames = record_interferograms(&carved, &m3, cfg, model, train, &filter)?;
    let field = four_step_retrieve(&frames)?;
    Ok(Retrieved {
        amplitude: field.modulus(),
        phase: field.argument(),
        field,
    })
}

/// Amplitude image recorded directly by the camera (no reference grating),
/// i.e. `sqrt` of the filtered irradiance.
pub fn direct_amplitude_image(
    amplitude: &AmplitudeMap,
    phase: &PhaseElement,
    cfg: &EncodingConfig,
    model: &CrosstalkModel,
    train: &OpticalTrain,
    filter: Option<FilterSpec>,
) -> Result<Grid<f64>> {
    check_stack(cfg, model, train)?;
    let filter = filter.unwrap_or_else(|| pipeline_filter(cfg, false));
    let (theta, vartheta) = decompose(amplitude, phase)?;
    let alpha = multiplex(&theta, &vartheta, cfg.cell)?;
    let camera = image_through_train(&alpha, cfg, model, train, &filter)?;
    Ok(camera.map(|i| i.sqrt()))
}

//! Command drivers. Each command resolves and checks its whole configuration
//! before running any simulation.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::{Path, PathBuf};

use dualphase::encoder::{carve_reference, encode, Axis, EncodingConfig};
use dualphase::metrics::{
    align_phase, calibration_upsample, curve_rmse, fit_eta, least_squares_scale, rmse_amplitude, rmse_phase,
    support_from_amplitude, SimParams, FIT_ETA_LIMIT,
};
use dualphase::optics::{default_cutoff, FilterSpec, OpticalTrain};
use dualphase::retrieval::{
    beta_samples, direct_amplitude_image, encode_retrieve_pipeline_with_filter, SweepResult, DEFAULT_BETA_SAMPLES,
    MIN_SWEEP_PERIODS,
};
use dualphase::slm::{fringe_eta, realized_eta, CrosstalkModel, FITTED_ETAS};
use dualphase::testfields::{amplitude_chart, band_limited_field, phase_chart};
use dualphase::{AmplitudeMap, Grid, GridSize, PhaseElement, A_MAX};

use crate::cli::{Command, Figure};
use crate::config::{Cutoff, Settings};
use crate::curves::{load_csv_sweep, save_csv_sweep, save_table};
use crate::error::{CliError, Result};
use crate::pgm;

/// Grid used by sweeps, retrieval and reproductions when no size is given.
pub const DEFAULT_GRID: GridSize = GridSize::new(512, 512);
/// Device resolution; default for encoding synthetic images.
pub const SLM_GRID: GridSize = GridSize::new(1920, 1080);
/// Sub-pixels per SLM pixel for the full-image pipelines.
pub const PIPELINE_UPSAMPLE: usize = 4;
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUT: &str = "out";
/// Amplitude floor below which phase errors are ignored.
pub const PHASE_SUPPORT_FLOOR: f64 = 0.05;

/// Files written and human-readable summary lines.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

pub fn execute(command: &Command, settings: Settings) -> Result<Outcome> {
    match command {
        Command::Sweep => sweep(&settings),
        Command::Calibrate {
            measured,
            search_min,
            search_max,
        } => calibrate(&settings, measured, (*search_min, *search_max)),
        Command::Encode { amplitude, phase, m3 } => encode_cmd(&settings, amplitude.as_deref(), phase.as_deref(), *m3),
        Command::Retrieve { amplitude, phase } => retrieve(&settings, amplitude.as_deref(), phase.as_deref()),
        Command::Repro { figure } => match figure {
            Figure::Fig3 => fig3(&settings),
            Figure::Fig4 => fig4(&settings),
            Figure::Fig5 => fig5(&settings),
        },
    }
}

// ---- validation -------------------------------------------------------------

fn check_cell(cell: usize) -> Result<usize> {
    if cell == 0 {
        return Err(CliError::Config("cell must be >= 1".into()));
    }
    Ok(cell)
}

fn check_eta(eta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eta) {
        return Err(CliError::Config(format!("eta must lie in [0, 1), got {eta}")));
    }
    Ok(eta)
}

/// Crosstalk model for a cell, rejecting unrepresentable borders up front.
fn model_for(cell: usize, eta: f64, upsample: usize) -> Result<CrosstalkModel> {
    if upsample == 0 {
        return Err(CliError::Config("upsample must be >= 1".into()));
    }
    if eta > 0.0 && cell * upsample < 2 {
        return Err(CliError::Conflict(format!(
            "eta = {eta} needs upsample x cell >= 2 to draw a border, got {upsample} x {cell}"
        )));
    }
    let model = CrosstalkModel::new(check_eta(eta)?, upsample).map_err(|e| CliError::Conflict(e.to_string()))?;
    realized_eta(cell, &model).map_err(|e| CliError::Conflict(e.to_string()))?;
    Ok(model)
}

fn checked_filter(filter: FilterSpec, upsample: usize) -> Result<FilterSpec> {
    filter
        .validate(upsample)
        .map_err(|e| CliError::Conflict(e.to_string()))?;
    Ok(filter)
}

fn sweep_filter(cutoff: Cutoff, cell: usize, upsample: usize) -> Result<FilterSpec> {
    let radius = match cutoff {
        Cutoff::Auto => default_cutoff(cell, false),
        Cutoff::Fixed(v) => v,
    };
    checked_filter(FilterSpec::new(radius), upsample)
}

fn check_sweep_grid(size: GridSize, cell: usize) -> Result<()> {
    let cropped = size.floor_to_multiple(2 * cell);
    if cropped.width / (2 * cell) < MIN_SWEEP_PERIODS || cropped.height / (2 * cell) < MIN_SWEEP_PERIODS {
        return Err(CliError::Conflict(format!(
            "grid {}x{} holds fewer than {MIN_SWEEP_PERIODS} grating periods for cell {cell}",
            size.width, size.height
        )));
    }
    Ok(())
}

fn check_betas(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(CliError::Config(format!("betas must be >= 2, got {n}")));
    }
    Ok(beta_samples(n))
}

fn encoding_config(settings: &Settings, cell: usize, m3: bool) -> Result<EncodingConfig> {
    let cfg = EncodingConfig::new(cell)
        .with_m3(m3)
        .with_blazed(settings.blazed_period.unwrap_or(0), Axis::Horizontal);
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

/// Iris for a full-image pipeline, centred on the carrier.
fn pipeline_filter(cutoff: Cutoff, cfg: &EncodingConfig, upsample: usize) -> Result<FilterSpec> {
    let (u, v) = cfg.carrier_frequency();
    let radius = match cutoff {
        Cutoff::Auto => default_cutoff(cfg.cell, cfg.m3_enabled),
        Cutoff::Fixed(r) => r,
    };
    checked_filter(FilterSpec::new(radius).centered_at(u, v), upsample)
}

fn out_dir(settings: &Settings) -> Result<PathBuf> {
    let dir = settings.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    Ok(dir)
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// Largest grid within `size` tiled by whole blocks of every cell's reference grating.
fn synthetic_grid(size: GridSize, cells: &[usize]) -> Result<GridSize> {
    let step = cells.iter().fold(1, |acc, &c| lcm(acc, 4 * c));
    let grid = size.floor_to_multiple(step);
    if grid.width < step || grid.height < step {
        return Err(CliError::Conflict(format!(
            "grid {}x{} is smaller than one {step}-pixel reference block",
            size.width, size.height
        )));
    }
    Ok(grid)
}

fn fmt_eta(eta: f64) -> String {
    format!("{eta:.4}")
}

// ---- sweep / calibrate ------------------------------------------------------

pub fn sweep(settings: &Settings) -> Result<Outcome> {
    let cell = check_cell(settings.cell.unwrap_or(1))?;
    let eta = settings.eta.unwrap_or(0.0);
    let upsample = settings.upsample.unwrap_or_else(|| calibration_upsample(cell));
    let size = settings.size.unwrap_or(DEFAULT_GRID);
    let model = model_for(cell, eta, upsample)?;
    let filter = sweep_filter(settings.cutoff.unwrap_or_default(), cell, upsample)?;
    check_sweep_grid(size, cell)?;
    let betas = check_betas(settings.betas.unwrap_or(DEFAULT_BETA_SAMPLES))?;
    let dir = out_dir(settings)?;

    let result = dualphase::retrieval::flat_sweep(&betas, cell, &model, &filter, size)?;
    let path = dir.join(format!("sweep_cell{cell}_eta{}.csv", fmt_eta(eta)));
    save_csv_sweep(&result, &path)?;
    Ok(Outcome {
        lines: vec![format!(
            "cell {cell}, eta {eta} (realized {:.4}), upsample {upsample}: {} samples",
            realized_eta(cell, &model)?,
            result.len()
        )],
        files: vec![path],
    })
}

pub fn calibrate(settings: &Settings, measured: &Path, search: (f64, f64)) -> Result<Outcome> {
    let cell = check_cell(settings.cell.unwrap_or(1))?;
    let upsample = settings.upsample.unwrap_or_else(|| calibration_upsample(cell));
    let size = settings.size.unwrap_or(DEFAULT_GRID);
    if upsample == 0 {
        return Err(CliError::Config("upsample must be >= 1".into()));
    }
    if !(0.0 <= search.0 && search.0 <= search.1 && search.1 <= FIT_ETA_LIMIT) {
        return Err(CliError::Config(format!(
            "search interval [{}, {}] must lie within [0, {FIT_ETA_LIMIT}]",
            search.0, search.1
        )));
    }
    // Every candidate η must be drawable at this resolution.
    model_for(cell, search.1, upsample)?;
    let cutoff = settings.cutoff.unwrap_or_default();
    sweep_filter(cutoff, cell, upsample)?;
    check_sweep_grid(size, cell)?;
    let data = load_csv_sweep(measured)?;
    if data.is_empty() {
        return Err(CliError::MalformedData {
            path: measured.to_path_buf(),
            reason: "no data rows".into(),
        });
    }
    let dir = out_dir(settings)?;

    let peak = data.irradiance.iter().copied().fold(0.0, f64::max);
    let mut log = vec![format!("measured: {} ({} samples)", measured.display(), data.len())];
    let data = if peak > 0.0 && (peak - 1.0).abs() > 1e-9 {
        log.push(format!("renormalized measured curve by its maximum {peak:.8}"));
        SweepResult::new(data.betas.clone(), data.irradiance.iter().map(|v| v / peak).collect())?
    } else {
        data
    };
    let sim = SimParams {
        grid: size,
        upsample,
        cutoff: match cutoff {
            Cutoff::Auto => None,
            Cutoff::Fixed(v) => Some(v),
        },
        ..SimParams::default()
    };
    let fit = fit_eta(&data, cell, search, &sim)?;
    let realized = realized_eta(cell, &CrosstalkModel::new(fit.eta_hat, upsample)?)?;
    log.extend([
        format!("cell {cell}, upsample {upsample}, search [{}, {}]", search.0, search.1),
        format!("eta_hat {:.6} (realized border fraction {realized:.6})", fit.eta_hat),
        format!("fit rmse {:.6} ({:.3}%)", fit.fit_rmse, 100.0 * fit.fit_rmse),
        format!("model evaluations {}", fit.evaluations),
    ]);

    let csv_path = dir.join(format!("fit_cell{cell}.csv"));
    save_table(
        &csv_path,
        &["cell", "upsample", "eta_hat", "realized_eta", "fit_rmse", "evaluations"],
        &[vec![
            cell.to_string(),
            upsample.to_string(),
            format!("{:.8}", fit.eta_hat),
            format!("{realized:.8}"),
            format!("{:.8}", fit.fit_rmse),
            fit.evaluations.to_string(),
        ]],
    )?;
    let log_path = dir.join(format!("fit_cell{cell}.log"));
    fs::write(&log_path, log.join("\n") + "\n").map_err(|e| CliError::io(&log_path, e))?;
    Ok(Outcome {
        files: vec![csv_path, log_path],
        lines: log,
    })
}

// ---- encode / retrieve ------------------------------------------------------

/// Load whichever images were given; the missing one defaults to A_max or zero phase.
fn load_pair(amplitude: Option<&Path>, phase: Option<&Path>) -> Result<Option<(AmplitudeMap, PhaseElement)>> {
    let amp = amplitude.map(pgm::load_amplitude).transpose()?;
    let ph = phase.map(pgm::load_phase).transpose()?;
    Ok(match (amp, ph) {
        (None, None) => None,
        (Some(a), Some(p)) => {
            if a.size() != p.size() {
                return Err(CliError::Conflict(format!(
                    "amplitude is {}x{} but phase is {}x{}",
                    a.width(),
                    a.height(),
                    p.width(),
                    p.height()
                )));
            }
            Some((a, p))
        }
        (Some(a), None) => {
            let p = PhaseElement::uniform(a.width(), a.height(), 0.0)?;
            Some((a, p))
        }
        (None, Some(p)) => {
            let a = AmplitudeMap::uniform(p.width(), p.height(), A_MAX)?;
            Some((a, p))
        }
    })
}

fn check_requested_size(settings: &Settings, actual: GridSize) -> Result<()> {
    match settings.size {
        Some(s) if s != actual => Err(CliError::Conflict(format!(
            "--size {}x{} disagrees with the {}x{} input images",
            s.width, s.height, actual.width, actual.height
        ))),
        _ => Ok(()),
    }
}

pub fn encode_cmd(settings: &Settings, amplitude: Option<&Path>, phase: Option<&Path>, m3: bool) -> Result<Outcome> {
    let cell = check_cell(settings.cell.unwrap_or(1))?;
    let cfg = encoding_config(settings, cell, m3)?;
    let seed = settings.seed.unwrap_or(DEFAULT_SEED);
    let (amp, ph) = match load_pair(amplitude, phase)? {
        Some(pair) => {
            check_requested_size(settings, pair.0.size())?;
            pair
        }
        None => {
            let size = settings.size.unwrap_or(SLM_GRID);
            let radius = 0.8 * default_cutoff(cell, m3);
            (amplitude_chart(size, radius, seed)?, phase_chart(size, seed)?)
        }
    };
    if ph.width() < 2 * cell || ph.height() < 2 * cell {
        return Err(CliError::Conflict(format!(
            "a {}x{} image cannot hold a cell-{cell} checkerboard",
            ph.width(),
            ph.height()
        )));
    }
    let dir = out_dir(settings)?;

    let mut alpha = encode(
        &amp,
        &ph,
        &EncodingConfig {
            m3_enabled: false,
            ..cfg
        },
    )?;
    if m3 {
        alpha = carve_reference(&alpha, cell)?.0;
    }
    let path = dir.join("hologram.pgm");
    pgm::save_phase_bitmap(&alpha, &path)?;
    Ok(Outcome {
        lines: vec![format!(
            "{}x{} hologram, cell {cell}, blazed period {}, reference grating {}",
            alpha.width(),
            alpha.height(),
            cfg.blazed_period,
            if m3 { "on" } else { "off" }
        )],
        files: vec![path],
    })
}

struct Scored {
    amplitude_rmse: f64,
    phase_rmse: f64,
    amplitude: Grid<f64>,
    phase: PhaseElement,
}

/// Scale- and piston-aligned comparison of a retrieved field against its input.
fn score(amp: &AmplitudeMap, ph: &PhaseElement, out_amp: &Grid<f64>, out_phase: &PhaseElement) -> Result<Scored> {
    let support = support_from_amplitude(amp.grid(), PHASE_SUPPORT_FLOOR)?;
    let s = least_squares_scale(amp.as_slice(), out_amp.as_slice());
    Ok(Scored {
        amplitude_rmse: rmse_amplitude(amp.grid(), out_amp)?,
        phase_rmse: rmse_phase(ph, out_phase, &support)?,
        amplitude: out_amp.map(|a| a * s),
        phase: align_phase(ph, out_phase, &support)?,
    })
}

pub fn retrieve(settings: &Settings, amplitude: Option<&Path>, phase: Option<&Path>) -> Result<Outcome> {
    let cell = check_cell(settings.cell.unwrap_or(1))?;
    let eta = settings.eta.unwrap_or(0.0);
    let upsample = settings.upsample.unwrap_or(PIPELINE_UPSAMPLE);
    let model = model_for(cell, eta, upsample)?;
    let cfg = encoding_config(settings, cell, true)?;
    let filter = pipeline_filter(settings.cutoff.unwrap_or_default(), &cfg, upsample)?;
    let seed = settings.seed.unwrap_or(DEFAULT_SEED);
    let (amp, ph) = match load_pair(amplitude, phase)? {
        Some(pair) => {
            check_requested_size(settings, pair.0.size())?;
            let size = pair.0.size();
            if size.width % cell != 0 || size.height % cell != 0 || size.width < 4 * cell || size.height < 4 * cell {
                return Err(CliError::Conflict(format!(
                    "image {}x{} must be a multiple of cell {cell} and hold a reference block",
                    size.width, size.height
                )));
            }
            pair
        }
        None => {
            let grid = synthetic_grid(settings.size.unwrap_or(DEFAULT_GRID), &[cell])?;
            band_limited_field(grid, 0.8 * default_cutoff(cell, true), 1.0, 0.6, seed)?
        }
    };
    let dir = out_dir(settings)?;

    let out =
        encode_retrieve_pipeline_with_filter(&amp, &ph, &cfg, &model, &OpticalTrain::new(upsample), Some(filter))?;
    let scored = score(&amp, &ph, &out.amplitude, &out.phase)?;
    let amp_path = dir.join("retrieved_amplitude.pgm");
    let phase_path = dir.join("retrieved_phase.pgm");
    let report_path = dir.join("retrieve_report.csv");
    pgm::save_amplitude(&scored.amplitude, &amp_path)?;
    pgm::save_phase_bitmap(&scored.phase, &phase_path)?;
    let realized = realized_eta(cell, &model)?;
    save_table(
        &report_path,
        &[
            "cell",
            "eta",
            "realized_eta",
            "upsample",
            "amplitude_rmse_pct",
            "phase_rmse_pct",
        ],
        &[vec![
            cell.to_string(),
            format!("{eta:.6}"),
            format!("{realized:.6}"),
            upsample.to_string(),
            format!("{:.6}", scored.amplitude_rmse),
            format!("{:.6}", scored.phase_rmse),
        ]],
    )?;
    Ok(Outcome {
        lines: vec![format!(
            "cell {cell}, eta {eta} (realized {realized:.4}): amplitude rmse {:.3}%, phase rmse {:.3}%",
            scored.amplitude_rmse, scored.phase_rmse
        )],
        files: vec![amp_path, phase_path, report_path],
    })
}

// ---- reproductions ----------------------------------------------------------

/// `(cell, eta)` pairs for a reproduction, honouring `--cell` and `--eta`.
fn schedule(settings: &Settings, default: &[(usize, f64)]) -> Result<Vec<(usize, f64)>> {
    let pairs: Vec<(usize, f64)> = match settings.cell {
        Some(cell) => {
            let eta = default
                .iter()
                .find(|(c, _)| *c == cell)
                .map_or_else(|| fringe_eta(cell), |&(_, e)| e);
            vec![(check_cell(cell)?, eta)]
        }
        None => default.to_vec(),
    };
    Ok(pairs
        .into_iter()
        .map(|(cell, eta)| (cell, settings.eta.unwrap_or(eta)))
        .collect())
}

pub fn fig3(settings: &Settings) -> Result<Outcome> {
    let size = settings.size.unwrap_or(DEFAULT_GRID);
    let betas = check_betas(settings.betas.unwrap_or(DEFAULT_BETA_SAMPLES))?;
    let mut runs: Vec<(String, usize, f64)> = schedule(settings, &FITTED_ETAS)?
        .into_iter()
        .map(|(cell, eta)| (format!("fig3_cell{cell}_eta{}.csv", fmt_eta(eta)), cell, eta))
        .collect();
    let ideal_cell = settings.cell.unwrap_or(1);
    runs.push(("fig3_ideal.csv".into(), ideal_cell, 0.0));

    let mut plans = Vec::new();
    for (name, cell, eta) in runs {
        let upsample = settings.upsample.unwrap_or_else(|| calibration_upsample(cell));
        let model = model_for(cell, eta, upsample)?;
        let filter = sweep_filter(settings.cutoff.unwrap_or_default(), cell, upsample)?;
        check_sweep_grid(size, cell)?;
        plans.push((name, cell, eta, model, filter));
    }
    let dir = out_dir(settings)?;

    let quarter = (0..betas.len())
        .min_by(|&a, &b| (betas[a] - FRAC_PI_2).abs().total_cmp(&(betas[b] - FRAC_PI_2).abs()))
        .expect("at least two betas");
    let ideal: Vec<f64> = betas.iter().map(|b| b.cos().powi(2)).collect();
    let mut outcome = Outcome::default();
    let mut rows = Vec::new();
    for (name, cell, eta, model, filter) in plans {
        let result = dualphase::retrieval::flat_sweep(&betas, cell, &model, &filter, size)?;
        let path = dir.join(&name);
        save_csv_sweep(&result, &path)?;
        let realized = realized_eta(cell, &model)?;
        let vs_ideal = curve_rmse(&result.irradiance, &ideal);
        outcome.lines.push(format!(
            "cell {cell:>2}, eta {eta:.2} (realized {realized:.4}): I(π/2) = {:.5}, rmse vs cos² = {:.4}",
            result.irradiance[quarter], vs_ideal
        ));
        rows.push(vec![
            name,
            cell.to_string(),
            format!("{eta:.6}"),
            format!("{realized:.6}"),
            model.upsample.to_string(),
            format!("{:.8}", result.irradiance[quarter]),
            format!("{vs_ideal:.8}"),
        ]);
        outcome.files.push(path);
    }
    let summary = dir.join("fig3_summary.csv");
    save_table(
        &summary,
        &[
            "file",
            "cell",
            "eta",
            "realized_eta",
            "upsample",
            "irradiance_quarter_wave",
            "rmse_vs_cos2",
        ],
        &rows,
    )?;
    outcome.files.push(summary);
    Ok(outcome)
}

const FIG4_CELLS: [(usize, f64); 3] = FITTED_ETAS;
const FIG5_CELLS: [usize; 3] = [1, 2, 5];

pub fn fig4(settings: &Settings) -> Result<Outcome> {
    let pairs = schedule(settings, &FIG4_CELLS)?;
    let cells: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    let grid = synthetic_grid(settings.size.unwrap_or(DEFAULT_GRID), &cells)?;
    let upsample = settings.upsample.unwrap_or(PIPELINE_UPSAMPLE);
    let coarsest = *cells.iter().max().expect("non-empty schedule");
    let mut plans = Vec::new();
    for &(cell, eta) in &pairs {
        let model = model_for(cell, eta, upsample)?;
        let cfg = encoding_config(settings, cell, false)?;
        let filter = pipeline_filter(settings.cutoff.unwrap_or_default(), &cfg, upsample)?;
        plans.push((cell, eta, model, cfg, filter));
    }
    let seed = settings.seed.unwrap_or(DEFAULT_SEED);
    let dir = out_dir(settings)?;

    let amp = amplitude_chart(grid, 0.8 * default_cutoff(coarsest, false), seed)?;
    let flat = PhaseElement::uniform(grid.width, grid.height, 0.0)?;
    let input_path = dir.join("fig4_input.pgm");
    pgm::save_amplitude(amp.grid(), &input_path)?;
    let mut outcome = Outcome {
        files: vec![input_path],
        ..Outcome::default()
    };
    let mut rows = Vec::new();
    for (cell, eta, model, cfg, filter) in plans {
        let image = direct_amplitude_image(&amp, &flat, &cfg, &model, &OpticalTrain::new(upsample), Some(filter))?;
        let rmse = rmse_amplitude(amp.grid(), &image)?;
        let s = least_squares_scale(amp.as_slice(), image.as_slice());
        let path = dir.join(format!("fig4_cell{cell}.pgm"));
        pgm::save_amplitude(&image.map(|a| a * s), &path)?;
        let realized = realized_eta(cell, &model)?;
        outcome.lines.push(format!(
            "cell {cell:>2}, eta {eta:.4} (realized {realized:.4}): amplitude rmse {rmse:.3}%"
        ));
        rows.push(vec![
            cell.to_string(),
            format!("{eta:.6}"),
            format!("{realized:.6}"),
            format!("{rmse:.6}"),
        ]);
        outcome.files.push(path);
    }
    let report = dir.join("fig4_report.csv");
    save_table(&report, &["cell", "eta", "realized_eta", "amplitude_rmse_pct"], &rows)?;
    outcome.files.push(report);
    Ok(outcome)
}

pub fn fig5(settings: &Settings) -> Result<Outcome> {
    let defaults: Vec<(usize, f64)> = FIG5_CELLS.iter().map(|&c| (c, fringe_eta(c))).collect();
    let pairs = schedule(settings, &defaults)?;
    let cells: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    let grid = synthetic_grid(settings.size.unwrap_or(DEFAULT_GRID), &cells)?;
    let upsample = settings.upsample.unwrap_or(PIPELINE_UPSAMPLE);
    let coarsest = *cells.iter().max().expect("non-empty schedule");
    let mut plans = Vec::new();
    for &(cell, eta) in &pairs {
        let model = model_for(cell, eta, upsample)?;
        let cfg = encoding_config(settings, cell, true)?;
        let filter = pipeline_filter(settings.cutoff.unwrap_or_default(), &cfg, upsample)?;
        plans.push((cell, eta, model, cfg, filter));
    }
    let seed = settings.seed.unwrap_or(DEFAULT_SEED);
    let dir = out_dir(settings)?;

    let amp = amplitude_chart(grid, 0.8 * default_cutoff(coarsest, true), seed)?;
    let ph = phase_chart(grid, seed)?;
    let amp_in = dir.join("fig5_input_amplitude.pgm");
    let phase_in = dir.join("fig5_input_phase.pgm");
    pgm::save_amplitude(amp.grid(), &amp_in)?;
    pgm::save_phase_bitmap(&ph, &phase_in)?;
    let mut outcome = Outcome {
        files: vec![amp_in, phase_in],
        ..Outcome::default()
    };
    let mut rows = Vec::new();
    for (cell, eta, model, cfg, filter) in plans {
        let out =
            encode_retrieve_pipeline_with_filter(&amp, &ph, &cfg, &model, &OpticalTrain::new(upsample), Some(filter))?;
        let scored = score(&amp, &ph, &out.amplitude, &out.phase)?;
        let amp_path = dir.join(format!("fig5_cell{cell}_amplitude.pgm"));
        let phase_path = dir.join(format!("fig5_cell{cell}_phase.pgm"));
        pgm::save_amplitude(&scored.amplitude, &amp_path)?;
        pgm::save_phase_bitmap(&scored.phase, &phase_path)?;
        let realized = realized_eta(cell, &model)?;
        outcome.lines.push(format!(
            "cell {cell}, eta {eta:.4} (realized {realized:.4}): amplitude rmse {:.3}%, phase rmse {:.3}%",
            scored.amplitude_rmse, scored.phase_rmse
        ));
        rows.push(vec![
            cell.to_string(),
            format!("{eta:.6}"),
            format!("{realized:.6}"),
            format!("{:.6}", scored.amplitude_rmse),
            format!("{:.6}", scored.phase_rmse),
        ]);
        outcome.files.extend([amp_path, phase_path]);
    }
    let report = dir.join("fig5_report.csv");
    save_table(
        &report,
        &["cell", "eta", "realized_eta", "amplitude_rmse_pct", "phase_rmse_pct"],
        &rows,
    )?;
    outcome.files.push(report);
    Ok(outcome)
}

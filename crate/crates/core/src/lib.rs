//! Double-phase encoding of complex optical fields onto a simulated
//! phase-only spatial light modulator.
//!
//! The crate covers the full numerical chain:
//!
//! - [`field`]: grid types, phase wrapping and checkerboard masks.
//! - [`encoder`]: amplitude/phase decomposition into two phase-only waves,
//!   checkerboard multiplexing, blazed carrier, reference carving and pistons.
//! - [`slm`]: the two-zone pixel crosstalk model and sub-pixel rendering.
//! - [`optics`]: the 4f imaging train with a hard circular iris.
//! - [`retrieval`]: camera model, flat-amplitude sweeps and four-step
//!   phase-shifting reconstruction.
//! - [`metrics`]: amplitude/phase rmse and least-squares crosstalk calibration.
//! - [`testfields`]: deterministic synthetic test images.

pub mod encoder;
pub mod error;
pub mod fft;
pub mod field;
pub mod metrics;
pub mod optics;
pub mod retrieval;
pub mod slm;
pub mod testfields;

pub use error::{Error, Result};
pub use field::{AmplitudeMap, BinaryMask, ComplexField, Grid, GridSize, Parity, PhaseElement, A_MAX};
pub use num_complex::Complex64;

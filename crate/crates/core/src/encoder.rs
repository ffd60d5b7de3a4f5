//! Double-phase encoding of a complex field into a single phase element.
//!
//! A field `A·exp(iφ)` with `0 ≤ A ≤ 2` equals `exp(iθ) + exp(iϑ)` with
//! `θ, ϑ = φ ± arccos(A/2)`. The two waves are interleaved on a checkerboard
//! (`θ` on the even blocks, `ϑ` on the odd ones) to give the phase-only
//! element `α`.

use std::f64::consts::{PI, TAU};

use crate::error::{ensure, Result};
use crate::field::{make_checkerboard, wrap, AmplitudeMap, BinaryMask, Grid, Parity, PhaseElement, A_MAX};

/// Axis along which the blazed carrier ramps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Axis {
    /// Phase ramps along columns (x); the spectrum shifts along `u`.
    #[default]
    Horizontal,
    /// Phase ramps along rows (y); the spectrum shifts along `v`.
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodingConfig {
    /// SLM pixels per multiplex cell side.
    pub cell: usize,
    /// Blazed carrier period in pixels; 0 disables the carrier.
    pub blazed_period: usize,
    pub blazed_axis: Axis,
    /// Carve a reference grating (M3) for phase-shifting retrieval.
    pub m3_enabled: bool,
}

impl EncodingConfig {
    pub fn new(cell: usize) -> Self {
        Self {
            cell,
            blazed_period: 0,
            blazed_axis: Axis::Horizontal,
            m3_enabled: false,
        }
    }

    pub fn with_m3(mut self, enabled: bool) -> Self {
        self.m3_enabled = enabled;
        self
    }

    pub fn with_blazed(mut self, period: usize, axis: Axis) -> Self {
        self.blazed_period = period;
        self.blazed_axis = axis;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.cell >= 1, "encoding cell must be >= 1");
        ensure!(
            self.blazed_period == 0 || self.blazed_period >= 2,
            "blazed period must be 0 (off) or >= 2, got {}",
            self.blazed_period
        );
        Ok(())
    }

    /// Carrier frequency `(u, v)` in cycles per SLM pixel, zero when disabled.
    pub fn carrier_frequency(&self) -> (f64, f64) {
        if self.blazed_period == 0 {
            return (0.0, 0.0);
        }
        let f = 1.0 / self.blazed_period as f64;
        match self.blazed_axis {
            Axis::Horizontal => (f, 0.0),
            Axis::Vertical => (0.0, f),
        }
    }
}

fn half_angle(amplitude: f64) -> f64 {
    (amplitude / A_MAX).clamp(0.0, 1.0).acos()
}

/// Split `A·exp(iφ)` into the two unit-amplitude phases `(θ, ϑ)`.
pub fn decompose(amplitude: &AmplitudeMap, phase: &PhaseElement) -> Result<(PhaseElement, PhaseElement)> {
    amplitude.grid().same_size(phase.grid(), "decompose")?;
    let (w, h) = (amplitude.width(), amplitude.height());
    let mut theta = Vec::with_capacity(w * h);
    let mut vartheta = Vec::with_capacity(w * h);
    for (&a, &p) in amplitude.as_slice().iter().zip(phase.as_slice()) {
        let d = half_angle(a);
        theta.push(wrap(p + d));
        vartheta.push(wrap(p - d));
    }
    Ok((
        PhaseElement::from_wrapped_unchecked(Grid::from_vec(w, h, theta)?),
        PhaseElement::from_wrapped_unchecked(Grid::from_vec(w, h, vartheta)?),
    ))
}

/// Interleave `θ` (even blocks, M1) and `ϑ` (odd blocks, M2) into `α`.
pub fn multiplex(theta: &PhaseElement, vartheta: &PhaseElement, cell: usize) -> Result<PhaseElement> {
    theta.grid().same_size(vartheta.grid(), "multiplex")?;
    let m1 = make_checkerboard(theta.width(), theta.height(), cell, Parity::Even)?;
    let alpha = Grid::from_fn(theta.width(), theta.height(), |r, c| {
        if m1.get(r, c) {
            theta.get(r, c)
        } else {
            vartheta.get(r, c)
        }
    });
    Ok(PhaseElement::from_wrapped_unchecked(alpha))
}

/// Sawtooth ramp sample: linear from `-π` towards `π` over each period.
pub fn blazed_ramp(index: usize, period: usize) -> f64 {
    -PI + TAU * (index % period) as f64 / period as f64
}

/// Add a blazed grating of the given period along `axis`.
pub fn add_blazed(alpha: &PhaseElement, period: usize, axis: Axis) -> Result<PhaseElement> {
    ensure!(period >= 2, "blazed period must be >= 2, got {period}");
    let out = Grid::from_fn(alpha.width(), alpha.height(), |r, c| {
        let along = match axis {
            Axis::Horizontal => c,
            Axis::Vertical => r,
        };
        wrap(alpha.get(r, c) + blazed_ramp(along, period))
    });
    Ok(PhaseElement::from_wrapped_unchecked(out))
}

/// Zero the phase on the odd blocks of a checkerboard with twice the
/// multiplex cell. Returns the carved element and the mask (1 = object cell).
pub fn carve_reference(alpha: &PhaseElement, cell: usize) -> Result<(PhaseElement, BinaryMask)> {
    ensure!(cell >= 1, "cell must be >= 1");
    let m3 = make_checkerboard(alpha.width(), alpha.height(), 2 * cell, Parity::Even)?;
    let carved = Grid::from_fn(alpha.width(), alpha.height(), |r, c| {
        if m3.get(r, c) {
            alpha.get(r, c)
        } else {
            0.0
        }
    });
    Ok((PhaseElement::from_wrapped_unchecked(carved), m3))
}

/// Add a uniform piston to the object cells (`m3 = 1`); reference cells stay at 0.
pub fn add_piston(alpha: &PhaseElement, m3: &BinaryMask, delta: f64) -> Result<PhaseElement> {
    ensure!(delta.is_finite(), "piston must be finite, got {delta}");
    alpha.grid().same_size(m3.bits(), "add_piston")?;
    let out = Grid::from_fn(alpha.width(), alpha.height(), |r, c| {
        if m3.get(r, c) {
            wrap(alpha.get(r, c) + delta)
        } else {
            0.0
        }
    });
    Ok(PhaseElement::from_wrapped_unchecked(out))
}

/// Rewrite the hologram as `α = φ + Θ` with `Θ = (M1 − M2)·arccos(A/A_max)`.
///
/// Returns `φ` unchanged together with `Θ`, which lies in `[-π/2, π/2]`.
pub fn theta_split(
    amplitude: &AmplitudeMap,
    phase: &PhaseElement,
    cell: usize,
) -> Result<(PhaseElement, PhaseElement)> {
    amplitude.grid().same_size(phase.grid(), "theta_split")?;
    let m1 = make_checkerboard(amplitude.width(), amplitude.height(), cell, Parity::Even)?;
    let big_theta = Grid::from_fn(amplitude.width(), amplitude.height(), |r, c| {
        let d = half_angle(amplitude.get(r, c));
        if m1.get(r, c) {
            d
        } else {
            -d
        }
    });
    Ok((phase.clone(), PhaseElement::from_wrapped_unchecked(big_theta)))
}

/// Full hologram for a field: decompose, multiplex, then the optional carrier.
pub fn encode(amplitude: &AmplitudeMap, phase: &PhaseElement, cfg: &EncodingConfig) -> Result<PhaseElement> {
    cfg.validate()?;
    let (theta, vartheta) = decompose(amplitude, phase)?;
    let alpha = multiplex(&theta, &vartheta, cfg.cell)?;
    if cfg.blazed_period > 0 {
        add_blazed(&alpha, cfg.blazed_period, cfg.blazed_axis)
    } else {
        Ok(alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fft::{fft2, signed_bin};
    use crate::field::field_from_polar;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64) -> bool {
        wrap(a - b).abs() < 1e-12
    }

    #[test]
    fn decompose_examples() {
        let (t, v) = decompose(
            &AmplitudeMap::uniform(2, 2, 2.0).unwrap(),
            &PhaseElement::uniform(2, 2, 0.3).unwrap(),
        )
        .unwrap();
        assert!(close(t.get(0, 0), 0.3) && close(v.get(1, 1), 0.3));

        let (t, v) = decompose(
            &AmplitudeMap::uniform(2, 2, 0.0).unwrap(),
            &PhaseElement::uniform(2, 2, 0.0).unwrap(),
        )
        .unwrap();
        assert!(close(t.get(0, 1), PI / 2.0) && close(v.get(0, 1), -PI / 2.0));

        let (t, v) = decompose(
            &AmplitudeMap::uniform(2, 2, 1.0).unwrap(),
            &PhaseElement::uniform(2, 2, 0.0).unwrap(),
        )
        .unwrap();
        assert!(close(t.get(1, 0), PI / 3.0) && close(v.get(1, 0), -PI / 3.0));
        let sum = Complex64::cis(t.get(1, 0)) + Complex64::cis(v.get(1, 0));
        assert!((sum - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn decompose_rejects_mismatch() {
        let a = AmplitudeMap::uniform(2, 2, 1.0).unwrap();
        let p = PhaseElement::uniform(2, 3, 0.0).unwrap();
        assert!(decompose(&a, &p).is_err());
    }

    #[test]
    fn multiplex_examples() {
        let theta = PhaseElement::uniform(2, 2, 0.4).unwrap();
        let vartheta = PhaseElement::uniform(2, 2, -0.4).unwrap();
        let alpha = multiplex(&theta, &vartheta, 1).unwrap();
        assert_eq!(alpha.as_slice(), &[0.4, -0.4, -0.4, 0.4]);

        let wide = PhaseElement::uniform(7, 6, 0.4).unwrap();
        for cell in [1, 2, 3, 6] {
            let same = multiplex(&wide, &wide, cell).unwrap();
            assert_eq!(same, wide);
        }

        let t = PhaseElement::from_fn(40, 40, |r, c| (r * 40 + c) as f64 * 1e-3).unwrap();
        let v = PhaseElement::from_fn(40, 40, |r, c| -((r * 40 + c) as f64) * 1e-3).unwrap();
        let a = multiplex(&t, &v, 10).unwrap();
        for r in 0..40 {
            for c in 0..40 {
                let expected = if (r / 10 + c / 10) % 2 == 0 {
                    t.get(r, c)
                } else {
                    v.get(r, c)
                };
                assert_eq!(a.get(r, c), expected);
            }
        }
    }

    #[test]
    fn multiplex_of_uniform_halves_is_block_constant() {
        let t = PhaseElement::uniform(40, 20, 1.1).unwrap();
        let v = PhaseElement::uniform(40, 20, -0.7).unwrap();
        let a = multiplex(&t, &v, 10).unwrap();
        for r in 0..20 {
            for c in 0..40 {
                assert_eq!(a.get(r, c), a.get(r / 10 * 10, c / 10 * 10));
            }
        }
    }

    #[test]
    fn blazed_ramps() {
        assert_eq!((0..2).map(|j| blazed_ramp(j, 2)).collect::<Vec<_>>(), vec![-PI, 0.0]);
        let zero = PhaseElement::uniform(8, 2, 0.0).unwrap();
        let b = add_blazed(&zero, 4, Axis::Horizontal).unwrap();
        let row: Vec<f64> = (0..8).map(|c| b.get(1, c)).collect();
        // -π wraps to π in the half-open convention.
        let expected = [PI, -PI / 2.0, 0.0, PI / 2.0, PI, -PI / 2.0, 0.0, PI / 2.0];
        for (g, e) in row.iter().zip(expected) {
            assert!(close(*g, e));
        }
        let v = add_blazed(&zero, 4, Axis::Vertical).unwrap();
        assert!(close(v.get(1, 0), -PI / 2.0) && close(v.get(1, 5), -PI / 2.0));
        assert!(add_blazed(&zero, 1, Axis::Horizontal).is_err());
    }

    #[test]
    fn blazed_add_then_subtract_is_identity() {
        let alpha = PhaseElement::from_fn(12, 6, |r, c| (r as f64 * 0.7 - c as f64 * 0.3).sin() * 3.0).unwrap();
        let b = add_blazed(&alpha, 5, Axis::Vertical).unwrap();
        let back = Grid::from_fn(12, 6, |r, c| b.get(r, c) - blazed_ramp(r, 5));
        let back = PhaseElement::from_grid(back).unwrap();
        for (x, y) in back.as_slice().iter().zip(alpha.as_slice()) {
            assert!(close(*x, *y));
        }
    }

    #[test]
    fn blazed_shifts_spectral_peak() {
        for (period, axis) in [(4usize, Axis::Horizontal), (8, Axis::Vertical), (16, Axis::Horizontal)] {
            let n = 64;
            let alpha = PhaseElement::uniform(n, n, 0.9).unwrap();
            let b = add_blazed(&alpha, period, axis).unwrap();
            let mut data = b.to_field().unwrap().into_grid().into_vec();
            fft2(&mut data, n, n);
            let (peak, _) = data
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .unwrap();
            let (v, u) = (signed_bin(peak / n, n), signed_bin(peak % n, n));
            let shift = n as i64 / period as i64;
            match axis {
                Axis::Horizontal => assert_eq!((u, v), (shift, 0)),
                Axis::Vertical => assert_eq!((u, v), (0, shift)),
            }
        }
    }

    #[test]
    fn carve_reference_examples() {
        let alpha = PhaseElement::from_fn(8, 8, |r, c| 0.1 + (r * 8 + c) as f64 * 0.01).unwrap();
        let (carved, m3) = carve_reference(&alpha, 1).unwrap();
        assert_eq!(m3.cell(), 2);
        for r in 0..8 {
            for c in 0..8 {
                let object = (r / 2 + c / 2) % 2 == 0;
                assert_eq!(m3.get(r, c), object);
                assert_eq!(carved.get(r, c), if object { alpha.get(r, c) } else { 0.0 });
            }
        }
        assert_eq!(m3.count_ones(), 32);

        let zero = PhaseElement::uniform(12, 12, 0.0).unwrap();
        assert_eq!(carve_reference(&zero, 3).unwrap().0, zero);

        let (_, m3) = carve_reference(&PhaseElement::uniform(24, 16, 0.5).unwrap(), 2).unwrap();
        assert_eq!(m3.count_ones() * 2, 24 * 16);
    }

    #[test]
    fn piston_examples() {
        let alpha = PhaseElement::from_fn(8, 8, |r, c| ((r + 2 * c) as f64).sin() * 3.0).unwrap();
        let (carved, m3) = carve_reference(&alpha, 1).unwrap();
        assert_eq!(add_piston(&carved, &m3, 0.0).unwrap(), carved);
        let full = add_piston(&carved, &m3, TAU).unwrap();
        for (a, b) in full.as_slice().iter().zip(carved.as_slice()) {
            assert!(close(*a, *b));
        }
        let twice = add_piston(&add_piston(&carved, &m3, PI / 2.0).unwrap(), &m3, PI / 2.0).unwrap();
        let once = add_piston(&carved, &m3, PI).unwrap();
        for (a, b) in twice.as_slice().iter().zip(once.as_slice()) {
            assert!(close(*a, *b));
        }
        for r in 0..8 {
            for c in 0..8 {
                if !m3.get(r, c) {
                    assert_eq!(once.get(r, c), 0.0);
                }
            }
        }
        assert!(add_piston(&carved, &m3, f64::NAN).is_err());
    }

    #[test]
    fn theta_split_examples() {
        let p = PhaseElement::from_fn(4, 4, |r, c| (r as f64 - c as f64) * 0.5).unwrap();
        let (phi, big) = theta_split(&AmplitudeMap::uniform(4, 4, 2.0).unwrap(), &p, 1).unwrap();
        assert_eq!(phi, p);
        assert!(big.as_slice().iter().all(|&t| t == 0.0));

        let (_, big) = theta_split(&AmplitudeMap::uniform(4, 4, 0.0).unwrap(), &p, 1).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let sign = if (r + c) % 2 == 0 { 1.0 } else { -1.0 };
                assert!((big.get(r, c) - sign * PI / 2.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn theta_split_matches_multiplex_on_random_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = AmplitudeMap::from_fn(10, 6, |_, _| rng.gen_range(0.0..=2.0)).unwrap();
        let p = PhaseElement::from_fn(10, 6, |_, _| rng.gen_range(-PI..PI)).unwrap();
        for cell in [1, 2, 3] {
            let (phi, big) = theta_split(&a, &p, cell).unwrap();
            let (t, v) = decompose(&a, &p).unwrap();
            let alpha = multiplex(&t, &v, cell).unwrap();
            for r in 0..6 {
                for c in 0..10 {
                    // Direct pointwise oracle: the mask selects +arccos or -arccos.
                    let expected = wrap(phi.get(r, c) + big.get(r, c));
                    assert!(close(alpha.get(r, c), expected));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn two_unit_waves_rebuild_the_field(
            values in proptest::collection::vec((0.0f64..=2.0, -PI..PI), 4)
        ) {
            let a = AmplitudeMap::from_fn(2, 2, |r, c| values[r * 2 + c].0).unwrap();
            let p = PhaseElement::from_fn(2, 2, |r, c| values[r * 2 + c].1).unwrap();
            let (t, v) = decompose(&a, &p).unwrap();
            let target = field_from_polar(&a, &p).unwrap();
            for r in 0..2 {
                for c in 0..2 {
                    let sum = Complex64::cis(t.get(r, c)) + Complex64::cis(v.get(r, c));
                    let want = target.get(r, c);
                    prop_assert!((sum - want).norm() <= 1e-12 * want.norm().max(1.0));
                }
            }
        }

        #[test]
        fn theta_split_equals_multiplex(
            values in proptest::collection::vec((0.0f64..=2.0, -PI..PI), 36),
            cell in 1usize..4,
        ) {
            let a = AmplitudeMap::from_fn(6, 6, |r, c| values[r * 6 + c].0).unwrap();
            let p = PhaseElement::from_fn(6, 6, |r, c| values[r * 6 + c].1).unwrap();
            let (t, v) = decompose(&a, &p).unwrap();
            let alpha = multiplex(&t, &v, cell).unwrap();
            let (phi, big) = theta_split(&a, &p, cell).unwrap();
            for r in 0..6 {
                for c in 0..6 {
                    prop_assert!(close(alpha.get(r, c), wrap(phi.get(r, c) + big.get(r, c))));
                    prop_assert_eq!(Complex64::cis(alpha.get(r, c)).norm().round(), 1.0);
                }
            }
        }
    }
}

//! Grid types shared by every stage of the simulator.
//!
//! All grids are row-major with the origin at the top-left corner: index
//! `(row, col)` addresses `data[row * width + col]`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{ensure, invalid, Result};

/// Maximum encodable amplitude: the coherent sum of two unit waves.
pub const A_MAX: f64 = 2.0;

/// Width and height of a grid, in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridSize {
    pub width: usize,
    pub height: usize,
}

impl GridSize {
    pub const fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }

    pub const fn len(&self) -> usize {
        self.width * self.height
    }

    pub const fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Largest size not exceeding `self` whose sides are multiples of `step`.
    pub const fn floor_to_multiple(&self, step: usize) -> Self {
        Self {
            width: self.width / step * step,
            height: self.height / step * step,
        }
    }
}

/// A dense row-major 2-D grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T> Grid<T> {
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        ensure!(
            width >= 1 && height >= 1,
            "grid must be at least 1x1, got {width}x{height}"
        );
        ensure!(
            data.len() == width * height,
            "grid {width}x{height} needs {} values, got {}",
            width * height,
            data.len()
        );
        Ok(Self { width, height, data })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn size(&self) -> GridSize {
        GridSize::new(self.width, self.height)
    }

    pub fn get(&self, row: usize, col: usize) -> &T {
        &self.data[row * self.width + col]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Grid<U> {
        Grid {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub(crate) fn same_size<U>(&self, other: &Grid<U>, what: &str) -> Result<()> {
        ensure!(
            self.size() == other.size(),
            "{what}: dimension mismatch {}x{} vs {}x{}",
            self.width,
            self.height,
            other.width,
            other.height
        );
        Ok(())
    }
}

/// Wrap a phase into `(-π, π]`, returning an error for non-finite input.
pub fn wrap_phase(phase: f64) -> Result<f64> {
    ensure!(phase.is_finite(), "cannot wrap non-finite phase {phase}");
    Ok(wrap(phase))
}

/// Infallible wrap for values already known to be finite.
pub(crate) fn wrap(phase: f64) -> f64 {
    if phase > -PI && phase <= PI {
        return phase;
    }
    let wrapped = PI - (PI - phase).rem_euclid(TAU);
    if wrapped <= -PI {
        wrapped + TAU
    } else {
        wrapped
    }
}

/// Optical field sampled on a grid. Every value is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField(Grid<Complex64>);

impl ComplexField {
    pub fn new(grid: Grid<Complex64>) -> Result<Self> {
        ensure!(
            grid.width >= 2 && grid.height >= 2,
            "complex field must be at least 2x2, got {}x{}",
            grid.width,
            grid.height
        );
        ensure!(
            grid.data.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
            "complex field contains non-finite values"
        );
        Ok(Self(grid))
    }

    pub fn from_fn(width: usize, height: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        Self::new(Grid::from_fn(width, height, f))
    }

    pub fn grid(&self) -> &Grid<Complex64> {
        &self.0
    }

    pub fn into_grid(self) -> Grid<Complex64> {
        self.0
    }

    pub fn width(&self) -> usize {
        self.0.width
    }

    pub fn height(&self) -> usize {
        self.0.height
    }

    pub fn size(&self) -> GridSize {
        self.0.size()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        *self.0.get(row, col)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0.data
    }

    /// Pointwise modulus.
    pub fn modulus(&self) -> Grid<f64> {
        self.0.map(|z| z.norm())
    }

    /// Pointwise argument, wrapped to `(-π, π]`.
    pub fn argument(&self) -> PhaseElement {
        PhaseElement(self.0.map(|z| wrap(z.arg())))
    }

    /// Total energy `Σ|u|²`.
    pub fn energy(&self) -> f64 {
        self.0.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub(crate) fn from_grid_unchecked(grid: Grid<Complex64>) -> Self {
        Self(grid)
    }
}

/// Wrapped phase per pixel, every value in `(-π, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseElement(Grid<f64>);

impl PhaseElement {
    /// Build from raw phases, wrapping each into `(-π, π]`.
    pub fn from_grid(grid: Grid<f64>) -> Result<Self> {
        ensure!(
            grid.data.iter().all(|p| p.is_finite()),
            "phase element contains non-finite values"
        );
        Ok(Self(grid.map(|&p| wrap(p))))
    }

    pub fn from_fn(width: usize, height: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::from_grid(Grid::from_fn(width, height, f))
    }

    pub fn uniform(width: usize, height: usize, phase: f64) -> Result<Self> {
        let phase = wrap_phase(phase)?;
        Ok(Self(Grid::from_fn(width, height, |_, _| phase)))
    }

    pub fn grid(&self) -> &Grid<f64> {
        &self.0
    }

    pub fn into_grid(self) -> Grid<f64> {
        self.0
    }

    pub fn width(&self) -> usize {
        self.0.width
    }

    pub fn height(&self) -> usize {
        self.0.height
    }

    pub fn size(&self) -> GridSize {
        self.0.size()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        *self.0.get(row, col)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0.data
    }

    /// `exp(iα)` per pixel.
    pub fn to_field(&self) -> Result<ComplexField> {
        ComplexField::new(self.0.map(|&p| Complex64::cis(p)))
    }

    pub(crate) fn from_wrapped_unchecked(grid: Grid<f64>) -> Self {
        Self(grid)
    }
}

/// Amplitude per pixel, constrained to `[0, A_MAX]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMap(Grid<f64>);

impl AmplitudeMap {
    pub fn new(grid: Grid<f64>) -> Result<Self> {
        if let Some(bad) = grid.data.iter().find(|a| !(0.0..=A_MAX).contains(*a)) {
            return Err(invalid!("amplitude {bad} outside [0, {A_MAX}]"));
        }
        Ok(Self(grid))
    }

    pub fn from_fn(width: usize, height: usize, f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        Self::new(Grid::from_fn(width, height, f))
    }

    pub fn uniform(width: usize, height: usize, amplitude: f64) -> Result<Self> {
        Self::from_fn(width, height, |_, _| amplitude)
    }

    pub fn a_max(&self) -> f64 {
        A_MAX
    }

    pub fn grid(&self) -> &Grid<f64> {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.width
    }

    pub fn height(&self) -> usize {
        self.0.height
    }

    pub fn size(&self) -> GridSize {
        self.0.size()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        *self.0.get(row, col)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0.data
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A {0,1} mask that is constant on every `cell × cell` block.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryMask {
    bits: Grid<bool>,
    cell: usize,
}

impl BinaryMask {
    /// Build a mask from per-pixel bits; `cell` is checked against the block structure.
    pub fn new(bits: Grid<bool>, cell: usize) -> Result<Self> {
        ensure!(cell >= 1, "mask cell must be >= 1");
        for row in 0..bits.height {
            for col in 0..bits.width {
                let anchor = *bits.get(row / cell * cell, col / cell * cell);
                ensure!(
                    *bits.get(row, col) == anchor,
                    "mask bits vary inside the {cell}x{cell} block at ({row}, {col})"
                );
            }
        }
        Ok(Self { bits, cell })
    }

    pub fn width(&self) -> usize {
        self.bits.width
    }

    pub fn height(&self) -> usize {
        self.bits.height
    }

    pub fn size(&self) -> GridSize {
        self.bits.size()
    }

    pub fn cell(&self) -> usize {
        self.cell
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        *self.bits.get(row, col)
    }

    pub fn bits(&self) -> &Grid<bool> {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.data.iter().filter(|&&b| b).count()
    }

    /// Pointwise complement.
    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.map(|b| !b),
            cell: self.cell,
        }
    }
}

/// Checkerboard of `cell × cell` blocks: bit `(i, j)` is set iff
/// `⌊i/cell⌋ + ⌊j/cell⌋` has the requested parity.
///
/// Partial blocks at the right/bottom edge keep the parity of their block.
pub fn make_checkerboard(width: usize, height: usize, cell: usize, parity: Parity) -> Result<BinaryMask> {
    ensure!(cell >= 1, "checkerboard cell must be >= 1");
    ensure!(
        width >= cell && height >= cell,
        "checkerboard {width}x{height} smaller than its cell {cell}"
    );
    let want = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let bits = Grid::from_fn(width, height, |row, col| (row / cell + col / cell) % 2 == want);
    Ok(BinaryMask { bits, cell })
}

/// `A·exp(iφ)` per pixel.
pub fn field_from_polar(amplitude: &AmplitudeMap, phase: &PhaseElement) -> Result<ComplexField> {
    amplitude.0.same_size(&phase.0, "field_from_polar")?;
    let data = amplitude
        .as_slice()
        .iter()
        .zip(phase.as_slice())
        .map(|(&a, &p)| Complex64::from_polar(a, p))
        .collect();
    ComplexField::new(Grid::from_vec(amplitude.width(), amplitude.height(), data)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits(mask: &BinaryMask) -> Vec<Vec<u8>> {
        (0..mask.height())
            .map(|r| (0..mask.width()).map(|c| mask.get(r, c) as u8).collect())
            .collect()
    }

    #[test]
    fn checkerboard_unit_cell() {
        let m = make_checkerboard(2, 2, 1, Parity::Even).unwrap();
        assert_eq!(bits(&m), vec![vec![1, 0], vec![0, 1]]);
    }

    #[test]
    fn checkerboard_block_cell() {
        let m = make_checkerboard(4, 4, 2, Parity::Even).unwrap();
        assert_eq!(
            bits(&m),
            vec![vec![1, 1, 0, 0], vec![1, 1, 0, 0], vec![0, 0, 1, 1], vec![0, 0, 1, 1]]
        );
    }

    #[test]
    fn checkerboard_partial_edge_keeps_block_parity() {
        let m = make_checkerboard(5, 3, 2, Parity::Even).unwrap();
        assert_eq!(
            bits(&m),
            vec![vec![1, 1, 0, 0, 1], vec![1, 1, 0, 0, 1], vec![0, 0, 1, 1, 0]]
        );
    }

    #[test]
    fn checkerboard_rejects_bad_arguments() {
        assert!(make_checkerboard(4, 4, 0, Parity::Even).is_err());
        assert!(make_checkerboard(3, 8, 4, Parity::Odd).is_err());
        assert!(make_checkerboard(8, 3, 4, Parity::Odd).is_err());
    }

    #[test]
    fn wrap_examples() {
        assert_eq!(wrap_phase(0.0).unwrap(), 0.0);
        assert!((wrap_phase(1.5 * PI).unwrap() + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_phase(-PI).unwrap(), PI);
        assert_eq!(wrap_phase(PI).unwrap(), PI);
        assert_eq!(wrap(-1e-18), -1e-18);
        assert!(wrap_phase(f64::NAN).is_err());
        assert!(wrap_phase(f64::INFINITY).is_err());
    }

    #[test]
    fn polar_examples() {
        let ones = field_from_polar(
            &AmplitudeMap::uniform(3, 2, 1.0).unwrap(),
            &PhaseElement::uniform(3, 2, 0.0).unwrap(),
        )
        .unwrap();
        assert!(ones.as_slice().iter().all(|&z| z == Complex64::new(1.0, 0.0)));

        let zero = field_from_polar(
            &AmplitudeMap::uniform(2, 2, 0.0).unwrap(),
            &PhaseElement::uniform(2, 2, 2.1).unwrap(),
        )
        .unwrap();
        assert!(zero.as_slice().iter().all(|z| z.norm() == 0.0));

        let two_i = field_from_polar(
            &AmplitudeMap::uniform(2, 2, 2.0).unwrap(),
            &PhaseElement::uniform(2, 2, PI / 2.0).unwrap(),
        )
        .unwrap();
        assert!((two_i.get(1, 1) - Complex64::new(0.0, 2.0)).norm() < 1e-15);

        let mismatch = field_from_polar(
            &AmplitudeMap::uniform(2, 2, 1.0).unwrap(),
            &PhaseElement::uniform(3, 2, 0.0).unwrap(),
        );
        assert!(mismatch.is_err());
    }

    #[test]
    fn amplitude_range_is_enforced() {
        assert!(AmplitudeMap::uniform(2, 2, 2.0 + 1e-12).is_err());
        assert!(AmplitudeMap::uniform(2, 2, -1e-12).is_err());
        assert!(AmplitudeMap::uniform(2, 2, f64::NAN).is_err());
    }

    #[test]
    fn complex_field_rejects_small_or_nonfinite() {
        assert!(ComplexField::from_fn(1, 4, |_, _| Complex64::new(1.0, 0.0)).is_err());
        assert!(ComplexField::from_fn(2, 2, |_, _| Complex64::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn mask_constructor_checks_blocks() {
        let good = Grid::from_fn(4, 4, |r, c| (r / 2 + c / 2) % 2 == 1);
        assert!(BinaryMask::new(good, 2).is_ok());
        let bad = Grid::from_fn(4, 4, |r, c| (r + c) % 2 == 1);
        assert!(BinaryMask::new(bad, 2).is_err());
    }

    proptest! {
        #[test]
        fn checkerboards_are_complements(w in 1usize..24, h in 1usize..24, cell in 1usize..6) {
            prop_assume!(w >= cell && h >= cell);
            let even = make_checkerboard(w, h, cell, Parity::Even).unwrap();
            let odd = make_checkerboard(w, h, cell, Parity::Odd).unwrap();
            for r in 0..h {
                for c in 0..w {
                    prop_assert!(even.get(r, c) ^ odd.get(r, c));
                }
            }
            prop_assert_eq!(odd, even.complement());
        }

        #[test]
        fn wrap_is_periodic_and_idempotent(x in -50.0f64..50.0, k in -20i32..20) {
            let w = wrap(x);
            prop_assert!(w > -PI && w <= PI);
            prop_assert_eq!(wrap(w), w);
            let shifted = wrap(x + TAU * k as f64);
            let diff = (shifted - w).abs();
            prop_assert!(diff < 1e-12 || (TAU - diff).abs() < 1e-12);
        }

        #[test]
        fn polar_round_trip(a in 1e-6f64..2.0, p in -3.0f64..3.0) {
            let f = field_from_polar(
                &AmplitudeMap::uniform(2, 2, a).unwrap(),
                &PhaseElement::uniform(2, 2, p).unwrap(),
            ).unwrap();
            let z = f.get(0, 1);
            prop_assert!((z.norm() - a).abs() <= 1e-15 * a.max(1.0));
            prop_assert!(wrap(z.arg() - p).abs() < 1e-14);
        }
    }
}

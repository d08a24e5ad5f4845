//! Grayscale raster model shared by every transform.
//!
//! Images are row-major 8-bit buffers. The first coordinate is always the
//! row, the second the column; the polar axis of the radial transform runs
//! along increasing row index.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RasterError {
    #[error("image dimensions must be positive, got {rows}x{cols}")]
    EmptyDimensions { rows: usize, cols: usize },
    #[error("pixel buffer has {actual} entries, expected {expected} for {rows}x{cols}")]
    BufferLength {
        rows: usize,
        cols: usize,
        expected: usize,
        actual: usize,
    },
    #[error("pixel ({row}, {col}) is outside a {rows}x{cols} image")]
    OutOfRange {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("cannot round non-finite value {0}")]
    NonFinite(f64),
}

/// 8-bit grayscale image with `rows x cols` pixels stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Image {
    rows: usize,
    cols: usize,
    pixels: Vec<u8>,
}

impl fmt::Debug for Image {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Image")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .finish_non_exhaustive()
    }
}

impl Image {
    pub fn new(rows: usize, cols: usize, pixels: Vec<u8>) -> Result<Self, RasterError> {
        if rows == 0 || cols == 0 {
            return Err(RasterError::EmptyDimensions { rows, cols });
        }
        let expected = rows
            .checked_mul(cols)
            .ok_or(RasterError::EmptyDimensions { rows, cols })?;
        if pixels.len() != expected {
            return Err(RasterError::BufferLength {
                rows,
                cols,
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self { rows, cols, pixels })
    }

    pub fn filled(rows: usize, cols: usize, value: u8) -> Result<Self, RasterError> {
        Self::new(rows, cols, vec![value; rows * cols])
    }

    /// Builds an image by evaluating `f(row, col)` for every pixel.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self, RasterError> {
        let mut pixels = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                pixels.push(f(r, c));
            }
        }
        Self::new(rows, cols, pixels)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    /// Always false: construction rejects empty images.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn get_pixel(&self, row: usize, col: usize) -> Result<u8, RasterError> {
        if row >= self.rows || col >= self.cols {
            return Err(RasterError::OutOfRange {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(self.pixels[row * self.cols + col])
    }

    #[inline]
    pub fn contains(&self, row: i64, col: i64) -> bool {
        row >= 0 && col >= 0 && (row as u64) < self.rows as u64 && (col as u64) < self.cols as u64
    }

    /// Reads a possibly out-of-bounds coordinate according to `fill`.
    #[inline]
    pub fn resolve_sample(&self, row: i64, col: i64, fill: FillPolicy) -> u8 {
        if self.contains(row, col) {
            return self.pixels[row as usize * self.cols + col as usize];
        }
        match fill {
            FillPolicy::Zero => 0,
            FillPolicy::Clamp => {
                let r = row.clamp(0, self.rows as i64 - 1) as usize;
                let c = col.clamp(0, self.cols as i64 - 1) as usize;
                self.pixels[r * self.cols + c]
            }
        }
    }

    /// Nearest-neighbour resize: output `(r, c)` reads source
    /// `(r * rows / out_rows, c * cols / out_cols)` in integer arithmetic.
    pub fn resize_nearest(&self, out_rows: usize, out_cols: usize) -> Result<Image, RasterError> {
        Image::from_fn(out_rows, out_cols, |r, c| {
            let sr = r * self.rows / out_rows;
            let sc = c * self.cols / out_cols;
            self.pixels[sr * self.cols + sc]
        })
    }

    pub fn pole_is_valid(&self, pole: Pole) -> bool {
        pole.u < self.rows && pole.v < self.cols
    }
}

/// Origin of the polar sampling: `u` is the row, `v` the column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pole {
    pub u: usize,
    pub v: usize,
}

impl Pole {
    pub fn new(u: usize, v: usize) -> Self {
        Self { u, v }
    }
}

impl fmt::Display for Pole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.u, self.v)
    }
}

/// What an out-of-bounds sample resolves to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FillPolicy {
    /// Out-of-bounds samples read as intensity 0.
    #[default]
    Zero,
    /// Out-of-bounds coordinates are clamped to the nearest border pixel.
    Clamp,
}

impl FillPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            FillPolicy::Zero => "zero",
            FillPolicy::Clamp => "clamp",
        }
    }
}

impl fmt::Display for FillPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FillPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(FillPolicy::Zero),
            "clamp" => Ok(FillPolicy::Clamp),
            other => Err(format!(
                "unknown fill policy '{other}' (expected zero|clamp)"
            )),
        }
    }
}

/// Rounds half away from zero: `floor(t + 0.5)` for `t >= 0`, `ceil(t - 0.5)` otherwise.
///
/// Implemented with `f64::round`, which has exactly these semantics without the
/// double-rounding error of the `t + 0.5` addition near 0.5.
pub fn round_half_away(t: f64) -> Result<i64, RasterError> {
    if !t.is_finite() {
        return Err(RasterError::NonFinite(t));
    }
    Ok(t.round() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn two_by_two() -> Image {
        Image::new(2, 2, vec![1, 2, 3, 4]).unwrap()
    }

    #[test]
    fn get_pixel_examples() {
        let one = Image::new(1, 1, vec![42]).unwrap();
        assert_eq!(one.get_pixel(0, 0), Ok(42));
        assert_eq!(two_by_two().get_pixel(1, 0), Ok(3));
        let diag = Image::from_fn(3, 3, |r, c| if r == c { 9 } else { 0 }).unwrap();
        assert_eq!(diag.get_pixel(2, 2), Ok(9));
    }

    #[test]
    fn get_pixel_out_of_range() {
        let err = two_by_two().get_pixel(2, 0).unwrap_err();
        assert!(matches!(err, RasterError::OutOfRange { row: 2, .. }));
        assert!(two_by_two().get_pixel(0, 2).is_err());
    }

    #[test]
    fn construction_checks() {
        assert!(matches!(
            Image::new(0, 3, vec![]),
            Err(RasterError::EmptyDimensions { .. })
        ));
        assert!(matches!(
            Image::new(2, 2, vec![0; 3]),
            Err(RasterError::BufferLength {
                expected: 4,
                actual: 3,
                ..
            })
        ));
    }

    #[test]
    fn rounding_examples() {
        assert_eq!(round_half_away(0.5), Ok(1));
        assert_eq!(round_half_away(-0.5), Ok(-1));
        assert_eq!(round_half_away(2.3), Ok(2));
        assert_eq!(round_half_away(-2.5), Ok(-3));
        assert_eq!(round_half_away(0.49999999999999994), Ok(0));
        assert!(round_half_away(f64::NAN).is_err());
        assert!(round_half_away(f64::INFINITY).is_err());
    }

    #[test]
    fn resolve_sample_examples() {
        let img = two_by_two();
        assert_eq!(img.resolve_sample(0, 1, FillPolicy::Zero), 2);
        assert_eq!(img.resolve_sample(-1, 0, FillPolicy::Zero), 0);
        assert_eq!(img.resolve_sample(-1, 0, FillPolicy::Clamp), 1);
        assert_eq!(img.resolve_sample(5, 7, FillPolicy::Clamp), 4);
        assert_eq!(img.resolve_sample(i64::MIN, i64::MAX, FillPolicy::Clamp), 2);
    }

    #[test]
    fn resize_nearest_identity_and_upscale() {
        let img = two_by_two();
        assert_eq!(img.resize_nearest(2, 2).unwrap(), img);
        let up = img.resize_nearest(4, 4).unwrap();
        assert_eq!(
            up.pixels(),
            &[1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4]
        );
    }

    #[test]
    fn fill_policy_parses() {
        assert_eq!("zero".parse::<FillPolicy>(), Ok(FillPolicy::Zero));
        assert_eq!("clamp".parse::<FillPolicy>(), Ok(FillPolicy::Clamp));
        assert!("wrap".parse::<FillPolicy>().is_err());
    }

    proptest! {
        #[test]
        fn rounding_is_odd(t in -1.0e9f64..1.0e9) {
            prop_assert_eq!(round_half_away(-t).unwrap(), -round_half_away(t).unwrap());
        }

        #[test]
        fn rounding_matches_floor_ceil_definition(t in -1.0e6f64..1.0e6) {
            let expected = if t >= 0.0 { (t + 0.5).floor() } else { (t - 0.5).ceil() } as i64;
            prop_assert_eq!(round_half_away(t).unwrap(), expected);
        }

        #[test]
        fn in_bounds_samples_ignore_policy(
            rows in 1usize..8, cols in 1usize..8, seed in any::<u64>(), r in 0usize..8, c in 0usize..8
        ) {
            let img = Image::from_fn(rows, cols, |i, j| (seed.wrapping_mul(31).wrapping_add((i * 8 + j) as u64 * 2654435761) >> 7) as u8).unwrap();
            let (r, c) = (r % rows, c % cols);
            let direct = img.get_pixel(r, c).unwrap();
            prop_assert_eq!(img.resolve_sample(r as i64, c as i64, FillPolicy::Zero), direct);
            prop_assert_eq!(img.resolve_sample(r as i64, c as i64, FillPolicy::Clamp), direct);
        }

        #[test]
        fn resolve_sample_is_total(r in any::<i64>(), c in any::<i64>()) {
            let img = two_by_two();
            let z = img.resolve_sample(r, c, FillPolicy::Zero);
            let k = img.resolve_sample(r, c, FillPolicy::Clamp);
            prop_assert!(z <= 4 && (1..=4).contains(&k));
        }
    }
}

//! Affine baseline: a random composition of translation, rotation, shear and
//! scale applied by inverse mapping with nearest-neighbour sampling.
//!
//! Coordinates are `(row, col)`; the `x` components act on rows and the `y`
//! components on columns, the same convention the radial transform uses.
//! The forward matrix is
//!
//! ```text
//! T(center) · Translate · Rotate · Shear · Scale · T(-center)
//! ```
//!
//! with `Rotate = [[cos, sin], [-sin, cos]]`, `Shear = [[1, shear_x], [shear_y, 1]]`
//! and `Scale = diag(scale_x, scale_y)`.

use crate::raster::{round_half_away, FillPolicy, Image};
use crate::seed::splitmix64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const SINGULAR_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AffineError {
    #[error("scale factors must be positive and finite (got {0}, {1})")]
    Scale(f64, f64),
    #[error("parameter '{0}' is not finite")]
    NonFinite(&'static str),
    #[error("affine matrix is singular (determinant {0})")]
    Singular(f64),
    #[error("invalid sampler range for {name}: [{lo}, {hi}]")]
    Range {
        name: &'static str,
        lo: f64,
        hi: f64,
    },
}

/// Row-major 3x3 homogeneous matrix acting on `(row, col, 1)`.
pub type Matrix3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineParams {
    /// Radians.
    pub rotation: f64,
    pub scale_x: f64,
    pub scale_y: f64,
    pub shear_x: f64,
    pub shear_y: f64,
    /// Pixels along rows.
    pub translate_r: f64,
    /// Pixels along columns.
    pub translate_c: f64,
    /// `(row, col)` about which rotation, shear and scale act.
    pub center: (f64, f64),
}

impl AffineParams {
    pub fn identity() -> Self {
        Self {
            rotation: 0.0,
            scale_x: 1.0,
            scale_y: 1.0,
            shear_x: 0.0,
            shear_y: 0.0,
            translate_r: 0.0,
            translate_c: 0.0,
            center: (0.0, 0.0),
        }
    }

    /// Identity parameters centred on `img`.
    pub fn identity_for(img: &Image) -> Self {
        Self {
            center: image_center(img.rows(), img.cols()),
            ..Self::identity()
        }
    }

    pub fn validate(&self) -> Result<(), AffineError> {
        let fields = [
            ("rotation", self.rotation),
            ("scale_x", self.scale_x),
            ("scale_y", self.scale_y),
            ("shear_x", self.shear_x),
            ("shear_y", self.shear_y),
            ("translate_r", self.translate_r),
            ("translate_c", self.translate_c),
            ("center.row", self.center.0),
            ("center.col", self.center.1),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(AffineError::NonFinite(name));
            }
        }
        if self.scale_x <= 0.0 || self.scale_y <= 0.0 {
            return Err(AffineError::Scale(self.scale_x, self.scale_y));
        }
        let det = linear_det(&compose_unchecked(self));
        if det.abs() < SINGULAR_EPS {
            return Err(AffineError::Singular(det));
        }
        Ok(())
    }
}

/// Geometric centre `((rows-1)/2, (cols-1)/2)` in pixel coordinates.
pub fn image_center(rows: usize, cols: usize) -> (f64, f64) {
    ((rows as f64 - 1.0) / 2.0, (cols as f64 - 1.0) / 2.0)
}

fn mul(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

#[rustfmt::skip]
fn translation(dr: f64, dc: f64) -> Matrix3 {
    [[1.0, 0.0, dr],
     [0.0, 1.0, dc],
     [0.0, 0.0, 1.0]]
}

#[rustfmt::skip]
fn linear(a: f64, b: f64, c: f64, d: f64) -> Matrix3 {
    [[a,   b,   0.0],
     [c,   d,   0.0],
     [0.0, 0.0, 1.0]]
}

fn linear_det(m: &Matrix3) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn compose_unchecked(p: &AffineParams) -> Matrix3 {
    let (sin, cos) = p.rotation.sin_cos();
    let (cr, cc) = p.center;
    [
        translation(cr, cc),
        translation(p.translate_r, p.translate_c),
        linear(cos, sin, -sin, cos),
        linear(1.0, p.shear_x, p.shear_y, 1.0),
        linear(p.scale_x, 0.0, 0.0, p.scale_y),
        translation(-cr, -cc),
    ]
    .iter()
    .fold(translation(0.0, 0.0), |acc, m| mul(&acc, m))
}

/// Forward matrix mapping source `(row, col, 1)` to output coordinates.
pub fn compose_matrix(p: &AffineParams) -> Result<Matrix3, AffineError> {
    p.validate()?;
    Ok(compose_unchecked(p))
}

/// Inverse of an affine (last row `0 0 1`) matrix.
pub fn invert_affine(m: &Matrix3) -> Result<Matrix3, AffineError> {
    let det = linear_det(m);
    if !det.is_finite() || det.abs() < SINGULAR_EPS {
        return Err(AffineError::Singular(det));
    }
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    let (ia, ib, ic, id) = (d / det, -b / det, -c / det, a / det);
    let (tr, tc) = (m[0][2], m[1][2]);
    Ok([
        [ia, ib, -(ia * tr + ib * tc)],
        [ic, id, -(ic * tr + id * tc)],
        [0.0, 0.0, 1.0],
    ])
}

/// Warps `img` by `p`, keeping its size.
///
/// Output pixel `(r, c)` reads the source at the inverse-mapped coordinate,
/// rounded half away from zero and resolved through `fill`.
pub fn affine_transform(
    img: &Image,
    p: &AffineParams,
    fill: FillPolicy,
) -> Result<Image, AffineError> {
    let inv = invert_affine(&compose_matrix(p)?)?;
    let mut pixels = Vec::with_capacity(img.len());
    for r in 0..img.rows() {
        let (rf, base_r, base_c) = (r as f64, inv[0][2], inv[1][2]);
        for c in 0..img.cols() {
            let cf = c as f64;
            let sr = inv[0][0] * rf + inv[0][1] * cf + base_r;
            let sc = inv[1][0] * rf + inv[1][1] * cf + base_c;
            // Huge coordinates saturate in the cast and still resolve out of bounds.
            let sr = round_half_away(sr).map_err(|_| AffineError::NonFinite("source row"))?;
            let sc = round_half_away(sc).map_err(|_| AffineError::NonFinite("source col"))?;
            pixels.push(img.resolve_sample(sr, sc, fill));
        }
    }
    Ok(Image::new(img.rows(), img.cols(), pixels).expect("same dimensions as input"))
}

/// Uniform sampling ranges for [`AffineParams`].
///
/// Translation ranges are fractions of the image height (rows) and width (cols).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineRanges {
    pub rotation: (f64, f64),
    pub scale_x: (f64, f64),
    pub scale_y: (f64, f64),
    pub shear_x: (f64, f64),
    pub shear_y: (f64, f64),
    pub translate_frac_r: (f64, f64),
    pub translate_frac_c: (f64, f64),
}

impl Default for AffineRanges {
    /// ±30° rotation, scale in [0.8, 1.2], shear in [-0.2, 0.2], translation ±10%.
    fn default() -> Self {
        let rot = 30f64.to_radians();
        Self {
            rotation: (-rot, rot),
            scale_x: (0.8, 1.2),
            scale_y: (0.8, 1.2),
            shear_x: (-0.2, 0.2),
            shear_y: (-0.2, 0.2),
            translate_frac_r: (-0.1, 0.1),
            translate_frac_c: (-0.1, 0.1),
        }
    }
}

impl AffineRanges {
    /// Zero-width ranges at the identity.
    pub fn identity() -> Self {
        Self {
            rotation: (0.0, 0.0),
            scale_x: (1.0, 1.0),
            scale_y: (1.0, 1.0),
            shear_x: (0.0, 0.0),
            shear_y: (0.0, 0.0),
            translate_frac_r: (0.0, 0.0),
            translate_frac_c: (0.0, 0.0),
        }
    }

    fn named(&self) -> [(&'static str, (f64, f64)); 7] {
        [
            ("rotation", self.rotation),
            ("scale_x", self.scale_x),
            ("scale_y", self.scale_y),
            ("shear_x", self.shear_x),
            ("shear_y", self.shear_y),
            ("translate_frac_r", self.translate_frac_r),
            ("translate_frac_c", self.translate_frac_c),
        ]
    }

    /// Checks that every draw from these ranges yields valid parameters.
    pub fn validate(&self) -> Result<(), AffineError> {
        for (name, (lo, hi)) in self.named() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(AffineError::Range { name, lo, hi });
            }
        }
        for (name, (lo, hi)) in [("scale_x", self.scale_x), ("scale_y", self.scale_y)] {
            if lo <= 0.0 {
                return Err(AffineError::Range { name, lo, hi });
            }
        }
        // det = scale_x * scale_y * (1 - shear_x * shear_y); keep the shear product below 1.
        let max_sx = self.shear_x.0.abs().max(self.shear_x.1.abs());
        let max_sy = self.shear_y.0.abs().max(self.shear_y.1.abs());
        if max_sx * max_sy >= 1.0 - 1e-6 {
            return Err(AffineError::Range {
                name: "shear",
                lo: max_sx,
                hi: max_sy,
            });
        }
        Ok(())
    }

    /// Draws parameters for a `rows x cols` image from a ChaCha8 stream seeded with `seed`.
    pub fn draw(&self, seed: u64, rows: usize, cols: usize) -> AffineParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pick = |(lo, hi): (f64, f64)| lo + (hi - lo) * rng.random::<f64>();
        let rotation = pick(self.rotation);
        let scale_x = pick(self.scale_x);
        let scale_y = pick(self.scale_y);
        let shear_x = pick(self.shear_x);
        let shear_y = pick(self.shear_y);
        let translate_r = pick(self.translate_frac_r) * rows as f64;
        let translate_c = pick(self.translate_frac_c) * cols as f64;
        AffineParams {
            rotation,
            scale_x,
            scale_y,
            shear_x,
            shear_y,
            translate_r,
            translate_c,
            center: image_center(rows, cols),
        }
    }
}

/// Seeded source of affine parameters: draw `k` depends only on `(seed, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineSampler {
    ranges: AffineRanges,
    seed: u64,
}

impl AffineSampler {
    pub fn new(ranges: AffineRanges, seed: u64) -> Result<Self, AffineError> {
        ranges.validate()?;
        Ok(Self { ranges, seed })
    }

    pub fn ranges(&self) -> &AffineRanges {
        &self.ranges
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn draw_params(&self, k: u64, rows: usize, cols: usize) -> AffineParams {
        self.ranges
            .draw(splitmix64(self.seed ^ splitmix64(k)), rows, cols)
    }
}

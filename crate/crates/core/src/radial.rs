//! Radial transform: polar sampling of an image around a pole.
//!
//! Output row `m` is the ray at angle `2π·m/M`, output column `r` the
//! distance from the pole. Output pixel `(m, r)` reads the source at
//! `(u + round(r·cos θ_m), v + round(r·sin θ_m))`, so column 0 repeats the
//! pole pixel on every row.
//!
//! [`RayTable`] precomputes the rounded offsets once per `(M, R)` and is the
//! path used by [`radial_transform`] and the batch helpers.
//! [`radial_transform_naive`] evaluates the mapping per pixel and serves as
//! the reference the table kernel must match byte for byte.

use crate::raster::{round_half_away, FillPolicy, Image, Pole};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RadialError {
    #[error("ray index {m} out of range for {rays} rays")]
    RayIndex { m: usize, rays: usize },
    #[error("ray and radius counts must be positive (rays={rays}, radii={radii})")]
    ZeroSize { rays: usize, radii: usize },
    #[error("pole ({u},{v}) lies outside a {rows}x{cols} image")]
    InvalidPole {
        u: usize,
        v: usize,
        rows: usize,
        cols: usize,
    },
    #[error("radius count {0} exceeds the supported range")]
    RadiusTooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RadialParams {
    /// Number of rays; one output row per ray.
    pub rays: usize,
    /// Number of radii sampled per ray (`r = 0..radii`); one output column each.
    pub radii: usize,
    pub fill: FillPolicy,
}

impl RadialParams {
    pub fn new(rays: usize, radii: usize, fill: FillPolicy) -> Result<Self, RadialError> {
        if rays == 0 || radii == 0 {
            return Err(RadialError::ZeroSize { rays, radii });
        }
        if radii > i32::MAX as usize / 2 {
            return Err(RadialError::RadiusTooLarge(radii));
        }
        Ok(Self { rays, radii, fill })
    }

    /// Defaults for `img`: one ray per source row and radii `0..cols`, zero fill.
    pub fn for_image(img: &Image) -> Self {
        Self {
            rays: img.rows(),
            radii: img.cols(),
            fill: FillPolicy::Zero,
        }
    }

    pub fn with_fill(mut self, fill: FillPolicy) -> Self {
        self.fill = fill;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadialOutput {
    pub image: Image,
    pub pole: Pole,
    pub params: RadialParams,
}

/// Angle of ray `m` out of `rays`, evaluated as `2π·m/M` (never accumulated).
pub fn ray_angle(m: usize, rays: usize) -> Result<f64, RadialError> {
    if m >= rays {
        return Err(RadialError::RayIndex { m, rays });
    }
    Ok(angle_unchecked(m, rays))
}

#[inline]
fn angle_unchecked(m: usize, rays: usize) -> f64 {
    2.0 * PI * m as f64 / rays as f64
}

/// Rounded Cartesian offsets `(row, col)` of radius `r` along angle `theta`.
pub fn radial_offsets(r: usize, theta: f64) -> (i64, i64) {
    let (sin, cos) = (theta.sin(), theta.cos());
    offsets_from_trig(r, cos, sin)
}

#[inline]
fn offsets_from_trig(r: usize, cos: f64, sin: f64) -> (i64, i64) {
    let rf = r as f64;
    // cos/sin are finite and r is bounded, so rounding cannot fail.
    let dx = round_half_away(rf * cos).expect("finite offset");
    let dy = round_half_away(rf * sin).expect("finite offset");
    (dx, dy)
}

fn check_pole(img: &Image, pole: Pole) -> Result<(), RadialError> {
    if img.pole_is_valid(pole) {
        Ok(())
    } else {
        Err(RadialError::InvalidPole {
            u: pole.u,
            v: pole.v,
            rows: img.rows(),
            cols: img.cols(),
        })
    }
}

/// Per-pixel evaluation of the mapping, recomputing angle and trig for every cell.
pub fn radial_transform_naive(
    img: &Image,
    pole: Pole,
    params: RadialParams,
) -> Result<RadialOutput, RadialError> {
    check_pole(img, pole)?;
    let params = RadialParams::new(params.rays, params.radii, params.fill)?;
    let mut pixels = Vec::with_capacity(params.rays * params.radii);
    for m in 0..params.rays {
        for r in 0..params.radii {
            let theta = ray_angle(m, params.rays)?;
            let (dx, dy) = radial_offsets(r, theta);
            pixels.push(img.resolve_sample(pole.u as i64 + dx, pole.v as i64 + dy, params.fill));
        }
    }
    let image = Image::new(params.rays, params.radii, pixels).expect("dimensions checked");
    Ok(RadialOutput {
        image,
        pole,
        params,
    })
}

/// Precomputed rounded offsets for every `(ray, radius)` cell.
///
/// The table is independent of the source image and the pole, so one table
/// serves every transform with the same `(rays, radii)`.
#[derive(Debug, Clone)]
pub struct RayTable {
    rays: usize,
    radii: usize,
    // Row-major by ray: entry `m * radii + r`.
    dx: Vec<i32>,
    dy: Vec<i32>,
}

impl RayTable {
    pub fn new(rays: usize, radii: usize) -> Result<Self, RadialError> {
        RadialParams::new(rays, radii, FillPolicy::Zero)?;
        let mut dx = Vec::with_capacity(rays * radii);
        let mut dy = Vec::with_capacity(rays * radii);
        for m in 0..rays {
            let theta = angle_unchecked(m, rays);
            let (sin, cos) = (theta.sin(), theta.cos());
            for r in 0..radii {
                let (x, y) = offsets_from_trig(r, cos, sin);
                // |offset| <= r < i32::MAX / 2
                dx.push(x as i32);
                dy.push(y as i32);
            }
        }
        Ok(Self {
            rays,
            radii,
            dx,
            dy,
        })
    }

    pub fn rays(&self) -> usize {
        self.rays
    }

    pub fn radii(&self) -> usize {
        self.radii
    }

    /// Offsets `(row, col)` of cell `(m, r)` relative to the pole.
    pub fn offset(&self, m: usize, r: usize) -> (i32, i32) {
        let i = m * self.radii + r;
        (self.dx[i], self.dy[i])
    }

    /// Number of distinct pole-relative offsets touched by radii `0..=k` over all rays.
    pub fn footprint(&self, k: usize) -> usize {
        let k = k.min(self.radii - 1);
        let mut seen = HashSet::new();
        for m in 0..self.rays {
            for r in 0..=k {
                seen.insert(self.offset(m, r));
            }
        }
        seen.len()
    }

    /// Renders the transform at `pole` into `out` (`rays * radii` bytes).
    pub fn render_into(
        &self,
        img: &Image,
        pole: Pole,
        fill: FillPolicy,
        out: &mut [u8],
    ) -> Result<(), RadialError> {
        check_pole(img, pole)?;
        assert_eq!(out.len(), self.rays * self.radii, "output buffer size");
        let src = img.pixels();
        let (rows, cols) = (img.rows() as i64, img.cols() as i64);
        let (u, v) = (pole.u as i64, pole.v as i64);
        for ((row_out, dxs), dys) in out
            .chunks_exact_mut(self.radii)
            .zip(self.dx.chunks_exact(self.radii))
            .zip(self.dy.chunks_exact(self.radii))
        {
            match fill {
                FillPolicy::Zero => {
                    // Offsets are monotone along a ray, so once a sample leaves the
                    // image every later radius is outside as well.
                    let mut r = 0;
                    while r < self.radii {
                        let sr = u + dxs[r] as i64;
                        let sc = v + dys[r] as i64;
                        if (sr as u64) >= rows as u64 || (sc as u64) >= cols as u64 {
                            break;
                        }
                        row_out[r] = src[(sr * cols + sc) as usize];
                        r += 1;
                    }
                    row_out[r..].fill(0);
                }
                FillPolicy::Clamp => {
                    for ((o, &dx), &dy) in row_out.iter_mut().zip(dxs).zip(dys) {
                        let sr = (u + dx as i64).clamp(0, rows - 1);
                        let sc = (v + dy as i64).clamp(0, cols - 1);
                        *o = src[(sr * cols + sc) as usize];
                    }
                }
            }
        }
        Ok(())
    }

    pub fn render(&self, img: &Image, pole: Pole, fill: FillPolicy) -> Result<Image, RadialError> {
        let mut out = vec![0u8; self.rays * self.radii];
        self.render_into(img, pole, fill, &mut out)?;
        Ok(Image::new(self.rays, self.radii, out).expect("dimensions checked"))
    }
}

/// Radial transform of `img` about `pole`.
pub fn radial_transform(
    img: &Image,
    pole: Pole,
    params: RadialParams,
) -> Result<RadialOutput, RadialError> {
    check_pole(img, pole)?;
    let table = RayTable::new(params.rays, params.radii)?;
    let image = table.render(img, pole, params.fill)?;
    Ok(RadialOutput {
        image,
        pole,
        params,
    })
}

/// Transforms `img` at every pole in `poles`, in parallel on the current rayon pool.
///
/// Output order follows `poles`.
pub fn radial_batch(
    img: &Image,
    poles: &[Pole],
    params: RadialParams,
) -> Result<Vec<RadialOutput>, RadialError> {
    let table = RayTable::new(params.rays, params.radii)?;
    poles
        .par_iter()
        .map(|&pole| {
            Ok(RadialOutput {
                image: table.render(img, pole, params.fill)?,
                pole,
                params,
            })
        })
        .collect()
}

/// Streams one transform per source pixel, poles in row-major order.
pub fn enumerate_pole_transforms(
    img: &Image,
    params: RadialParams,
) -> Result<PoleTransforms<'_>, RadialError> {
    Ok(PoleTransforms {
        img,
        table: RayTable::new(params.rays, params.radii)?,
        params,
        next: 0,
    })
}

pub struct PoleTransforms<'a> {
    img: &'a Image,
    table: RayTable,
    params: RadialParams,
    next: usize,
}

impl PoleTransforms<'_> {
    /// Renders the next transform into a caller-owned buffer, returning its pole.
    ///
    /// Avoids one allocation per pole when only the bytes are needed.
    pub fn next_into(&mut self, out: &mut [u8]) -> Option<Pole> {
        let pole = self.advance()?;
        self.table
            .render_into(self.img, pole, self.params.fill, out)
            .expect("enumerated poles are in bounds");
        Some(pole)
    }

    fn advance(&mut self) -> Option<Pole> {
        if self.next >= self.img.len() {
            return None;
        }
        let cols = self.img.cols();
        let pole = Pole::new(self.next / cols, self.next % cols);
        self.next += 1;
        Some(pole)
    }
}

impl Iterator for PoleTransforms<'_> {
    type Item = RadialOutput;

    fn next(&mut self) -> Option<RadialOutput> {
        let pole = self.advance()?;
        let image = self
            .table
            .render(self.img, pole, self.params.fill)
            .expect("enumerated poles are in bounds");
        Some(RadialOutput {
            image,
            pole,
            params: self.params,
        })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.img.len() - self.next;
        (left, Some(left))
    }
}

impl ExactSizeIterator for PoleTransforms<'_> {}

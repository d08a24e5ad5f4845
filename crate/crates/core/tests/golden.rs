//! Outputs checked against files produced by `tests/golden/generate.py`.

use radaug::affine::{affine_transform, AffineParams};
use radaug::io::read_image;
use radaug::radial::{enumerate_pole_transforms, radial_transform, RadialParams};
use radaug::seed::splitmix64;
use radaug::{FillPolicy, Image, Pole};
use std::collections::HashSet;
use std::f64::consts::PI;
use std::path::PathBuf;

fn golden(name: &str) -> Image {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    read_image(path).unwrap()
}

/// Pixel `i` is the top byte of `splitmix64(seed + i)`; mirrored by the generator script.
fn seeded(rows: usize, cols: usize, seed: u64) -> Image {
    Image::from_fn(rows, cols, |r, c| {
        (splitmix64(seed.wrapping_add((r * cols + c) as u64)) >> 56) as u8
    })
    .unwrap()
}

#[test]
fn radial_16x16_matches_golden() {
    let src = seeded(16, 16, 2024);
    let params = RadialParams::new(16, 16, FillPolicy::Zero).unwrap();
    let out = radial_transform(&src, Pole::new(5, 9), params).unwrap();
    assert_eq!(
        out.image,
        golden("radial_16x16_seed2024_pole5_9_m16_r16.pgm")
    );
}

#[test]
fn affine_quarter_turn_matches_golden() {
    let src = seeded(7, 7, 77);
    let p = AffineParams {
        rotation: PI / 2.0,
        ..AffineParams::identity_for(&src)
    };
    let out = affine_transform(&src, &p, FillPolicy::Zero).unwrap();
    assert_eq!(out, golden("affine_7x7_seed77_rot90.pgm"));
}

#[test]
fn seeded_8x8_distinct_pole_outputs() {
    // Brute-force count from the generator script.
    const EXPECTED: usize = 64;
    let src = seeded(8, 8, 8);
    let params = RadialParams::new(8, 8, FillPolicy::Zero).unwrap();
    let distinct: HashSet<Vec<u8>> = enumerate_pole_transforms(&src, params)
        .unwrap()
        .map(|o| o.image.into_pixels())
        .collect();
    assert_eq!(distinct.len(), EXPECTED);
}

//! Seeded synthetic shape images for desk-scale experiments.

use crate::io::{write_image, IoError};
use crate::raster::Image;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fs;
use std::path::Path;

pub const SHAPE_CLASSES: [&str; 3] = ["cross", "disk", "square"];

/// One noisy `side x side` image of shape class `class` (index into [`SHAPE_CLASSES`]).
pub fn shape_image(class: usize, side: usize, rng: &mut impl Rng) -> Image {
    let side_f = side as f64;
    let size = rng.random_range(0.18..0.3) * side_f;
    let margin = size + 1.0;
    let cr = rng.random_range(margin..side_f - margin);
    let cc = rng.random_range(margin..side_f - margin);
    let fg: u8 = rng.random_range(160..=255);
    let thickness = (size * 0.35).max(1.0);
    let noise: Vec<u8> = (0..side * side).map(|_| rng.random_range(0..48)).collect();
    Image::from_fn(side, side, |r, c| {
        let (dr, dc) = (r as f64 - cr, c as f64 - cc);
        let inside = match class {
            0 => {
                (dr.abs() <= thickness && dc.abs() <= size)
                    || (dc.abs() <= thickness && dr.abs() <= size)
            }
            1 => dr * dr + dc * dc <= size * size,
            _ => dr.abs() <= size * 0.85 && dc.abs() <= size * 0.85,
        };
        let n = noise[r * side + c];
        if inside {
            fg.saturating_sub(n)
        } else {
            n
        }
    })
    .expect("positive side")
}

/// `per_class` images for each shape class, class-major order.
pub fn shapes(seed: u64, per_class: usize, side: usize) -> Vec<(Image, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(per_class * SHAPE_CLASSES.len());
    for class in 0..SHAPE_CLASSES.len() {
        for _ in 0..per_class {
            out.push((shape_image(class, side, &mut rng), class));
        }
    }
    out
}

/// Writes `items` as `root/<class>/<class>_<nnnn>.pgm`.
pub fn write_labeled(
    root: &Path,
    class_names: &[&str],
    items: &[(Image, usize)],
) -> Result<(), IoError> {
    let mut counters = vec![0usize; class_names.len()];
    for (img, class) in items {
        let dir = root.join(class_names[*class]);
        fs::create_dir_all(&dir).map_err(|source| IoError::Write {
            path: dir.clone(),
            source,
        })?;
        let name = format!("{}_{:04}.pgm", class_names[*class], counters[*class]);
        counters[*class] += 1;
        write_image(img, dir.join(name))?;
    }
    Ok(())
}

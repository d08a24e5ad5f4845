//! Radial (polar-coordinate) and affine image augmentation, seeded dataset
//! expansion, and a small evaluation harness with majority-vote inference.

pub mod affine;
pub mod eval;
pub mod expander;
pub mod io;
pub mod radial;
pub mod raster;
pub mod seed;
pub mod synth;

pub use raster::{FillPolicy, Image, Pole};

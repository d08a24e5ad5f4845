//! Image files, labeled dataset trees and augmentation manifests.

mod dataset;
mod manifest;
pub mod pgm;

pub use dataset::{load_dataset, DatasetItem, LabeledDataset};
pub use manifest::{
    read_manifest, write_manifest, DatasetManifest, ManifestRecord, TransformRecord,
    MANIFEST_FORMAT, MANIFEST_VERSION,
};

use crate::raster::Image;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("file not found: {0}")]
    NotFound(PathBuf),
    #[error("failed to read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported bit depth: {0}")]
    UnsupportedDepth(String),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("truncated raster: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("PNG decode error: {0}")]
    Png(String),
    #[error("{path}: {message}")]
    Dataset { path: PathBuf, message: String },
    #[error("manifest line {line}: {message}")]
    ManifestParse { line: usize, message: String },
}

impl IoError {
    /// True for errors caused by the file contents rather than the filesystem.
    pub fn is_decode_error(&self) -> bool {
        matches!(
            self,
            IoError::MalformedHeader(_)
                | IoError::UnsupportedDepth(_)
                | IoError::UnsupportedFormat(_)
                | IoError::Truncated { .. }
                | IoError::Png(_)
        )
    }
}

const PNG_MAGIC: &[u8] = b"\x89PNG\r\n\x1a\n";

fn read_bytes(path: &Path) -> Result<Vec<u8>, IoError> {
    fs::read(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            IoError::NotFound(path.to_path_buf())
        } else {
            IoError::Read {
                path: path.to_path_buf(),
                source,
            }
        }
    })
}

/// Decodes an in-memory P5 or 8-bit grayscale PNG file, sniffing the magic bytes.
pub fn decode_image(data: &[u8]) -> Result<Image, IoError> {
    if data.starts_with(PNG_MAGIC) {
        decode_png(data)
    } else if data.first() == Some(&b'P') {
        pgm::decode(data)
    } else {
        Err(IoError::UnsupportedFormat("not a PGM or PNG file".into()))
    }
}

pub fn read_image(path: impl AsRef<Path>) -> Result<Image, IoError> {
    decode_image(&read_bytes(path.as_ref())?)
}

/// Writes `img`, as PNG when the extension is `png` and canonical P5 otherwise.
pub fn write_image(img: &Image, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let is_png = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    let bytes = if is_png {
        encode_png(img)?
    } else {
        pgm::encode(img)
    };
    fs::write(path, bytes).map_err(|source| IoError::Write {
        path: path.to_path_buf(),
        source,
    })
}

fn decode_png(data: &[u8]) -> Result<Image, IoError> {
    let decoder = png::Decoder::new(data);
    let mut reader = decoder
        .read_info()
        .map_err(|e| IoError::Png(e.to_string()))?;
    let (color, depth) = reader.output_color_type();
    if color != png::ColorType::Grayscale {
        return Err(IoError::UnsupportedFormat(format!(
            "PNG color type {color:?}"
        )));
    }
    if depth != png::BitDepth::Eight {
        return Err(IoError::UnsupportedDepth(format!(
            "PNG bit depth {depth:?}"
        )));
    }
    let mut buf = vec![0; reader.output_buffer_size()];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| IoError::Png(e.to_string()))?;
    let (rows, cols) = (frame.height as usize, frame.width as usize);
    let mut pixels = Vec::with_capacity(rows * cols);
    for line in buf.chunks(frame.line_size).take(rows) {
        pixels.extend_from_slice(&line[..cols]);
    }
    Image::new(rows, cols, pixels).map_err(|e| IoError::MalformedHeader(e.to_string()))
}

fn encode_png(img: &Image) -> Result<Vec<u8>, IoError> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, img.cols() as u32, img.rows() as u32);
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder
            .write_header()
            .map_err(|e| IoError::Png(e.to_string()))?;
        writer
            .write_image_data(img.pixels())
            .map_err(|e| IoError::Png(e.to_string()))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn png_round_trip_is_pixel_exact() {
        let dir = tempfile::tempdir().unwrap();
        let img = Image::from_fn(5, 7, |r, c| (r * 40 + c * 3) as u8).unwrap();
        let path = dir.path().join("x.png");
        write_image(&img, &path).unwrap();
        assert!(fs::read(&path).unwrap().starts_with(PNG_MAGIC));
        assert_eq!(read_image(&path).unwrap(), img);
    }

    #[test]
    fn rgb_png_rejected() {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, 1, 1);
            enc.set_color(png::ColorType::Rgb);
            enc.set_depth(png::BitDepth::Eight);
            enc.write_header()
                .unwrap()
                .write_image_data(&[1, 2, 3])
                .unwrap();
        }
        assert!(matches!(
            decode_image(&out),
            Err(IoError::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn sixteen_bit_png_rejected() {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, 1, 1);
            enc.set_color(png::ColorType::Grayscale);
            enc.set_depth(png::BitDepth::Sixteen);
            enc.write_header()
                .unwrap()
                .write_image_data(&[1, 2])
                .unwrap();
        }
        assert!(matches!(
            decode_image(&out),
            Err(IoError::UnsupportedDepth(_))
        ));
    }

    #[test]
    fn missing_file_is_not_found() {
        let err = read_image("/definitely/not/here.pgm").unwrap_err();
        assert!(matches!(err, IoError::NotFound(_)));
        assert!(!err.is_decode_error());
    }

    #[test]
    fn unknown_bytes_rejected() {
        let err = decode_image(b"\xff\xd8\xff\xe0").unwrap_err();
        assert!(matches!(err, IoError::UnsupportedFormat(_)));
        assert!(err.is_decode_error());
    }

    #[test]
    fn write_twice_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let img = Image::from_fn(16, 16, |r, c| (r ^ c) as u8).unwrap();
        let (a, b) = (dir.path().join("a.pgm"), dir.path().join("b.pgm"));
        write_image(&img, &a).unwrap();
        write_image(&img, &b).unwrap();
        assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
    }

    #[test]
    fn write_into_missing_directory_fails() {
        let img = Image::filled(1, 1, 0).unwrap();
        let err = write_image(&img, "/definitely/not/here/x.pgm").unwrap_err();
        assert!(matches!(err, IoError::Write { .. }));
    }

    proptest! {
        #[test]
        fn pgm_encode_decode_identity(rows in 1usize..24, cols in 1usize..24, seed in any::<u64>()) {
            let img = Image::from_fn(rows, cols, |r, c| {
                crate::seed::splitmix64(seed ^ (r * cols + c) as u64) as u8
            }).unwrap();
            let bytes = pgm::encode(&img);
            let back = pgm::decode(&bytes).unwrap();
            prop_assert_eq!(pgm::encode(&back), bytes);
            prop_assert_eq!(back, img);
        }
    }
}

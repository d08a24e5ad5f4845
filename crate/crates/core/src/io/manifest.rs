//! Line-delimited JSON manifest of augmented images.
//!
//! The first line is a header object carrying the format tag, version and
//! class names; every following line is one [`ManifestRecord`]. Field order
//! is fixed by the struct declarations.

use super::IoError;
use crate::affine::AffineParams;
use crate::raster::{FillPolicy, Pole};
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const MANIFEST_FORMAT: &str = "radaug-manifest";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    version: u32,
    classes: Vec<String>,
}

/// Transform applied to produce one output, with everything needed to replay it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TransformRecord {
    Identity,
    Radial {
        pole: Pole,
        rays: usize,
        radii: usize,
        fill: FillPolicy,
    },
    Affine {
        params: AffineParams,
        fill: FillPolicy,
    },
}

impl TransformRecord {
    pub fn kind(&self) -> &'static str {
        match self {
            TransformRecord::Identity => "identity",
            TransformRecord::Radial { .. } => "radial",
            TransformRecord::Affine { .. } => "affine",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    /// Source image path as listed in the input dataset.
    pub source: String,
    pub class: usize,
    pub transform: TransformRecord,
    pub master_seed: u64,
    pub source_index: usize,
    pub aug_index: usize,
    /// Output path relative to the manifest's directory.
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetManifest {
    pub classes: Vec<String>,
    pub records: Vec<ManifestRecord>,
}

impl DatasetManifest {
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for r in &self.records {
            counts[r.class] += 1;
        }
        counts
    }

    pub fn write_to(&self, mut w: impl Write) -> std::io::Result<()> {
        let header = Header {
            format: MANIFEST_FORMAT.into(),
            version: MANIFEST_VERSION,
            classes: self.classes.clone(),
        };
        serde_json::to_writer(&mut w, &header)?;
        w.write_all(b"\n")?;
        for record in &self.records {
            serde_json::to_writer(&mut w, record)?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    pub fn read_from(r: impl Read) -> Result<Self, IoError> {
        let mut lines = BufReader::new(r).lines().enumerate();
        let io_err = |line: usize, e: std::io::Error| IoError::ManifestParse {
            line,
            message: e.to_string(),
        };
        let header: Header = match lines.next() {
            Some((_, line)) => {
                let line = line.map_err(|e| io_err(1, e))?;
                serde_json::from_str(&line).map_err(|e| IoError::ManifestParse {
                    line: 1,
                    message: format!("bad header: {e}"),
                })?
            }
            None => {
                return Err(IoError::ManifestParse {
                    line: 1,
                    message: "missing header".into(),
                })
            }
        };
        if header.format != MANIFEST_FORMAT || header.version != MANIFEST_VERSION {
            return Err(IoError::ManifestParse {
                line: 1,
                message: format!("unsupported manifest {} v{}", header.format, header.version),
            });
        }
        let mut records = Vec::new();
        for (idx, line) in lines {
            let number = idx + 1;
            let line = line.map_err(|e| io_err(number, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let record: ManifestRecord =
                serde_json::from_str(&line).map_err(|e| IoError::ManifestParse {
                    line: number,
                    message: e.to_string(),
                })?;
            if record.class >= header.classes.len() {
                return Err(IoError::ManifestParse {
                    line: number,
                    message: format!("class index {} out of range", record.class),
                });
            }
            records.push(record);
        }
        Ok(Self {
            classes: header.classes,
            records,
        })
    }
}

pub fn write_manifest(manifest: &DatasetManifest, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let write_err = |source| IoError::Write {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(write_err)?;
    manifest.write_to(BufWriter::new(file)).map_err(write_err)
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest, IoError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            IoError::NotFound(path.to_path_buf())
        } else {
            IoError::Read {
                path: path.to_path_buf(),
                source,
            }
        }
    })?;
    DatasetManifest::read_from(file)
}

//! Seeded dataset expansion: identity copies, radial transforms at random
//! poles, or random affine warps, `per_image` outputs per original.
//!
//! Every output depends only on `(master_seed, source_index, aug_index)`
//! through [`derive_item_seed`], so serial and parallel runs write the same
//! tree and the same manifest.

use crate::affine::{affine_transform, AffineError, AffineRanges};
use crate::io::{
    read_image, write_image, write_manifest, DatasetManifest, IoError, LabeledDataset,
    ManifestRecord, TransformRecord,
};
use crate::radial::{radial_transform, RadialError, RadialParams};
use crate::raster::{FillPolicy, Image, Pole};
use crate::seed::splitmix64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const MANIFEST_FILE: &str = "manifest.jsonl";

/// Default number of augmentations per original.
pub const DEFAULT_PER_IMAGE: usize = 100;

#[derive(Debug, Error)]
pub enum ExpandError {
    #[error("invalid expansion plan: {0}")]
    InvalidPlan(String),
    #[error("cannot decode {path}: {source}")]
    Decode { path: PathBuf, source: IoError },
    #[error("cannot write output: {0}")]
    Output(IoError),
    #[error("radial transform failed for {path}: {source}")]
    Radial { path: PathBuf, source: RadialError },
    #[error("affine transform failed for {path}: {source}")]
    Affine { path: PathBuf, source: AffineError },
}

/// Mixes `(master_seed, source_index, aug_index)` into one item seed:
/// `splitmix64(splitmix64(splitmix64(master) ^ source) ^ aug)`.
pub fn derive_item_seed(master_seed: u64, source_index: u64, aug_index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ source_index) ^ aug_index)
}

/// Uniform pole over all `rows x cols` pixels, determined by `seed`.
pub fn pick_pole(seed: u64, rows: usize, cols: usize) -> Pole {
    assert!(rows > 0 && cols > 0, "image dimensions must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = rng.random_range(0..rows * cols);
    Pole::new(idx / cols, idx % cols)
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanKind {
    Identity,
    /// `None` for rays/radii means source rows/cols.
    Radial {
        rays: Option<usize>,
        radii: Option<usize>,
        fill: FillPolicy,
    },
    Affine {
        ranges: AffineRanges,
        fill: FillPolicy,
    },
}

impl PlanKind {
    pub fn name(&self) -> &'static str {
        match self {
            PlanKind::Identity => "identity",
            PlanKind::Radial { .. } => "radial",
            PlanKind::Affine { .. } => "affine",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionPlan {
    pub kind: PlanKind,
    pub per_image: usize,
    pub master_seed: u64,
    pub out_root: PathBuf,
    /// Worker threads; 1 runs serially on the calling thread.
    pub workers: usize,
}

impl ExpansionPlan {
    pub fn identity(master_seed: u64, out_root: impl Into<PathBuf>) -> Self {
        Self {
            kind: PlanKind::Identity,
            per_image: 1,
            master_seed,
            out_root: out_root.into(),
            workers: 1,
        }
    }

    pub fn radial(per_image: usize, master_seed: u64, out_root: impl Into<PathBuf>) -> Self {
        Self {
            kind: PlanKind::Radial {
                rays: None,
                radii: None,
                fill: FillPolicy::Zero,
            },
            per_image,
            master_seed,
            out_root: out_root.into(),
            workers: 1,
        }
    }

    pub fn affine(per_image: usize, master_seed: u64, out_root: impl Into<PathBuf>) -> Self {
        Self {
            kind: PlanKind::Affine {
                ranges: AffineRanges::default(),
                fill: FillPolicy::Zero,
            },
            per_image,
            master_seed,
            out_root: out_root.into(),
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<(), ExpandError> {
        if self.per_image == 0 {
            return Err(ExpandError::InvalidPlan(
                "per_image must be at least 1".into(),
            ));
        }
        if self.workers == 0 {
            return Err(ExpandError::InvalidPlan(
                "workers must be at least 1".into(),
            ));
        }
        match &self.kind {
            PlanKind::Identity if self.per_image != 1 => Err(ExpandError::InvalidPlan(
                "identity expansion produces exactly one output per image".into(),
            )),
            PlanKind::Radial { rays, radii, .. } if *rays == Some(0) || *radii == Some(0) => Err(
                ExpandError::InvalidPlan("rays and radii must be positive".into()),
            ),
            PlanKind::Affine { ranges, .. } => ranges
                .validate()
                .map_err(|e| ExpandError::InvalidPlan(e.to_string())),
            _ => Ok(()),
        }
    }

    /// Transform for augmentation `aug_index` of source `source_index` (an `rows x cols` image).
    pub fn transform_for(
        &self,
        source_index: usize,
        aug_index: usize,
        rows: usize,
        cols: usize,
    ) -> TransformRecord {
        let seed = derive_item_seed(self.master_seed, source_index as u64, aug_index as u64);
        match &self.kind {
            PlanKind::Identity => TransformRecord::Identity,
            PlanKind::Radial { rays, radii, fill } => TransformRecord::Radial {
                pole: pick_pole(seed, rows, cols),
                rays: rays.unwrap_or(rows),
                radii: radii.unwrap_or(cols),
                fill: *fill,
            },
            PlanKind::Affine { ranges, fill } => TransformRecord::Affine {
                params: ranges.draw(seed, rows, cols),
                fill: *fill,
            },
        }
    }
}

/// Applies a recorded transform to `img`. `path` only labels errors.
pub fn apply_transform(
    img: &Image,
    transform: &TransformRecord,
    path: &Path,
) -> Result<Image, ExpandError> {
    match transform {
        TransformRecord::Identity => Ok(img.clone()),
        TransformRecord::Radial {
            pole,
            rays,
            radii,
            fill,
        } => {
            let radial_err = |source| ExpandError::Radial {
                path: path.to_path_buf(),
                source,
            };
            let params = RadialParams::new(*rays, *radii, *fill).map_err(radial_err)?;
            radial_transform(img, *pole, params)
                .map(|o| o.image)
                .map_err(radial_err)
        }
        TransformRecord::Affine { params, fill } => {
            affine_transform(img, params, *fill).map_err(|source| ExpandError::Affine {
                path: path.to_path_buf(),
                source,
            })
        }
    }
}

/// First 8 hex digits of the SHA-256 of the transform's manifest encoding.
pub fn params_digest(transform: &TransformRecord) -> String {
    let encoded = serde_json::to_vec(transform).expect("transform records always serialize");
    hex::encode(&Sha256::digest(&encoded)[..4])
}

/// `<class>/<stem>__<kind><index>_<digest>.pgm`, relative to the output root.
pub fn output_name(
    class: &str,
    stem: &str,
    aug_index: usize,
    transform: &TransformRecord,
) -> String {
    format!(
        "{class}/{stem}__{}{aug_index:03}_{}.pgm",
        transform.kind(),
        params_digest(transform)
    )
}

fn source_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn expand_source(
    dataset: &LabeledDataset,
    plan: &ExpansionPlan,
    source_index: usize,
    parallel: bool,
) -> Result<Vec<ManifestRecord>, ExpandError> {
    let item = &dataset.items[source_index];
    let img = read_image(&item.path).map_err(|source| ExpandError::Decode {
        path: item.path.clone(),
        source,
    })?;
    let class = &dataset.classes[item.class];
    let stem = source_stem(&item.path);
    let one = |aug_index: usize| -> Result<ManifestRecord, ExpandError> {
        let transform = plan.transform_for(source_index, aug_index, img.rows(), img.cols());
        let out = apply_transform(&img, &transform, &item.path)?;
        let output = output_name(class, &stem, aug_index, &transform);
        write_image(&out, plan.out_root.join(&output)).map_err(ExpandError::Output)?;
        Ok(ManifestRecord {
            source: item.path.to_string_lossy().into_owned(),
            class: item.class,
            transform,
            master_seed: plan.master_seed,
            source_index,
            aug_index,
            output,
        })
    };
    if parallel {
        (0..plan.per_image).into_par_iter().map(one).collect()
    } else {
        (0..plan.per_image).map(one).collect()
    }
}

/// Expands `dataset` under `plan.out_root`, writing every image and the manifest.
///
/// Records are ordered by `(source_index, aug_index)` whatever the worker count.
pub fn expand(
    dataset: &LabeledDataset,
    plan: &ExpansionPlan,
) -> Result<DatasetManifest, ExpandError> {
    plan.validate()?;
    let mut stems = HashSet::new();
    for item in &dataset.items {
        if !stems.insert((item.class, source_stem(&item.path))) {
            return Err(ExpandError::InvalidPlan(format!(
                "{} shares its file stem with another image of the same class",
                item.path.display()
            )));
        }
    }
    for class in &dataset.classes {
        let dir = plan.out_root.join(class);
        fs::create_dir_all(&dir)
            .map_err(|source| ExpandError::Output(IoError::Write { path: dir, source }))?;
    }

    let sources = 0..dataset.items.len();
    let per_source: Vec<Result<Vec<ManifestRecord>, ExpandError>> = if plan.workers == 1 {
        sources
            .map(|s| expand_source(dataset, plan, s, false))
            .collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(plan.workers)
            .build()
            .map_err(|e| ExpandError::InvalidPlan(format!("thread pool: {e}")))?;
        pool.install(|| {
            sources
                .into_par_iter()
                .map(|s| expand_source(dataset, plan, s, true))
                .collect()
        })
    };

    let mut records = Vec::with_capacity(dataset.items.len() * plan.per_image);
    for result in per_source {
        records.extend(result?);
    }
    let manifest = DatasetManifest {
        classes: dataset.classes.clone(),
        records,
    };
    write_manifest(&manifest, plan.out_root.join(MANIFEST_FILE)).map_err(ExpandError::Output)?;
    Ok(manifest)
}

/// Re-runs a record's transform on its source image.
pub fn replay_record(record: &ManifestRecord) -> Result<Image, ExpandError> {
    let path = PathBuf::from(&record.source);
    let img = read_image(&path).map_err(|source| ExpandError::Decode {
        path: path.clone(),
        source,
    })?;
    apply_transform(&img, &record.transform, &path)
}

/// SHA-256 over every file below `root`: sorted relative paths, lengths and contents.
pub fn tree_digest(root: impl AsRef<Path>) -> std::io::Result<String> {
    fn walk(dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.is_dir() {
                walk(&path, out)?;
            } else {
                out.push(path);
            }
        }
        Ok(())
    }
    let root = root.as_ref();
    let mut files = Vec::new();
    walk(root, &mut files)?;
    files.sort();
    let mut hasher = Sha256::new();
    for path in files {
        let rel = path.strip_prefix(root).expect("walked below root");
        let data = fs::read(&path)?;
        hasher.update(rel.to_string_lossy().as_bytes());
        hasher.update([0]);
        hasher.update((data.len() as u64).to_le_bytes());
        hasher.update(&data);
    }
    Ok(hex::encode(hasher.finalize()))
}

use super::IoError;
use std::fs;
use std::path::{Path, PathBuf};

/// Image file extensions picked up by [`load_dataset`].
const IMAGE_EXTENSIONS: [&str; 2] = ["pgm", "png"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetItem {
    pub class: usize,
    pub path: PathBuf,
}

/// A class-per-directory image collection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDataset {
    pub root: PathBuf,
    /// Class names, sorted.
    pub classes: Vec<String>,
    /// Items sorted by path.
    pub items: Vec<DatasetItem>,
}

impl LabeledDataset {
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for item in &self.items {
            counts[item.class] += 1;
        }
        counts
    }
}

fn list_dir(path: &Path) -> Result<Vec<fs::DirEntry>, IoError> {
    let read_err = |source| IoError::Read {
        path: path.to_path_buf(),
        source,
    };
    let mut entries = fs::read_dir(path)
        .map_err(|source| {
            if source.kind() == std::io::ErrorKind::NotFound {
                IoError::NotFound(path.to_path_buf())
            } else {
                read_err(source)
            }
        })?
        .collect::<Result<Vec<_>, _>>()
        .map_err(read_err)?;
    entries.retain(|e| !e.file_name().to_string_lossy().starts_with('.'));
    entries.sort_by_key(|e| e.file_name());
    Ok(entries)
}

/// Scans `root/<class>/<image>` into a dataset.
///
/// Class names come from subdirectory names. Files without a `.pgm` or
/// `.png` extension are skipped; images are decoded later, by the consumer.
pub fn load_dataset(root: impl AsRef<Path>) -> Result<LabeledDataset, IoError> {
    let root = root.as_ref();
    let mut classes = Vec::new();
    let mut items = Vec::new();
    for entry in list_dir(root)? {
        let class_dir = entry.path();
        if !class_dir.is_dir() {
            continue;
        }
        let name = entry.file_name().to_string_lossy().into_owned();
        let class = classes.len();
        let before = items.len();
        for file in list_dir(&class_dir)? {
            let path = file.path();
            let is_image = path.is_file()
                && path.extension().is_some_and(|ext| {
                    IMAGE_EXTENSIONS
                        .iter()
                        .any(|known| ext.eq_ignore_ascii_case(known))
                });
            if is_image {
                items.push(DatasetItem { class, path });
            }
        }
        if items.len() == before {
            return Err(IoError::Dataset {
                path: class_dir,
                message: "class directory contains no images".into(),
            });
        }
        classes.push(name);
    }
    if classes.is_empty() {
        return Err(IoError::Dataset {
            path: root.to_path_buf(),
            message: "no class directories found".into(),
        });
    }
    items.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(LabeledDataset {
        root: root.to_path_buf(),
        classes,
        items,
    })
}

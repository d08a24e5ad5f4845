//! Desk-scale evaluation: stand-in probabilistic classifiers, per-class
//! accuracy (υ) and top-one confidence (κ), and majority-vote inference over
//! radial transforms taken at several poles.

use crate::expander::{derive_item_seed, pick_pole};
use crate::io::{read_image, DatasetManifest, IoError, LabeledDataset, TransformRecord};
use crate::radial::{RadialError, RadialParams, RayTable};
use crate::raster::{FillPolicy, Image, Pole};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("empty test set")]
    EmptyTestSet,
    #[error("{preds} predictions but {labels} labels")]
    LengthMismatch { preds: usize, labels: usize },
    #[error("class index {class} out of range for {classes} classes")]
    InvalidClass { class: usize, classes: usize },
    #[error("empty pole set")]
    NoPoles,
    #[error("class {0} has no training samples")]
    EmptyClass(usize),
    #[error("configuration mismatch: {0}")]
    Config(String),
    #[error(transparent)]
    Radial(#[from] RadialError),
    #[error("cannot load {path}: {source}")]
    Load { path: PathBuf, source: IoError },
}

/// A classifier producing a probability vector over `num_classes` classes.
pub trait ProbModel: Sync {
    fn num_classes(&self) -> usize;
    fn predict_proba(&self, img: &Image) -> Vec<f64>;
}

/// Index of the largest entry; ties go to the smallest index.
pub fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in p.iter().enumerate().skip(1) {
        if v > p[best] {
            best = i;
        }
    }
    best
}

/// Most frequent label; ties go to the smallest label. `None` when empty.
pub fn majority_vote(labels: &[usize]) -> Option<usize> {
    let max = *labels.iter().max()?;
    let mut counts = vec![0usize; max + 1];
    for &l in labels {
        counts[l] += 1;
    }
    let mut best = 0;
    for (label, &n) in counts.iter().enumerate() {
        if n > counts[best] {
            best = label;
        }
    }
    Some(best)
}

fn check_labels(preds: &[Vec<f64>], labels: &[usize]) -> Result<(), EvalError> {
    if preds.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            preds: preds.len(),
            labels: labels.len(),
        });
    }
    for (p, &l) in preds.iter().zip(labels) {
        if l >= p.len() {
            return Err(EvalError::InvalidClass {
                class: l,
                classes: p.len(),
            });
        }
    }
    Ok(())
}

/// υ_c: share of the class-`c` test samples whose argmax prediction is `c`.
pub fn accuracy_per_class(
    preds: &[Vec<f64>],
    labels: &[usize],
    c: usize,
) -> Result<f64, EvalError> {
    check_labels(preds, labels)?;
    let mut total = 0usize;
    let mut hits = 0usize;
    for (p, &l) in preds.iter().zip(labels) {
        if l == c {
            total += 1;
            if argmax(p) == c {
                hits += 1;
            }
        }
    }
    if total == 0 {
        return Err(EvalError::EmptyTestSet);
    }
    Ok(hits as f64 / total as f64)
}

/// κ_c: mean probability assigned to class `c` over `preds`.
pub fn confidence_per_class(preds: &[Vec<f64>], c: usize) -> Result<f64, EvalError> {
    if preds.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let mut sum = 0.0;
    for p in preds {
        sum += *p.get(c).ok_or(EvalError::InvalidClass {
            class: c,
            classes: p.len(),
        })?;
    }
    Ok(sum / preds.len() as f64)
}

/// Share of all samples whose argmax equals their label.
pub fn overall_accuracy(preds: &[Vec<f64>], labels: &[usize]) -> Result<f64, EvalError> {
    check_labels(preds, labels)?;
    if preds.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let hits = preds
        .iter()
        .zip(labels)
        .filter(|(p, &l)| argmax(p) == l)
        .count();
    Ok(hits as f64 / preds.len() as f64)
}

/// Flattened nearest-neighbour downscale to `side x side`, scaled to `[0, 1]`.
pub fn features(img: &Image, side: usize) -> Vec<f64> {
    img.resize_nearest(side, side)
        .expect("feature side is positive")
        .pixels()
        .iter()
        .map(|&p| p as f64 / 255.0)
        .collect()
}

fn rms_distance(a: &[f64], b: &[f64]) -> f64 {
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (sq / a.len() as f64).sqrt()
}

/// Class centroids; probabilities are `softmax(-rms_distance / temperature)`.
#[derive(Debug, Clone)]
pub struct NearestCentroid {
    side: usize,
    temperature: f64,
    centroids: Vec<Vec<f64>>,
}

impl NearestCentroid {
    pub fn fit<'a>(
        samples: impl IntoIterator<Item = (&'a Image, usize)>,
        num_classes: usize,
        side: usize,
        temperature: f64,
    ) -> Result<Self, EvalError> {
        if side == 0 || temperature.is_nan() || temperature <= 0.0 {
            return Err(EvalError::Config(
                "side and temperature must be positive".into(),
            ));
        }
        let dim = side * side;
        // Integer sums keep the centroids independent of sample order.
        let mut sums = vec![vec![0u64; dim]; num_classes];
        let mut counts = vec![0u64; num_classes];
        for (img, class) in samples {
            if class >= num_classes {
                return Err(EvalError::InvalidClass {
                    class,
                    classes: num_classes,
                });
            }
            let small = img.resize_nearest(side, side).expect("side is positive");
            for (s, &p) in sums[class].iter_mut().zip(small.pixels()) {
                *s += p as u64;
            }
            counts[class] += 1;
        }
        if let Some(empty) = counts.iter().position(|&n| n == 0) {
            return Err(EvalError::EmptyClass(empty));
        }
        let centroids = sums
            .iter()
            .zip(&counts)
            .map(|(sum, &n)| sum.iter().map(|&s| s as f64 / (255.0 * n as f64)).collect())
            .collect();
        Ok(Self {
            side,
            temperature,
            centroids,
        })
    }
}

impl ProbModel for NearestCentroid {
    fn num_classes(&self) -> usize {
        self.centroids.len()
    }

    fn predict_proba(&self, img: &Image) -> Vec<f64> {
        let f = features(img, self.side);
        let logits: Vec<f64> = self
            .centroids
            .iter()
            .map(|c| -rms_distance(&f, c) / self.temperature)
            .collect();
        let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exp: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
        let total: f64 = exp.iter().sum();
        exp.into_iter().map(|e| e / total).collect()
    }
}

/// k-nearest-neighbour; probabilities are the neighbours' class vote fractions.
///
/// Distance ties are broken by class index, so the result does not depend on
/// training order.
#[derive(Debug, Clone)]
pub struct Knn {
    side: usize,
    k: usize,
    num_classes: usize,
    train: Vec<(Vec<f64>, usize)>,
}

impl Knn {
    pub fn fit<'a>(
        samples: impl IntoIterator<Item = (&'a Image, usize)>,
        num_classes: usize,
        side: usize,
        k: usize,
    ) -> Result<Self, EvalError> {
        if side == 0 || k == 0 {
            return Err(EvalError::Config("side and k must be positive".into()));
        }
        let mut train = Vec::new();
        let mut seen = vec![false; num_classes];
        for (img, class) in samples {
            if class >= num_classes {
                return Err(EvalError::InvalidClass {
                    class,
                    classes: num_classes,
                });
            }
            seen[class] = true;
            train.push((features(img, side), class));
        }
        if let Some(empty) = seen.iter().position(|&s| !s) {
            return Err(EvalError::EmptyClass(empty));
        }
        Ok(Self {
            side,
            k,
            num_classes,
            train,
        })
    }
}

impl ProbModel for Knn {
    fn num_classes(&self) -> usize {
        self.num_classes
    }

    fn predict_proba(&self, img: &Image) -> Vec<f64> {
        let f = features(img, self.side);
        let mut dists: Vec<(f64, usize)> = self
            .train
            .iter()
            .map(|(t, class)| (rms_distance(&f, t), *class))
            .collect();
        dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let k = self.k.min(dists.len());
        let mut probs = vec![0.0; self.num_classes];
        for &(_, class) in &dists[..k] {
            probs[class] += 1.0;
        }
        probs.iter_mut().for_each(|p| *p /= k as f64);
        probs
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelConfig {
    NearestCentroid { side: usize, temperature: f64 },
    Knn { side: usize, k: usize },
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::NearestCentroid {
            side: 16,
            temperature: 0.05,
        }
    }
}

impl ModelConfig {
    pub fn fit<'a>(
        &self,
        samples: impl IntoIterator<Item = (&'a Image, usize)>,
        num_classes: usize,
    ) -> Result<Box<dyn ProbModel>, EvalError> {
        Ok(match *self {
            ModelConfig::NearestCentroid { side, temperature } => Box::new(NearestCentroid::fit(
                samples,
                num_classes,
                side,
                temperature,
            )?),
            ModelConfig::Knn { side, k } => Box::new(Knn::fit(samples, num_classes, side, k)?),
        })
    }

    pub fn describe(&self) -> String {
        match self {
            ModelConfig::NearestCentroid { side, temperature } => {
                format!("nearest-centroid(side={side}, temperature={temperature})")
            }
            ModelConfig::Knn { side, k } => format!("knn(side={side}, k={k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vote {
    /// Per-pole argmax labels, in pole order.
    pub labels: Vec<usize>,
    pub winner: usize,
}

impl Vote {
    /// Label frequencies as a probability vector; its argmax is the winner.
    pub fn fractions(&self, num_classes: usize) -> Vec<f64> {
        let mut p = vec![0.0; num_classes];
        for &l in &self.labels {
            p[l] += 1.0;
        }
        let n = self.labels.len() as f64;
        p.iter_mut().for_each(|v| *v /= n);
        p
    }
}

/// Classifies the radial transform of `img` at each pole and takes the majority label.
pub fn vote_labels(
    img: &Image,
    poles: &[Pole],
    params: RadialParams,
    model: &dyn ProbModel,
) -> Result<Vote, EvalError> {
    if poles.is_empty() {
        return Err(EvalError::NoPoles);
    }
    let table = RayTable::new(params.rays, params.radii)?;
    let labels = poles
        .iter()
        .map(|&pole| {
            let transformed = table.render(img, pole, params.fill)?;
            Ok(argmax(&model.predict_proba(&transformed)))
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    let winner = majority_vote(&labels).expect("non-empty");
    Ok(Vote { labels, winner })
}

/// How test images are classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inference {
    Direct,
    /// Majority vote over `poles` seeded random poles.
    Vote {
        poles: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InferenceMode {
    /// Vote when the training manifest holds radial transforms, direct otherwise.
    Auto,
    Direct,
    Vote,
}

pub const DEFAULT_TEST_POLES: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub inference: InferenceMode,
    pub poles: usize,
    pub seed: u64,
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            inference: InferenceMode::Auto,
            poles: DEFAULT_TEST_POLES,
            seed: 0,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub name: String,
    pub count: usize,
    /// υ_c
    pub accuracy: f64,
    /// κ_c, averaged over the class-`c` test samples.
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub classes: Vec<ClassReport>,
    pub overall_accuracy: f64,
    pub macro_accuracy: f64,
    pub macro_confidence: f64,
    pub total: usize,
    pub seed: u64,
    pub inference: Inference,
    pub model: String,
}

#[derive(Serialize)]
struct ReportHeader<'a> {
    format: &'a str,
    version: u32,
    model: &'a str,
    inference: &'a str,
    poles: usize,
    seed: u64,
}

#[derive(Serialize)]
struct ReportSummary {
    total: usize,
    overall_accuracy: f64,
    macro_accuracy: f64,
    macro_confidence: f64,
}

impl EvalReport {
    /// Builds the report from per-sample probability vectors and labels.
    pub fn from_predictions(
        class_names: &[String],
        preds: &[Vec<f64>],
        labels: &[usize],
        seed: u64,
        inference: Inference,
        model: String,
    ) -> Result<Self, EvalError> {
        check_labels(preds, labels)?;
        let mut classes = Vec::with_capacity(class_names.len());
        for (c, name) in class_names.iter().enumerate() {
            let (class_preds, class_labels): (Vec<Vec<f64>>, Vec<usize>) = preds
                .iter()
                .zip(labels)
                .filter(|(_, &l)| l == c)
                .map(|(p, &l)| (p.clone(), l))
                .unzip();
            classes.push(ClassReport {
                name: name.clone(),
                count: class_preds.len(),
                accuracy: accuracy_per_class(&class_preds, &class_labels, c)?,
                confidence: confidence_per_class(&class_preds, c)?,
            });
        }
        let n = classes.len() as f64;
        Ok(Self {
            overall_accuracy: overall_accuracy(preds, labels)?,
            macro_accuracy: classes.iter().map(|c| c.accuracy).sum::<f64>() / n,
            macro_confidence: classes.iter().map(|c| c.confidence).sum::<f64>() / n,
            total: preds.len(),
            classes,
            seed,
            inference,
            model,
        })
    }

    /// Overall accuracy recovered from the per-class figures:
    /// `Σ_c round(υ_c · |S_c|) / |S|` (the rounding recovers each integer hit count).
    pub fn accuracy_from_classes(&self) -> f64 {
        let hits: f64 = self
            .classes
            .iter()
            .map(|c| (c.accuracy * c.count as f64).round())
            .sum();
        hits / self.total as f64
    }

    fn inference_name(&self) -> (&'static str, usize) {
        match self.inference {
            Inference::Direct => ("direct", 0),
            Inference::Vote { poles } => ("vote", poles),
        }
    }

    /// Line-delimited JSON: header, one line per class, summary.
    pub fn write_structured(&self, mut w: impl Write) -> std::io::Result<()> {
        let (inference, poles) = self.inference_name();
        let header = ReportHeader {
            format: "radaug-report",
            version: 1,
            model: &self.model,
            inference,
            poles,
            seed: self.seed,
        };
        serde_json::to_writer(&mut w, &header)?;
        writeln!(w)?;
        for class in &self.classes {
            serde_json::to_writer(&mut w, class)?;
            writeln!(w)?;
        }
        serde_json::to_writer(
            &mut w,
            &ReportSummary {
                total: self.total,
                overall_accuracy: self.overall_accuracy,
                macro_accuracy: self.macro_accuracy,
                macro_confidence: self.macro_confidence,
            },
        )?;
        writeln!(w)?;
        w.flush()
    }

    pub fn to_table(&self) -> String {
        let (inference, poles) = self.inference_name();
        let width = self
            .classes
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(5)
            .max(7);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "model {} | inference {}{} | seed {}",
            self.model,
            inference,
            if poles > 0 {
                format!(" ({poles} poles)")
            } else {
                String::new()
            },
            self.seed
        );
        let _ = writeln!(
            out,
            "{:<width$} {:>6} {:>8} {:>8}",
            "class", "n", "υ (%)", "κ (%)"
        );
        for c in &self.classes {
            let _ = writeln!(
                out,
                "{:<width$} {:>6} {:>8.2} {:>8.2}",
                c.name,
                c.count,
                c.accuracy * 100.0,
                c.confidence * 100.0
            );
        }
        let _ = writeln!(
            out,
            "{:<width$} {:>6} {:>8.2} {:>8.2}",
            "average",
            self.total,
            self.macro_accuracy * 100.0,
            self.macro_confidence * 100.0
        );
        let _ = writeln!(
            out,
            "overall accuracy {:.2}%",
            self.overall_accuracy * 100.0
        );
        out
    }
}

/// Mean and sample standard deviation (n - 1; zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// `(mean, std)`
pub type MeanStd = (f64, f64);

/// Per-class and averaged mean±std over repeated runs.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateReport {
    pub runs: usize,
    /// `(name, accuracy (mean, std), confidence (mean, std))`
    pub classes: Vec<(String, MeanStd, MeanStd)>,
    pub accuracy: (f64, f64),
    pub confidence: (f64, f64),
}

impl AggregateReport {
    pub fn from_reports(reports: &[EvalReport]) -> Result<Self, EvalError> {
        let first = reports.first().ok_or(EvalError::EmptyTestSet)?;
        let mut classes = Vec::new();
        for (i, class) in first.classes.iter().enumerate() {
            let acc: Vec<f64> = reports.iter().map(|r| r.classes[i].accuracy).collect();
            let conf: Vec<f64> = reports.iter().map(|r| r.classes[i].confidence).collect();
            classes.push((class.name.clone(), mean_std(&acc), mean_std(&conf)));
        }
        let acc: Vec<f64> = reports.iter().map(|r| r.macro_accuracy).collect();
        let conf: Vec<f64> = reports.iter().map(|r| r.macro_confidence).collect();
        Ok(Self {
            runs: reports.len(),
            classes,
            accuracy: mean_std(&acc),
            confidence: mean_std(&conf),
        })
    }

    /// One-line `mean±std` summary in percent.
    pub fn summary_line(&self) -> String {
        format!(
            "runs {} | υ {:.2}±{:.2} | κ {:.2}±{:.2}",
            self.runs,
            self.accuracy.0 * 100.0,
            self.accuracy.1 * 100.0,
            self.confidence.0 * 100.0,
            self.confidence.1 * 100.0
        )
    }

    pub fn to_table(&self) -> String {
        let width = self
            .classes
            .iter()
            .map(|c| c.0.len())
            .max()
            .unwrap_or(5)
            .max(7);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$} {:>14} {:>14}", "class", "υ (%)", "κ (%)");
        let cell = |(m, s): (f64, f64)| format!("{:.2}±{:.2}", m * 100.0, s * 100.0);
        for (name, acc, conf) in &self.classes {
            let _ = writeln!(
                out,
                "{:<width$} {:>14} {:>14}",
                name,
                cell(*acc),
                cell(*conf)
            );
        }
        let _ = writeln!(
            out,
            "{:<width$} {:>14} {:>14}",
            "average",
            cell(self.accuracy),
            cell(self.confidence)
        );
        out
    }
}

fn build_pool(workers: usize) -> Result<rayon::ThreadPool, EvalError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| EvalError::Config(format!("thread pool: {e}")))
}

/// Radial shape and fill used for test-time voting; `shape: None` means
/// `(rows, cols)` of each test image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VoteTransform {
    pub shape: Option<(usize, usize)>,
    pub fill: FillPolicy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalSettings {
    pub inference: Inference,
    pub vote_transform: VoteTransform,
    pub seed: u64,
    pub workers: usize,
}

/// Poles used to vote on test sample `sample`: `pick_pole(derive_item_seed(seed, sample, t))`.
pub fn test_poles(seed: u64, sample: usize, count: usize, rows: usize, cols: usize) -> Vec<Pole> {
    (0..count as u64)
        .map(|t| pick_pole(derive_item_seed(seed, sample as u64, t), rows, cols))
        .collect()
}

/// Classifies labeled images and builds the report.
///
/// Under vote inference a sample's probability vector is its vote fractions.
pub fn evaluate(
    model: &dyn ProbModel,
    model_name: &str,
    class_names: &[String],
    test: &[(Image, usize)],
    settings: &EvalSettings,
) -> Result<EvalReport, EvalError> {
    if test.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let classify = |(idx, (img, _)): (usize, &(Image, usize))| -> Result<Vec<f64>, EvalError> {
        match settings.inference {
            Inference::Direct => Ok(model.predict_proba(img)),
            Inference::Vote { poles } => {
                let vt = settings.vote_transform;
                let (rays, radii) = vt.shape.unwrap_or((img.rows(), img.cols()));
                let params = RadialParams::new(rays, radii, vt.fill)?;
                let poles = test_poles(settings.seed, idx, poles, img.rows(), img.cols());
                Ok(vote_labels(img, &poles, params, model)?.fractions(model.num_classes()))
            }
        }
    };
    let preds: Vec<Vec<f64>> = build_pool(settings.workers)?.install(|| {
        test.par_iter()
            .enumerate()
            .map(classify)
            .collect::<Result<Vec<_>, EvalError>>()
    })?;
    let labels: Vec<usize> = test.iter().map(|(_, l)| *l).collect();
    EvalReport::from_predictions(
        class_names,
        &preds,
        &labels,
        settings.seed,
        settings.inference,
        model_name.to_string(),
    )
}

fn load_all(
    paths: Vec<(PathBuf, usize)>,
    workers: usize,
) -> Result<Vec<(Image, usize)>, EvalError> {
    build_pool(workers)?.install(|| {
        paths
            .into_par_iter()
            .map(|(path, class)| {
                read_image(&path)
                    .map(|img| (img, class))
                    .map_err(|source| EvalError::Load { path, source })
            })
            .collect()
    })
}

/// Trains on the images listed in `manifest` (outputs resolved against
/// `train_root`) and evaluates on `test`.
pub fn run_experiment(
    manifest: &DatasetManifest,
    train_root: &Path,
    test: &LabeledDataset,
    config: &ExperimentConfig,
) -> Result<EvalReport, EvalError> {
    if manifest.classes != test.classes {
        return Err(EvalError::Config(format!(
            "training classes {:?} differ from test classes {:?}",
            manifest.classes, test.classes
        )));
    }
    if manifest.records.is_empty() {
        return Err(EvalError::Config("training manifest has no records".into()));
    }
    let radial = manifest.records.iter().find_map(|r| match r.transform {
        TransformRecord::Radial {
            rays, radii, fill, ..
        } => Some(VoteTransform {
            shape: Some((rays, radii)),
            fill,
        }),
        _ => None,
    });
    let inference = match (config.inference, radial.is_some()) {
        (InferenceMode::Direct, _) | (InferenceMode::Auto, false) => Inference::Direct,
        (InferenceMode::Vote, _) | (InferenceMode::Auto, true) => {
            if config.poles == 0 {
                return Err(EvalError::NoPoles);
            }
            Inference::Vote {
                poles: config.poles,
            }
        }
    };
    let train = load_all(
        manifest
            .records
            .iter()
            .map(|r| (train_root.join(&r.output), r.class))
            .collect(),
        config.workers,
    )?;
    let test_images = load_all(
        test.items
            .iter()
            .map(|i| (i.path.clone(), i.class))
            .collect(),
        config.workers,
    )?;
    let model = config.model.fit(
        train.iter().map(|(img, c)| (img, *c)),
        manifest.classes.len(),
    )?;
    let settings = EvalSettings {
        inference,
        vote_transform: radial.unwrap_or_default(),
        seed: config.seed,
        workers: config.workers,
    };
    evaluate(
        model.as_ref(),
        &config.model.describe(),
        &test.classes,
        &test_images,
        &settings,
    )
}
